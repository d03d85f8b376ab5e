fn main() {
    std::process::exit(thermoqfi::cli::main_entry());
}
