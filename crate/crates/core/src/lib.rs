//! Steady states and temperature-estimation bounds for ancilla-mediated
//! qubit thermometers.
//!
//! A probe qubit is coupled to one or more ancilla qubits through an
//! asymmetric `sigma^z sigma^x` interaction; only the ancillas touch the
//! thermal sample. The global master equation in the dressed basis then
//! drives the network into a steady state whose reduced probe carries
//! temperature information in both populations and coherences. This crate
//! computes those steady states (in closed form and from the Liouvillian
//! null space), evaluates the quantum Fisher information of the probe, and
//! produces temperature-sweep datasets for the bundled figure presets.
//!
//! Core layout:
//!
//! * [`qcore`] — dense complex operator algebra (tensor products, partial
//!   trace, Gibbs states, Hermitian and general eigensolvers).
//! * [`model`] — thermometer Hamiltonians, dressing transformation, mixing
//!   angles, dressed frames.
//! * [`dynamics`] — jump channels, Lindblad right-hand side, fixed-step
//!   integration and Liouvillian null-space steady states.
//! * [`steady`] — closed-form steady states and reduced probe states.
//! * [`metrology`] — quantum Fisher information, error bounds, peak
//!   finding and scaling fits.
//! * [`validate`] — oracle-equivalence suites and documented-discrepancy
//!   comparisons.
//! * [`cli`] — the `thermoqfi` command-line front end.
//!
//! All numeric code is generic over the real scalar type through
//! [`scalar::Scalar`]; the concrete aliases below fix the `f64`
//! instantiation used by the CLI and the test suites.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod metrology;
pub mod model;
pub mod qcore;
pub mod scalar;
pub mod steady;
pub mod validate;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default real scalar used by the CLI and tests.
pub type Real = f64;
/// Complex number over [`Real`].
pub type Complex64 = num_complex::Complex<Real>;
/// Dense operator over [`Real`].
pub type Op = qcore::Operator<Real>;
/// Validated density matrix over [`Real`].
pub type Dm = qcore::DensityMatrix<Real>;
