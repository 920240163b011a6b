//! Phase-space geometry, spectral solver and diagnostics for the massive
//! relativistic Vlasov–Nordström system in three dimensions.
//!
//! * [`geometry`]: modulation functions, vector fields, `D_v`
//!   decompositions and commutator tables, all evaluated exactly.
//! * [`lpfourier`]: FFT plumbing, Littlewood–Paley cutoffs, Riesz-type
//!   multipliers and the symbol-norm estimator.
//! * [`profiles`]: free-streaming profiles, half-wave profiles, the modified
//!   wave profile and the profile equations.
//! * [`solver`]: Strang-split semi-Lagrangian/spectral time stepping.
//! * [`diagnostics`]: weighted energies, decay scans, weight-ratio checks.
//! * [`oracle`]: finite-difference and quadrature references that share no
//!   formula code with the modules above.

pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod lpfourier;
pub mod oracle;
pub mod profiles;
pub mod solver;

pub use error::{Result, RvnError};
pub use geometry::{ALetter, AWord, CoefficientTable, KLetter, KWord, PhasePoint, VectorFieldId};
pub use jet::{Jet, Real};
pub use lpfourier::Grid3;
