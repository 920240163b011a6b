//! Reference computations for the verification suites.
//!
//! Nothing here calls the closed forms, tables or energy evaluators it is
//! used to check; shared inputs are limited to grid types and letters.

pub mod fd;
pub mod fit;
pub mod literal;
pub mod quadrature;
pub mod spectral;
pub mod suite;

pub use fd::{fd_commutator, fd_vector_field, fd_word, FDScheme, PhaseFn};
pub use fit::{log_times, slope_fit, SlopeFit, MIN_POINTS};
pub use literal::{literal_coeffs, Literal};
pub use quadrature::{
    direct_energy_high_f, direct_energy_low_f, direct_energy_phi, direct_profile, direct_profile_rate,
    lagrange_derivative_weights, DirectEnergy, DirectWeight,
};
pub use suite::{gaussian_suite, phase_samples, Sample, TestFunction};
