//! Brute-force oracle on enumerable state spaces.
//!
//! States are bit-encoded in `u32` (see [`StateKind`]). Measures are
//! [`ExactTable`]s, kernels are [`KernelMatrix`]es over a table's support,
//! and every divergence uses the natural logarithm. Dirichlet forms sum over
//! ordered pairs, and continuous time runs the semigroup at rate
//! [`CONTINUOUS_RATE`] so that `d/dt KL = −𝓔(f, log f)`.

mod conditional;
mod divergence;
mod evolve;
mod kernel;
mod mlsi;
mod quadrature;
mod rgd;
mod table;
mod tilt;

pub use conditional::{compress, conditional_restriction};
pub use divergence::{
    density, dirichlet_form, dirichlet_form_log, dissipation_of, divergences, entropy_dissipation, entropy_functional,
    kl_vec, tv_vec, Divergences,
};
pub use evolve::{
    evolve, evolve_continuous, kl_path, ls_fraction, time_averaged_dissipation, EvolveMode, CONTINUOUS_RATE, MIN_GRID,
};
pub use kernel::{
    block_resampling_kernel, glauber_kernel, glauber_kernel_with_selection, ising_glauber_kernel, KernelMatrix,
    KernelResiduals, Row, KERNEL_TOL, MAX_KERNEL_SITES,
};
pub use mlsi::{mlsi_lower_bound, mlsi_prefactor, spectral_gap, MAX_GAP_STATES};
pub use quadrature::{gauss_hermite, MIN_QUADRATURE_ORDER};
pub use rgd::{background_table, rgd_kernel, rgd_kernel_for, MAX_RGD_SITES};
pub use table::{
    enumerate_hardcore, enumerate_ising, independent_sets, uniform_indepset_expected_size, ExactTable, StateKind,
    MASS_TOL, MAX_ENUM_SITES,
};
pub use tilt::{
    expected_min_abs_normal, tilt, tilted_mean_curve, DecompositionConstants, TiltedCurve, DERIVATIVE_STEP,
    MAX_CURVE_SITES,
};
