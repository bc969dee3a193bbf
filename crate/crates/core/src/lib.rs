//! Iterated Steiner symmetrization of planar functions along the van der
//! Corput directions.
//!
//! - [`angles`]: exact dyadic angles, the van der Corput sequence, its gaps
//!   and the exact circle discrepancy.
//! - [`rearrange`]: the one-dimensional symmetric decreasing rearrangement.
//! - [`grid`]: sampled functions, rotations, Steiner symmetrization, the
//!   radial rearrangement `f*`, the Gaussian functional `J` and the
//!   non-radial energy.
//! - [`experiment`]: the iteration `f_n = S_{θ_n} f_{n−1}` and its reports.
//! - [`calibration`]: measured error budgets for the interpolated operations.
//! - [`verify`]: executable invariant suites.

pub mod angles;
pub mod builtins;
pub mod calibration;
pub mod exact_sum;
pub mod experiment;
pub mod grid;
pub mod rearrange;
pub mod verify;

pub use angles::{discrepancy, gap, vdc_angle, DiscrepancyResult, DyadicAngle, SignedTurn};
pub use builtins::{random_grid, Builtin};
pub use calibration::Calibration;
pub use experiment::{
    compare_sequences, gap_recursion_check, iterate, ConvergenceReport, DirectionSequence,
    IterateConfig,
};
pub use grid::{
    gauss_functional, nonradial_energy, rearrange_radial, rotate, sample, steiner_direction,
    steiner_vertical, sup_distance, GridError, GridFunction,
};
pub use rearrange::{rearrange_1d, ValueVector};
