//! Error budgets for the interpolated operations.
//!
//! Rotations by angles that are not quarter turns resample the grid, so the
//! continuum identities (rotation invariance of `J`, radial functions being
//! fixed by every symmetrization, the rotated-frame recursion) hold only up to
//! interpolation error. The budgets below are measured by
//! [`Calibration::measure`] on fixed inputs and seeds, stored in
//! `calibration.toml` next to this crate's manifest, and asserted as
//! regression bounds by the tests.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angles::{discrepancy, vdc_prefix, DyadicAngle};
use crate::builtins::{random_grid, Builtin};
use crate::experiment::{
    gap_recursion_check, iterate, DirectionSequence, ExperimentError, IterateConfig,
};
use crate::grid::{
    angular_energy, gauss_functional, rearrange_radial, rotate, sample, steiner_direction,
    sup_distance, GridError, GridFunction,
};

/// Factor between a measured quantity and the bound pinned from it, unless a
/// different rule is stated on the field.
pub const MARGIN: f64 = 1.25;

/// Seeds `0..RANDOM_GRIDS` are used for every random-grid measurement.
pub const RANDOM_GRIDS: u64 = 100;

/// Angles (turn fractions) used for the `J` budget.
pub const J_ANGLES: [(u128, u32); 2] = [(1, 3), (3, 3)];

/// Angles used for the radial fixed-point budget.
pub const FIXED_POINT_ANGLES: [(u128, u32); 5] = [(1, 3), (3, 3), (1, 4), (5, 5), (1, 6)];

/// Length of the bump run used for the `J` budget.
pub const BUMP_STEPS: usize = 256;

pub const HALF_WIDTH: f64 = 2.0;

/// Rings and samples for every spectral measurement.
pub const SPECTRAL_RINGS: usize = 64;
pub const SPECTRAL_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionBudget {
    pub resolution: usize,
    /// `ε_J(n)`: twice the largest decrease of `J` seen either in one
    /// symmetrization of a random grid at [`J_ANGLES`] or between consecutive
    /// rows of a [`BUMP_STEPS`]-step van der Corput run on the bump.
    pub epsilon_j: f64,
    /// `τ_interp(n)`: largest `sup_distance(S_α f*, f*)` for the bump's `f*`
    /// over [`FIXED_POINT_ANGLES`], with [`MARGIN`].
    pub tau_interp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub budgets: Vec<ResolutionBudget>,
    /// `sup_distance(bump, bump*)` at `n = 128`, recorded exactly.
    pub baseline_distance: f64,
    /// Relative mass drift of the bump under a rotation by π/4 at `n = 128`
    /// (measured, not a bound).
    pub rotate_eighth_mass_drift: f64,
    /// Relative mass drift of `S_α` at `α = 3/8` turn on the bump, with
    /// [`MARGIN`].
    pub symmetrize_mass_drift_bound: f64,
    /// Non-radial fraction of the sampled Gaussian `e^{−|z|²}` at `n = 128`
    /// (measured).
    pub radial_noise_floor: f64,
    /// Non-radial fraction of the bump's `f*` at `n = 128`.
    pub bump_star_nonradial_fraction: f64,
    /// Non-radial fraction of the raw bump at `n = 128`.
    pub bump_nonradial_fraction: f64,
    /// `sup_distance(f_m, f*)` over 64 van der Corput steps from the bump's
    /// `f*`, and over 16 steps of the golden, random and fixed sequences,
    /// with [`MARGIN`].
    pub radial_drift_bound: f64,
    /// Largest frame error of the rotated-frame recursion on the bump at
    /// `n = 128` for `(j, n) ∈ {(3, 1), (4, 7)}`, with [`MARGIN`].
    pub frame_tolerance: f64,
    /// `N·D_N / log₂(N + 1)` over `N = 2^4 … 2^12`, maximum times 1.25.
    pub discrepancy_ratio_bound: f64,
}

const PINNED: &str = include_str!("../calibration.toml");

/// The checked-in calibration.
pub fn pinned() -> &'static Calibration {
    static CELL: OnceLock<Calibration> = OnceLock::new();
    CELL.get_or_init(|| toml::from_str(PINNED).expect("calibration.toml is well formed"))
}

impl Calibration {
    pub fn budget(&self, resolution: usize) -> Option<&ResolutionBudget> {
        self.budgets.iter().find(|b| b.resolution == resolution)
    }

    pub fn epsilon_j(&self, resolution: usize) -> Option<f64> {
        self.budget(resolution).map(|b| b.epsilon_j)
    }

    pub fn tau_interp(&self, resolution: usize) -> Option<f64> {
        self.budget(resolution).map(|b| b.tau_interp)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("calibration serializes")
    }

    /// Re-runs every measurement. Takes tens of seconds in release builds.
    pub fn measure() -> Result<Calibration, ExperimentError> {
        let budgets = [64, 128, 256]
            .into_iter()
            .map(|n| {
                Ok(ResolutionBudget {
                    resolution: n,
                    epsilon_j: 2.0 * max_j_violation(n, RANDOM_GRIDS)?.max(bump_j_decrease(n)?),
                    tau_interp: MARGIN * radial_fixed_point_error(n)?,
                })
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;

        let bump = Builtin::Bump.sample(128, HALF_WIDTH)?;
        let star = rearrange_radial(&bump);
        let eighth = rotate(&bump, DyadicAngle::new(1, 3).expect("valid"));
        let three_eighths = steiner_direction(&bump, DyadicAngle::new(3, 3).expect("valid"))?;

        let fraction = |g: &GridFunction| {
            angular_energy(g, SPECTRAL_RINGS, SPECTRAL_SAMPLES).map(|e| e.nonradial_fraction())
        };

        Ok(Calibration {
            budgets,
            baseline_distance: sup_distance(&bump, &star)?,
            rotate_eighth_mass_drift: relative_drift(&eighth, &bump),
            symmetrize_mass_drift_bound: MARGIN * relative_drift(&three_eighths, &bump).abs(),
            radial_noise_floor: fraction(&gaussian(128)?)?,
            bump_star_nonradial_fraction: fraction(&star)?,
            bump_nonradial_fraction: fraction(&bump)?,
            radial_drift_bound: MARGIN * radial_drift(&star)?,
            frame_tolerance: MARGIN * frame_error(&bump)?,
            discrepancy_ratio_bound: 1.25 * max_discrepancy_ratio(),
        })
    }
}

fn relative_drift(g: &GridFunction, reference: &GridFunction) -> f64 {
    (g.mass() - reference.mass()) / reference.mass()
}

/// `e^{−|z|²}` sampled on the whole square; the smooth radial reference for
/// the spectral noise floor.
pub fn gaussian(resolution: usize) -> Result<GridFunction, GridError> {
    sample(|x, y| (-(x * x + y * y)).exp(), resolution, HALF_WIDTH)
}

/// Largest drop of `J` between consecutive rows of the bump's van der Corput
/// run.
pub fn bump_j_decrease(resolution: usize) -> Result<f64, ExperimentError> {
    let bump = Builtin::Bump.sample(resolution, HALF_WIDTH)?;
    let out = iterate(
        &bump,
        &DirectionSequence::VanDerCorput,
        &IterateConfig::new(BUMP_STEPS),
        "calibration",
    )?;
    Ok(out
        .report
        .rows
        .windows(2)
        .map(|w| w[0].j - w[1].j)
        .fold(0.0, f64::max))
}

/// Largest `J(f) − J(S_α f)` over seeded random grids and [`J_ANGLES`]
/// (zero if `J` never decreases).
pub fn max_j_violation(resolution: usize, grids: u64) -> Result<f64, GridError> {
    let per_seed = (0..grids)
        .into_par_iter()
        .map(|seed| {
            let f = random_grid(seed, resolution, HALF_WIDTH)?;
            let j0 = gauss_functional(&f);
            let mut worst = 0.0f64;
            for (p, k) in J_ANGLES {
                let s = steiner_direction(&f, DyadicAngle::new(p, k).expect("valid"))?;
                worst = worst.max(j0 - gauss_functional(&s));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>, GridError>>()?;
    Ok(per_seed.into_iter().fold(0.0, f64::max))
}

/// Largest `sup_distance(S_α f*, f*)` for the bump's `f*`.
pub fn radial_fixed_point_error(resolution: usize) -> Result<f64, GridError> {
    let star = rearrange_radial(&Builtin::Bump.sample(resolution, HALF_WIDTH)?);
    let mut worst = 0.0f64;
    for (p, k) in FIXED_POINT_ANGLES {
        let s = steiner_direction(&star, DyadicAngle::new(p, k).expect("valid"))?;
        worst = worst.max(sup_distance(&s, &star)?);
    }
    Ok(worst)
}

fn radial_drift(star: &GridFunction) -> Result<f64, ExperimentError> {
    let runs = [
        (DirectionSequence::VanDerCorput, 64),
        (DirectionSequence::GoldenRotation, 16),
        (DirectionSequence::UniformRandom { seed: 0 }, 16),
        (
            DirectionSequence::FixedCycle(vec![DyadicAngle::ZERO, DyadicAngle::quarter_turns(1)]),
            16,
        ),
    ];
    let mut worst = 0.0f64;
    for (seq, steps) in runs {
        let out = iterate(star, &seq, &IterateConfig::new(steps), "calibration")?;
        for row in &out.report.rows {
            worst = worst.max(row.distance);
        }
    }
    Ok(worst)
}

fn frame_error(bump: &GridFunction) -> Result<f64, ExperimentError> {
    let mut worst = 0.0f64;
    for (j, n) in [(3, 1), (4, 7)] {
        let check = gap_recursion_check(bump, j, n, f64::INFINITY)?;
        worst = worst.max(check.max_frame_error());
    }
    Ok(worst)
}

/// `max N·D_N / log₂(N + 1)` over the van der Corput prefixes `N = 2^4 … 2^12`.
pub fn max_discrepancy_ratio() -> f64 {
    (4..=12)
        .map(|k| discrepancy_ratio(1 << k))
        .fold(0.0, f64::max)
}

pub fn discrepancy_ratio(n: usize) -> f64 {
    let d = discrepancy(&vdc_prefix(n)).expect("nonempty prefix");
    n as f64 * d.to_f64() / ((n + 1) as f64).log2()
}
