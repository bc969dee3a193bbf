//! Executable invariant suites with fixed seeds.
//!
//! Each check yields one [`CheckOutcome`] whose `Display` is a single
//! machine-readable line, `name: PASS (detail)` or `name: FAIL (detail)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::angles::{discrepancy, gap, vdc_angle, vdc_prefix, DyadicAngle, SignedTurn};
use crate::builtins::{random_grid, Builtin};
use crate::calibration::{self, discrepancy_ratio, HALF_WIDTH};
use crate::experiment::{gap_recursion_check, iterate, DirectionSequence, IterateConfig};
use crate::grid::{
    gauss_functional, rearrange_radial, rotate, steiner_direction, steiner_vertical, sup_distance,
    GridError, GridFunction,
};
use crate::rearrange::{rearrange_1d, weighted_sum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Angles,
    Rearrange,
    Grid,
    Experiment,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["angles", "rearrange", "grid", "experiment", "all"];

    pub fn run(self) -> Vec<CheckOutcome> {
        match self {
            Suite::Angles => angles_suite(),
            Suite::Rearrange => rearrange_suite(),
            Suite::Grid => grid_suite(),
            Suite::Experiment => experiment_suite(),
            Suite::All => {
                let mut all = angles_suite();
                all.extend(rearrange_suite());
                all.extend(grid_suite());
                all.extend(experiment_suite());
                all
            }
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "angles" => Ok(Suite::Angles),
            "rearrange" => Ok(Suite::Rearrange),
            "grid" => Ok(Suite::Grid),
            "experiment" => Ok(Suite::Experiment),
            "all" => Ok(Suite::All),
            _ => Err(format!(
                "unknown suite `{s}` (expected one of {})",
                Suite::NAMES.join(", ")
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &str, result: Result<(bool, String), String>) -> Self {
        match result {
            Ok((passed, detail)) => CheckOutcome::new(name, passed, detail),
            Err(e) => CheckOutcome::new(name, false, format!("error: {e}")),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{}: {} ({})", self.name, verdict, self.detail)
    }
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

const GRID_SEEDS: u64 = 20;
const VECTOR_CASES: u64 = 500;
const SMALL_N: usize = 64;

fn angles_suite() -> Vec<CheckOutcome> {
    let selfsimilar = (1..=12u32).all(|j| {
        (1..1u64 << j).all(|n| matches!((gap((1 << j) + n), gap(n)), (Ok(a), Ok(b)) if a == b))
    });
    let power_gap = (1..=30u32)
        .all(|j| matches!((gap(1 << j), SignedTurn::new(3, j + 1)), (Ok(g), Ok(e)) if g == e));
    let canonical = (0..1u64 << 16).all(|n| {
        let a = vdc_angle(n);
        let reduced = DyadicAngle::new(u128::from(a.numerator()), a.exponent());
        let parsed = a.to_string().parse::<DyadicAngle>();
        reduced == Ok(a) && parsed == Ok(a) && (a.numerator() % 2 == 1 || a == DyadicAngle::ZERO)
    });
    let witnesses = (1..=256usize).into_par_iter().all(|count| {
        let points = vdc_prefix(count);
        discrepancy(&points).is_ok_and(|d| {
            d.witness_arc
                .deviation(&points)
                .is_ok_and(|dev| dev == d.value)
        })
    });
    let bound = calibration::pinned().discrepancy_ratio_bound;
    let worst = (4..=12)
        .map(|k| discrepancy_ratio(1 << k))
        .fold(0.0, f64::max);
    vec![
        CheckOutcome::new("gap-selfsimilarity j≤12", selfsimilar, "exact"),
        CheckOutcome::new("gap-power-of-two j≤30", power_gap, "exact"),
        CheckOutcome::new("vdc-canonical n<2^16", canonical, "exact"),
        CheckOutcome::new("discrepancy-witness N≤256", witnesses, "exact"),
        CheckOutcome::new(
            "equidistribution-trend N=2^4..2^12",
            worst <= bound,
            format!("max N·D_N/log2(N+1) = {worst:.6} ≤ {bound:.6}"),
        ),
    ]
}

fn random_vector(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.random_range(1..=64);
    // A small value alphabet forces ties.
    let levels = rng.random_range(1..=8u32);
    (0..len)
        .map(|_| {
            if rng.random_bool(0.5) {
                f64::from(rng.random_range(0..levels))
            } else {
                rng.random::<f64>() * 10.0
            }
        })
        .collect()
}

fn sorted_bits(values: &[f64]) -> Vec<u64> {
    let mut bits: Vec<u64> = values.iter().map(|v| v.to_bits()).collect();
    bits.sort_unstable();
    bits
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn rearrange_suite() -> Vec<CheckOutcome> {
    let mut multiset = true;
    let mut idempotent = true;
    let mut non_expansive = true;
    let mut weighted = true;
    for seed in 0..VECTOR_CASES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_vector(&mut rng);
        let w: Vec<f64> = v.iter().map(|_| rng.random::<f64>() * 10.0).collect();
        let (Ok(rv), Ok(rw)) = (rearrange_1d(&v), rearrange_1d(&w)) else {
            return vec![CheckOutcome::new(
                "rearrange-inputs",
                false,
                "rejected valid input",
            )];
        };
        multiset &= sorted_bits(&rv) == sorted_bits(&v);
        idempotent &= rearrange_1d(&rv).is_ok_and(|r| r == rv);
        non_expansive &= max_abs_diff(&rv, &rw) <= max_abs_diff(&v, &w);
        let m = v.len();
        let u: Vec<f64> = (0..m)
            .map(|i| {
                let y = (2.0 * i as f64 + 1.0 - m as f64) / m as f64;
                (-y * y).exp()
            })
            .collect();
        weighted &= weighted_sum(&rv, &u) >= weighted_sum(&v, &u);
    }
    let detail = format!("exact, {VECTOR_CASES} seeded vectors");
    vec![
        CheckOutcome::new("rearrange-multiset", multiset, detail.clone()),
        CheckOutcome::new("rearrange-idempotence", idempotent, detail.clone()),
        CheckOutcome::new("rearrange-non-expansive", non_expansive, detail.clone()),
        CheckOutcome::new("rearrange-weighted-gain", weighted, detail),
    ]
}

fn suite_angles() -> Vec<DyadicAngle> {
    [(0, 0), (1, 2), (1, 3), (3, 3)]
        .into_iter()
        .map(|(p, k)| DyadicAngle::new(p, k).expect("valid"))
        .collect()
}

fn seeded_grids(count: u64) -> Result<Vec<GridFunction>, GridError> {
    (0..count)
        .map(|s| random_grid(s, SMALL_N, HALF_WIDTH))
        .collect()
}

fn grid_suite() -> Vec<CheckOutcome> {
    let pinned = calibration::pinned();
    let equimeasurable = CheckOutcome::from_result(
        "grid-equimeasurability",
        (|| {
            let grids = seeded_grids(GRID_SEEDS).map_err(|e| e.to_string())?;
            let ok = grids.iter().all(|f| {
                [steiner_vertical(f), rearrange_radial(f)].iter().all(|g| {
                    sorted_bits(g.values()) == sorted_bits(f.values())
                        && g.mass().to_bits() == f.mass().to_bits()
                })
            });
            Ok((ok, format!("exact, {GRID_SEEDS} grids n={SMALL_N}")))
        })(),
    );

    let non_expansive = CheckOutcome::from_result(
        "grid-non-expansive",
        (|| {
            let mut ok = true;
            for seed in 0..GRID_SEEDS {
                let f = random_grid(seed, SMALL_N, HALF_WIDTH).map_err(|e| e.to_string())?;
                let g =
                    random_grid(seed + 10_000, SMALL_N, HALF_WIDTH).map_err(|e| e.to_string())?;
                let d = sup_distance(&f, &g).map_err(|e| e.to_string())?;
                let within =
                    |a: &GridFunction, b: &GridFunction| sup_distance(a, b).is_ok_and(|x| x <= d);
                ok &= within(&steiner_vertical(&f), &steiner_vertical(&g));
                ok &= within(&rearrange_radial(&f), &rearrange_radial(&g));
                for a in suite_angles() {
                    ok &= within(&rotate(&f, a), &rotate(&g, a));
                    let sf = steiner_direction(&f, a).map_err(|e| e.to_string())?;
                    let sg = steiner_direction(&g, a).map_err(|e| e.to_string())?;
                    ok &= within(&sf, &sg);
                }
            }
            Ok((
                ok,
                format!("exact, {GRID_SEEDS} pairs, angles 0,1/4,1/8,3/8"),
            ))
        })(),
    );

    let eps = pinned.epsilon_j(SMALL_N).unwrap_or(0.0);
    let j_monotone = CheckOutcome::from_result(
        "grid-J-monotone",
        (|| {
            let grids = seeded_grids(GRID_SEEDS).map_err(|e| e.to_string())?;
            let mut exact = true;
            let mut worst = 0.0f64;
            for f in &grids {
                let j0 = gauss_functional(f);
                exact &= gauss_functional(&steiner_vertical(f)) >= j0;
                for a in [DyadicAngle::new(1, 3), DyadicAngle::new(3, 3)] {
                    let a = a.expect("valid");
                    let s = steiner_direction(f, a).map_err(|e| e.to_string())?;
                    worst = worst.max(j0 - gauss_functional(&s));
                }
            }
            Ok((
                exact && worst <= eps,
                format!("exact at 0; max drop {worst:.3e} ≤ ε_J({SMALL_N}) = {eps:.3e} at 1/8,3/8"),
            ))
        })(),
    );

    let quarter = CheckOutcome::from_result(
        "grid-J-quarter-turn",
        (|| {
            let grids = seeded_grids(GRID_SEEDS).map_err(|e| e.to_string())?;
            let q = DyadicAngle::quarter_turns(1);
            let ok = grids.iter().all(|f| {
                gauss_functional(&rotate(f, q)).to_bits() == gauss_functional(f).to_bits()
                    && (0..4).fold(f.clone(), |g, _| rotate(&g, q)) == *f
            });
            Ok((ok, "exact".to_string()))
        })(),
    );

    let idempotent = CheckOutcome::from_result(
        "grid-idempotence",
        (|| {
            let grids = seeded_grids(GRID_SEEDS).map_err(|e| e.to_string())?;
            let ok = grids.iter().all(|f| {
                let s = steiner_vertical(f);
                let r = rearrange_radial(f);
                steiner_vertical(&s) == s && rearrange_radial(&r) == r
            });
            Ok((ok, "exact".to_string()))
        })(),
    );

    let tau = pinned.tau_interp(SMALL_N).unwrap_or(0.0);
    let radial_fixed = CheckOutcome::from_result(
        "grid-radial-fixed-point",
        calibration::radial_fixed_point_error(SMALL_N)
            .map(|e| {
                (
                    e <= tau,
                    format!("{e:.3e} ≤ τ_interp({SMALL_N}) = {tau:.3e}"),
                )
            })
            .map_err(|e| e.to_string()),
    );

    vec![
        equimeasurable,
        non_expansive,
        j_monotone,
        quarter,
        idempotent,
        radial_fixed,
    ]
}

fn experiment_suite() -> Vec<CheckOutcome> {
    let pinned = calibration::pinned();
    let n = 128;

    let determinism = CheckOutcome::from_result(
        "experiment-determinism",
        (|| {
            let bump = Builtin::Bump
                .sample(SMALL_N, HALF_WIDTH)
                .map_err(|e| e.to_string())?;
            let seq = DirectionSequence::VanDerCorput;
            let config = IterateConfig::new(16);
            let a = iterate(&bump, &seq, &config, "bump").map_err(|e| e.to_string())?;
            let b = iterate(&bump, &seq, &config, "bump").map_err(|e| e.to_string())?;
            let ok = a.report.same_observables(&b.report) && a.final_grid == b.final_grid;
            Ok((ok, "bit-identical, 16 steps".to_string()))
        })(),
    );

    let eps = pinned.epsilon_j(n).unwrap_or(0.0);
    let ascent = CheckOutcome::from_result(
        "experiment-J-ascent",
        (|| {
            let bump = Builtin::Bump
                .sample(n, HALF_WIDTH)
                .map_err(|e| e.to_string())?;
            let out = iterate(
                &bump,
                &DirectionSequence::VanDerCorput,
                &IterateConfig::new(64),
                "bump",
            )
            .map_err(|e| e.to_string())?;
            let worst = out
                .report
                .rows
                .windows(2)
                .map(|w| w[0].j - w[1].j)
                .fold(0.0, f64::max);
            Ok((
                worst <= eps,
                format!("max drop {worst:.3e} ≤ ε_J({n}) = {eps:.3e}, 64 steps"),
            ))
        })(),
    );

    let bound = pinned.radial_drift_bound;
    let stationarity = CheckOutcome::from_result(
        "experiment-stationarity",
        (|| {
            let star = rearrange_radial(
                &Builtin::Bump
                    .sample(n, HALF_WIDTH)
                    .map_err(|e| e.to_string())?,
            );
            let out = iterate(
                &star,
                &DirectionSequence::VanDerCorput,
                &IterateConfig::new(64),
                "bump*",
            )
            .map_err(|e| e.to_string())?;
            let worst = out
                .report
                .rows
                .iter()
                .map(|r| r.distance)
                .fold(0.0, f64::max);
            Ok((
                worst <= bound,
                format!("max distance {worst:.3e} ≤ {bound:.3e}, 64 steps"),
            ))
        })(),
    );

    let negative = CheckOutcome::from_result(
        "experiment-negative-control",
        (|| {
            let square = Builtin::Square
                .sample(SMALL_N, HALF_WIDTH)
                .map_err(|e| e.to_string())?;
            let seq = DirectionSequence::FixedCycle(vec![
                DyadicAngle::ZERO,
                DyadicAngle::quarter_turns(1),
            ]);
            let out = iterate(&square, &seq, &IterateConfig::new(32), "square")
                .map_err(|e| e.to_string())?;
            let initial = out.report.initial().distance;
            let worst = out
                .report
                .rows
                .iter()
                .skip(3)
                .map(|r| r.distance)
                .fold(f64::INFINITY, f64::min);
            Ok((
                worst >= 0.5 * initial,
                format!("min distance {worst:.4} ≥ 0.5 × {initial:.4}, 32 steps"),
            ))
        })(),
    );

    let tolerance = pinned.frame_tolerance;
    let frames = CheckOutcome::from_result(
        "experiment-gap-recursion",
        (|| {
            let bump = Builtin::Bump
                .sample(n, HALF_WIDTH)
                .map_err(|e| e.to_string())?;
            let mut ok = true;
            let mut worst = 0.0f64;
            for (j, m) in [(3, 1), (4, 7)] {
                let check =
                    gap_recursion_check(&bump, j, m, tolerance).map_err(|e| e.to_string())?;
                ok &= check.passed();
                worst = worst.max(check.max_frame_error());
            }
            Ok((
                ok,
                format!("gaps exact; frame error {worst:.3e} ≤ {tolerance:.3e}"),
            ))
        })(),
    );

    vec![determinism, ascent, stationarity, negative, frames]
}
