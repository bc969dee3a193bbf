//! Iterated Steiner symmetrization `f_n = S_{θ_n} f_{n−1}` and its
//! convergence observables.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::angles::{gap, vdc_angle, AngleError, DyadicAngle};
use crate::grid::{
    angular_energy, clip_to_rotatable_disk, gauss_functional, rearrange_radial, rotate,
    steiner_direction, steiner_vertical, sup_distance, GridError, GridFunction,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("step {step}: {source}")]
    Step { step: usize, source: GridError },
    #[error("step {step}: non-finite value in the iterate")]
    NonFinite { step: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Angle(#[from] AngleError),
    #[error("invalid sequence {0:?}: expected vdc, golden, random[:SEED] or fixed:A,B,...")]
    BadSequence(String),
    #[error("gap recursion check needs 1 ≤ n < 2^j and 2^j + n ≤ {max}, got j = {j}, n = {n}")]
    BadIndices { j: u32, n: u64, max: u64 },
}

/// Angles produced as fractions of a turn over `2^QUANTIZATION_BITS` by the
/// golden and random sequences.
pub const QUANTIZATION_BITS: u32 = 32;

/// `2^64 (√5 − 1)/2`, rounded.
const GOLDEN_FRACTION: u64 = 0x9E37_79B9_7F4A_7C15;

/// Rule producing the direction `θ_n` for every `n ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectionSequence {
    VanDerCorput,
    /// `θ_n = n·(√5 − 1)/2` turns, truncated to 32 bits.
    GoldenRotation,
    /// Independent uniform angles derived from `(seed, n)` alone.
    UniformRandom {
        seed: u64,
    },
    /// Cycles through a fixed list.
    FixedCycle(Vec<DyadicAngle>),
}

impl DirectionSequence {
    pub fn fixed_cycle(angles: Vec<DyadicAngle>) -> Result<Self, ExperimentError> {
        if angles.is_empty() {
            return Err(ExperimentError::BadSequence("fixed:".into()));
        }
        Ok(DirectionSequence::FixedCycle(angles))
    }

    pub fn angle(&self, n: u64) -> DyadicAngle {
        let quantized = |bits: u64| {
            DyadicAngle::new(
                u128::from(bits >> (64 - QUANTIZATION_BITS)),
                QUANTIZATION_BITS,
            )
            .expect("exponent in range")
        };
        match self {
            DirectionSequence::VanDerCorput => vdc_angle(n),
            DirectionSequence::GoldenRotation => quantized(n.wrapping_mul(GOLDEN_FRACTION)),
            DirectionSequence::UniformRandom { seed } => {
                // Counter mode: the n-th 64-bit word of the seeded stream.
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_word_pos(2 * u128::from(n));
                quantized(rng.next_u64())
            }
            DirectionSequence::FixedCycle(list) => list[(n % list.len() as u64) as usize],
        }
    }
}

impl fmt::Display for DirectionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionSequence::VanDerCorput => f.write_str("vdc"),
            DirectionSequence::GoldenRotation => f.write_str("golden"),
            DirectionSequence::UniformRandom { seed } => write!(f, "random:{seed}"),
            DirectionSequence::FixedCycle(list) => {
                f.write_str("fixed:")?;
                for (i, a) in list.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
    }
}

/// Accepts `vdc`, `golden`, `random` (seed 0), `random:SEED` and
/// `fixed:A,B,...` with turn fractions such as `0,1/4`.
impl FromStr for DirectionSequence {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExperimentError::BadSequence(s.to_string());
        match s.trim() {
            "vdc" | "van-der-corput" => Ok(DirectionSequence::VanDerCorput),
            "golden" => Ok(DirectionSequence::GoldenRotation),
            "random" => Ok(DirectionSequence::UniformRandom { seed: 0 }),
            other => {
                if let Some(seed) = other.strip_prefix("random:") {
                    let seed = seed.parse().map_err(|_| bad())?;
                    Ok(DirectionSequence::UniformRandom { seed })
                } else if let Some(list) = other.strip_prefix("fixed:") {
                    let angles = list
                        .split(',')
                        .map(|a| a.parse::<DyadicAngle>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>, _>>()?;
                    DirectionSequence::fixed_cycle(angles)
                } else {
                    Err(bad())
                }
            }
        }
    }
}

/// How [`iterate`] advances the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// Carry `g_k = R_{−θ_k} f_k` with `g_k = S R_{−(θ_k − θ_{k−1})} g_{k−1}`
    /// and rotate into the lab frame only to measure. One resampling per step
    /// feeds back into the iteration.
    #[default]
    Rotated,
    /// Chain `f_k = S_{θ_k} f_{k−1}` literally. Two resamplings per step feed
    /// back.
    Lab,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Rotated => "rotated",
            Frame::Lab => "lab",
        })
    }
}

impl FromStr for Frame {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rotated" => Ok(Frame::Rotated),
            "lab" => Ok(Frame::Lab),
            _ => Err(format!("unknown frame {s:?} (expected rotated or lab)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateConfig {
    pub steps: usize,
    pub frame: Frame,
    /// Record every `stride`-th step (the first and last rows are always kept).
    pub stride: usize,
    /// Rescale to the input mass after every symmetrization.
    pub renormalize_mass: bool,
    pub n_rings: usize,
    pub n_samples: usize,
}

impl IterateConfig {
    pub fn new(steps: usize) -> Self {
        IterateConfig {
            steps,
            ..Default::default()
        }
    }
}

impl Default for IterateConfig {
    fn default() -> Self {
        IterateConfig {
            steps: 0,
            frame: Frame::default(),
            stride: 1,
            renormalize_mass: false,
            n_rings: 64,
            n_samples: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportHeader {
    pub input: String,
    pub resolution: usize,
    pub half_width: f64,
    pub sequence: String,
    pub config: IterateConfig,
    pub epsilon_j: Option<f64>,
}

impl ReportHeader {
    /// `key=value` pairs describing the run.
    pub fn stanza(&self) -> Vec<String> {
        let mut lines = vec![
            format!("input={}", self.input),
            format!("resolution={}", self.resolution),
            format!("half_width={}", self.half_width),
            format!("sequence={}", self.sequence),
            format!("steps={}", self.config.steps),
            format!("frame={}", self.config.frame),
            format!("stride={}", self.config.stride),
            format!("renormalize_mass={}", self.config.renormalize_mass),
            format!("n_rings={}", self.config.n_rings),
            format!("n_samples={}", self.config.n_samples),
        ];
        if let Some(eps) = self.epsilon_j {
            lines.push(format!("epsilon_j={eps}"));
        }
        lines
    }
}

/// Observables after `step` symmetrizations; `angle` is the direction of the
/// last one (zero for the initial row).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub step: usize,
    pub angle: DyadicAngle,
    pub distance: f64,
    pub j: f64,
    pub mass_drift: f64,
    pub nonradial_energy: f64,
    pub ms: f64,
}

impl ReportRow {
    /// Equality of everything except the wall-clock column.
    pub fn same_observables(&self, other: &ReportRow) -> bool {
        self.step == other.step
            && self.angle == other.angle
            && self.distance.to_bits() == other.distance.to_bits()
            && self.j.to_bits() == other.j.to_bits()
            && self.mass_drift.to_bits() == other.mass_drift.to_bits()
            && self.nonradial_energy.to_bits() == other.nonradial_energy.to_bits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub header: ReportHeader,
    pub rows: Vec<ReportRow>,
}

pub const REPORT_COLUMNS: &str =
    "step,angle_num,angle_den,distance,J,mass_drift,nonradial_energy,ms";

impl ConvergenceReport {
    pub fn initial(&self) -> &ReportRow {
        &self.rows[0]
    }

    pub fn last(&self) -> &ReportRow {
        self.rows.last().expect("report has an initial row")
    }

    /// Bit-identical observables, ignoring timings.
    pub fn same_observables(&self, other: &ConvergenceReport) -> bool {
        self.header == other.header
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.same_observables(b))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for line in self.header.stanza() {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "{REPORT_COLUMNS}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{:.3}",
                r.step,
                r.angle.numerator(),
                r.angle.denominator(),
                r.distance,
                r.j,
                r.mass_drift,
                r.nonradial_energy,
                r.ms
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub report: ConvergenceReport,
    pub target: GridFunction,
    pub final_grid: GridFunction,
}

/// Runs `steps` symmetrizations `f ↦ S_{θ_k} f` for `k = 0, 1, …` and records
/// the distance to the fixed target `f*`, the functional `J`, the relative
/// mass drift and the non-radial energy after each one.
pub fn iterate(
    f: &GridFunction,
    seq: &DirectionSequence,
    config: &IterateConfig,
    input: &str,
) -> Result<IterationOutcome, ExperimentError> {
    let stride = config.stride.max(1);
    let target = rearrange_radial(f);
    let mass0 = f.mass();
    let header = ReportHeader {
        input: input.to_string(),
        resolution: f.resolution(),
        half_width: f.half_width(),
        sequence: seq.to_string(),
        config: IterateConfig {
            stride,
            ..config.clone()
        },
        epsilon_j: crate::calibration::pinned().epsilon_j(f.resolution()),
    };

    let observe = |g: &GridFunction, step: usize, angle: DyadicAngle, ms: f64| {
        let energy = angular_energy(g, config.n_rings, config.n_samples)?;
        let mass = g.mass();
        if !mass.is_finite() {
            return Err(ExperimentError::NonFinite { step });
        }
        Ok::<_, ExperimentError>(ReportRow {
            step,
            angle,
            distance: sup_distance(g, &target)?,
            j: gauss_functional(g),
            mass_drift: if mass0 == 0.0 {
                0.0
            } else {
                (mass - mass0) / mass0
            },
            nonradial_energy: energy.nonradial,
            ms,
        })
    };

    let mut rows = vec![observe(f, 0, DyadicAngle::ZERO, 0.0)?];
    // Lab frame: the iterate itself. Rotated frame: R_{−θ_{k−1}} of it.
    let mut current = f.clone();
    let mut previous_angle = DyadicAngle::ZERO;
    for k in 0..config.steps {
        let started = Instant::now();
        let step = k + 1;
        let angle = seq.angle(k as u64);
        let symmetrized = match config.frame {
            Frame::Lab => steiner_direction(&current, angle),
            Frame::Rotated => steiner_rotated_frame(&current, angle.sub(&previous_angle)),
        };
        let mut next = symmetrized.map_err(|source| ExperimentError::Step { step, source })?;
        if config.renormalize_mass {
            next = next.renormalized(mass0);
        }
        let ms = started.elapsed().as_secs_f64() * 1e3;
        current = next;
        previous_angle = angle;
        if step % stride == 0 || step == config.steps {
            let lab = match config.frame {
                Frame::Lab => current.clone(),
                Frame::Rotated => rotate(&current, angle),
            };
            rows.push(observe(&lab, step, angle, ms)?);
        }
    }
    let final_grid = match config.frame {
        Frame::Rotated if config.steps > 0 => rotate(&current, previous_angle),
        _ => current,
    };
    Ok(IterationOutcome {
        report: ConvergenceReport { header, rows },
        target,
        final_grid,
    })
}

/// One step of the rotated-frame recursion: `S R_{−γ} g`, cut back to the
/// rotatable disk.
pub fn steiner_rotated_frame(
    g: &GridFunction,
    gap: DyadicAngle,
) -> Result<GridFunction, GridError> {
    g.check_rotatable_support()?;
    let mut out = steiner_vertical(&rotate(g, gap.neg()));
    clip_to_rotatable_disk(&mut out);
    Ok(out)
}

/// Final observables of one sequence in a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub sequence: String,
    pub steps: usize,
    pub initial_distance: f64,
    pub final_distance: f64,
    pub final_j: f64,
    pub final_mass_drift: f64,
    pub initial_nonradial: f64,
    pub final_nonradial: f64,
}

impl ComparisonRow {
    pub fn relative_distance(&self) -> f64 {
        if self.initial_distance == 0.0 {
            0.0
        } else {
            self.final_distance / self.initial_distance
        }
    }
}

pub const COMPARISON_COLUMNS: &str =
    "sequence,steps,initial_distance,final_distance,relative_distance,final_J,final_mass_drift,initial_nonradial,final_nonradial";

pub fn write_comparison_csv<W: Write>(
    rows: &[ComparisonRow],
    mut out: W,
    comments: &[String],
) -> io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{COMPARISON_COLUMNS}")?;
    for r in rows {
        let sequence = if r.sequence.contains(',') {
            format!("\"{}\"", r.sequence)
        } else {
            r.sequence.clone()
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            sequence,
            r.steps,
            r.initial_distance,
            r.final_distance,
            r.relative_distance(),
            r.final_j,
            r.final_mass_drift,
            r.initial_nonradial,
            r.final_nonradial
        )?;
    }
    Ok(())
}

/// Runs [`iterate`] for each sequence on the same input. Runs execute in
/// parallel; rows come back in the order of `kinds`.
pub fn compare_sequences(
    f: &GridFunction,
    kinds: &[DirectionSequence],
    config: &IterateConfig,
) -> Result<Vec<ComparisonRow>, ExperimentError> {
    kinds
        .par_iter()
        .map(|seq| {
            let out = iterate(f, seq, config, "compare")?;
            let (first, last) = (out.report.initial(), out.report.last());
            Ok(ComparisonRow {
                sequence: seq.to_string(),
                steps: config.steps,
                initial_distance: first.distance,
                final_distance: last.distance,
                final_j: last.j,
                final_mass_drift: last.mass_drift,
                initial_nonradial: first.nonradial_energy,
                final_nonradial: last.nonradial_energy,
            })
        })
        .collect()
}

/// Largest step index [`gap_recursion_check`] will run to.
pub const MAX_RECURSION_STEPS: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct GapRecursionCheck {
    /// `γ_{2^j+n} == γ_n` as exact rationals.
    pub gaps_equal: bool,
    /// `(m, sup_distance(R_{−θ_m} f_m, g_m))` at the sampled indices.
    pub frame_errors: Vec<(u64, f64)>,
    pub frame_tolerance: f64,
}

impl GapRecursionCheck {
    pub fn max_frame_error(&self) -> f64 {
        self.frame_errors.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    pub fn frames_consistent(&self) -> bool {
        self.max_frame_error() <= self.frame_tolerance
    }

    pub fn passed(&self) -> bool {
        self.gaps_equal && self.frames_consistent()
    }
}

/// Compares the lab-frame iteration `f_m = S_{θ_m} f_{m−1}` with the rotated
/// frame recursion `g_m = S R_{−γ_m} g_{m−1}` driven by the exact gaps, and
/// checks that the steps at `n` and `2^j + n` use the same gap.
///
/// Frames are compared at `m ∈ {1, 2, 4, …} ∪ {n, 2^j + n}`.
pub fn gap_recursion_check(
    f: &GridFunction,
    j: u32,
    n: u64,
    frame_tolerance: f64,
) -> Result<GapRecursionCheck, ExperimentError> {
    let bad = ExperimentError::BadIndices {
        j,
        n,
        max: MAX_RECURSION_STEPS,
    };
    if j == 0 || j > 12 || n == 0 || n >= 1 << j || (1u64 << j) + n > MAX_RECURSION_STEPS {
        return Err(bad);
    }
    let last = (1u64 << j) + n;
    let gaps_equal = gap(last)? == gap(n)?;

    let mut sampled: Vec<u64> = (0..)
        .map(|p| 1u64 << p)
        .take_while(|m| *m <= last)
        .collect();
    sampled.extend([n, last]);
    sampled.sort_unstable();
    sampled.dedup();

    let theta0 = vdc_angle(0);
    let mut lab = steiner_direction(f, theta0)?;
    let mut frame = steiner_rotated_frame(f, theta0)?;
    let mut frame_errors = Vec::new();
    for m in 1..=last {
        lab = steiner_direction(&lab, vdc_angle(m)).map_err(|source| ExperimentError::Step {
            step: m as usize,
            source,
        })?;
        frame = steiner_rotated_frame(&frame, gap(m)?.to_angle()).map_err(|source| {
            ExperimentError::Step {
                step: m as usize,
                source,
            }
        })?;
        if sampled.binary_search(&m).is_ok() {
            let back = rotate(&lab, vdc_angle(m).neg());
            frame_errors.push((m, sup_distance(&back, &frame)?));
        }
    }
    Ok(GapRecursionCheck {
        gaps_equal,
        frame_errors,
        frame_tolerance,
    })
}
