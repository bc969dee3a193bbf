//! Standard inputs: the off-center bump, the square plateau, the radial
//! disk, and seeded random grids.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{radius_key, sample, GridError, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `exp(−4|z − 0.7|²)` cut off outside the centered disk of radius 1.2.
    Bump,
    /// Smooth plateau `φ(x)φ(y)`, equal to 1 on `[−0.6, 0.6]²` and vanishing
    /// outside `[−0.95, 0.95]²`. Symmetric decreasing along both axes.
    Square,
    /// Smooth radial plateau, 1 for `|z| ≤ 0.5` and 0 for `|z| ≥ 1.1`.
    Disk,
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Bump, Builtin::Square, Builtin::Disk];

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Builtin::Bump => {
                if x * x + y * y > 1.2 * 1.2 {
                    0.0
                } else {
                    let dx = x - 0.7;
                    (-4.0 * (dx * dx + y * y)).exp()
                }
            }
            Builtin::Square => {
                let side = |t: f64| smoothstep((0.95 - t.abs()) / 0.35);
                side(x) * side(y)
            }
            Builtin::Disk => smoothstep((1.1 - x.hypot(y)) / 0.6),
        }
    }

    pub fn sample(&self, resolution: usize, half_width: f64) -> Result<GridFunction, GridError> {
        sample(|x, y| self.eval(x, y), resolution, half_width)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Bump => "bump",
            Builtin::Square => "square",
            Builtin::Disk => "disk",
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown builtin {s:?} (expected bump, square or disk)"))
    }
}

/// Independent uniform `[0, 1)` values on every cell inside the centered disk
/// of radius `L/√2`, zero elsewhere.
pub fn random_grid(
    seed: u64,
    resolution: usize,
    half_width: f64,
) -> Result<GridFunction, GridError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = resolution;
    let limit = (n * n) as u64;
    let values = (0..n * n)
        .map(|k| {
            if 2 * radius_key(k / n, k % n, n) <= limit {
                rng.random::<f64>()
            } else {
                0.0
            }
        })
        .collect();
    GridFunction::from_values(n, half_width, values)
}
