//! Exact directions on the circle.
//!
//! Every angle is a fraction of a full turn whose denominator is a power of
//! two, stored as a reduced `(numerator, exponent)` pair. All arithmetic in
//! this module is integer arithmetic; the only conversion to floating point
//! is [`DyadicAngle::to_radians`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

/// Largest supported denominator exponent; `2^64` still fits the `u128`
/// intermediates used everywhere below.
pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AngleError {
    #[error("denominator exponent {0} exceeds the supported maximum of {MAX_EXPONENT}")]
    ExponentTooLarge(u32),
    #[error("gap is undefined for index 0")]
    GapAtZero,
    #[error("discrepancy of an empty point set is undefined")]
    EmptyPointSet,
    #[error("point set of {0} angles is too large for exact evaluation")]
    TooManyPoints(usize),
    #[error("cannot parse turn fraction {0:?}: expected `p/q` with q a power of two")]
    Parse(String),
}

fn pow2(exponent: u32) -> u128 {
    1u128 << exponent
}

/// An angle `2π · numerator / 2^exponent`, normalized into `[0, 2π)` and
/// reduced so that the numerator is odd (or the angle is zero with exponent 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicAngle {
    numerator: u64,
    exponent: u32,
}

impl DyadicAngle {
    pub const ZERO: DyadicAngle = DyadicAngle {
        numerator: 0,
        exponent: 0,
    };

    /// Builds `numerator / 2^exponent` turns, reducing modulo one turn.
    pub fn new(numerator: u128, exponent: u32) -> Result<Self, AngleError> {
        if exponent > MAX_EXPONENT {
            return Err(AngleError::ExponentTooLarge(exponent));
        }
        Ok(Self::reduce(numerator % pow2(exponent), exponent))
    }

    /// Signed variant of [`DyadicAngle::new`]; negative numerators wrap.
    pub fn from_signed(numerator: i128, exponent: u32) -> Result<Self, AngleError> {
        if exponent > MAX_EXPONENT {
            return Err(AngleError::ExponentTooLarge(exponent));
        }
        let den = pow2(exponent) as i128;
        Ok(Self::reduce(numerator.rem_euclid(den) as u128, exponent))
    }

    /// `quarters` quarter turns.
    pub fn quarter_turns(quarters: u32) -> Self {
        Self::reduce(u128::from(quarters % 4), 2)
    }

    fn reduce(mut numerator: u128, mut exponent: u32) -> Self {
        if numerator == 0 {
            return Self::ZERO;
        }
        let shift = numerator.trailing_zeros().min(exponent);
        numerator >>= shift;
        exponent -= shift;
        debug_assert!(numerator < pow2(exponent));
        DyadicAngle {
            numerator: numerator as u64,
            exponent,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `2^exponent`.
    pub fn denominator(&self) -> u128 {
        pow2(self.exponent)
    }

    /// Numerator scaled to the denominator `2^exponent`, which must be at
    /// least this angle's own exponent.
    pub fn numerator_at(&self, exponent: u32) -> u128 {
        debug_assert!(exponent >= self.exponent);
        u128::from(self.numerator) << (exponent - self.exponent)
    }

    pub fn neg(&self) -> Self {
        if self.numerator == 0 {
            return *self;
        }
        Self::reduce(
            self.denominator() - u128::from(self.numerator),
            self.exponent,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.exponent.max(other.exponent);
        let sum = self.numerator_at(k) + other.numerator_at(k);
        Self::reduce(sum % pow2(k), k)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Number of quarter turns if the angle is a multiple of π/2.
    pub fn as_quarter_turns(&self) -> Option<u32> {
        (self.exponent <= 2).then(|| (self.numerator << (2 - self.exponent)) as u32)
    }

    pub fn turns(&self) -> Ratio<u128> {
        Ratio::new(u128::from(self.numerator), self.denominator())
    }

    /// The fraction of a turn as a float (rounded once).
    pub fn to_turns_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator() as f64
    }

    /// The only place an angle becomes a floating-point radian value.
    pub fn to_radians(&self) -> f64 {
        self.to_turns_f64() * std::f64::consts::TAU
    }
}

impl Ord for DyadicAngle {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.exponent.max(other.exponent);
        self.numerator_at(k).cmp(&other.numerator_at(k))
    }
}

impl PartialOrd for DyadicAngle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}

/// Parses `p/q` (q a power of two), `p/2^k` or a bare integer number of turns.
impl FromStr for DyadicAngle {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, k) = parse_turn_fraction(s)?;
        DyadicAngle::from_signed(p, k)
    }
}

fn parse_turn_fraction(s: &str) -> Result<(i128, u32), AngleError> {
    let err = || AngleError::Parse(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let p: i128 = num.parse().map_err(|_| err())?;
    let k = match den {
        None => 0,
        Some(d) => {
            if let Some(e) = d.strip_prefix("2^") {
                e.parse::<u32>().map_err(|_| err())?
            } else {
                let q: u128 = d.parse().map_err(|_| err())?;
                if !q.is_power_of_two() {
                    return Err(err());
                }
                q.trailing_zeros()
            }
        }
    };
    if k > MAX_EXPONENT {
        return Err(AngleError::ExponentTooLarge(k));
    }
    Ok((p, k))
}

/// A signed dyadic fraction of a turn, reduced into `(-1/2, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedTurn {
    numerator: i64,
    exponent: u32,
}

impl SignedTurn {
    pub const ZERO: SignedTurn = SignedTurn {
        numerator: 0,
        exponent: 0,
    };

    /// Reduces `numerator / 2^exponent` modulo one turn into `(-1/2, 1/2]`.
    pub fn new(numerator: i128, exponent: u32) -> Result<Self, AngleError> {
        if exponent > MAX_EXPONENT {
            return Err(AngleError::ExponentTooLarge(exponent));
        }
        let den = pow2(exponent) as i128;
        let mut r = numerator.rem_euclid(den);
        if 2 * r > den {
            r -= den;
        }
        if r == 0 {
            return Ok(Self::ZERO);
        }
        let shift = r.trailing_zeros().min(exponent);
        Ok(SignedTurn {
            numerator: (r >> shift) as i64,
            exponent: exponent - shift,
        })
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn denominator(&self) -> u128 {
        pow2(self.exponent)
    }

    pub fn turns(&self) -> Ratio<i128> {
        Ratio::new(i128::from(self.numerator), self.denominator() as i128)
    }

    /// The same rotation as an angle in `[0, 2π)`.
    pub fn to_angle(&self) -> DyadicAngle {
        DyadicAngle::from_signed(i128::from(self.numerator), self.exponent)
            .expect("exponent already validated")
    }

    pub fn to_radians(&self) -> f64 {
        self.numerator as f64 / self.denominator() as f64 * std::f64::consts::TAU
    }
}

impl fmt::Display for SignedTurn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}

/// The `n`-th van der Corput direction: the binary digits of `n`, reversed
/// behind the radix point, as a fraction of a full turn.
pub fn vdc_angle(n: u64) -> DyadicAngle {
    if n == 0 {
        return DyadicAngle::ZERO;
    }
    let bits = u64::BITS - n.leading_zeros();
    let numerator = n.reverse_bits() >> (u64::BITS - bits);
    // The leading bit of n lands in the last place, so the fraction is reduced.
    DyadicAngle {
        numerator,
        exponent: bits,
    }
}

/// `θ_n − θ_{n−1}` for the van der Corput sequence, reduced into `(-1/2, 1/2]`
/// turns.
pub fn gap(n: u64) -> Result<SignedTurn, AngleError> {
    if n == 0 {
        return Err(AngleError::GapAtZero);
    }
    let a = vdc_angle(n);
    let b = vdc_angle(n - 1);
    let k = a.exponent().max(b.exponent());
    SignedTurn::new(a.numerator_at(k) as i128 - b.numerator_at(k) as i128, k)
}

/// A circular arc running counterclockwise from `start` to `end`, each end
/// either included or excluded. `start == end` denotes the single point when
/// both ends are closed and the empty arc otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub start: DyadicAngle,
    pub end: DyadicAngle,
    pub start_closed: bool,
    pub end_closed: bool,
}

impl Arc {
    /// Arc length as a fraction of a turn, in `[0, 1)`.
    pub fn length(&self) -> DyadicAngle {
        self.end.sub(&self.start)
    }

    pub fn contains(&self, point: &DyadicAngle) -> bool {
        if self.start == self.end {
            return self.start_closed && self.end_closed && *point == self.start;
        }
        if *point == self.start {
            return self.start_closed;
        }
        if *point == self.end {
            return self.end_closed;
        }
        point.sub(&self.start) < self.length()
    }

    /// `|#{points in arc}/N − length|`, evaluated from scratch.
    pub fn deviation(&self, points: &[DyadicAngle]) -> Result<Ratio<i128>, AngleError> {
        if points.is_empty() {
            return Err(AngleError::EmptyPointSet);
        }
        let count = points.iter().filter(|p| self.contains(p)).count() as i128;
        let n = points.len() as i128;
        let len = self.length();
        let len = Ratio::new(len.numerator() as i128, len.denominator() as i128);
        let d = Ratio::new(count, n) - len;
        Ok(if d < Ratio::from_integer(0) { -d } else { d })
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.start_closed { '[' } else { '(' },
            self.start,
            self.end,
            if self.end_closed { ']' } else { ')' }
        )
    }
}

/// Exact circle discrepancy of a finite point set together with an arc at
/// which the supremum is attained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscrepancyResult {
    pub value: Ratio<i128>,
    pub witness_arc: Arc,
    pub n_points: usize,
}

impl DiscrepancyResult {
    pub fn to_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }
}

/// Supremum over all arcs `A` of `|#{points in A}/N − |A|/2π|`.
///
/// Enumerates arcs whose endpoints are point positions, in all four
/// open/closed combinations. Open arcs between points are the limits of the
/// arcs that avoid them, so the supremum is attained within this family.
pub fn discrepancy(angles: &[DyadicAngle]) -> Result<DiscrepancyResult, AngleError> {
    let n_points = angles.len();
    if n_points == 0 {
        return Err(AngleError::EmptyPointSet);
    }
    if n_points > 1 << 32 {
        return Err(AngleError::TooManyPoints(n_points));
    }
    let k = angles.iter().map(|a| a.exponent()).max().unwrap_or(0);
    let turn = pow2(k) as i128;
    let n = n_points as i128;

    // Distinct positions in ascending order with multiplicities.
    let mut sorted: Vec<DyadicAngle> = angles.to_vec();
    sorted.sort_unstable();
    let mut positions: Vec<(i128, i128, DyadicAngle)> = Vec::new();
    for a in sorted {
        match positions.last_mut() {
            Some((_, mult, last)) if *last == a => *mult += 1,
            _ => positions.push((a.numerator_at(k) as i128, 1, a)),
        }
    }
    let m = positions.len();

    // Deviations are compared as integers over the common denominator N·2^k.
    let mut best = (
        0i128,
        Arc {
            start: DyadicAngle::ZERO,
            end: DyadicAngle::ZERO,
            start_closed: false,
            end_closed: false,
        },
    );
    let mut consider = |dev: i128, start: usize, end: usize, sc: bool, ec: bool| {
        if dev.abs() > best.0 {
            best = (
                dev.abs(),
                Arc {
                    start: positions[start].2,
                    end: positions[end].2,
                    start_closed: sc,
                    end_closed: ec,
                },
            );
        }
    };
    for i in 0..m {
        let (pi, mi, _) = positions[i];
        // Single closed point.
        consider(mi * turn, i, i, true, true);
        let mut interior = 0i128;
        for step in 1..m {
            let j = (i + step) % m;
            let (pj, mj, _) = positions[j];
            let len = (pj - pi).rem_euclid(turn);
            let scaled_len = n * len;
            consider(interior * turn - scaled_len, i, j, false, false);
            consider((interior + mi) * turn - scaled_len, i, j, true, false);
            consider((interior + mj) * turn - scaled_len, i, j, false, true);
            consider((interior + mi + mj) * turn - scaled_len, i, j, true, true);
            interior += mj;
        }
    }
    let (dev, witness_arc) = best;
    Ok(DiscrepancyResult {
        value: Ratio::new(dev, n * turn),
        witness_arc,
        n_points,
    })
}

/// The first `count` van der Corput directions.
pub fn vdc_prefix(count: usize) -> Vec<DyadicAngle> {
    (0..count as u64).map(vdc_angle).collect()
}
