//! One-dimensional symmetric decreasing rearrangement of sampled values.
//!
//! The values of a vector are sorted in decreasing order and dealt out to
//! positions in order of their distance from the center `(m − 1)/2`; of two
//! positions at the same distance the smaller index is filled first. Every
//! two-dimensional rearrangement in this crate is built on this kernel.

use thiserror::Error;

use crate::exact_sum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RearrangeError {
    #[error("value {value} at index {index} is negative")]
    Negative { index: usize, value: f64 },
    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },
}

/// Checks the domain of a rearrangement and maps `-0.0` to `+0.0` so that
/// sorting by `total_cmp` agrees with numeric order.
pub(crate) fn validate(values: &mut [f64]) -> Result<(), RearrangeError> {
    for (index, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(RearrangeError::NonFinite { index });
        }
        if *v < 0.0 {
            return Err(RearrangeError::Negative { index, value: *v });
        }
        if *v == 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// A finite list of nonnegative samples along a line.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(Vec<f64>);

impl ValueVector {
    pub fn new(mut values: Vec<f64>) -> Result<Self, RearrangeError> {
        validate(&mut values)?;
        Ok(ValueVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn rearranged(&self) -> ValueVector {
        let pattern = PlacementPattern::centered(self.0.len());
        let mut out = vec![0.0; self.0.len()];
        let mut scratch = self.0.clone();
        pattern.apply(&mut scratch, &mut out);
        ValueVector(out)
    }
}

/// The order in which positions of a length-`m` line receive values, largest
/// value first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementPattern {
    order: Vec<usize>,
}

impl PlacementPattern {
    pub fn centered(m: usize) -> Self {
        let mut order: Vec<usize> = (0..m).collect();
        // |i − c| compared as |2i − (m − 1)| to stay in integers.
        order.sort_by_key(|&i| ((2 * i as i64 - (m as i64 - 1)).abs(), i));
        PlacementPattern { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Positions from the center outward.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Sorts `values` in place (descending) and writes the rearrangement to
    /// `out`. Inputs must already be validated.
    pub fn apply(&self, values: &mut [f64], out: &mut [f64]) {
        debug_assert_eq!(values.len(), self.order.len());
        debug_assert_eq!(out.len(), self.order.len());
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        for (&pos, &v) in self.order.iter().zip(values.iter()) {
            out[pos] = v;
        }
    }
}

/// Symmetric decreasing rearrangement of `values`.
pub fn rearrange_1d(values: &[f64]) -> Result<Vec<f64>, RearrangeError> {
    Ok(ValueVector::new(values.to_vec())?.rearranged().into_inner())
}

/// Whether `values` is non-increasing along the placement order, i.e. already
/// its own rearrangement up to equal values.
pub fn is_symmetric_decreasing(values: &[f64]) -> bool {
    let pattern = PlacementPattern::centered(values.len());
    pattern
        .order()
        .windows(2)
        .all(|w| values[w[0]] >= values[w[1]])
}

/// `Σ v_i u_i`, correctly rounded.
pub fn weighted_sum(values: &[f64], weights: &[f64]) -> f64 {
    exact_sum::dot(values, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted_bits(v: &[f64]) -> Vec<u64> {
        let mut b: Vec<u64> = v.iter().map(|x| x.to_bits()).collect();
        b.sort_unstable();
        b
    }

    #[test]
    fn examples() {
        assert_eq!(rearrange_1d(&[]).unwrap(), Vec::<f64>::new());
        assert_eq!(rearrange_1d(&[1.0, 3.0, 2.0]).unwrap(), vec![2.0, 3.0, 1.0]);
        assert_eq!(rearrange_1d(&[5.0; 4]).unwrap(), vec![5.0; 4]);
        assert_eq!(
            rearrange_1d(&[0.0, 1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 3.0, 2.0, 0.0]
        );
    }

    #[test]
    fn placement_order() {
        assert_eq!(PlacementPattern::centered(4).order(), &[1, 2, 0, 3]);
        assert_eq!(PlacementPattern::centered(5).order(), &[2, 1, 3, 0, 4]);
        assert_eq!(PlacementPattern::centered(1).order(), &[0]);
    }

    #[test]
    fn rejects_bad_entries() {
        assert_eq!(
            rearrange_1d(&[1.0, -0.5]),
            Err(RearrangeError::Negative {
                index: 1,
                value: -0.5
            })
        );
        assert_eq!(
            rearrange_1d(&[f64::NAN]),
            Err(RearrangeError::NonFinite { index: 0 })
        );
        assert!(rearrange_1d(&[f64::INFINITY]).is_err());
        // Negative zero is zero.
        assert_eq!(
            rearrange_1d(&[-0.0, 1.0]).unwrap()[1].to_bits(),
            0.0f64.to_bits()
        );
    }

    fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0f64..10.0], 0..40)
    }

    proptest! {
        #[test]
        fn equimeasurable(v in vec_strategy()) {
            let w = rearrange_1d(&v).unwrap();
            prop_assert_eq!(sorted_bits(&w), sorted_bits(&v));
            prop_assert!(is_symmetric_decreasing(&w));
        }

        #[test]
        fn idempotent(v in vec_strategy()) {
            let w = rearrange_1d(&v).unwrap();
            prop_assert_eq!(rearrange_1d(&w).unwrap(), w);
        }

        #[test]
        fn non_expansive(pair in (1usize..40).prop_flat_map(|m| (
            prop::collection::vec(0.0f64..10.0, m),
            prop::collection::vec(0.0f64..10.0, m),
        ))) {
            let (v, w) = pair;
            let before = v.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let (rv, rw) = (rearrange_1d(&v).unwrap(), rearrange_1d(&w).unwrap());
            let after = rv.iter().zip(&rw).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(after <= before, "{after} > {before}");
        }

        #[test]
        fn weighted_gain(v in vec_strategy(), h in 0.01f64..1.0) {
            // Gaussian weights on a centered grid, symmetric decreasing under the pattern.
            let m = v.len() as i64;
            let u: Vec<f64> = (0..m)
                .map(|i| {
                    let y = (2 * i + 1 - m) as f64 * (h / 2.0);
                    (-(y * y)).exp()
                })
                .collect();
            prop_assert!(is_symmetric_decreasing(&u));
            let w = rearrange_1d(&v).unwrap();
            prop_assert!(weighted_sum(&w, &u) >= weighted_sum(&v, &u));
        }
    }
}
