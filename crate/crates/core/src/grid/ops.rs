use rayon::prelude::*;

use super::{cell_coordinate, radius_key, GridError, GridFunction};
use crate::angles::DyadicAngle;
use crate::rearrange::PlacementPattern;

/// Steiner symmetrization about the `x`-axis: every column is replaced by its
/// one-dimensional symmetric decreasing rearrangement.
pub fn steiner_vertical(f: &GridFunction) -> GridFunction {
    let n = f.resolution;
    let pattern = PlacementPattern::centered(n);
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|col| {
            let mut column: Vec<f64> = (0..n).map(|row| f.values[row * n + col]).collect();
            let mut out = vec![0.0; n];
            pattern.apply(&mut column, &mut out);
            out
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (col, column) in columns.iter().enumerate() {
        for (row, v) in column.iter().enumerate() {
            values[row * n + col] = *v;
        }
    }
    GridFunction::from_parts(n, f.half_width, values)
}

/// `R_α f(z) = f(e^{−iα} z)`.
///
/// Multiples of a quarter turn permute cells exactly. Other angles resample by
/// bilinear interpolation with zero padding.
pub fn rotate(f: &GridFunction, angle: DyadicAngle) -> GridFunction {
    let n = f.resolution;
    if let Some(q) = angle.as_quarter_turns() {
        let src = |row: usize, col: usize| -> usize {
            match q {
                0 => row * n + col,
                1 => (n - 1 - col) * n + row,
                2 => (n - 1 - row) * n + (n - 1 - col),
                _ => col * n + (n - 1 - row),
            }
        };
        let values = (0..n * n).map(|k| f.values[src(k / n, k % n)]).collect();
        return GridFunction::from_parts(n, f.half_width, values);
    }
    let (sin, cos) = angle.to_radians().sin_cos();
    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
        let y = cell_coordinate(row, n, f.half_width);
        for (col, slot) in out.iter_mut().enumerate() {
            let x = cell_coordinate(col, n, f.half_width);
            *slot = f.interpolate(x * cos + y * sin, y * cos - x * sin);
        }
    });
    GridFunction::from_parts(n, f.half_width, values)
}

/// Steiner symmetrization in direction `α`: `R_α S R_{−α} f`.
///
/// The support of `f` must lie in the centered disk of radius `L/√2`. The
/// result is cut back to that disk: bilinear resampling spreads support by up
/// to a cell per rotation, and the cut keeps the iteration inside the domain
/// where every rotation is lossless. For quarter turns the cut never removes
/// anything.
pub fn steiner_direction(f: &GridFunction, angle: DyadicAngle) -> Result<GridFunction, GridError> {
    f.check_rotatable_support()?;
    if angle == DyadicAngle::ZERO {
        return Ok(steiner_vertical(f));
    }
    let turned = rotate(f, angle.neg());
    let mut out = rotate(&steiner_vertical(&turned), angle);
    clip_to_rotatable_disk(&mut out);
    Ok(out)
}

/// Zeroes every cell whose center lies outside the disk of radius `L/√2`.
pub(crate) fn clip_to_rotatable_disk(f: &mut GridFunction) {
    let n = f.resolution;
    let limit = (n * n) as u64;
    for (k, v) in f.values.iter_mut().enumerate() {
        if 2 * radius_key(k / n, k % n, n) > limit {
            *v = 0.0;
        }
    }
}

/// The values of a grid sorted in decreasing order, paired with the cells in
/// the canonical radial fill order: ascending distance of the cell center
/// from the origin, ties broken by row and then column.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    resolution: usize,
    half_width: f64,
    order: Vec<usize>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn of(f: &GridFunction) -> RadialProfile {
        let n = f.resolution;
        let mut order: Vec<usize> = (0..n * n).collect();
        order.sort_by_key(|&k| (radius_key(k / n, k % n, n), k));
        let mut values = f.values.clone();
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        RadialProfile {
            resolution: n,
            half_width: f.half_width,
            order,
            values,
        }
    }

    /// `(rank, radius, value)` along the fill order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let n = self.resolution;
        let scale = self.half_width / n as f64;
        self.order
            .iter()
            .zip(&self.values)
            .enumerate()
            .map(move |(rank, (&k, &v))| {
                let r = (radius_key(k / n, k % n, n) as f64).sqrt() * scale;
                (rank, r, v)
            })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_grid(&self) -> GridFunction {
        let mut values = vec![0.0; self.values.len()];
        for (&k, &v) in self.order.iter().zip(&self.values) {
            values[k] = v;
        }
        GridFunction::from_parts(self.resolution, self.half_width, values)
    }
}

/// The symmetric decreasing rearrangement `f*` on the grid.
pub fn rearrange_radial(f: &GridFunction) -> GridFunction {
    RadialProfile::of(f).to_grid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gauss_functional, sample, sup_distance};

    fn sorted_bits(f: &GridFunction) -> Vec<u64> {
        let mut b: Vec<u64> = f.values().iter().map(|v| v.to_bits()).collect();
        b.sort_unstable();
        b
    }

    fn bumpy(n: usize) -> GridFunction {
        sample(
            |x, y| {
                let r2 = x * x + y * y;
                if r2 > 1.0 {
                    0.0
                } else {
                    (1.0 - r2) * (1.0 + 0.5 * (3.0 * x).sin() + 0.3 * y)
                }
            },
            n,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn steiner_vertical_single_column() {
        let mut values = vec![0.0; 16];
        for row in 0..4 {
            values[row * 4 + 2] = row as f64;
        }
        let f = GridFunction::from_values(4, 1.0, values).unwrap();
        let s = steiner_vertical(&f);
        let col: Vec<f64> = (0..4).map(|row| s.get(row, 2)).collect();
        assert_eq!(col, vec![1.0, 3.0, 2.0, 0.0]);
        assert_eq!(s.get(0, 0), 0.0);
    }

    #[test]
    fn steiner_vertical_fixed_points() {
        let z = GridFunction::zeros(8, 1.0).unwrap();
        assert_eq!(steiner_vertical(&z), z);
        let sym = sample(
            |x, y| (-(x * x) - 3.0 * y * y).exp() * (1.0 + x.abs()),
            9,
            1.0,
        )
        .unwrap();
        assert_eq!(steiner_vertical(&sym), sym);
        let f = bumpy(32);
        let s = steiner_vertical(&f);
        assert_eq!(steiner_vertical(&s), s);
        assert_eq!(sorted_bits(&s), sorted_bits(&f));
        assert_eq!(s.mass().to_bits(), f.mass().to_bits());
    }

    #[test]
    fn quarter_turn_moves_east_to_north() {
        let f = sample(
            |x, y| if x > 0.5 && y.abs() < 0.3 { 1.0 } else { 0.0 },
            16,
            1.0,
        )
        .unwrap();
        let g = rotate(&f, DyadicAngle::quarter_turns(1));
        let expected = sample(
            |x, y| if y > 0.5 && x.abs() < 0.3 { 1.0 } else { 0.0 },
            16,
            1.0,
        )
        .unwrap();
        assert_eq!(g, expected);
        let back = rotate(&f, DyadicAngle::quarter_turns(3));
        let south = sample(
            |x, y| if y < -0.5 && x.abs() < 0.3 { 1.0 } else { 0.0 },
            16,
            1.0,
        )
        .unwrap();
        assert_eq!(back, south);
    }

    #[test]
    fn rotate_identity_and_four_quarters() {
        let f = bumpy(33);
        assert_eq!(rotate(&f, DyadicAngle::ZERO), f);
        let q = DyadicAngle::quarter_turns(1);
        let mut g = f.clone();
        for _ in 0..4 {
            g = rotate(&g, q);
        }
        assert_eq!(g, f);
        let half = rotate(&rotate(&f, q), q);
        assert_eq!(half, rotate(&f, DyadicAngle::quarter_turns(2)));
        assert_eq!(
            gauss_functional(&rotate(&f, q)).to_bits(),
            gauss_functional(&f).to_bits()
        );
    }

    #[test]
    fn general_rotation_matches_resampled_function() {
        let n = 128;
        let smooth = |x: f64, y: f64| (-2.0 * ((x - 0.4).powi(2) + y * y)).exp();
        let f = sample(smooth, n, 2.0).unwrap();
        let a = DyadicAngle::new(1, 3).unwrap();
        let g = rotate(&f, a);
        let (s, c) = a.to_radians().sin_cos();
        let exact = sample(|x, y| smooth(x * c + y * s, y * c - x * s), n, 2.0).unwrap();
        assert!(sup_distance(&g, &exact).unwrap() < 5e-3);
    }

    #[test]
    fn steiner_direction_special_angles() {
        let f = bumpy(32);
        assert_eq!(
            steiner_direction(&f, DyadicAngle::ZERO).unwrap(),
            steiner_vertical(&f)
        );
        let s = steiner_direction(&f, DyadicAngle::quarter_turns(1)).unwrap();
        assert_eq!(sorted_bits(&s), sorted_bits(&f));
        let corner = sample(|x, y| if x > 1.5 && y > 1.5 { 1.0 } else { 0.0 }, 16, 2.0).unwrap();
        assert!(steiner_direction(&corner, DyadicAngle::ZERO).is_err());
    }

    #[test]
    fn rearrange_radial_examples() {
        let z = GridFunction::zeros(6, 1.0).unwrap();
        assert_eq!(rearrange_radial(&z), z);
        let mut values = vec![0.0; 36];
        values[5] = 2.5;
        let one = GridFunction::from_values(6, 1.0, values).unwrap();
        let r = rearrange_radial(&one);
        // The four central cells are equidistant; (2, 2) comes first.
        assert_eq!(r.get(2, 2), 2.5);
        assert_eq!(r.values().iter().filter(|v| **v != 0.0).count(), 1);
        let f = bumpy(31);
        let star = rearrange_radial(&f);
        assert_eq!(rearrange_radial(&star), star);
        assert_eq!(sorted_bits(&star), sorted_bits(&f));
        assert_eq!(star.mass().to_bits(), f.mass().to_bits());
    }

    #[test]
    fn radial_profile_is_non_increasing() {
        let p = RadialProfile::of(&bumpy(24));
        let e: Vec<_> = p.entries().collect();
        assert!(e.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].2 >= w[1].2));
        assert_eq!(e[0].0, 0);
    }
}
