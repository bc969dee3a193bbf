use proptest::prelude::*;
use steinersym::grid::{read_grid, write_grid};
use steinersym::{
    gauss_functional, rearrange_radial, rotate, steiner_direction, steiner_vertical, sup_distance,
    DyadicAngle, GridFunction,
};

/// Grids whose support lies in the rotatable disk, with a coarse value
/// alphabet so that ties are common.
fn grid(n: usize) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec(
        prop_oneof![Just(0.0), 0.0..4.0f64, (0u8..4).prop_map(f64::from)],
        n * n,
    )
    .prop_map(move |mut values| {
        for (k, v) in values.iter_mut().enumerate() {
            let (i, j) = ((k / n) as i64, (k % n) as i64);
            let key = (2 * i + 1 - n as i64).pow(2) + (2 * j + 1 - n as i64).pow(2);
            if 2 * key > (n * n) as i64 {
                *v = 0.0;
            }
        }
        GridFunction::from_values(n, 2.0, values).unwrap()
    })
}

fn pair(n: usize) -> impl Strategy<Value = (GridFunction, GridFunction)> {
    (grid(n), grid(n))
}

fn angle() -> impl Strategy<Value = DyadicAngle> {
    (0u128..64).prop_map(|p| DyadicAngle::new(p, 6).unwrap())
}

fn sorted_bits(f: &GridFunction) -> Vec<u64> {
    let mut b: Vec<u64> = f.values().iter().map(|v| v.to_bits()).collect();
    b.sort_unstable();
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_rearrangements_are_equimeasurable(f in grid(17)) {
        for g in [steiner_vertical(&f), rearrange_radial(&f)] {
            prop_assert_eq!(sorted_bits(&g), sorted_bits(&f));
            prop_assert_eq!(g.mass().to_bits(), f.mass().to_bits());
        }
    }

    #[test]
    fn quarter_turn_symmetrization_is_equimeasurable(f in grid(16), q in 0u32..4) {
        let g = steiner_direction(&f, DyadicAngle::quarter_turns(q)).unwrap();
        prop_assert_eq!(sorted_bits(&g), sorted_bits(&f));
    }

    #[test]
    fn every_operator_is_non_expansive((f, g) in pair(16), a in angle()) {
        let d = sup_distance(&f, &g).unwrap();
        prop_assert!(sup_distance(&steiner_vertical(&f), &steiner_vertical(&g)).unwrap() <= d);
        prop_assert!(sup_distance(&rearrange_radial(&f), &rearrange_radial(&g)).unwrap() <= d);
        prop_assert!(sup_distance(&rotate(&f, a), &rotate(&g, a)).unwrap() <= d);
        let sf = steiner_direction(&f, a).unwrap();
        let sg = steiner_direction(&g, a).unwrap();
        prop_assert!(sup_distance(&sf, &sg).unwrap() <= d);
    }

    #[test]
    fn vertical_symmetrization_never_lowers_j(f in grid(15)) {
        prop_assert!(gauss_functional(&steiner_vertical(&f)) >= gauss_functional(&f));
    }

    #[test]
    fn radial_rearrangement_maximizes_j(f in grid(14)) {
        let star = rearrange_radial(&f);
        prop_assert!(gauss_functional(&star) >= gauss_functional(&f));
        prop_assert!(gauss_functional(&star) >= gauss_functional(&steiner_vertical(&f)));
    }

    #[test]
    fn quarter_turns_preserve_j_exactly(f in grid(13), q in 0u32..4) {
        let g = rotate(&f, DyadicAngle::quarter_turns(q));
        prop_assert_eq!(gauss_functional(&g).to_bits(), gauss_functional(&f).to_bits());
    }

    #[test]
    fn rearrangements_are_idempotent(f in grid(12)) {
        let s = steiner_vertical(&f);
        prop_assert_eq!(steiner_vertical(&s), s);
        let r = rearrange_radial(&f);
        prop_assert_eq!(rearrange_radial(&r), r.clone());
        prop_assert_eq!(steiner_vertical(&r), r);
    }

    #[test]
    fn rotation_keeps_values_in_range(f in grid(16), a in angle()) {
        let g = rotate(&f, a);
        // Convex weights, up to rounding in the weighted sum.
        prop_assert!(g.max_value() <= f.max_value() * (1.0 + 4.0 * f64::EPSILON));
        prop_assert!(g.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn grid_files_round_trip(f in grid(9)) {
        let mut buf = Vec::new();
        write_grid(&f, &mut buf, &["seed=1".to_string()]).unwrap();
        let back = read_grid(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }
}
