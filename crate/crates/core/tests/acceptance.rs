//! Acceptance criteria A1–A9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use steinersym::angles::vdc_prefix;
use steinersym::calibration::{self, discrepancy_ratio, HALF_WIDTH};
use steinersym::{
    discrepancy, gap, gauss_functional, iterate, random_grid, rearrange_radial, rotate,
    steiner_direction, steiner_vertical, sup_distance, Builtin, DirectionSequence, DyadicAngle,
    GridFunction, IterateConfig, SignedTurn,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn angle(p: u128, k: u32) -> DyadicAngle {
    DyadicAngle::new(p, k).unwrap()
}

fn sorted_bits(f: &GridFunction) -> Vec<u64> {
    let mut b: Vec<u64> = f.values().iter().map(|v| v.to_bits()).collect();
    b.sort_unstable();
    b
}

fn a1() -> Outcome {
    let mut pairs = 0u64;
    for j in 1..=12u32 {
        for n in 1..1u64 << j {
            let lhs = gap((1 << j) + n).unwrap();
            let rhs = gap(n).unwrap();
            if lhs != rhs {
                return Err(format!(
                    "gap({}) = {lhs} ≠ gap({n}) = {rhs}",
                    (1u64 << j) + n
                ));
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs equal exactly"))
}

fn a2() -> Outcome {
    for j in 1..=30u32 {
        let g = gap(1 << j).unwrap();
        let expected = SignedTurn::new(3, j + 1).unwrap();
        if g != expected {
            return Err(format!("gap(2^{j}) = {g}, expected {expected}"));
        }
    }
    Ok("j = 1..30 exact".into())
}

fn a3() -> Outcome {
    let bad: Vec<u64> = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let f = random_grid(seed, 64, HALF_WIDTH).unwrap();
            [steiner_vertical(&f), rearrange_radial(&f)]
                .iter()
                .any(|g| {
                    sorted_bits(g) != sorted_bits(&f) || g.mass().to_bits() != f.mass().to_bits()
                })
        })
        .collect();
    check(
        bad.is_empty(),
        format!("100 grids n=64, failing seeds {bad:?}"),
    )
}

fn a4() -> Outcome {
    let angles = [angle(0, 0), angle(1, 2), angle(1, 3), angle(3, 3)];
    let failures: Vec<String> = (0..100u64)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let f = random_grid(2 * seed, 64, HALF_WIDTH).unwrap();
            let g = random_grid(2 * seed + 1, 64, HALF_WIDTH).unwrap();
            let d = sup_distance(&f, &g).unwrap();
            let mut out = Vec::new();
            let mut test = |name: String, tf: GridFunction, tg: GridFunction| {
                let e = sup_distance(&tf, &tg).unwrap();
                if e > d {
                    out.push(format!("seed {seed} {name}: {e} > {d}"));
                }
            };
            test(
                "steiner_vertical".into(),
                steiner_vertical(&f),
                steiner_vertical(&g),
            );
            test(
                "rearrange_radial".into(),
                rearrange_radial(&f),
                rearrange_radial(&g),
            );
            for a in angles {
                test(format!("rotate {a}"), rotate(&f, a), rotate(&g, a));
                test(
                    format!("steiner_direction {a}"),
                    steiner_direction(&f, a).unwrap(),
                    steiner_direction(&g, a).unwrap(),
                );
            }
            out
        })
        .collect();
    check(
        failures.is_empty(),
        format!("100 pairs n=64, 10 operator/angle cases each, violations {failures:?}"),
    )
}

fn a5() -> Outcome {
    let eps = calibration::pinned().epsilon_j(128).unwrap();
    let results: Vec<(bool, f64)> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let f = random_grid(seed, 128, HALF_WIDTH).unwrap();
            let j0 = gauss_functional(&f);
            let exact = gauss_functional(&steiner_vertical(&f)) >= j0;
            let drop = [angle(1, 3), angle(3, 3)]
                .into_iter()
                .map(|a| j0 - gauss_functional(&steiner_direction(&f, a).unwrap()))
                .fold(f64::NEG_INFINITY, f64::max);
            (exact, drop)
        })
        .collect();
    let exact = results.iter().all(|r| r.0);
    let worst = results
        .iter()
        .map(|r| r.1)
        .fold(f64::NEG_INFINITY, f64::max);
    check(
        exact && worst <= eps,
        format!(
            "exact at 0: {exact}; max J(f) − J(S_α f) at 1/8, 3/8 = {worst:.3e} ≤ ε_J(128) = {eps:.3e}"
        ),
    )
}

fn a6() -> Outcome {
    let bump = Builtin::Bump.sample(128, HALF_WIDTH).unwrap();
    let out = iterate(
        &bump,
        &DirectionSequence::VanDerCorput,
        &IterateConfig::new(256),
        "bump",
    )
    .unwrap();
    let first = out.report.initial();
    let last = out.report.last();
    let baseline = calibration::pinned().baseline_distance;
    let distance_ok = last.distance <= 0.1 * first.distance;
    let energy_ok = last.nonradial_energy <= 0.1 * first.nonradial_energy;
    check(
        first.distance == baseline && distance_ok && energy_ok,
        format!(
            "distance {:.4} → {:.4} (ratio {:.4}), non-radial energy {:.3e} → {:.3e} (ratio {:.2e})",
            first.distance,
            last.distance,
            last.distance / first.distance,
            first.nonradial_energy,
            last.nonradial_energy,
            last.nonradial_energy / first.nonradial_energy
        ),
    )
}

fn a7() -> Outcome {
    let square = Builtin::Square.sample(128, HALF_WIDTH).unwrap();
    let seq = DirectionSequence::fixed_cycle(vec![angle(0, 0), angle(1, 2)]).unwrap();
    let out = iterate(&square, &seq, &IterateConfig::new(256), "square").unwrap();
    let initial = out.report.initial().distance;
    let min_after = out
        .report
        .rows
        .iter()
        .filter(|r| r.step > 2)
        .map(|r| r.distance)
        .fold(f64::INFINITY, f64::min);
    check(
        min_after >= 0.5 * initial,
        format!("min distance after step 2 = {min_after:.4} ≥ 0.5 × {initial:.4}"),
    )
}

/// Largest `|count/N − length|` over arcs whose endpoints lie on the grid
/// `i / 2^bits`, each endpoint open or closed, evaluated in floating point
/// from prefix counts.
fn scan_discrepancy(points: &[f64], bits: u32) -> f64 {
    let m = 1usize << bits;
    let n = points.len() as f64;
    let mut at = vec![0u32; m];
    for &p in points {
        let idx = p * m as f64;
        assert_eq!(idx.fract(), 0.0, "point off the scan grid");
        at[idx as usize] += 1;
    }
    let mut prefix = vec![0u32; m + 1];
    for i in 0..m {
        prefix[i + 1] = prefix[i] + at[i];
    }
    let total = prefix[m];
    let closed = |a: usize, b: usize| -> u32 {
        if a <= b {
            prefix[b + 1] - prefix[a]
        } else {
            total - (prefix[a] - prefix[b + 1])
        }
    };
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let steps = (b + m - a) % m;
            let len = steps as f64 / m as f64;
            let c = closed(a, b);
            let variants: [(u32, f64); 4] = if a == b {
                // Single point, or the full circle minus the point.
                [(at[a], 0.0), (0, 0.0), (total - at[a], 1.0), (total, 1.0)]
            } else {
                [
                    (c, len),
                    (c - at[a], len),
                    (c - at[b], len),
                    (c - at[a] - at[b], len),
                ]
            };
            for (count, length) in variants {
                worst = worst.max((count as f64 / n - length).abs());
            }
        }
    }
    worst
}

/// Largest deviation over closed arcs with endpoints on the `10⁻⁴`-turn grid.
fn scan_closed_1e4(points: &[f64]) -> f64 {
    let m = 10_000usize;
    let n = points.len() as f64;
    let mut worst = 0.0f64;
    for a in 0..m {
        for steps in 0..m {
            let start = a as f64 / m as f64;
            let len = steps as f64 / m as f64;
            let count = points
                .iter()
                .filter(|&&p| (p - start).rem_euclid(1.0) <= len + 1e-12)
                .count();
            worst = worst.max((count as f64 / n - len).abs());
        }
    }
    worst
}

fn a8() -> Outcome {
    let mismatches: Vec<String> = (1..=256usize)
        .into_par_iter()
        .filter_map(|count| {
            let prefix = vdc_prefix(count);
            let exact = discrepancy(&prefix).unwrap().to_f64();
            let turns: Vec<f64> = prefix.iter().map(|a| a.to_turns_f64()).collect();
            let bits = (count as f64).log2().ceil() as u32 + 2;
            let scanned = scan_discrepancy(&turns, bits);
            ((exact - scanned).abs() > 1e-9).then(|| format!("N={count}: {exact} vs {scanned}"))
        })
        .collect();
    let coarse: Vec<String> = [1usize, 2]
        .into_iter()
        .filter_map(|count| {
            let prefix = vdc_prefix(count);
            let exact = discrepancy(&prefix).unwrap().to_f64();
            let turns: Vec<f64> = prefix.iter().map(|a| a.to_turns_f64()).collect();
            let scanned = scan_closed_1e4(&turns);
            ((exact - scanned).abs() > 1.0001e-4)
                .then(|| format!("N={count}: {exact} vs {scanned}"))
        })
        .collect();
    let bound = calibration::pinned().discrepancy_ratio_bound;
    let worst = (4..=12)
        .map(|k| discrepancy_ratio(1 << k))
        .fold(0.0, f64::max);
    check(
        mismatches.is_empty() && coarse.is_empty() && worst <= bound,
        format!(
            "N ≤ 256 agree within 1e-9 (mismatches {mismatches:?}); 1e-4 scan N=1,2 {coarse:?}; \
             max N·D_N/log2(N+1) = {worst:.4} ≤ {bound:.4}"
        ),
    )
}

fn a9() -> Outcome {
    let star = rearrange_radial(&Builtin::Bump.sample(128, HALF_WIDTH).unwrap());
    let out = iterate(
        &star,
        &DirectionSequence::VanDerCorput,
        &IterateConfig::new(64),
        "bump*",
    )
    .unwrap();
    let worst = out
        .report
        .rows
        .iter()
        .map(|r| r.distance)
        .fold(0.0, f64::max);
    let bound = calibration::pinned().radial_drift_bound;
    check(
        worst <= bound,
        format!("max distance to f* = {worst:.4e} ≤ {bound:.4e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("A1", "gap self-similarity", a1),
        ("A2", "power-of-two gaps", a2),
        ("A3", "exact equimeasurability", a3),
        ("A4", "exact non-expansiveness", a4),
        ("A5", "J monotonicity", a5),
        ("A6", "convergence of the bump", a6),
        ("A7", "negative control", a7),
        ("A8", "discrepancy", a8),
        ("A9", "fixed-point stationarity", a9),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id} {name}: PASS [{secs:.2}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id} {name}: FAIL [{secs:.2}s] {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
