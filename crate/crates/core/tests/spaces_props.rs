use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruelle::corpus::{random_polynomial, random_rational};
use ruelle::cpoly::ComplexPoly;
use ruelle::linalg::singular_values;
use ruelle::spaces::{invert_chart, ChartVector, MapDescriptor, MapPoint, PolySpacePoint, CHART_TOL};

fn perturbed(rng: &mut ChaCha8Rng, chart: &ChartVector, size: f64) -> ChartVector {
    ChartVector {
        coords: chart.coords.clone(),
        values: chart
            .values
            .iter()
            .map(|v| v + Complex64::from_polar(size, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect(),
    }
}

#[test]
fn polynomial_round_trip_for_every_stratum() {
    let patterns: [&[usize]; 6] = [&[1], &[1, 1], &[2], &[1, 1, 1], &[1, 2], &[3]];
    for (i, ms) in patterns.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(40 + i as u64);
        for _ in 0..20 {
            let f = random_polynomial(&mut rng, ms);
            let chart = f.chart();
            let same = invert_chart(&f, &chart, CHART_TOL).unwrap();
            assert!(same.chart_in(&chart.coords).unwrap().distance(&chart) < 1e-10);
            let target = perturbed(&mut rng, &chart, 1e-3);
            let g = invert_chart(&f, &target, CHART_TOL).unwrap();
            assert!(g.chart_in(&target.coords).unwrap().distance(&target) < 1e-10, "{ms:?}");
            assert_eq!(g.multiplicities(), f.multiplicities());
        }
    }
}

#[test]
fn rational_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..20 {
        let f = random_rational(&mut rng, 2 + i % 3);
        let target = perturbed(&mut rng, &f.chart(), 1e-3);
        let g = invert_chart(&f, &target, CHART_TOL).unwrap();
        assert!(g.chart_in(&target.coords).unwrap().distance(&target) < 1e-10);
    }
}

/// Chart of `sigma z + m + P/Q` as a function of its `2d` free coefficients.
fn chart_of_coefficients(base: &MapPoint, params: &[Complex64], d: usize) -> Vec<Complex64> {
    let p = ComplexPoly::new(params[2..d + 1].to_vec());
    let mut q = params[d + 1..].to_vec();
    q.push(Complex64::new(1.0, 0.0));
    let g = MapPoint::rational(params[0], params[1], p, ComplexPoly::new(q)).unwrap();
    g.remark_like(base).unwrap().chart().values
}

#[test]
fn rational_chart_has_full_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for i in 0..10 {
        let d = 2 + i % 3;
        let f = random_rational(&mut rng, d);
        let (sigma, m) = f.infinity_data().unwrap();
        let mut params = vec![sigma, m];
        params.extend((0..d - 1).map(|k| rational_p(&f, k)));
        params.extend((0..d - 1).map(|k| f.denominator().coeff(k)));
        let n = params.len();
        let rows = f.chart().len();
        assert_eq!(rows, f.crit_points().len() + 2);
        assert_eq!(n, rows);
        let h = 1e-6;
        let mut entries = vec![Complex64::new(0.0, 0.0); rows * n];
        for k in 0..n {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus[k] += h;
            minus[k] -= h;
            let (a, b) = (
                chart_of_coefficients(&f, &plus, d),
                chart_of_coefficients(&f, &minus, d),
            );
            for r in 0..rows {
                entries[r * n + k] = (a[r] - b[r]) / (2.0 * h);
            }
        }
        let sv = singular_values(rows, n, &entries);
        assert!(sv[n - 1] > 1e-8 * sv[0], "degree {d}: {sv:?}");
    }
}

fn rational_p(f: &MapPoint, k: usize) -> Complex64 {
    match f.descriptor() {
        MapDescriptor::Rational { p, .. } => p.get(k).copied().unwrap_or_default(),
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn descriptor_json_round_trip(seed in 0u64..1000, rational in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = if rational { random_rational(&mut rng, 3) } else { random_polynomial(&mut rng, &[1, 1]) };
        let json = serde_json::to_string(&f.descriptor()).unwrap();
        let back: MapDescriptor = serde_json::from_str(&json).unwrap();
        let g = back.build().unwrap().remark_like(&f).unwrap();
        prop_assert!(g.chart().distance(&f.chart()) < 1e-9 * f.scale());
    }

    #[test]
    fn quadratic_chart_is_the_constant_term(re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let v = Complex64::new(re, im);
        let f: MapPoint = PolySpacePoint::build(v, &[Complex64::new(0.0, 0.0)], &[1]).unwrap().into();
        prop_assert_eq!(f.chart().values, vec![v]);
    }
}
