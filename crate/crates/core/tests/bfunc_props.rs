use num_complex::Complex64;
use ruelle::bfunc::{a_function, b_function, b_hat};
use ruelle::corpus::random_orbit_case;
use ruelle::orbits::{find_orbits, orbit_data, ORBIT_TOL};
use ruelle::spaces::{MapPoint, PolySpacePoint};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unicritical(d: usize, v: f64) -> MapPoint {
    PolySpacePoint::build(c(v, 0.0), &[c(0.0, 0.0)], &[d - 1])
        .unwrap()
        .into()
}

#[test]
fn gamma_coefficients_match_orbit_sums() {
    for seed in (0..40).filter(|s| s % 2 == 0).take(20) {
        let (_, o) = random_orbit_case(seed);
        let one = c(1.0, 0.0);
        let rho = o.multiplier;
        let s_sum: Complex64 = o.second_derivs.iter().sum();
        let bs_sum: Complex64 = o.points.iter().zip(&o.second_derivs).map(|(b, s)| b * s).sum();
        let g1 = s_sum / (one - rho);
        let g2 = rho * o.period as f64 + bs_sum / (one - rho);
        let (h1, h2) = b_function(&o).unwrap().gamma_coeffs();
        assert!((h1 - g1).norm() < 1e-10 * g1.norm().max(1.0), "seed {seed}");
        assert!((h2 - g2).norm() < 1e-10 * g2.norm().max(1.0), "seed {seed}");
    }
}

#[test]
fn a_function_is_b_over_rho() {
    for seed in 0..10 {
        let (_, o) = random_orbit_case(seed);
        let a = a_function(&o).unwrap();
        let b = b_function(&o).unwrap();
        for k in 0..10 {
            let z = Complex64::from_polar(3.0 + k as f64 * 0.1, k as f64);
            let lhs = a.eval(z).unwrap() * o.multiplier;
            assert!((lhs - b.eval(z).unwrap()).norm() < 1e-12 * lhs.norm().max(1.0));
        }
    }
}

/// Averages `(1 - rho) B` over the two fixed points that merge at the cusp.
fn split_average(f: &MapPoint, cusp: Complex64, z: Complex64) -> Complex64 {
    let mut orbits = find_orbits(f, 1, ORBIT_TOL).unwrap().orbits;
    orbits.sort_by(|a, b| (a.points[0] - cusp).norm().total_cmp(&(b.points[0] - cusp).norm()));
    orbits[..2]
        .iter()
        .map(|o| (c(1.0, 0.0) - o.multiplier) * b_function(o).unwrap().eval(z).unwrap())
        .sum::<Complex64>()
        / 2.0
}

#[test]
fn b_hat_is_the_limit_of_scaled_b() {
    let s3 = 3f64.sqrt();
    let cases = [(2usize, 0.25, 0.5), (3, 2.0 / (3.0 * s3), 1.0 / s3)];
    for (d, v0, b0) in cases {
        let base = unicritical(d, v0);
        let hat = b_hat(&orbit_data(&base, &[c(b0, 0.0)]).unwrap()).unwrap();
        let samples = [c(2.0, 1.0), c(-1.0, 0.5), c(0.3, -2.0)];
        let mut errors = Vec::new();
        for eps in [1e-4, 1e-5, 1e-6] {
            let f = unicritical(d, v0 - eps);
            let err = samples
                .iter()
                .map(|&z| (split_average(&f, c(b0, 0.0), z) - hat.eval(z).unwrap()).norm())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        assert!(errors[2] < errors[0]);
        assert!(errors[2] < 1e-5, "degree {d}: {errors:?}");
    }
}
