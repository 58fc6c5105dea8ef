use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ruelle::bfunc::{a_function, b_function};
use ruelle::corpus::{random_orbit_case, random_rational, two_z_minus_inverse};
use ruelle::derivs::verify_identity;
use ruelle::orbits::{find_orbits, orbit_data, ORBIT_TOL};
use ruelle::transfer::{identity_coefficients, transfer_closed_form};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn orbit_poles_cancel_in_b_minus_tb() {
    for seed in 0..20 {
        let (f, o) = random_orbit_case(seed);
        let b = b_function(&o).unwrap();
        let rest = b.sub(&transfer_closed_form(&f, &b).unwrap());
        let scale = b.coeff_scale();
        for &p in &o.points {
            if let Some(t) = rest.term_near(p, 1e-9) {
                assert!(t.a2.norm() < 1e-9 * scale, "seed {seed}");
                assert!(t.a1.norm() < 1e-9 * scale, "seed {seed}");
            }
        }
    }
}

#[test]
fn identity_coefficients_are_linear() {
    let mut checked = 0;
    for seed in 0..20 {
        let (f, _) = random_orbit_case(seed);
        let orbits: Vec<_> = find_orbits(&f, 1, ORBIT_TOL)
            .unwrap()
            .orbits
            .into_iter()
            .filter(|o| (o.multiplier - c(1.0, 0.0)).norm() > 1e-2 && o.multiplier.norm() > 1e-2)
            .filter(|o| f.crit_points().iter().all(|&cp| (cp - o.points[0]).norm() > 1e-2))
            .collect();
        if orbits.len() < 2 {
            continue;
        }
        let (b1, b2) = (b_function(&orbits[0]).unwrap(), b_function(&orbits[1]).unwrap());
        let (alpha, beta) = (c(0.7, -0.2), c(-1.3, 0.4));
        let mix = b1.scaled(alpha).add(&b2.scaled(beta));
        let l1 = identity_coefficients(&f, &b1).unwrap();
        let l2 = identity_coefficients(&f, &b2).unwrap();
        let lm = identity_coefficients(&f, &mix).unwrap();
        for k in 0..lm.coefficients.len() {
            let expected = alpha * l1.coefficients[k].coefficient + beta * l2.coefficients[k].coefficient;
            let got = lm.coefficients[k].coefficient;
            assert!((got - expected).norm() < 1e-9 * expected.norm().max(1.0));
        }
        checked += 1;
    }
    assert!(checked >= 5);
}

#[test]
fn transfer_at_infinity_of_rational_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 8 {
        let f = random_rational(&mut rng, 2 + checked % 2);
        let (sigma, m) = f.infinity_data().unwrap();
        let Some(o) = find_orbits(&f, 1, ORBIT_TOL)
            .unwrap()
            .orbits
            .into_iter()
            .find(|o| o.multiplier.norm() > 1e-2 && (o.multiplier - c(1.0, 0.0)).norm() > 1e-2)
        else {
            continue;
        };
        let a = a_function(&o).unwrap();
        let (g1, g2) = a.gamma_coeffs();
        let (t1, t2) = transfer_closed_form(&f, &a).unwrap().gamma_coeffs();
        let e1 = g1 / sigma;
        let e2 = g2 + m * g1 / sigma;
        assert!((t1 - e1).norm() < 1e-9 * e1.norm().max(1.0));
        assert!((t2 - e2).norm() < 1e-9 * e2.norm().max(1.0));
        checked += 1;
    }
}

#[test]
fn identity_holds_on_repelling_orbits() {
    let f = two_z_minus_inverse();
    for b in [1.0, -1.0] {
        let o = orbit_data(&f, &[c(b, 0.0)]).unwrap();
        assert!(o.multiplier.norm() > 1.0);
        assert!(verify_identity(&f, &o, 16).unwrap().max_residual < 1e-9);
    }
    for seed in 0..10 {
        let (f, _) = random_orbit_case(seed);
        for o in find_orbits(&f, 2, ORBIT_TOL).unwrap().orbits {
            if o.multiplier.norm() > 1.5 {
                assert!(verify_identity(&f, &o, 16).unwrap().max_residual < 1e-9);
            }
        }
    }
}
