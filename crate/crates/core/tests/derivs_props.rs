use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ruelle::bfunc::b_function;
use ruelle::corpus::{quadratic_rational_with_fixed_point, random_orbit_case, random_rational};
use ruelle::cpoly::ComplexPoly;
use ruelle::derivs::{
    assemble_jacobian, cusp_derivatives, derivative, drho_dv_inf, drho_dv_residue, drho_dv_simple, drho_fd_oracle,
    numerical_rank, sum_rules, Method, RANK_TOL,
};
use ruelle::orbits::{continue_orbit, find_orbits, orbit_data, PeriodicOrbit, ORBIT_TOL};
use ruelle::spaces::{invert_chart, Coord, CriticalValue, MapPoint, PolySpacePoint, CHART_TOL};
use ruelle::transfer::identity_coefficients;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn quadratic(v: f64) -> MapPoint {
    PolySpacePoint::build(c(v, 0.0), &[c(0.0, 0.0)], &[1]).unwrap().into()
}

/// `2z + 1/z^2`: the double pole at 0 is a critical point with value infinity.
fn double_pole_map() -> MapPoint {
    let q = ComplexPoly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    MapPoint::rational(c(2.0, 0.0), c(0.0, 0.0), ComplexPoly::constant(c(1.0, 0.0)), q).unwrap()
}

fn infinite_index(f: &MapPoint) -> usize {
    f.crit_values()
        .iter()
        .position(|v| *v == CriticalValue::Infinite)
        .unwrap()
}

#[test]
fn infinite_critical_value_matches_reciprocal_chart_differences() {
    let f = double_pole_map();
    let o = orbit_data(&f, &[c(-1.0, 0.0)]).unwrap();
    assert!((o.multiplier - c(4.0, 0.0)).norm() < 1e-12);
    let j = infinite_index(&f);
    let exact = drho_dv_inf(&f, &o, j).unwrap();
    let fd = drho_fd_oracle(&f, &o, Coord::InvV(j), 1e-3).unwrap();
    assert!(rel(exact, fd) < 1e-6, "{exact} vs {fd}");
    assert_eq!(derivative(&f, &o, Coord::InvV(j), Method::Residue).unwrap(), exact);
}

#[test]
fn finite_values_approach_the_reciprocal_derivative() {
    let f = double_pole_map();
    let o = orbit_data(&f, &[c(-1.0, 0.0)]).unwrap();
    let j = infinite_index(&f);
    let limit = drho_dv_inf(&f, &o, j).unwrap();
    let mut errors = Vec::new();
    for h in [1e-2, 5e-3, 2.5e-3] {
        let target = f.chart().shifted(Coord::InvV(j), c(h, 0.0), &f.value_groups()).unwrap();
        let g = invert_chart(&f, &target, CHART_TOL).unwrap();
        let o_g = continue_orbit(&g, &o, ORBIT_TOL).unwrap();
        let k = g.remark_like(&f).map(|_| j).unwrap();
        let v = g.crit_values()[k].finite().unwrap();
        assert!(rel(v, c(1.0 / h, 0.0)) < 1e-8);
        let scaled = -v * v * drho_dv_residue(&g, &o_g, k).unwrap();
        errors.push((scaled - limit).norm());
    }
    assert!(errors[2] < errors[0]);
    assert!(errors[2] < 1e-2, "{errors:?}");
}

#[test]
fn three_routes_agree_on_random_polynomials() {
    for seed in 0..20 {
        let (f, o) = random_orbit_case(seed);
        let id = identity_coefficients(&f, &b_function(&o).unwrap()).unwrap();
        for j in 0..f.crit_points().len() {
            let residue = drho_dv_residue(&f, &o, j).unwrap();
            let simple = drho_dv_simple(&f, &o, j).unwrap();
            let identity = id.for_critical_point(j).unwrap();
            let fd = drho_fd_oracle(&f, &o, Coord::V(j), 1e-3).unwrap();
            assert!(rel(residue, simple) < 1e-9, "seed {seed}");
            assert!(rel(residue, identity) < 1e-6, "seed {seed}");
            assert!(rel(residue, fd) < 1e-6, "seed {seed}: {residue} vs {fd}");
        }
    }
}

#[test]
fn fd_oracle_on_quadratic_family() {
    for v in [-0.5, -0.2, 0.1, -1.6] {
        let f = quadratic(v);
        let o = find_orbits(&f, 1, ORBIT_TOL).unwrap().orbits[0].clone();
        let expected = 2.0 / (c(1.0, 0.0) - o.multiplier);
        let fd = drho_fd_oracle(&f, &o, Coord::V(0), 1e-3).unwrap();
        assert!(rel(fd, expected) < 1e-7, "v={v}");
    }
    for v in [-1.0, -1.1] {
        let f = quadratic(v);
        let o = find_orbits(&f, 2, ORBIT_TOL).unwrap().orbits[0].clone();
        let fd = drho_fd_oracle(&f, &o, Coord::V(0), 1e-3).unwrap();
        assert!(rel(fd, c(4.0, 0.0)) < 1e-7, "v={v}");
    }
}

fn rational_orbit(seed: u64) -> (MapPoint, PeriodicOrbit) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let f = random_rational(&mut rng, 2 + (seed % 2) as usize);
        let Ok(search) = find_orbits(&f, 1, ORBIT_TOL) else {
            continue;
        };
        let pick = search.orbits.into_iter().find(|o| {
            let r = o.multiplier;
            r.norm() > 1e-2 && (r - c(1.0, 0.0)).norm() > 1e-2 && r.norm() < 1e3
        });
        if let Some(o) = pick {
            return (f, o);
        }
    }
}

#[test]
fn rational_sum_rules_hold() {
    for seed in 0..10 {
        let (f, o) = rational_orbit(seed);
        let rules = sum_rules(&f, &o).unwrap();
        assert!(rules.first < 1e-9, "seed {seed}: {}", rules.first);
        assert!(rules.second.unwrap() < 1e-9, "seed {seed}");
    }
}

#[test]
fn rational_fd_matches_in_every_coordinate() {
    for seed in 0..4 {
        let (f, o) = rational_orbit(100 + seed);
        let mut coords = vec![Coord::Sigma, Coord::M];
        coords.extend((0..f.crit_points().len()).map(Coord::V));
        for coord in coords {
            let exact = derivative(&f, &o, coord, Method::Residue).unwrap();
            let fd = derivative(&f, &o, coord, Method::Fd).unwrap();
            assert!(rel(exact, fd) < 1e-6, "seed {seed} {coord}: {exact} vs {fd}");
        }
    }
}

#[test]
fn repelling_orbits_satisfy_the_identity_on_mirror_orbit() {
    let f = ruelle::corpus::two_z_minus_inverse();
    let o = orbit_data(&f, &[c(-1.0, 0.0)]).unwrap();
    let sigma = derivative(&f, &o, Coord::Sigma, Method::Residue).unwrap();
    let m = derivative(&f, &o, Coord::M, Method::Residue).unwrap();
    assert!(rel(sigma, c(2.0, 0.0)) < 1e-12);
    assert!(rel(m, c(-0.5, 0.0)) < 1e-12);
}

#[test]
fn non_repelling_rows_never_outnumber_columns() {
    for seed in 0..10 {
        let (f, _) = random_orbit_case(seed);
        let mut rows = Vec::new();
        for n in 1..=3 {
            for o in find_orbits(&f, n, ORBIT_TOL).unwrap().orbits {
                if o.multiplier.norm() <= 1.0 {
                    rows.push(o);
                }
            }
        }
        let cols: Vec<Coord> = (0..f.value_groups().len()).map(Coord::Group).collect();
        let jac = assemble_jacobian(&f, &rows, &cols).unwrap();
        assert!(jac.rows.len() <= cols.len(), "seed {seed}");
    }
}

#[test]
fn jacobian_examples() {
    let f = quadratic(-0.5);
    let o = find_orbits(&f, 1, ORBIT_TOL)
        .unwrap()
        .orbits
        .into_iter()
        .find(|o| o.multiplier.norm() < 1.0)
        .unwrap();
    let jac = assemble_jacobian(&f, &[o], &[Coord::Group(0)]).unwrap();
    assert!(rel(jac.entries[0][0], c(2.0 / 3f64.sqrt(), 0.0)) < 1e-9);
    assert_eq!(jac.rank, 1);
    assert_eq!(numerical_rank(&jac, RANK_TOL), 1);

    let empty = assemble_jacobian(&f, &[], &[Coord::Group(0)]).unwrap();
    assert_eq!(empty.rank, 0);
    assert!(empty.rows.is_empty());
}

#[test]
fn cusp_vectors_are_nonzero_and_routes_agree() {
    let s3 = 3f64.sqrt();
    let cubic: MapPoint = PolySpacePoint::build(c(2.0 / (3.0 * s3), 0.0), &[c(0.0, 0.0)], &[2])
        .unwrap()
        .into();
    let cases = [
        (quadratic(0.25), c(0.5, 0.0)),
        (cubic, c(1.0 / s3, 0.0)),
        (
            quadratic_rational_with_fixed_point(c(2.0, 0.0), c(1.0, 0.0)).unwrap(),
            c(1.0, 0.0),
        ),
        (
            quadratic_rational_with_fixed_point(c(-1.5, 0.5), c(1.0, 0.0)).unwrap(),
            c(1.0, 0.0),
        ),
    ];
    for (f, b) in cases {
        let o = orbit_data(&f, &[b]).unwrap();
        let report = cusp_derivatives(&f, &o).unwrap();
        let size: f64 = report.entries.iter().map(|e| e.direct.norm()).fold(0.0, f64::max);
        assert!(size > 1e-8);
        for e in &report.entries {
            assert!(
                rel(e.limit, e.direct) < 1e-4,
                "{}: {} vs {}",
                e.coord,
                e.limit,
                e.direct
            );
            assert!(rel(e.limit_reverse, e.direct) < 1e-4);
        }
    }
}
