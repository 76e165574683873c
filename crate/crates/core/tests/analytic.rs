use num_bigint::BigInt;
use num_rational::BigRational;
use pdmspec::analytic::{
    find_crossings, flown_away_report, periodic_eigenfunction, periodic_levels, scarf2_levels,
    scarf2_special_levels, scarf2_special_levels_rational, AnalyticError, ScarfParams,
};
use pdmspec::potentials::periodic_potential;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn scarf_collapsed_spectrum() {
    let p = ScarfParams::new(6.25, 2.5, 1).unwrap();
    let levels = scarf2_levels(p);
    assert_eq!(levels.len(), 2);
    assert!((levels[0] + 4.0).abs() < 1e-12);
    assert!((levels[1] + 1.0).abs() < 1e-12);
}

#[test]
fn scarf_empty_branches() {
    // |V2| = 0.4 with eps = +/-1
    for eps in [1, -1] {
        let p = ScarfParams::new(0.16, 0.4, eps).unwrap();
        assert!(scarf2_levels(p).is_empty(), "eps = {eps}");
    }
    // V2 = 5/2 with eps = -1
    let p = ScarfParams::new(6.25, 2.5, -1).unwrap();
    assert!(scarf2_levels(p).is_empty());
}

#[test]
fn scarf_params_validation() {
    assert!(ScarfParams::new(-1.0, 2.5, 1).is_err());
    assert!(ScarfParams::new(1.0, 0.0, 1).is_err());
    assert!(ScarfParams::new(1.0, 2.5, 2).is_err());
    // V1 + 1/4 - |V2| < 0
    assert!(ScarfParams::new(0.5, 2.5, 1).is_err());
}

#[test]
fn special_levels_examples() {
    assert_eq!(scarf2_special_levels(2.5).unwrap(), vec![-4.0, -1.0]);
    assert_eq!(scarf2_special_levels(1.5).unwrap(), vec![-1.0]);
    let small = scarf2_special_levels(0.6).unwrap();
    assert_eq!(small.len(), 1);
    assert!((small[0] + 0.01).abs() < 1e-15);
    assert!(scarf2_special_levels(0.5).is_err());
    assert!(scarf2_special_levels(-0.3).is_err());
}

#[test]
fn special_levels_boundary_index_excluded() {
    // |V2| - 1/2 integral: the equality index is not admissible
    let levels = scarf2_special_levels(3.5).unwrap();
    assert_eq!(levels.len(), 3);
    assert_eq!(levels, vec![-9.0, -4.0, -1.0]);
}

#[test]
fn collapse_matches_general_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let v2: f64 = rng.gen_range(0.5001..20.0);
        let general = scarf2_levels(ScarfParams::new(v2 * v2, v2, 1).unwrap());
        let special = scarf2_special_levels(v2).unwrap();
        assert_eq!(general.len(), special.len(), "V2 = {v2}");
        for (a, b) in general.iter().zip(&special) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "V2 = {v2}: {a} vs {b}");
        }
    }
}

#[test]
fn all_levels_strictly_negative() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let v1: f64 = rng.gen_range(0.1..30.0);
        let v2: f64 = rng.gen_range(0.05..(v1 + 0.25));
        let eps = if rng.gen_bool(0.5) { 1 } else { -1 };
        if let Ok(p) = ScarfParams::new(v1, v2, eps) {
            for e in scarf2_levels(p) {
                assert!(e < 0.0, "V1 = {v1}, V2 = {v2}, eps = {eps}: E = {e}");
            }
        }
    }
}

#[test]
fn crossing_examples() {
    let rep = find_crossings(&[1.5, 2.5]).unwrap();
    assert_eq!(rep.pairs.len(), 1);
    let p = &rep.pairs[0];
    assert_eq!((p.n1, p.n2), (0, 1));
    assert!((p.energy + 1.0).abs() < 1e-12);
    assert!((p.v22 - f64::from(p.delta_n) - p.v21).abs() < 1e-12);

    assert!(find_crossings(&[2.5]).unwrap().pairs.is_empty());

    let rep = find_crossings(&[1.5, 2.5, 3.5]).unwrap();
    let at = |e: f64| rep.pairs.iter().filter(|p| (p.energy - e).abs() < 1e-12).count();
    assert_eq!(at(-1.0), 3);
    assert_eq!(at(-4.0), 1);
    assert_eq!(rep.pairs.len(), 4);

    assert!(find_crossings(&[0.4]).is_err());
}

#[test]
fn exact_rational_crossing_identity() {
    // E_0(3/2) = E_1(5/2) = -1, exactly
    let lo = scarf2_special_levels_rational(&ratio(3, 2)).unwrap();
    let hi = scarf2_special_levels_rational(&ratio(5, 2)).unwrap();
    assert_eq!(lo[0], hi[1]);
    assert_eq!(lo[0], ratio(-1, 1));

    // shift identity for random rational (V2, delta_n)
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let num = rng.gen_range(2i64..200);
        let den = rng.gen_range(1i64..12);
        let v2 = ratio(num, den) + ratio(1, 2);
        let dn = rng.gen_range(1i64..5);
        let shifted = &v2 + BigRational::from(BigInt::from(dn));
        let lo = scarf2_special_levels_rational(&v2).unwrap();
        let hi = scarf2_special_levels_rational(&shifted).unwrap();
        for (n, e) in lo.iter().enumerate() {
            let m = n + dn as usize;
            assert!(m < hi.len(), "V2 = {v2}, dn = {dn}");
            assert_eq!(e, &hi[m], "V2 = {v2}, dn = {dn}, n = {n}");
        }
    }
}

#[test]
fn flown_away_windows() {
    assert_eq!(flown_away_report(2.5).unwrap().n_max, 1);
    assert_eq!(flown_away_report(2.5).unwrap().count, 2);
    assert_eq!(flown_away_report(0.6).unwrap().n_max, 0);
    assert_eq!(flown_away_report(0.6).unwrap().count, 1);
    assert_eq!(flown_away_report(10.5).unwrap().count, 10);
    assert!(flown_away_report(0.5).is_err());
}

#[test]
fn periodic_level_values() {
    assert!((periodic_levels(&[1]).unwrap()[0] + 1.3125).abs() < 1e-15);
    let vals = periodic_levels(&[3, 4, 5]).unwrap();
    assert!((vals[0] - 11.0 / 16.0).abs() < 1e-15);
    assert!((vals[1] - 39.0 / 16.0).abs() < 1e-15);
    assert!((vals[2] - 75.0 / 16.0).abs() < 1e-15);
    assert_eq!(
        periodic_levels(&[2]).unwrap_err(),
        AnalyticError::MissingState { n: 2 }
    );
    assert!(matches!(
        periodic_levels(&[0]).unwrap_err(),
        AnalyticError::BadParams(_)
    ));
}

#[test]
fn periodic_eigenfunction_boundary_and_center() {
    let pi = std::f64::consts::PI;
    for n in [1, 3, 4, 5] {
        assert!(periodic_eigenfunction(n, -pi).unwrap().norm() < 1e-12);
        assert!(periodic_eigenfunction(n, pi).unwrap().norm() < 1e-10);
    }
    let v = periodic_eigenfunction(1, 0.0).unwrap();
    assert!((v.re - 15.0).abs() < 1e-12 && v.im.abs() < 1e-12);
    assert!(matches!(
        periodic_eigenfunction(2, 0.0),
        Err(AnalyticError::MissingState { n: 2 })
    ));
    assert!(matches!(
        periodic_eigenfunction(1, 4.0),
        Err(AnalyticError::OutOfRange { .. })
    ));
}

#[test]
fn periodic_eigenfunction_satisfies_ode() {
    // -phi'' + (V - E) phi = 0 with 5-point second differences
    let pot = periodic_potential().unwrap();
    let pi = std::f64::consts::PI;
    let h = 1e-3;
    for n in [1, 3, 4, 5] {
        let e = periodic_levels(&[n]).unwrap()[0];
        let mut num = 0.0_f64;
        let mut den = 0.0_f64;
        let samples = 2000;
        for i in 0..samples {
            let q = -pi + 0.02 + (2.0 * pi - 0.04) * i as f64 / (samples - 1) as f64;
            let phi = |t: f64| periodic_eigenfunction(n, t).unwrap();
            let d2 = (-phi(q + 2.0 * h) + 16.0 * phi(q + h) - 30.0 * phi(q)
                + 16.0 * phi(q - h)
                - phi(q - 2.0 * h))
                / (12.0 * h * h);
            let v = pot.eval(q).unwrap();
            let r = -d2 + (v - e) * phi(q);
            num += r.norm_sqr();
            den += phi(q).norm_sqr();
        }
        let rel = (num / den).sqrt();
        assert!(rel <= 1e-4, "n = {n}: ODE residual {rel}");
    }
}
