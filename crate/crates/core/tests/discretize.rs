use num_complex::Complex64;
use pdmspec::discretize::{
    adjoint, assemble_eta1, assemble_eta2, assemble_reference, assemble_target, DiscretizeError,
    GridSpec,
};
use pdmspec::expr::Expr;
use pdmspec::maps::mass_from_expr;
use pdmspec::potentials::{scarf2_generator, ComplexPotential, VarTag};
use std::sync::Arc;

fn const_potential(v: f64, w: f64, var: VarTag) -> ComplexPotential {
    ComplexPotential::new(
        Arc::new(move |_| Ok(v)),
        Arc::new(move |_| Ok(w)),
        var,
        (-50.0, 50.0),
    )
    .unwrap()
}

fn unit_mass(domain: (f64, f64)) -> pdmspec::maps::MassProfile {
    mass_from_expr(Expr::parse("1", "x").unwrap(), domain).unwrap()
}

#[test]
fn grid_spec_validation() {
    assert!(matches!(
        GridSpec::new(0.0, 1.0, 8),
        Err(DiscretizeError::BadGrid(_))
    ));
    assert!(matches!(
        GridSpec::new(1.0, 0.0, 100),
        Err(DiscretizeError::BadGrid(_))
    ));
    let g = GridSpec::new(0.0, 1.0, 99).unwrap();
    assert!((g.h() - 0.01).abs() < 1e-15);
    assert!((g.point(0) - 0.01).abs() < 1e-15);
    assert!((g.point(98) - 0.99).abs() < 1e-12);
}

#[test]
fn reference_shift_identity() {
    let grid = GridSpec::new(0.0, std::f64::consts::PI, 40).unwrap();
    let a0 = assemble_reference(&const_potential(0.0, 0.0, VarTag::Q), &grid).unwrap();
    let a5 = assemble_reference(&const_potential(5.0, 0.0, VarTag::Q), &grid).unwrap();
    let diff = a5.matrix() - a0.matrix();
    for i in 0..40 {
        for j in 0..40 {
            let want = if i == j {
                Complex64::new(5.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            assert_eq!(diff[(i, j)], want);
        }
    }
}

#[test]
fn unit_mass_target_equals_reference() {
    let grid = GridSpec::new(-3.0, 3.0, 50).unwrap();
    let p = unit_mass((-10.0, 10.0));
    let in_q = const_potential(1.25, 0.5, VarTag::Q);
    let in_x = const_potential(1.25, 0.5, VarTag::X);
    let r = assemble_reference(&in_q, &grid).unwrap();
    let t = assemble_target(&p, &in_x, &grid).unwrap();
    assert_eq!(r.matrix(), t.matrix());
}

#[test]
fn real_potential_constant_mass_is_real_symmetric() {
    let grid = GridSpec::new(-3.0, 3.0, 30).unwrap();
    let p = unit_mass((-10.0, 10.0));
    let t = assemble_target(&p, &const_potential(2.0, 0.0, VarTag::X), &grid).unwrap();
    let m = t.matrix();
    for i in 0..30 {
        for j in 0..30 {
            assert_eq!(m[(i, j)].im, 0.0);
            assert_eq!(m[(i, j)], m[(j, i)]);
        }
    }
}

#[test]
fn variable_tag_mismatch_rejected() {
    let grid = GridSpec::new(-3.0, 3.0, 30).unwrap();
    let p = unit_mass((-10.0, 10.0));
    assert!(matches!(
        assemble_reference(&const_potential(0.0, 0.0, VarTag::X), &grid),
        Err(DiscretizeError::WrongVariable { .. })
    ));
    assert!(matches!(
        assemble_target(&p, &const_potential(0.0, 0.0, VarTag::Q), &grid),
        Err(DiscretizeError::WrongVariable { .. })
    ));
}

#[test]
fn eta1_constant_mass_is_exactly_hermitian() {
    let grid = GridSpec::new(-5.0, 5.0, 40).unwrap();
    let p = unit_mass((-10.0, 10.0));
    for c in [0.0, 1.3] {
        let eta = assemble_eta1(&p, |_| Ok(c), &grid).unwrap();
        let m = eta.matrix();
        assert_eq!(m, &m.adjoint());
        assert_eq!(m[(3, 3)], Complex64::new(c, 0.0));
    }
}

#[test]
fn eta2_is_i_times_eta1_bit_exact() {
    let grid = GridSpec::new(-4.0, 4.0, 60).unwrap();
    let p = mass_from_expr(Expr::parse("(1+x^2)^-1", "x").unwrap(), (-10.0, 10.0)).unwrap();
    let gen = scarf2_generator(2.5);
    let map = p.coordinate_map(0.0).unwrap();
    let f_of_x = |x: f64| {
        let q = map.q_of_x(x)?;
        Ok(gen.eval(q)?.0)
    };
    let e1 = assemble_eta1(&p, f_of_x, &grid).unwrap();
    let e2 = assemble_eta2(&p, f_of_x, &grid).unwrap();
    let i = Complex64::new(0.0, 1.0);
    for r in 0..60 {
        for c in 0..60 {
            assert_eq!(e2.matrix()[(r, c)], i * e1.matrix()[(r, c)]);
        }
    }
    // eta2 + eta2^dagger = 0 exactly for constant mass, F = 0
    let p1 = unit_mass((-10.0, 10.0));
    let e2 = assemble_eta2(&p1, |_| Ok(0.0), &grid).unwrap();
    let sum = e2.matrix() + e2.matrix().adjoint();
    assert!(sum.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn adjoint_identities() {
    let grid = GridSpec::new(-4.0, 4.0, 30).unwrap();
    let p = mass_from_expr(Expr::parse("(1+x^2)^-1", "x").unwrap(), (-10.0, 10.0)).unwrap();
    let eta = assemble_eta1(&p, |x| Ok(x.sin()), &grid).unwrap();
    // (A^dagger)^dagger = A bit-exact
    assert_eq!(adjoint(&adjoint(&eta)).matrix(), eta.matrix());
    // real symmetric input unchanged
    let p1 = unit_mass((-10.0, 10.0));
    let sym = assemble_target(&p1, &const_potential(2.0, 0.0, VarTag::X), &grid).unwrap();
    assert_eq!(adjoint(&sym).matrix(), sym.matrix());
    // (iA)^dagger = -i A^dagger
    let e2 = assemble_eta2(&p, |x| Ok(x.sin()), &grid).unwrap();
    let i = Complex64::new(0.0, 1.0);
    let lhs = adjoint(&e2);
    let rhs = adjoint(&eta);
    for r in 0..30 {
        for c in 0..30 {
            assert!((lhs.matrix()[(r, c)] + i * rhs.matrix()[(r, c)]).norm() < 1e-15);
        }
    }
}

#[test]
fn assembly_is_deterministic_and_finite() {
    let grid = GridSpec::new(-4.0, 4.0, 64).unwrap();
    let p = mass_from_expr(Expr::parse("(1+x^2)^-2", "x").unwrap(), (-10.0, 10.0)).unwrap();
    let pot = const_potential(1.0, -0.5, VarTag::X);
    let a = assemble_target(&p, &pot, &grid).unwrap();
    let b = assemble_target(&p, &pot, &grid).unwrap();
    assert_eq!(a.matrix(), b.matrix());
    assert!(a.matrix().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
}
