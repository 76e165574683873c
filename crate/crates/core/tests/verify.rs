use nalgebra::DVector;
use num_complex::Complex64;
use pdmspec::discretize::{
    assemble_eta1, assemble_eta2, assemble_reference, assemble_target, GridSpec, OperatorMatrix,
};
use pdmspec::eig::{bound_filter, eigenvalues, eigenvector, report, DEFAULT_RATIO_TOL};
use pdmspec::expr::Expr;
use pdmspec::maps::{mass_from_expr, mass_from_f, mass_from_g, CoordinateMap, MassProfile};
use pdmspec::potentials::{
    periodic_generator, periodic_potential, reference_potential, scarf2_generator,
    scarf2_potential, target_potential, ComplexPotential, GeneratorSpec, VarTag,
};
use pdmspec::verify::{
    eta_hermiticity_defect_probe, hermiticity_defect, intertwining_defect, isospectral_compare,
    lowest_k_compare, product_anti_hermiticity_defect, product_hermiticity_defect, pseudo_norms,
    reality_check, richardson_ratios, VerifyError,
};
use std::sync::Arc;

fn expr_x(text: &str) -> Expr {
    Expr::parse(text, "x").unwrap()
}

fn unit_mass() -> MassProfile {
    mass_from_expr(expr_x("1"), (-50.0, 50.0)).unwrap()
}

/// Scarf II target setup: mu = sqrt(1+x^2) (asinh map) with the full
/// Eq-13 potential; returns (H, eta1, eta2) on the given grid.
fn scarf_target(
    grid: &GridSpec,
    flip_w: bool,
) -> (OperatorMatrix, OperatorMatrix, OperatorMatrix) {
    let gen = scarf2_generator(2.5);
    let (p, map) = mass_from_f(expr_x("x+sqrt(x^2+1)"), (-60.0, 60.0)).unwrap();
    let pot = target_potential(&gen, &p, &map).unwrap();
    let pot = if flip_w { flip_im(&pot) } else { pot };
    let h = assemble_target(&p, &pot, grid).unwrap();
    let f_of_x = make_f(&gen, &map);
    let eta1 = assemble_eta1(&p, &f_of_x, grid).unwrap();
    let eta2 = assemble_eta2(&p, &f_of_x, grid).unwrap();
    (h, eta1, eta2)
}

fn periodic_target(
    grid: &GridSpec,
    flip_w: bool,
) -> (OperatorMatrix, OperatorMatrix, OperatorMatrix) {
    let gen = periodic_generator();
    let (p, map) = mass_from_g(expr_x("x"), (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
    let pot = target_potential(&gen, &p, &map).unwrap();
    let pot = if flip_w { flip_im(&pot) } else { pot };
    let h = assemble_target(&p, &pot, grid).unwrap();
    let f_of_x = make_f(&gen, &map);
    let eta1 = assemble_eta1(&p, &f_of_x, grid).unwrap();
    let eta2 = assemble_eta2(&p, &f_of_x, grid).unwrap();
    (h, eta1, eta2)
}

fn make_f<'a>(
    gen: &'a GeneratorSpec,
    map: &'a CoordinateMap,
) -> impl Fn(f64) -> Result<f64, pdmspec::potentials::PotentialError> + 'a {
    move |x| {
        let q = map.q_of_x(x)?;
        Ok(gen.eval(q)?.0)
    }
}

fn flip_im(pot: &ComplexPotential) -> ComplexPotential {
    let p1 = pot.clone();
    let p2 = pot.clone();
    ComplexPotential::new(
        Arc::new(move |x| p1.re(x)),
        Arc::new(move |x| Ok(-p2.im(x)?)),
        pot.var(),
        pot.domain(),
    )
    .unwrap()
}

#[test]
fn trivial_intertwining_is_exact() {
    // mu = 1, F = c: W = 0, H real Hermitian, eta1 Hermitian
    let grid = GridSpec::new(-10.0, 10.0, 200).unwrap();
    let p = unit_mass();
    let gen = GeneratorSpec::new(Expr::parse("1.3", "q").unwrap(), 0.0);
    let pot = reference_potential(&gen, (-10.0, 10.0)).unwrap();
    // constant F: reference potential has re = -1.69, im = 0, in q = x
    let pot_x = ComplexPotential::new(
        Arc::new({
            let p = pot.clone();
            move |x| p.re(x)
        }),
        Arc::new({
            let p = pot.clone();
            move |x| p.im(x)
        }),
        VarTag::X,
        (-10.0, 10.0),
    )
    .unwrap();
    let h = assemble_target(&p, &pot_x, &grid).unwrap();
    let eta1 = assemble_eta1(&p, |_| Ok(1.3), &grid).unwrap();
    let d = intertwining_defect(&eta1, &h).unwrap();
    assert!(d <= 1e-13, "defect {d}");
    assert!(hermiticity_defect(&eta1) <= 1e-13);
}

#[test]
fn grid_mismatch_rejected() {
    let g1 = GridSpec::new(-10.0, 10.0, 100).unwrap();
    let g2 = GridSpec::new(-10.0, 10.0, 120).unwrap();
    let (h, _, _) = scarf_target(&g1, false);
    let (_, eta, _) = scarf_target(&g2, false);
    assert!(matches!(
        intertwining_defect(&eta, &h),
        Err(VerifyError::GridMismatch { .. })
    ));
}

#[test]
fn intertwining_converges_second_order_scarf() {
    let a = (-3.0_f64).sinh();
    let b = 3.0_f64.sinh();
    let mut defects = Vec::new();
    for n in [200, 400, 800] {
        let grid = GridSpec::new(a, b, n).unwrap();
        let (h, eta1, _) = scarf_target(&grid, false);
        defects.push(intertwining_defect(&eta1, &h).unwrap());
    }
    for r in richardson_ratios(&defects) {
        assert!((3.2..=4.8).contains(&r), "ratios {defects:?}");
    }
    // sign-flipped W stays O(1)
    for n in [200, 400] {
        let grid = GridSpec::new(a, b, n).unwrap();
        let (h, eta1, _) = scarf_target(&grid, true);
        let d = intertwining_defect(&eta1, &h).unwrap();
        assert!(d >= 1e-3, "flipped W defect {d} at N = {n}");
    }
}

#[test]
fn intertwining_converges_second_order_periodic() {
    let a = (-1.2_f64).tan();
    let b = 1.2_f64.tan();
    let mut defects = Vec::new();
    for n in [200, 400, 800] {
        let grid = GridSpec::new(a, b, n).unwrap();
        let (h, eta1, _) = periodic_target(&grid, false);
        defects.push(intertwining_defect(&eta1, &h).unwrap());
    }
    for r in richardson_ratios(&defects) {
        assert!((3.2..=4.8).contains(&r), "ratios {defects:?}");
    }
    let grid = GridSpec::new(a, b, 400).unwrap();
    let (h, eta1, _) = periodic_target(&grid, true);
    assert!(intertwining_defect(&eta1, &h).unwrap() >= 1e-3);
}

#[test]
fn wrong_g1_negative_control() {
    // eta1 with G1 != mu'/2 (here G1 = 0 via a constant-mass eta on a
    // variable-mass H) must leave an O(1) intertwining defect
    let grid = GridSpec::new(-5.0, 5.0, 300).unwrap();
    let (h, _, _) = scarf_target(&grid, false);
    let gen = scarf2_generator(2.5);
    let (_, map) = mass_from_f(expr_x("x+sqrt(x^2+1)"), (-60.0, 60.0)).unwrap();
    let wrong_eta = assemble_eta1(&unit_mass(), make_f(&gen, &map), &grid).unwrap();
    assert!(intertwining_defect(&wrong_eta, &h).unwrap() >= 1e-3);
}

#[test]
fn product_hermiticity_routes_agree() {
    let grid = GridSpec::new(-5.0, 5.0, 300).unwrap();
    let (h, eta1, eta2) = scarf_target(&grid, false);
    let d1 = product_hermiticity_defect(&eta1, &h).unwrap();
    let d2 = product_anti_hermiticity_defect(&eta2, &h).unwrap();
    // |i| = 1: the two defects are the same number
    assert!((d1 - d2).abs() <= 1e-13, "{d1} vs {d2}");
    // and both shrink at second order
    let grid2 = GridSpec::new(-5.0, 5.0, 600).unwrap();
    let (h2, eta1b, _) = scarf_target(&grid2, false);
    let d1f = product_hermiticity_defect(&eta1b, &h2).unwrap();
    let ratio = d1 / d1f;
    assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
}

#[test]
fn eta1_hermiticity_defect_shrinks_second_order() {
    let a = (-3.0_f64).sinh();
    let b = 3.0_f64.sinh();
    let mut defects = Vec::new();
    for n in [100, 200, 400] {
        let grid = GridSpec::new(a, b, n).unwrap();
        let (_, eta1, _) = scarf_target(&grid, false);
        defects.push(eta_hermiticity_defect_probe(&eta1));
    }
    for r in richardson_ratios(&defects) {
        assert!((3.2..=4.8).contains(&r), "defects {defects:?}");
    }
}

#[test]
fn pseudo_norm_uniform_vector() {
    // eta1 with mu = 1, F = 1 on a uniform vector: the derivative term
    // cancels in the interior and telescopes at the walls, so the
    // pseudo-norm is exactly F = 1
    let grid = GridSpec::new(-10.0, 10.0, 100).unwrap();
    let eta = assemble_eta1(&unit_mass(), |_| Ok(1.0), &grid).unwrap();
    let v = DVector::from_element(100, Complex64::new(0.1, 0.0));
    let norms = pseudo_norms(&eta, &[v / Complex64::new(0.1 * 10.0, 0.0)]);
    assert!((norms[0].value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(norms[0].determinate);
}

#[test]
fn scarf_bound_state_pseudo_norms_nonzero() {
    let pot = scarf2_potential(6.25, 2.5).unwrap();
    let grid = GridSpec::new(-20.0, 20.0, 400).unwrap();
    let h = assemble_reference(&pot, &grid).unwrap();
    let floor = pot.re(grid.a() + grid.h()).unwrap();
    let rep = bound_filter(&report(&h, floor).unwrap(), DEFAULT_RATIO_TOL);
    // reference problem: eta1 with mu = 1 and F = -V2 sech q
    let gen = scarf2_generator(2.5);
    let eta = assemble_eta1(&unit_mass(), |q| Ok(gen.eval(q)?.0), &grid).unwrap();
    let vectors: Vec<DVector<Complex64>> = rep
        .bound()
        .iter()
        .map(|e| eigenvector(&h, e.value).unwrap())
        .collect();
    assert_eq!(vectors.len(), 2);
    for pn in pseudo_norms(&eta, &vectors) {
        assert!(pn.determinate, "pseudo-norm {:?} is numerically zero", pn.value);
    }
}

#[test]
fn reality_check_scarf_reference() {
    let pot = scarf2_potential(6.25, 2.5).unwrap();
    let grid = GridSpec::new(-20.0, 20.0, 400).unwrap();
    let h = assemble_reference(&pot, &grid).unwrap();
    let floor = pot.re(grid.a() + grid.h()).unwrap();
    let rep = bound_filter(&report(&h, floor).unwrap(), DEFAULT_RATIO_TOL);
    let vr = reality_check(&rep, 1e-6);
    assert!(vr.pass, "defect {:?}", vr.defects);
}

#[test]
fn reality_check_negative_control() {
    // An im part not of the -mu F' form (adds an even component that
    // breaks the antisymmetry) leaves persistent imaginary parts on
    // the bound states at every grid
    let base = scarf2_potential(6.25, 2.5).unwrap();
    let broken = ComplexPotential::new(
        Arc::new({
            let p = base.clone();
            move |q| p.re(q)
        }),
        Arc::new({
            let p = base.clone();
            move |q| {
                let s = 1.0 / q.cosh();
                Ok(p.im(q)? + 0.3 * s * s)
            }
        }),
        VarTag::Q,
        base.domain(),
    )
    .unwrap();
    for n in [200, 400] {
        let grid = GridSpec::new(-20.0, 20.0, n).unwrap();
        let h = assemble_reference(&broken, &grid).unwrap();
        let floor = broken.re(grid.a() + grid.h()).unwrap();
        let rep = bound_filter(&report(&h, floor).unwrap(), DEFAULT_RATIO_TOL);
        assert!(!rep.bound().is_empty());
        let vr = reality_check(&rep, 1e-6);
        assert!(!vr.pass, "N = {n}: wrong potential passed reality");
        assert!(vr.defects[0] >= 1e-3, "N = {n}: defect {}", vr.defects[0]);
    }
}

#[test]
fn isospectral_compare_identical_and_symmetric() {
    let pot = scarf2_potential(6.25, 2.5).unwrap();
    let grid = GridSpec::new(-20.0, 20.0, 200).unwrap();
    let h = assemble_reference(&pot, &grid).unwrap();
    let floor = pot.re(grid.a() + grid.h()).unwrap();
    let rep = bound_filter(&report(&h, floor).unwrap(), DEFAULT_RATIO_TOL);
    let same = isospectral_compare(&rep, &rep, 1e-12);
    assert!(same.pass);
    assert_eq!(same.defects[0], 0.0);

    // symmetry on two different grids
    let grid2 = GridSpec::new(-20.0, 20.0, 260).unwrap();
    let h2 = assemble_reference(&pot, &grid2).unwrap();
    let rep2 = bound_filter(&report(&h2, floor).unwrap(), DEFAULT_RATIO_TOL);
    let ab = isospectral_compare(&rep, &rep2, 5e-3);
    let ba = isospectral_compare(&rep2, &rep, 5e-3);
    assert_eq!(ab.pass, ba.pass);
    assert_eq!(ab.defects, ba.defects);
}

#[test]
fn matched_interval_periodic_isospectrality_smoke() {
    // coarse version of the matched-interval protocol: reference on
    // q in (-1.2, 1.2) vs g = x target on (tan(-1.2), tan(1.2))
    let n = 300;
    let refpot = periodic_potential().unwrap();
    let gq = GridSpec::new(-1.2, 1.2, n).unwrap();
    let href = assemble_reference(&refpot, &gq).unwrap();
    let (ref_vals, _) = eigenvalues(href.matrix()).unwrap();

    let gx = GridSpec::new((-1.2_f64).tan(), 1.2_f64.tan(), n).unwrap();
    let (htar, _, _) = periodic_target(&gx, false);
    let (tar_vals, _) = eigenvalues(htar.matrix()).unwrap();

    let vr = lowest_k_compare(&ref_vals, &tar_vals, 4, 2e-2);
    assert!(vr.pass, "max pair distance {:?}", vr.defects);
}
