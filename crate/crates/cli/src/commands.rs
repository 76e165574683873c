//! Subcommand implementations. Each returns a fully populated payload;
//! the caller maps the verdict and errors onto exit codes.

use crate::output::{eig_row, AnalyticRow, CheckRow, ComplexRow, MatchRow, PairRow, Payload, TableRow};
use crate::CliError;
use num_complex::Complex64;
use pdmspec::analytic::{find_crossings, periodic_levels, scarf2_special_levels};
use pdmspec::discretize::{
    assemble_eta1, assemble_reference, assemble_target, GridSpec, OperatorMatrix,
};
use pdmspec::eig::{bound_filter, eigenvalues, eigenvector, report, DEFAULT_RATIO_TOL};
use pdmspec::expr::Expr;
use pdmspec::maps::{mass_from_expr, mass_from_f, mass_from_g, CoordinateMap, MassProfile};
use pdmspec::potentials::{
    morse_generator, periodic_potential, reference_potential, scarf2_generator, scarf2_potential,
    ComplexPotential, GeneratorSpec,
};
use pdmspec::verify::{
    intertwining_defect, lowest_k_compare, product_anti_hermiticity_defect,
    product_hermiticity_defect, pseudo_norms, reality_check, richardson_ratios,
};
const MISSING_LEVEL: f64 = -9.0 / 16.0;

fn wall_floor(pot: &ComplexPotential, grid: &GridSpec) -> Result<f64, CliError> {
    let a = pot.re(grid.a() + grid.h())?;
    let b = pot.re(grid.b() - grid.h())?;
    Ok(a.min(b))
}

fn spectrum_rows(payload: &mut Payload, rep: &pdmspec::eig::SpectrumReport) {
    for e in &rep.eigenvalues {
        payload.eigenvalues.push(eig_row(e.value, e.residual, e.is_bound));
    }
}

/// Greedy nearest matching of numerical values onto analytic levels.
fn match_levels(payload: &mut Payload, numeric: &[Complex64], tol: f64) -> bool {
    let mut all_within = !payload.analytic.is_empty() || numeric.is_empty();
    for a in &payload.analytic {
        let best = numeric
            .iter()
            .min_by(|x, y| {
                (*x - Complex64::from(a.value))
                    .norm()
                    .total_cmp(&(*y - Complex64::from(a.value)).norm())
            })
            .copied();
        match best {
            Some(z) => {
                let dist = (z - Complex64::from(a.value)).norm();
                all_within &= dist <= tol;
                payload.matches.push(MatchRow {
                    num: ComplexRow { re: z.re, im: z.im },
                    ana: a.value,
                    dist,
                });
            }
            None => all_within = false,
        }
    }
    all_within
}

pub fn cmd_model(
    name: &str,
    v2: f64,
    eta: f64,
    grid: Option<GridSpec>,
    tol: f64,
    config: serde_json::Value,
) -> Result<Payload, CliError> {
    let mut payload = Payload::new(config);
    match name {
        "scarf2" => {
            let grid = grid.map_or_else(|| GridSpec::new(-20.0, 20.0, 400), Ok)?;
            let pot = scarf2_potential(v2 * v2, v2)?;
            let op = assemble_reference(&pot, &grid)?;
            let floor = wall_floor(&pot, &grid)?;
            let rep = bound_filter(&report(&op, floor)?, DEFAULT_RATIO_TOL);
            spectrum_rows(&mut payload, &rep);
            for (n, e) in scarf2_special_levels(v2)?.iter().enumerate() {
                payload.analytic.push(AnalyticRow { n: n as i64, value: *e });
            }
            let bound: Vec<Complex64> = rep.bound().iter().map(|e| e.value).collect();
            let matched = match_levels(&mut payload, &bound, tol);
            payload.set_verdict(matched && bound.len() == payload.analytic.len());
        }
        "periodic" => {
            let pi = std::f64::consts::PI;
            let grid = grid.map_or_else(|| GridSpec::new(-pi, pi, 400), Ok)?;
            let pot = periodic_potential()?;
            let op = assemble_reference(&pot, &grid)?;
            // candidates below 0 get eigenvectors, so the missing-state
            // window carries residuals if anything shows up there
            let rep = bound_filter(&report(&op, 0.0)?, DEFAULT_RATIO_TOL);
            spectrum_rows(&mut payload, &rep);
            let ns = [1_i64, 3, 4, 5];
            for (n, e) in ns.iter().zip(periodic_levels(&ns)?) {
                payload.analytic.push(AnalyticRow { n: *n, value: e });
            }
            // the n = 3 level splits into a conjugate pair on the box:
            // presence is judged on real parts
            let mut pass = true;
            for a in &payload.analytic {
                let best = rep
                    .eigenvalues
                    .iter()
                    .map(|e| e.value)
                    .min_by(|x, y| (x.re - a.value).abs().total_cmp(&(y.re - a.value).abs()))
                    .unwrap();
                let dist = (best.re - a.value).abs();
                pass &= dist <= tol;
                payload.matches.push(MatchRow {
                    num: ComplexRow { re: best.re, im: best.im },
                    ana: a.value,
                    dist,
                });
            }
            // missing n = 2: nothing near -9/16 may survive a residual test
            for e in &rep.eigenvalues {
                if (e.value - Complex64::from(MISSING_LEVEL)).norm() <= 0.1 {
                    let v = eigenvector(&op, e.value)?;
                    if pdmspec::eig::residual(op.matrix(), e.value, &v) <= 1e-6 {
                        pass = false;
                    }
                }
            }
            payload.set_verdict(pass);
        }
        "morse" => {
            let grid = grid.map_or_else(|| GridSpec::new(-10.0, 20.0, 400), Ok)?;
            let gen = morse_generator(eta);
            let pot = reference_potential(&gen, (grid.a() - 1.0, grid.b() + 1.0))?;
            let op = assemble_reference(&pot, &grid)?;
            let floor = wall_floor(&pot, &grid)?;
            let rep = bound_filter(&report(&op, floor)?, DEFAULT_RATIO_TOL);
            spectrum_rows(&mut payload, &rep);
            payload.set_verdict(rep.bound().is_empty());
        }
        other => return Err(CliError::BadInput(format!("unknown model '{other}'"))),
    }
    Ok(payload)
}

struct MapSetup {
    gen: GeneratorSpec,
    profile: MassProfile,
    map: CoordinateMap,
    refpot: ComplexPotential,
    default_qrange: (f64, f64),
    compare_k: usize,
    /// Extra target-grid refinement when the mapped x-interval is much
    /// wider than the q-interval.
    target_refine: usize,
}

fn map_setup(
    reference: &str,
    v2: f64,
    f: Option<&str>,
    g: Option<&str>,
    mass: Option<&str>,
) -> Result<MapSetup, CliError> {
    let (gen, refpot, default_qrange, compare_k, target_refine) = match reference {
        "scarf2" => (
            scarf2_generator(v2),
            scarf2_potential(v2 * v2, v2)?,
            (-4.0, 4.0),
            5,
            2,
        ),
        "periodic" => (
            pdmspec::potentials::periodic_generator(),
            periodic_potential()?,
            (-1.2, 1.2),
            4,
            1,
        ),
        other => return Err(CliError::BadInput(format!("unknown reference '{other}'"))),
    };
    let picked = [f.is_some(), g.is_some(), mass.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if picked != 1 {
        return Err(CliError::BadInput(
            "exactly one of --f, --g, --mass is required".into(),
        ));
    }
    let domain = (-60.0, 60.0);
    let (profile, map) = if let Some(text) = f {
        mass_from_f(Expr::parse(text, "x")?, domain)?
    } else if let Some(text) = g {
        mass_from_g(Expr::parse(text, "x")?, domain)?
    } else {
        let profile = mass_from_expr(Expr::parse(mass.unwrap(), "x")?, domain)?;
        let map = profile.coordinate_map(0.0)?;
        (profile, map)
    };
    Ok(MapSetup {
        gen,
        profile,
        map,
        refpot,
        default_qrange,
        compare_k,
        target_refine,
    })
}

pub fn cmd_map(
    reference: &str,
    v2: f64,
    f: Option<&str>,
    g: Option<&str>,
    mass: Option<&str>,
    qrange: Option<(f64, f64)>,
    n: usize,
    tol: f64,
    config: serde_json::Value,
) -> Result<Payload, CliError> {
    let mut payload = Payload::new(config);
    let setup = map_setup(reference, v2, f, g, mass)?;
    let (qa, qb) = qrange.unwrap_or(setup.default_qrange);
    if !(qa < qb) {
        return Err(CliError::BadInput(format!("empty q-range {qa}:{qb}")));
    }
    let xa = setup.map.x_of_q(qa)?;
    let xb = setup.map.x_of_q(qb)?;

    let gq = GridSpec::new(qa, qb, n)?;
    let href = assemble_reference(&setup.refpot, &gq)?;
    let (ref_vals, _) = eigenvalues(href.matrix())?;

    let target = pdmspec::potentials::target_potential(&setup.gen, &setup.profile, &setup.map)?;
    let gx = GridSpec::new(xa, xb, n * setup.target_refine)?;
    let htar = assemble_target(&setup.profile, &target, &gx)?;
    let (tar_vals, _) = eigenvalues(htar.matrix())?;

    for x in sample_points(xa, xb, 33) {
        payload.table.push(TableRow {
            x,
            m: setup.profile.m(x)?,
            q: setup.map.q_of_x(x)?,
            v_re: target.re(x)?,
            v_im: target.im(x)?,
        });
    }
    for z in &tar_vals {
        payload.eigenvalues.push(eig_row(*z, None, false));
    }
    let vr = lowest_k_compare(&ref_vals, &tar_vals, setup.compare_k, tol);
    let mut sr: Vec<Complex64> = ref_vals;
    let mut st: Vec<Complex64> = tar_vals;
    let key = |a: &Complex64, b: &Complex64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
    sr.sort_by(key);
    st.sort_by(key);
    for (r, t) in sr.iter().zip(&st).take(setup.compare_k) {
        payload.matches.push(MatchRow {
            num: ComplexRow { re: t.re, im: t.im },
            ana: r.re,
            dist: (t - r).norm(),
        });
    }
    payload.checks.push(CheckRow {
        check: vr.check,
        defects: vr.defects,
        grids: vr.grids,
        ratios: vr.ratios,
        pass: vr.pass,
        tolerance: vr.tolerance,
    });
    payload.set_verdict(vr.pass);
    Ok(payload)
}

fn sample_points(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| a + (b - a) * (i as f64 + 0.5) / count as f64)
        .collect()
}

/// Target pair (H, eta1, eta2) for the verify ladder.
fn verify_pair(
    model: &str,
    v2: f64,
    grid: &GridSpec,
) -> Result<(OperatorMatrix, OperatorMatrix, OperatorMatrix), CliError> {
    let (gen, profile, map) = match model {
        "scarf2" => {
            let gen = scarf2_generator(v2);
            let (p, map) = mass_from_f(Expr::parse("x+sqrt(x^2+1)", "x")?, (-60.0, 60.0))?;
            (gen, p, map)
        }
        "periodic" => {
            let gen = pdmspec::potentials::periodic_generator();
            let (p, map) =
                mass_from_g(Expr::parse("x", "x")?, (f64::NEG_INFINITY, f64::INFINITY))?;
            (gen, p, map)
        }
        other => return Err(CliError::BadInput(format!("unknown model '{other}'"))),
    };
    let pot = pdmspec::potentials::target_potential(&gen, &profile, &map)?;
    let h = assemble_target(&profile, &pot, grid)?;
    let f_of_x = |x: f64| {
        let q = map.q_of_x(x)?;
        Ok(gen.eval(q)?.0)
    };
    let eta1 = assemble_eta1(&profile, &f_of_x, grid)?;
    let eta2 = pdmspec::discretize::assemble_eta2(&profile, &f_of_x, grid)?;
    Ok((h, eta1, eta2))
}

fn verify_xrange(model: &str) -> (f64, f64) {
    match model {
        "periodic" => ((-1.2_f64).tan(), 1.2_f64.tan()),
        _ => ((-3.0_f64).sinh(), 3.0_f64.sinh()),
    }
}

pub fn cmd_verify(
    model: &str,
    v2: f64,
    checks: &[String],
    ladder: usize,
    config: serde_json::Value,
) -> Result<Payload, CliError> {
    let mut payload = Payload::new(config);
    let (xa, xb) = verify_xrange(model);
    let mut all_pass = true;
    for check in checks {
        let row = match check.as_str() {
            "intertwine" => {
                let mut defects = Vec::new();
                let mut grids = Vec::new();
                for n in [ladder, 2 * ladder, 4 * ladder] {
                    let grid = GridSpec::new(xa, xb, n)?;
                    let (h, eta1, _) = verify_pair(model, v2, &grid)?;
                    defects.push(intertwining_defect(&eta1, &h)?);
                    grids.push(n);
                }
                let ratios = richardson_ratios(&defects);
                let pass = ratios.iter().all(|r| (3.2..=4.8).contains(r));
                CheckRow {
                    check: "intertwine".into(),
                    defects,
                    grids,
                    ratios,
                    pass,
                    tolerance: 4.8,
                }
            }
            "hermiticity" => {
                let mut defects = Vec::new();
                let mut grids = Vec::new();
                let mut routes_agree = true;
                for n in [ladder, 2 * ladder, 4 * ladder] {
                    let grid = GridSpec::new(xa, xb, n)?;
                    let (h, eta1, eta2) = verify_pair(model, v2, &grid)?;
                    let d1 = product_hermiticity_defect(&eta1, &h)?;
                    let d2 = product_anti_hermiticity_defect(&eta2, &h)?;
                    routes_agree &= (d1 - d2).abs() <= 1e-13;
                    defects.push(d1);
                    grids.push(n);
                }
                let ratios = richardson_ratios(&defects);
                let pass = routes_agree && ratios.iter().all(|r| (3.2..=4.8).contains(r));
                CheckRow {
                    check: "hermiticity".into(),
                    defects,
                    grids,
                    ratios,
                    pass,
                    tolerance: 4.8,
                }
            }
            "reality" => reality_row(model, v2, ladder)?,
            "pseudonorm" => pseudonorm_row(model, v2, ladder)?,
            other => {
                return Err(CliError::BadInput(format!(
                    "unknown check '{other}' (expected intertwine, hermiticity, reality, pseudonorm)"
                )))
            }
        };
        all_pass &= row.pass;
        payload.checks.push(row);
    }
    payload.set_verdict(all_pass);
    Ok(payload)
}

/// Reference-problem spectrum used by the reality and pseudo-norm
/// checks: Scarf II bound states on a wide box, or the lowest box
/// levels for the periodic model on the matched interval.
fn reference_report(
    model: &str,
    v2: f64,
    n: usize,
) -> Result<(OperatorMatrix, pdmspec::eig::SpectrumReport, ComplexPotential), CliError> {
    match model {
        "scarf2" => {
            let pot = scarf2_potential(v2 * v2, v2)?;
            let grid = GridSpec::new(-20.0, 20.0, n)?;
            let op = assemble_reference(&pot, &grid)?;
            let floor = wall_floor(&pot, &grid)?;
            let rep = bound_filter(&report(&op, floor)?, DEFAULT_RATIO_TOL);
            Ok((op, rep, pot))
        }
        "periodic" => {
            let pot = periodic_potential()?;
            let grid = GridSpec::new(-1.2, 1.2, n)?;
            let op = assemble_reference(&pot, &grid)?;
            // every level is above the wall values here: take the 4
            // lowest as the states of interest
            let mut rep = report(&op, f64::NEG_INFINITY)?;
            let (vals, _) = eigenvalues(op.matrix())?;
            let mut sorted = vals;
            sorted.sort_by(|a, b| a.re.total_cmp(&b.re));
            rep.eigenvalues = sorted
                .iter()
                .take(4)
                .map(|z| pdmspec::eig::EigenInfo {
                    value: *z,
                    residual: None,
                    boundary_amplitude_ratio: None,
                    is_bound: true,
                })
                .collect();
            Ok((op, rep, pot))
        }
        other => Err(CliError::BadInput(format!("unknown model '{other}'"))),
    }
}

fn reality_row(model: &str, v2: f64, ladder: usize) -> Result<CheckRow, CliError> {
    let n = (2 * ladder).max(400);
    let (_, rep, _) = reference_report(model, v2, n)?;
    let vr = reality_check(&rep, 1e-6);
    Ok(CheckRow {
        check: vr.check,
        defects: vr.defects,
        grids: vec![n],
        ratios: vr.ratios,
        pass: vr.pass && !rep.bound().is_empty(),
        tolerance: vr.tolerance,
    })
}

fn pseudonorm_row(model: &str, v2: f64, ladder: usize) -> Result<CheckRow, CliError> {
    let n = (2 * ladder).max(400);
    let (op, rep, _) = reference_report(model, v2, n)?;
    let gen = match model {
        "scarf2" => scarf2_generator(v2),
        _ => pdmspec::potentials::periodic_generator(),
    };
    // reference problem: constant mass, eta1 = -i d/dq + F(q)
    let unit = mass_from_expr(Expr::parse("1", "x")?, (-50.0, 50.0))?;
    let eta = assemble_eta1(&unit, |q| Ok(gen.eval(q)?.0), op.grid())?;
    let vectors: Vec<_> = rep
        .bound()
        .iter()
        .map(|e| eigenvector(&op, e.value))
        .collect::<Result<_, _>>()?;
    let norms = pseudo_norms(&eta, &vectors);
    let worst = norms.iter().map(|p| p.value.norm()).fold(f64::INFINITY, f64::min);
    let pass = !norms.is_empty() && norms.iter().all(|p| p.determinate);
    Ok(CheckRow {
        check: "pseudonorm".into(),
        defects: vec![if worst.is_finite() { worst } else { 0.0 }],
        grids: vec![n],
        ratios: vec![],
        pass,
        tolerance: 1e-8,
    })
}

pub fn cmd_crossings(v2_grid: &[f64], config: serde_json::Value) -> Result<Payload, CliError> {
    let mut payload = Payload::new(config);
    let rep = find_crossings(v2_grid)?;
    for p in &rep.pairs {
        payload.pairs.push(PairRow {
            n1: p.n1,
            v21: p.v21,
            n2: p.n2,
            v22: p.v22,
            delta_n: p.delta_n,
            energy: p.energy,
        });
    }
    payload.set_verdict(true);
    Ok(payload)
}
