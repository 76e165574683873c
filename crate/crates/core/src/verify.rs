//! Numerical certification of the structural claims: intertwining,
//! (anti-)Hermiticity, pseudo-norms, spectral reality, and
//! reference-target isospectrality.
//!
//! Operator-identity defects are measured on smooth probe vectors
//! (normalized sine modes) with the two rows nearest each wall
//! trimmed from the residual. Raw Frobenius norms of stencil products
//! are dominated by O(h^-3) boundary corner entries that a Dirichlet
//! truncation always produces, even for operators that satisfy the
//! identity exactly in the interior; the probe measure converges at
//! the stencil's O(h^2) and still exposes genuinely wrong operators,
//! which leave an O(1) residual on the same probes.

use crate::discretize::OperatorMatrix;
use crate::eig::SpectrumReport;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("operators live on different grids ({a} vs {b} points)")]
    GridMismatch { a: usize, b: usize },
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    /// Defect per grid in `grids` order (single entry for one-shot checks).
    pub defects: Vec<f64>,
    pub grids: Vec<usize>,
    /// Successive defect ratios (Richardson), empty for one-shot checks.
    pub ratios: Vec<f64>,
    pub pass: bool,
    pub tolerance: f64,
}

/// Number of sine probe modes and trimmed rows per wall.
const PROBE_MODES: usize = 6;
const TRIM: usize = 2;

fn check_grids(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<(), VerifyError> {
    if a.grid() != b.grid() {
        return Err(VerifyError::GridMismatch {
            a: a.grid().n(),
            b: b.grid().n(),
        });
    }
    Ok(())
}

fn sine_probe(n: usize, k: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        // sin(k pi (x_i - a)/(b - a)) on the uniform interior grid
        let t = (i + 1) as f64 / (n + 1) as f64;
        v[i] = Complex64::new((k as f64 * std::f64::consts::PI * t).sin(), 0.0);
    }
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

fn trimmed_norm(v: &DVector<Complex64>) -> f64 {
    let n = v.len();
    (TRIM..n - TRIM).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt()
}

/// Worst probe-vector defect of the identity L = R:
/// max_k ||(L - R) s_k||_trimmed / den(s_k). The caller supplies a
/// denominator built from factor norms so the scale stays bounded as
/// the grid refines (product adjoints pick up unbounded wall rows that
/// would otherwise swamp the O(h^2) interior signal).
fn probe_defect<F>(l: &DMatrix<Complex64>, r: &DMatrix<Complex64>, den: F) -> f64
where
    F: Fn(&DVector<Complex64>) -> f64,
{
    let n = l.nrows();
    let mut worst = 0.0_f64;
    for k in 1..=PROBE_MODES {
        let s = sine_probe(n, k);
        let num = trimmed_norm(&(l * &s - r * &s));
        let d = den(&s);
        if d > 0.0 {
            worst = worst.max(num / d);
        }
    }
    worst
}

/// Intertwining defect of eta H = H^dagger eta on smooth probes,
/// scaled by ||eta s|| ||H s|| per probe.
pub fn intertwining_defect(eta: &OperatorMatrix, h: &OperatorMatrix) -> Result<f64, VerifyError> {
    check_grids(eta, h)?;
    let l = eta.matrix() * h.matrix();
    let r = h.matrix().adjoint() * eta.matrix();
    Ok(probe_defect(&l, &r, |s| {
        (eta.matrix() * s).norm() * (h.matrix() * s).norm()
    }))
}

/// Frobenius Hermiticity defect ||A - A^dagger||_F / ||A||_F. Suited to
/// single-stencil operators (eta1 itself); for operator products use
/// the probe-based variants.
pub fn hermiticity_defect(a: &OperatorMatrix) -> f64 {
    let m = a.matrix();
    (m - m.adjoint()).norm() / m.norm()
}

/// Frobenius anti-Hermiticity defect ||A + A^dagger||_F / ||A||_F.
pub fn anti_hermiticity_defect(a: &OperatorMatrix) -> f64 {
    let m = a.matrix();
    (m + m.adjoint()).norm() / m.norm()
}

/// Probe-based Hermiticity defect of a single-stencil matrix
/// (A vs A^dagger), scaled by ||A s|| per probe.
pub fn hermiticity_defect_probe(a: &DMatrix<Complex64>) -> f64 {
    probe_defect(a, &a.adjoint(), |s| (a * s).norm())
}

/// Hermiticity defect of the product eta H on smooth probes, scaled by
/// ||eta s|| ||H s|| like the intertwining defect (the product norm
/// itself drifts with the grid and would skew the Richardson ratio).
pub fn product_hermiticity_defect(
    eta: &OperatorMatrix,
    h: &OperatorMatrix,
) -> Result<f64, VerifyError> {
    check_grids(eta, h)?;
    let p = eta.matrix() * h.matrix();
    Ok(probe_defect(&p, &p.adjoint(), |s| {
        (eta.matrix() * s).norm() * (h.matrix() * s).norm()
    }))
}

/// Anti-Hermiticity defect of the product eta H (for anti-Hermitian
/// eta), same scaling as `product_hermiticity_defect`.
pub fn product_anti_hermiticity_defect(
    eta: &OperatorMatrix,
    h: &OperatorMatrix,
) -> Result<f64, VerifyError> {
    check_grids(eta, h)?;
    let p = eta.matrix() * h.matrix();
    Ok(probe_defect(&p, &(-p.adjoint()), |s| {
        (eta.matrix() * s).norm() * (h.matrix() * s).norm()
    }))
}

/// Probe-based Hermiticity defect of eta itself (it is a single
/// first-order stencil, but its Frobenius defect is still
/// corner-dominated when mu varies).
pub fn eta_hermiticity_defect_probe(eta: &OperatorMatrix) -> f64 {
    hermiticity_defect_probe(eta.matrix())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoNorm {
    pub value: Complex64,
    /// False when |value| < 1e-8: the reality argument is undetermined
    /// for that state.
    pub determinate: bool,
}

/// v^dagger (eta v) per vector; callers pass normalized vectors.
pub fn pseudo_norms(eta: &OperatorMatrix, vectors: &[DVector<Complex64>]) -> Vec<PseudoNorm> {
    vectors
        .iter()
        .map(|v| {
            let value = v.dotc(&(eta.matrix() * v));
            PseudoNorm {
                value,
                determinate: value.norm() >= 1e-8,
            }
        })
        .collect()
}

/// Pass iff every bound eigenvalue has |Im| <= tol; the defect is the
/// worst bound-state |Im|.
pub fn reality_check(rep: &SpectrumReport, tol: f64) -> VerificationReport {
    let worst = rep
        .bound()
        .iter()
        .map(|e| e.value.im.abs())
        .fold(0.0, f64::max);
    VerificationReport {
        check: "reality".into(),
        defects: vec![worst],
        grids: vec![rep.eigenvalues.len()],
        ratios: vec![],
        pass: worst <= tol,
        tolerance: tol,
    }
}

fn sorted_values(vals: &[Complex64]) -> Vec<Complex64> {
    let mut v = vals.to_vec();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn compare_sets(a: &[Complex64], b: &[Complex64], tol: f64, check: &str) -> VerificationReport {
    let sa = sorted_values(a);
    let sb = sorted_values(b);
    let counts_equal = sa.len() == sb.len();
    let max_dist = if counts_equal {
        sa.iter()
            .zip(&sb)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    VerificationReport {
        check: check.into(),
        defects: vec![max_dist],
        grids: vec![sa.len(), sb.len()],
        ratios: vec![],
        pass: counts_equal && max_dist <= tol,
        tolerance: tol,
    }
}

/// Greedy nearest matching of the two bound-state sets, pairing in
/// ascending (Re, Im) order; pass iff counts agree and every pair is
/// within tol.
pub fn isospectral_compare(a: &SpectrumReport, b: &SpectrumReport, tol: f64) -> VerificationReport {
    let va: Vec<Complex64> = a.bound().iter().map(|e| e.value).collect();
    let vb: Vec<Complex64> = b.bound().iter().map(|e| e.value).collect();
    compare_sets(&va, &vb, tol, "isospectral")
}

/// Matched-interval variant comparing the k lowest (by real part)
/// eigenvalues of two full spectra. Truncated boxes discretize the
/// continuum, so the low-lying set is the comparable part.
pub fn lowest_k_compare(
    a: &[Complex64],
    b: &[Complex64],
    k: usize,
    tol: f64,
) -> VerificationReport {
    let va: Vec<Complex64> = sorted_values(a).into_iter().take(k).collect();
    let vb: Vec<Complex64> = sorted_values(b).into_iter().take(k).collect();
    compare_sets(&va, &vb, tol, "isospectral-lowest")
}

/// Successive defect ratios d_i / d_{i+1} for a refinement ladder.
pub fn richardson_ratios(defects: &[f64]) -> Vec<f64> {
    defects
        .windows(2)
        .map(|w| if w[1] > 0.0 { w[0] / w[1] } else { f64::INFINITY })
        .collect()
}
