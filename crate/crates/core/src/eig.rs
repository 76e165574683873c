//! Dense complex eigensolver: balancing, Householder reduction to
//! upper Hessenberg form, then explicit single-shift QR with Wilkinson
//! shifts and deflation. Eigenvectors come from inverse iteration.
//!
//! Matrices here are non-normal (the PDM first-derivative term), so
//! balancing is applied before reduction and eigenpair residuals are
//! reported rather than assumed.

use crate::discretize::OperatorMatrix;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Clone, Debug, Error)]
pub enum EigError {
    #[error("QR iteration failed to converge within {max_sweeps} sweeps (block size {block})")]
    NoConvergence { max_sweeps: usize, block: usize },
    #[error("inverse iteration shift remained singular after {retries} jitter retries")]
    SingularShift { retries: usize },
}

const MAX_SWEEPS: usize = 100;

/// Solver counters for reporting.
#[derive(Clone, Copy, Debug, Default)]
pub struct SolverStats {
    pub iterations: usize,
    pub deflations: usize,
}

/// Per-eigenvalue record. Residual and boundary ratio are filled only
/// for eigenvalues whose eigenvector was extracted (bound-state
/// candidates); the rest carry `None`.
#[derive(Clone, Debug)]
pub struct EigenInfo {
    pub value: Complex64,
    pub residual: Option<f64>,
    pub boundary_amplitude_ratio: Option<f64>,
    pub is_bound: bool,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<EigenInfo>,
    pub stats: SolverStats,
    /// Re-lambda cutoff below which localization was tested.
    pub floor: f64,
}

impl SpectrumReport {
    pub fn bound(&self) -> Vec<&EigenInfo> {
        self.eigenvalues.iter().filter(|e| e.is_bound).collect()
    }
}

fn order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All eigenvalues of an assembled operator, ordered by (Re, Im).
pub fn spectrum(mat: &OperatorMatrix) -> Result<Vec<Complex64>, EigError> {
    Ok(eigenvalues(mat.matrix())?.0)
}

/// All eigenvalues of a dense complex matrix, ordered by (Re, Im).
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<(Vec<Complex64>, SolverStats), EigError> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    if n == 0 {
        return Ok((Vec::new(), SolverStats::default()));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let (mut vals, stats) = qr_eigenvalues(&mut h)?;
    vals.sort_by(order);
    Ok((vals, stats))
}

/// In-place diagonal balancing (radix-2, no permutation phase). A
/// similarity transform, so eigenvalues are unchanged.
fn balance(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    let radix = 2.0_f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| a[(j, i)].norm())
                .sum();
            let mut r: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| a[(i, j)].norm())
                .sum();
            if c == 0.0 || r == 0.0 || !c.is_finite() || !r.is_finite() {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r) < 0.95 * s {
                converged = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// In-place reduction to upper Hessenberg form by complex Householder
/// reflections.
fn hessenberg(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // reflector annihilating a[k+2.., k] against a[k+1, k]
        let mut xnorm2 = 0.0;
        for i in k + 1..n {
            xnorm2 += a[(i, k)].norm_sqr();
        }
        if xnorm2 == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm2.sqrt();
        // v = x - alpha e1
        let mut v = vec![Complex64::new(0.0, 0.0); n - k - 1];
        for (idx, i) in (k + 1..n).enumerate() {
            v[idx] = a[(i, k)];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // left: A <- A - beta v (v^H A) on rows k+1.., cols k..
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, i) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * a[(i, j)];
            }
            dot *= beta;
            for (idx, i) in (k + 1..n).enumerate() {
                let d = v[idx] * dot;
                a[(i, j)] -= d;
            }
        }
        // right: A <- A - beta (A v) v^H on all rows, cols k+1..
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, j) in (k + 1..n).enumerate() {
                dot += a[(i, j)] * v[idx];
            }
            dot *= beta;
            for (idx, j) in (k + 1..n).enumerate() {
                let d = dot * v[idx].conj();
                a[(i, j)] -= d;
            }
        }
        // enforce the exact zeros below the subdiagonal
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Complex Givens rotation [c, s; -conj(s), c] with real c zeroing b.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Eigenvalues of a complex 2x2 block.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let det = a * d - b * c;
    let half = tr / 2.0;
    let disc = (half * half - det).sqrt();
    (half + disc, half - disc)
}

fn qr_eigenvalues(h: &mut DMatrix<Complex64>) -> Result<(Vec<Complex64>, SolverStats), EigError> {
    let n = h.nrows();
    let mut vals = Vec::with_capacity(n);
    let mut stats = SolverStats::default();
    let eps = f64::EPSILON;
    let hnorm: f64 = h.iter().map(|z| z.norm()).sum::<f64>() / (n as f64);
    let mut m = n; // active block is rows/cols [l, m)
    let mut iters = 0usize;
    while m > 0 {
        // deflation scan: zero negligible subdiagonals, find block start
        let mut l = m - 1;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let local = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let thresh = if local > 0.0 { eps * local } else { eps * hnorm };
            if sub <= thresh {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == m - 1 {
            vals.push(h[(l, l)]);
            m -= 1;
            stats.deflations += 1;
            iters = 0;
            continue;
        }
        if l == m - 2 {
            let (e1, e2) = eig2(h[(l, l)], h[(l, l + 1)], h[(l + 1, l)], h[(l + 1, l + 1)]);
            vals.push(e1);
            vals.push(e2);
            m -= 2;
            stats.deflations += 1;
            iters = 0;
            continue;
        }
        if iters >= MAX_SWEEPS {
            return Err(EigError::NoConvergence {
                max_sweeps: MAX_SWEEPS,
                block: m - l,
            });
        }
        // Wilkinson shift from the trailing 2x2, exceptional shift
        // every 20 sweeps to break cycles
        let sigma = if iters > 0 && iters % 20 == 0 {
            h[(m - 1, m - 1)] + Complex64::new(0.75 * h[(m - 1, m - 2)].norm(), 0.0)
        } else {
            let (e1, e2) = eig2(
                h[(m - 2, m - 2)],
                h[(m - 2, m - 1)],
                h[(m - 1, m - 2)],
                h[(m - 1, m - 1)],
            );
            let d = h[(m - 1, m - 1)];
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        // explicit single-shift QR sweep on the block [l, m)
        for i in l..m {
            h[(i, i)] -= sigma;
        }
        let mut rots = Vec::with_capacity(m - l - 1);
        for i in l..m - 1 {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            for j in i..m {
                let hi = h[(i, j)];
                let hk = h[(i + 1, j)];
                h[(i, j)] = c * hi + s * hk;
                h[(i + 1, j)] = -s.conj() * hi + c * hk;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let i = l + idx;
            let top = (i + 2).min(m);
            for k in l..top {
                let hi = h[(k, i)];
                let hk = h[(k, i + 1)];
                h[(k, i)] = c * hi + s.conj() * hk;
                h[(k, i + 1)] = -s * hi + c * hk;
            }
        }
        for i in l..m {
            h[(i, i)] += sigma;
        }
        iters += 1;
        stats.iterations += 1;
    }
    Ok((vals, stats))
}

/// Eigenvector by inverse iteration with a jittered shift; the result
/// has unit 2-norm.
pub fn eigenvector(mat: &OperatorMatrix, lambda: Complex64) -> Result<DVector<Complex64>, EigError> {
    eigenvector_dense(mat.matrix(), lambda)
}

pub fn eigenvector_dense(
    a: &DMatrix<Complex64>,
    lambda: Complex64,
) -> Result<DVector<Complex64>, EigError> {
    let n = a.nrows();
    let anorm = a.norm();
    let mut jitter = 0.0;
    let retries = 3;
    for attempt in 0..=retries {
        let shift = lambda + Complex64::new(jitter, jitter);
        let mut b = a.clone();
        for i in 0..n {
            b[(i, i)] -= shift;
        }
        let lu = b.lu();
        let mut v = DVector::from_element(n, Complex64::new(1.0, 0.0));
        v /= Complex64::new((n as f64).sqrt(), 0.0);
        let mut ok = true;
        for _ in 0..4 {
            match lu.solve(&v) {
                Some(w) => {
                    let norm = w.norm();
                    if !norm.is_finite() || norm == 0.0 {
                        ok = false;
                        break;
                    }
                    v = w / Complex64::new(norm, 0.0);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(v);
        }
        jitter = if attempt == 0 {
            1e-12 * (1.0 + anorm)
        } else {
            jitter * 100.0
        };
    }
    Err(EigError::SingularShift { retries })
}

/// Relative eigenpair residual ||A v - lambda v||_2 / ||A||_F.
pub fn residual(a: &DMatrix<Complex64>, lambda: Complex64, v: &DVector<Complex64>) -> f64 {
    let r = a * v - v.map(|z| z * lambda);
    r.norm() / a.norm()
}

/// Ratio of the largest endpoint amplitude to the peak amplitude.
pub fn boundary_amplitude_ratio(v: &DVector<Complex64>) -> f64 {
    let n = v.len();
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 1.0;
    }
    v[0].norm().max(v[n - 1].norm()) / peak
}

/// Full spectrum plus eigenvector diagnostics for every eigenvalue
/// with Re lambda below `floor` (the potential's boundary floor).
pub fn report(mat: &OperatorMatrix, floor: f64) -> Result<SpectrumReport, EigError> {
    let (vals, stats) = eigenvalues(mat.matrix())?;
    let mut eigenvalues_out = Vec::with_capacity(vals.len());
    for &value in &vals {
        if value.re < floor {
            let v = eigenvector_dense(mat.matrix(), value)?;
            eigenvalues_out.push(EigenInfo {
                value,
                residual: Some(residual(mat.matrix(), value, &v)),
                boundary_amplitude_ratio: Some(boundary_amplitude_ratio(&v)),
                is_bound: false,
            });
        } else {
            eigenvalues_out.push(EigenInfo {
                value,
                residual: None,
                boundary_amplitude_ratio: None,
                is_bound: false,
            });
        }
    }
    Ok(SpectrumReport {
        eigenvalues: eigenvalues_out,
        stats,
        floor,
    })
}

/// Flags is_bound for candidates whose boundary amplitude ratio is
/// below `ratio_tol`; candidates are exactly the entries that carry a
/// ratio (Re lambda below the floor recorded in the report).
pub fn bound_filter(rep: &SpectrumReport, ratio_tol: f64) -> SpectrumReport {
    let mut out = rep.clone();
    for e in &mut out.eigenvalues {
        e.is_bound = matches!(e.boundary_amplitude_ratio, Some(r) if r < ratio_tol);
    }
    out
}

/// Default localization tolerance for `bound_filter`.
pub const DEFAULT_RATIO_TOL: f64 = 1e-4;
