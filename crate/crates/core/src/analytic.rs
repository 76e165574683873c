//! Closed-form spectra and eigenfunctions for the named models, plus
//! level-crossing and flown-away-state bookkeeping for Scarf II.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("n = {n} is a missing state of the periodic model")]
    MissingState { n: i64 },
    #[error("q = {q} outside [-pi, pi]")]
    OutOfRange { q: f64 },
}

/// Scarf II parameters with the epsilon branch of the level formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScarfParams {
    pub v1: f64,
    pub v2: f64,
    pub epsilon: i8,
}

impl ScarfParams {
    pub fn new(v1: f64, v2: f64, epsilon: i8) -> Result<ScarfParams, AnalyticError> {
        if v1 <= 0.0 {
            return Err(AnalyticError::BadParams(format!("V1 must be > 0, got {v1}")));
        }
        if v2 == 0.0 {
            return Err(AnalyticError::BadParams("V2 must be nonzero".into()));
        }
        if epsilon != 1 && epsilon != -1 {
            return Err(AnalyticError::BadParams(format!(
                "epsilon must be +1 or -1, got {epsilon}"
            )));
        }
        if v1 + 0.25 - v2.abs() < 0.0 {
            return Err(AnalyticError::BadParams(format!(
                "V1 + 1/4 - |V2| = {} < 0: square root not real",
                v1 + 0.25 - v2.abs()
            )));
        }
        Ok(ScarfParams { v1, v2, epsilon })
    }
}

/// Scarf II levels E_n = -[s - n - 1/2]^2 with
/// s = (sqrt(V1 + 1/4 + |V2|) + eps sqrt(V1 + 1/4 - |V2|))/2,
/// admissible for n < s - 1/2; possibly empty.
pub fn scarf2_levels(p: ScarfParams) -> Vec<f64> {
    let a = (p.v1 + 0.25 + p.v2.abs()).sqrt();
    let b = (p.v1 + 0.25 - p.v2.abs()).sqrt();
    let s = 0.5 * (a + f64::from(p.epsilon) * b);
    let mut out = Vec::new();
    let mut n = 0.0;
    while n < s - 0.5 {
        let d = s - n - 0.5;
        out.push(-d * d);
        n += 1.0;
    }
    out
}

/// The collapsed V1 = V2^2, eps = +1 spectrum:
/// E_n = -[|V2| - n - 1/2]^2 for n < |V2| - 1/2 (strict).
pub fn scarf2_special_levels(v2: f64) -> Result<Vec<f64>, AnalyticError> {
    if v2.abs() <= 0.5 {
        return Err(AnalyticError::BadParams(format!(
            "|V2| must exceed 1/2, got {v2}"
        )));
    }
    let s = v2.abs();
    let mut out = Vec::new();
    let mut n = 0.0;
    while n < s - 0.5 {
        let d = s - n - 0.5;
        out.push(-d * d);
        n += 1.0;
    }
    Ok(out)
}

/// Exact-rational version of `scarf2_special_levels`, used so crossing
/// identities are equality tests rather than tolerance tests.
pub fn scarf2_special_levels_rational(v2: &BigRational) -> Result<Vec<BigRational>, AnalyticError> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let s = v2.abs();
    if s <= half {
        return Err(AnalyticError::BadParams(format!(
            "|V2| must exceed 1/2, got {v2}"
        )));
    }
    let mut out = Vec::new();
    let mut n = BigRational::zero();
    while n < &s - &half {
        let d = &s - &n - &half;
        out.push(-(&d * &d));
        n += BigRational::one();
    }
    Ok(out)
}

/// One level crossing: state n1 at |V2| = v21 shares energy with state
/// n2 at |V2| = v22, with v22 - (n2 - n1) = v21.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingPair {
    pub n1: u32,
    pub v21: f64,
    pub n2: u32,
    pub v22: f64,
    pub delta_n: u32,
    pub energy: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrossingReport {
    pub pairs: Vec<CrossingPair>,
}

/// All crossings among grid values: for each pair (v21, v22) with
/// v22 - v21 a positive integer shift, every admissible (n1, n1 + shift)
/// pair shares the energy E_{n1}(v21).
pub fn find_crossings(v2_grid: &[f64]) -> Result<CrossingReport, AnalyticError> {
    for &v in v2_grid {
        if v <= 0.5 {
            return Err(AnalyticError::BadParams(format!(
                "grid values must exceed 1/2, got {v}"
            )));
        }
    }
    let mut pairs = Vec::new();
    for (i, &va) in v2_grid.iter().enumerate() {
        for &vb in &v2_grid[i + 1..] {
            let (lo, hi) = if va <= vb { (va, vb) } else { (vb, va) };
            let shift = hi - lo;
            let rounded = shift.round();
            if rounded < 1.0 || (shift - rounded).abs() > 1e-9 {
                continue;
            }
            let delta_n = rounded as u32;
            let lo_levels = scarf2_special_levels(lo)?;
            let hi_levels = scarf2_special_levels(hi)?;
            for (n1, &e) in lo_levels.iter().enumerate() {
                let n2 = n1 + delta_n as usize;
                if n2 < hi_levels.len() {
                    pairs.push(CrossingPair {
                        n1: n1 as u32,
                        v21: lo,
                        n2: n2 as u32,
                        v22: hi,
                        delta_n,
                        energy: e,
                    });
                }
            }
        }
    }
    Ok(CrossingReport { pairs })
}

/// How the admissible window sits at a given |V2|.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlownAwayReport {
    pub n_max: u32,
    pub count: u32,
}

pub fn flown_away_report(v2: f64) -> Result<FlownAwayReport, AnalyticError> {
    let count = scarf2_special_levels(v2)?.len() as u32;
    Ok(FlownAwayReport {
        n_max: count - 1,
        count,
    })
}

fn check_periodic_n(n: i64) -> Result<(), AnalyticError> {
    if n <= 0 {
        return Err(AnalyticError::BadParams(format!("n must be >= 1, got {n}")));
    }
    if n == 2 {
        return Err(AnalyticError::MissingState { n });
    }
    Ok(())
}

/// Periodic-model levels E_n = n^2/4 - 25/16 for n = 1, 3, 4, 5, ...;
/// n = 2 is a missing state.
pub fn periodic_levels(n_list: &[i64]) -> Result<Vec<f64>, AnalyticError> {
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        check_periodic_n(n)?;
        out.push((n * n) as f64 / 4.0 - 25.0 / 16.0);
    }
    Ok(out)
}

/// Periodic-model eigenfunction on (-pi, pi):
/// phi(q) = {[(16 - n^2) cos q - 2i (n^2 - 4) sin q] sin[n(pi + q)/2]
///           - 6 n sin q cos[n(pi + q)/2]} / (cos q + 2i sin q).
pub fn periodic_eigenfunction(n: i64, q: f64) -> Result<Complex64, AnalyticError> {
    check_periodic_n(n)?;
    if !(-std::f64::consts::PI..=std::f64::consts::PI).contains(&q) {
        return Err(AnalyticError::OutOfRange { q });
    }
    let nf = n as f64;
    let n2 = nf * nf;
    let arg = 0.5 * nf * (std::f64::consts::PI + q);
    let a = Complex64::new((16.0 - n2) * q.cos(), -2.0 * (n2 - 4.0) * q.sin());
    let numerator = a * arg.sin() - Complex64::new(6.0 * nf * q.sin() * arg.cos(), 0.0);
    let denom = Complex64::new(q.cos(), 2.0 * q.sin());
    Ok(numerator / denom)
}
