//! Mass profiles and the monotone coordinate map q(x) with q'(x) = 1/mu(x).
//!
//! Two generator families are supported: f-maps with q = ln f and
//! M = (f'/f)^2, and g-maps with q = arctan g and M = (g'/(1+g^2))^2.
//! Raw masses get a quadrature-backed map anchored at q(x0) = 0.

use crate::expr::{DomainError, Expr, ExprNode};
use thiserror::Error;

/// Number of interior probe points used for positivity/monotonicity
/// checks and for the map's sample table.
const PROBE_POINTS: usize = 512;

/// Infinite domain ends are clamped here for probing and table
/// construction; pointwise evaluation is still allowed anywhere.
const CLAMP: f64 = 100.0;

#[derive(Clone, Debug, Error)]
pub enum MapError {
    #[error("mass is not positive at x = {x} (m = {m})")]
    NonpositiveMass { x: f64, m: f64 },
    #[error("generator f is not positive at x = {x} (f = {f})")]
    NonpositiveF { x: f64, f: f64 },
    #[error("coordinate map is not strictly monotone near x = {x}")]
    NonMonotoneMap { x: f64 },
    #[error("quadrature failed to reach tolerance {tol} over [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64, tol: f64 },
    #[error("q = {q} outside the map's target interval [{lo}, {hi}]")]
    OutOfRange { q: f64, lo: f64, hi: f64 },
    #[error("x = {x} outside the profile domain ({a}, {b})")]
    OutOfDomain { x: f64, a: f64, b: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

fn clamp_interval(a: f64, b: f64) -> (f64, f64) {
    let lo = if a.is_finite() { a } else { -CLAMP };
    let hi = if b.is_finite() { b } else { CLAMP };
    (lo, hi)
}

fn probe_grid(a: f64, b: f64) -> Vec<f64> {
    let (lo, hi) = clamp_interval(a, b);
    let n = PROBE_POINTS;
    let h = (hi - lo) / (n + 1) as f64;
    (1..=n).map(|i| lo + i as f64 * h).collect()
}

/// Position-dependent mass m(x) with AD-backed mu = m^(-1/2) and its
/// first two derivatives.
#[derive(Clone, Debug)]
pub struct MassProfile {
    m_expr: Expr,
    domain: (f64, f64),
}

impl MassProfile {
    pub fn m_expr(&self) -> &Expr {
        &self.m_expr
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn m(&self, x: f64) -> Result<f64, MapError> {
        self.check_domain(x)?;
        Ok(self.m_expr.eval(x)?)
    }

    /// (mu, mu', mu'') at x, from m and its AD derivatives:
    /// mu = m^(-1/2), mu' = -m'/(2 m^(3/2)),
    /// mu'' = 3 m'^2/(4 m^(5/2)) - m''/(2 m^(3/2)).
    pub fn mu_d(&self, x: f64) -> Result<(f64, f64, f64), MapError> {
        self.check_domain(x)?;
        let d = self.m_expr.eval_d2(x)?;
        if d.v <= 0.0 {
            return Err(MapError::NonpositiveMass { x, m: d.v });
        }
        let s = d.v.sqrt();
        let mu = 1.0 / s;
        let m32 = d.v * s;
        let mu1 = -0.5 * d.d1 / m32;
        let mu2 = 0.75 * d.d1 * d.d1 / (m32 * d.v) - 0.5 * d.d2 / m32;
        Ok((mu, mu1, mu2))
    }

    pub fn mu(&self, x: f64) -> Result<f64, MapError> {
        Ok(self.mu_d(x)?.0)
    }

    fn check_domain(&self, x: f64) -> Result<(), MapError> {
        let (a, b) = self.domain;
        if x > a && x < b {
            Ok(())
        } else {
            Err(MapError::OutOfDomain { x, a, b })
        }
    }

    /// Quadrature-backed coordinate map anchored at q(x0) = 0, for
    /// masses that did not come with a closed-form map.
    pub fn coordinate_map(&self, x0: f64) -> Result<CoordinateMap, MapError> {
        self.check_domain(x0)?;
        let profile = self.clone();
        CoordinateMap::build(self.domain, Forward::Quadrature { profile, x0 })
    }
}

/// Builds a profile from a raw mass expression, checking positivity on
/// the probe grid.
pub fn mass_from_expr(m_expr: Expr, domain: (f64, f64)) -> Result<MassProfile, MapError> {
    for &x in &probe_grid(domain.0, domain.1) {
        let v = m_expr.eval(x)?;
        if v <= 0.0 {
            return Err(MapError::NonpositiveMass { x, m: v });
        }
        let d = m_expr.eval_d2(x)?;
        let _ = d;
    }
    Ok(MassProfile { m_expr, domain })
}

/// f-family: q(x) = ln f(x), M(x) = [f'(x)/f(x)]^2.
pub fn mass_from_f(
    f: Expr,
    domain: (f64, f64),
) -> Result<(MassProfile, CoordinateMap), MapError> {
    let df = f.derivative();
    let mut sign = 0.0;
    for &x in &probe_grid(domain.0, domain.1) {
        let fv = f.eval(x)?;
        if fv <= 0.0 {
            return Err(MapError::NonpositiveF { x, f: fv });
        }
        let dv = df.eval(x)?;
        if dv == 0.0 || (sign != 0.0 && dv.signum() != sign) {
            return Err(MapError::NonMonotoneMap { x });
        }
        sign = dv.signum();
    }
    let m_node = ExprNode::pow(
        ExprNode::binary(
            crate::expr::BinOp::Div,
            df.root().clone(),
            f.root().clone(),
        ),
        2.0,
    );
    let m_expr = Expr::from_node(m_node, f.var());
    let profile = MassProfile {
        m_expr,
        domain,
    };
    let map = CoordinateMap::build(domain, Forward::LnF(f))?;
    Ok((profile, map))
}

/// g-family: q(x) = arctan g(x), M(x) = [g'(x)/(1+g(x)^2)]^2.
pub fn mass_from_g(
    g: Expr,
    domain: (f64, f64),
) -> Result<(MassProfile, CoordinateMap), MapError> {
    let dg = g.derivative();
    let mut sign = 0.0;
    for &x in &probe_grid(domain.0, domain.1) {
        let dv = dg.eval(x)?;
        if dv == 0.0 || (sign != 0.0 && dv.signum() != sign) {
            return Err(MapError::NonMonotoneMap { x });
        }
        sign = dv.signum();
    }
    let one_plus_g2 = ExprNode::binary(
        crate::expr::BinOp::Add,
        ExprNode::Const(1.0),
        ExprNode::pow(g.root().clone(), 2.0),
    );
    let m_node = ExprNode::pow(
        ExprNode::binary(crate::expr::BinOp::Div, dg.root().clone(), one_plus_g2),
        2.0,
    );
    let m_expr = Expr::from_node(m_node, g.var());
    let profile = MassProfile {
        m_expr,
        domain,
    };
    let map = CoordinateMap::build(domain, Forward::ArctanG(g))?;
    Ok((profile, map))
}

#[derive(Clone, Debug)]
enum Forward {
    LnF(Expr),
    ArctanG(Expr),
    Quadrature { profile: MassProfile, x0: f64 },
}

impl Forward {
    fn eval(&self, x: f64) -> Result<f64, MapError> {
        match self {
            Forward::LnF(f) => {
                let v = f.eval(x)?;
                if v <= 0.0 {
                    return Err(MapError::NonpositiveF { x, f: v });
                }
                Ok(v.ln())
            }
            Forward::ArctanG(g) => Ok(g.eval(x)?.atan()),
            Forward::Quadrature { profile, x0 } => q_of_x(profile, *x0, x),
        }
    }
}

/// Monotone coordinate map with a dense sample table and a bisection
/// inverse.
#[derive(Clone, Debug)]
pub struct CoordinateMap {
    source: (f64, f64),
    target: (f64, f64),
    /// (x_i, q_i) with q strictly monotone; increasing iff `rising`.
    table: Vec<(f64, f64)>,
    rising: bool,
    forward: Forward,
}

impl CoordinateMap {
    fn build(source: (f64, f64), forward: Forward) -> Result<CoordinateMap, MapError> {
        let xs = probe_grid(source.0, source.1);
        let mut table = Vec::with_capacity(xs.len());
        for &x in &xs {
            table.push((x, forward.eval(x)?));
        }
        let rising = table[1].1 > table[0].1;
        for w in table.windows(2) {
            let ok = if rising {
                w[1].1 > w[0].1
            } else {
                w[1].1 < w[0].1
            };
            if !ok {
                return Err(MapError::NonMonotoneMap { x: w[1].0 });
            }
        }
        let (qa, qb) = (table.first().unwrap().1, table.last().unwrap().1);
        let target = if rising { (qa, qb) } else { (qb, qa) };
        Ok(CoordinateMap {
            source,
            target,
            table,
            rising,
            forward,
        })
    }

    pub fn source(&self) -> (f64, f64) {
        self.source
    }

    /// Target interval spanned by the sample table (clamped for
    /// infinite sources).
    pub fn target(&self) -> (f64, f64) {
        self.target
    }

    pub fn q_of_x(&self, x: f64) -> Result<f64, MapError> {
        if x <= self.source.0 || x >= self.source.1 {
            return Err(MapError::OutOfDomain {
                x,
                a: self.source.0,
                b: self.source.1,
            });
        }
        self.forward.eval(x)
    }

    /// Inverse map by table bracketing plus bisection on the forward
    /// evaluator; |q(x_of_q(q)) - q| <= 1e-12 at convergence.
    pub fn x_of_q(&self, q: f64) -> Result<f64, MapError> {
        let (lo, hi) = self.target;
        if q < lo || q > hi {
            return Err(MapError::OutOfRange { q, lo, hi });
        }
        // locate a bracketing pair of table nodes
        let cmp = |qi: f64| if self.rising { qi <= q } else { qi >= q };
        let idx = self.table.partition_point(|&(_, qi)| cmp(qi));
        if idx == 0 {
            return Ok(self.table[0].0);
        }
        if idx == self.table.len() {
            return Ok(self.table[self.table.len() - 1].0);
        }
        let (mut xa, mut qa) = self.table[idx - 1];
        let (mut xb, mut qb) = self.table[idx];
        for _ in 0..200 {
            if (qa - q).abs() <= 1e-12 {
                return Ok(xa);
            }
            if (qb - q).abs() <= 1e-12 {
                return Ok(xb);
            }
            if (xb - xa).abs() <= 1e-14 * (1.0 + xa.abs()) {
                break;
            }
            let xm = 0.5 * (xa + xb);
            let qm = self.forward.eval(xm)?;
            let left = if self.rising { qm < q } else { qm > q };
            if left {
                xa = xm;
                qa = qm;
            } else {
                xb = xm;
                qb = qm;
            }
        }
        let _ = (qa, qb);
        Ok(0.5 * (xa + xb))
    }
}

/// q(x) = integral of sqrt(M) from x0 to x by adaptive composite
/// Simpson, absolute tolerance 1e-10, depth cap 40.
pub fn q_of_x(p: &MassProfile, x0: f64, x: f64) -> Result<f64, MapError> {
    let tol = 1e-10;
    if x == x0 {
        return Ok(0.0);
    }
    let (a, b, sign) = if x > x0 { (x0, x, 1.0) } else { (x, x0, -1.0) };
    let f = |t: f64| -> Result<f64, MapError> { Ok(p.m(t)?.sqrt()) };
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    let v = adaptive(&f, a, b, fa, fm, fb, whole, tol, 40)
        .ok_or(MapError::QuadratureFailure { a, b, tol })??;
    Ok(sign * v)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<Result<f64, MapError>>
where
    F: Fn(f64) -> Result<f64, MapError>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = match f(lm) {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    let frm = match f(rm) {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(Ok(left + right + delta / 15.0));
    }
    if depth == 0 {
        return None;
    }
    let l = adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let lv = match l {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    let r = adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    let rv = match r {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    Some(Ok(lv + rv))
}
