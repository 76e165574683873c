//! Complex reference and target potentials built from generating
//! functions F(q), plus the named models (Scarf II, periodic, Morse)
//! and the pulled-back closed forms of the two generator families.

use crate::expr::{DomainError, Expr};
use crate::maps::{CoordinateMap, MapError, MassProfile};
use num_complex::Complex64;
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Debug, Error)]
pub enum PotentialError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("potential is not finite at {var} = {at}")]
    NonFinite { var: char, at: f64 },
}

/// Which coordinate a potential is a function of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarTag {
    Q,
    X,
}

/// Branch of q = +/- ln f in the f-generator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

/// Generating function F(q) and the free energy offset alpha0.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub f: Expr,
    pub alpha0: f64,
}

impl GeneratorSpec {
    pub fn new(f: Expr, alpha0: f64) -> GeneratorSpec {
        GeneratorSpec { f, alpha0 }
    }

    /// F(q) and F'(q) by AD.
    pub fn eval(&self, q: f64) -> Result<(f64, f64), PotentialError> {
        let d = self.f.eval_d2(q)?;
        Ok((d.v, d.d1))
    }
}

type Evaluator = Arc<dyn Fn(f64) -> Result<f64, PotentialError> + Send + Sync>;

/// Complex potential split into real part V and imaginary part W.
#[derive(Clone)]
pub struct ComplexPotential {
    re: Evaluator,
    im: Evaluator,
    var: VarTag,
    domain: (f64, f64),
}

impl std::fmt::Debug for ComplexPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexPotential")
            .field("var", &self.var)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl ComplexPotential {
    /// Wraps the evaluators after checking finiteness on a 256-point
    /// probe grid of the (clamped) domain.
    pub fn new(
        re: Evaluator,
        im: Evaluator,
        var: VarTag,
        domain: (f64, f64),
    ) -> Result<ComplexPotential, PotentialError> {
        let pot = ComplexPotential {
            re,
            im,
            var,
            domain,
        };
        let lo = if domain.0.is_finite() { domain.0 } else { -100.0 };
        let hi = if domain.1.is_finite() { domain.1 } else { 100.0 };
        let n = 256;
        let h = (hi - lo) / (n + 1) as f64;
        let tag = if var == VarTag::Q { 'q' } else { 'x' };
        for i in 1..=n {
            let t = lo + i as f64 * h;
            let v = (pot.re)(t)?;
            let w = (pot.im)(t)?;
            if !v.is_finite() || !w.is_finite() {
                return Err(PotentialError::NonFinite { var: tag, at: t });
            }
        }
        Ok(pot)
    }

    pub fn re(&self, t: f64) -> Result<f64, PotentialError> {
        (self.re)(t)
    }

    pub fn im(&self, t: f64) -> Result<f64, PotentialError> {
        (self.im)(t)
    }

    pub fn eval(&self, t: f64) -> Result<Complex64, PotentialError> {
        Ok(Complex64::new(self.re(t)?, self.im(t)?))
    }

    pub fn var(&self) -> VarTag {
        self.var
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// Effective reference potential in q:
/// re = alpha0 - F(q)^2, im = -F'(q).
pub fn reference_potential(
    gen: &GeneratorSpec,
    domain: (f64, f64),
) -> Result<ComplexPotential, PotentialError> {
    let g1 = gen.clone();
    let g2 = gen.clone();
    ComplexPotential::new(
        Arc::new(move |q| {
            let (f, _) = g1.eval(q)?;
            Ok(g1.alpha0 - f * f)
        }),
        Arc::new(move |q| {
            let (_, df) = g2.eval(q)?;
            Ok(-df)
        }),
        VarTag::Q,
        domain,
    )
}

/// Target potential in x for a mass profile and coordinate map:
/// re = -F(q(x))^2 - mu mu''/2 - mu'^2/4 + alpha0,
/// im = -F'(q)|_{q(x)} (equals -mu(x) dF/dx by the chain rule).
pub fn target_potential(
    gen: &GeneratorSpec,
    p: &MassProfile,
    map: &CoordinateMap,
) -> Result<ComplexPotential, PotentialError> {
    target_potential_branch(gen, p, map, Branch::Plus)
}

/// Same with an explicit sign branch: `Minus` evaluates F at -q(x),
/// flipping the imaginary part's sign accordingly.
pub fn target_potential_branch(
    gen: &GeneratorSpec,
    p: &MassProfile,
    map: &CoordinateMap,
    branch: Branch,
) -> Result<ComplexPotential, PotentialError> {
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let (g1, p1, m1) = (gen.clone(), p.clone(), map.clone());
    let (g2, m2) = (gen.clone(), map.clone());
    ComplexPotential::new(
        Arc::new(move |x| {
            let q = sign * m1.q_of_x(x)?;
            let (f, _) = g1.eval(q)?;
            let (mu, mu1, mu2) = p1.mu_d(x)?;
            Ok(-f * f - mu * mu2 / 2.0 - mu1 * mu1 / 4.0 + g1.alpha0)
        }),
        Arc::new(move |x| {
            let q = sign * m2.q_of_x(x)?;
            let (_, df) = g2.eval(q)?;
            // d/dx F(sign*q(x)) = sign * F'(q) / mu, so W = -mu F'(x)
            // reduces to -sign * F'(q)
            Ok(-sign * df)
        }),
        VarTag::X,
        p.domain(),
    )
}

/// Complexified PT-symmetric Scarf II: -V1 sech^2 q - i V2 sech q tanh q.
pub fn scarf2_potential(v1: f64, v2: f64) -> Result<ComplexPotential, PotentialError> {
    if v1 <= 0.0 {
        return Err(PotentialError::BadParams(format!("V1 must be > 0, got {v1}")));
    }
    if v2 == 0.0 {
        return Err(PotentialError::BadParams("V2 must be nonzero".into()));
    }
    ComplexPotential::new(
        Arc::new(move |q| {
            let s = 1.0 / q.cosh();
            Ok(-v1 * s * s)
        }),
        Arc::new(move |q| Ok(-v2 * q.tanh() / q.cosh())),
        VarTag::Q,
        (f64::NEG_INFINITY, f64::INFINITY),
    )
}

fn periodic_value(q: f64) -> Complex64 {
    let z = Complex64::new(q.cos(), 2.0 * q.sin());
    -6.0 / (z * z) - 25.0 / 16.0
}

/// Periodic reference model on (-pi, pi):
/// -6/(cos q + 2i sin q)^2 - 25/16.
pub fn periodic_potential() -> Result<ComplexPotential, PotentialError> {
    ComplexPotential::new(
        Arc::new(|q| Ok(periodic_value(q).re)),
        Arc::new(|q| Ok(periodic_value(q).im)),
        VarTag::Q,
        (-std::f64::consts::PI, std::f64::consts::PI),
    )
}

/// The expanded form of the periodic potential, kept for cross-checks:
/// (1/9)(-30 cos^2 q + 24)/(cos^2 q - 4/3)^2
///   + 4i sin 2q / (3 (cos^2 q - 4/3)^2) - 25/16.
pub fn periodic_potential_expanded() -> Result<ComplexPotential, PotentialError> {
    let denom = |q: f64| {
        let c2 = q.cos() * q.cos();
        let d = c2 - 4.0 / 3.0;
        (c2, d * d)
    };
    ComplexPotential::new(
        Arc::new(move |q| {
            let (c2, d2) = denom(q);
            Ok((-30.0 * c2 + 24.0) / (9.0 * d2) - 25.0 / 16.0)
        }),
        Arc::new(move |q| {
            let (_, d2) = denom(q);
            Ok(4.0 * (2.0 * q).sin() / (3.0 * d2))
        }),
        VarTag::Q,
        (-std::f64::consts::PI, std::f64::consts::PI),
    )
}

/// The periodic model's generating function F(q) = -4/(3 cos^2 q - 4) - 5/4
/// as a GeneratorSpec (alpha0 = 0).
pub fn periodic_generator() -> GeneratorSpec {
    let f = Expr::parse("-4/(3*cos(q)^2-4)-5/4", "q").expect("static expression");
    GeneratorSpec::new(f, 0.0)
}

/// Scarf II generating function F(q) = -V2 sech q (alpha0 = 0).
pub fn scarf2_generator(v2: f64) -> GeneratorSpec {
    let f = Expr::parse(&format!("-({v2})*sech(q)"), "q").expect("static expression");
    GeneratorSpec::new(f, 0.0)
}

/// Morse-type generating function F(q) = eta exp(-q) (alpha0 = 0);
/// its reference potential is -eta^2 e^(-2q) + i eta e^(-q).
pub fn morse_generator(eta: f64) -> GeneratorSpec {
    let f = Expr::parse(&format!("({eta})*exp(-q)"), "q").expect("static expression");
    GeneratorSpec::new(f, 0.0)
}

/// Pulled-back Scarf II reference along q = +/- ln f (the V1 = V2^2
/// family):
/// -4 V2^2 f^2/(f^2+1)^2 -/+ 2i V2 f (f^2-1)/(f^2+1)^2.
pub fn scarf2_pulled_back(
    v2: f64,
    f: &Expr,
    branch: Branch,
    domain: (f64, f64),
) -> Result<ComplexPotential, PotentialError> {
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let f1 = f.clone();
    let f2 = f.clone();
    ComplexPotential::new(
        Arc::new(move |x| {
            let fv = f1.eval(x)?;
            let d = fv * fv + 1.0;
            Ok(-4.0 * v2 * v2 * fv * fv / (d * d))
        }),
        Arc::new(move |x| {
            let fv = f2.eval(x)?;
            let d = fv * fv + 1.0;
            Ok(-sign * 2.0 * v2 * fv * (fv * fv - 1.0) / (d * d))
        }),
        VarTag::X,
        domain,
    )
}

/// Pulled-back periodic reference along q = arctan g:
/// -6 (g^2+1)/(1+2ig)^2 - 25/16.
pub fn periodic_pulled_back(
    g: &Expr,
    domain: (f64, f64),
) -> Result<ComplexPotential, PotentialError> {
    let value = |gv: f64| {
        let z = Complex64::new(1.0, 2.0 * gv);
        -6.0 * (gv * gv + 1.0) / (z * z) - Complex64::new(25.0 / 16.0, 0.0)
    };
    let g1 = g.clone();
    let g2 = g.clone();
    ComplexPotential::new(
        Arc::new(move |x| Ok(value(g1.eval(x)?).re)),
        Arc::new(move |x| Ok(value(g2.eval(x)?).im)),
        VarTag::X,
        domain,
    )
}
