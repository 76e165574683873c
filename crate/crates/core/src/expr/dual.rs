//! Second-order forward-mode dual numbers and the AST evaluator.

use super::{BinOp, DomainError, ExprNode, UnaryFn};

/// Value plus first and second derivative at the evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Dual2 {
    pub fn constant(v: f64) -> Dual2 {
        Dual2 { v, d1: 0.0, d2: 0.0 }
    }

    pub fn variable(x: f64) -> Dual2 {
        Dual2 { v: x, d1: 1.0, d2: 0.0 }
    }

    fn add(self, o: Dual2) -> Dual2 {
        Dual2 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }

    fn sub(self, o: Dual2) -> Dual2 {
        Dual2 {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }

    fn mul(self, o: Dual2) -> Dual2 {
        Dual2 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    /// Division; the caller checks the denominator value first.
    fn div(self, o: Dual2) -> Dual2 {
        let v = self.v / o.v;
        let d1 = (self.d1 - v * o.d1) / o.v;
        let d2 = (self.d2 - 2.0 * d1 * o.d1 - v * o.d2) / o.v;
        Dual2 { v, d1, d2 }
    }

    fn neg(self) -> Dual2 {
        Dual2 {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
        }
    }

    /// Chain rule through a scalar function given (f, f', f'') at `self.v`.
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Dual2 {
        Dual2 {
            v: f0,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
        }
    }

    fn is_finite(self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

fn render(node: &ExprNode, var: &str) -> String {
    let mut out = String::new();
    node.write(&mut out, var);
    out
}

fn fail(node: &ExprNode, var: &str, x: f64, reason: &str) -> DomainError {
    DomainError {
        expr: render(node, var),
        at: x,
        reason: reason.to_owned(),
    }
}

fn apply_unary(
    f: UnaryFn,
    u: Dual2,
    node: &ExprNode,
    var: &str,
    x: f64,
) -> Result<Dual2, DomainError> {
    let out = match f {
        UnaryFn::Neg => u.neg(),
        UnaryFn::Exp => {
            let e = u.v.exp();
            u.chain(e, e, e)
        }
        UnaryFn::Ln => {
            if u.v <= 0.0 {
                return Err(fail(node, var, x, "ln of a nonpositive value"));
            }
            u.chain(u.v.ln(), 1.0 / u.v, -1.0 / (u.v * u.v))
        }
        UnaryFn::Sin => u.chain(u.v.sin(), u.v.cos(), -u.v.sin()),
        UnaryFn::Cos => u.chain(u.v.cos(), -u.v.sin(), -u.v.cos()),
        UnaryFn::Tan => {
            let t = u.v.tan();
            let s = 1.0 + t * t;
            u.chain(t, s, 2.0 * t * s)
        }
        UnaryFn::Sinh => u.chain(u.v.sinh(), u.v.cosh(), u.v.sinh()),
        UnaryFn::Cosh => u.chain(u.v.cosh(), u.v.sinh(), u.v.cosh()),
        UnaryFn::Tanh => {
            let t = u.v.tanh();
            let s = 1.0 - t * t;
            u.chain(t, s, -2.0 * t * s)
        }
        UnaryFn::Sech => {
            let s = 1.0 / u.v.cosh();
            let t = u.v.tanh();
            u.chain(s, -s * t, s * (2.0 * t * t - 1.0))
        }
        UnaryFn::Arctan => {
            let w = 1.0 + u.v * u.v;
            u.chain(u.v.atan(), 1.0 / w, -2.0 * u.v / (w * w))
        }
        UnaryFn::Sqrt => {
            if u.v <= 0.0 {
                return Err(fail(
                    node,
                    var,
                    x,
                    "sqrt of a nonpositive value (derivative diverges at 0)",
                ));
            }
            let r = u.v.sqrt();
            u.chain(r, 0.5 / r, -0.25 / (r * u.v))
        }
        UnaryFn::Abs => {
            if u.v == 0.0 {
                return Err(fail(node, var, x, "abs is not differentiable at 0"));
            }
            let s = u.v.signum();
            u.chain(u.v.abs(), s, 0.0)
        }
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(fail(node, var, x, "nonfinite result"))
    }
}

fn apply_pow(u: Dual2, p: f64, node: &ExprNode, var: &str, x: f64) -> Result<Dual2, DomainError> {
    let integral = p.fract() == 0.0 && p.abs() < 1e15;
    if !integral && u.v <= 0.0 {
        return Err(fail(
            node,
            var,
            x,
            "non-integer power of a nonpositive base",
        ));
    }
    if u.v == 0.0 && p < 2.0 && p != 0.0 && p != 1.0 {
        return Err(fail(node, var, x, "power of zero with diverging derivative"));
    }
    let out = if p == 0.0 {
        Dual2::constant(1.0)
    } else if p == 1.0 {
        u
    } else {
        let pow = |e: f64| -> f64 {
            if integral {
                u.v.powi(e as i32)
            } else {
                u.v.powf(e)
            }
        };
        let c2 = p * (p - 1.0);
        let f2 = if c2 == 0.0 { 0.0 } else { c2 * pow(p - 2.0) };
        u.chain(pow(p), p * pow(p - 1.0), f2)
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(fail(node, var, x, "nonfinite result"))
    }
}

pub(super) fn eval(node: &ExprNode, var: &str, x: f64) -> Result<Dual2, DomainError> {
    let out = match node {
        ExprNode::Const(c) => Dual2::constant(*c),
        ExprNode::Var => Dual2::variable(x),
        ExprNode::Unary(f, child) => {
            let u = eval(child, var, x)?;
            apply_unary(*f, u, node, var, x)?
        }
        ExprNode::Binary(op, left, right) => {
            let a = eval(left, var, x)?;
            match op {
                BinOp::Add => a.add(eval(right, var, x)?),
                BinOp::Sub => a.sub(eval(right, var, x)?),
                BinOp::Mul => a.mul(eval(right, var, x)?),
                BinOp::Div => {
                    let b = eval(right, var, x)?;
                    if b.v == 0.0 {
                        return Err(fail(node, var, x, "division by zero"));
                    }
                    a.div(b)
                }
                BinOp::Pow => {
                    let p = match right.as_ref() {
                        ExprNode::Const(p) => *p,
                        _ => {
                            return Err(fail(node, var, x, "non-constant exponent"));
                        }
                    };
                    apply_pow(a, p, node, var, x)?
                }
            }
        }
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(fail(node, var, x, "nonfinite result"))
    }
}
