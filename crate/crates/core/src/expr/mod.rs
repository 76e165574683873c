//! One-variable analytic expressions with exact first and second
//! derivatives through second-order forward-mode duals.
//!
//! The AST is immutable after construction and evaluation is pure, so
//! expressions can be shared freely across threads.

mod deriv;
mod dual;
mod parse;

pub use dual::Dual2;
pub use parse::ParseError;

use std::fmt;
use thiserror::Error;

/// Built-in unary functions.
///
/// `Sech` is first-class so that generating functions read the way they
/// are usually written; it lowers to `1/cosh` during evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryFn {
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sech,
    Arctan,
    Sqrt,
    Abs,
}

impl UnaryFn {
    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Neg => "-",
            UnaryFn::Exp => "exp",
            UnaryFn::Ln => "ln",
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Tan => "tan",
            UnaryFn::Sinh => "sinh",
            UnaryFn::Cosh => "cosh",
            UnaryFn::Tanh => "tanh",
            UnaryFn::Sech => "sech",
            UnaryFn::Arctan => "arctan",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<UnaryFn> {
        Some(match name {
            "exp" => UnaryFn::Exp,
            "ln" => UnaryFn::Ln,
            "sin" => UnaryFn::Sin,
            "cos" => UnaryFn::Cos,
            "tan" => UnaryFn::Tan,
            "sinh" => UnaryFn::Sinh,
            "cosh" => UnaryFn::Cosh,
            "tanh" => UnaryFn::Tanh,
            "sech" => UnaryFn::Sech,
            "arctan" | "atan" => UnaryFn::Arctan,
            "sqrt" => UnaryFn::Sqrt,
            "abs" => UnaryFn::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

/// Expression tree over one variable.
///
/// Invariant: the exponent of `Pow` is always a `Const` node; the parser
/// enforces this and programmatic constructors must respect it.
#[derive(Clone, Debug)]
pub enum ExprNode {
    Const(f64),
    Var,
    Unary(UnaryFn, Box<ExprNode>),
    Binary(BinOp, Box<ExprNode>, Box<ExprNode>),
}

// Structural identity; constants compare bitwise so that printing and
// re-parsing round-trips to an identical tree.
impl PartialEq for ExprNode {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ExprNode::Const(a), ExprNode::Const(b)) => a.to_bits() == b.to_bits(),
            (ExprNode::Var, ExprNode::Var) => true,
            (ExprNode::Unary(f, a), ExprNode::Unary(g, b)) => f == g && a == b,
            (ExprNode::Binary(o, a, b), ExprNode::Binary(p, c, d)) => o == p && a == c && b == d,
            _ => false,
        }
    }
}

impl Eq for ExprNode {}

impl ExprNode {
    pub fn constant(v: f64) -> ExprNode {
        ExprNode::Const(v)
    }

    pub fn var() -> ExprNode {
        ExprNode::Var
    }

    pub fn unary(f: UnaryFn, child: ExprNode) -> ExprNode {
        ExprNode::Unary(f, Box::new(child))
    }

    pub fn binary(op: BinOp, left: ExprNode, right: ExprNode) -> ExprNode {
        ExprNode::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn pow(base: ExprNode, exponent: f64) -> ExprNode {
        ExprNode::binary(BinOp::Pow, base, ExprNode::Const(exponent))
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprNode::Const(_) | ExprNode::Var => 5,
            ExprNode::Unary(UnaryFn::Neg, _) => 3,
            ExprNode::Unary(..) => 5,
            ExprNode::Binary(op, ..) => op.precedence(),
        }
    }

    fn write(&self, out: &mut String, var: &str) {
        match self {
            ExprNode::Const(v) => {
                out.push_str(&format!("{v}"));
            }
            ExprNode::Var => out.push_str(var),
            ExprNode::Unary(UnaryFn::Neg, child) => {
                out.push('-');
                // unary minus binds tighter than * and / but looser than ^
                if child.precedence() < 3 {
                    out.push('(');
                    child.write(out, var);
                    out.push(')');
                } else {
                    child.write(out, var);
                }
            }
            ExprNode::Unary(f, child) => {
                out.push_str(f.name());
                out.push('(');
                child.write(out, var);
                out.push(')');
            }
            ExprNode::Binary(BinOp::Pow, base, exponent) => {
                if base.precedence() < 5 {
                    out.push('(');
                    base.write(out, var);
                    out.push(')');
                } else {
                    base.write(out, var);
                }
                out.push('^');
                // exponent is a constant; a leading minus is legal there
                exponent.write(out, var);
            }
            ExprNode::Binary(op, left, right) => {
                let p = op.precedence();
                if left.precedence() < p {
                    out.push('(');
                    left.write(out, var);
                    out.push(')');
                } else {
                    left.write(out, var);
                }
                out.push_str(op.symbol());
                // right child at equal precedence is parenthesized even
                // for + and * so the re-parsed tree keeps its shape
                let rp = right.precedence();
                let need = rp <= p;
                if need {
                    out.push('(');
                    right.write(out, var);
                    out.push(')');
                } else {
                    right.write(out, var);
                }
            }
        }
    }
}

/// Error raised when an expression is evaluated outside its natural
/// domain (division by zero, `ln` of a non-positive value, ...).
#[derive(Clone, Debug, Error, PartialEq)]
#[error("domain error in `{expr}` at {at}: {reason}")]
pub struct DomainError {
    /// The offending subexpression, printed with the declared variable.
    pub expr: String,
    pub at: f64,
    pub reason: String,
}

/// A parsed expression together with the name of its variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    root: ExprNode,
    var: String,
}

impl Expr {
    /// Parses `text` against the expression grammar, with `var` as the
    /// single allowed variable name.
    pub fn parse(text: &str, var: &str) -> Result<Expr, ParseError> {
        let root = parse::parse(text, var)?;
        Ok(Expr {
            root,
            var: var.to_owned(),
        })
    }

    pub fn from_node(root: ExprNode, var: &str) -> Expr {
        Expr {
            root,
            var: var.to_owned(),
        }
    }

    pub fn root(&self) -> &ExprNode {
        &self.root
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// Value, first and second derivative at `x`.
    pub fn eval_d2(&self, x: f64) -> Result<Dual2, DomainError> {
        dual::eval(&self.root, &self.var, x)
    }

    /// Value only.
    pub fn eval(&self, x: f64) -> Result<f64, DomainError> {
        Ok(self.eval_d2(x)?.v)
    }

    /// Exact symbolic derivative (no simplification beyond obvious
    /// constant folding).
    pub fn derivative(&self) -> Expr {
        Expr {
            root: deriv::derivative(&self.root),
            var: self.var.clone(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.root.write(&mut out, &self.var);
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Expr {
        Expr::parse(text, "q").unwrap()
    }

    #[test]
    fn parse_single_function() {
        assert_eq!(
            p("sech(q)").root(),
            &ExprNode::unary(UnaryFn::Sech, ExprNode::Var)
        );
    }

    #[test]
    fn parse_precedence_forced_shape() {
        let e = Expr::parse("x^2+1", "x").unwrap();
        assert_eq!(
            e.root(),
            &ExprNode::binary(
                BinOp::Add,
                ExprNode::pow(ExprNode::Var, 2.0),
                ExprNode::Const(1.0)
            )
        );
    }

    #[test]
    fn parse_periodic_generator() {
        // -4/(3*cos(q)^2-4)-5/4 evaluates to 2.75 at q = 0
        let e = p("-4/(3*cos(q)^2-4)-5/4");
        let d = e.eval_d2(0.0).unwrap();
        assert!((d.v - 2.75).abs() < 1e-15);
    }

    #[test]
    fn eval_examples() {
        let d = p("sech(q)").eval_d2(0.0).unwrap();
        assert!((d.v - 1.0).abs() < 1e-15);
        assert!(d.d1.abs() < 1e-15);
        assert!((d.d2 + 1.0).abs() < 1e-15);

        let d = Expr::parse("x^2+1", "x").unwrap().eval_d2(1.0).unwrap();
        assert_eq!((d.v, d.d1, d.d2), (2.0, 2.0, 2.0));

        let d = Expr::parse("arctan(x)", "x").unwrap().eval_d2(1.0).unwrap();
        assert!((d.v - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((d.d1 - 0.5).abs() < 1e-15);
        assert!((d.d2 + 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_exponent() {
        let e = Expr::parse("(1+x^2)^-2", "x").unwrap();
        let d = e.eval_d2(1.0).unwrap();
        assert!((d.v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn unary_minus_binds_looser_than_pow() {
        // -x^2 is -(x^2), not (-x)^2
        let e = Expr::parse("-x^2", "x").unwrap();
        assert!((e.eval(3.0).unwrap() + 9.0).abs() < 1e-15);
    }

    #[test]
    fn constants_pi_e() {
        assert!((p("pi").eval(0.0).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert!((p("e").eval(0.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(p("ln(q)").eval_d2(-1.0).is_err());
        assert!(p("sqrt(q)").eval_d2(-4.0).is_err());
        assert!(p("1/q").eval_d2(0.0).is_err());
        let err = p("ln(q-2)").eval_d2(1.0).unwrap_err();
        assert!(err.expr.contains("ln"));
    }

    #[test]
    fn print_reparse_round_trip() {
        for s in [
            "sech(q)",
            "-4/(3*cos(q)^2-4)-5/4",
            "q^2+1",
            "(1+q^2)^-2",
            "q+sqrt(q^2+1)",
            "-(q+1)*exp(-q)",
            "1-2-3",
            "8/4/2",
        ] {
            let e = p(s);
            let printed = e.to_string();
            let again = Expr::parse(&printed, "q").unwrap();
            assert_eq!(e, again, "round trip failed for {s} -> {printed}");
        }
    }

    #[test]
    fn deterministic_eval() {
        let e = p("sin(q)*exp(q)/(1+q^2)");
        let a = e.eval_d2(0.7351).unwrap();
        let b = e.eval_d2(0.7351).unwrap();
        assert_eq!(a.v.to_bits(), b.v.to_bits());
        assert_eq!(a.d1.to_bits(), b.d1.to_bits());
        assert_eq!(a.d2.to_bits(), b.d2.to_bits());
    }
}
