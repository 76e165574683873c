//! Symbolic differentiation of the AST.
//!
//! Mass profiles built from generator families need two derivatives of
//! expressions that already contain one derivative of the user input,
//! so a symbolic first derivative keeps the whole chain exact instead
//! of falling back to finite differences for third-order information.

use super::{BinOp, ExprNode, UnaryFn};

fn konst(v: f64) -> ExprNode {
    ExprNode::Const(v)
}

fn is_zero(e: &ExprNode) -> bool {
    matches!(e, ExprNode::Const(c) if *c == 0.0)
}

fn is_one(e: &ExprNode) -> bool {
    matches!(e, ExprNode::Const(c) if *c == 1.0)
}

fn add(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    ExprNode::binary(BinOp::Add, a, b)
}

fn sub(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return ExprNode::unary(UnaryFn::Neg, b);
    }
    ExprNode::binary(BinOp::Sub, a, b)
}

fn mul(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_zero(&a) || is_zero(&b) {
        return konst(0.0);
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    ExprNode::binary(BinOp::Mul, a, b)
}

fn div(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_zero(&a) {
        return konst(0.0);
    }
    if is_one(&b) {
        return a;
    }
    ExprNode::binary(BinOp::Div, a, b)
}

fn un(f: UnaryFn, a: ExprNode) -> ExprNode {
    ExprNode::unary(f, a)
}

pub(super) fn derivative(node: &ExprNode) -> ExprNode {
    match node {
        ExprNode::Const(_) => konst(0.0),
        ExprNode::Var => konst(1.0),
        ExprNode::Unary(f, child) => {
            let u = child.as_ref().clone();
            let du = derivative(child);
            if is_zero(&du) {
                return konst(0.0);
            }
            let outer = match f {
                UnaryFn::Neg => return ExprNode::unary(UnaryFn::Neg, du),
                UnaryFn::Exp => un(UnaryFn::Exp, u),
                UnaryFn::Ln => return div(du, u),
                UnaryFn::Sin => un(UnaryFn::Cos, u),
                UnaryFn::Cos => un(UnaryFn::Neg, un(UnaryFn::Sin, u)),
                UnaryFn::Tan => add(konst(1.0), ExprNode::pow(un(UnaryFn::Tan, u), 2.0)),
                UnaryFn::Sinh => un(UnaryFn::Cosh, u),
                UnaryFn::Cosh => un(UnaryFn::Sinh, u),
                UnaryFn::Tanh => sub(konst(1.0), ExprNode::pow(un(UnaryFn::Tanh, u), 2.0)),
                UnaryFn::Sech => un(
                    UnaryFn::Neg,
                    mul(un(UnaryFn::Sech, u.clone()), un(UnaryFn::Tanh, u)),
                ),
                UnaryFn::Arctan => {
                    return div(du, add(konst(1.0), ExprNode::pow(u, 2.0)));
                }
                UnaryFn::Sqrt => {
                    return div(du, mul(konst(2.0), un(UnaryFn::Sqrt, u)));
                }
                UnaryFn::Abs => div(u.clone(), un(UnaryFn::Abs, u)),
            };
            mul(outer, du)
        }
        ExprNode::Binary(op, left, right) => {
            let a = left.as_ref().clone();
            let b = right.as_ref().clone();
            match op {
                BinOp::Add => add(derivative(left), derivative(right)),
                BinOp::Sub => sub(derivative(left), derivative(right)),
                BinOp::Mul => add(
                    mul(derivative(left), b.clone()),
                    mul(a.clone(), derivative(right)),
                ),
                BinOp::Div => {
                    let num = sub(
                        mul(derivative(left), b.clone()),
                        mul(a, derivative(right)),
                    );
                    div(num, ExprNode::pow(b, 2.0))
                }
                BinOp::Pow => {
                    let p = match right.as_ref() {
                        ExprNode::Const(p) => *p,
                        _ => unreachable!("exponent is always a constant"),
                    };
                    if p == 0.0 {
                        return konst(0.0);
                    }
                    let du = derivative(left);
                    if p == 1.0 {
                        return du;
                    }
                    mul(mul(konst(p), ExprNode::pow(a, p - 1.0)), du)
                }
            }
        }
    }
}
