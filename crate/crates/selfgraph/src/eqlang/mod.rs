//! The equation language over the 47-symbol alphabet: expression and
//! equation ASTs, a deterministic parser and canonical serializer, and an
//! exact rational evaluator that gives equations their graph semantics,
//! including infinite products and the 0^0 = 1 convention.

mod eval;
mod graph;
mod parse;

pub use eval::{
    eval_expr, Budget, Env, EvalOutcome, NoPlans, ProductPlan, ProductPlanner, Stabilization,
};
pub use graph::{gr, graph_membership, membership_in_env, GrOutput, Membership, ERROR_STRING};
pub use parse::{parse_equation, parse_expr, Invalid};

use num_bigint::BigUint;
use std::collections::BTreeSet;
use std::fmt;

/// Binary operators of the language: plus, times, minus, division,
/// exponentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Mul,
    Sub,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Mul => '·',
            BinOp::Sub => '−',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Expression over the alphabet: single-letter variables, decimal literals,
/// binary nodes, and the infinite product with fixed bounds 0 and ∞.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(char),
    Lit(BigUint),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// `Π_(v=0)^∞(body)`.
    Prod { var: char, body: Box<Expr> },
}

impl Expr {
    pub fn var(c: char) -> Expr {
        Expr::Var(c)
    }

    pub fn lit<T: Into<BigUint>>(v: T) -> Expr {
        Expr::Lit(v.into())
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Add, l, r)
    }

    pub fn mul(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Mul, l, r)
    }

    pub fn sub(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Sub, l, r)
    }

    pub fn div(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Div, l, r)
    }

    pub fn pow(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Pow, l, r)
    }

    pub fn square(e: Expr) -> Expr {
        Expr::pow(e, Expr::lit(2u32))
    }

    /// `|e|` spelled with alphabet symbols: `(e^2)^(1/2)`.
    pub fn abs(e: Expr) -> Expr {
        Expr::pow(
            Expr::square(e),
            Expr::div(Expr::lit(1u32), Expr::lit(2u32)),
        )
    }

    /// `0^(e^2)`: 1 when e = 0, 0 otherwise (given e evaluates exactly).
    pub fn zero_pow_sq(e: Expr) -> Expr {
        Expr::pow(Expr::lit(0u32), Expr::square(e))
    }

    pub fn prod(var: char, body: Expr) -> Expr {
        Expr::Prod {
            var,
            body: Box::new(body),
        }
    }

    /// Sum of a nonempty list, left-associated.
    pub fn sum_of(terms: Vec<Expr>) -> Expr {
        let mut it = terms.into_iter();
        let first = it.next().expect("sum of empty list");
        it.fold(first, Expr::add)
    }

    /// Product (·) of a nonempty list, left-associated.
    pub fn product_of(factors: Vec<Expr>) -> Expr {
        let mut it = factors.into_iter();
        let first = it.next().expect("product of empty list");
        it.fold(first, Expr::mul)
    }

    pub fn free_vars(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<char>, out: &mut BTreeSet<char>) {
        match self {
            Expr::Var(c) => {
                if !bound.contains(c) {
                    out.insert(*c);
                }
            }
            Expr::Lit(_) => {}
            Expr::Bin(_, l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Expr::Prod { var, body } => {
                let fresh = bound.insert(*var);
                body.collect_free(bound, out);
                if fresh {
                    bound.remove(var);
                }
            }
        }
    }

    /// Replace every free occurrence of `var` with `replacement`. Quantified
    /// occurrences are untouched.
    pub fn substitute(&self, var: char, replacement: &Expr) -> Expr {
        match self {
            Expr::Var(c) if *c == var => replacement.clone(),
            Expr::Var(_) | Expr::Lit(_) => self.clone(),
            Expr::Bin(op, l, r) => Expr::bin(
                *op,
                l.substitute(var, replacement),
                r.substitute(var, replacement),
            ),
            Expr::Prod { var: v, body } => {
                if *v == var {
                    self.clone()
                } else {
                    Expr::prod(*v, body.substitute(var, replacement))
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Lit(_) => 1,
            Expr::Bin(_, l, r) => 1 + l.node_count() + r.node_count(),
            Expr::Prod { body, .. } => 1 + body.node_count(),
        }
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            Expr::Var(c) => out.push(*c),
            Expr::Lit(v) => out.push_str(&v.to_string()),
            Expr::Bin(op, l, r) => {
                out.push('(');
                l.write_canonical(out);
                out.push(op.symbol());
                r.write_canonical(out);
                out.push(')');
            }
            Expr::Prod { var, body } => {
                out.push('Π');
                out.push('_');
                out.push('(');
                out.push(*var);
                out.push_str("=0)^∞");
                // The product's body parentheses: binary bodies already carry
                // their own outer pair.
                if matches!(**body, Expr::Bin(..)) {
                    body.write_canonical(out);
                } else {
                    out.push('(');
                    body.write_canonical(out);
                    out.push(')');
                }
            }
        }
    }

    /// Canonical fully parenthesized form over the 47 symbols.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

/// An equation `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Equation {
    pub fn new(lhs: Expr, rhs: Expr) -> Equation {
        Equation { lhs, rhs }
    }

    /// `E = 0` for a compiled expression.
    pub fn equals_zero(lhs: Expr) -> Equation {
        Equation::new(lhs, Expr::lit(0u32))
    }

    pub fn serialize(&self) -> String {
        format!("{}={}", self.lhs.serialize(), self.rhs.serialize())
    }

    pub fn free_vars(&self) -> BTreeSet<char> {
        let mut vars = self.lhs.free_vars();
        vars.extend(self.rhs.free_vars());
        vars
    }

    /// `lhs - rhs`, the expression whose zero set is the graph.
    pub fn defect(&self) -> Expr {
        Expr::sub(self.lhs.clone(), self.rhs.clone())
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}
