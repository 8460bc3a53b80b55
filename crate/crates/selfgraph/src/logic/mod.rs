//! First-order predicates over natural-valued variables plus the plane
//! variables x and y; a bounded-search semantic evaluator; and the compiler
//! from predicates to single equations `E = 0`.
//!
//! The compiler uses exactly the closure encodings: an atom `E = 0` stays
//! `E`; `a ≤ b` becomes `b − a − |b − a|` with `|t|` spelled `(t^2)^(1/2)`;
//! disjunction becomes a product; negation becomes `0^(E^2)`; an existential
//! becomes the infinite product `Π_v (1 − 0^(E^2))`; conjunction and
//! universals are removed by De Morgan rewriting before compilation.

mod format;

pub use format::{parse_pred, print_pred};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::eqlang::{
    eval_expr, membership_in_env, Budget, Env, EvalOutcome, Equation, Expr, Membership,
    NoPlans, ProductPlanner,
};

/// Predicate AST. Quantified variables range over the naturals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    /// `e = 0`.
    AtomEq(Expr),
    /// `a ≤ b`.
    AtomLe(Expr, Expr),
    Not(Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Exists(char, Box<Pred>),
    Forall(char, Box<Pred>),
}

impl Pred {
    pub fn eq0(e: Expr) -> Pred {
        Pred::AtomEq(e)
    }

    /// `a = b` as the atom `a − b = 0`.
    pub fn eq(a: Expr, b: Expr) -> Pred {
        Pred::AtomEq(Expr::sub(a, b))
    }

    pub fn le(a: Expr, b: Expr) -> Pred {
        Pred::AtomLe(a, b)
    }

    pub fn not(p: Pred) -> Pred {
        Pred::Not(Box::new(p))
    }

    pub fn or(p: Pred, q: Pred) -> Pred {
        Pred::Or(Box::new(p), Box::new(q))
    }

    pub fn and(p: Pred, q: Pred) -> Pred {
        Pred::And(Box::new(p), Box::new(q))
    }

    pub fn exists(v: char, p: Pred) -> Pred {
        Pred::Exists(v, Box::new(p))
    }

    pub fn forall(v: char, p: Pred) -> Pred {
        Pred::Forall(v, Box::new(p))
    }

    /// Conjunction of a nonempty list, right-nested.
    pub fn and_all(mut ps: Vec<Pred>) -> Pred {
        let last = ps.pop().expect("conjunction of empty list");
        ps.into_iter().rev().fold(last, |acc, p| Pred::and(p, acc))
    }

    /// Disjunction of a nonempty list, right-nested.
    pub fn or_all(mut ps: Vec<Pred>) -> Pred {
        let last = ps.pop().expect("disjunction of empty list");
        ps.into_iter().rev().fold(last, |acc, p| Pred::or(p, acc))
    }

    pub fn node_count(&self) -> usize {
        match self {
            Pred::AtomEq(_) | Pred::AtomLe(_, _) => 1,
            Pred::Not(p) | Pred::Exists(_, p) | Pred::Forall(_, p) => 1 + p.node_count(),
            Pred::Or(p, q) | Pred::And(p, q) => 1 + p.node_count() + q.node_count(),
        }
    }

    /// Check the binding discipline: quantified variables are never x or y
    /// and no variable is bound twice on any root-to-leaf path.
    pub fn validate(&self) -> Result<(), String> {
        fn walk(p: &Pred, bound: &mut Vec<char>) -> Result<(), String> {
            match p {
                Pred::AtomEq(_) | Pred::AtomLe(_, _) => Ok(()),
                Pred::Not(q) => walk(q, bound),
                Pred::Or(a, b) | Pred::And(a, b) => {
                    walk(a, bound)?;
                    walk(b, bound)
                }
                Pred::Exists(v, q) | Pred::Forall(v, q) => {
                    if *v == 'x' || *v == 'y' {
                        return Err(format!("variable {v} may not be quantified"));
                    }
                    if bound.contains(v) {
                        return Err(format!("variable {v} bound twice on a path"));
                    }
                    bound.push(*v);
                    let r = walk(q, bound);
                    bound.pop();
                    r
                }
            }
        }
        walk(self, &mut Vec::new())
    }
}

/// Rewrite And and Forall away: `p ∧ q` to `¬(¬p ∨ ¬q)` and `∀v p` to
/// `¬∃v ¬p`.
pub fn demorganize(p: &Pred) -> Pred {
    match p {
        Pred::AtomEq(_) | Pred::AtomLe(_, _) => p.clone(),
        Pred::Not(q) => Pred::not(demorganize(q)),
        Pred::Or(a, b) => Pred::or(demorganize(a), demorganize(b)),
        Pred::And(a, b) => Pred::not(Pred::or(
            Pred::not(demorganize(a)),
            Pred::not(demorganize(b)),
        )),
        Pred::Exists(v, q) => Pred::exists(*v, demorganize(q)),
        Pred::Forall(v, q) => Pred::not(Pred::exists(*v, Pred::not(demorganize(q)))),
    }
}

/// Compile a predicate to an expression `E` such that the predicate holds
/// iff `E = 0`.
pub fn compile(p: &Pred) -> Expr {
    compile_demorganized(&demorganize(p))
}

fn compile_demorganized(p: &Pred) -> Expr {
    match p {
        Pred::AtomEq(e) => e.clone(),
        Pred::AtomLe(a, b) => {
            // b − a − |b − a|, zero exactly when a ≤ b.
            let diff = Expr::sub(b.clone(), a.clone());
            Expr::sub(diff.clone(), Expr::abs(diff))
        }
        Pred::Or(a, b) => Expr::mul(compile_demorganized(a), compile_demorganized(b)),
        Pred::Not(q) => Expr::zero_pow_sq(compile_demorganized(q)),
        Pred::Exists(v, q) => Expr::prod(
            *v,
            Expr::sub(
                Expr::lit(1u32),
                Expr::zero_pow_sq(compile_demorganized(q)),
            ),
        ),
        Pred::And(_, _) | Pred::Forall(_, _) => {
            unreachable!("And/Forall removed by the De Morgan pre-pass")
        }
    }
}

/// Three-valued truth. Unknown carries a reason for reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown(String),
}

impl Truth {
    pub fn negate(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            u => u,
        }
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, Truth::Unknown(_))
    }
}

/// How to search one quantifier during semantic evaluation.
#[derive(Debug, Clone)]
pub enum QuantPlan {
    /// Search 0..=bound exhaustively; outside the range nothing is claimed,
    /// so an unwitnessed existential is Unknown, not False.
    Range(BigUint),
    /// Like Range but exhaustive over the naturals by external knowledge:
    /// failure to find a witness refutes the quantifier. The justification
    /// records why values above the bound cannot matter.
    RangeComplete { bound: BigUint, justification: String },
    /// Check only the listed values. Finding a witness (for Exists) or a
    /// counterexample (for Forall) decides; otherwise Unknown.
    Witnesses(Vec<BigUint>),
    /// The planner asserts the quantifier's truth outright, with optional
    /// witness (verified when present) and spot-check values whose expected
    /// body truth is verified. Used where witnesses are too large to
    /// enumerate or materialize; the justification names the certificate.
    Decided {
        truth: bool,
        witness: Option<BigUint>,
        spot_falsities: Vec<BigUint>,
        justification: String,
    },
}

/// Supplies quantifier plans, keyed by the path from the root of the
/// predicate (child indices) and the bound variable.
pub trait QuantPlanner {
    fn plan(&self, path: &[u32], var: char, env: &Env) -> QuantPlan;
}

/// Uniform bounded search for every quantifier.
pub struct UniformBound(pub BigUint);

impl QuantPlanner for UniformBound {
    fn plan(&self, _path: &[u32], _var: char, _env: &Env) -> QuantPlan {
        QuantPlan::Range(self.0.clone())
    }
}

/// Evaluate a predicate under classical semantics with bounded quantifier
/// search: Exists over 0..=B is True on a witness and Unknown when none is
/// found (absent stronger plans); Forall dually. Atoms are evaluated exactly.
pub fn eval_pred(p: &Pred, env: &Env, bound: &BigUint, budget: &Budget) -> Truth {
    eval_pred_planned(p, env, &UniformBound(bound.clone()), budget)
}

pub fn eval_pred_planned(
    p: &Pred,
    env: &Env,
    planner: &dyn QuantPlanner,
    budget: &Budget,
) -> Truth {
    let mut path = Vec::new();
    eval_at(p, env, planner, budget, &mut path)
}

fn eval_at(
    p: &Pred,
    env: &Env,
    planner: &dyn QuantPlanner,
    budget: &Budget,
    path: &mut Vec<u32>,
) -> Truth {
    match p {
        Pred::AtomEq(e) => match eval_expr(e, env, budget, &NoPlans) {
            EvalOutcome::Exact(v) => {
                if v.is_zero() {
                    Truth::True
                } else {
                    Truth::False
                }
            }
            EvalOutcome::Undefined(r) => Truth::Unknown(format!("atom undefined: {r}")),
            EvalOutcome::Unknown(r) => Truth::Unknown(r),
        },
        Pred::AtomLe(a, b) => {
            let av = eval_expr(a, env, budget, &NoPlans);
            let bv = eval_expr(b, env, budget, &NoPlans);
            match (av, bv) {
                (EvalOutcome::Exact(x), EvalOutcome::Exact(y)) => {
                    if x <= y {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
                (EvalOutcome::Undefined(r), _) | (_, EvalOutcome::Undefined(r)) => {
                    Truth::Unknown(format!("atom undefined: {r}"))
                }
                (EvalOutcome::Unknown(r), _) | (_, EvalOutcome::Unknown(r)) => Truth::Unknown(r),
            }
        }
        Pred::Not(q) => {
            path.push(0);
            let t = eval_at(q, env, planner, budget, path);
            path.pop();
            t.negate()
        }
        Pred::And(a, b) => {
            path.push(0);
            let ta = eval_at(a, env, planner, budget, path);
            path.pop();
            if ta == Truth::False {
                return Truth::False;
            }
            path.push(1);
            let tb = eval_at(b, env, planner, budget, path);
            path.pop();
            match (ta, tb) {
                (Truth::False, _) | (_, Truth::False) => Truth::False,
                (Truth::True, Truth::True) => Truth::True,
                (Truth::Unknown(r), _) | (_, Truth::Unknown(r)) => Truth::Unknown(r),
            }
        }
        Pred::Or(a, b) => {
            path.push(0);
            let ta = eval_at(a, env, planner, budget, path);
            path.pop();
            if ta == Truth::True {
                return Truth::True;
            }
            path.push(1);
            let tb = eval_at(b, env, planner, budget, path);
            path.pop();
            match (ta, tb) {
                (Truth::True, _) | (_, Truth::True) => Truth::True,
                (Truth::False, Truth::False) => Truth::False,
                (Truth::Unknown(r), _) | (_, Truth::Unknown(r)) => Truth::Unknown(r),
            }
        }
        Pred::Exists(v, q) => eval_quant(*v, q, false, env, planner, budget, path),
        Pred::Forall(v, q) => eval_quant(*v, q, true, env, planner, budget, path),
    }
}

fn eval_quant(
    var: char,
    body: &Pred,
    universal: bool,
    env: &Env,
    planner: &dyn QuantPlanner,
    budget: &Budget,
    path: &mut Vec<u32>,
) -> Truth {
    let plan = planner.plan(path, var, env);
    let body_at = |value: &BigUint, path: &mut Vec<u32>| -> Truth {
        let mut inner = env.clone();
        inner.insert(
            var,
            BigRational::from_integer(BigInt::from(value.clone())),
        );
        path.push(0);
        let t = eval_at(body, &inner, planner, budget, path);
        path.pop();
        t
    };
    // For Forall, a value deciding the quantifier is one where the body is
    // False; for Exists, one where it is True.
    let deciding = |t: &Truth| -> bool {
        matches!(
            (universal, t),
            (true, Truth::False) | (false, Truth::True)
        )
    };
    let decided_value = |universal: bool| {
        if universal {
            Truth::False
        } else {
            Truth::True
        }
    };

    let range_search = |bound: &BigUint, complete: bool, path: &mut Vec<u32>| -> Truth {
        let mut v = BigUint::zero();
        let mut saw_unknown = false;
        while v <= *bound {
            let t = body_at(&v, path);
            if deciding(&t) {
                return decided_value(universal);
            }
            if let Truth::Unknown(_) = t {
                saw_unknown = true;
            }
            v += 1u32;
        }
        if saw_unknown {
            Truth::Unknown(format!("undecided body values for {var} within 0..={bound}"))
        } else if complete {
            decided_value(universal).negate()
        } else {
            Truth::Unknown(format!(
                "no {} for {var} within 0..={bound}",
                if universal { "counterexample" } else { "witness" }
            ))
        }
    };

    match plan {
        QuantPlan::Range(bound) => range_search(&bound, false, path),
        QuantPlan::RangeComplete { bound, .. } => range_search(&bound, true, path),
        QuantPlan::Witnesses(ws) => {
            for w in &ws {
                let t = body_at(w, path);
                if deciding(&t) {
                    return decided_value(universal);
                }
            }
            Truth::Unknown(format!(
                "no deciding value among {} candidates for {var}",
                ws.len()
            ))
        }
        QuantPlan::Decided {
            truth,
            witness,
            spot_falsities,
            justification,
        } => {
            // An asserted witness must verify: for Exists decided True the
            // body must hold there, for Forall decided False it must fail.
            if let Some(w) = &witness {
                let t = body_at(w, path);
                let ok = if universal {
                    !truth && t == Truth::False
                } else {
                    truth && t == Truth::True
                };
                if !ok {
                    return Truth::Unknown(format!(
                        "certificate violated: witness {w} for {var} gave {t:?} ({justification})"
                    ));
                }
            }
            // For a refutation certificate (Exists decided False, Forall
            // decided True), spot values must not decide the quantifier the
            // other way.
            if truth == universal {
                for s in &spot_falsities {
                    let t = body_at(s, path);
                    if deciding(&t) {
                        return Truth::Unknown(format!(
                            "certificate violated: spot value {s} for {var} decided the \
                             quantifier against the certificate ({justification})"
                        ));
                    }
                }
            }
            if truth {
                Truth::True
            } else {
                Truth::False
            }
        }
    }
}

/// Outcome of comparing the semantic evaluator against the compiled
/// equation's membership at one environment.
#[derive(Debug, Clone)]
pub struct Agreement {
    pub semantic: Truth,
    pub literal: Membership,
    /// Some(false) is a hard mismatch between two decided verdicts.
    pub consistent: Option<bool>,
}

/// Evaluate the predicate semantically and its compiled equation literally
/// under the same environment; flag any decided disagreement.
pub fn agreement_check(
    p: &Pred,
    env: &Env,
    bound: &BigUint,
    budget: &Budget,
    planner: &dyn ProductPlanner,
) -> Agreement {
    let semantic = eval_pred(p, env, bound, budget);
    let compiled = compile(p);
    let literal = membership_in_env(&Equation::equals_zero(compiled), env, budget, planner);
    let consistent = match (&semantic, &literal) {
        (Truth::True, Membership::In) => Some(true),
        (Truth::False, Membership::Out { .. }) => Some(true),
        (Truth::True, Membership::Out { .. }) | (Truth::False, Membership::In) => Some(false),
        _ => None,
    };
    Agreement {
        semantic,
        literal,
        consistent,
    }
}

/// Check the compiled-product factor invariant directly: for Not and Exists
/// nodes the inner `0^(E^2)` is exactly 0 or 1 whenever `E` is exact.
pub fn indicator_is_boolean(e: &Expr, env: &Env, budget: &Budget) -> Option<bool> {
    match eval_expr(&Expr::zero_pow_sq(e.clone()), env, budget, &NoPlans) {
        EvalOutcome::Exact(v) => Some(v.is_zero() || v.is_one()),
        _ => None,
    }
}

/// Positive-part helper used throughout the arithmetization: truncated
/// subtraction `max(a − b, 0)` as an expression, `((a−b) + |a−b|) / 2`.
pub fn monus_expr(a: Expr, b: Expr) -> Expr {
    let diff = Expr::sub(a, b);
    Expr::div(
        Expr::add(diff.clone(), Expr::abs(diff)),
        Expr::lit(2u32),
    )
}

/// Shorthand used by tests and the arithmetization: is the rational an
/// integer ≥ 0?
pub fn is_natural(v: &BigRational) -> bool {
    v.is_integer() && !v.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn env(pairs: &[(char, i64)]) -> Env {
        pairs
            .iter()
            .map(|&(c, v)| (c, BigRational::from_i64(v).unwrap()))
            .collect()
    }

    fn b20() -> BigUint {
        BigUint::from(20u32)
    }

    #[test]
    fn compile_atom_eq_is_identity() {
        let p = Pred::eq(Expr::var('d'), Expr::lit(50u32));
        assert_eq!(compile(&p).serialize(), "(d−50)");
    }

    #[test]
    fn compile_or_is_product() {
        let p = Pred::or(
            Pred::eq0(Expr::var('u')),
            Pred::eq0(Expr::var('v')),
        );
        assert_eq!(compile(&p).serialize(), "(u·v)");
    }

    #[test]
    fn compile_not_is_zero_pow_square() {
        let p = Pred::not(Pred::eq0(Expr::var('u')));
        assert_eq!(compile(&p).serialize(), "(0^(u^2))");
    }

    #[test]
    fn compile_exists_is_product_of_indicators() {
        let p = Pred::exists('v', Pred::eq0(Expr::var('v')));
        assert_eq!(compile(&p).serialize(), "Π_(v=0)^∞(1−(0^(v^2)))");
    }

    #[test]
    fn compile_le_uses_absolute_value_idiom() {
        let p = Pred::le(Expr::var('a'), Expr::var('b'));
        assert_eq!(
            compile(&p).serialize(),
            "((b−a)−(((b−a)^2)^(1/2)))"
        );
    }

    #[test]
    fn compile_is_compositional() {
        let inner = Pred::eq0(Expr::var('v'));
        let outer = Pred::exists('v', inner.clone());
        let inner_c = compile(&inner).serialize();
        let outer_c = compile(&outer).serialize();
        assert!(outer_c.contains(&inner_c));
    }

    #[test]
    fn compiled_uses_only_alphabet_and_reparses() {
        let p = Pred::and(
            Pred::le(Expr::div(Expr::var('e'), Expr::lit(100u32)), Expr::var('y')),
            Pred::exists('v', Pred::eq(Expr::var('v'), Expr::lit(3u32))),
        );
        let text = Equation::equals_zero(compile(&p)).serialize();
        assert!(crate::glyphs::Symbol::parse_str(&text).is_ok());
        let eq = crate::eqlang::parse_equation(&text).unwrap();
        assert_eq!(eq.serialize(), text);
    }

    #[test]
    fn eval_trivial_identity() {
        assert_eq!(
            eval_pred(&Pred::eq0(Expr::lit(0u32)), &Env::new(), &b20(), &Budget::default()),
            Truth::True
        );
    }

    #[test]
    fn eval_exists_direct_witness() {
        let p = Pred::exists('v', Pred::eq(Expr::var('v'), Expr::lit(3u32)));
        assert_eq!(
            eval_pred(&p, &Env::new(), &BigUint::from(10u32), &Budget::default()),
            Truth::True
        );
    }

    #[test]
    fn eval_not_exists_within_bound_is_unknown_without_completeness() {
        // Honest tri-state: within bound 10 there is a witness for v = 3, so
        // the negation is False; for v = 30 the search is inconclusive.
        let p3 = Pred::not(Pred::exists('v', Pred::eq(Expr::var('v'), Expr::lit(3u32))));
        assert_eq!(
            eval_pred(&p3, &Env::new(), &BigUint::from(10u32), &Budget::default()),
            Truth::False
        );
        let p30 = Pred::not(Pred::exists('v', Pred::eq(Expr::var('v'), Expr::lit(30u32))));
        assert!(matches!(
            eval_pred(&p30, &Env::new(), &BigUint::from(10u32), &Budget::default()),
            Truth::Unknown(_)
        ));
    }

    #[test]
    fn forall_counterexample_refutes() {
        let p = Pred::forall('v', Pred::eq(Expr::var('v'), Expr::lit(0u32)));
        assert_eq!(
            eval_pred(&p, &Env::new(), &b20(), &Budget::default()),
            Truth::False
        );
    }

    #[test]
    fn demorgan_preserves_semantics_on_samples() {
        let preds = [
            Pred::and(
                Pred::le(Expr::lit(1u32), Expr::var('u')),
                Pred::eq(Expr::var('u'), Expr::lit(5u32)),
            ),
            Pred::forall(
                'v',
                Pred::or(
                    Pred::le(Expr::var('v'), Expr::lit(100u32)),
                    Pred::eq0(Expr::lit(1u32)),
                ),
            ),
            Pred::not(Pred::and(
                Pred::eq0(Expr::var('u')),
                Pred::not(Pred::eq0(Expr::var('u'))),
            )),
        ];
        for p in &preds {
            for uval in 0..6 {
                let e = env(&[('u', uval)]);
                let a = eval_pred(p, &e, &b20(), &Budget::default());
                let b = eval_pred(&demorganize(p), &e, &b20(), &Budget::default());
                if a.is_decided() && b.is_decided() {
                    assert_eq!(a, b, "mismatch on {p:?} at u={uval}");
                }
            }
        }
    }

    #[test]
    fn agreement_on_atoms() {
        // d = 50 with env d = 50: both sides decide True/In.
        let p = Pred::eq(Expr::var('d'), Expr::lit(50u32));
        let a = agreement_check(&p, &env(&[('d', 50)]), &b20(), &Budget::default(), &NoPlans);
        assert_eq!(a.consistent, Some(true));
        assert_eq!(a.semantic, Truth::True);

        // e/100 ≤ y at e = 0, y = −1: both sides decide False/Out.
        let p = Pred::le(
            Expr::div(Expr::var('e'), Expr::lit(100u32)),
            Expr::var('y'),
        );
        let a = agreement_check(&p, &env(&[('e', 0), ('y', -1)]), &b20(), &Budget::default(), &NoPlans);
        assert_eq!(a.semantic, Truth::False);
        assert_eq!(a.consistent, Some(true));
    }

    #[test]
    fn validate_rejects_rebinding_and_plane_vars() {
        let p = Pred::exists('v', Pred::exists('v', Pred::eq0(Expr::var('v'))));
        assert!(p.validate().is_err());
        let p = Pred::exists('x', Pred::eq0(Expr::var('x')));
        assert!(p.validate().is_err());
        // Sibling scopes may reuse a letter.
        let p = Pred::and(
            Pred::exists('v', Pred::eq0(Expr::var('v'))),
            Pred::exists('v', Pred::eq0(Expr::var('v'))),
        );
        assert!(p.validate().is_ok());
    }

    #[test]
    fn monus_matches_truncated_subtraction() {
        for (a, b) in [(7i64, 3i64), (3, 7), (5, 5), (0, 2)] {
            let e = monus_expr(Expr::lit(a as u32), Expr::lit(b as u32));
            let out = eval_expr(&e, &Env::new(), &Budget::default(), &NoPlans);
            let expect = BigRational::from_i64((a - b).max(0)).unwrap();
            assert_eq!(out, EvalOutcome::Exact(expect));
        }
    }
}
