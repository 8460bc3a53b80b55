//! Exact evaluation of expressions over the rationals.
//!
//! Field operations are exact. `a^b` is defined when the exponent reduces to
//! `p/q` with `q` in {1, 2} and the q-th root of `a^p` is rational, when the
//! base is 0 and the exponent positive (giving 0), or when both are 0
//! (giving 1). Infinite products resolve to 0 on a zero factor within
//! budget, to the finite product under a stabilization certificate, and to
//! Unknown otherwise.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

use super::{BinOp, Expr};

/// Variable environment. Quantified naturals are stored as integer
/// rationals; the plane variables x and y may be any rationals.
pub type Env = BTreeMap<char, BigRational>;

/// Evaluation caps. Exceeding any returns `Unknown`, never a wrong value.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Total AST node visits, counting repeated product-factor visits.
    pub max_nodes: u64,
    /// Factors examined per infinite product without a certificate.
    pub max_factors: u64,
    /// Cap on the approximate bit-size of a power's result (exponent times
    /// base bit-length) when the base is not 0, 1, or -1.
    pub max_pow_bits: u64,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_nodes: 2_000_000,
            max_factors: 64,
            max_pow_bits: 1 << 30,
        }
    }
}

/// Result of exact evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    /// Fully determined exact value (square-root simplifications included).
    Exact(BigRational),
    /// Budget exhausted or an uncertified infinite product.
    Unknown(String),
    /// Domain error: division by zero, 0 to a negative power, or an
    /// irrational power.
    Undefined(String),
}

impl EvalOutcome {
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            EvalOutcome::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, EvalOutcome::Exact(v) if v.is_zero())
    }
}

/// Evidence that all factors of a product from `from` on equal 1, so the
/// finite prefix decides the product. The evaluator spot-checks a window of
/// factors at and beyond the bound.
#[derive(Debug, Clone)]
pub struct Stabilization {
    pub from: BigUint,
    pub spot_checks: u32,
    pub justification: String,
}

/// Per-product evaluation guidance: candidate witnesses where a zero factor
/// may sit, and an optional stabilization certificate.
#[derive(Debug, Clone, Default)]
pub struct ProductPlan {
    pub witnesses: Vec<BigUint>,
    pub stabilization: Option<Stabilization>,
}

/// Supplies plans for product nodes, keyed by the node's path from the root
/// (child indices: 0 = left/body, 1 = right) and the current environment.
pub trait ProductPlanner {
    fn plan(&self, path: &[u32], env: &Env) -> Option<ProductPlan>;
}

/// Planner with no plans: products resolve only by finding a zero factor.
pub struct NoPlans;

impl ProductPlanner for NoPlans {
    fn plan(&self, _path: &[u32], _env: &Env) -> Option<ProductPlan> {
        None
    }
}

struct Ctx<'a> {
    budget: &'a Budget,
    nodes_left: u64,
    planner: &'a dyn ProductPlanner,
    path: Vec<u32>,
}

/// Evaluate `e` under `env`.
pub fn eval_expr(
    e: &Expr,
    env: &Env,
    budget: &Budget,
    planner: &dyn ProductPlanner,
) -> EvalOutcome {
    let mut ctx = Ctx {
        budget,
        nodes_left: budget.max_nodes,
        planner,
        path: Vec::new(),
    };
    eval(e, env, &mut ctx)
}

fn eval(e: &Expr, env: &Env, ctx: &mut Ctx) -> EvalOutcome {
    if ctx.nodes_left == 0 {
        return EvalOutcome::Unknown("node budget exhausted".into());
    }
    ctx.nodes_left -= 1;
    match e {
        Expr::Var(c) => match env.get(c) {
            Some(v) => EvalOutcome::Exact(v.clone()),
            None => EvalOutcome::Undefined(format!("unbound variable {c}")),
        },
        Expr::Lit(v) => EvalOutcome::Exact(BigRational::from_integer(BigInt::from(v.clone()))),
        Expr::Bin(op, l, r) => {
            ctx.path.push(0);
            let lv = eval(l, env, ctx);
            ctx.path.pop();
            let lv = match lv {
                EvalOutcome::Exact(v) => v,
                other => return other,
            };
            ctx.path.push(1);
            let rv = eval(r, env, ctx);
            ctx.path.pop();
            let rv = match rv {
                EvalOutcome::Exact(v) => v,
                other => return other,
            };
            apply(*op, lv, rv, ctx)
        }
        Expr::Prod { var, body } => eval_product(*var, body, env, ctx),
    }
}

fn apply(op: BinOp, l: BigRational, r: BigRational, ctx: &Ctx) -> EvalOutcome {
    match op {
        BinOp::Add => EvalOutcome::Exact(l + r),
        BinOp::Sub => EvalOutcome::Exact(l - r),
        BinOp::Mul => EvalOutcome::Exact(l * r),
        BinOp::Div => {
            if r.is_zero() {
                EvalOutcome::Undefined("division by zero".into())
            } else {
                EvalOutcome::Exact(l / r)
            }
        }
        BinOp::Pow => pow(l, r, ctx),
    }
}

fn pow(base: BigRational, exp: BigRational, ctx: &Ctx) -> EvalOutcome {
    // exp = p / q in lowest terms with q > 0.
    let (p, q) = (exp.numer().clone(), exp.denom().clone());
    if q > BigInt::from(2) {
        return EvalOutcome::Undefined(format!("exponent {exp} outside halves"));
    }

    if base.is_zero() {
        return if p.is_positive() {
            EvalOutcome::Exact(BigRational::zero())
        } else if p.is_zero() {
            EvalOutcome::Exact(BigRational::one())
        } else {
            EvalOutcome::Undefined("0 raised to a negative power".into())
        };
    }

    // Integer power a^p of a nonzero base.
    let ip = match int_pow(&base, &p, ctx.budget.max_pow_bits) {
        Some(v) => v,
        None => return EvalOutcome::Unknown("power result size exceeds budget".into()),
    };
    if q.is_one() {
        return EvalOutcome::Exact(ip);
    }

    // Square root case: exact rational root or Undefined.
    if ip.is_negative() {
        return EvalOutcome::Undefined("square root of a negative value".into());
    }
    match (exact_sqrt(ip.numer().magnitude()), exact_sqrt(ip.denom().magnitude())) {
        (Some(n), Some(d)) => EvalOutcome::Exact(BigRational::new(BigInt::from(n), BigInt::from(d))),
        _ => EvalOutcome::Undefined("irrational square root".into()),
    }
}

fn int_pow(base: &BigRational, p: &BigInt, max_bits: u64) -> Option<BigRational> {
    let mag = p.magnitude();
    let mut result = BigRational::one();
    if base.is_one() {
        // 1^p = 1 regardless of p's size.
    } else if *base == -BigRational::one() {
        if mag.is_even() {
            // (-1)^even = 1
        } else {
            result = -result;
        }
    } else {
        let e = mag.to_u64()?;
        let base_bits = base.numer().bits().max(base.denom().bits());
        if e.checked_mul(base_bits)? > max_bits {
            return None;
        }
        let mut acc = base.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result *= &acc;
            }
            e >>= 1;
            if e > 0 {
                acc = &acc * &acc;
            }
        }
    }
    if p.sign() == Sign::Minus {
        result = result.recip();
    }
    Some(result)
}

fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Does the body have the compiled shape `1 − 0^(E^2)`? Factors of such
/// products are exactly 0 or 1 whenever they evaluate exactly.
fn is_compiled_indicator(body: &Expr) -> bool {
    match body {
        Expr::Bin(BinOp::Sub, one, pow) => {
            matches!(&**one, Expr::Lit(v) if v.is_one())
                && matches!(&**pow, Expr::Bin(BinOp::Pow, zero, sq)
                    if matches!(&**zero, Expr::Lit(z) if z.is_zero())
                    && matches!(&**sq, Expr::Bin(BinOp::Pow, _, two)
                        if matches!(&**two, Expr::Lit(t) if *t == BigUint::from(2u32))))
        }
        _ => false,
    }
}

fn eval_product(var: char, body: &Expr, env: &Env, ctx: &mut Ctx) -> EvalOutcome {
    let plan = ctx.planner.plan(&ctx.path, env);
    let boolean_body = is_compiled_indicator(body);

    let factor_at = |v: &BigUint, env: &Env, ctx: &mut Ctx| -> EvalOutcome {
        let mut inner = env.clone();
        inner.insert(var, BigRational::from_integer(BigInt::from(v.clone())));
        ctx.path.push(0);
        let out = eval(body, &inner, ctx);
        ctx.path.pop();
        if boolean_body {
            if let EvalOutcome::Exact(val) = &out {
                assert!(
                    val.is_zero() || val.is_one(),
                    "factor of a compiled 1−0^(E^2) product must be 0 or 1, got {val} at {var}={v}"
                );
            }
        }
        out
    };

    if let Some(plan) = plan {
        // Witness hunt: any exact-zero factor settles the product at 0.
        for w in &plan.witnesses {
            match factor_at(w, env, ctx) {
                EvalOutcome::Exact(v) if v.is_zero() => {
                    return EvalOutcome::Exact(BigRational::zero())
                }
                EvalOutcome::Exact(_) => {}
                EvalOutcome::Undefined(r) => return EvalOutcome::Undefined(r),
                EvalOutcome::Unknown(r) => return EvalOutcome::Unknown(r),
            }
        }
        if let Some(stab) = &plan.stabilization {
            // All factors from `stab.from` are certified 1: the product is the
            // finite prefix. Spot-check a window at and past the bound.
            let mut acc = BigRational::one();
            let mut v = BigUint::zero();
            let mut checked: u64 = 0;
            while v < stab.from {
                if checked >= ctx.budget.max_factors {
                    return EvalOutcome::Unknown(format!(
                        "stabilization bound {} exceeds factor budget",
                        stab.from
                    ));
                }
                match factor_at(&v, env, ctx) {
                    EvalOutcome::Exact(f) => {
                        if f.is_zero() {
                            return EvalOutcome::Exact(BigRational::zero());
                        }
                        acc *= f;
                    }
                    other => return other,
                }
                v += 1u32;
                checked += 1;
            }
            let mut probe = stab.from.clone();
            for _ in 0..stab.spot_checks {
                match factor_at(&probe, env, ctx) {
                    EvalOutcome::Exact(f) if f.is_one() => {}
                    EvalOutcome::Exact(f) => {
                        return EvalOutcome::Unknown(format!(
                            "stabilization certificate violated: factor at {var}={probe} is {f}, \
                             justification was {:?}",
                            stab.justification
                        ))
                    }
                    other => return other,
                }
                probe += 1u32;
            }
            return EvalOutcome::Exact(acc);
        }
        return EvalOutcome::Unknown("product witnesses exhausted without certificate".into());
    }

    // Unplanned product: scan factors up to the budget; a zero settles it,
    // anything else leaves the tail uncertified.
    let mut v = BigUint::zero();
    for _ in 0..ctx.budget.max_factors {
        match factor_at(&v, env, ctx) {
            EvalOutcome::Exact(f) if f.is_zero() => {
                return EvalOutcome::Exact(BigRational::zero())
            }
            EvalOutcome::Exact(_) => {}
            EvalOutcome::Undefined(r) => return EvalOutcome::Undefined(r),
            EvalOutcome::Unknown(r) => return EvalOutcome::Unknown(r),
        }
        v += 1u32;
    }
    EvalOutcome::Unknown(format!(
        "no zero factor among the first {} and no stabilization certificate",
        ctx.budget.max_factors
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqlang::parse_equation;

    fn ev(text: &str, env: &[(char, i64)]) -> EvalOutcome {
        let eq = parse_equation(&format!("{text}=0")).unwrap();
        let env: Env = env
            .iter()
            .map(|&(c, v)| (c, BigRational::from_integer(BigInt::from(v))))
            .collect();
        eval_expr(&eq.lhs, &env, &Budget::default(), &NoPlans)
    }

    fn exact(text: &str, env: &[(char, i64)]) -> BigRational {
        match ev(text, env) {
            EvalOutcome::Exact(v) => v,
            other => panic!("expected exact value for {text}, got {other:?}"),
        }
    }

    #[test]
    fn zero_pow_zero_is_one() {
        assert_eq!(exact("0^0", &[]), BigRational::one());
    }

    #[test]
    fn zero_pow_positive_is_zero() {
        assert!(exact("0^3", &[]).is_zero());
        assert!(exact("0^(1/2)", &[]).is_zero());
    }

    #[test]
    fn abs_via_square_root() {
        assert_eq!(exact("(x^2)^(1/2)", &[('x', -3)]), BigRational::from_integer(3.into()));
    }

    #[test]
    fn negative_exponents() {
        assert_eq!(
            exact("2^(0−2)", &[]),
            BigRational::new(1.into(), 4.into())
        );
        assert!(matches!(
            ev("0^(0−1)", &[]),
            EvalOutcome::Undefined(_)
        ));
    }

    #[test]
    fn division_by_zero_undefined() {
        assert!(matches!(ev("1/0", &[]), EvalOutcome::Undefined(_)));
    }

    #[test]
    fn irrational_root_undefined() {
        assert!(matches!(ev("2^(1/2)", &[]), EvalOutcome::Undefined(_)));
        assert!(matches!(ev("2^(1/3)", &[]), EvalOutcome::Undefined(_)));
    }

    #[test]
    fn sqrt_of_negative_undefined() {
        assert!(matches!(ev("(0−4)^(1/2)", &[]), EvalOutcome::Undefined(_)));
        assert_eq!(exact("4^(1/2)", &[]), BigRational::from_integer(2.into()));
        assert_eq!(
            exact("(9/4)^(1/2)", &[]),
            BigRational::new(3.into(), 2.into())
        );
    }

    #[test]
    fn product_of_ones_with_certificate() {
        let eq = parse_equation("Π_(n=0)^∞(1^n)=1").unwrap();
        struct Stab;
        impl ProductPlanner for Stab {
            fn plan(&self, _path: &[u32], _env: &Env) -> Option<ProductPlan> {
                Some(ProductPlan {
                    witnesses: vec![],
                    stabilization: Some(Stabilization {
                        from: BigUint::zero(),
                        spot_checks: 8,
                        justification: "all factors are 1^n = 1".into(),
                    }),
                })
            }
        }
        let out = eval_expr(&eq.lhs, &Env::new(), &Budget::default(), &Stab);
        assert_eq!(out, EvalOutcome::Exact(BigRational::one()));
    }

    #[test]
    fn product_zero_factor_short_circuits() {
        // Π_v (v − 3) hits factor 0 at v = 3 without any plan.
        let eq = parse_equation("Π_(v=0)^∞(v−3)=0").unwrap();
        let out = eval_expr(&eq.lhs, &Env::new(), &Budget::default(), &NoPlans);
        assert_eq!(out, EvalOutcome::Exact(BigRational::zero()));
    }

    #[test]
    fn product_without_certificate_is_unknown() {
        let eq = parse_equation("Π_(v=0)^∞(v+1)=0").unwrap();
        let out = eval_expr(&eq.lhs, &Env::new(), &Budget::default(), &NoPlans);
        assert!(matches!(out, EvalOutcome::Unknown(_)));
    }

    #[test]
    fn undefined_factor_poisons_product() {
        let eq = parse_equation("Π_(v=0)^∞(1/v)=0").unwrap();
        let out = eval_expr(&eq.lhs, &Env::new(), &Budget::default(), &NoPlans);
        assert!(matches!(out, EvalOutcome::Undefined(_)));
    }

    #[test]
    fn budget_exhaustion_is_unknown_not_wrong() {
        let eq = parse_equation("Π_(v=0)^∞(1−0^((v−100)^2))=0").unwrap();
        let tight = Budget {
            max_factors: 10,
            ..Budget::default()
        };
        let out = eval_expr(&eq.lhs, &Env::new(), &tight, &NoPlans);
        assert!(matches!(out, EvalOutcome::Unknown(_)));
        let roomy = Budget {
            max_factors: 200,
            ..Budget::default()
        };
        let out = eval_expr(&eq.lhs, &Env::new(), &roomy, &NoPlans);
        assert!(out.is_exact_zero());
    }

    #[test]
    fn compiled_indicator_shape_detected() {
        let eq = parse_equation("Π_(v=0)^∞(1−0^((v−2)^2))=0").unwrap();
        match &eq.lhs {
            Expr::Prod { body, .. } => assert!(is_compiled_indicator(body)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn huge_exponent_on_nonunit_base_is_unknown() {
        let out = ev("3^(10^40)", &[]);
        assert!(matches!(out, EvalOutcome::Unknown(_)), "{out:?}");
        assert_eq!(exact("1^(10^40)", &[]), BigRational::one());
        assert!(exact("0^(10^40)", &[]).is_zero());
    }
}
