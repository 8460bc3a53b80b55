//! Annotated predicate construction: every quantifier carries a role naming
//! what its witness means, so the semantic verifier can supply witnesses
//! computed from an actual machine run. Stripping an annotated tree yields
//! the plain predicate plus a map from quantifier paths to roles.

use std::collections::BTreeMap;

use crate::eqlang::Expr;
use crate::logic::Pred;

/// Which β-coded table a role refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tbl {
    /// Machine trace: 18 slots per step (power word, slide state, 16
    /// registers).
    Trace,
    /// Digit chain: suffix codes of the output string, one per index.
    Digits,
}

/// A table row index as a function of the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepIdx {
    Lit(u64),
    /// env\[v\] + plus.
    Var { v: char, plus: u64 },
}

/// A slot within a table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotSel {
    Fixed(u8),
    /// Register slot selected by a field variable: slot = 2 + env\[v\].
    RegFromVar(char),
}

/// Which shape of word decomposition a fetch helper belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FetchVariant {
    /// Three-register ops: the immediate folds into the high quotient.
    Arith,
    /// SET: opcode, target, 32-bit immediate; unused fields must be zero.
    SetImm,
    /// JZ/JMP: opcode, register, 40-bit offset encoding.
    Jump,
    /// Halt test: only the opcode nibble is split off.
    OpOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Op,
    A,
    B,
    C,
    Imm,
    Off,
}

/// What a quantified variable denotes, with enough data to compute its
/// witness from a machine run and the current environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    /// The (*) prefix variables and anything else planned by the caller.
    Caller(char),
    /// The program-code variable pinned to the free n.
    Prog,
    K1(Tbl),
    K2(Tbl),
    /// A table value bound by a β-access.
    Slot {
        tbl: Tbl,
        at: StepIdx,
        slot: SlotSel,
    },
    /// The quotient witness inside a β-access.
    BetaQ {
        tbl: Tbl,
        at: StepIdx,
        slot: SlotSel,
    },
    /// The no-bad-step scan: Exists over step indices below env[upto_var].
    Viol { tbl: Tbl, upto_var: char },
    /// Word-fetch decomposition helpers at a trace row.
    FetchQ { at: StepIdx, variant: FetchVariant },
    FetchL { at: StepIdx },
    Field { at: StepIdx, which: FieldKind },
    /// The written value and target register of the step at `at`.
    Val { at: StepIdx },
    Tgt { at: StepIdx },
    /// Quotient witness of the MOD instruction's defining relation.
    ModQ { at: StepIdx },
    /// Length of the digit chain (number of symbols of the decoded string).
    DigitLen,
    /// Position helper m with m + c + 1 = length.
    DigitPos { c_var: char },
    /// The digit value at the extraction position.
    DigitVal,
}

/// Predicate tree with roles on quantifiers.
#[derive(Debug, Clone)]
pub enum Ap {
    Eq(Expr),
    Le(Expr, Expr),
    Not(Box<Ap>),
    Or(Box<Ap>, Box<Ap>),
    And(Box<Ap>, Box<Ap>),
    Ex(char, Role, Box<Ap>),
}

impl Ap {
    pub fn eq0(e: Expr) -> Ap {
        Ap::Eq(e)
    }

    pub fn eq(a: Expr, b: Expr) -> Ap {
        Ap::Eq(Expr::sub(a, b))
    }

    pub fn le(a: Expr, b: Expr) -> Ap {
        Ap::Le(a, b)
    }

    pub fn not(p: Ap) -> Ap {
        Ap::Not(Box::new(p))
    }

    pub fn or(a: Ap, b: Ap) -> Ap {
        Ap::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Ap, b: Ap) -> Ap {
        Ap::And(Box::new(a), Box::new(b))
    }

    pub fn and_all(mut ps: Vec<Ap>) -> Ap {
        let last = ps.pop().expect("conjunction of empty list");
        ps.into_iter().rev().fold(last, |acc, p| Ap::and(p, acc))
    }

    pub fn or_all(mut ps: Vec<Ap>) -> Ap {
        let last = ps.pop().expect("disjunction of empty list");
        ps.into_iter().rev().fold(last, |acc, p| Ap::or(p, acc))
    }

    pub fn ex(v: char, role: Role, body: Ap) -> Ap {
        Ap::Ex(v, role, Box::new(body))
    }
}

/// Map from a quantifier's path (child indices from the predicate root) to
/// its bound letter and role.
pub type RoleMap = BTreeMap<Vec<u32>, (char, Role)>;

/// Convert to a plain predicate, collecting quantifier roles by path.
pub fn strip(ap: &Ap) -> (Pred, RoleMap) {
    let mut roles = RoleMap::new();
    let mut path = Vec::new();
    let pred = strip_at(ap, &mut path, &mut roles);
    (pred, roles)
}

/// Strip with the root at a given path prefix (for predicates that will be
/// grafted into a larger tree at a known position).
pub fn strip_rooted(ap: &Ap, prefix: &[u32]) -> (Pred, RoleMap) {
    let mut roles = RoleMap::new();
    let mut path = prefix.to_vec();
    let pred = strip_at(ap, &mut path, &mut roles);
    (pred, roles)
}

fn strip_at(ap: &Ap, path: &mut Vec<u32>, roles: &mut RoleMap) -> Pred {
    match ap {
        Ap::Eq(e) => Pred::AtomEq(e.clone()),
        Ap::Le(a, b) => Pred::AtomLe(a.clone(), b.clone()),
        Ap::Not(q) => {
            path.push(0);
            let inner = strip_at(q, path, roles);
            path.pop();
            Pred::not(inner)
        }
        Ap::Or(a, b) => {
            path.push(0);
            let left = strip_at(a, path, roles);
            path.pop();
            path.push(1);
            let right = strip_at(b, path, roles);
            path.pop();
            Pred::or(left, right)
        }
        Ap::And(a, b) => {
            path.push(0);
            let left = strip_at(a, path, roles);
            path.pop();
            path.push(1);
            let right = strip_at(b, path, roles);
            path.pop();
            Pred::and(left, right)
        }
        Ap::Ex(v, role, body) => {
            roles.insert(path.clone(), (*v, role.clone()));
            path.push(0);
            let inner = strip_at(body, path, roles);
            path.pop();
            Pred::exists(*v, inner)
        }
    }
}

impl StepIdx {
    /// The row index under an environment (integer values required).
    pub fn value(&self, env: &crate::eqlang::Env) -> Option<u64> {
        match self {
            StepIdx::Lit(v) => Some(*v),
            StepIdx::Var { v, plus } => {
                let val = env.get(v)?;
                if !val.is_integer() {
                    return None;
                }
                let as_u64: u64 = val.to_integer().try_into().ok()?;
                Some(as_u64 + plus)
            }
        }
    }

    /// The row index as an expression over the environment variables.
    pub fn expr(&self) -> Expr {
        match self {
            StepIdx::Lit(v) => Expr::lit(*v),
            StepIdx::Var { v, plus } => {
                if *plus == 0 {
                    Expr::var(*v)
                } else {
                    Expr::add(Expr::var(*v), Expr::lit(*plus))
                }
            }
        }
    }
}

impl SlotSel {
    pub fn value(&self, env: &crate::eqlang::Env) -> Option<u8> {
        match self {
            SlotSel::Fixed(s) => Some(*s),
            SlotSel::RegFromVar(v) => {
                let val = env.get(v)?;
                if !val.is_integer() {
                    return None;
                }
                let r: u8 = val.to_integer().try_into().ok()?;
                Some(2 + r)
            }
        }
    }
}
