//! Deterministic recursive-descent parser for the equation language.
//!
//! Accepts both the canonical fully parenthesized form and conventional
//! precedence (`^` over `·` and `/` over `+` and `−`, all left associative;
//! no unary minus). ASCII aliases `*`, `-`, `PROD`, `inf` are accepted on
//! input and never emitted.

use num_bigint::BigUint;
use thiserror::Error;

use super::{BinOp, Equation, Expr};

/// Structured reason an input failed to parse as an equation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid equation at position {position}: expected {expected}, found {found}")]
pub struct Invalid {
    /// Character offset into the input.
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(char),
    Lit(BigUint),
    LParen,
    RParen,
    Op(BinOp),
    Equals,
    Pi,
    Underscore,
    Infinity,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Var(c) => format!("variable {c:?}"),
            Tok::Lit(v) => format!("literal {v}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Op(op) => format!("`{}`", op.symbol()),
            Tok::Equals => "`=`".into(),
            Tok::Pi => "`Π`".into(),
            Tok::Underscore => "`_`".into(),
            Tok::Infinity => "`∞`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, Invalid> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            'a'..='z' => {
                // `inf` is the ASCII alias for ∞ when not followed by a letter.
                if c == 'i'
                    && chars.get(i + 1) == Some(&'n')
                    && chars.get(i + 2) == Some(&'f')
                    && !matches!(chars.get(i + 3), Some('a'..='z'))
                {
                    out.push((i, Tok::Infinity));
                    i += 3;
                    continue;
                }
                Tok::Var(c)
            }
            '0'..='9' => {
                let start = i;
                let mut digits = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    digits.push(chars[i]);
                    i += 1;
                }
                if digits.len() > 1 && digits.starts_with('0') {
                    return Err(Invalid {
                        position: start,
                        expected: "literal without leading zeros".into(),
                        found: format!("{digits:?}"),
                    });
                }
                out.push((start, Tok::Lit(digits.parse().unwrap())));
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '+' => Tok::Op(BinOp::Add),
            '·' | '*' => Tok::Op(BinOp::Mul),
            '−' | '-' => Tok::Op(BinOp::Sub),
            '/' => Tok::Op(BinOp::Div),
            '^' => Tok::Op(BinOp::Pow),
            '=' => Tok::Equals,
            'Π' => Tok::Pi,
            'P' if chars[i..].starts_with(&['P', 'R', 'O', 'D']) => {
                out.push((i, Tok::Pi));
                i += 4;
                continue;
            }
            '_' => Tok::Underscore,
            '∞' => Tok::Infinity,
            other => {
                return Err(Invalid {
                    position: i,
                    expected: "an alphabet symbol".into(),
                    found: format!("{other:?}"),
                })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn found(&self) -> String {
        self.peek().map_or("end of input".into(), Tok::describe)
    }

    fn fail<T>(&self, expected: &str) -> Result<T, Invalid> {
        Err(Invalid {
            position: self.here(),
            expected: expected.into(),
            found: self.found(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), Invalid> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn expr(&mut self) -> Result<Expr, Invalid> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ (BinOp::Add | BinOp::Sub))) = self.peek() {
            let op = *op;
            self.pos += 1;
            acc = Expr::bin(op, acc, self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, Invalid> {
        let mut acc = self.power()?;
        while let Some(Tok::Op(op @ (BinOp::Mul | BinOp::Div))) = self.peek() {
            let op = *op;
            self.pos += 1;
            acc = Expr::bin(op, acc, self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr, Invalid> {
        let mut acc = self.atom()?;
        while let Some(Tok::Op(BinOp::Pow)) = self.peek() {
            self.pos += 1;
            acc = Expr::pow(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Expr, Invalid> {
        match self.peek() {
            Some(Tok::Var(c)) => {
                let c = *c;
                self.pos += 1;
                Ok(Expr::Var(c))
            }
            Some(Tok::Lit(_)) => match self.bump() {
                Some(Tok::Lit(v)) => Ok(Expr::Lit(v)),
                _ => unreachable!(),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Pi) => self.product(),
            _ => self.fail("a variable, literal, `(`, or `Π`"),
        }
    }

    fn product(&mut self) -> Result<Expr, Invalid> {
        self.expect(&Tok::Pi, "`Π`")?;
        self.expect(&Tok::Underscore, "`_`")?;
        self.expect(&Tok::LParen, "`(`")?;
        let var = match self.peek() {
            Some(Tok::Var(c)) => {
                let c = *c;
                self.pos += 1;
                c
            }
            _ => return self.fail("a bound variable"),
        };
        self.expect(&Tok::Equals, "`=`")?;
        match self.peek() {
            Some(Tok::Lit(v)) if *v == BigUint::from(0u32) => {
                self.pos += 1;
            }
            _ => return self.fail("the lower bound `0`"),
        }
        self.expect(&Tok::RParen, "`)`")?;
        self.expect(&Tok::Op(BinOp::Pow), "`^`")?;
        self.expect(&Tok::Infinity, "`∞`")?;
        self.expect(&Tok::LParen, "`(`")?;
        let body = self.expr()?;
        self.expect(&Tok::RParen, "`)`")?;
        Ok(Expr::prod(var, body))
    }
}

/// Parse an equation: exactly one `=` at the top level.
pub fn parse_equation(text: &str) -> Result<Equation, Invalid> {
    let toks = lex(text)?;
    let end = text.chars().count();
    let mut p = Parser { toks, pos: 0, end };
    let lhs = p.expr()?;
    p.expect(&Tok::Equals, "`=`")?;
    let rhs = p.expr()?;
    if p.peek().is_some() {
        return p.fail("end of input");
    }
    Ok(Equation::new(lhs, rhs))
}

/// Parse a bare expression (no `=`). Used by the predicate test format.
pub fn parse_expr(text: &str) -> Result<Expr, Invalid> {
    let toks = lex(text)?;
    let end = text.chars().count();
    let mut p = Parser { toks, pos: 0, end };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.fail("end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_circle() {
        let eq = parse_equation("x^2+y^2=1").unwrap();
        assert_eq!(eq.serialize(), "((x^2)+(y^2))=1");
        // Canonical form parses back to the same tree.
        assert_eq!(parse_equation("((x^2)+(y^2))=1").unwrap(), eq);
    }

    #[test]
    fn rejects_plus_equals() {
        let err = parse_equation("+=").unwrap_err();
        assert_eq!(err.position, 0);
    }

    #[test]
    fn rejects_empty() {
        assert!(parse_equation("").is_err());
    }

    #[test]
    fn rejects_two_equals() {
        assert!(parse_equation("x=y=1").is_err());
    }

    #[test]
    fn rejects_leading_zero_literal() {
        assert!(parse_equation("x=01").is_err());
        assert!(parse_equation("x=0").is_ok());
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_equation("1+2·3=0").unwrap().lhs.serialize(),
            "(1+(2·3))"
        );
        assert_eq!(
            parse_equation("2^3^4=0").unwrap().lhs.serialize(),
            "((2^3)^4)"
        );
        assert_eq!(
            parse_equation("1−2−3=0").unwrap().lhs.serialize(),
            "((1−2)−3)"
        );
    }

    #[test]
    fn ascii_aliases_accepted() {
        let a = parse_equation("PROD_(n=0)^inf(1^n)=1").unwrap();
        let b = parse_equation("Π_(n=0)^∞(1^n)=1").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_equation("2*3=6").unwrap(), parse_equation("2·3=6").unwrap());
        assert_eq!(parse_equation("x-1=0").unwrap(), parse_equation("x−1=0").unwrap());
    }

    #[test]
    fn minus_is_binary_only() {
        assert!(parse_equation("-x=1").is_err());
        assert!(parse_equation("0-x=1").is_ok());
    }

    fn arb_expr(depth: u32) -> BoxedStrategy<Expr> {
        let leaf = prop_oneof![
            prop_oneof![Just('x'), Just('y'), Just('v'), Just('w')].prop_map(Expr::Var),
            (0u64..1000).prop_map(Expr::lit),
        ];
        leaf.prop_recursive(depth, 64, 8, |inner| {
            prop_oneof![
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Mul),
                        Just(BinOp::Sub),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, l, r)| Expr::bin(op, l, r)),
                (prop_oneof![Just('k'), Just('m')], inner)
                    .prop_map(|(v, b)| Expr::prod(v, b)),
            ]
        })
        .boxed()
    }

    proptest! {
        /// parse . serialize is the identity on generated ASTs.
        #[test]
        fn roundtrip(lhs in arb_expr(6), rhs in arb_expr(3)) {
            let eq = Equation::new(lhs, rhs);
            let text = eq.serialize();
            let parsed = parse_equation(&text).expect("canonical text parses");
            prop_assert_eq!(parsed, eq);
        }

        /// serialize . parse is canonicalization: parsing accepted text and
        /// reserializing is idempotent.
        #[test]
        fn canonicalize_idempotent(lhs in arb_expr(4)) {
            let eq = Equation::new(lhs, Expr::lit(0u32));
            let canon = eq.serialize();
            let again = parse_equation(&canon).unwrap().serialize();
            prop_assert_eq!(canon, again);
        }
    }
}
