//! Small prefix-notation text format for predicates, used by tests and the
//! `compile-pred` subcommand. Not part of the equation language.
//!
//! Grammar: `(eq0 EXPR)`, `(le EXPR EXPR)`, `(not P)`, `(or P Q)`,
//! `(and P Q)`, `(ex v P)`, `(all v P)`, with EXPR in the equation syntax
//! (ASCII aliases accepted, no whitespace inside an expression).

use thiserror::Error;

use super::Pred;
use crate::eqlang::parse_expr;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("predicate format error at byte {at}: {message}")]
pub struct PredFormatError {
    pub at: usize,
    pub message: String,
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, PredFormatError> {
        Err(PredFormatError {
            at: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len()
            && self.text.as_bytes()[self.pos].is_ascii_whitespace()
        {
            self.pos += 1;
        }
    }

    fn expect_char(&mut self, c: u8) -> Result<(), PredFormatError> {
        self.skip_ws();
        if self.text.as_bytes().get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {:?}", c as char))
        }
    }

    fn word(&mut self) -> Result<&'a str, PredFormatError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let b = self.text.as_bytes()[self.pos];
            if b.is_ascii_whitespace() || b == b'(' || b == b')' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a word");
        }
        Ok(&self.text[start..self.pos])
    }

    /// An expression argument: a balanced-parenthesis run with no whitespace.
    fn expr_token(&mut self) -> Result<&'a str, PredFormatError> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0i32;
        while self.pos < self.text.len() {
            let b = self.text.as_bytes()[self.pos];
            match b {
                b'(' => depth += 1,
                b')' => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                _ if b.is_ascii_whitespace() && depth == 0 => break,
                _ => {}
            }
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an expression");
        }
        Ok(&self.text[start..self.pos])
    }

    fn pred(&mut self) -> Result<Pred, PredFormatError> {
        self.expect_char(b'(')?;
        let tag = self.word()?;
        let out = match tag {
            "eq0" => {
                let e = self.expr_arg()?;
                Pred::AtomEq(e)
            }
            "le" => {
                let a = self.expr_arg()?;
                let b = self.expr_arg()?;
                Pred::le(a, b)
            }
            "not" => Pred::not(self.pred()?),
            "or" => {
                let a = self.pred()?;
                let b = self.pred()?;
                Pred::or(a, b)
            }
            "and" => {
                let a = self.pred()?;
                let b = self.pred()?;
                Pred::and(a, b)
            }
            "ex" | "all" => {
                let v = self.word()?;
                if v.len() != 1 || !v.as_bytes()[0].is_ascii_lowercase() {
                    return self.err(format!("bad bound variable {v:?}"));
                }
                let v = v.as_bytes()[0] as char;
                let body = self.pred()?;
                if tag == "ex" {
                    Pred::exists(v, body)
                } else {
                    Pred::forall(v, body)
                }
            }
            other => return self.err(format!("unknown predicate form {other:?}")),
        };
        self.expect_char(b')')?;
        Ok(out)
    }

    fn expr_arg(&mut self) -> Result<crate::eqlang::Expr, PredFormatError> {
        let at = self.pos;
        let tok = self.expr_token()?;
        parse_expr(tok).map_err(|e| PredFormatError {
            at,
            message: format!("bad expression {tok:?}: {e}"),
        })
    }
}

pub fn parse_pred(text: &str) -> Result<Pred, PredFormatError> {
    let mut r = Reader { text, pos: 0 };
    let p = r.pred()?;
    r.skip_ws();
    if r.pos != text.len() {
        return r.err("trailing input after predicate");
    }
    Ok(p)
}

pub fn print_pred(p: &Pred) -> String {
    match p {
        Pred::AtomEq(e) => format!("(eq0 {})", e.serialize()),
        Pred::AtomLe(a, b) => format!("(le {} {})", a.serialize(), b.serialize()),
        Pred::Not(q) => format!("(not {})", print_pred(q)),
        Pred::Or(a, b) => format!("(or {} {})", print_pred(a), print_pred(b)),
        Pred::And(a, b) => format!("(and {} {})", print_pred(a), print_pred(b)),
        Pred::Exists(v, q) => format!("(ex {} {})", v, print_pred(q)),
        Pred::Forall(v, q) => format!("(all {} {})", v, print_pred(q)),
    }
}
