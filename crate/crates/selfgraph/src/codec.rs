//! Gödel numbering of strings over the alphabet: a computable bijection
//! between `Vec<Symbol>` and the naturals, by listing strings length-first
//! and alphabetically within a length.
//!
//! Positions start at 0, so the empty string maps to 0. Concretely this is
//! bijective base-47 numeration: a string `s_0 .. s_{k-1}` (leftmost symbol
//! most significant) maps to `sum (index(s_i)+1) * 47^(k-1-i)`, with digit
//! values 1..=47.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::glyphs::{Symbol, ALPHABET_SIZE};

/// A Gödel number: the position of a string in the length-then-alphabetical
/// enumeration of all strings over the alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GodelNumber(pub BigUint);

impl GodelNumber {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl std::fmt::Display for GodelNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of `s` in the enumeration of all strings over the alphabet.
pub fn encode(s: &[Symbol]) -> GodelNumber {
    let base = BigUint::from(ALPHABET_SIZE);
    let mut n = BigUint::zero();
    for sym in s {
        n = n * &base + BigUint::from(sym.index() as u32 + 1);
    }
    GodelNumber(n)
}

/// The unique string whose `encode` is `n`. Total: every natural is hit.
pub fn decode(n: &GodelNumber) -> Vec<Symbol> {
    decode_value(&n.0)
}

/// `decode` on a raw natural.
pub fn decode_value(n: &BigUint) -> Vec<Symbol> {
    let base = BigUint::from(ALPHABET_SIZE);
    let one = BigUint::one();
    let mut rest = n.clone();
    let mut out = Vec::new();
    while !rest.is_zero() {
        // Bijective base step: digit value in 1..=47 is ((rest - 1) mod 47) + 1.
        let t = &rest - &one;
        let digit = (&t % &base) + &one;
        rest = t / &base;
        let d: u32 = digit.try_into().expect("digit fits in u32");
        out.push(Symbol::from_index((d - 1) as u8).expect("digit in range"));
    }
    out.reverse();
    out
}

/// Convenience: encode a string given in display form (UTF-8 with the fixed
/// codepoints for the non-ASCII symbols).
pub fn encode_str(text: &str) -> Result<GodelNumber, crate::glyphs::UnknownSymbol> {
    let syms = Symbol::parse_str(text)?;
    Ok(encode(&syms))
}
