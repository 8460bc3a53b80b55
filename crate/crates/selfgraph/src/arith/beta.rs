//! Gödel's β-function: β(k₁, k₂, i) = k₁ mod (1 + (i+1)·k₂), and the
//! Chinese-remainder construction realizing any finite sequence. The
//! realization is the host-side oracle backing the sequence existentials in
//! the arithmetized trace.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

/// β(k₁, k₂, i).
pub fn beta(k1: &BigUint, k2: &BigUint, i: u64) -> BigUint {
    k1 % modulus(k2, i)
}

/// The i-th modulus 1 + (i+1)·k₂.
pub fn modulus(k2: &BigUint, i: u64) -> BigUint {
    BigUint::one() + BigUint::from(i + 1) * k2
}

/// Find (k₁, k₂) with β(k₁, k₂, i) = values[i] for every i.
///
/// k₂ is a multiple of every prime up to the sequence length (making the
/// moduli pairwise coprime) and exceeds every value; k₁ comes from the
/// Chinese remainder theorem. Fails only if the numbers would exceed
/// `max_bits`, a memory guard for full-scale traces whose codes are
/// astronomically large.
pub fn realize(values: &[BigUint], max_bits: u64) -> Option<(BigUint, BigUint)> {
    assert!(!values.is_empty());
    let len = values.len() as u64;
    let max_value = values.iter().max().cloned().unwrap_or_default();

    let mut k2 = primorial(len);
    k2 *= &max_value + BigUint::one();

    // Guard: sum of moduli bit lengths bounds k₁'s size.
    let per = k2.bits() + 8;
    if per.checked_mul(len)? > max_bits {
        return None;
    }

    // CRT accumulation: k₁ ≡ values[i] (mod mᵢ).
    let mut k1 = values[0].clone();
    let mut prod = modulus(&k2, 0);
    for (i, v) in values.iter().enumerate().skip(1) {
        let m = modulus(&k2, i as u64);
        // Solve k1 + prod·t ≡ v (mod m) for t.
        let prod_mod = &prod % &m;
        let inv = mod_inverse(&prod_mod, &m).expect("moduli are pairwise coprime");
        let k1_mod = &k1 % &m;
        let target = if v >= &k1_mod {
            v - &k1_mod
        } else {
            &m - ((&k1_mod - v) % &m)
        };
        let t = (target * inv) % &m;
        k1 += &prod * t;
        prod *= &m;
    }
    debug_assert!(values
        .iter()
        .enumerate()
        .all(|(i, v)| beta(&k1, &k2, i as u64) == *v));
    Some((k1, k2))
}

/// Product of the primes up to n inclusive.
pub fn primorial(n: u64) -> BigUint {
    let mut out = BigUint::one();
    let mut sieve = vec![true; (n + 1).max(2) as usize];
    for p in 2..=n as usize {
        if sieve[p] {
            out *= BigUint::from(p as u64);
            let mut q = p * p;
            while q <= n as usize {
                sieve[q] = false;
                q += p;
            }
        }
    }
    out
}

fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    // Extended Euclid over signed big integers.
    use num_bigint::BigInt;
    let (mut r0, mut r1) = (BigInt::from(m.clone()), BigInt::from(a.clone()));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r);
        let s = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s);
    }
    if !r0.is_one() {
        return None;
    }
    let m_int = BigInt::from(m.clone());
    let s = ((s0 % &m_int) + &m_int) % &m_int;
    s.try_into().ok()
}
