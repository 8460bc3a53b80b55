//! Constant programs and partial application on codes.
//!
//! `make_const(X)` builds an index k with run(k, m) = X for every m: the
//! immediate form `[SET r0,X; HALT]` when X fits a word immediate, otherwise
//! a straight-line chunk loader. `s1_code(z, x)` prepends to the code `z` a
//! preamble loading `x` into the argument register, the special case of the
//! Smn construction the fixed point needs; jumps are relative, so the body
//! of `z` is byte-identical in the result.

use num_bigint::BigUint;

use super::{encode_program, Instr, Program, WORD_BITS};

/// Register where a partially applied argument arrives.
pub const S1_ARG_REG: u8 = 13;
/// Scratch registers a partial-application preamble may clobber.
pub const S1_SCRATCH: [u8; 2] = [12, 11];

/// 32-bit chunks of `x`, most significant first. `0` has one chunk.
pub fn chunks_msb_first(x: &BigUint) -> Vec<u32> {
    let digits = x.to_u32_digits(); // little-endian
    if digits.is_empty() {
        return vec![0];
    }
    digits.into_iter().rev().collect()
}

/// Straight-line instructions leaving `x` in `target`. Uses `shift_scratch`
/// and `chunk_scratch` only when `x` needs more than one chunk.
pub fn load_const_instrs(
    target: u8,
    shift_scratch: u8,
    chunk_scratch: u8,
    x: &BigUint,
) -> Vec<Instr> {
    let chunks = chunks_msb_first(x);
    if chunks.len() == 1 {
        return vec![Instr::Set {
            r: target,
            k: chunks[0],
        }];
    }
    let mut out = vec![
        Instr::Set {
            r: target,
            k: chunks[0],
        },
        Instr::Set {
            r: shift_scratch,
            k: 1 << 16,
        },
        Instr::Mul {
            r: shift_scratch,
            s: shift_scratch,
            t: shift_scratch,
        },
    ];
    for &c in &chunks[1..] {
        out.push(Instr::Mul {
            r: target,
            s: target,
            t: shift_scratch,
        });
        out.push(Instr::Set {
            r: chunk_scratch,
            k: c,
        });
        out.push(Instr::Add {
            r: target,
            s: target,
            t: chunk_scratch,
        });
    }
    out
}

/// The constant program for X: ignores its input and outputs X.
pub fn make_const_program(x: &BigUint) -> Program {
    let mut instrs = load_const_instrs(0, 1, 2, x);
    instrs.push(Instr::Halt);
    Program::new(instrs)
}

/// Index k with run(k, m) = X for all m.
pub fn make_const(x: &BigUint) -> BigUint {
    encode_program(&make_const_program(x))
}

/// Recognize a constant program built by `make_const_program` and recover X.
/// Used by tests and reports; the machine-level extractor in the fixed-point
/// template performs the same scan.
pub fn read_const_program(p: &Program) -> Option<BigUint> {
    let instrs = &p.0;
    match instrs.as_slice() {
        [Instr::Set { r: 0, k }, Instr::Halt] => Some(BigUint::from(*k)),
        _ => {
            let mut it = instrs.iter();
            let first = it.next()?;
            let acc0 = match first {
                Instr::Set { r: 0, k } => BigUint::from(*k),
                _ => return None,
            };
            match (it.next()?, it.next()?) {
                (
                    Instr::Set { r: 1, k: 65536 },
                    Instr::Mul { r: 1, s: 1, t: 1 },
                ) => {}
                _ => return None,
            }
            let mut acc = acc0;
            loop {
                match it.next()? {
                    Instr::Halt => return Some(acc),
                    Instr::Mul { r: 0, s: 0, t: 1 } => {
                        let (set, add) = (it.next()?, it.next()?);
                        match (set, add) {
                            (
                                Instr::Set { r: 2, k },
                                Instr::Add { r: 0, s: 0, t: 2 },
                            ) => {
                                acc = (acc << 32) + BigUint::from(*k);
                            }
                            _ => return None,
                        }
                    }
                    _ => return None,
                }
            }
        }
    }
}

/// Preamble instructions loading `x` into the argument register.
pub fn s1_preamble(x: &BigUint) -> Vec<Instr> {
    load_const_instrs(S1_ARG_REG, S1_SCRATCH[0], S1_SCRATCH[1], x)
}

/// Partial application on codes: the code of (preamble for `x`) ++ `z`.
/// run(s1_code(z, x), m) behaves as the program z started with the argument
/// register holding x and r0 holding m.
pub fn s1_code(z: &BigUint, x: &BigUint) -> BigUint {
    let preamble = s1_preamble(x);
    let mut code = z.clone() << (WORD_BITS * preamble.len() as u64);
    for (i, instr) in preamble.iter().enumerate() {
        code |= BigUint::from(instr.word()) << (WORD_BITS * i as u64);
    }
    code
}

/// Program form of `s1_code` for display and tests.
pub fn s1_program(z: &Program, x: &BigUint) -> Program {
    let mut instrs = s1_preamble(x);
    instrs.extend(z.0.iter().copied());
    Program::new(instrs)
}

/// Number of words the preamble for `x` occupies.
pub fn s1_preamble_len(x: &BigUint) -> u64 {
    s1_preamble(x).len() as u64
}

#[cfg(test)]
mod tests {
    use super::super::{decode_program, run, run_program, RunOutcome};
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn const_program_ignores_input() {
        let k = make_const(&big(42));
        for m in [0u64, 1, 999] {
            assert_eq!(
                run(&k, &big(m), 1000).output(),
                Some(&big(42)),
                "input {m}"
            );
        }
    }

    #[test]
    fn const_zero() {
        assert_eq!(run(&make_const(&big(0)), &big(0), 10).output(), Some(&big(0)));
    }

    #[test]
    fn const_program_for_huge_value() {
        let x = (BigUint::one() << 100) + big(12345);
        let k = make_const(&x);
        assert_eq!(run(&k, &big(7), 1000).output(), Some(&x));
        assert_eq!(read_const_program(&decode_program(&k)), Some(x));
    }

    #[test]
    fn s1_prepends_argument() {
        // Body: output the argument register (r13) plus the input (r0).
        let body = Program::new(vec![
            Instr::Add {
                r: 0,
                s: 0,
                t: S1_ARG_REG,
            },
            Instr::Halt,
        ]);
        let z = encode_program(&body);
        for (x, m) in [(5u64, 3u64), (0, 0), (1 << 40, 9)] {
            let code = s1_code(&z, &big(x));
            assert_eq!(run(&code, &big(m), 10_000).output(), Some(&big(x + m)));
            // Program-level and code-level forms agree.
            assert_eq!(encode_program(&s1_program(&body, &big(x))), code);
        }
    }

    #[test]
    fn s1_preserves_jumps_in_body() {
        // Body loops r13 down to zero, counting iterations into r0.
        let body = Program::new(vec![
            Instr::Set { r: 1, k: 1 },
            Instr::Jz { r: S1_ARG_REG, off: 3 },
            Instr::Monus {
                r: S1_ARG_REG,
                s: S1_ARG_REG,
                t: 1,
            },
            Instr::Add { r: 0, s: 0, t: 1 },
            Instr::Jmp { off: -4 },
            Instr::Halt,
        ]);
        let z = encode_program(&body);
        let code = s1_code(&z, &big(700));
        let out = run(&code, &big(0), 100_000);
        assert_eq!(out.output(), Some(&big(700)));
        // A large argument forces the multi-chunk preamble.
        let x = BigUint::one() << 77;
        let p = s1_program(&body, &x);
        assert!(p.len() > body.len() + 1);
        match run_program(&p, &big(0), 10_000) {
            RunOutcome::OutOfBudget { .. } => {} // 2^77 iterations, fine
            RunOutcome::Halted { .. } => panic!("should not finish"),
        }
    }

    proptest! {
        #[test]
        fn smn_property(x in any::<u64>(), m in 0u64..10) {
            let k = make_const(&big(x));
            let out = run(&k, &big(m), 1000);
            prop_assert_eq!(out.output(), Some(&big(x)));
        }

        #[test]
        fn read_const_inverts_make_const(x in any::<u128>()) {
            let x = BigUint::from(x);
            let p = make_const_program(&x);
            prop_assert_eq!(read_const_program(&p), Some(x));
        }
    }
}
