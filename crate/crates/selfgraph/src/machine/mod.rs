//! The computability substrate: a register machine over unbounded naturals
//! with a numeric program encoding, giving a concrete enumeration of the
//! computable functions; its interpreter; the constant-program constructor;
//! and a constructive recursion-theorem fixed point.
//!
//! Programs are encoded word-positionally: instruction i occupies the i-th
//! 48-bit word of the code, low word first. Word layout (low bits first):
//! opcode:4, A:4, B:4, C:4, immediate:32. Jump instructions store a signed
//! relative offset in bits 8 and up as direction + 2·magnitude. Opcode 0 and
//! opcodes 9..=15 mean HALT, so any natural decodes to a program and reading
//! past the end of the code halts.

pub mod asm;
pub mod fixed;
mod interp;
mod smn;

pub use asm::{parse_asm, print_asm, Asm, AsmError};
pub use fixed::{
    compose_with_make_const, fixed_point, fixed_point_output_shape, generic_template,
    output_shape_template, FixedPointError, MAX_TRANSFORMER_REG,
};
pub use interp::{halted, run, run_program, slide_encoding, step, trace_run, RunOutcome, Snapshot};
pub use smn::{
    chunks_msb_first, load_const_instrs, make_const, make_const_program, read_const_program,
    s1_code, s1_preamble, s1_preamble_len, s1_program, S1_ARG_REG, S1_SCRATCH,
};

use num_bigint::BigUint;
use num_traits::Zero;

/// Bits per instruction word.
pub const WORD_BITS: u64 = 48;
/// Number of addressable registers (4-bit operand fields).
pub const REG_COUNT: usize = 16;
/// Immediates are 32-bit.
pub const IMM_BITS: u64 = 32;
/// Cap on jump magnitudes: the offset field is 40 bits, one of them the
/// direction.
pub const MAX_JUMP_MAG: u64 = (1u64 << 39) - 1;

/// One machine instruction. Register operands are indices below
/// [`REG_COUNT`]; `k` is a 32-bit constant; jump offsets are relative to the
/// following instruction (target = pc + 1 + off).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instr {
    Set { r: u8, k: u32 },
    Add { r: u8, s: u8, t: u8 },
    Monus { r: u8, s: u8, t: u8 },
    Mul { r: u8, s: u8, t: u8 },
    /// Quotient of truncated division; division by zero yields 0.
    Divq { r: u8, s: u8, t: u8 },
    /// Remainder of truncated division; modulus zero yields 0.
    Mod { r: u8, s: u8, t: u8 },
    Jz { r: u8, off: i64 },
    Jmp { off: i64 },
    Halt,
}

pub const OP_HALT: u64 = 0;
pub const OP_SET: u64 = 1;
pub const OP_ADD: u64 = 2;
pub const OP_MONUS: u64 = 3;
pub const OP_MUL: u64 = 4;
pub const OP_DIVQ: u64 = 5;
pub const OP_MOD: u64 = 6;
pub const OP_JZ: u64 = 7;
pub const OP_JMP: u64 = 8;

impl Instr {
    /// The 48-bit word for this instruction.
    pub fn word(self) -> u64 {
        let reg3 = |op: u64, r: u8, s: u8, t: u8| {
            op | (r as u64) << 4 | (s as u64) << 8 | (t as u64) << 12
        };
        let jump = |op: u64, r: u8, off: i64| {
            let enc = if off >= 0 {
                2 * off as u64
            } else {
                2 * (-off) as u64 + 1
            };
            debug_assert!(off.unsigned_abs() <= MAX_JUMP_MAG);
            op | (r as u64) << 4 | enc << 8
        };
        match self {
            Instr::Halt => 0,
            Instr::Set { r, k } => OP_SET | (r as u64) << 4 | (k as u64) << 16,
            Instr::Add { r, s, t } => reg3(OP_ADD, r, s, t),
            Instr::Monus { r, s, t } => reg3(OP_MONUS, r, s, t),
            Instr::Mul { r, s, t } => reg3(OP_MUL, r, s, t),
            Instr::Divq { r, s, t } => reg3(OP_DIVQ, r, s, t),
            Instr::Mod { r, s, t } => reg3(OP_MOD, r, s, t),
            Instr::Jz { r, off } => jump(OP_JZ, r, off),
            Instr::Jmp { off } => jump(OP_JMP, 0, off),
        }
    }

    /// Decode a 48-bit word. Total: unknown opcodes decode to HALT.
    pub fn from_word(w: u64) -> Instr {
        let op = w & 0xF;
        let a = ((w >> 4) & 0xF) as u8;
        let b = ((w >> 8) & 0xF) as u8;
        let c = ((w >> 12) & 0xF) as u8;
        let imm = (w >> 16) as u32;
        let off = {
            let enc = w >> 8;
            let mag = (enc >> 1) as i64;
            if enc & 1 == 0 {
                mag
            } else {
                -mag
            }
        };
        match op {
            // SET words must leave the unused operand fields zero; anything
            // else is invalid and halts, matching the trace arithmetization.
            OP_SET if b == 0 && c == 0 => Instr::Set { r: a, k: imm },
            OP_SET => Instr::Halt,
            OP_ADD => Instr::Add { r: a, s: b, t: c },
            OP_MONUS => Instr::Monus { r: a, s: b, t: c },
            OP_MUL => Instr::Mul { r: a, s: b, t: c },
            OP_DIVQ => Instr::Divq { r: a, s: b, t: c },
            OP_MOD => Instr::Mod { r: a, s: b, t: c },
            OP_JZ => Instr::Jz { r: a, off },
            OP_JMP => Instr::Jmp { off },
            _ => Instr::Halt,
        }
    }

    pub fn is_halt(self) -> bool {
        matches!(self, Instr::Halt)
    }
}

/// A nonempty instruction list. Canonical form ends with exactly one HALT
/// (trailing zero words vanish from the numeric code, so that is the form
/// the encoding round-trips).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program(pub Vec<Instr>);

impl Program {
    pub fn new(instrs: Vec<Instr>) -> Program {
        let mut p = Program(instrs);
        p.canonicalize();
        p
    }

    fn canonicalize(&mut self) {
        while self.0.last() == Some(&Instr::Halt) {
            self.0.pop();
        }
        self.0.push(Instr::Halt);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn instr(&self, pc: u64) -> Instr {
        self.0
            .get(usize::try_from(pc).unwrap_or(usize::MAX))
            .copied()
            .unwrap_or(Instr::Halt)
    }

    /// Highest register index mentioned, for snapshot-size accounting.
    pub fn max_register(&self) -> u8 {
        self.0
            .iter()
            .map(|i| match *i {
                Instr::Set { r, .. } => r,
                Instr::Add { r, s, t }
                | Instr::Monus { r, s, t }
                | Instr::Mul { r, s, t }
                | Instr::Divq { r, s, t }
                | Instr::Mod { r, s, t } => r.max(s).max(t),
                Instr::Jz { r, .. } => r,
                Instr::Jmp { .. } | Instr::Halt => 0,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Gödel number of a program: the word-positional code.
pub fn encode_program(p: &Program) -> BigUint {
    let mut code = BigUint::zero();
    for instr in p.0.iter().rev() {
        code = (code << WORD_BITS) | BigUint::from(instr.word());
    }
    code
}

/// Decode any natural to a program. Invalid words become HALT; the result is
/// canonical, so `decode(0)` is the one-instruction HALT program and
/// `encode(decode(n))` fixes canonical codes.
pub fn decode_program(n: &BigUint) -> Program {
    let mask = (BigUint::from(1u64) << WORD_BITS) - BigUint::from(1u64);
    let mut rest = n.clone();
    let mut instrs = Vec::new();
    while !rest.is_zero() {
        let w: u64 = (&rest & &mask).try_into().expect("word fits u64");
        instrs.push(Instr::from_word(w));
        rest >>= WORD_BITS;
    }
    Program::new(instrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decode_zero_is_halt_program() {
        let p = decode_program(&BigUint::zero());
        assert_eq!(p.0, vec![Instr::Halt]);
    }

    #[test]
    fn golden_code_for_set_then_halt() {
        // word(SET r0, 7) = opcode 1 + (7 << 16); the trailing HALT word is 0.
        let p = Program::new(vec![Instr::Set { r: 0, k: 7 }, Instr::Halt]);
        assert_eq!(encode_program(&p), BigUint::from(458_753u64));
        assert_eq!(decode_program(&BigUint::from(458_753u64)), p);
    }

    #[test]
    fn word_roundtrip_all_opcodes() {
        let instrs = [
            Instr::Halt,
            Instr::Set { r: 13, k: u32::MAX },
            Instr::Add { r: 1, s: 2, t: 3 },
            Instr::Monus { r: 15, s: 0, t: 15 },
            Instr::Mul { r: 4, s: 4, t: 4 },
            Instr::Divq { r: 9, s: 8, t: 7 },
            Instr::Mod { r: 0, s: 1, t: 2 },
            Instr::Jz { r: 3, off: -200 },
            Instr::Jz { r: 3, off: 0 },
            Instr::Jmp { off: 100_000 },
            Instr::Jmp { off: -1 },
        ];
        for i in instrs {
            assert_eq!(Instr::from_word(i.word()), i, "{i:?}");
            assert!(i.word() < 1 << WORD_BITS);
        }
    }

    fn arb_instr() -> impl Strategy<Value = Instr> {
        prop_oneof![
            Just(Instr::Halt),
            (0u8..16, any::<u32>()).prop_map(|(r, k)| Instr::Set { r, k }),
            (0u8..16, 0u8..16, 0u8..16).prop_map(|(r, s, t)| Instr::Add { r, s, t }),
            (0u8..16, 0u8..16, 0u8..16).prop_map(|(r, s, t)| Instr::Monus { r, s, t }),
            (0u8..16, 0u8..16, 0u8..16).prop_map(|(r, s, t)| Instr::Mul { r, s, t }),
            (0u8..16, 0u8..16, 0u8..16).prop_map(|(r, s, t)| Instr::Divq { r, s, t }),
            (0u8..16, 0u8..16, 0u8..16).prop_map(|(r, s, t)| Instr::Mod { r, s, t }),
            (0u8..16, -50i64..50).prop_map(|(r, off)| Instr::Jz { r, off }),
            (-50i64..50).prop_map(|off| Instr::Jmp { off }),
        ]
    }

    proptest! {
        #[test]
        fn program_roundtrip(instrs in proptest::collection::vec(arb_instr(), 0..20)) {
            let p = Program::new(instrs);
            prop_assert_eq!(decode_program(&encode_program(&p)), p);
        }

        #[test]
        fn code_roundtrip_canonical(n in any::<u64>()) {
            // encode . decode fixes every canonical code it produces.
            let n = BigUint::from(n);
            let p = decode_program(&n);
            let code = encode_program(&p);
            prop_assert_eq!(decode_program(&code), p);
        }
    }
}
