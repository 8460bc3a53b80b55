//! Small-step interpreter. Deterministic; the step count of a halting run is
//! exactly the number of executed steps (the initial snapshot is C_0, and a
//! program whose first instruction is HALT halts in 0 steps).
//!
//! Jumps are taken gradually: a taken jump of magnitude m first advances to
//! the next instruction and then slides the program counter one position per
//! step for m further steps, without fetching. The snapshot's slide field
//! holds the remaining travel as 2·remaining + direction; values 0 and 1
//! mean normal fetch-execute. A backward slide that reaches position 0 with
//! travel remaining spins forever. This keeps every step's effect on the
//! program counter a single-position move, which is what the trace
//! arithmetization expresses with one multiplication per step.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use super::{decode_program, Instr, Program, REG_COUNT};

/// One machine configuration: program counter, slide state, register file.
/// Registers not stored read 0; the register count is fixed by the operand
/// width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub pc: u64,
    /// 2·remaining-slide + direction (0 forward, 1 backward); < 2 when the
    /// machine is fetching normally.
    pub slide: u64,
    pub regs: Vec<BigUint>,
}

impl Snapshot {
    pub fn initial(input: &BigUint) -> Snapshot {
        let mut regs = vec![BigUint::zero(); REG_COUNT];
        regs[0] = input.clone();
        Snapshot {
            pc: 0,
            slide: 0,
            regs,
        }
    }

    pub fn reg(&self, i: u8) -> &BigUint {
        &self.regs[i as usize]
    }

    pub fn sliding(&self) -> bool {
        self.slide >= 2
    }
}

/// Is this snapshot halted under `p`? Halted means not sliding and the
/// fetched instruction is HALT (which includes any pc at or beyond the end
/// of the code).
pub fn halted(p: &Program, s: &Snapshot) -> bool {
    !s.sliding() && p.instr(s.pc).is_halt()
}

/// Encode a jump offset as the slide field the instruction word carries:
/// 2·magnitude + direction.
pub fn slide_encoding(off: i64) -> u64 {
    if off >= 0 {
        2 * off as u64
    } else {
        2 * off.unsigned_abs() + 1
    }
}

/// Execute one step. Precondition: not halted.
pub fn step(p: &Program, s: &Snapshot) -> Snapshot {
    let mut next = s.clone();
    if s.sliding() {
        if s.slide & 1 == 0 {
            next.pc += 1;
            next.slide -= 2;
        } else if s.pc > 0 {
            next.pc -= 1;
            next.slide -= 2;
        }
        // Backward at position 0 with travel remaining: spin unchanged.
        return next;
    }
    let fetched = p.instr(s.pc);
    match fetched {
        Instr::Halt => panic!("step on a halted snapshot"),
        Instr::Set { r, k } => {
            next.regs[r as usize] = BigUint::from(k);
            next.pc += 1;
        }
        Instr::Add { r, s: a, t: b } => {
            next.regs[r as usize] = s.reg(a) + s.reg(b);
            next.pc += 1;
        }
        Instr::Monus { r, s: a, t: b } => {
            let (x, y) = (s.reg(a), s.reg(b));
            next.regs[r as usize] = if x >= y { x - y } else { BigUint::zero() };
            next.pc += 1;
        }
        Instr::Mul { r, s: a, t: b } => {
            next.regs[r as usize] = s.reg(a) * s.reg(b);
            next.pc += 1;
        }
        Instr::Divq { r, s: a, t: b } => {
            let d = s.reg(b);
            next.regs[r as usize] = if d.is_zero() {
                BigUint::zero()
            } else {
                s.reg(a).div_floor(d)
            };
            next.pc += 1;
        }
        Instr::Mod { r, s: a, t: b } => {
            let d = s.reg(b);
            next.regs[r as usize] = if d.is_zero() {
                BigUint::zero()
            } else {
                s.reg(a).mod_floor(d)
            };
            next.pc += 1;
        }
        Instr::Jz { r, off } => {
            next.pc += 1;
            if s.reg(r).is_zero() {
                next.slide = slide_encoding(off);
            }
        }
        Instr::Jmp { off } => {
            next.pc += 1;
            next.slide = slide_encoding(off);
        }
    }
    next
}

/// Outcome of a budgeted run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted { output: BigUint, steps: u64 },
    OutOfBudget { steps: u64 },
}

impl RunOutcome {
    pub fn output(&self) -> Option<&BigUint> {
        match self {
            RunOutcome::Halted { output, .. } => Some(output),
            RunOutcome::OutOfBudget { .. } => None,
        }
    }

    pub fn expect_halted(self) -> (BigUint, u64) {
        match self {
            RunOutcome::Halted { output, steps } => (output, steps),
            RunOutcome::OutOfBudget { steps } => {
                panic!("run exhausted its budget after {steps} steps")
            }
        }
    }
}

/// Run the program coded by `n` on `input`. A run that halts within the
/// budget is always reported Halted, with its exact step count.
pub fn run(n: &BigUint, input: &BigUint, step_budget: u64) -> RunOutcome {
    run_program(&decode_program(n), input, step_budget)
}

pub fn run_program(p: &Program, input: &BigUint, step_budget: u64) -> RunOutcome {
    let mut s = Snapshot::initial(input);
    let mut steps: u64 = 0;
    loop {
        if halted(p, &s) {
            return RunOutcome::Halted {
                output: s.regs[0].clone(),
                steps,
            };
        }
        if steps == step_budget {
            return RunOutcome::OutOfBudget { steps };
        }
        s = step(p, &s);
        steps += 1;
    }
}

/// Run and keep the whole snapshot sequence C_0..C_a. For certificate
/// construction and the trace-predicate oracle; budgeted like `run`.
pub fn trace_run(p: &Program, input: &BigUint, step_budget: u64) -> (Vec<Snapshot>, RunOutcome) {
    let mut s = Snapshot::initial(input);
    let mut snaps = vec![s.clone()];
    let mut steps: u64 = 0;
    loop {
        if halted(p, &s) {
            let out = RunOutcome::Halted {
                output: s.regs[0].clone(),
                steps,
            };
            return (snaps, out);
        }
        if steps == step_budget {
            return (snaps, RunOutcome::OutOfBudget { steps });
        }
        s = step(p, &s);
        snaps.push(s.clone());
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::super::encode_program;
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn immediate_halt_outputs_input_in_zero_steps() {
        let p = Program::new(vec![Instr::Halt]);
        assert_eq!(
            run(&encode_program(&p), &big(5), 100),
            RunOutcome::Halted {
                output: big(5),
                steps: 0
            }
        );
    }

    #[test]
    fn set_then_halt_is_one_step() {
        let p = Program::new(vec![Instr::Set { r: 0, k: 7 }, Instr::Halt]);
        assert_eq!(
            run(&encode_program(&p), &big(0), 100),
            RunOutcome::Halted {
                output: big(7),
                steps: 1
            }
        );
    }

    #[test]
    fn infinite_loop_exhausts_budget() {
        let p = Program::new(vec![Instr::Jmp { off: -1 }]);
        assert_eq!(
            run_program(&p, &big(0), 10_000),
            RunOutcome::OutOfBudget { steps: 10_000 }
        );
    }

    #[test]
    fn halting_exactly_at_budget_is_halted() {
        let p = Program::new(vec![Instr::Set { r: 0, k: 7 }, Instr::Halt]);
        assert_eq!(
            run_program(&p, &big(0), 1),
            RunOutcome::Halted {
                output: big(7),
                steps: 1
            }
        );
    }

    #[test]
    fn division_by_zero_convention() {
        let p = Program::new(vec![
            Instr::Set { r: 1, k: 9 },
            Instr::Set { r: 2, k: 0 },
            Instr::Divq { r: 3, s: 1, t: 2 },
            Instr::Mod { r: 4, s: 1, t: 2 },
            Instr::Add { r: 0, s: 3, t: 4 },
            Instr::Halt,
        ]);
        assert_eq!(run_program(&p, &big(0), 100).expect_halted().0, big(0));
    }

    #[test]
    fn backward_jump_past_start_spins() {
        let p = Program::new(vec![Instr::Jz { r: 1, off: -5 }, Instr::Halt]);
        assert_eq!(
            run_program(&p, &big(0), 50),
            RunOutcome::OutOfBudget { steps: 50 }
        );
    }

    #[test]
    fn jump_slides_one_position_per_step() {
        // JMP +2 over two dead SETs: 1 step to take the jump, 2 slide steps.
        let p = Program::new(vec![
            Instr::Jmp { off: 2 },
            Instr::Set { r: 0, k: 1 },
            Instr::Set { r: 0, k: 2 },
            Instr::Set { r: 0, k: 3 },
            Instr::Halt,
        ]);
        let (out, steps) = run_program(&p, &big(0), 100).expect_halted();
        assert_eq!(out, big(3));
        assert_eq!(steps, 1 + 2 + 1);

        // Backward: loop decrementing r0 once.
        let p = Program::new(vec![
            Instr::Set { r: 1, k: 1 },
            Instr::Jz { r: 0, off: 2 },
            Instr::Monus { r: 0, s: 0, t: 1 },
            Instr::Jmp { off: -3 },
            Instr::Halt,
        ]);
        let (out, steps) = run_program(&p, &big(1), 100).expect_halted();
        assert_eq!(out, big(0));
        // SET; JZ (not taken); MONUS; JMP takes 1 step + 3 slides back to
        // pc 1; the JZ taken costs 1 step + 2 slides forward to pc 4.
        assert_eq!(steps, 1 + 1 + 1 + 4 + 3);
    }

    #[test]
    fn determinism() {
        let p = Program::new(vec![
            Instr::Set { r: 1, k: 3 },
            Instr::Add { r: 0, s: 0, t: 1 },
            Instr::Set { r: 2, k: 1 },
            Instr::Monus { r: 3, s: 0, t: 1 },
            Instr::Jz { r: 3, off: -3 },
            Instr::Halt,
        ]);
        let a = run_program(&p, &big(4), 1000);
        let b = run_program(&p, &big(4), 1000);
        assert_eq!(a, b);
    }

    #[test]
    fn trace_matches_run() {
        let p = Program::new(vec![
            Instr::Set { r: 0, k: 9 },
            Instr::Jmp { off: 1 },
            Instr::Set { r: 0, k: 1 },
            Instr::Halt,
        ]);
        let (snaps, out) = trace_run(&p, &big(0), 100);
        let (output, steps) = out.expect_halted();
        assert_eq!(output, big(9));
        assert_eq!(snaps.len() as u64, steps + 1);
        assert!(halted(&p, snaps.last().unwrap()));
        for w in snaps.windows(2) {
            assert_eq!(step(&p, &w[0]), w[1]);
        }
    }
}
