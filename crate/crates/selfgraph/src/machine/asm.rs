//! Assembly for the register machine: a builder with symbolic labels used by
//! the fixed-point templates, and the one-instruction-per-line text format
//! exposed on the command line.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use super::{load_const_instrs, Instr, Program, MAX_JUMP_MAG};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AsmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("jump offset {0} exceeds the encodable magnitude")]
    JumpTooFar(i64),
}

#[derive(Debug, Clone)]
enum Pending {
    Ready(Instr),
    Jz { r: u8, label: String },
    Jmp { label: String },
}

/// Instruction-list builder with labels resolved to relative offsets.
#[derive(Debug, Default)]
pub struct Asm {
    items: Vec<Pending>,
    labels: BTreeMap<String, usize>,
}

impl Asm {
    pub fn new() -> Asm {
        Asm::default()
    }

    pub fn here(&self) -> usize {
        self.items.len()
    }

    pub fn label(&mut self, name: &str) -> &mut Self {
        let prev = self.labels.insert(name.to_string(), self.items.len());
        assert!(prev.is_none(), "duplicate label {name:?}");
        self
    }

    pub fn push(&mut self, i: Instr) -> &mut Self {
        self.items.push(Pending::Ready(i));
        self
    }

    pub fn set(&mut self, r: u8, k: u32) -> &mut Self {
        self.push(Instr::Set { r, k })
    }

    pub fn add(&mut self, r: u8, s: u8, t: u8) -> &mut Self {
        self.push(Instr::Add { r, s, t })
    }

    pub fn monus(&mut self, r: u8, s: u8, t: u8) -> &mut Self {
        self.push(Instr::Monus { r, s, t })
    }

    pub fn mul(&mut self, r: u8, s: u8, t: u8) -> &mut Self {
        self.push(Instr::Mul { r, s, t })
    }

    pub fn divq(&mut self, r: u8, s: u8, t: u8) -> &mut Self {
        self.push(Instr::Divq { r, s, t })
    }

    pub fn modr(&mut self, r: u8, s: u8, t: u8) -> &mut Self {
        self.push(Instr::Mod { r, s, t })
    }

    pub fn jz(&mut self, r: u8, label: &str) -> &mut Self {
        self.items.push(Pending::Jz {
            r,
            label: label.to_string(),
        });
        self
    }

    pub fn jmp(&mut self, label: &str) -> &mut Self {
        self.items.push(Pending::Jmp {
            label: label.to_string(),
        });
        self
    }

    pub fn halt(&mut self) -> &mut Self {
        self.push(Instr::Halt)
    }

    /// Copy a register without scratch: r := 2s − s. Requires r ≠ s.
    pub fn copy(&mut self, r: u8, s: u8) -> &mut Self {
        assert_ne!(r, s, "copy source and destination must differ");
        self.add(r, s, s);
        self.monus(r, r, s)
    }

    /// Load an arbitrary natural constant; straight-line code.
    pub fn load_const(&mut self, target: u8, shift_scratch: u8, chunk_scratch: u8, x: &BigUint) -> &mut Self {
        for i in load_const_instrs(target, shift_scratch, chunk_scratch, x) {
            self.push(i);
        }
        self
    }

    /// Append all instructions of `p` (without its trailing HALT), rewriting
    /// each HALT into a jump to the given label. Internal jumps are relative
    /// and survive unchanged.
    pub fn inline_with_halts_to(&mut self, p: &Program, exit_label: &str) -> &mut Self {
        for instr in &p.0 {
            match instr {
                Instr::Halt => {
                    self.jmp(exit_label);
                }
                other => {
                    self.push(*other);
                }
            }
        }
        self
    }

    pub fn assemble(&self) -> Result<Program, AsmError> {
        let mut out = Vec::with_capacity(self.items.len());
        for (pc, item) in self.items.iter().enumerate() {
            let resolve = |label: &String| -> Result<i64, AsmError> {
                let target = *self
                    .labels
                    .get(label)
                    .ok_or_else(|| AsmError::UnknownLabel(label.clone()))?;
                let off = target as i64 - (pc as i64 + 1);
                if off.unsigned_abs() > MAX_JUMP_MAG {
                    return Err(AsmError::JumpTooFar(off));
                }
                Ok(off)
            };
            out.push(match item {
                Pending::Ready(i) => *i,
                Pending::Jz { r, label } => Instr::Jz {
                    r: *r,
                    off: resolve(label)?,
                },
                Pending::Jmp { label } => Instr::Jmp {
                    off: resolve(label)?,
                },
            });
        }
        Ok(Program::new(out))
    }
}

/// Parse the text format: one instruction per line, `name:` label lines,
/// `#` comments, registers written `r0`..`r15`, jump targets either labels
/// or explicit `+n`/`-n` relative offsets.
pub fn parse_asm(text: &str) -> Result<Program, AsmError> {
    struct Line<'a> {
        no: usize,
        op: &'a str,
        args: Vec<&'a str>,
    }
    let mut labels: BTreeMap<&str, usize> = BTreeMap::new();
    let mut lines: Vec<Line> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_suffix(':') {
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(AsmError::Parse {
                    line: no,
                    message: format!("bad label {line:?}"),
                });
            }
            if labels.insert(name, lines.len()).is_some() {
                return Err(AsmError::DuplicateLabel(name.to_string()));
            }
            continue;
        }
        let (op, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let args: Vec<&str> = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        lines.push(Line { no, op, args });
    }

    let reg = |s: &str, no: usize| -> Result<u8, AsmError> {
        s.strip_prefix('r')
            .and_then(|d| d.parse::<u8>().ok())
            .filter(|&r| r < 16)
            .ok_or_else(|| AsmError::Parse {
                line: no,
                message: format!("bad register {s:?}"),
            })
    };
    let want = |n: usize, args: &[&str], no: usize| -> Result<(), AsmError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(AsmError::Parse {
                line: no,
                message: format!("expected {n} operands, found {}", args.len()),
            })
        }
    };

    let mut out = Vec::with_capacity(lines.len());
    for (pc, line) in lines.iter().enumerate() {
        let no = line.no;
        let target = |s: &str| -> Result<i64, AsmError> {
            if let Some(rest) = s.strip_prefix('+') {
                return rest.parse::<i64>().map_err(|_| AsmError::Parse {
                    line: no,
                    message: format!("bad offset {s:?}"),
                });
            }
            if s.starts_with('-') {
                return s.parse::<i64>().map_err(|_| AsmError::Parse {
                    line: no,
                    message: format!("bad offset {s:?}"),
                });
            }
            let t = *labels
                .get(s)
                .ok_or_else(|| AsmError::UnknownLabel(s.to_string()))?;
            Ok(t as i64 - (pc as i64 + 1))
        };
        let r3 = |f: fn(u8, u8, u8) -> Instr| -> Result<Instr, AsmError> {
            want(3, &line.args, no)?;
            Ok(f(
                reg(line.args[0], no)?,
                reg(line.args[1], no)?,
                reg(line.args[2], no)?,
            ))
        };
        let instr = match line.op.to_ascii_uppercase().as_str() {
            "SET" => {
                want(2, &line.args, no)?;
                Instr::Set {
                    r: reg(line.args[0], no)?,
                    k: line.args[1].parse().map_err(|_| AsmError::Parse {
                        line: no,
                        message: format!("bad constant {:?}", line.args[1]),
                    })?,
                }
            }
            "ADD" => r3(|r, s, t| Instr::Add { r, s, t })?,
            "MONUS" => r3(|r, s, t| Instr::Monus { r, s, t })?,
            "MUL" => r3(|r, s, t| Instr::Mul { r, s, t })?,
            "DIVQ" => r3(|r, s, t| Instr::Divq { r, s, t })?,
            "MOD" => r3(|r, s, t| Instr::Mod { r, s, t })?,
            "JZ" => {
                want(2, &line.args, no)?;
                Instr::Jz {
                    r: reg(line.args[0], no)?,
                    off: target(line.args[1])?,
                }
            }
            "JMP" => {
                want(1, &line.args, no)?;
                Instr::Jmp {
                    off: target(line.args[0])?,
                }
            }
            "HALT" => {
                want(0, &line.args, no)?;
                Instr::Halt
            }
            other => {
                return Err(AsmError::Parse {
                    line: no,
                    message: format!("unknown instruction {other:?}"),
                })
            }
        };
        out.push(instr);
    }
    Ok(Program::new(out))
}

/// Print a program in the text format with explicit relative jump offsets.
pub fn print_asm(p: &Program) -> String {
    let mut out = String::new();
    for instr in &p.0 {
        let line = match *instr {
            Instr::Set { r, k } => format!("SET r{r}, {k}"),
            Instr::Add { r, s, t } => format!("ADD r{r}, r{s}, r{t}"),
            Instr::Monus { r, s, t } => format!("MONUS r{r}, r{s}, r{t}"),
            Instr::Mul { r, s, t } => format!("MUL r{r}, r{s}, r{t}"),
            Instr::Divq { r, s, t } => format!("DIVQ r{r}, r{s}, r{t}"),
            Instr::Mod { r, s, t } => format!("MOD r{r}, r{s}, r{t}"),
            Instr::Jz { r, off } => format!("JZ r{r}, {}", fmt_off(off)),
            Instr::Jmp { off } => format!("JMP {}", fmt_off(off)),
            Instr::Halt => "HALT".to_string(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn fmt_off(off: i64) -> String {
    if off >= 0 {
        format!("+{off}")
    } else {
        format!("{off}")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run_program, RunOutcome};
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn builder_resolves_labels() {
        let mut a = Asm::new();
        // r0 := r0 + r0 via a loop that moves r0 into r2 twice.
        a.set(1, 1);
        a.label("loop");
        a.jz(0, "done");
        a.monus(0, 0, 1);
        a.add(2, 2, 1);
        a.add(2, 2, 1);
        a.jmp("loop");
        a.label("done");
        a.copy(0, 2);
        a.halt();
        let p = a.assemble().unwrap();
        let out = run_program(&p, &BigUint::from(21u32), 10_000);
        assert_eq!(out.output(), Some(&BigUint::from(42u32)));
    }

    #[test]
    fn text_roundtrip() {
        let text = "\
# doubles the input
  SET r1, 1
loop:
  JZ r0, done
  MONUS r0, r0, r1
  ADD r2, r2, r1
  ADD r2, r2, r1
  JMP loop
done:
  ADD r0, r2, r2
  MONUS r0, r0, r2
  HALT
";
        let p = parse_asm(text).unwrap();
        let reprinted = print_asm(&p);
        let again = parse_asm(&reprinted).unwrap();
        assert_eq!(p, again);
        match run_program(&p, &BigUint::from(5u32), 1000) {
            RunOutcome::Halted { output, .. } => assert_eq!(output, BigUint::from(10u32)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_asm("SET r0, 1\nBOGUS r1\n").unwrap_err();
        match err {
            AsmError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_label_rejected() {
        assert!(matches!(
            parse_asm("JMP nowhere\n"),
            Err(AsmError::UnknownLabel(_))
        ));
    }
}
