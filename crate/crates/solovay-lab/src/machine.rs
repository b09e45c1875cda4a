//! Concrete machines and stage-bounded complexity tables.
//!
//! Two program semantics share one interface. [`CodecMachine`] is a fixed
//! prefix-free decoder, total on its domain, fast enough that exact
//! minimum-program searches are feasible for short outputs; it is the
//! oracle-grade machine. [`DovetailMachine`] is a minimal register machine
//! whose simulations may diverge, which supplies genuinely stage-dependent
//! approximations. [`PlainCodec`] is the plain (non-prefix-free) variant of
//! the codec used for plain complexity.
//!
//! Step counts are deterministic by definition: bits read plus bits written
//! for the codecs, instructions executed for the register machine. That
//! makes "halts in exactly t steps" a decidable, reproducible predicate.
//!
//! # Codec program grammar
//!
//! With `gamma(m)` the self-delimiting code from [`crate::bits`]:
//!
//! | mode | format                                   | output               |
//! |------|------------------------------------------|----------------------|
//! | `0`  | `0 gamma(l+1) payload(l bits)`           | the payload          |
//! | `10` | `10 gamma(n+1)`                          | `0^n`                |
//! | `11` | `11 gamma(k) gamma(l+1) payload`, `k>=2` | payload repeated `k` |
//!
//! A program must consume its input exactly; trailing or missing bits
//! reject. The plain variant keeps the mode bits but drops the payload
//! length header: the payload runs to the end of the program, and the
//! zero-run count is the remaining input read as a binary numeral.

use crate::bits::{gamma_encode, BitReader, BitString};
use crate::ext::ExtNat;

/// Result of running one program against one step budget.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RunOutcome {
    /// The program is complete, well formed, and halts within the budget.
    Halt { output: BitString, steps: u64 },
    /// Well formed so far, but the computation needs more than `budget` steps.
    OutOfBudget,
    /// Not a complete well-formed program (truncated, trailing bits, bad
    /// opcode, non-canonical field).
    Reject,
}

impl RunOutcome {
    pub fn halted(&self) -> Option<(&BitString, u64)> {
        match self {
            RunOutcome::Halt { output, steps } => Some((output, *steps)),
            _ => None,
        }
    }
}

pub trait Machine {
    /// Deterministic execution of `program` with a step budget.
    fn run(&self, program: &BitString, budget: u64) -> RunOutcome;

    fn name(&self) -> &'static str;
}

/// The fixed prefix-free decoder. Total: every complete program halts.
#[derive(Clone, Copy, Debug, Default)]
pub struct CodecMachine;

/// Plain variant of the codec: payload lengths are inferred from the end of
/// the program, so the domain is not prefix-free and `C(x) <= |x| + 2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct PlainCodec;

fn finish_codec(program: &BitString, out_len: u128, budget: u64, materialize: impl FnOnce() -> BitString) -> RunOutcome {
    let steps = program.len() as u128 + out_len;
    if steps > budget as u128 {
        return RunOutcome::OutOfBudget;
    }
    RunOutcome::Halt { output: materialize(), steps: steps as u64 }
}

impl Machine for CodecMachine {
    fn run(&self, program: &BitString, budget: u64) -> RunOutcome {
        let mut r = BitReader::new(program);
        let Some(mode) = r.read_bit() else { return RunOutcome::Reject };
        if !mode {
            // literal
            let Some(len_plus_one) = r.read_gamma() else { return RunOutcome::Reject };
            let Some(payload) = r.read_bits((len_plus_one - 1) as usize) else {
                return RunOutcome::Reject;
            };
            if !r.at_end() {
                return RunOutcome::Reject;
            }
            finish_codec(program, payload.len() as u128, budget, || payload)
        } else {
            let Some(second) = r.read_bit() else { return RunOutcome::Reject };
            if !second {
                // zero run
                let Some(n_plus_one) = r.read_gamma() else { return RunOutcome::Reject };
                if !r.at_end() {
                    return RunOutcome::Reject;
                }
                let n = n_plus_one - 1;
                finish_codec(program, n as u128, budget, || {
                    BitString::from_bits(vec![false; n as usize])
                })
            } else {
                // repeat
                let Some(k) = r.read_gamma() else { return RunOutcome::Reject };
                if k < 2 {
                    return RunOutcome::Reject;
                }
                let Some(len_plus_one) = r.read_gamma() else { return RunOutcome::Reject };
                let Some(payload) = r.read_bits((len_plus_one - 1) as usize) else {
                    return RunOutcome::Reject;
                };
                if !r.at_end() {
                    return RunOutcome::Reject;
                }
                let out_len = payload.len() as u128 * k as u128;
                finish_codec(program, out_len, budget, || {
                    let mut out = BitString::new();
                    for _ in 0..k {
                        out.extend(&payload);
                    }
                    out
                })
            }
        }
    }

    fn name(&self) -> &'static str {
        "codec"
    }
}

impl Machine for PlainCodec {
    fn run(&self, program: &BitString, budget: u64) -> RunOutcome {
        let mut r = BitReader::new(program);
        let Some(mode) = r.read_bit() else { return RunOutcome::Reject };
        if !mode {
            let payload = r.read_bits(program.len() - 1).expect("rest of program");
            finish_codec(program, payload.len() as u128, budget, || payload)
        } else {
            let Some(second) = r.read_bit() else { return RunOutcome::Reject };
            if !second {
                let rest = r.read_bits(program.len() - 2).expect("rest of program");
                if rest.is_empty() || !rest.bit(0) {
                    return RunOutcome::Reject; // numeral must be canonical
                }
                if rest.len() > 63 {
                    // output length at least 2^63 - 1; never within a u64 budget
                    return RunOutcome::OutOfBudget;
                }
                let n = rest.binary_value().expect("canonical numeral") - 1;
                finish_codec(program, n as u128, budget, || {
                    BitString::from_bits(vec![false; n as usize])
                })
            } else {
                let Some(k) = r.read_gamma() else { return RunOutcome::Reject };
                if k < 2 {
                    return RunOutcome::Reject;
                }
                let payload = r.read_bits(program.len() - r.pos()).expect("rest of program");
                let out_len = payload.len() as u128 * k as u128;
                finish_codec(program, out_len, budget, || {
                    let mut out = BitString::new();
                    for _ in 0..k {
                        out.extend(&payload);
                    }
                    out
                })
            }
        }
    }

    fn name(&self) -> &'static str {
        "plain"
    }
}

/// Instructions of the register machine: 4 unbounded registers.
///
/// Encoding: 3-bit opcode, then operands. `Inc` and `DecJz` carry a 2-bit
/// register index; `DecJz` carries `gamma(target+1)` with `target` an
/// absolute instruction index (jumping to the instruction count halts);
/// `Out` carries one bit. Opcodes `100`..`111` are unassigned and reject.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Instr {
    /// `000 rr`: increment register `r`.
    Inc(u8),
    /// `001 rr gamma(target+1)`: if register `r` is zero jump to `target`,
    /// else decrement and fall through.
    DecJz(u8, u64),
    /// `010 b`: append bit `b` to the output.
    Out(bool),
    /// `011`: halt.
    Halt,
}

/// Assembles instructions into a complete program: `gamma(len+1)` header
/// followed by `len` instruction bits.
pub fn assemble(instrs: &[Instr]) -> BitString {
    let mut body = BitString::new();
    for ins in instrs {
        match *ins {
            Instr::Inc(r) => {
                assert!(r < 4);
                body.push(false);
                body.push(false);
                body.push(false);
                body.push(r & 2 != 0);
                body.push(r & 1 != 0);
            }
            Instr::DecJz(r, target) => {
                assert!(r < 4);
                body.push(false);
                body.push(false);
                body.push(true);
                body.push(r & 2 != 0);
                body.push(r & 1 != 0);
                gamma_encode(target + 1, &mut body);
            }
            Instr::Out(b) => {
                body.push(false);
                body.push(true);
                body.push(false);
                body.push(b);
            }
            Instr::Halt => {
                body.push(false);
                body.push(true);
                body.push(true);
            }
        }
    }
    let mut program = BitString::new();
    gamma_encode(body.len() as u64 + 1, &mut program);
    program.extend(&body);
    program
}

/// The register machine. Programs may diverge; the step budget is the only
/// way a run ends besides halting.
#[derive(Clone, Copy, Debug, Default)]
pub struct DovetailMachine;

impl DovetailMachine {
    fn parse(program: &BitString) -> Option<Vec<Instr>> {
        let mut r = BitReader::new(program);
        let len_plus_one = r.read_gamma()?;
        let body = r.read_bits((len_plus_one - 1) as usize)?;
        if !r.at_end() {
            return None;
        }
        let mut br = BitReader::new(&body);
        let mut instrs = Vec::new();
        while !br.at_end() {
            let op = (br.read_bit()? as u8) << 2 | (br.read_bit()? as u8) << 1 | br.read_bit()? as u8;
            let ins = match op {
                0b000 => {
                    let reg = (br.read_bit()? as u8) << 1 | br.read_bit()? as u8;
                    Instr::Inc(reg)
                }
                0b001 => {
                    let reg = (br.read_bit()? as u8) << 1 | br.read_bit()? as u8;
                    let target = br.read_gamma()? - 1;
                    Instr::DecJz(reg, target)
                }
                0b010 => Instr::Out(br.read_bit()?),
                0b011 => Instr::Halt,
                _ => return None,
            };
            instrs.push(ins);
        }
        let count = instrs.len() as u64;
        for ins in &instrs {
            if let Instr::DecJz(_, target) = ins {
                if *target > count {
                    return None;
                }
            }
        }
        Some(instrs)
    }
}

impl Machine for DovetailMachine {
    fn run(&self, program: &BitString, budget: u64) -> RunOutcome {
        let Some(instrs) = Self::parse(program) else { return RunOutcome::Reject };
        let mut regs = [0u64; 4];
        let mut out = BitString::new();
        let mut pc = 0usize;
        let mut steps = 0u64;
        loop {
            if pc == instrs.len() {
                return RunOutcome::Halt { output: out, steps };
            }
            if steps == budget {
                return RunOutcome::OutOfBudget;
            }
            steps += 1;
            match instrs[pc] {
                Instr::Inc(r) => {
                    regs[r as usize] += 1;
                    pc += 1;
                }
                Instr::DecJz(r, target) => {
                    if regs[r as usize] == 0 {
                        pc = target as usize;
                    } else {
                        regs[r as usize] -= 1;
                        pc += 1;
                    }
                }
                Instr::Out(b) => {
                    out.push(b);
                    pc += 1;
                }
                Instr::Halt => {
                    return RunOutcome::Halt { output: out, steps };
                }
            }
        }
    }

    fn name(&self) -> &'static str {
        "dovetail"
    }
}

/// One discovered halting computation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HaltingEvent {
    pub program: BitString,
    pub output: BitString,
    pub steps: u64,
    /// Dovetailing round at which the halt is discovered. Every program in
    /// the pool advances one step per round, so this equals `steps`.
    pub stage: u64,
}

/// Dovetails every program of length at most `budget` for `budget` steps
/// each, one step per round-robin turn, and returns the halting events in
/// discovery order: by round, then by length-lexicographic program index.
///
/// The pool has `2^(budget+1) - 1` members, so this is a desk-scale
/// enumeration; budgets much above 24 are refused.
pub fn enumerate_halting(machine: &dyn Machine, budget: u64) -> Vec<HaltingEvent> {
    assert!(budget <= 26, "enumeration over 2^{} programs refused", budget + 1);
    let mut events = Vec::new();
    let pool = (1u64 << (budget + 1)) - 1;
    for idx in 0..pool {
        let program = BitString::from_index(idx);
        if let RunOutcome::Halt { output, steps } = machine.run(&program, budget) {
            events.push(HaltingEvent { stage: steps, steps, program, output });
        }
    }
    events.sort_by_key(|e| e.stage); // stable: ties stay in index order
    events
}

/// Length of a shortest program producing `x` within the enumeration
/// budget, or `inf`. Nonincreasing in `budget`.
///
/// The search scans programs in length-lexicographic order and stops at the
/// first hit, which is sound because longer programs cannot beat it. A
/// guard refuses searches that would visit more than 2^27 programs.
pub fn k_approx(machine: &dyn Machine, x: &BitString, budget: u64) -> ExtNat {
    let mut visited: u64 = 0;
    for len in 0..=budget.min(62) {
        for suffix in 0..(1u64 << len) {
            visited += 1;
            assert!(visited <= 1 << 27, "minimum-program search beyond 2^27 programs refused");
            let mut program = BitString::new();
            for i in (0..len).rev() {
                program.push((suffix >> i) & 1 == 1);
            }
            if let RunOutcome::Halt { output, steps } = machine.run(&program, budget) {
                debug_assert!(steps <= budget);
                if &output == x {
                    return ExtNat::Fin(len);
                }
            }
        }
    }
    ExtNat::Inf
}

/// Plain complexity at a budget: [`k_approx`] over [`PlainCodec`].
pub fn c_approx(x: &BitString, budget: u64) -> ExtNat {
    k_approx(&PlainCodec, x, budget)
}

/// Budget at which `k_approx` on the codec machine has provably reached the
/// exact minimum for every string of length `len`: the count of programs of
/// length at most `L = len + 2*floor(log2(len+1)) + 3` times `L`. Far more
/// than needed; a literal program and its run fit well inside it.
pub fn stabilization_budget(len: u64) -> u64 {
    let log = 63 - (len + 1).leading_zeros() as u64;
    let l = len + 2 * log + 3;
    ((1u128 << (l + 1)) - 1).saturating_mul(l as u128).min(u64::MAX as u128) as u64
}

/// Serializes events as lines `stage steps |p| p output` (empty strings
/// print as `-`).
pub fn write_events(events: &[HaltingEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            e.stage,
            e.steps,
            e.program.len(),
            e.program,
            e.output
        ));
    }
    out
}

/// Parses the format written by [`write_events`].
pub fn parse_events(text: &str) -> Result<Vec<HaltingEvent>, String> {
    let mut events = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(format!("line {}: expected 5 fields", lineno + 1));
        }
        let stage = fields[0].parse::<u64>().map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let steps = fields[1].parse::<u64>().map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let plen = fields[2].parse::<usize>().map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let program = BitString::parse(fields[3]).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let output = BitString::parse(fields[4]).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if program.len() != plen {
            return Err(format!("line {}: |p| field disagrees with p", lineno + 1));
        }
        events.push(HaltingEvent { stage, steps, program, output });
    }
    Ok(events)
}
