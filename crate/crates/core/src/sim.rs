//! Classical and statevector simulation of cascades.
//!
//! Qubit `q` of a width-`W` register is bit `W - 1 - q` of the integer
//! encoding, so printed patterns read qubit 0 first.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind, Polarity, QubitRole};
use crate::pla::{OutBit, SpecTable};

/// Widest register the classical simulator accepts.
pub const MAX_CLASSICAL_WIDTH: usize = 128;
/// Widest register for exhaustive enumeration and statevectors.
pub const MAX_DENSE_WIDTH: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("gate {index} ({kind}) has no classical action")]
    NonClassicalGate { index: usize, kind: GateKind },
    #[error("width {width} exceeds the limit of {limit}")]
    TooWide { width: usize, limit: usize },
    #[error("circuit does not induce a bijection")]
    NotBijective,
    #[error("role mismatch: {0}")]
    RoleMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPattern {
    pub width: usize,
    pub bits: u128,
}

impl BitPattern {
    pub fn new(width: usize, bits: u128) -> Self {
        assert!(width <= MAX_CLASSICAL_WIDTH);
        BitPattern { width, bits }
    }

    pub fn zero(width: usize) -> Self {
        BitPattern::new(width, 0)
    }

    /// Parses an MSB-first string of `0`/`1`.
    pub fn parse(s: &str) -> Option<Self> {
        if s.len() > MAX_CLASSICAL_WIDTH {
            return None;
        }
        let mut bits = 0u128;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return None,
                };
        }
        Some(BitPattern::new(s.len(), bits))
    }

    fn mask(&self, qubit: usize) -> u128 {
        1u128 << (self.width - 1 - qubit)
    }

    pub fn get(&self, qubit: usize) -> bool {
        self.bits & self.mask(qubit) != 0
    }

    pub fn set(&mut self, qubit: usize, value: bool) {
        let m = self.mask(qubit);
        if value {
            self.bits |= m;
        } else {
            self.bits &= !m;
        }
    }
}

impl fmt::Display for BitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.width {
            f.write_str(if self.get(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Formats `value` as `width` bits, most significant first.
pub fn bitstring(value: u64, width: usize) -> String {
    (0..width).map(|i| if (value >> (width - 1 - i)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// A classical cascade reduced to mask operations.
#[derive(Debug, Clone)]
pub struct Compiled {
    width: usize,
    ops: Vec<(u128, u128, u128)>,
}

impl Compiled {
    pub fn new(c: &Circuit) -> Result<Self, SimError> {
        if c.width > MAX_CLASSICAL_WIDTH {
            return Err(SimError::TooWide { width: c.width, limit: MAX_CLASSICAL_WIDTH });
        }
        let bit = |q: usize| 1u128 << (c.width - 1 - q);
        let mut ops = Vec::with_capacity(c.gates.len());
        for (index, g) in c.gates.iter().enumerate() {
            if !g.kind.is_classical() {
                return Err(SimError::NonClassicalGate { index, kind: g.kind });
            }
            let (mut care, mut value) = (0u128, 0u128);
            for ctl in &g.controls {
                care |= bit(ctl.qubit);
                if ctl.polarity == Polarity::Positive {
                    value |= bit(ctl.qubit);
                }
            }
            ops.push((care, value, bit(g.target)));
        }
        Ok(Compiled { width: c.width, ops })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn run(&self, mut bits: u128) -> u128 {
        for &(care, value, target) in &self.ops {
            if bits & care == value {
                bits ^= target;
            }
        }
        bits
    }
}

pub fn apply_classical(c: &Circuit, input: BitPattern) -> Result<BitPattern, SimError> {
    assert_eq!(input.width, c.width, "pattern width must match the circuit");
    let compiled = Compiled::new(c)?;
    Ok(BitPattern::new(c.width, compiled.run(input.bits)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    pub width: usize,
    pub map: Vec<u64>,
}

pub fn induced_permutation(c: &Circuit) -> Result<Permutation, SimError> {
    if c.width > MAX_DENSE_WIDTH {
        return Err(SimError::TooWide { width: c.width, limit: MAX_DENSE_WIDTH });
    }
    let compiled = Compiled::new(c)?;
    let map: Vec<u64> = (0..1u128 << c.width).map(|x| compiled.run(x) as u64).collect();
    if !crate::embed::is_permutation(&map) {
        return Err(SimError::NotBijective);
    }
    Ok(Permutation { width: c.width, map })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    /// Only function outputs are checked; garbage is ignored.
    MinimalQubit,
    /// Function outputs are checked and the inputs must come back unchanged.
    DomainPreserving,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub input: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub total_minterms: u64,
    pub checked: u64,
    pub mismatches: Vec<Mismatch>,
    pub passed: bool,
}

/// Mismatches beyond this many are counted but not recorded.
const MISMATCH_SAMPLE: usize = 32;

struct RoleLayout {
    inputs: Vec<usize>,
    ancillas: Vec<usize>,
    outputs: Vec<usize>,
}

fn role_layout(c: &Circuit, spec: &SpecTable) -> Result<RoleLayout, SimError> {
    let roles = c.roles.as_ref().ok_or_else(|| SimError::RoleMismatch("circuit carries no roles".into()))?;
    if roles.len() != c.width {
        return Err(SimError::RoleMismatch(format!("{} roles for {} qubits", roles.len(), c.width)));
    }
    let pick = |f: &dyn Fn(usize) -> bool| (0..c.width).filter(|&q| f(q)).collect::<Vec<_>>();
    let inputs = pick(&|q| roles[q].input == QubitRole::FunctionInput);
    let ancillas = pick(&|q| roles[q].input == QubitRole::Ancilla);
    let outputs = pick(&|q| roles[q].output == QubitRole::FunctionOutput);
    if inputs.len() != spec.n {
        return Err(SimError::RoleMismatch(format!("{} input qubits for {} inputs", inputs.len(), spec.n)));
    }
    if outputs.len() != spec.m {
        return Err(SimError::RoleMismatch(format!("{} output qubits for {} outputs", outputs.len(), spec.m)));
    }
    Ok(RoleLayout { inputs, ancillas, outputs })
}

/// Runs every specified minterm with ancillas cleared and compares the result.
pub fn verify_oracle(c: &Circuit, spec: &SpecTable, mode: VerifyMode) -> Result<VerificationReport, SimError> {
    check_rows(c, spec, mode, false)
}

/// Domain-preserving check with every ancilla set to 1: outputs must read
/// the complement of the function bits.
pub fn verify_xor_shift(c: &Circuit, spec: &SpecTable) -> Result<VerificationReport, SimError> {
    let layout = role_layout(c, spec)?;
    if layout.ancillas != layout.outputs {
        return Err(SimError::RoleMismatch("ancilla qubits do not carry the outputs".into()));
    }
    check_rows(c, spec, VerifyMode::DomainPreserving, true)
}

fn check_rows(
    c: &Circuit,
    spec: &SpecTable,
    mode: VerifyMode,
    ancilla_ones: bool,
) -> Result<VerificationReport, SimError> {
    let layout = role_layout(c, spec)?;
    let compiled = Compiled::new(c)?;
    let bit = |q: usize| 1u128 << (c.width - 1 - q);
    let ancilla_mask: u128 = if ancilla_ones { layout.ancillas.iter().map(|&q| bit(q)).sum() } else { 0 };
    let mut mismatches = Vec::new();
    let mut failures = 0usize;
    for (&x, bits) in &spec.entries {
        let mut state = ancilla_mask;
        for (k, &q) in layout.inputs.iter().enumerate() {
            if (x >> (spec.n - 1 - k)) & 1 == 1 {
                state |= bit(q);
            }
        }
        let out = compiled.run(state);
        let mut ok = true;
        let mut expected = String::with_capacity(spec.m + spec.n);
        let mut got = String::with_capacity(spec.m + spec.n);
        for (j, &q) in layout.outputs.iter().enumerate() {
            let value = out & bit(q) != 0;
            let shifted = ancilla_mask & bit(q) != 0;
            got.push(if value { '1' } else { '0' });
            match bits[j] {
                OutBit::DontCare => expected.push('-'),
                b => {
                    let want = (b == OutBit::One) != shifted;
                    expected.push(if want { '1' } else { '0' });
                    ok &= want == value;
                }
            }
        }
        if mode == VerifyMode::DomainPreserving {
            expected.push(' ');
            got.push(' ');
            for &q in &layout.inputs {
                let before = state & bit(q) != 0;
                let after = out & bit(q) != 0;
                expected.push(if before { '1' } else { '0' });
                got.push(if after { '1' } else { '0' });
                ok &= before == after;
            }
        }
        if !ok {
            failures += 1;
            if mismatches.len() < MISMATCH_SAMPLE {
                mismatches.push(Mismatch { input: bitstring(x, spec.n), expected, got });
            }
        }
    }
    Ok(VerificationReport {
        total_minterms: 1u64 << spec.n,
        checked: spec.len() as u64,
        passed: failures == 0,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub width: usize,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(width: usize, index: u64) -> Result<Self, SimError> {
        if width > MAX_DENSE_WIDTH {
            return Err(SimError::TooWide { width, limit: MAX_DENSE_WIDTH });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << width];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amplitudes })
    }

    pub fn zero(width: usize) -> Result<Self, SimError> {
        StateVector::basis(width, 0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.width - 1 - qubit)
    }

    fn apply_gate(&mut self, g: &Gate) {
        let t = self.bit(g.target);
        let (mut care, mut value) = (0usize, 0usize);
        for ctl in &g.controls {
            care |= self.bit(ctl.qubit);
            if ctl.polarity == Polarity::Positive {
                value |= self.bit(ctl.qubit);
            }
        }
        let amps = &mut self.amplitudes;
        match g.kind {
            GateKind::X | GateKind::Mcx => {
                for i in 0..amps.len() {
                    if i & t == 0 && i & care == value {
                        amps.swap(i, i | t);
                    }
                }
            }
            GateKind::Z | GateKind::Mcz => {
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & t != 0 && i & care == value {
                        *a = -*a;
                    }
                }
            }
            GateKind::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..amps.len() {
                    if i & t == 0 {
                        let (a, b) = (amps[i], amps[i | t]);
                        amps[i] = (a + b) * s;
                        amps[i | t] = (a - b) * s;
                    }
                }
            }
        }
    }
}

pub fn apply_statevector(c: &Circuit, s: &StateVector) -> Result<StateVector, SimError> {
    if c.width > MAX_DENSE_WIDTH {
        return Err(SimError::TooWide { width: c.width, limit: MAX_DENSE_WIDTH });
    }
    assert_eq!(c.width, s.width, "state width must match the circuit");
    let mut out = s.clone();
    for g in &c.gates {
        out.apply_gate(g);
    }
    Ok(out)
}

/// Nonzero outcome probabilities keyed by basis index.
pub fn measure_distribution(s: &StateVector) -> BTreeMap<u64, f64> {
    s.probabilities().into_iter().enumerate().filter(|(_, p)| *p > 0.0).map(|(i, p)| (i as u64, p)).collect()
}

/// Outcome probabilities of `qubits` alone, indexed with `qubits[0]` as the
/// most significant bit.
pub fn marginal(s: &StateVector, qubits: &[usize]) -> Vec<f64> {
    let k = qubits.len();
    let mut out = vec![0.0; 1 << k];
    for (i, a) in s.amplitudes.iter().enumerate() {
        let mut idx = 0usize;
        for &q in qubits {
            idx = (idx << 1) | usize::from(i & s.bit(q) != 0);
        }
        out[idx] += a.norm_sqr();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub width: usize,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl Histogram {
    /// Most frequent outcome, smallest index on ties.
    pub fn top(&self) -> Option<(u64, u64)> {
        self.counts.iter().map(|(&k, &v)| (k, v)).max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
    }

    pub fn count(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    /// `bitstring,count,probability` rows in ascending bitstring order.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bitstring", "count", "probability"]).expect("in-memory write");
        for (&k, &v) in &self.counts {
            let p = v as f64 / self.shots as f64;
            w.write_record([bitstring(k, self.width), v.to_string(), p.to_string()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

/// Draws `shots` outcomes from a probability vector over `width` bits.
pub fn sample_probabilities(probs: &[f64], width: usize, shots: u64, seed: u64) -> Histogram {
    let mut counts = BTreeMap::new();
    if shots > 0 {
        let dist = WeightedIndex::new(probs).expect("probabilities must have positive mass");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..shots {
            *counts.entry(dist.sample(&mut rng) as u64).or_insert(0) += 1;
        }
    }
    Histogram { width, shots, counts }
}

pub fn sample(s: &StateVector, shots: u64, seed: u64) -> Histogram {
    sample_probabilities(&s.probabilities(), s.width, shots, seed)
}
