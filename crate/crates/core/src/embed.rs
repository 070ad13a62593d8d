//! Embedding irreversible tables into permutations.
//!
//! [`rtt_embed`] adds garbage outputs (and ancilla inputs when needed) so that
//! every specified row maps to a distinct pattern; the `complete_onto_*`
//! functions then pair the leftover inputs and outputs to obtain a bijection.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::QubitRole;
use crate::pla::{OutBit, SpecTable, DEFAULT_EXPANSION_LIMIT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("table still contains don't-care outputs; resolve them first")]
    UnresolvedDontCare,
    #[error("embedding needs {width} lines, above the limit of {limit}")]
    TooWide { width: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResolvePolicy {
    #[default]
    Zeros,
    /// Pick, row by row, the completion whose pattern is currently least used.
    MinimizeDuplication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// Largest number of specified rows sharing one output pattern.
    #[serde(rename = "d")]
    pub duplication: usize,
    /// Garbage outputs added.
    #[serde(rename = "v")]
    pub garbage: usize,
    /// Ancilla inputs added.
    #[serde(rename = "w")]
    pub ancilla: usize,
    #[serde(rename = "n_total")]
    pub width: usize,
    pub specified_rows: usize,
    pub completed_rows: usize,
    pub identical_pairings: usize,
}

impl EmbeddingReport {
    pub fn record_completion(&mut self, stats: CompletionStats) {
        self.completed_rows = stats.completed_rows;
        self.identical_pairings = stats.identical_pairings;
    }
}

/// Garbage bits needed to tell apart `duplication` rows with the same output.
pub fn garbage_bits(duplication: usize) -> usize {
    if duplication <= 1 {
        0
    } else {
        (usize::BITS - (duplication - 1).leading_zeros()) as usize
    }
}

/// Column layout of an RTT embedding: `x ‖ ancilla` on the input side and
/// `f ‖ garbage ‖ pad` on the output side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub m: usize,
    pub garbage: usize,
    pub ancilla: usize,
    /// Extra garbage columns when `n > m + garbage`.
    pub pad: usize,
}

impl Layout {
    pub fn for_table(n: usize, m: usize, duplication: usize) -> Self {
        let garbage = garbage_bits(duplication);
        let ancilla = (garbage + m).saturating_sub(n);
        let pad = n.saturating_sub(m + garbage);
        Layout { n, m, garbage, ancilla, pad }
    }

    pub fn width(&self) -> usize {
        self.n + self.ancilla
    }

    pub fn roles_in(&self) -> Vec<QubitRole> {
        let mut roles = vec![QubitRole::FunctionInput; self.n];
        roles.resize(self.width(), QubitRole::Ancilla);
        roles
    }

    pub fn roles_out(&self) -> Vec<QubitRole> {
        let mut roles = vec![QubitRole::FunctionOutput; self.m];
        roles.resize(self.width(), QubitRole::Garbage);
        roles
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CompletionStats {
    pub completed_rows: usize,
    pub identical_pairings: usize,
}

/// Injective map on `width`-bit patterns with some rows left open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialEmbedding {
    pub width: usize,
    pub map: Vec<Option<u64>>,
    pub roles_in: Vec<QubitRole>,
    pub roles_out: Vec<QubitRole>,
}

impl PartialEmbedding {
    /// Plain partial map with every column labelled as function data.
    pub fn from_map(width: usize, map: Vec<Option<u64>>) -> Self {
        assert_eq!(map.len(), 1usize << width);
        PartialEmbedding {
            width,
            map,
            roles_in: vec![QubitRole::FunctionInput; width],
            roles_out: vec![QubitRole::FunctionOutput; width],
        }
    }

    pub fn specified_rows(&self) -> usize {
        self.map.iter().filter(|v| v.is_some()).count()
    }

    fn unused(&self) -> (Vec<u64>, Vec<bool>) {
        let size = self.map.len();
        let mut used = vec![false; size];
        for y in self.map.iter().flatten() {
            debug_assert!(!used[*y as usize], "partial map is not injective");
            used[*y as usize] = true;
        }
        let inputs = (0..size as u64).filter(|&x| self.map[x as usize].is_none()).collect();
        (inputs, used)
    }
}

/// A completely specified reversible function on `width` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversibleSpec {
    pub width: usize,
    pub perm: Vec<u64>,
    pub roles_in: Vec<QubitRole>,
    pub roles_out: Vec<QubitRole>,
    pub completion: CompletionStats,
}

impl ReversibleSpec {
    /// Wraps an explicit permutation, all columns labelled as function data.
    pub fn from_perm(perm: Vec<u64>) -> Self {
        let width = perm.len().trailing_zeros() as usize;
        assert_eq!(perm.len(), 1usize << width, "permutation size must be a power of two");
        ReversibleSpec {
            width,
            perm,
            roles_in: vec![QubitRole::FunctionInput; width],
            roles_out: vec![QubitRole::FunctionOutput; width],
            completion: CompletionStats::default(),
        }
    }

    pub fn is_bijective(&self) -> bool {
        is_permutation(&self.perm)
    }
}

pub fn is_permutation(map: &[u64]) -> bool {
    let mut seen = vec![false; map.len()];
    for &y in map {
        match seen.get_mut(y as usize) {
            Some(slot) if !*slot => *slot = true,
            _ => return false,
        }
    }
    true
}

fn pattern_value(bits: &[OutBit]) -> u64 {
    bits.iter().fold(0, |acc, b| (acc << 1) | u64::from(*b == OutBit::One))
}

pub fn max_output_multiplicity(spec: &SpecTable) -> Result<usize, EmbedError> {
    if spec.has_dont_cares() {
        return Err(EmbedError::UnresolvedDontCare);
    }
    let mut counts: HashMap<&[OutBit], usize> = HashMap::new();
    for bits in spec.entries.values() {
        *counts.entry(bits.as_slice()).or_default() += 1;
    }
    Ok(counts.into_values().max().unwrap_or(0))
}

/// Upper bound on completions tried per row under `MinimizeDuplication`.
const MAX_COMPLETIONS: u64 = 1 << 16;

pub fn resolve_dontcares(spec: &SpecTable, policy: ResolvePolicy) -> SpecTable {
    let mut out = spec.clone();
    match policy {
        ResolvePolicy::Zeros => {
            for bits in out.entries.values_mut() {
                for b in bits.iter_mut().filter(|b| **b == OutBit::DontCare) {
                    *b = OutBit::Zero;
                }
            }
        }
        ResolvePolicy::MinimizeDuplication => {
            let mut counts: HashMap<Vec<OutBit>, usize> = HashMap::new();
            for bits in spec.entries.values().filter(|b| !b.contains(&OutBit::DontCare)) {
                *counts.entry(bits.clone()).or_default() += 1;
            }
            for bits in out.entries.values_mut() {
                let free: Vec<usize> = (0..bits.len()).filter(|&j| bits[j] == OutBit::DontCare).collect();
                if free.is_empty() {
                    continue;
                }
                let k = free.len();
                // counting order over the free columns, leftmost column most significant;
                // past MAX_COMPLETIONS only the low-order free columns vary
                let tries = if k >= 16 { MAX_COMPLETIONS } else { 1 << k };
                let mut best: Option<(usize, Vec<OutBit>)> = None;
                for counter in 0..tries {
                    let mut candidate = bits.clone();
                    for (pos, &col) in free.iter().enumerate() {
                        let shift = k - 1 - pos;
                        let one = shift < 64 && (counter >> shift) & 1 == 1;
                        candidate[col] = if one { OutBit::One } else { OutBit::Zero };
                    }
                    let used = counts.get(&candidate).copied().unwrap_or(0);
                    if best.as_ref().is_none_or(|(c, _)| used < *c) {
                        let done = used == 0;
                        best = Some((used, candidate));
                        if done {
                            break;
                        }
                    }
                }
                let (_, chosen) = best.expect("at least one completion");
                *counts.entry(chosen.clone()).or_default() += 1;
                *bits = chosen;
            }
        }
    }
    out
}

pub fn rtt_embed(spec: &SpecTable) -> Result<(PartialEmbedding, EmbeddingReport), EmbedError> {
    rtt_embed_with_limit(spec, DEFAULT_EXPANSION_LIMIT)
}

/// Embeds a resolved table into an injective partial map.
///
/// Specified row `x` becomes `(x ‖ 0) → (f(x) ‖ g ‖ 0)` where `g` counts,
/// from zero and in ascending minterm order, the earlier rows that share the
/// output pattern `f(x)`. Rows with a nonzero ancilla stay open.
pub fn rtt_embed_with_limit(spec: &SpecTable, limit: usize) -> Result<(PartialEmbedding, EmbeddingReport), EmbedError> {
    let duplication = max_output_multiplicity(spec)?;
    let layout = Layout::for_table(spec.n, spec.m, duplication);
    let width = layout.width();
    if width > limit || width >= 64 {
        return Err(EmbedError::TooWide { width, limit });
    }

    let mut map = vec![None; 1usize << width];
    let mut group_counter: HashMap<u64, u64> = HashMap::new();
    let tail = layout.garbage + layout.pad;
    for (&x, bits) in &spec.entries {
        let f = pattern_value(bits);
        let g = group_counter.entry(f).or_insert(0);
        let input = x << layout.ancilla;
        let output = (f << tail) | (*g << layout.pad);
        *g += 1;
        map[input as usize] = Some(output);
    }

    let report = EmbeddingReport {
        duplication,
        garbage: layout.garbage,
        ancilla: layout.ancilla,
        width,
        specified_rows: spec.len(),
        completed_rows: 0,
        identical_pairings: 0,
    };
    let partial = PartialEmbedding { width, map, roles_in: layout.roles_in(), roles_out: layout.roles_out() };
    Ok((partial, report))
}

fn finish(partial: &PartialEmbedding, assignments: &[(u64, u64)]) -> ReversibleSpec {
    let mut perm: Vec<u64> = partial.map.iter().map(|v| v.unwrap_or(u64::MAX)).collect();
    for &(x, y) in assignments {
        perm[x as usize] = y;
    }
    debug_assert!(is_permutation(&perm));
    ReversibleSpec {
        width: partial.width,
        perm,
        roles_in: partial.roles_in.clone(),
        roles_out: partial.roles_out.clone(),
        completion: CompletionStats {
            completed_rows: assignments.len(),
            identical_pairings: assignments.iter().filter(|(x, y)| x == y).count(),
        },
    }
}

/// Pairs the k-th open input with the k-th unused output, both ascending.
pub fn complete_onto_naive(partial: &PartialEmbedding) -> ReversibleSpec {
    let (inputs, used) = partial.unused();
    let outputs = (0..used.len() as u64).filter(|&y| !used[y as usize]);
    let assignments: Vec<(u64, u64)> = inputs.into_iter().zip(outputs).collect();
    finish(partial, &assignments)
}

/// Maps open inputs to themselves where possible, then gives each remaining
/// open input (ascending) the closest unused output by Hamming distance,
/// smallest value first on ties.
pub fn complete_onto_hamming(partial: &PartialEmbedding) -> ReversibleSpec {
    let (inputs, mut used) = partial.unused();
    let mut assignments = Vec::with_capacity(inputs.len());
    let mut remaining = Vec::new();
    for x in inputs {
        if !used[x as usize] {
            used[x as usize] = true;
            assignments.push((x, x));
        } else {
            remaining.push(x);
        }
    }
    let mut available: BTreeSet<u64> = (0..used.len() as u64).filter(|&y| !used[y as usize]).collect();
    for x in remaining {
        let y = nearest_available(x, partial.width, &available, &used);
        available.remove(&y);
        used[y as usize] = true;
        assignments.push((x, y));
    }
    finish(partial, &assignments)
}

fn nearest_available(x: u64, width: usize, available: &BTreeSet<u64>, used: &[bool]) -> u64 {
    for distance in 1..=width {
        if binomial(width, distance) > available.len() as u64 {
            // scanning the pool is cheaper than enumerating masks; nothing closer exists
            return available
                .iter()
                .copied()
                .min_by_key(|&y| ((x ^ y).count_ones(), y))
                .expect("an open input always has an unused output");
        }
        let mut best: Option<u64> = None;
        for mask in masks_with_popcount(width, distance) {
            let y = x ^ mask;
            if !used[y as usize] && best.is_none_or(|b| y < b) {
                best = Some(y);
            }
        }
        if let Some(y) = best {
            return y;
        }
    }
    unreachable!("an open input always has an unused output")
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// All `width`-bit masks with exactly `k` set bits, ascending (Gosper's hack).
fn masks_with_popcount(width: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << width;
    let mut next = if k == 0 { Some(0) } else { Some((1u64 << k) - 1) };
    std::iter::from_fn(move || {
        let current = next?;
        if current >= limit {
            return None;
        }
        next = if current == 0 {
            None
        } else {
            let c = current & current.wrapping_neg();
            let r = current + c;
            Some((((r ^ current) >> 2) / c) | r)
        };
        Some(current)
    })
}
