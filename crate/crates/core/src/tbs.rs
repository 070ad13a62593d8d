//! Transformation-based synthesis.
//!
//! The permutation is walked row by row in ascending order; each row gets the
//! Toffoli gates that send its current image back to the row index without
//! disturbing earlier rows. Gates are collected on the output side (and, in
//! bidirectional mode, on the input side) until the table is the identity.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate, RolePair};
use crate::embed::{is_permutation, ReversibleSpec};

pub const DEFAULT_GATE_LIMIT: usize = 50_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TbsError {
    #[error("more than {limit} gates required")]
    GateLimitExceeded { limit: usize },
    #[error("synthesis exceeded {0:?}")]
    Timeout(Duration),
    #[error("function is not a bijection")]
    NotBijective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Unidirectional,
    Bidirectional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TbsOptions {
    pub direction: Direction,
    pub gate_limit: usize,
    pub timeout: Option<Duration>,
}

impl Default for TbsOptions {
    fn default() -> Self {
        TbsOptions { direction: Direction::Unidirectional, gate_limit: DEFAULT_GATE_LIMIT, timeout: None }
    }
}

impl TbsOptions {
    pub fn bidirectional() -> Self {
        TbsOptions { direction: Direction::Bidirectional, ..TbsOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Output,
    Input,
}

/// Gate and control totals of one row's candidate gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RowCost {
    pub gates: usize,
    pub controls: usize,
}

/// Progress notifications for [`tbs_synthesize_observed`].
#[derive(Debug)]
pub enum TbsEvent<'a> {
    /// A row's side has been chosen; `input` is `None` in unidirectional mode.
    Choice { row: u64, side: Side, output: RowCost, input: Option<RowCost> },
    /// A gate was applied while fixing `row`; `perm` is the current table.
    Gate { row: u64, perm: &'a [u64] },
}

/// Target bit position and control mask, in integer-bit terms.
#[derive(Debug, Clone, Copy)]
struct BitGate {
    target: u64,
    controls: u64,
}

/// Gates that map `y` to `i` while leaving every pattern below `i` fixed.
fn row_gates(i: u64, mut y: u64, width: usize) -> Vec<BitGate> {
    let mut gates = Vec::new();
    if i == 0 {
        for b in (0..width).rev().map(|b| 1u64 << b).filter(|b| y & b != 0) {
            gates.push(BitGate { target: b, controls: 0 });
        }
        return gates;
    }
    for b in (0..width).rev().map(|b| 1u64 << b) {
        if i & b != 0 && y & b == 0 {
            gates.push(BitGate { target: b, controls: y });
            y |= b;
        }
    }
    for b in (0..width).rev().map(|b| 1u64 << b) {
        if y & b != 0 && i & b == 0 {
            gates.push(BitGate { target: b, controls: i });
            y &= !b;
        }
    }
    gates
}

fn cost(gates: &[BitGate]) -> RowCost {
    RowCost { gates: gates.len(), controls: gates.iter().map(|g| g.controls.count_ones() as usize).sum() }
}

/// Applies `g` to the values of `fwd`, keeping `back` its inverse.
fn apply(fwd: &mut [u64], back: &mut [u64], g: BitGate) {
    let full = fwd.len() as u64 - 1;
    let free = full & !g.controls & !g.target;
    let mut sub = 0u64;
    loop {
        let y0 = sub | g.controls;
        let y1 = y0 | g.target;
        back.swap(y0 as usize, y1 as usize);
        fwd[back[y0 as usize] as usize] = y0;
        fwd[back[y1 as usize] as usize] = y1;
        sub = sub.wrapping_sub(free) & free;
        if sub == 0 {
            break;
        }
    }
}

fn to_gate(g: BitGate, width: usize) -> Gate {
    let qubit = |b: u64| width - 1 - b.trailing_zeros() as usize;
    let mut controls: Vec<Control> =
        (0..width).filter(|&q| g.controls & (1u64 << (width - 1 - q)) != 0).map(Control::pos).collect();
    controls.sort();
    Gate::mcx(qubit(g.target), controls)
}

pub fn tbs_synthesize(spec: &ReversibleSpec, opts: &TbsOptions) -> Result<Circuit, TbsError> {
    tbs_synthesize_observed(spec, opts, |_| {})
}

pub fn tbs_synthesize_observed(
    spec: &ReversibleSpec,
    opts: &TbsOptions,
    mut observe: impl FnMut(TbsEvent<'_>),
) -> Result<Circuit, TbsError> {
    if !is_permutation(&spec.perm) || spec.perm.len() != 1usize << spec.width {
        return Err(TbsError::NotBijective);
    }
    let start = Instant::now();
    let width = spec.width;
    let mut perm = spec.perm.clone();
    let mut inv = vec![0u64; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        inv[y as usize] = x as u64;
    }
    let mut output_side: Vec<BitGate> = Vec::new();
    let mut input_side: Vec<BitGate> = Vec::new();
    let last = perm.len() as u64 - 1;
    for i in 0..last {
        if let Some(limit) = opts.timeout {
            if start.elapsed() > limit {
                return Err(TbsError::Timeout(limit));
            }
        }
        if perm[i as usize] == i {
            continue;
        }
        let out_gates = row_gates(i, perm[i as usize], width);
        let out_cost = cost(&out_gates);
        let (side, gates, in_cost) = match opts.direction {
            Direction::Unidirectional => (Side::Output, out_gates, None),
            Direction::Bidirectional => {
                let in_gates = row_gates(i, inv[i as usize], width);
                let in_cost = cost(&in_gates);
                if in_cost < out_cost {
                    (Side::Input, in_gates, Some(in_cost))
                } else {
                    (Side::Output, out_gates, Some(in_cost))
                }
            }
        };
        observe(TbsEvent::Choice { row: i, side, output: out_cost, input: in_cost });
        for g in gates {
            match side {
                Side::Output => {
                    apply(&mut perm, &mut inv, g);
                    output_side.push(g);
                }
                Side::Input => {
                    apply(&mut inv, &mut perm, g);
                    input_side.push(g);
                }
            }
            if output_side.len() + input_side.len() > opts.gate_limit {
                return Err(TbsError::GateLimitExceeded { limit: opts.gate_limit });
            }
            observe(TbsEvent::Gate { row: i, perm: &perm });
        }
    }
    debug_assert!(perm.iter().enumerate().all(|(x, &y)| x as u64 == y));

    let gates = input_side.into_iter().chain(output_side.into_iter().rev()).map(|g| to_gate(g, width)).collect();
    Ok(Circuit::new(width).with_gates(gates).with_roles(RolePair::zip(&spec.roles_in, &spec.roles_out)))
}
