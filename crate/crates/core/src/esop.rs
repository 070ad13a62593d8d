//! Exclusive-or sum-of-products: conversion, minimization and mapping to
//! Toffoli cascades.
//!
//! Cubes are handled internally as `(care, value)` bit masks over at most 64
//! inputs, column 0 in the most significant position.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use rustc_hash::FxHashSet;

use crate::circuit::{Circuit, Control, Gate, QubitRole, RolePair};
use crate::pla::{Cube, Literal, PlaTable};

pub const DEFAULT_PASSES: usize = 10;

/// Cubes combined with XOR, column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EsopCubeList {
    pub n: usize,
    pub m: usize,
    pub cubes: Vec<Cube>,
}

impl EsopCubeList {
    pub fn new(n: usize, m: usize) -> Self {
        EsopCubeList { n, m, cubes: Vec::new() }
    }

    /// Function value on minterm `x`, one entry per output column.
    pub fn evaluate(&self, x: u64) -> Vec<bool> {
        let mut out = vec![false; self.m];
        for cube in &self.cubes {
            let (care, value) = masks(&cube.inputs);
            if x & care == value {
                for (j, o) in cube.outputs.iter().enumerate() {
                    if *o == Literal::One {
                        out[j] = !out[j];
                    }
                }
            }
        }
        out
    }

    /// Number of Toffoli gates the list maps to.
    pub fn gate_count(&self) -> usize {
        self.cubes.iter().map(|c| c.outputs.iter().filter(|o| **o == Literal::One).count()).sum()
    }

    pub fn to_pla(&self) -> PlaTable {
        let mut t = PlaTable::new(self.n, self.m);
        t.cubes = self.cubes.clone();
        t
    }
}

type Key = (u64, u64);

fn masks(inputs: &[Literal]) -> Key {
    let n = inputs.len();
    assert!(n <= 64, "ESOP cubes support at most 64 inputs");
    let (mut care, mut value) = (0u64, 0u64);
    for (k, lit) in inputs.iter().enumerate() {
        let bit = 1u64 << (n - 1 - k);
        match lit {
            Literal::One => {
                care |= bit;
                value |= bit;
            }
            Literal::Zero => care |= bit,
            Literal::Dash => {}
        }
    }
    (care, value)
}

fn literals(key: Key, n: usize) -> Vec<Literal> {
    let (care, value) = key;
    (0..n)
        .map(|k| {
            let bit = 1u64 << (n - 1 - k);
            match (care & bit != 0, value & bit != 0) {
                (false, _) => Literal::Dash,
                (true, true) => Literal::One,
                (true, false) => Literal::Zero,
            }
        })
        .collect()
}

/// Per-column cube sets; inserting a cube already present removes it.
struct Columns {
    n: usize,
    m: usize,
    sets: Vec<BTreeSet<Key>>,
    first_seen: Vec<Key>,
}

impl Columns {
    fn new(n: usize, m: usize) -> Self {
        Columns { n, m, sets: vec![BTreeSet::new(); m], first_seen: Vec::new() }
    }

    fn toggle(&mut self, j: usize, key: Key) {
        if !self.sets[j].remove(&key) {
            self.sets[j].insert(key);
            self.first_seen.push(key);
        }
    }

    fn from_list(list: &EsopCubeList) -> Self {
        let mut cols = Columns::new(list.n, list.m);
        for cube in &list.cubes {
            let key = masks(&cube.inputs);
            for (j, o) in cube.outputs.iter().enumerate() {
                if *o == Literal::One {
                    cols.toggle(j, key);
                }
            }
        }
        cols
    }

    /// Groups identical input cubes across columns, ordered by first appearance.
    fn into_list(self) -> EsopCubeList {
        let mut order: Vec<Key> = Vec::new();
        let mut outputs: HashMap<Key, Vec<Literal>> = HashMap::new();
        for (j, set) in self.sets.iter().enumerate() {
            for &key in set {
                outputs.entry(key).or_insert_with(|| {
                    order.push(key);
                    vec![Literal::Zero; self.m]
                })[j] = Literal::One;
            }
        }
        let rank: HashMap<Key, usize> = self.first_seen.iter().enumerate().rev().map(|(i, &k)| (k, i)).collect();
        order.sort_by_key(|k| (rank.get(k).copied().unwrap_or(usize::MAX), *k));
        let cubes = order
            .into_iter()
            .map(|key| Cube::new(literals(key, self.n), outputs.remove(&key).expect("grouped key")))
            .collect();
        EsopCubeList { n: self.n, m: self.m, cubes }
    }
}

/// Pieces of `p` lying outside `d`; pairwise disjoint.
fn sharp(p: Key, d: Key, n: usize) -> Vec<Key> {
    let (pc, pv) = p;
    let (dc, dv) = d;
    if (pv ^ dv) & pc & dc != 0 {
        return vec![p];
    }
    let mut pieces = Vec::new();
    let (mut care, mut value) = p;
    for k in 0..n {
        let bit = 1u64 << (n - 1 - k);
        if dc & bit != 0 && care & bit == 0 {
            pieces.push((care | bit, value | (!dv & bit)));
            care |= bit;
            value |= dv & bit;
        }
    }
    pieces
}

/// Makes each output column's ON cubes pairwise disjoint; a disjoint cover
/// is also an ESOP. Output don't-cares count as 0.
pub fn sop_to_esop(table: &PlaTable) -> EsopCubeList {
    let n = table.n;
    let mut cols = Columns::new(n, table.m);
    for j in 0..table.m {
        let mut cover = DisjointCover::new(n);
        for cube in table.cubes.iter().filter(|c| c.outputs[j] == Literal::One) {
            cover.add(masks(&cube.inputs));
        }
        for key in cover.order {
            cols.toggle(j, key);
        }
    }
    cols.into_list()
}

/// Disjoint cubes in insertion order; single minterms are indexed by value
/// so minterm-heavy covers stay close to linear.
struct DisjointCover {
    n: usize,
    full: u64,
    order: Vec<Key>,
    minterms: FxHashSet<u64>,
    wider: Vec<Key>,
}

impl DisjointCover {
    fn new(n: usize) -> Self {
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        DisjointCover { n, full, order: Vec::new(), minterms: FxHashSet::default(), wider: Vec::new() }
    }

    fn add(&mut self, cube: Key) {
        let n = self.n;
        let mut pieces = vec![cube];
        for &d in &self.wider {
            pieces = pieces.into_iter().flat_map(|p| sharp(p, d, n)).collect();
            if pieces.is_empty() {
                return;
            }
        }
        for p in pieces {
            let inside = self.minterms_inside(p);
            let mut rest = vec![p];
            for v in inside {
                rest = rest.into_iter().flat_map(|q| sharp(q, (self.full, v), n)).collect();
            }
            for q in rest {
                if q.0 == self.full {
                    self.minterms.insert(q.1);
                } else {
                    self.wider.push(q);
                }
                self.order.push(q);
            }
        }
    }

    /// Stored minterms covered by `p`, ascending.
    fn minterms_inside(&self, p: Key) -> Vec<u64> {
        let free = self.full & !p.0;
        let mut found: Vec<u64> =
            if (free.count_ones() as usize) < 64 && (1usize << free.count_ones()) <= self.minterms.len() {
                let mut out = Vec::new();
                let mut sub = 0u64;
                loop {
                    if self.minterms.contains(&(p.1 | sub)) {
                        out.push(p.1 | sub);
                    }
                    sub = sub.wrapping_sub(free) & free;
                    if sub == 0 {
                        break;
                    }
                }
                out
            } else {
                self.minterms.iter().copied().filter(|v| v & p.0 == p.1).collect()
            };
        found.sort_unstable();
        found
    }
}

fn distance(a: Key, b: Key) -> u32 {
    ((a.0 ^ b.0) | ((a.1 ^ b.1) & a.0 & b.0)).count_ones()
}

/// Literal equal to the XOR of the literals of `a` and `b` at `bit`.
fn link(a: Key, b: Key, bit: u64) -> Key {
    let lit = |k: Key| ((k.0 & bit != 0), (k.1 & bit != 0));
    match (lit(a), lit(b)) {
        // x ⊕ x' = 1
        ((true, _), (true, _)) => (0, 0),
        // x ⊕ 1 = x', x' ⊕ 1 = x
        ((true, v), (false, _)) | ((false, _), (true, v)) => (bit, if v { 0 } else { bit }),
        ((false, _), (false, _)) => unreachable!("cubes agree at this position"),
    }
}

fn with_literal(key: Key, bit: u64, lit: Key) -> Key {
    ((key.0 & !bit) | lit.0, (key.1 & !bit) | lit.1)
}

fn literal_at(key: Key, bit: u64) -> Key {
    (key.0 & bit, key.1 & bit)
}

/// The two other literals a position can take, as `(care, value)` at `bit`.
fn alternatives(key: Key, bit: u64) -> [Key; 2] {
    if key.0 & bit == 0 {
        [(bit, 0), (bit, bit)]
    } else {
        [(0, 0), (bit, !key.1 & bit)]
    }
}

fn neighbours(key: Key, n: usize) -> impl Iterator<Item = Key> {
    (0..n).rev().map(|b| 1u64 << b).flat_map(move |bit| alternatives(key, bit).map(|lit| with_literal(key, bit, lit)))
}

type CubeSet = FxHashSet<Key>;

fn toggle(set: &mut CubeSet, key: Key) {
    if !set.remove(&key) {
        set.insert(key);
    }
}

fn merge(a: Key, b: Key) -> Key {
    debug_assert_eq!(distance(a, b), 1);
    let diff = (a.0 ^ b.0) | ((a.1 ^ b.1) & a.0 & b.0);
    with_literal(a, diff, link(a, b, diff))
}

/// Merges distance-1 pairs reachable from `seeds` until none remain.
fn merge_adjacent(set: &mut CubeSet, seeds: impl IntoIterator<Item = Key>, n: usize) {
    let mut pending: BTreeSet<Key> = seeds.into_iter().collect();
    while let Some(a) = pending.pop_first() {
        if !set.contains(&a) {
            continue;
        }
        if let Some(b) = neighbours(a, n).find(|b| set.contains(b)) {
            set.remove(&a);
            set.remove(&b);
            let c = merge(a, b);
            toggle(set, c);
            if set.contains(&c) {
                pending.insert(c);
            }
        }
    }
}

/// Tries to lower the count through one distance-2 rewrite involving `a`.
/// Returns the cubes it created, or `None` when no rewrite helps.
fn exorlink_step(set: &mut CubeSet, a: Key, n: usize) -> Option<Vec<Key>> {
    let bits: Vec<u64> = (0..n).rev().map(|b| 1u64 << b).collect();
    for (x, &bi) in bits.iter().enumerate() {
        for &bj in &bits[x + 1..] {
            for li in alternatives(a, bi) {
                for lj in alternatives(a, bj) {
                    let b = with_literal(with_literal(a, bi, li), bj, lj);
                    if !set.contains(&b) {
                        continue;
                    }
                    let (ai, aj) = (literal_at(a, bi), literal_at(a, bj));
                    let (bi_lit, bj_lit) = (literal_at(b, bi), literal_at(b, bj));
                    let (link_i, link_j) = (link(a, b, bi), link(a, b, bj));
                    let base = with_literal(with_literal(a, bi, (0, 0)), bj, (0, 0));
                    let compose = |p: Key, q: Key| with_literal(with_literal(base, bi, p), bj, q);
                    let options = [
                        [compose(link_i, aj), compose(bi_lit, link_j)],
                        [compose(ai, link_j), compose(link_i, bj_lit)],
                    ];
                    for pair in options {
                        let before = set.len();
                        let mut log = vec![a, b, pair[0], pair[1]];
                        for &k in &log {
                            toggle(set, k);
                        }
                        let follow_up = pair
                            .iter()
                            .filter(|c| set.contains(c))
                            .find_map(|&c| neighbours(c, n).find(|d| set.contains(d)).map(|d| (c, d)));
                        if let Some((c, d)) = follow_up {
                            for k in [c, d, merge(c, d)] {
                                toggle(set, k);
                                log.push(k);
                            }
                        }
                        if set.len() < before {
                            return Some(log.into_iter().skip(2).filter(|k| set.contains(k)).collect());
                        }
                        for &k in log.iter().rev() {
                            toggle(set, k);
                        }
                    }
                }
            }
        }
    }
    None
}

fn sorted(set: &CubeSet) -> Vec<Key> {
    let mut keys: Vec<Key> = set.iter().copied().collect();
    keys.sort_unstable();
    keys
}

fn minimize_column(column: &mut BTreeSet<Key>, n: usize, passes: usize, deadline: Option<Instant>) {
    let mut set: CubeSet = column.iter().copied().collect();
    for _ in 0..passes {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let before = set.len();
        let seeds = sorted(&set);
        merge_adjacent(&mut set, seeds, n);
        for a in sorted(&set) {
            if !set.contains(&a) {
                continue;
            }
            if let Some(created) = exorlink_step(&mut set, a, n) {
                merge_adjacent(&mut set, created, n);
            }
        }
        if set.len() >= before {
            break;
        }
    }
    *column = set.into_iter().collect();
}

/// Reduces the cube count with distance-0 cancellation, distance-1 merging
/// and distance-2 rewrites that enable a further merge. Each output column
/// is minimized on its own; identical cubes are then shared across columns.
pub fn minimize_esop(list: &EsopCubeList, passes: usize) -> EsopCubeList {
    minimize_esop_until(list, passes, None)
}

/// Like [`minimize_esop`], but starts no new pass once `deadline` is reached.
pub fn minimize_esop_until(list: &EsopCubeList, passes: usize, deadline: Option<Instant>) -> EsopCubeList {
    let mut cols = Columns::from_list(list);
    for set in &mut cols.sets {
        minimize_column(set, list.n, passes, deadline);
    }
    let out = cols.into_list();
    if out.cubes.len() > list.cubes.len() {
        return list.clone();
    }
    out
}

/// One Toffoli gate per (cube, asserted output), targets on qubits `n..n+m`.
pub fn esop_to_circuit(list: &EsopCubeList) -> Circuit {
    let (n, m) = (list.n, list.m);
    let mut roles = vec![RolePair::new(QubitRole::FunctionInput, QubitRole::FunctionInput); n];
    roles.extend(std::iter::repeat_n(RolePair::new(QubitRole::Ancilla, QubitRole::FunctionOutput), m));
    let mut c = Circuit::new(n + m).with_roles(roles);
    for cube in &list.cubes {
        let controls: Vec<Control> = cube
            .inputs
            .iter()
            .enumerate()
            .filter_map(|(q, lit)| match lit {
                Literal::One => Some(Control::pos(q)),
                Literal::Zero => Some(Control::neg(q)),
                Literal::Dash => None,
            })
            .collect();
        for (j, o) in cube.outputs.iter().enumerate() {
            if *o == Literal::One {
                c.push(Gate::mcx(n + j, controls.clone()));
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::lower_polarity;
    use crate::pla::{expand, PlaKind};
    use crate::sim::{induced_permutation, verify_oracle, verify_xor_shift, VerifyMode};
    use proptest::prelude::*;

    fn list(n: usize, m: usize, cubes: &[(&str, &str)]) -> EsopCubeList {
        EsopCubeList { n, m, cubes: cubes.iter().map(|(i, o)| Cube::from_strs(i, o)).collect() }
    }

    fn table(n: usize, m: usize, cubes: &[(&str, &str)]) -> PlaTable {
        PlaTable::with_cubes(n, m, cubes.iter().map(|(i, o)| Cube::from_strs(i, o))).unwrap()
    }

    /// ON-set of column `j` as seen by OR semantics.
    fn or_value(t: &PlaTable, x: u64, j: usize) -> bool {
        t.cubes.iter().any(|c| c.outputs[j] == Literal::One && c.minterms().contains(&x))
    }

    #[test]
    fn disjoint_split() {
        let e = sop_to_esop(&table(2, 1, &[("1-", "1"), ("-1", "1")]));
        assert_eq!(e, list(2, 1, &[("1-", "1"), ("01", "1")]));
        let t = table(2, 1, &[("1-", "1"), ("-1", "1")]);
        for x in 0..4 {
            assert_eq!(e.evaluate(x)[0], or_value(&t, x, 0));
        }
    }

    #[test]
    fn disjoint_inputs_unchanged() {
        let t = table(2, 1, &[("11", "1")]);
        assert_eq!(sop_to_esop(&t).cubes, t.cubes);
        let t = table(3, 1, &[("11-", "1"), ("0-1", "1")]);
        assert_eq!(sop_to_esop(&t).cubes, t.cubes);
    }

    #[test]
    fn output_dont_care_is_zero() {
        let t = table(2, 2, &[("11", "1-"), ("0-", "-1")]);
        assert_eq!(sop_to_esop(&t), list(2, 2, &[("11", "10"), ("0-", "01")]));
    }

    #[test]
    fn minimize_examples() {
        assert_eq!(minimize_esop(&list(2, 1, &[("11", "1"), ("1-", "1")]), 10), list(2, 1, &[("10", "1")]));
        assert_eq!(minimize_esop(&list(2, 1, &[("11", "1"), ("11", "1")]), 10).cubes, vec![]);
        let single = list(3, 1, &[("1-0", "1")]);
        assert_eq!(minimize_esop(&single, 10), single);
    }

    #[test]
    fn minimize_merges_opposite_literals() {
        let m = minimize_esop(&list(3, 1, &[("101", "1"), ("100", "1")]), 10);
        assert_eq!(m, list(3, 1, &[("10-", "1")]));
    }

    #[test]
    fn three_cubes_shrink() {
        let l = list(2, 1, &[("00", "1"), ("11", "1"), ("01", "1")]);
        let m = minimize_esop(&l, 10);
        assert!(m.cubes.len() < 3);
        for x in 0..4 {
            assert_eq!(m.evaluate(x), l.evaluate(x));
        }
    }

    #[test]
    fn distance_and_link() {
        let k = |s: &str| masks(&Cube::from_strs(s, "").inputs);
        assert_eq!(distance(k("1-0"), k("1-0")), 0);
        assert_eq!(distance(k("1-0"), k("0-0")), 1);
        assert_eq!(distance(k("1-0"), k("110")), 1);
        assert_eq!(distance(k("1-0"), k("011")), 3);
        assert_eq!(merge(k("0"), k("1")), k("-"));
        assert_eq!(merge(k("0"), k("-")), k("1"));
        assert_eq!(merge(k("1"), k("-")), k("0"));
    }

    #[test]
    fn multi_output_cubes_are_shared() {
        let t = table(2, 2, &[("11", "11")]);
        let e = minimize_esop(&sop_to_esop(&t), 10);
        assert_eq!(e.cubes.len(), 1);
        assert_eq!(e.gate_count(), 2);
    }

    #[test]
    fn circuit_mapping() {
        let c = esop_to_circuit(&list(2, 1, &[("11", "1")]));
        assert_eq!(c.width, 3);
        assert_eq!(c.gates, vec![Gate::toffoli(0, 1, 2)]);
        let d = esop_to_circuit(&list(6, 1, &[("101010", "1")]));
        let expected: Vec<Control> =
            (0..6).map(|q| if q % 2 == 0 { Control::pos(q) } else { Control::neg(q) }).collect();
        assert_eq!(d.gates, vec![Gate::mcx(6, expected)]);
        let empty = esop_to_circuit(&EsopCubeList::new(3, 2));
        assert_eq!((empty.width, empty.len()), (5, 0));
        let roles = empty.roles.unwrap();
        assert_eq!(roles[0], RolePair::new(QubitRole::FunctionInput, QubitRole::FunctionInput));
        assert_eq!(roles[4], RolePair::new(QubitRole::Ancilla, QubitRole::FunctionOutput));
    }

    fn arb_table(max_n: usize, max_m: usize) -> impl Strategy<Value = PlaTable> {
        (1..=max_n, 1..=max_m, any::<bool>()).prop_flat_map(|(n, m, full)| {
            let lit = prop_oneof![Just('0'), Just('1'), Just('-')];
            let cube = (
                prop::collection::vec(lit.clone(), n),
                prop::collection::vec(if full { prop_oneof![Just('0'), Just('1')].boxed() } else { lit.boxed() }, m),
            );
            prop::collection::vec(cube, 0..12).prop_map(move |cs| {
                let mut t = PlaTable::new(n, m);
                if full {
                    t.kind = PlaKind::F;
                }
                for (i, o) in cs {
                    let i: String = i.into_iter().collect();
                    let o: String = o.into_iter().collect();
                    t.push(Cube::from_strs(&i, &o)).unwrap();
                }
                t
            })
        })
    }

    fn arb_list(max_n: usize) -> impl Strategy<Value = EsopCubeList> {
        (1..=max_n, 1usize..=3).prop_flat_map(|(n, m)| {
            let lit = prop_oneof![Just('0'), Just('1'), Just('-')];
            let cube = (prop::collection::vec(lit, n), prop::collection::vec(any::<bool>(), m));
            prop::collection::vec(cube, 0..16).prop_map(move |cs| EsopCubeList {
                n,
                m,
                cubes: cs
                    .into_iter()
                    .map(|(i, o)| {
                        let i: String = i.into_iter().collect();
                        let o: String = o.into_iter().map(|b| if b { '1' } else { '0' }).collect();
                        Cube::from_strs(&i, &o)
                    })
                    .collect(),
            })
        })
    }

    proptest! {
        #[test]
        fn esop_seed_matches_or_semantics(t in arb_table(6, 3)) {
            let e = sop_to_esop(&t);
            for x in 0..1u64 << t.n {
                let got = e.evaluate(x);
                for (j, &bit) in got.iter().enumerate() {
                    prop_assert_eq!(bit, or_value(&t, x, j));
                }
            }
        }

        #[test]
        fn minimize_preserves_function(l in arb_list(8)) {
            let m = minimize_esop(&l, DEFAULT_PASSES);
            prop_assert!(m.cubes.len() <= l.cubes.len());
            for x in 0..1u64 << l.n {
                prop_assert_eq!(m.evaluate(x), l.evaluate(x));
            }
        }

        #[test]
        fn oracle_end_to_end(t in arb_table(8, 3)) {
            let spec = expand(&t).unwrap();
            let e = minimize_esop(&sop_to_esop(&t), DEFAULT_PASSES);
            let c = lower_polarity(&esop_to_circuit(&e));
            prop_assert_eq!(c.width, t.n + t.m);
            prop_assert!(verify_oracle(&c, &spec, VerifyMode::DomainPreserving).unwrap().passed);
            prop_assert!(verify_xor_shift(&c, &spec).unwrap().passed);
            if c.width <= 12 {
                prop_assert!(induced_permutation(&c).is_ok());
            }
        }
    }
}
