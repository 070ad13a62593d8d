//! Grover search around a synthesized oracle, and the playing-card encoding.
//!
//! A card is six bits: two suit bits (clubs `00`, spades `01`, diamonds `10`,
//! hearts `11`) followed by a four-bit rank (ace `0001` through king `1101`).

use std::f64::consts::PI;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{lower_polarity, Circuit, Control, Gate, QubitRole};
use crate::esop::{esop_to_circuit, minimize_esop, sop_to_esop, DEFAULT_PASSES};
use crate::pla::{expand, Cube, OutBit, PlaError, PlaTable};
use crate::sim::{apply_statevector, marginal, SimError, StateVector, MAX_DENSE_WIDTH};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroverError {
    #[error("invalid rank {0}")]
    InvalidRank(String),
    #[error("unknown suit {0}")]
    UnknownSuit(String),
    #[error("bad query: {0}")]
    BadQuery(String),
    #[error("oracle shape: {0}")]
    BadOracleShape(String),
    #[error("the predicate marks no input")]
    NothingMarked,
    #[error(transparent)]
    Pla(#[from] PlaError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suit {
    Clubs,
    Spades,
    Diamonds,
    Hearts,
}

impl Suit {
    pub fn code(self) -> u8 {
        match self {
            Suit::Clubs => 0b00,
            Suit::Spades => 0b01,
            Suit::Diamonds => 0b10,
            Suit::Hearts => 0b11,
        }
    }
}

impl FromStr for Suit {
    type Err = GroverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "clubs" => Ok(Suit::Clubs),
            "spades" => Ok(Suit::Spades),
            "diamonds" => Ok(Suit::Diamonds),
            "hearts" => Ok(Suit::Hearts),
            _ => Err(GroverError::UnknownSuit(s.to_string())),
        }
    }
}

/// Rank code for a name such as `ace`, `7` or `queen`.
pub fn rank_code(name: &str) -> Result<u8, GroverError> {
    let code = match name.to_ascii_lowercase().as_str() {
        "ace" | "a" => 1,
        "jack" | "j" => 11,
        "queen" | "q" => 12,
        "king" | "k" => 13,
        other => match other.parse::<u8>() {
            Ok(v) if (2..=10).contains(&v) => v,
            _ => return Err(GroverError::InvalidRank(name.to_string())),
        },
    };
    Ok(code)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CardQuery {
    pub suit: Option<Suit>,
    /// Four-bit rank code; only 1..=13 name a card.
    pub rank: Option<u8>,
}

impl FromStr for CardQuery {
    type Err = GroverError;

    /// Parses `suit=<name>,rank=<name>`; either part may be omitted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut q = CardQuery::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) =
                part.split_once('=').ok_or_else(|| GroverError::BadQuery(format!("expected key=value, got {part}")))?;
            match key.trim() {
                "suit" => q.suit = Some(value.trim().parse()?),
                "rank" => q.rank = Some(rank_code(value.trim())?),
                other => return Err(GroverError::BadQuery(format!("unknown key {other}"))),
            }
        }
        if q.suit.is_none() && q.rank.is_none() {
            return Err(GroverError::BadQuery("give a suit, a rank or both".into()));
        }
        Ok(q)
    }
}

/// Six-input, one-output predicate that is 1 exactly on matching cards.
pub fn card_query_to_pla(q: &CardQuery) -> Result<PlaTable, GroverError> {
    if q.suit.is_none() && q.rank.is_none() {
        return Err(GroverError::BadQuery("give a suit, a rank or both".into()));
    }
    let suit = match q.suit {
        Some(s) => format!("{:02b}", s.code()),
        None => "--".to_string(),
    };
    let rank = match q.rank {
        Some(r) if (1..=13).contains(&r) => format!("{r:04b}"),
        Some(r) => return Err(GroverError::InvalidRank(format!("{r:04b}"))),
        None => "----".to_string(),
    };
    Ok(PlaTable::with_cubes(6, 1, [Cube::from_strs(&format!("{suit}{rank}"), "1")])?)
}

pub fn optimal_iterations(n_items: u64, marked: u64) -> usize {
    assert!(marked >= 1 && marked <= n_items, "need 1 <= marked <= n_items");
    let r = (PI / 4.0 * (n_items as f64 / marked as f64).sqrt()).floor() as usize;
    r.max(1)
}

pub fn predicted_success(n_items: u64, marked: u64, iterations: usize) -> f64 {
    let theta = 2.0 * (marked as f64 / n_items as f64).sqrt().asin();
    ((2 * iterations + 1) as f64 * theta / 2.0).sin().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverPlan {
    pub n: usize,
    pub marked: u64,
    pub iterations: usize,
    pub predicted_success: f64,
}

impl GroverPlan {
    pub fn new(n: usize, marked: u64, iterations: Option<usize>) -> Self {
        let items = 1u64 << n;
        let iterations = iterations.unwrap_or_else(|| optimal_iterations(items, marked));
        GroverPlan { n, marked, iterations, predicted_success: predicted_success(items, marked, iterations) }
    }
}

/// Search and output qubits of a single-output domain-preserving oracle.
fn oracle_layout(oracle: &Circuit) -> Result<(Vec<usize>, usize), GroverError> {
    let roles = oracle.roles.as_ref().ok_or_else(|| GroverError::BadOracleShape("oracle has no roles".into()))?;
    let search: Vec<usize> = (0..oracle.width)
        .filter(|&q| roles[q].input == QubitRole::FunctionInput && roles[q].output == QubitRole::FunctionInput)
        .collect();
    let outputs: Vec<usize> = (0..oracle.width)
        .filter(|&q| roles[q].input == QubitRole::Ancilla && roles[q].output == QubitRole::FunctionOutput)
        .collect();
    if outputs.len() != 1 || search.is_empty() || search.len() + 1 != oracle.width {
        return Err(GroverError::BadOracleShape(format!(
            "expected n inputs and one output, found {} search and {} output qubits on width {}",
            search.len(),
            outputs.len(),
            oracle.width
        )));
    }
    Ok((search, outputs[0]))
}

/// Inversion about the mean on `search`.
pub fn diffusion(search: &[usize]) -> Vec<Gate> {
    let mut gates: Vec<Gate> = search.iter().map(|&q| Gate::h(q)).collect();
    gates.extend(search.iter().map(|&q| Gate::x(q)));
    let (&target, rest) = search.split_last().expect("non-empty search register");
    gates.push(Gate::mcz(target, rest.iter().copied().map(Control::pos).collect()));
    gates.extend(search.iter().map(|&q| Gate::x(q)));
    gates.extend(search.iter().map(|&q| Gate::h(q)));
    gates
}

/// Prepares the output qubit in |−⟩ and the search register in uniform
/// superposition, then applies `iterations` rounds of oracle and diffusion.
pub fn build_grover(oracle: &Circuit, iterations: usize) -> Result<Circuit, GroverError> {
    let (search, out) = oracle_layout(oracle)?;
    let mut c = Circuit { gates: Vec::new(), ..oracle.clone() };
    c.provenance = None;
    c.push(Gate::x(out));
    c.push(Gate::h(out));
    for &q in &search {
        c.push(Gate::h(q));
    }
    let diff = diffusion(&search);
    for _ in 0..iterations {
        c.gates.extend(oracle.gates.iter().cloned());
        c.gates.extend(diff.iter().cloned());
    }
    Ok(c)
}

/// Lowered domain-preserving oracle for a single-output table.
pub fn oracle_for(table: &PlaTable) -> Circuit {
    lower_polarity(&esop_to_circuit(&minimize_esop(&sop_to_esop(table), DEFAULT_PASSES)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroverRun {
    pub plan: GroverPlan,
    pub circuit: Circuit,
    /// Probability of each search-register pattern, qubit 0 most significant.
    pub probabilities: Vec<f64>,
    pub marked: Vec<u64>,
}

impl GroverRun {
    pub fn measured_success(&self) -> f64 {
        self.marked.iter().map(|&x| self.probabilities[x as usize]).sum()
    }
}

/// Synthesizes the oracle for `table`, assembles the search and simulates it.
pub fn run_search(table: &PlaTable, iterations: Option<usize>) -> Result<GroverRun, GroverError> {
    if table.m != 1 {
        return Err(GroverError::BadOracleShape(format!("predicate needs one output, table has {}", table.m)));
    }
    if table.n + 1 > MAX_DENSE_WIDTH {
        return Err(SimError::TooWide { width: table.n + 1, limit: MAX_DENSE_WIDTH }.into());
    }
    let spec = expand(table)?;
    let marked: Vec<u64> = spec.entries.iter().filter(|(_, b)| b[0] == OutBit::One).map(|(&x, _)| x).collect();
    if marked.is_empty() {
        return Err(GroverError::NothingMarked);
    }
    let plan = GroverPlan::new(table.n, marked.len() as u64, iterations);
    let oracle = oracle_for(table);
    let (search, _) = oracle_layout(&oracle)?;
    let circuit = build_grover(&oracle, plan.iterations)?;
    let state = apply_statevector(&circuit, &StateVector::zero(circuit.width)?)?;
    let probabilities = marginal(&state, &search);
    Ok(GroverRun { plan, circuit, probabilities, marked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pla::Literal;

    fn query(s: &str) -> CardQuery {
        s.parse().unwrap()
    }

    #[test]
    fn card_tables() {
        let t = card_query_to_pla(&query("suit=diamonds,rank=10")).unwrap();
        assert_eq!(t.cubes, vec![Cube::from_strs("101010", "1")]);
        let t = card_query_to_pla(&query("suit=clubs")).unwrap();
        assert_eq!(t.cubes, vec![Cube::from_strs("00----", "1")]);
        assert_eq!(t.cubes[0].minterms().len(), 16);
        let bad = CardQuery { suit: None, rank: Some(0) };
        assert!(matches!(card_query_to_pla(&bad), Err(GroverError::InvalidRank(_))));
        assert!(matches!(
            card_query_to_pla(&CardQuery { suit: None, rank: Some(14) }),
            Err(GroverError::InvalidRank(_))
        ));
    }

    #[test]
    fn query_parsing() {
        assert_eq!(query("rank=ace"), CardQuery { suit: None, rank: Some(1) });
        assert_eq!(query("suit=Hearts, rank=king"), CardQuery { suit: Some(Suit::Hearts), rank: Some(13) });
        assert!("rank=1".parse::<CardQuery>().is_err());
        assert!("rank=11".parse::<CardQuery>().is_err());
        assert!("suit=cups".parse::<CardQuery>().is_err());
        assert!("colour=red".parse::<CardQuery>().is_err());
        assert!("".parse::<CardQuery>().is_err());
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(optimal_iterations(64, 1), 6);
        assert_eq!(optimal_iterations(64, 16), 1);
        assert_eq!(optimal_iterations(4, 4), 1);
    }

    #[test]
    fn success_formula() {
        assert!((predicted_success(64, 1, 6) - 0.9966).abs() < 1e-4);
        assert!((predicted_success(64, 16, 1) - 1.0).abs() < 1e-9);
        for r in 0..5 {
            assert!((predicted_success(8, 8, r) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diffusion_depends_only_on_width() {
        let a = build_grover(&oracle_for(&card_query_to_pla(&query("suit=clubs")).unwrap()), 1).unwrap();
        let b = build_grover(&oracle_for(&card_query_to_pla(&query("rank=7")).unwrap()), 1).unwrap();
        let tail = |c: &Circuit| c.gates[c.gates.len() - diffusion(&[0, 1, 2, 3, 4, 5]).len()..].to_vec();
        assert_eq!(tail(&a), tail(&b));
        assert_eq!(tail(&a), diffusion(&[0, 1, 2, 3, 4, 5]));
    }

    #[test]
    fn zero_iterations_is_uniform() {
        let run = run_search(&card_query_to_pla(&query("suit=diamonds,rank=10")).unwrap(), Some(0)).unwrap();
        for p in &run.probabilities {
            assert!((p - 1.0 / 64.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bad_oracle_shape() {
        let two_outputs = esop_to_circuit(&crate::esop::EsopCubeList::new(2, 2));
        assert!(matches!(build_grover(&two_outputs, 1), Err(GroverError::BadOracleShape(_))));
        assert!(matches!(build_grover(&Circuit::new(3), 1), Err(GroverError::BadOracleShape(_))));
    }

    #[test]
    fn measured_matches_prediction() {
        for n in 2..=6usize {
            for marked in [1u64, 2, 4, 8, 16] {
                if marked > 1 << n {
                    continue;
                }
                // mark the `marked` smallest patterns
                let mut t = PlaTable::new(n, 1);
                for x in 0..marked {
                    t.push(Cube::from_minterm(x, n, vec![Literal::One])).unwrap();
                }
                for r in 0..=8 {
                    let run = run_search(&t, Some(r)).unwrap();
                    let predicted = predicted_success(1 << n, marked, r);
                    assert!((run.measured_success() - predicted).abs() < 1e-6, "n={n} M={marked} r={r}");
                }
            }
        }
    }
}
