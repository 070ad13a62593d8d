//! Multiple-control Toffoli cascades and their cost metrics.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {gate}: qubit {qubit} is outside a circuit of width {width}")]
    QubitOutOfRange { gate: usize, qubit: usize, width: usize },
    #[error("gate {gate}: target {target} also appears as a control")]
    TargetIsControl { gate: usize, target: usize },
    #[error("gate {gate}: control {qubit} listed twice")]
    DuplicateControl { gate: usize, qubit: usize },
    #[error("gate {gate}: {kind} gates take no controls")]
    UnexpectedControls { gate: usize, kind: GateKind },
    #[error("roles list has {found} entries for {width} qubits")]
    RolesLength { found: usize, width: usize },
    #[error("circuit still contains negative controls")]
    NotLowered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    X,
    Mcx,
    H,
    Z,
    Mcz,
}

impl GateKind {
    pub fn is_classical(self) -> bool {
        matches!(self, GateKind::X | GateKind::Mcx)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GateKind::X => "x",
            GateKind::Mcx => "mcx",
            GateKind::H => "h",
            GateKind::Z => "z",
            GateKind::Mcz => "mcz",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

/// A control line; serialized as `[qubit, "+"|"-"]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, Polarity)", into = "(usize, Polarity)")]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Positive }
    }

    pub fn neg(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Negative }
    }

    pub fn is_negative(&self) -> bool {
        self.polarity == Polarity::Negative
    }
}

impl From<(usize, Polarity)> for Control {
    fn from((qubit, polarity): (usize, Polarity)) -> Self {
        Control { qubit, polarity }
    }
}

impl From<Control> for (usize, Polarity) {
    fn from(c: Control) -> Self {
        (c.qubit, c.polarity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    #[serde(default)]
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn x(target: usize) -> Self {
        Gate { kind: GateKind::X, target, controls: Vec::new() }
    }

    /// Controlled NOT; degenerates to `X` when `controls` is empty.
    pub fn mcx(target: usize, controls: Vec<Control>) -> Self {
        let kind = if controls.is_empty() { GateKind::X } else { GateKind::Mcx };
        Gate { kind, target, controls }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::mcx(target, vec![Control::pos(control)])
    }

    pub fn toffoli(a: usize, b: usize, target: usize) -> Self {
        Gate::mcx(target, vec![Control::pos(a), Control::pos(b)])
    }

    pub fn h(target: usize) -> Self {
        Gate { kind: GateKind::H, target, controls: Vec::new() }
    }

    pub fn z(target: usize) -> Self {
        Gate { kind: GateKind::Z, target, controls: Vec::new() }
    }

    /// Controlled Z; degenerates to `Z` when `controls` is empty.
    pub fn mcz(target: usize, controls: Vec<Control>) -> Self {
        let kind = if controls.is_empty() { GateKind::Z } else { GateKind::Mcz };
        Gate { kind, target, controls }
    }

    pub fn cost(&self) -> usize {
        self.controls.len() + 1
    }

    pub fn has_negative_controls(&self) -> bool {
        self.controls.iter().any(Control::is_negative)
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().map(|c| c.qubit).chain(std::iter::once(self.target))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    FunctionInput,
    Ancilla,
    FunctionOutput,
    Garbage,
    Reused,
}

impl fmt::Display for QubitRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            QubitRole::FunctionInput => "function_input",
            QubitRole::Ancilla => "ancilla",
            QubitRole::FunctionOutput => "function_output",
            QubitRole::Garbage => "garbage",
            QubitRole::Reused => "reused",
        };
        f.write_str(name)
    }
}

/// What a qubit carries before and after the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RolePair {
    #[serde(rename = "in")]
    pub input: QubitRole,
    #[serde(rename = "out")]
    pub output: QubitRole,
}

impl RolePair {
    pub fn new(input: QubitRole, output: QubitRole) -> Self {
        RolePair { input, output }
    }

    pub fn zip(inputs: &[QubitRole], outputs: &[QubitRole]) -> Vec<RolePair> {
        assert_eq!(inputs.len(), outputs.len());
        inputs.iter().zip(outputs).map(|(&i, &o)| RolePair::new(i, o)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub function: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub width: usize,
    #[serde(default)]
    pub roles: Option<Vec<RolePair>>,
    pub gates: Vec<Gate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, roles: None, gates: Vec::new(), provenance: None }
    }

    pub fn with_roles(mut self, roles: Vec<RolePair>) -> Self {
        self.roles = Some(roles);
        self
    }

    pub fn with_gates(mut self, gates: Vec<Gate>) -> Self {
        self.gates = gates;
        self
    }

    pub fn with_provenance(mut self, function: impl Into<String>, method: impl Into<String>) -> Self {
        self.provenance = Some(Provenance { function: function.into(), method: method.into() });
        self
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn is_classical(&self) -> bool {
        self.gates.iter().all(|g| g.kind.is_classical())
    }

    pub fn is_lowered(&self) -> bool {
        !self.gates.iter().any(Gate::has_negative_controls)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if let Some(roles) = &self.roles {
            if roles.len() != self.width {
                return Err(CircuitError::RolesLength { found: roles.len(), width: self.width });
            }
        }
        for (index, gate) in self.gates.iter().enumerate() {
            if matches!(gate.kind, GateKind::X | GateKind::H | GateKind::Z) && !gate.controls.is_empty() {
                return Err(CircuitError::UnexpectedControls { gate: index, kind: gate.kind });
            }
            if let Some(q) = gate.qubits().find(|&q| q >= self.width) {
                return Err(CircuitError::QubitOutOfRange { gate: index, qubit: q, width: self.width });
            }
            let mut seen = BTreeSet::new();
            for c in &gate.controls {
                if c.qubit == gate.target {
                    return Err(CircuitError::TargetIsControl { gate: index, target: gate.target });
                }
                if !seen.insert(c.qubit) {
                    return Err(CircuitError::DuplicateControl { gate: index, qubit: c.qubit });
                }
            }
        }
        Ok(())
    }

    /// Qubits carrying `role` on the chosen side; `None` when roles are absent.
    pub fn qubits_with_role(&self, output_side: bool, role: QubitRole) -> Option<Vec<usize>> {
        let roles = self.roles.as_ref()?;
        Some(
            roles
                .iter()
                .enumerate()
                .filter(|(_, r)| (if output_side { r.output } else { r.input }) == role)
                .map(|(q, _)| q)
                .collect(),
        )
    }
}

/// Replaces each negative control with a positive one wrapped in X gates.
///
/// X gates left pending after one controlled gate are cancelled against the
/// leading X gates of the next, so consecutive gates sharing a negative
/// control pay for the sandwich only once.
pub fn lower_polarity(c: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(c.gates.len());
    let mut pending: BTreeSet<usize> = BTreeSet::new();
    for gate in &c.gates {
        let controlled = matches!(gate.kind, GateKind::Mcx | GateKind::Mcz);
        if !controlled {
            gates.extend(pending.iter().map(|&q| Gate::x(q)));
            pending.clear();
            gates.push(gate.clone());
            continue;
        }
        let leading: BTreeSet<usize> = gate.controls.iter().filter(|c| c.is_negative()).map(|c| c.qubit).collect();
        gates.extend(pending.symmetric_difference(&leading).map(|&q| Gate::x(q)));
        let mut lowered = gate.clone();
        for ctl in &mut lowered.controls {
            ctl.polarity = Polarity::Positive;
        }
        gates.push(lowered);
        pending = leading;
    }
    gates.extend(pending.iter().map(|&q| Gate::x(q)));
    Circuit { gates, ..c.clone() }
}

pub fn complexity(c: &Circuit) -> Result<usize, CircuitError> {
    if !c.is_lowered() {
        return Err(CircuitError::NotLowered);
    }
    Ok(c.gates.iter().map(Gate::cost).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    #[default]
    Ok,
    Timeout,
    TooLarge,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::TooLarge => "too_large",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct MetricsReport {
    pub qubits: usize,
    pub gate_count: usize,
    pub complexity: usize,
    pub time_us: u64,
    pub status: Status,
}

/// Counts are taken after polarity lowering, so X sandwiches are included.
pub fn metrics(c: &Circuit, elapsed_us: u64) -> MetricsReport {
    let lowered;
    let c = if c.is_lowered() {
        c
    } else {
        lowered = lower_polarity(c);
        &lowered
    };
    MetricsReport {
        qubits: c.width,
        gate_count: c.gates.len(),
        complexity: c.gates.iter().map(Gate::cost).sum(),
        time_us: elapsed_us,
        status: Status::Ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cascade(width: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::new(width).with_gates(gates)
    }

    #[test]
    fn lowering_wraps_negative_control() {
        let c = cascade(3, vec![Gate::mcx(2, vec![Control::pos(0), Control::neg(1)])]);
        let l = lower_polarity(&c);
        assert_eq!(l.gates, vec![Gate::x(1), Gate::toffoli(0, 1, 2), Gate::x(1)]);
    }

    #[test]
    fn lowering_positive_circuit_is_identity() {
        let c = cascade(3, vec![Gate::x(0), Gate::toffoli(0, 1, 2), Gate::cnot(2, 1)]);
        assert_eq!(lower_polarity(&c), c);
    }

    #[test]
    fn lowering_shares_sandwich_between_neighbours() {
        let c = cascade(
            4,
            vec![
                Gate::mcx(2, vec![Control::pos(0), Control::neg(1)]),
                Gate::mcx(3, vec![Control::pos(0), Control::neg(1)]),
            ],
        );
        let l = lower_polarity(&c);
        let xs = l.gates.iter().filter(|g| g.kind == GateKind::X).count();
        assert_eq!(xs, 2);
        assert_eq!(l.gates.len(), 4);
    }

    #[test]
    fn lowering_partial_overlap() {
        let c = cascade(
            4,
            vec![
                Gate::mcx(3, vec![Control::neg(0), Control::neg(1)]),
                Gate::mcx(3, vec![Control::neg(1), Control::neg(2)]),
            ],
        );
        let l = lower_polarity(&c);
        let expected = vec![
            Gate::x(0),
            Gate::x(1),
            Gate::mcx(3, vec![Control::pos(0), Control::pos(1)]),
            Gate::x(0),
            Gate::x(2),
            Gate::mcx(3, vec![Control::pos(1), Control::pos(2)]),
            Gate::x(1),
            Gate::x(2),
        ];
        assert_eq!(l.gates, expected);
    }

    #[test]
    fn explicit_x_gates_survive() {
        let c = cascade(2, vec![Gate::mcx(1, vec![Control::neg(0)]), Gate::x(0), Gate::mcx(1, vec![Control::neg(0)])]);
        let l = lower_polarity(&c);
        assert_eq!(l.gates.len(), 7);
    }

    #[test]
    fn complexity_of_basic_gates() {
        assert_eq!(complexity(&cascade(1, vec![Gate::x(0)])), Ok(1));
        assert_eq!(complexity(&cascade(2, vec![Gate::cnot(0, 1)])), Ok(2));
        assert_eq!(complexity(&cascade(3, vec![Gate::toffoli(0, 1, 2)])), Ok(3));
        let six = Gate::mcx(6, (0..6).map(Control::pos).collect());
        assert_eq!(complexity(&cascade(7, vec![six])), Ok(7));
        let neg = cascade(2, vec![Gate::mcx(1, vec![Control::neg(0)])]);
        assert_eq!(complexity(&neg), Err(CircuitError::NotLowered));
    }

    #[test]
    fn diamond_oracle_lowers_to_thirteen() {
        let controls = (0..6).map(|q| if q % 2 == 0 { Control::pos(q) } else { Control::neg(q) }).collect();
        let c = cascade(7, vec![Gate::mcx(6, controls)]);
        let l = lower_polarity(&c);
        assert_eq!(complexity(&l), Ok(13));
        assert_eq!(metrics(&c, 0).gate_count, 7);
    }

    #[test]
    fn metrics_examples() {
        let m = metrics(&Circuit::new(3), 5);
        assert_eq!((m.qubits, m.gate_count, m.complexity, m.time_us, m.status), (3, 0, 0, 5, Status::Ok));
        let m = metrics(&cascade(3, vec![Gate::toffoli(0, 1, 2), Gate::cnot(0, 1)]), 0);
        assert_eq!(m.complexity, 5);
    }

    #[test]
    fn complexity_ignores_order() {
        let gates = vec![Gate::toffoli(0, 1, 2), Gate::x(1), Gate::cnot(2, 0)];
        let mut reversed = gates.clone();
        reversed.reverse();
        assert_eq!(complexity(&cascade(3, gates)), complexity(&cascade(3, reversed)));
    }

    #[test]
    fn validation_errors() {
        assert!(cascade(2, vec![Gate::cnot(0, 1)]).validate().is_ok());
        assert!(matches!(
            cascade(2, vec![Gate::cnot(0, 2)]).validate(),
            Err(CircuitError::QubitOutOfRange { qubit: 2, .. })
        ));
        assert!(matches!(cascade(2, vec![Gate::cnot(1, 1)]).validate(), Err(CircuitError::TargetIsControl { .. })));
        let dup = Gate::mcx(2, vec![Control::pos(0), Control::neg(0)]);
        assert!(matches!(cascade(3, vec![dup]).validate(), Err(CircuitError::DuplicateControl { .. })));
        let roles = RolePair::zip(&[QubitRole::FunctionInput], &[QubitRole::FunctionInput]);
        assert!(matches!(Circuit::new(2).with_roles(roles).validate(), Err(CircuitError::RolesLength { .. })));
    }

    #[test]
    fn empty_controls_collapse_to_plain_gates() {
        assert_eq!(Gate::mcx(0, vec![]).kind, GateKind::X);
        assert_eq!(Gate::mcz(0, vec![]).kind, GateKind::Z);
    }
}
