//! OpenQASM 3 text and JSON netlists.

use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateKind};

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("gate {0} has a negative control; lower the circuit first")]
    NegativeControlPresent(usize),
    #[error("malformed netlist: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid netlist: {0}")]
    Invalid(#[from] CircuitError),
}

/// Emits one line per gate in circuit order, followed by a comment block
/// listing qubit roles when the circuit has them.
pub fn to_qasm(c: &Circuit) -> Result<String, EmitError> {
    let mut out = format!("OPENQASM 3.0;\nqubit[{}] q;\n", c.width);
    for (index, g) in c.gates.iter().enumerate() {
        if g.has_negative_controls() {
            return Err(EmitError::NegativeControlPresent(index));
        }
        let op = match g.kind {
            GateKind::X | GateKind::Mcx => "x",
            GateKind::Z | GateKind::Mcz => "z",
            GateKind::H => "h",
        };
        if g.controls.is_empty() {
            writeln!(out, "{op} q[{}];", g.target).expect("string write");
        } else {
            let operands: Vec<String> = g.qubits().map(|q| format!("q[{q}]")).collect();
            writeln!(out, "ctrl({}) @ {op} {};", g.controls.len(), operands.join(", ")).expect("string write");
        }
    }
    if let Some(roles) = &c.roles {
        out.push_str("// roles (in -> out)\n");
        for (q, r) in roles.iter().enumerate() {
            writeln!(out, "// q[{q}]: {} -> {}", r.input, r.output).expect("string write");
        }
    }
    Ok(out)
}

pub fn to_json(c: &Circuit) -> String {
    serde_json::to_string_pretty(c).expect("circuit serializes")
}

pub fn from_json(text: &str) -> Result<Circuit, EmitError> {
    let c: Circuit = serde_json::from_str(text)?;
    c.validate()?;
    Ok(c)
}
