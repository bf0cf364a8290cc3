//! Circuit representation, the OpenQASM 2.0 frontend and random circuit
//! generators.
//!
//! Qubits are numbered from 0, and qubit 0 is the leftmost site of every
//! simulator (the most significant bit of a state-vector index).

pub mod generate;
pub mod library;
pub mod qasm;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{C64, ONE, ZERO};

/// Tolerance used when validating gate unitarity.
pub const UNITARY_TOL: f64 = 1e-8;

/// Row-major 2×2 matrix acting on a single qubit.
pub type Matrix2 = [C64; 4];
/// Row-major 4×4 matrix; basis index is `2·bit(first) + bit(second)`.
pub type Matrix4 = [C64; 16];

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    One {
        target: usize,
        matrix: Matrix2,
    },
    Two {
        targets: [usize; 2],
        matrix: Matrix4,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub label: String,
    pub kind: GateKind,
}

fn unitarity_deviation(m: &[C64], dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim {
                acc += m[k * dim + i].conj() * m[k * dim + j];
            }
            let expected = if i == j { ONE } else { ZERO };
            worst = worst.max((acc - expected).norm());
        }
    }
    worst
}

impl Gate {
    pub fn one(label: impl Into<String>, target: usize, matrix: Matrix2) -> Result<Self> {
        let gate = Self::new_unchecked(label, GateKind::One { target, matrix });
        gate.check_unitary()?;
        Ok(gate)
    }

    pub fn two(
        label: impl Into<String>,
        first: usize,
        second: usize,
        matrix: Matrix4,
    ) -> Result<Self> {
        if first == second {
            return Err(Error::InvalidArgument(format!(
                "two-qubit gate needs distinct targets, got ({first}, {second})"
            )));
        }
        let gate = Self::new_unchecked(
            label,
            GateKind::Two {
                targets: [first, second],
                matrix,
            },
        );
        gate.check_unitary()?;
        Ok(gate)
    }

    /// Builds a gate without checking unitarity. Every simulator re-checks
    /// before applying it.
    pub fn new_unchecked(label: impl Into<String>, kind: GateKind) -> Self {
        Self {
            label: label.into(),
            kind,
        }
    }

    pub fn arity(&self) -> usize {
        match self.kind {
            GateKind::One { .. } => 1,
            GateKind::Two { .. } => 2,
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self.kind {
            GateKind::One { target, .. } => vec![target],
            GateKind::Two { targets, .. } => targets.to_vec(),
        }
    }

    pub fn max_target(&self) -> usize {
        match self.kind {
            GateKind::One { target, .. } => target,
            GateKind::Two { targets, .. } => targets[0].max(targets[1]),
        }
    }

    pub fn unitarity_deviation(&self) -> f64 {
        match &self.kind {
            GateKind::One { matrix, .. } => unitarity_deviation(matrix, 2),
            GateKind::Two { matrix, .. } => unitarity_deviation(matrix, 4),
        }
    }

    pub fn check_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > UNITARY_TOL || deviation.is_nan() {
            return Err(Error::NonUnitary {
                label: self.label.clone(),
                deviation,
            });
        }
        Ok(())
    }

    /// Checks unitarity and that every target is below `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if let GateKind::Two {
            targets: [a, b], ..
        } = self.kind
        {
            if a == b {
                return Err(Error::InvalidArgument(format!(
                    "gate '{}' targets qubit {a} twice",
                    self.label
                )));
            }
        }
        if self.max_target() >= num_qubits {
            return Err(Error::OutOfRange(format!(
                "gate '{}' targets qubit {} of a {num_qubits}-qubit register",
                self.label,
                self.max_target()
            )));
        }
        self.check_unitary()
    }
}

/// Re-expresses a two-qubit matrix with its qubit order exchanged, i.e.
/// `SWAP · m · SWAP`.
pub fn swap_qubit_order(m: &Matrix4) -> Matrix4 {
    const P: [usize; 4] = [0, 2, 1, 3];
    let mut out = [ZERO; 16];
    for r in 0..4 {
        for c in 0..4 {
            out[P[r] * 4 + P[c]] = m[r * 4 + c];
        }
    }
    out
}

/// Two-qubit gate data with targets ordered `left < right`.
pub(crate) fn ordered_pair(targets: [usize; 2], matrix: &Matrix4) -> (usize, usize, Matrix4) {
    let [a, b] = targets;
    if a < b {
        (a, b, *matrix)
    } else {
        (b, a, swap_qubit_order(matrix))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircuitSource {
    Manual,
    Qasm {
        path: Option<String>,
    },
    Generator {
        name: String,
        seed: u64,
        params: Vec<(String, usize)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    pub source: CircuitSource,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            source: CircuitSource::Manual,
        }
    }

    pub fn with_source(mut self, source: CircuitSource) -> Self {
        self.source = source;
        self
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.arity() == 2).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::library;

    #[test]
    fn gate_validation() {
        let bad = [ONE, ONE, ZERO, ONE];
        assert!(matches!(
            Gate::one("bad", 0, bad),
            Err(Error::NonUnitary { .. })
        ));
        assert!(Gate::two("cx", 1, 1, library::cx()).is_err());
        let g = Gate::two("cx", 0, 3, library::cx()).unwrap();
        assert!(matches!(g.validate(3), Err(Error::OutOfRange(_))));
        assert!(g.validate(4).is_ok());
    }

    #[test]
    fn swap_order_is_involution() {
        let cx = library::cx();
        let flipped = swap_qubit_order(&cx);
        // CX with control on the second qubit flips bit 0 when bit 0 of the
        // index (second qubit) is set: |01> -> |11>
        assert_eq!(flipped[3 * 4 + 1], ONE);
        assert_eq!(swap_qubit_order(&flipped), cx);
    }

    #[test]
    fn circuit_rejects_out_of_range() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::one("h", 2, library::h()).unwrap()).is_err());
        c.push(Gate::one("h", 1, library::h()).unwrap()).unwrap();
        assert_eq!(c.len(), 1);
    }
}
