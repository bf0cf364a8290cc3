//! Exact dense state-vector simulation, used as the ground truth for every
//! tensor-network engine.
//!
//! Amplitude index bit `n-1-q` holds qubit `q`, so qubit 0 is the most
//! significant bit and `|σ0 σ1 … σ(n-1)⟩` reads left to right.

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::tensor::{C64, ONE, ZERO};

/// Largest register a dense vector is allowed to hold.
pub const MAX_QUBITS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

fn check_capacity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Capacity {
            requested: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        check_capacity(n)?;
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[0] = ONE;
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidArgument(format!(
                "state vector length {len} is not a power of two"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_capacity(n)?;
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&mut self, alpha: C64) {
        self.amplitudes.iter_mut().for_each(|z| *z *= alpha);
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match &gate.kind {
            GateKind::One { target, matrix } => {
                let m = self.mask(*target);
                for idx in 0..self.amplitudes.len() {
                    if idx & m != 0 {
                        continue;
                    }
                    let (a0, a1) = (self.amplitudes[idx], self.amplitudes[idx | m]);
                    self.amplitudes[idx] = matrix[0] * a0 + matrix[1] * a1;
                    self.amplitudes[idx | m] = matrix[2] * a0 + matrix[3] * a1;
                }
            }
            GateKind::Two { targets, matrix } => {
                let (ma, mb) = (self.mask(targets[0]), self.mask(targets[1]));
                for idx in 0..self.amplitudes.len() {
                    if idx & (ma | mb) != 0 {
                        continue;
                    }
                    let slots = [idx, idx | mb, idx | ma, idx | ma | mb];
                    let old = slots.map(|s| self.amplitudes[s]);
                    for (r, &slot) in slots.iter().enumerate() {
                        let row = &matrix[r * 4..r * 4 + 4];
                        self.amplitudes[slot] =
                            row[0] * old[0] + row[1] * old[1] + row[2] * old[2] + row[3] * old[3];
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::Dimension(format!(
                "circuit has {} qubits, state has {}",
                circuit.num_qubits(),
                self.num_qubits
            )));
        }
        circuit.gates().iter().try_for_each(|g| self.apply(g))
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Dimension(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Runs `circuit` from `|0…0⟩`.
    pub fn simulate(circuit: &Circuit) -> Result<Self> {
        let mut sv = Self::zero(circuit.num_qubits())?;
        sv.apply_circuit(circuit)?;
        Ok(sv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::generate::haar_random_unitary;
    use crate::circuit::library;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn random_state(n: usize, rng: &mut impl Rng) -> StateVector {
        let mut amps: Vec<C64> = (0..1 << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        StateVector::from_amplitudes(amps).unwrap()
    }

    /// Dense `2^n × 2^n` matrix of a gate built from Kronecker products and
    /// basis permutations, independent of the strided update in `apply`.
    fn dense_operator(n: usize, gate: &Gate) -> Vec<C64> {
        let dim = 1 << n;
        let mut out = vec![ZERO; dim * dim];
        let bit = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
        for r in 0..dim {
            for c in 0..dim {
                out[r * dim + c] = match &gate.kind {
                    GateKind::One { target, matrix } => {
                        let others_equal = (0..n).all(|q| q == *target || bit(r, q) == bit(c, q));
                        if others_equal {
                            matrix[bit(r, *target) * 2 + bit(c, *target)]
                        } else {
                            ZERO
                        }
                    }
                    GateKind::Two {
                        targets: [a, b],
                        matrix,
                    } => {
                        let others_equal =
                            (0..n).all(|q| q == *a || q == *b || bit(r, q) == bit(c, q));
                        if others_equal {
                            let ri = bit(r, *a) * 2 + bit(r, *b);
                            let ci = bit(c, *a) * 2 + bit(c, *b);
                            matrix[ri * 4 + ci]
                        } else {
                            ZERO
                        }
                    }
                };
            }
        }
        out
    }

    #[test]
    fn init_zero() {
        assert_eq!(StateVector::zero(1).unwrap().amplitudes(), &[ONE, ZERO]);
        let sv = StateVector::zero(3).unwrap();
        assert_eq!(sv.amplitudes()[0], ONE);
        assert!(sv.amplitudes()[1..].iter().all(|&z| z == ZERO));
        assert_eq!(sv.norm_sqr(), 1.0);
        assert!(matches!(StateVector::zero(0), Err(Error::Capacity { .. })));
        assert!(matches!(StateVector::zero(31), Err(Error::Capacity { .. })));
    }

    #[test]
    fn hadamard_and_cx() {
        let mut sv = StateVector::zero(1).unwrap();
        sv.apply(&Gate::one("h", 0, library::h()).unwrap()).unwrap();
        assert!((sv.amplitudes()[0].re - H).abs() < 1e-15);
        assert!((sv.amplitudes()[1].re - H).abs() < 1e-15);

        // |10> -> |11>
        let mut sv = StateVector::zero(2).unwrap();
        sv.apply(&Gate::one("x", 0, library::x()).unwrap()).unwrap();
        sv.apply(&Gate::two("cx", 0, 1, library::cx()).unwrap())
            .unwrap();
        assert_eq!(sv.amplitudes()[3], ONE);
    }

    #[test]
    fn rejects_non_unitary() {
        let mut sv = StateVector::zero(2).unwrap();
        let bad = Gate::new_unchecked(
            "bad",
            GateKind::One {
                target: 0,
                matrix: [ONE, ONE, ZERO, ONE],
            },
        );
        assert!(matches!(sv.apply(&bad), Err(Error::NonUnitary { .. })));
    }

    #[test]
    fn random_two_qubit_gate_matches_dense_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(a, b) in &[(0, 1), (1, 0), (0, 2), (2, 1)] {
            let sv = random_state(3, &mut rng);
            let u = haar_random_unitary(4, &mut rng).unwrap();
            let gate = Gate::two("u", a, b, u.try_into().unwrap()).unwrap();
            let mut applied = sv.clone();
            applied.apply(&gate).unwrap();
            let op = dense_operator(3, &gate);
            for r in 0..8 {
                let expected: C64 = (0..8).map(|c| op[r * 8 + c] * sv.amplitudes()[c]).sum();
                assert!((expected - applied.amplitudes()[r]).norm() < 1e-12);
            }
            assert!((applied.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_products() {
        let zero = StateVector::zero(1).unwrap();
        let mut one = zero.clone();
        one.apply(&Gate::one("x", 0, library::x()).unwrap())
            .unwrap();
        assert_eq!(zero.inner(&zero).unwrap(), ONE);
        assert_eq!(zero.inner(&one).unwrap(), ZERO);

        let mut bell = StateVector::zero(2).unwrap();
        bell.apply(&Gate::one("h", 0, library::h()).unwrap())
            .unwrap();
        bell.apply(&Gate::two("cx", 0, 1, library::cx()).unwrap())
            .unwrap();
        let z = StateVector::zero(2).unwrap().inner(&bell).unwrap();
        assert!((z.re - H).abs() < 1e-15 && z.im.abs() < 1e-15);

        assert!(zero.inner(&bell).is_err());
    }

    #[test]
    fn linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let sv = random_state(4, &mut rng);
        let alpha = C64::new(0.3, -1.7);
        let gate = Gate::two(
            "u",
            3,
            1,
            haar_random_unitary(4, &mut rng)
                .unwrap()
                .try_into()
                .unwrap(),
        )
        .unwrap();
        let mut lhs = sv.clone();
        lhs.scale(alpha);
        lhs.apply(&gate).unwrap();
        let mut rhs = sv;
        rhs.apply(&gate).unwrap();
        rhs.scale(alpha);
        for (x, y) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn norm_drift_over_many_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 6;
        let mut sv = StateVector::zero(n).unwrap();
        for _ in 0..1000 {
            let gate = if rng.random_bool(0.5) {
                let q = rng.random_range(0..n);
                Gate::one(
                    "u",
                    q,
                    haar_random_unitary(2, &mut rng)
                        .unwrap()
                        .try_into()
                        .unwrap(),
                )
            } else {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                Gate::two(
                    "u",
                    a,
                    b,
                    haar_random_unitary(4, &mut rng)
                        .unwrap()
                        .try_into()
                        .unwrap(),
                )
            }
            .unwrap();
            sv.apply(&gate).unwrap();
        }
        assert!((sv.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
