//! Simple-update engine on the Vidal form `Γ1 S1 Γ2 S2 … S(N-1) ΓN`.
//!
//! A gate on `(i, i+1)` reads only `Γi`, `Γi+1` and the weight vectors on
//! bonds `i-1`, `i` and `i+1` (boundary weights are the scalar 1):
//!
//! 1. `Θ = S(i-1) Γi Si Γi+1 S(i+1)`, contracted with the gate;
//! 2. SVD `Θ = U S V†`, truncated to at most `min(2·D_left, 2·D_right, max_kept)`
//!    values and by the relative cutoff;
//! 3. `Si ← S`, `Γi ← S(i-1)⁻¹ U`, `Γi+1 ← V† S(i+1)⁻¹`.
//!
//! No sweep ever touches the rest of the chain, so the cost of a gate does not
//! depend on where the previous gate acted.
//!
//! Weights below [`WEIGHT_FLOOR`] times the largest weight on their bond are
//! never stored; they are discarded at creation instead of being inverted
//! later.

use crate::circuit::{ordered_pair, Gate, GateKind, Matrix4};
use crate::error::{Error, Result};
use crate::mps::{
    adjacent_pair, apply_one_site, chain_to_statevector, left_canonical_deviation,
    right_canonical_deviation, two_site_matrix, zero_site, MpsState, UpdateCounters,
};
use crate::statevector::StateVector;
use crate::tensor::{svd, truncate_to, DenseTensor, SvdTriple, TruncationPolicy, C64};

/// Relative size below which a singular value is treated as exactly zero.
pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct VidalState {
    sites: Vec<DenseTensor>,
    /// `weights[j]` sits between sites `j` and `j+1`.
    weights: Vec<Vec<f64>>,
    discarded_weight: f64,
    counters: UpdateCounters,
    floor_warnings: usize,
}

const UNIT: [f64; 1] = [1.0];

fn scale_bonds(site: &DenseTensor, left: &[f64], right: &[f64]) -> DenseTensor {
    let (l, r) = (site.shape()[1], site.shape()[2]);
    let mut out = site.clone();
    for (idx, z) in out.data_mut().iter_mut().enumerate() {
        let a = (idx / r) % l;
        let b = idx % r;
        *z *= left[a] * right[b];
    }
    out
}

/// Inverse weights with anything under the floor mapped to zero. Returns the
/// inverses and how many entries were floored.
fn floored_inverse(w: &[f64]) -> (Vec<f64>, usize) {
    let top = w.iter().copied().fold(0.0, f64::max);
    let mut floored = 0;
    let inv = w
        .iter()
        .map(|&x| {
            if x > WEIGHT_FLOOR * top {
                1.0 / x
            } else {
                floored += 1;
                0.0
            }
        })
        .collect();
    (inv, floored)
}

impl VidalState {
    /// `|0…0⟩`: every `Γ` is `[1]` / `[0]` and every weight vector is `(1)`.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "a state needs at least one qubit".into(),
            ));
        }
        Ok(Self {
            sites: vec![zero_site(); n],
            weights: vec![vec![1.0]; n - 1],
            discarded_weight: 0.0,
            counters: UpdateCounters::default(),
            floor_warnings: 0,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[DenseTensor] {
        &self.sites
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    pub fn counters(&self) -> UpdateCounters {
        self.counters
    }

    /// Number of divisions by a weight that fell under the floor.
    pub fn floor_warnings(&self) -> usize {
        self.floor_warnings
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.weights.iter().map(Vec::len).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    fn weight(&self, bond: Option<usize>) -> &[f64] {
        match bond {
            Some(j) if j < self.weights.len() => &self.weights[j],
            _ => &UNIT,
        }
    }

    /// Largest deviation from the canonical conditions over all sites.
    ///
    /// Step (f) sets `S(i-1) Γi = U`, so `S(i-1) Γi` is the left-normalized
    /// tensor (`Σ A†A = 1`) and `Γi Si` the right-normalized one (`Σ B B† = 1`).
    pub fn canonical_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, site) in self.sites.iter().enumerate() {
            let left = self.weight(i.checked_sub(1));
            let right = self.weight(Some(i));
            let a = scale_bonds(site, left, &vec![1.0; site.shape()[2]]);
            let b = scale_bonds(site, &vec![1.0; site.shape()[1]], right);
            worst = worst
                .max(left_canonical_deviation(&a))
                .max(right_canonical_deviation(&b));
        }
        worst
    }

    pub fn apply_1q(&mut self, gate: &Gate) -> Result<()> {
        let GateKind::One { target, matrix } = &gate.kind else {
            return Err(Error::InvalidArgument(format!(
                "'{}' is not a one-qubit gate",
                gate.label
            )));
        };
        gate.validate(self.num_qubits())?;
        self.sites[*target] = apply_one_site(&self.sites[*target], matrix);
        Ok(())
    }

    fn simple_update(&mut self, i: usize, m: &Matrix4, policy: &TruncationPolicy) -> Result<f64> {
        let left = self.weight(i.checked_sub(1)).to_vec();
        let right = self.weight(Some(i + 1)).to_vec();
        let (dl, dr) = (left.len(), right.len());

        // (b), (c): Θ = S(i-1) Γi Si Γi+1 S(i+1) contracted with the gate
        let a = scale_bonds(&self.sites[i], &left, &self.weights[i]);
        let b = scale_bonds(
            &self.sites[i + 1],
            &vec![1.0; self.weights[i].len()],
            &right,
        );
        let theta = two_site_matrix(&a, &b, m)?;

        // (d), (e)
        let full = svd(&theta)?;
        let cap = (2 * dl).min(2 * dr).min(policy.max_kept);
        let mut keep = TruncationPolicy {
            max_kept: cap,
            ..*policy
        }
        .kept_count(&full.s);
        let top = full.s[0];
        keep = keep.min(
            full.s
                .iter()
                .take_while(|&&x| x > WEIGHT_FLOOR * top)
                .count()
                .max(1),
        );
        let (SvdTriple { u, s, vt }, discarded) = truncate_to(full, keep, policy.renormalize);
        let k = s.len();

        // (f): divide the environment weights back out
        let (inv_left, fl) = floored_inverse(&left);
        let (inv_right, fr) = floored_inverse(&right);
        self.floor_warnings += fl + fr;
        let u = u.reshape(&[2, dl, k])?;
        self.sites[i] = scale_bonds(&u, &inv_left, &vec![1.0; k]);
        let v = vt.reshape(&[k, 2, dr])?.permute(&[1, 0, 2])?;
        self.sites[i + 1] = scale_bonds(&v, &vec![1.0; k], &inv_right);
        self.weights[i] = s;
        self.discarded_weight += discarded;
        Ok(discarded)
    }

    pub fn apply_2q_adjacent(&mut self, gate: &Gate, policy: &TruncationPolicy) -> Result<()> {
        gate.validate(self.num_qubits())?;
        let (i, m) = adjacent_pair(gate)?;
        self.simple_update(i, &m, policy)?;
        self.counters.gate_updates += 1;
        Ok(())
    }

    /// Long-range gate through adjacent swaps, each one a simple update with
    /// the same policy.
    pub fn apply_2q_longrange(&mut self, gate: &Gate, policy: &TruncationPolicy) -> Result<()> {
        self.apply_2q_longrange_with(gate, policy, policy)
    }

    pub fn apply_2q_longrange_with(
        &mut self,
        gate: &Gate,
        policy: &TruncationPolicy,
        swap_policy: &TruncationPolicy,
    ) -> Result<()> {
        gate.validate(self.num_qubits())?;
        let GateKind::Two { targets, matrix } = &gate.kind else {
            return Err(Error::InvalidArgument(format!(
                "'{}' is not a two-qubit gate",
                gate.label
            )));
        };
        let (a, b, m) = ordered_pair(*targets, matrix);
        let swap = crate::circuit::library::swap();
        for k in a..b - 1 {
            self.simple_update(k, &swap, swap_policy)?;
            self.counters.swap_updates += 1;
        }
        self.simple_update(b - 1, &m, policy)?;
        self.counters.gate_updates += 1;
        for k in (a..b - 1).rev() {
            self.simple_update(k, &swap, swap_policy)?;
            self.counters.swap_updates += 1;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate, policy: &TruncationPolicy) -> Result<()> {
        match gate.kind {
            GateKind::One { .. } => self.apply_1q(gate),
            GateKind::Two { .. } => self.apply_2q_longrange(gate, policy),
        }
    }

    /// Plain MPS `(S0 Γ1)(S1 Γ2)…`, each weight absorbed into its right
    /// neighbour.
    pub fn to_plain_mps(&self) -> MpsState {
        let sites: Vec<DenseTensor> = self
            .sites
            .iter()
            .enumerate()
            .map(|(i, s)| scale_bonds(s, self.weight(i.checked_sub(1)), &vec![1.0; s.shape()[2]]))
            .collect();
        MpsState::from_sites(sites)
            .expect("vidal chain is consistent")
            .with_discarded_weight(self.discarded_weight)
    }

    pub fn to_statevector(&self) -> Result<StateVector> {
        chain_to_statevector(self.to_plain_mps().sites())
    }

    pub fn norm_sqr(&self) -> f64 {
        let plain = self.to_plain_mps();
        plain.overlap(&plain).map(|z: C64| z.re).unwrap_or(f64::NAN)
    }
}
