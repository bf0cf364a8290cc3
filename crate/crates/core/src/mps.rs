//! Matrix product states updated in mixed canonical form.
//!
//! Site tensors are stored as `M[σ, a_left, a_right]`. In `Canonical(m)` form
//! every site left of `m` is left-normalized (`Σ_σ A†A = I`), every site right
//! of `m` is right-normalized (`Σ_σ BB† = I`), and site `m` carries the
//! Schmidt coefficients of both bonds adjacent to it.
//!
//! Two-qubit gates on `(i, i+1)` first move the center to site `i` with QR
//! steps, one per site travelled, then contract both sites with the gate,
//! split by SVD and truncate. The center only moves when a gate needs it. The singular values are
//! absorbed into the right factor, leaving the center at `i+1`. Gates on
//! distant qubits are routed through a network of adjacent swaps.

use crate::circuit::{ordered_pair, Gate, GateKind, Matrix2, Matrix4};
use crate::error::{Error, Result};
use crate::statevector::{StateVector, MAX_QUBITS};
use crate::tensor::{
    contract, qr_left, qr_right, reshape_merge, svd, truncate, DenseTensor, SvdTriple,
    TruncationPolicy, C64, ONE, ZERO,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Plain,
    Canonical(usize),
}

/// Work performed on a state, for cost accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UpdateCounters {
    /// One QR factorization plus absorption of `R` into a neighbour.
    pub qr_steps: usize,
    /// Adjacent two-site updates that applied a circuit gate.
    pub gate_updates: usize,
    /// Adjacent two-site updates that applied a routing swap.
    pub swap_updates: usize,
}

#[derive(Clone, Debug)]
pub struct MpsState {
    sites: Vec<DenseTensor>,
    form: Form,
    discarded_weight: f64,
    counters: UpdateCounters,
}

pub(crate) fn gate_tensor(m: &Matrix4) -> DenseTensor {
    // axes (σ1', σ2', σ1, σ2)
    DenseTensor::new(vec![2, 2, 2, 2], m.to_vec()).expect("16 entries")
}

/// Contracts two neighbouring sites with a gate and returns the two-site
/// matrix `Θ[(σ1, a_left), (σ2, a_right)]`.
pub(crate) fn two_site_matrix(
    a: &DenseTensor,
    b: &DenseTensor,
    m: &Matrix4,
) -> Result<DenseTensor> {
    let pair = contract(a, b, &[(2, 1)])?; // [τ1, l, τ2, r]
    let theta = contract(&gate_tensor(m), &pair, &[(2, 0), (3, 2)])?; // [σ1, σ2, l, r]
    Ok(reshape_merge(&theta, &[&[0, 2], &[1, 3]])?.0)
}

/// Splits `V†[k, (σ, r)]` into a site tensor `[σ, k, r]`, scaling row `k` by
/// `weights[k]`.
pub(crate) fn right_site_from_vt(
    vt: DenseTensor,
    weights: &[f64],
    right: usize,
) -> Result<DenseTensor> {
    let k = weights.len();
    let mut data = vt.into_data();
    for (row, &w) in data.chunks_mut(2 * right).zip(weights) {
        row.iter_mut().for_each(|z| *z *= w);
    }
    DenseTensor::new(vec![k, 2, right], data)?.permute(&[1, 0, 2])
}

pub(crate) fn apply_one_site(site: &DenseTensor, m: &Matrix2) -> DenseTensor {
    let half = site.len() / 2;
    let (lo, hi) = site.data().split_at(half);
    let mut data = Vec::with_capacity(site.len());
    data.extend(lo.iter().zip(hi).map(|(x0, x1)| m[0] * x0 + m[1] * x1));
    data.extend(lo.iter().zip(hi).map(|(x0, x1)| m[2] * x0 + m[3] * x1));
    DenseTensor::new(site.shape().to_vec(), data).expect("same shape")
}

fn identity_deviation(m: &DenseTensor) -> f64 {
    let n = m.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { ONE } else { ZERO };
            worst = worst.max((m.get(&[i, j]) - expected).norm());
        }
    }
    worst
}

/// Max deviation of `Σ_σ A^σ† A^σ` from the identity.
pub fn left_canonical_deviation(site: &DenseTensor) -> f64 {
    let (d, l, r) = (site.shape()[0], site.shape()[1], site.shape()[2]);
    let a = site.clone().reshape(&[d * l, r]).expect("rank-3 site");
    let gram = a.dagger().expect("matrix").matmul(&a).expect("conformable");
    identity_deviation(&gram)
}

/// Max deviation of `Σ_σ B^σ B^σ†` from the identity.
pub fn right_canonical_deviation(site: &DenseTensor) -> f64 {
    let (d, l, r) = (site.shape()[0], site.shape()[1], site.shape()[2]);
    let b = site
        .permute(&[1, 0, 2])
        .expect("rank-3 site")
        .reshape(&[l, d * r])
        .expect("same length");
    let gram = b.matmul(&b.dagger().expect("matrix")).expect("conformable");
    identity_deviation(&gram)
}

/// Transfer-matrix overlap `⟨a|b⟩` of two site chains.
pub(crate) fn chain_overlap(a: &[DenseTensor], b: &[DenseTensor]) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "overlap of {}- and {}-qubit states",
            a.len(),
            b.len()
        )));
    }
    let mut env = DenseTensor::identity(1);
    for (sa, sb) in a.iter().zip(b) {
        let x = contract(&env, sb, &[(1, 1)])?; // [la, σ, rb]
        env = contract(&sa.conj(), &x, &[(0, 1), (1, 0)])?; // [ra, rb]
    }
    Ok(env.data()[0])
}

pub(crate) fn chain_to_statevector(sites: &[DenseTensor]) -> Result<StateVector> {
    if sites.len() > MAX_QUBITS {
        return Err(Error::Capacity {
            requested: sites.len(),
            limit: MAX_QUBITS,
        });
    }
    let mut acc = DenseTensor::identity(1);
    for site in sites {
        let next = contract(&acc, site, &[(1, 1)])?; // [idx, σ, r]
        let (rows, r) = (next.shape()[0] * 2, next.shape()[2]);
        acc = next.reshape(&[rows, r])?;
    }
    StateVector::from_amplitudes(acc.into_data())
}

pub(crate) fn validate_chain(sites: &[DenseTensor]) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::InvalidArgument(
            "a state needs at least one qubit".into(),
        ));
    }
    for (k, s) in sites.iter().enumerate() {
        if s.rank() != 3 || s.shape()[0] != 2 {
            return Err(Error::Dimension(format!(
                "site {k} has shape {:?}, expected [2, left, right]",
                s.shape()
            )));
        }
        if !s.is_finite() {
            return Err(Error::Numeric(format!("site {k} contains NaN or infinity")));
        }
    }
    let n = sites.len();
    if sites[0].shape()[1] != 1 || sites[n - 1].shape()[2] != 1 {
        return Err(Error::Dimension("boundary bond extents must be 1".into()));
    }
    for k in 0..n - 1 {
        if sites[k].shape()[2] != sites[k + 1].shape()[1] {
            return Err(Error::Dimension(format!(
                "bond {k}: site {k} has right extent {} but site {} has left extent {}",
                sites[k].shape()[2],
                k + 1,
                sites[k + 1].shape()[1]
            )));
        }
    }
    Ok(())
}

pub(crate) fn zero_site() -> DenseTensor {
    DenseTensor::new(vec![2, 1, 1], vec![ONE, ZERO]).expect("2 entries")
}

pub(crate) fn adjacent_pair(gate: &Gate) -> Result<(usize, Matrix4)> {
    let GateKind::Two { targets, matrix } = &gate.kind else {
        return Err(Error::InvalidArgument(format!(
            "'{}' is not a two-qubit gate",
            gate.label
        )));
    };
    let (a, b, m) = ordered_pair(*targets, matrix);
    if b != a + 1 {
        return Err(Error::InvalidArgument(format!(
            "gate '{}' on ({}, {}) is not between adjacent qubits",
            gate.label, targets[0], targets[1]
        )));
    }
    Ok((a, m))
}

impl MpsState {
    /// `|0…0⟩` with all bond extents 1.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "a state needs at least one qubit".into(),
            ));
        }
        Ok(Self {
            sites: vec![zero_site(); n],
            form: Form::Canonical(0),
            discarded_weight: 0.0,
            counters: UpdateCounters::default(),
        })
    }

    /// Wraps arbitrary site tensors `[2, left, right]` as a plain MPS.
    pub fn from_sites(sites: Vec<DenseTensor>) -> Result<Self> {
        validate_chain(&sites)?;
        Ok(Self {
            sites,
            form: Form::Plain,
            discarded_weight: 0.0,
            counters: UpdateCounters::default(),
        })
    }

    pub(crate) fn with_discarded_weight(mut self, w: f64) -> Self {
        self.discarded_weight = w;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[DenseTensor] {
        &self.sites
    }

    pub fn form(&self) -> Form {
        self.form
    }

    /// Sum of squared singular values dropped so far.
    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    pub fn counters(&self) -> UpdateCounters {
        self.counters
    }

    pub fn reset_counters(&mut self) {
        self.counters = UpdateCounters::default();
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1]
            .iter()
            .map(|s| s.shape()[2])
            .collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    pub fn norm_sqr(&self) -> f64 {
        match self.form {
            Form::Canonical(c) => self.sites[c].norm_sqr(),
            Form::Plain => chain_overlap(&self.sites, &self.sites)
                .map(|z| z.re)
                .unwrap_or(f64::NAN),
        }
    }

    /// Largest deviation from the canonical conditions claimed by the form
    /// tag, or `None` for a plain state.
    pub fn canonical_deviation(&self) -> Option<f64> {
        let Form::Canonical(c) = self.form else {
            return None;
        };
        let left = self.sites[..c].iter().map(left_canonical_deviation);
        let right = self.sites[c + 1..].iter().map(right_canonical_deviation);
        Some(left.chain(right).fold(0.0, f64::max))
    }

    fn check_site(&self, i: usize) -> Result<()> {
        if i >= self.sites.len() {
            return Err(Error::OutOfRange(format!(
                "site {i} of a {}-site state",
                self.sites.len()
            )));
        }
        Ok(())
    }

    /// Moves the orthogonality center from site `k` to `k+1`.
    fn shift_right(&mut self, k: usize) -> Result<()> {
        let (l, r) = (self.sites[k].shape()[1], self.sites[k].shape()[2]);
        let mat = self.sites[k].clone().reshape(&[2 * l, r])?;
        let (q, rmat) = qr_left(&mat)?;
        let kept = q.cols();
        self.sites[k] = q.reshape(&[2, l, kept])?;
        self.sites[k + 1] = contract(&rmat, &self.sites[k + 1], &[(1, 1)])?.permute(&[1, 0, 2])?;
        self.counters.qr_steps += 1;
        Ok(())
    }

    /// Moves the orthogonality center from site `k` to `k-1`.
    fn shift_left(&mut self, k: usize) -> Result<()> {
        let (l, r) = (self.sites[k].shape()[1], self.sites[k].shape()[2]);
        let mat = self.sites[k].permute(&[1, 0, 2])?.reshape(&[l, 2 * r])?;
        let (rmat, q) = qr_right(&mat)?;
        let kept = q.rows();
        self.sites[k] = q.reshape(&[kept, 2, r])?.permute(&[1, 0, 2])?;
        self.sites[k - 1] = contract(&self.sites[k - 1], &rmat, &[(2, 0)])?;
        self.counters.qr_steps += 1;
        Ok(())
    }

    /// Brings the state into `Canonical(target)` form with QR sweeps. The
    /// represented vector is unchanged.
    pub fn move_center(&mut self, target: usize) -> Result<()> {
        self.check_site(target)?;
        match self.form {
            Form::Canonical(c) if c == target => {}
            Form::Canonical(c) if c < target => {
                for k in c..target {
                    self.shift_right(k)?;
                }
            }
            Form::Canonical(c) => {
                for k in (target + 1..=c).rev() {
                    self.shift_left(k)?;
                }
            }
            Form::Plain => {
                for k in 0..target {
                    self.shift_right(k)?;
                }
                for k in (target + 1..self.sites.len()).rev() {
                    self.shift_left(k)?;
                }
            }
        }
        self.form = Form::Canonical(target);
        Ok(())
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

    /// Contract, split and truncate at `(i, i+1)`. Returns the discarded weight.
    fn two_site_update(&mut self, i: usize, m: &Matrix4, policy: &TruncationPolicy) -> Result<f64> {
        self.move_center(i)?;
        let (l, r) = (self.sites[i].shape()[1], self.sites[i + 1].shape()[2]);
        let theta = two_site_matrix(&self.sites[i], &self.sites[i + 1], m)?;
        let (SvdTriple { u, s, vt }, discarded) = truncate(svd(&theta)?, policy);
        let k = s.len();
        self.sites[i] = u.reshape(&[2, l, k])?;
        self.sites[i + 1] = right_site_from_vt(vt, &s, r)?;
        self.form = Form::Canonical(i + 1);
        self.discarded_weight += discarded;
        Ok(discarded)
    }

    /// Applies a gate on sites `(i, i+1)`.
    pub fn apply_2q_adjacent(&mut self, gate: &Gate, policy: &TruncationPolicy) -> Result<()> {
        gate.validate(self.num_qubits())?;
        let (i, m) = adjacent_pair(gate)?;
        self.two_site_update(i, &m, policy)?;
        self.counters.gate_updates += 1;
        Ok(())
    }

    /// Applies a two-qubit gate on any pair, swapping the left qubit rightward
    /// until it neighbours the right one and back afterwards. Swaps are
    /// truncated with the same policy as the gate.
    pub fn apply_2q_longrange(&mut self, gate: &Gate, policy: &TruncationPolicy) -> Result<()> {
        self.apply_2q_longrange_with(gate, policy, policy)
    }

    /// As [`apply_2q_longrange`](Self::apply_2q_longrange) with a separate
    /// policy for the routing swaps (e.g. [`TruncationPolicy::exact`]).
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
            self.two_site_update(k, &swap, swap_policy)?;
            self.counters.swap_updates += 1;
        }
        self.two_site_update(b - 1, &m, policy)?;
        self.counters.gate_updates += 1;
        for k in (a..b - 1).rev() {
            self.two_site_update(k, &swap, swap_policy)?;
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

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        chain_overlap(&self.sites, &other.sites)
    }

    pub fn to_statevector(&self) -> Result<StateVector> {
        chain_to_statevector(&self.sites)
    }

    /// Schmidt coefficients across the bond between sites `bond` and
    /// `bond+1`. Moves the center to `bond`.
    pub fn bond_spectrum(&mut self, bond: usize) -> Result<Vec<f64>> {
        if bond + 1 >= self.sites.len() {
            return Err(Error::OutOfRange(format!(
                "bond {bond} of a {}-site state",
                self.sites.len()
            )));
        }
        self.move_center(bond)?;
        let (l, r) = (self.sites[bond].shape()[1], self.sites[bond].shape()[2]);
        Ok(svd(&self.sites[bond].clone().reshape(&[2 * l, r])?)?.s)
    }
}

/// `|⟨a|b⟩|²` via transfer matrices.
pub fn fidelity(a: &MpsState, b: &MpsState) -> Result<f64> {
    Ok(a.overlap(b)?.norm_sqr())
}
