//! Dense complex tensors and the handful of kernels the simulators are built on.
//!
//! Storage is row-major: the last axis varies fastest. Matrices are rank-2
//! tensors, so a site tensor `M[σ, a_left, a_right]` viewed as the matrix
//! `M[(σ, a_left), a_right]` needs no data movement at all.
//!
//! The decompositions ([`svd`], [`qr_left`], [`qr_right`]) delegate the actual
//! factorization to `faer` and convert at the boundary.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<C64>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut acc = 1;
    let mut out = vec![0; shape.len()];
    for (s, &e) in out.iter_mut().zip(shape).rev() {
        *s = acc;
        acc *= e;
    }
    out
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::Dimension(format!(
                "shape {shape:?} holds {len} elements but {} were given",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            data: vec![ZERO; shape.iter().product()],
        }
    }

    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> C64) -> Self {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0; shape.len()];
        for _ in 0..len {
            data.push(f(&idx));
            for ax in (0..shape.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < shape[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Self {
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        Self::new(vec![rows, cols], data)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(&[n, n], |ix| if ix[0] == ix[1] { ONE } else { ZERO })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.shape.len(), "index rank mismatch");
        let mut off = 0;
        for (&i, &e) in idx.iter().zip(&self.shape) {
            assert!(
                i < e,
                "index {idx:?} out of bounds for shape {:?}",
                self.shape
            );
            off = off * e + i;
        }
        off
    }

    /// Panics if `idx` is out of bounds.
    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: C64) {
        let off = self.offset(idx);
        self.data[off] = value;
    }

    /// Reinterprets the data under a new shape with the same element count.
    pub fn reshape(self, shape: &[usize]) -> Result<Self> {
        Self::new(shape.to_vec(), self.data)
    }

    /// Axis `k` of the result is axis `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let rank = self.rank();
        let mut seen = vec![false; rank];
        if perm.len() != rank
            || perm
                .iter()
                .any(|&p| p >= rank || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of {rank} axes"
            )));
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let new_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let src = strides(&self.shape);
        let step: Vec<usize> = perm.iter().map(|&p| src[p]).collect();
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0; rank];
        let mut off = 0;
        for _ in 0..self.len() {
            out.push(self.data[off]);
            for ax in (0..rank).rev() {
                idx[ax] += 1;
                off += step[ax];
                if idx[ax] < new_shape[ax] {
                    break;
                }
                off -= step[ax] * new_shape[ax];
                idx[ax] = 0;
            }
        }
        Ok(Self {
            shape: new_shape,
            data: out,
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    /// Squared Frobenius norm.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn expect_matrix(&self) -> Result<(usize, usize)> {
        match self.shape[..] {
            [r, c] => Ok((r, c)),
            _ => Err(Error::Rank {
                expected: 2,
                actual: self.rank(),
            }),
        }
    }

    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    pub fn cols(&self) -> usize {
        self.shape[1]
    }

    /// Conjugate transpose of a matrix.
    pub fn dagger(&self) -> Result<Self> {
        self.expect_matrix()?;
        Ok(self.permute(&[1, 0])?.conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        let (m, k) = self.expect_matrix()?;
        let (k2, n) = other.expect_matrix()?;
        if k != k2 {
            return Err(Error::Dimension(format!(
                "cannot multiply {m}x{k} by {k2}x{n}"
            )));
        }
        Ok(Self {
            shape: vec![m, n],
            data: gemm(&self.data, &other.data, m, k, n),
        })
    }

    pub(crate) fn to_faer(&self) -> Result<Mat<C64>> {
        let (r, c) = self.expect_matrix()?;
        Ok(Mat::from_fn(r, c, |i, j| self.data[i * c + j]))
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, C64>) -> Self {
        let (r, c) = (m.nrows(), m.ncols());
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(m[(i, j)]);
            }
        }
        Self {
            shape: vec![r, c],
            data,
        }
    }
}

/// Row-major `m×k · k×n`.
pub(crate) fn gemm(a: &[C64], b: &[C64], m: usize, k: usize, n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let x = a[i * k + p];
            if x == ZERO {
                continue;
            }
            for (o, &y) in row.iter_mut().zip(&b[p * n..(p + 1) * n]) {
                *o += x * y;
            }
        }
    }
    out
}

/// Sums over each pair `(axis of a, axis of b)`. The result carries the
/// unpaired axes of `a` followed by the unpaired axes of `b`, in order.
pub fn contract(
    a: &DenseTensor,
    b: &DenseTensor,
    axis_pairs: &[(usize, usize)],
) -> Result<DenseTensor> {
    let mut used_a = vec![false; a.rank()];
    let mut used_b = vec![false; b.rank()];
    for &(x, y) in axis_pairs {
        if x >= a.rank() || y >= b.rank() {
            return Err(Error::OutOfRange(format!(
                "axis pair ({x}, {y}) for ranks {} and {}",
                a.rank(),
                b.rank()
            )));
        }
        if std::mem::replace(&mut used_a[x], true) || std::mem::replace(&mut used_b[y], true) {
            return Err(Error::InvalidArgument(format!(
                "axis pair ({x}, {y}) reuses an axis"
            )));
        }
        if a.shape[x] != b.shape[y] {
            return Err(Error::Dimension(format!(
                "paired axes ({x}, {y}) have extents {} and {}",
                a.shape[x], b.shape[y]
            )));
        }
    }
    let free_a: Vec<usize> = (0..a.rank()).filter(|&x| !used_a[x]).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|&y| !used_b[y]).collect();

    let perm_a: Vec<usize> = free_a
        .iter()
        .copied()
        .chain(axis_pairs.iter().map(|p| p.0))
        .collect();
    let perm_b: Vec<usize> = axis_pairs
        .iter()
        .map(|p| p.1)
        .chain(free_b.iter().copied())
        .collect();
    let pa = a.permute(&perm_a)?;
    let pb = b.permute(&perm_b)?;

    let m: usize = free_a.iter().map(|&x| a.shape[x]).product();
    let n: usize = free_b.iter().map(|&y| b.shape[y]).product();
    let k: usize = axis_pairs.iter().map(|&(x, _)| a.shape[x]).product();

    let shape: Vec<usize> = free_a
        .iter()
        .map(|&x| a.shape[x])
        .chain(free_b.iter().map(|&y| b.shape[y]))
        .collect();
    DenseTensor::new(shape, gemm(&pa.data, &pb.data, m, k, n))
}

/// Records how [`reshape_merge`] fused axes so [`reshape_split`] can undo it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisGrouping {
    perm: Vec<usize>,
    permuted_shape: Vec<usize>,
}

/// Fuses each group of axes into one. `groups` must be an ordered partition
/// of all axes; within a group, earlier axes are more significant.
pub fn reshape_merge(t: &DenseTensor, groups: &[&[usize]]) -> Result<(DenseTensor, AxisGrouping)> {
    let perm: Vec<usize> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidArgument("empty axis group".into()));
    }
    let permuted = t.permute(&perm)?;
    let merged: Vec<usize> = groups
        .iter()
        .map(|g| g.iter().map(|&ax| t.shape[ax]).product())
        .collect();
    let grouping = AxisGrouping {
        permuted_shape: permuted.shape.clone(),
        perm,
    };
    Ok((permuted.reshape(&merged)?, grouping))
}

pub fn reshape_split(t: &DenseTensor, grouping: &AxisGrouping) -> Result<DenseTensor> {
    let unfused = t.clone().reshape(&grouping.permuted_shape)?;
    let mut inverse = vec![0; grouping.perm.len()];
    for (k, &p) in grouping.perm.iter().enumerate() {
        inverse[p] = k;
    }
    unfused.permute(&inverse)
}

/// Thin singular value decomposition `m = u · diag(s) · vt`.
#[derive(Clone, Debug)]
pub struct SvdTriple {
    /// `rows × k`, orthonormal columns.
    pub u: DenseTensor,
    /// Non-increasing, non-negative.
    pub s: Vec<f64>,
    /// `k × cols`, orthonormal rows (this is V†).
    pub vt: DenseTensor,
}

impl SvdTriple {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn reconstruct(&self) -> DenseTensor {
        let k = self.s.len();
        let mut us = self.u.clone();
        for row in us.data.chunks_mut(k) {
            for (x, &s) in row.iter_mut().zip(&self.s) {
                *x *= s;
            }
        }
        us.matmul(&self.vt).expect("svd factors are conformable")
    }
}

pub fn svd(m: &DenseTensor) -> Result<SvdTriple> {
    let (rows, cols) = m.expect_matrix()?;
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "cannot decompose an empty {rows}x{cols} matrix"
        )));
    }
    if !m.is_finite() {
        return Err(Error::Numeric("svd input contains NaN or infinity".into()));
    }
    let decomposed = m
        .to_faer()?
        .thin_svd()
        .map_err(|e| Error::Numeric(format!("svd of {rows}x{cols} matrix failed: {e:?}")))?;
    let (u, v, s) = (
        decomposed.U(),
        decomposed.V(),
        decomposed.S().column_vector(),
    );
    let k = rows.min(cols);

    // descending order is relied on everywhere downstream, so enforce it here
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| s[y].re.total_cmp(&s[x].re));

    let mut u_out = Vec::with_capacity(rows * k);
    for i in 0..rows {
        u_out.extend(order.iter().map(|&c| u[(i, c)]));
    }
    let mut vt_out = Vec::with_capacity(k * cols);
    for &r in &order {
        vt_out.extend((0..cols).map(|j| v[(j, r)].conj()));
    }
    let triple = SvdTriple {
        u: DenseTensor::new(vec![rows, k], u_out)?,
        s: order.iter().map(|&c| s[c].re.max(0.0)).collect(),
        vt: DenseTensor::new(vec![k, cols], vt_out)?,
    };
    if !(triple.u.is_finite() && triple.vt.is_finite() && triple.s.iter().all(|x| x.is_finite())) {
        return Err(Error::Numeric("svd produced non-finite factors".into()));
    }
    Ok(triple)
}

/// `m = q · r` with `q` having orthonormal columns and `r` upper triangular.
pub fn qr_left(m: &DenseTensor) -> Result<(DenseTensor, DenseTensor)> {
    m.expect_matrix()?;
    if !m.is_finite() {
        return Err(Error::Numeric("qr input contains NaN or infinity".into()));
    }
    let qr = m.to_faer()?.qr();
    Ok((
        DenseTensor::from_faer(qr.compute_thin_Q().as_ref()),
        DenseTensor::from_faer(qr.thin_R()),
    ))
}

/// `m = r · q` with `q` having orthonormal rows.
pub fn qr_right(m: &DenseTensor) -> Result<(DenseTensor, DenseTensor)> {
    let (q, r) = qr_left(&m.dagger()?)?;
    Ok((r.dagger()?, q.dagger()?))
}

/// Truncation rule applied to every SVD split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Upper bound on the number of singular values kept.
    pub max_kept: usize,
    /// Values with `s_k < rel_cutoff * s_0` are dropped.
    pub rel_cutoff: f64,
    /// Rescale kept values to unit squared sum.
    #[serde(default = "default_renormalize")]
    pub renormalize: bool,
}

fn default_renormalize() -> bool {
    true
}

impl TruncationPolicy {
    pub fn new(max_kept: usize, rel_cutoff: f64) -> Result<Self> {
        let policy = Self {
            max_kept,
            rel_cutoff,
            renormalize: true,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Keeps everything: no count limit and no cutoff.
    pub fn exact() -> Self {
        Self {
            max_kept: usize::MAX,
            rel_cutoff: 0.0,
            renormalize: true,
        }
    }

    /// Same limits, but kept singular values are left unscaled.
    pub fn raw(self) -> Self {
        Self {
            renormalize: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_kept == 0 {
            return Err(Error::InvalidArgument("max_kept must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.rel_cutoff) {
            return Err(Error::InvalidArgument(format!(
                "rel_cutoff must lie in [0, 1), got {}",
                self.rel_cutoff
            )));
        }
        Ok(())
    }

    /// Number of leading values of a sorted spectrum this policy keeps.
    pub fn kept_count(&self, s: &[f64]) -> usize {
        let Some(&largest) = s.first() else {
            return 0;
        };
        let threshold = self.rel_cutoff * largest;
        let above = s.iter().take_while(|&&x| x >= threshold).count();
        above.min(self.max_kept).min(s.len()).max(1)
    }
}

/// Drops trailing singular triplets per `policy`. Returns the truncated
/// triple and the discarded weight (sum of squared dropped values, measured
/// before renormalization).
pub fn truncate(t: SvdTriple, policy: &TruncationPolicy) -> (SvdTriple, f64) {
    let keep = policy.kept_count(&t.s);
    truncate_to(t, keep, policy.renormalize)
}

pub(crate) fn truncate_to(t: SvdTriple, keep: usize, renormalize: bool) -> (SvdTriple, f64) {
    let SvdTriple { u, mut s, vt } = t;
    let k = s.len();
    let keep = keep.clamp(1, k.max(1)).min(k);
    let discarded: f64 = s[keep..].iter().map(|x| x * x).sum();
    s.truncate(keep);
    if renormalize {
        let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            s.iter_mut().for_each(|x| *x /= norm);
        }
    }
    if keep == k {
        return (SvdTriple { u, s, vt }, discarded);
    }
    let (rows, cols) = (u.shape[0], vt.shape[1]);
    let u_data: Vec<C64> = u
        .data
        .chunks(k)
        .flat_map(|row| row[..keep].iter().copied())
        .collect();
    let mut vt_data = vt.data;
    vt_data.truncate(keep * cols);
    (
        SvdTriple {
            u: DenseTensor {
                shape: vec![rows, keep],
                data: u_data,
            },
            s,
            vt: DenseTensor {
                shape: vec![keep, cols],
                data: vt_data,
            },
        },
        discarded,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_tensor(shape: &[usize], rng: &mut impl Rng) -> DenseTensor {
        DenseTensor::from_fn(shape, |_| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn max_diff(a: &DenseTensor, b: &DenseTensor) -> f64 {
        assert_eq!(a.shape(), b.shape());
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn contract_identity_with_vector() {
        let id = DenseTensor::identity(2);
        let v = DenseTensor::new(vec![2], vec![ONE, ZERO]).unwrap();
        let out = contract(&id, &v, &[(1, 0)]).unwrap();
        assert_eq!(out.shape(), &[2]);
        assert_eq!(out.data(), &[ONE, ZERO]);
    }

    #[test]
    fn contract_bond_matches_loop() {
        // site tensors stored [σ, a_left, a_right]
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m1 = random_tensor(&[2, 1, 2], &mut rng);
        let m2 = random_tensor(&[2, 2, 1], &mut rng);
        let out = contract(&m1, &m2, &[(2, 1)]).unwrap();
        assert_eq!(out.shape(), &[2, 1, 2, 1]);
        for s1 in 0..2 {
            for s2 in 0..2 {
                let mut acc = ZERO;
                for b in 0..2 {
                    acc += m1.get(&[s1, 0, b]) * m2.get(&[s2, b, 0]);
                }
                assert!((out.get(&[s1, 0, s2, 0]) - acc).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn contract_with_conjugate_gives_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_tensor(&[3, 2, 4], &mut rng);
        let out = contract(&t.conj(), &t, &[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(out.len(), 1);
        let z = out.data()[0];
        assert!(z.im.abs() < 1e-12);
        assert!((z.re - t.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn contract_rejects_extent_mismatch() {
        let a = DenseTensor::zeros(&[2, 3]);
        let b = DenseTensor::zeros(&[2, 3]);
        assert!(matches!(
            contract(&a, &b, &[(1, 0)]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn contract_is_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_tensor(&[2, 3, 4], &mut rng);
            let b = random_tensor(&[4, 2, 5], &mut rng);
            let alpha = c(
                rng.random::<f64>() * 4.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
            );
            let lhs = contract(&a.scale(alpha), &b, &[(2, 0), (0, 1)]).unwrap();
            let rhs = contract(&a, &b, &[(2, 0), (0, 1)]).unwrap().scale(alpha);
            assert!(max_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn merge_index_arithmetic() {
        let t = DenseTensor::from_fn(&[2, 3, 4], |ix| {
            c((ix[0] * 100 + ix[1] * 10 + ix[2]) as f64, 0.0)
        });
        let (m, _) = reshape_merge(&t, &[&[0, 1], &[2]]).unwrap();
        assert_eq!(m.shape(), &[6, 4]);
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..4 {
                    assert_eq!(m.get(&[i * 3 + j, k]), t.get(&[i, j, k]));
                }
            }
        }
    }

    #[test]
    fn merge_two_site_tensor_layout() {
        // T[a_l, σ1, σ2, a_r] grouped as ((a_l, σ1), (σ2, a_r))
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (dl, dr) = (3, 2);
        let t = random_tensor(&[dl, 2, 2, dr], &mut rng);
        let (m, _) = reshape_merge(&t, &[&[0, 1], &[2, 3]]).unwrap();
        assert_eq!(m.shape(), &[dl * 2, 2 * dr]);
        for a in 0..dl {
            for s1 in 0..2 {
                for s2 in 0..2 {
                    for b in 0..dr {
                        assert_eq!(m.get(&[a * 2 + s1, s2 * dr + b]), t.get(&[a, s1, s2, b]));
                    }
                }
            }
        }
        // a non-contiguous grouping: ((σ1, a_l), (a_r, σ2))
        let (m2, g2) = reshape_merge(&t, &[&[1, 0], &[3, 2]]).unwrap();
        for a in 0..dl {
            for s1 in 0..2 {
                for s2 in 0..2 {
                    for b in 0..dr {
                        assert_eq!(m2.get(&[s1 * dl + a, b * 2 + s2]), t.get(&[a, s1, s2, b]));
                    }
                }
            }
        }
        assert_eq!(reshape_split(&m2, &g2).unwrap(), t);
    }

    #[test]
    fn merge_rejects_bad_partition() {
        let t = DenseTensor::zeros(&[2, 3, 4]);
        assert!(reshape_merge(&t, &[&[0, 1]]).is_err());
        assert!(reshape_merge(&t, &[&[0, 0], &[1, 2]]).is_err());
        assert!(reshape_merge(&t, &[&[0, 1, 2], &[]]).is_err());
    }

    #[test]
    fn svd_identity_and_bell() {
        let s = svd(&DenseTensor::identity(2)).unwrap();
        assert!((s.s[0] - 1.0).abs() < 1e-14 && (s.s[1] - 1.0).abs() < 1e-14);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DenseTensor::matrix(2, 2, vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        let s = svd(&bell).unwrap();
        for v in s.s {
            assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        }
    }

    #[test]
    fn svd_reconstructs_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(r, cc) in &[(4, 6), (6, 4), (1, 5), (7, 1), (64, 64), (33, 17)] {
            let m = random_tensor(&[r, cc], &mut rng);
            let t = svd(&m).unwrap();
            assert_eq!(t.rank(), r.min(cc));
            assert!(t.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(t.s.iter().all(|&x| x >= 0.0));
            let back = t.reconstruct();
            let err: f64 = back
                .data()
                .iter()
                .zip(m.data())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err / m.norm_sqr().sqrt() < 1e-10, "{r}x{cc}: {err}");
        }
    }

    #[test]
    fn svd_reconstructs_rank_deficient() {
        // low-rank products are what two-site updates produce most often
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for &(rows, cols) in &[(4, 8), (8, 4), (4, 4), (6, 10), (16, 8)] {
            for _ in 0..200 {
                let r = rng.random_range(1..=rows.min(cols));
                let a = random_tensor(&[rows, r], &mut rng);
                let b = random_tensor(&[r, cols], &mut rng);
                let m = a.matmul(&b).unwrap();
                let t = svd(&m).unwrap();
                assert!(
                    max_diff(&t.reconstruct(), &m) < 1e-12,
                    "{rows}x{cols} rank {r}"
                );
                assert!(t.s[r..].iter().all(|&x| x < 1e-12 * t.s[0]));
            }
        }
    }

    #[test]
    fn svd_rejects_non_matrix() {
        assert!(matches!(
            svd(&DenseTensor::zeros(&[2, 2, 2])),
            Err(Error::Rank {
                expected: 2,
                actual: 3
            })
        ));
        let mut m = DenseTensor::identity(2);
        m.set(&[0, 1], c(f64::NAN, 0.0));
        assert!(matches!(svd(&m), Err(Error::Numeric(_))));
    }

    #[test]
    fn qr_identity_and_vector() {
        let (q, r) = qr_left(&DenseTensor::identity(3)).unwrap();
        assert!(max_diff(&q.matmul(&r).unwrap(), &DenseTensor::identity(3)) < 1e-14);
        for i in 0..3 {
            assert!((q.get(&[i, i]).norm() - 1.0).abs() < 1e-14);
            assert!((r.get(&[i, i]).norm() - 1.0).abs() < 1e-14);
        }

        let v = DenseTensor::matrix(2, 1, vec![c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        let (q, r) = qr_left(&v).unwrap();
        assert_eq!(r.shape(), &[1, 1]);
        assert!((r.data()[0].norm() - 5.0).abs() < 1e-12);
        assert!((q.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qr_orthonormality_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_tensor(&[8, 3], &mut rng);
        let (q, r) = qr_left(&m).unwrap();
        let qq = q.dagger().unwrap().matmul(&q).unwrap();
        assert!(max_diff(&qq, &DenseTensor::identity(3)) < 1e-12);
        assert!(max_diff(&q.matmul(&r).unwrap(), &m) < 1e-10);
        for i in 0..r.rows() {
            for j in 0..i.min(r.cols()) {
                assert!(r.get(&[i, j]).norm() < 1e-14);
            }
        }

        let m = random_tensor(&[3, 8], &mut rng);
        let (r, q) = qr_right(&m).unwrap();
        let qq = q.matmul(&q.dagger().unwrap()).unwrap();
        assert!(max_diff(&qq, &DenseTensor::identity(3)) < 1e-12);
        assert!(max_diff(&r.matmul(&q).unwrap(), &m) < 1e-10);
    }

    fn triple_from_values(values: &[f64]) -> SvdTriple {
        let k = values.len();
        SvdTriple {
            u: DenseTensor::identity(k),
            s: values.to_vec(),
            vt: DenseTensor::identity(k),
        }
    }

    #[test]
    fn truncate_single_value_is_unchanged() {
        let policy = TruncationPolicy::new(1, 0.5).unwrap();
        let (t, w) = truncate(triple_from_values(&[1.0]), &policy);
        assert_eq!(t.s, vec![1.0]);
        assert_eq!(w, 0.0);
    }

    #[test]
    fn truncate_cutoff_boundary() {
        let policy = TruncationPolicy::new(5, 1e-4).unwrap();
        // ratio exactly at the cutoff is kept
        let at_cutoff = 1e-4 * 0.9;
        let (t, w) = truncate(triple_from_values(&[0.9, 0.4, at_cutoff]), &policy);
        assert_eq!(t.rank(), 3);
        assert_eq!(w, 0.0);

        let (t, w) = truncate(triple_from_values(&[0.9, 0.4, 0.00008]), &policy);
        assert_eq!(t.rank(), 2);
        assert!((w - 6.4e-9).abs() < 1e-20);
        let sq: f64 = t.s.iter().map(|x| x * x).sum();
        assert!((sq - 1.0).abs() < 1e-14);
        let scale = (0.81f64 + 0.16).sqrt();
        assert!((t.s[0] - 0.9 / scale).abs() < 1e-14);
        assert_eq!(t.u.shape(), &[3, 2]);
        assert_eq!(t.vt.shape(), &[2, 3]);
    }

    #[test]
    fn truncate_degenerate_spectrum() {
        let v = 1.0 / 8f64.sqrt();
        let policy = TruncationPolicy::new(3, 0.0).unwrap();
        let (t, w) = truncate(triple_from_values(&[v; 8]), &policy);
        assert_eq!(t.rank(), 3);
        assert!((w - 5.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn truncate_raw_mode_keeps_scale() {
        let policy = TruncationPolicy::new(1, 0.0).unwrap().raw();
        let (t, w) = truncate(triple_from_values(&[0.6, 0.3]), &policy);
        assert_eq!(t.s, vec![0.6]);
        assert!((w - 0.09).abs() < 1e-15);
    }

    #[test]
    fn discarded_weight_is_truncation_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_tensor(&[6, 5], &mut rng);
        let policy = TruncationPolicy::new(2, 0.0).unwrap().raw();
        let (t, w) = truncate(svd(&m).unwrap(), &policy);
        let err: f64 = t
            .reconstruct()
            .data()
            .iter()
            .zip(m.data())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        assert!((err - w).abs() < 1e-10);
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0, 0.0).is_err());
        assert!(TruncationPolicy::new(3, 1.0).is_err());
        assert!(TruncationPolicy::new(3, -0.1).is_err());
        assert!(TruncationPolicy::new(3, 0.999).is_ok());
    }
}
