//! Seeded random circuit generators.
//!
//! All randomness comes from `ChaCha8Rng` (crate `rand_chacha` 0.9) seeded with
//! `seed_from_u64(seed)`. Circuits are therefore pure functions of their
//! parameters and seed; changing the PRNG or the draw order changes every
//! published result, so both are part of the output format.

use faer::Mat;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{library, Circuit, CircuitSource, Gate, Matrix2, Matrix4};
use crate::error::{Error, Result};
use crate::tensor::C64;

/// Name of the PRNG used by every generator.
pub const PRNG_NAME: &str = "chacha8/rand_chacha-0.9/seed_from_u64";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-distributed `dim × dim` unitary, row-major.
///
/// QR of a complex Ginibre matrix, with the phases of `diag(R)` folded back
/// into `Q` so the distribution is exactly Haar.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<C64>> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "unitary dimension must be positive".into(),
        ));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = Mat::<C64>::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let (q, r) = (qr.compute_Q(), qr.R());
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let d = r[(j, j)];
            let ph = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            out.push(q[(i, j)] * ph);
        }
    }
    Ok(out)
}

pub fn haar_unitary_2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2 {
    haar_random_unitary(2, rng)
        .expect("dimension 2 is valid")
        .try_into()
        .expect("2x2 matrix")
}

pub fn haar_unitary_4<R: Rng + ?Sized>(rng: &mut R) -> Matrix4 {
    haar_random_unitary(4, rng)
        .expect("dimension 4 is valid")
        .try_into()
        .expect("4x4 matrix")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TwoQubitFamily {
    /// Independent Haar-random two-qubit unitaries.
    #[default]
    Haar,
    /// Every gate is a CX (Clifford probe).
    Cx,
}

/// `n` two-qubit gates, each on an adjacent pair `(i, i+1)` with `i` drawn
/// uniformly, so consecutive gates are typically far apart along the chain.
pub fn gen_shallow_random(n: usize, seed: u64) -> Result<Circuit> {
    gen_shallow_random_with(n, seed, TwoQubitFamily::Haar)
}

pub fn gen_shallow_random_with(n: usize, seed: u64, family: TwoQubitFamily) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "shallow circuit needs at least 2 qubits, got {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut circuit = Circuit::new(n).with_source(CircuitSource::Generator {
        name: "shallow".into(),
        seed,
        params: vec![("n".into(), n)],
    });
    for _ in 0..n {
        let i = rng.random_range(0..n - 1);
        let (label, matrix) = match family {
            TwoQubitFamily::Haar => ("su4", haar_unitary_4(&mut rng)),
            TwoQubitFamily::Cx => ("cx", library::cx()),
        };
        circuit.push(Gate::two(label, i, i + 1, matrix)?)?;
    }
    Ok(circuit)
}

/// Quantum-volume model circuit: `depth` layers, each pairing the qubits of a
/// uniform random permutation and applying an independent Haar unitary to
/// every pair. With odd `n` the last qubit of the permutation idles.
pub fn gen_quantum_volume(n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    if n < 2 || depth == 0 {
        return Err(Error::InvalidArgument(format!(
            "quantum volume circuit needs n >= 2 and depth >= 1, got n={n}, depth={depth}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut circuit = Circuit::new(n).with_source(CircuitSource::Generator {
        name: "quantum_volume".into(),
        seed,
        params: vec![("n".into(), n), ("depth".into(), depth)],
    });
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..depth {
        perm.shuffle(&mut rng);
        for pair in perm.chunks_exact(2) {
            let u = haar_unitary_4(&mut rng);
            circuit.push(Gate::two("su4", pair[0], pair[1], u)?)?;
        }
    }
    Ok(circuit)
}
