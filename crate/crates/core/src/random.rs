//! Seeded sampling of states, coefficients and single-qubit unitaries.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{Mat2, C64};
use crate::qstate::PureState;

/// Deterministic stream for `(seed, index)`, independent of scheduling.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Complex number with independent standard normal components.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn complex_gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

/// Haar-random pure state on `n_qubits`.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> Result<PureState> {
    PureState::normalized(complex_gaussian_vec(rng, 1 << n_qubits))
}

/// Haar-random 2x2 unitary: Gram-Schmidt on a complex Ginibre matrix.
pub fn haar_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    loop {
        let c0 = [complex_gaussian(rng), complex_gaussian(rng)];
        let c1 = [complex_gaussian(rng), complex_gaussian(rng)];
        let n0 = libm::sqrt(c0[0].norm_sqr() + c0[1].norm_sqr());
        if n0 < 1e-12 {
            continue;
        }
        let u0 = [c0[0] / n0, c0[1] / n0];
        let proj = u0[0].conj() * c1[0] + u0[1].conj() * c1[1];
        let r1 = [c1[0] - proj * u0[0], c1[1] - proj * u0[1]];
        let n1 = libm::sqrt(r1[0].norm_sqr() + r1[1].norm_sqr());
        if n1 < 1e-12 {
            continue;
        }
        let u1 = [r1[0] / n1, r1[1] / n1];
        return [[u0[0], u1[0]], [u0[1], u1[1]]];
    }
}
