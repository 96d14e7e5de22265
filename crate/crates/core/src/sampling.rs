//! Seeded random states, unitaries and density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::quantum::{hermitize, CMatrix, CVector, DensityMatrix, PureState};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random vector of dimension `dim`. For `dim = 2` this is uniform on the Bloch sphere.
pub fn haar_state(dim: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let v = CVector::from_fn(dim, |_, _| gaussian(rng));
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

pub fn haar_qubit(rng: &mut impl Rng) -> PureState {
    haar_state(2, rng)
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phases of `R` divided out.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix `G G† / Tr` with `G` a `dim × rank` Ginibre matrix.
pub fn random_density_matrix(dim: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let g = DMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    DensityMatrix::from_unnormalized(hermitize(&(&g * g.adjoint())))
}
