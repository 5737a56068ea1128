//! Seeded random instances: `G G†` with complex standard normal `G`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::{HermitianOperator, Matrix};
use crate::state::DensityMatrix;

/// `dim × rank` complex Gaussian matrix times its adjoint; rank-deficient
/// whenever `rank < dim`.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> HermitianOperator {
    assert!(dim >= 1 && rank >= 1 && rank <= dim, "need 1 <= rank <= dim");
    let g: Vec<Complex64> = (0..dim * rank)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let m = Matrix::from_fn(dim, |i, j| {
        (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum()
    });
    HermitianOperator::from_hermitian_part(m)
}

pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let a = random_psd(dim, rank, rng);
    let tr = a.trace();
    DensityMatrix::new_unchecked(a.scale(1.0 / tr))
}

/// Full rank half of the time, otherwise uniform in `1..dim`.
pub fn random_rank<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> usize {
    if dim == 1 || rng.random_bool(0.5) {
        dim
    } else {
        rng.random_range(1..dim)
    }
}
