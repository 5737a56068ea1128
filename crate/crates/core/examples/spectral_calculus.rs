//! Eigendecomposition, fractional powers and tensor powers of a random state.
//!
//! cargo run --example spectral_calculus

use qht::random::random_density;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qht::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rho = random_density(3, 3, &mut rng).into_op();

    let eig = rho.eigendecompose();
    println!("eigenvalues {:?}", eig.values);
    let err = eig.reconstruct().sub(&rho)?.frobenius_norm();
    println!("reconstruction error {err:.2e}");

    let half = rho.fractional_power(0.5)?;
    let square = half.matrix().matmul(half.matrix());
    println!("|sqrt(rho)^2 - rho| = {:.2e}", square.sub(rho.matrix()).max_abs());

    let inv = rho.fractional_power(-1.0)?;
    let id = inv.matrix().matmul(rho.matrix());
    println!(
        "|rho^-1 rho - I| = {:.2e}",
        id.sub(&qht::Matrix::identity(3)).max_abs()
    );

    for n in 1..=4 {
        let t = rho.tensor_power(n)?;
        println!("n = {n}: dim {:>2}, trace {:.15}", t.dim(), t.trace());
    }
    Ok(())
}
