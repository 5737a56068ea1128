//! Optimal second-kind error under a fixed first-kind constraint, n = 1..8.
//!
//! cargo run --release --example stein_convergence

use std::time::Instant;

use qht::exponent::stein_exponent;
use qht::finite_n::np_tradeoff;
use qht::state::PairJson;

fn main() -> qht::Result<()> {
    let json: PairJson = serde_json::from_str(include_str!("../data/stein_pair.json"))?;
    let pair = json.to_pair()?;
    let d = stein_exponent(&pair);
    let epsilon = 0.1;
    println!("D(rho||sigma) = {d:.6}");
    println!("{:>2} {:>14} {:>10} {:>8}", "n", "beta*", "exponent", "secs");
    for n in 1..=8 {
        let t = Instant::now();
        let np = np_tradeoff(n, epsilon, &pair)?;
        println!(
            "{n:>2} {:>14.6e} {:>10.6} {:>8.2}",
            np.beta,
            -np.beta.ln() / n as f64,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
