//! Relative entropy, Chernoff bound and the two rate curves of a qubit pair.
//!
//! cargo run --example exponents

use qht::exponent::{chernoff_bound, hoeffding_bound, stein_exponent, tilde_bound};
use qht::state::PairJson;

fn main() -> qht::Result<()> {
    let json: PairJson = serde_json::from_str(include_str!("../data/qubit_pair.json"))?;
    let pair = json.to_pair()?;

    println!("D(rho||sigma) = {:.6}", stein_exponent(&pair));
    let c = chernoff_bound(&pair);
    println!("chernoff      = {:.6} at s = {:.4}", c.value, c.s);
    for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!(
            "phi({s:.2}) = {:>10.6}   phi~({s:.2}) = {:>10.6}",
            pair.phi(s)?,
            pair.phi_tilde(s)?
        );
    }

    println!("{:>6} {:>10} {:>10} {:>8}", "r", "hoeffding", "tilde", "s_r");
    for k in 0..=10 {
        let r = 0.05 * k as f64;
        let h = hoeffding_bound(r, &pair)?;
        let tilde = tilde_bound(r, &pair)?;
        println!(
            "{r:>6.2} {:>10.6} {:>10.6} {:>8.4}",
            h.value, tilde.value, h.s_star
        );
    }
    Ok(())
}
