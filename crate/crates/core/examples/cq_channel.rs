//! Coding exponent of the trine channel, at uniform input and optimized.
//!
//! cargo run --release --example cq_channel

use qht::channel::{
    channel_exponent, finite_blocklength_check, holevo_quantity, optimize_input, ChannelJson,
    InputDistribution,
};

fn main() -> qht::Result<()> {
    let json: ChannelJson = serde_json::from_str(include_str!("../data/trine.json"))?;
    let (ch, _) = json.to_channel()?;
    let p = InputDistribution::uniform(ch.alphabet_size());
    let holevo = holevo_quantity(&ch, &p)?;
    println!("holevo quantity at uniform input: {holevo:.6}");

    println!("{:>6} {:>10} {:>10} {:>26}", "a", "E_unif", "E_opt", "p*");
    for k in 0..=6 {
        let a = holevo * k as f64 / 6.0;
        let e = channel_exponent(a, &ch, &p)?;
        let opt = optimize_input(a, &ch)?;
        let p_star: Vec<String> = opt.p.iter().map(|x| format!("{x:.3}")).collect();
        println!(
            "{a:>6.3} {:>10.6} {:>10.6} {:>26}",
            e.value,
            opt.exponent,
            p_star.join(" ")
        );
    }

    let a = 0.5 * holevo;
    let s = channel_exponent(a, &ch, &p)?.s;
    for n in 1..=4 {
        let rep = finite_blocklength_check(n, a, s, &ch, &p)?;
        println!(
            "n = {n}: miss {:.3e}, false accept {:.3e}, bound {:.3e}, holds {}",
            rep.miss,
            rep.false_accept,
            rep.bound,
            rep.holds()
        );
    }
    Ok(())
}
