//! Reduced phase fluctuation implies antibunching, but not the other way round.
//!
//!     cargo run --example witness_counterexample

use qphase::{binomial_state, d_u, witnesses};

fn main() -> qphase::Result<()> {
    println!(
        "{:>5} {:>12} {:>12} {:>12}",
        "p", "d_u", "antibunch", "hoa3"
    );
    for k in 1..=9 {
        let p = 0.1 * k as f64;
        let state = binomial_state(p, 2)?.padded(3);
        let w = witnesses(&state, &[3])?;
        let du = d_u(&state)?;
        let note = if du > 0.0 && w.antibunch < 0.0 {
            "  antibunched, no phase reduction"
        } else {
            ""
        };
        println!(
            "{p:>5.1} {du:>12.6} {:>12.6} {:>12.6}{note}",
            w.antibunch, w.hoa[&3]
        );
    }
    Ok(())
}
