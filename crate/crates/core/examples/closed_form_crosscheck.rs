//! Compare the closed-form d_u expressions with direct summation.
//!
//!     cargo run --example closed_form_crosscheck

use qphase::closed::{cross_check, pacs_moment_checks};
use qphase::{StateParams, StateSpec, Truncation};

fn main() -> qphase::Result<()> {
    let points = [
        StateParams::Binomial { p: 0.3, m: 10 },
        StateParams::GeneralizedBinomial {
            alpha: 1.0,
            beta: 2.0,
            n: 5,
        },
        StateParams::NegativeBinomial { p: 0.3, m: 2 },
        StateParams::Hypergeometric {
            l: 100.0,
            m: 10,
            p: 0.4,
        },
        StateParams::PhotonAddedCoherent { alpha: 1.0, m: 1 },
    ];
    for params in points {
        let spec = StateSpec::new(params);
        let r = cross_check(&spec, 1e-8)?;
        println!(
            "{spec:<32} closed {:>14} oracle {:>14} -> {:?}",
            fmt(r.closed_value),
            fmt(r.oracle_value),
            r.verdict
        );
    }
    println!();
    for r in pacs_moment_checks(0.5, 2, Truncation::default(), 1e-8)? {
        println!(
            "pacs(alpha=0.5, m=2) {:<11} closed {:>12} oracle {:>12} -> {:?}",
            r.quantity.label(),
            fmt(r.closed_value),
            fmt(r.oracle_value),
            r.verdict
        );
    }
    Ok(())
}

fn fmt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.8}")).unwrap_or_else(|| "-".into())
}
