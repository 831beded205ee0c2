//! Construct one state of every family and show its support and truncation.
//!
//!     cargo run --example intermediate_states

use qphase::{StateParams, StateSpec};

fn main() -> qphase::Result<()> {
    let specs = [
        StateParams::Binomial { p: 0.3, m: 10 },
        StateParams::GeneralizedBinomial {
            alpha: 1.0,
            beta: 2.0,
            n: 8,
        },
        StateParams::NegativeBinomial { p: 0.6, m: 2 },
        StateParams::Hypergeometric {
            l: 50.0,
            m: 6,
            p: 0.4,
        },
        StateParams::PhotonAddedCoherent { alpha: 1.2, m: 2 },
        StateParams::Coherent { alpha: 2.0 },
    ];
    for params in specs {
        let spec = StateSpec::new(params).with_epsilon(1e-12);
        let (state, report) = spec.build()?;
        let head: Vec<String> = state
            .amplitudes()
            .iter()
            .take(5)
            .map(|c| format!("{c:.5}"))
            .collect();
        println!("{spec}");
        println!(
            "  n_max {}  residual {:.2e}  <N> {:.6}",
            report.n_max,
            report.residual_mass,
            state.mean_photon()
        );
        println!("  c_0.. = [{}, ...]", head.join(", "));
        println!("  {}", report.tail_bound_used);
    }

    // Parameter maps, as read from a config file or the command line.
    let map = [
        ("L".to_string(), 10.0),
        ("M".to_string(), 4.0),
        ("p".to_string(), 0.3),
    ]
    .into();
    let params = StateParams::from_map("hs".parse()?, &map)?;
    if let Err(e) = StateSpec::new(params).build() {
        println!("hs(L=10, M=4, p=0.3): {e}");
    }
    Ok(())
}
