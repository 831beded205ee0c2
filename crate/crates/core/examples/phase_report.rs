//! Full Barnett–Pegg phase report for a few states.
//!
//!     cargo run --example phase_report

use qphase::{bp_phase_report, coherent_state, photon_added_coherent_state, FockState, Truncation};

fn main() -> qphase::Result<()> {
    let t = Truncation::new(1e-14);
    let (coherent, _) = coherent_state(2.0, t)?;
    let (added, _) = photon_added_coherent_state(1.0, 2, t)?;

    for (name, state) in [
        ("coherent alpha=2", &coherent),
        ("photon-added alpha=1 m=2", &added),
    ] {
        let r = bp_phase_report(state)?;
        println!("{name}");
        println!(
            "  <C> = {:.9}  var C = {:.9}  var S = {:.9}",
            r.cos_mean, r.var_c, r.var_s
        );
        println!("  T = {:.9}  b = {:.9}", r.total_phase_noise, r.b_factor);
        println!(
            "  U = {:.9} (reduced formula {:.9})  d_u = {:+.9}",
            r.u_value, r.u_reduced, r.d_u
        );
        println!("  amplitude noise = {:.9}", r.amplitude_noise);
        let problems = r.violations(1e-10);
        println!(
            "  invariants: {}",
            if problems.is_empty() {
                "ok".to_string()
            } else {
                problems.join("; ")
            }
        );
    }

    // A number state has no mean field, so no phase.
    match bp_phase_report(&FockState::number(3)) {
        Ok(_) => unreachable!(),
        Err(e) => println!("|3>: {e}"),
    }
    Ok(())
}
