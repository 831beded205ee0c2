//! Build a state from raw amplitudes and read off its normally ordered moments.
//!
//!     cargo run --example fock_moments

use qphase::{FockState, MomentSet, Result};

fn main() -> Result<()> {
    // (|0⟩ + √2|1⟩ + |2⟩)/2, the binomial state with p = ½, M = 2.
    let state = FockState::new(vec![0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5], 0.0)?;
    println!(
        "n_max = {}, residual = {}",
        state.n_max(),
        state.residual_mass()
    );
    for (j, k) in [(0, 1), (0, 2), (1, 1), (2, 2), (1, 2)] {
        println!(
            "<a+^{j} a^{k}> = {:.12}",
            state.normally_ordered_moment(j, k)?
        );
    }
    println!("variance of N = {}", state.photon_variance());

    // Orders beyond the support are rejected unless the vector is padded.
    match state.normally_ordered_moment(3, 3) {
        Err(e) => println!("order 3: {e}"),
        Ok(v) => println!("order 3: {v}"),
    }
    println!(
        "order 3 after padding: {}",
        state.padded(3).normally_ordered_moment(3, 3)?
    );

    let moments = MomentSet::of(&state.padded(4), &[3, 4]);
    println!("{moments:#?}");

    // Invalid input surfaces as a typed error.
    if let Err(e) = FockState::new(vec![0.5, 0.5], 0.0) {
        println!("rejected: {e}");
    }
    Ok(())
}
