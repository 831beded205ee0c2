//! Barnett–Pegg phase quantities and photon-number nonclassicality witnesses.
//!
//! The exponential-of-phase operator rescales the annihilation operator by
//! the mean photon number, `E = (N̄ + ½)^{−1/2} a`, and the cosine and sine
//! operators are `C = (E + E†)/2`, `S = −i(E − E†)/2`. The symmetric
//! phase-fluctuation parameter
//!
//! ```text
//! U = ΔN² (ΔS² + ΔC²) / (⟨S⟩² + ⟨C⟩²) = ΔN² T / (1 − T)
//! ```
//!
//! equals 1/2 on coherent states and is bounded below by 1/4. `d_u = U − 1/2 < 0`
//! is the strong nonclassicality criterion; it implies antibunching.
//!
//! [`bp_phase_report`] evaluates `U` from the cosine and sine variances and
//! independently from the closed moment expression
//! `U = ΔN² (⟨a†a⟩ − ⟨a†⟩⟨a⟩ + ½) / (⟨a†⟩⟨a⟩)`. Both values are reported.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::fock::{FockState, MomentSet};

/// `|⟨a⟩|` at or below this is treated as a state without a defined phase.
pub const MEAN_FIELD_THRESHOLD: f64 = 1e-12;

/// `U` on coherent states.
pub const U_COHERENT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    /// `N̄ = ⟨a†a⟩`
    pub n_bar: f64,
    /// `⟨a⟩`
    pub mean_a: f64,
    /// `ΔN²`
    pub photon_variance: f64,
    /// `⟨C⟩`
    pub cos_mean: f64,
    /// `⟨S⟩`
    pub sin_mean: f64,
    /// `ΔC²`
    pub var_c: f64,
    /// `ΔS²`
    pub var_s: f64,
    /// `T = ΔC² + ΔS²`
    pub total_phase_noise: f64,
    /// `b = T / (1 − T)`
    pub b_factor: f64,
    /// `U` from the cosine/sine variances.
    pub u_value: f64,
    /// `U` from the closed moment expression.
    pub u_reduced: f64,
    /// `d_u = U − ½`
    pub d_u: f64,
    /// `(ΔX)² + (ΔẊ)²` for the quadratures `X = (a + a†)/√2`, `Ẋ = −i(a − a†)/√2`.
    pub amplitude_noise: f64,
    /// Propagated truncation error on `U`; zero for finite states.
    pub u_uncertainty: f64,
}

impl PhaseReport {
    /// Invariant violations at absolute tolerance `tol`. Empty when all hold.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let tol = tol.max(10.0 * self.u_uncertainty);
        let mut out = Vec::new();
        let circle = self.cos_mean.powi(2) + self.sin_mean.powi(2) + self.total_phase_noise;
        if (circle - 1.0).abs() > tol {
            out.push(format!("<C>² + <S>² + T = {circle}, expected 1"));
        }
        let floor = 1.0 / (16.0 * (self.n_bar + 0.5).powi(2));
        if self.var_c * self.var_s < floor - tol {
            out.push(format!(
                "ΔC²ΔS² = {} below {floor}",
                self.var_c * self.var_s
            ));
        }
        if self.u_value < 0.25 - tol {
            out.push(format!("U = {} below 1/4", self.u_value));
        }
        if !(self.total_phase_noise > 0.0 && self.total_phase_noise < 1.0) {
            out.push(format!("T = {} outside (0, 1)", self.total_phase_noise));
        }
        if !(self.b_factor > 0.0) {
            out.push(format!("b = {} not positive", self.b_factor));
        }
        if (self.u_value - self.u_reduced).abs() > tol {
            out.push(format!(
                "U paths disagree: {} vs {}",
                self.u_value, self.u_reduced
            ));
        }
        out
    }
}

/// Full phase report for a state. Fails with [`Error::PhaseUndefined`] when
/// `⟨a⟩` vanishes (number states and anything numerically close).
pub fn bp_phase_report(state: &FockState) -> Result<PhaseReport> {
    let moments = MomentSet::of(state, &[]);
    let mut report = phase_report_from_moments(&moments)?;
    if !state.is_finite_support() {
        report.u_uncertainty = propagated_u_error(state, &moments);
    }
    Ok(report)
}

pub fn phase_report_from_moments(m: &MomentSet) -> Result<PhaseReport> {
    if !(m.mean_a.abs() > MEAN_FIELD_THRESHOLD) {
        return Err(Error::PhaseUndefined {
            mean_field: m.mean_a,
        });
    }
    let n_bar = m.n_mean;
    let scale = n_bar + 0.5;
    // Real amplitudes: ⟨a⟩ and ⟨a²⟩ are real, so ⟨a†⟩ = ⟨a⟩ and Im⟨E⟩ = 0.
    let (mean_a_re, mean_a_im) = (m.mean_a, 0.0);
    let re_a2 = m.mean_a2;

    let cos_mean = mean_a_re / scale.sqrt();
    let sin_mean = mean_a_im / scale.sqrt();
    let cos_sq = (2.0 * re_a2 + 2.0 * n_bar + 1.0) / (4.0 * scale);
    let sin_sq = (-2.0 * re_a2 + 2.0 * n_bar + 1.0) / (4.0 * scale);
    let var_c = cos_sq - cos_mean * cos_mean;
    let var_s = sin_sq - sin_mean * sin_mean;
    let total_phase_noise = var_c + var_s;
    let b_factor = total_phase_noise / (1.0 - total_phase_noise);
    let photon_variance = m.photon_variance();
    let u_value = photon_variance * b_factor;

    let u_reduced = reduced_u(m);

    let var_x = (2.0 * re_a2 + 2.0 * n_bar + 1.0) / 2.0 - 2.0 * mean_a_re * mean_a_re;
    let var_p = (-2.0 * re_a2 + 2.0 * n_bar + 1.0) / 2.0 - 2.0 * mean_a_im * mean_a_im;

    Ok(PhaseReport {
        n_bar,
        mean_a: m.mean_a,
        photon_variance,
        cos_mean,
        sin_mean,
        var_c,
        var_s,
        total_phase_noise,
        b_factor,
        u_value,
        u_reduced,
        d_u: u_value - U_COHERENT,
        amplitude_noise: var_x + var_p,
        u_uncertainty: 0.0,
    })
}

/// `U = [⟨a†²a²⟩ + ⟨a†a⟩ − ⟨a†a⟩²] (⟨a†a⟩ − ⟨a†⟩⟨a⟩ + ½) / (⟨a†⟩⟨a⟩)`
pub fn reduced_u(m: &MomentSet) -> f64 {
    let field = m.mean_a * m.mean_a;
    m.photon_variance() * (m.n_mean - field + 0.5) / field
}

/// Shifts one moment by the given amount.
type Bump = (fn(&mut MomentSet, f64), f64);

/// First-order propagation of the per-moment truncation bounds into `U`.
fn propagated_u_error(state: &FockState, m: &MomentSet) -> f64 {
    let base = reduced_u(m);
    let bumps: [Bump; 4] = [
        (|m, d| m.mean_a += d, state.moment_error_bound(0, 1)),
        (|m, d| m.mean_a2 += d, state.moment_error_bound(0, 2)),
        (|m, d| m.n_mean += d, state.moment_error_bound(1, 1)),
        (|m, d| m.n2_normord += d, state.moment_error_bound(2, 2)),
    ];
    bumps
        .iter()
        .map(|(apply, delta)| {
            let mut shifted = m.clone();
            apply(&mut shifted, *delta);
            (reduced_u(&shifted) - base).abs()
        })
        .sum()
}

pub fn u_parameter(state: &FockState) -> Result<f64> {
    bp_phase_report(state).map(|r| r.u_value)
}

pub fn d_u(state: &FockState) -> Result<f64> {
    bp_phase_report(state).map(|r| r.d_u)
}

/// `ΔN² − ⟨a†a⟩`; negative means sub-Poissonian (antibunched).
pub fn antibunching_witness(state: &FockState) -> f64 {
    state.photon_variance() - state.mean_photon()
}

/// `⟨a†ˡaˡ⟩ − ⟨a†a⟩ˡ`; negative means antibunching of order `l − 1`.
pub fn hoa_witness(state: &FockState, l: usize) -> Result<f64> {
    if l < 2 {
        return Err(param(format!(
            "higher-order antibunching needs l ≥ 2, got {l}"
        )));
    }
    let moment = state.normally_ordered_moment(l, l)?;
    Ok(moment - state.mean_photon().powi(l as i32))
}

/// `(ΔX)² + (ΔẊ)²`, equal to `2⟨a†a⟩ + 1 − 2⟨a⟩²` for real amplitudes.
pub fn total_amplitude_noise(state: &FockState) -> f64 {
    let n = state.mean_photon();
    let a = state.amplitude_moment(1);
    let a2 = state.amplitude_moment(2);
    let var_x = (2.0 * a2 + 2.0 * n + 1.0) / 2.0 - 2.0 * a * a;
    let var_p = (-2.0 * a2 + 2.0 * n + 1.0) / 2.0;
    var_x + var_p
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSet {
    /// `ΔN² − ⟨N⟩`
    pub antibunch: f64,
    /// `l → ⟨a†ˡaˡ⟩ − ⟨a†a⟩ˡ`
    pub hoa: BTreeMap<usize, f64>,
}

pub fn witnesses(state: &FockState, hoa_orders: &[usize]) -> Result<WitnessSet> {
    let hoa = hoa_orders
        .iter()
        .map(|&l| hoa_witness(state, l).map(|w| (l, w)))
        .collect::<Result<_>>()?;
    Ok(WitnessSet {
        antibunch: antibunching_witness(state),
        hoa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        binomial_state, coherent_state, photon_added_coherent_state, Truncation,
    };
    use approx::assert_abs_diff_eq;

    #[test]
    fn coherent_state_is_the_reference() {
        let (s, _) = coherent_state(2.0, Truncation::new(1e-14)).unwrap();
        let r = bp_phase_report(&s).unwrap();
        assert_abs_diff_eq!(r.u_value, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.d_u, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.amplitude_noise, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(antibunching_witness(&s), 0.0, epsilon = 1e-9);
        assert!(r.violations(1e-10).is_empty(), "{:?}", r.violations(1e-10));
    }

    #[test]
    fn two_level_binomial_gives_p_squared() {
        let s = binomial_state(0.3, 1).unwrap();
        assert_abs_diff_eq!(d_u(&s).unwrap(), 0.09, epsilon = 1e-14);
    }

    #[test]
    fn binomial_half_two_is_antibunched_without_phase_reduction() {
        let s = binomial_state(0.5, 2).unwrap();
        assert_abs_diff_eq!(d_u(&s).unwrap(), 0.029437251522859, epsilon = 1e-12);
        assert_abs_diff_eq!(antibunching_witness(&s), -0.5, epsilon = 1e-14);
    }

    #[test]
    fn number_state_has_no_phase() {
        let s = FockState::number(2);
        assert!(matches!(
            bp_phase_report(&s),
            Err(Error::PhaseUndefined { .. })
        ));
        assert!(matches!(
            d_u(&FockState::vacuum()),
            Err(Error::PhaseUndefined { .. })
        ));
    }

    #[test]
    fn witnesses_on_number_states() {
        for n in 0..6 {
            let s = FockState::number(n);
            assert_eq!(antibunching_witness(&s), -(n as f64));
            assert_eq!(total_amplitude_noise(&s), 2.0 * n as f64 + 1.0);
            if n >= 2 {
                assert_eq!(hoa_witness(&s, 2).unwrap(), -(n as f64));
            }
        }
        assert_eq!(total_amplitude_noise(&FockState::vacuum()), 1.0);
    }

    #[test]
    fn hoa_errors() {
        let s = binomial_state(0.5, 2).unwrap();
        assert!(matches!(hoa_witness(&s, 3), Err(Error::Dimension { .. })));
        assert!(matches!(hoa_witness(&s, 1), Err(Error::Param(_))));
        let w = witnesses(&s.padded(3), &[2, 3]).unwrap();
        assert_abs_diff_eq!(w.hoa[&2], w.antibunch, epsilon = 1e-14);
        assert_abs_diff_eq!(w.hoa[&3], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn photon_addition_reduces_phase_fluctuation() {
        let (s, _) = photon_added_coherent_state(1.0, 2, Truncation::default()).unwrap();
        let r = bp_phase_report(&s).unwrap();
        assert!(r.d_u < 0.0);
        assert!(r.u_uncertainty < 1e-8);
    }
}
