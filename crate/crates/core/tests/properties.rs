use proptest::prelude::*;
use qphase::sweep::format_float;
use qphase::*;

fn any_params() -> impl Strategy<Value = StateParams> {
    prop_oneof![
        (0.01f64..0.99, 1usize..40).prop_map(|(p, m)| StateParams::Binomial { p, m }),
        (-0.9f64..50.0, -0.9f64..50.0, 1usize..30)
            .prop_map(|(alpha, beta, n)| StateParams::GeneralizedBinomial { alpha, beta, n }),
        (0.1f64..0.95, 0usize..8).prop_map(|(p, m)| StateParams::NegativeBinomial { p, m }),
        (1usize..10, 0.05f64..0.95, 0.0f64..20.0).prop_map(|(m, p, stretch)| {
            let l = m as f64 / p.min(1.0 - p) * (1.0 + stretch);
            StateParams::Hypergeometric { l, m, p }
        }),
        (0.05f64..3.5, 0usize..6)
            .prop_map(|(alpha, m)| StateParams::PhotonAddedCoherent { alpha, m }),
        (0.05f64..4.0).prop_map(|alpha| StateParams::Coherent { alpha }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn states_are_normalized(params in any_params()) {
        let (state, report) = StateSpec::new(params).build().unwrap();
        prop_assert!(state.normalization_defect().abs() < 1e-12);
        prop_assert!(report.residual_mass <= 1e-12);
        prop_assert!(state.amplitudes().iter().all(|c| c.is_finite() && *c >= 0.0));
    }

    #[test]
    fn phase_report_invariants(params in any_params()) {
        let state = StateSpec::new(params).state().unwrap();
        let Ok(r) = bp_phase_report(&state) else { return Ok(()) };
        let tol = 1e-10f64.max(10.0 * r.u_uncertainty);
        prop_assert!(r.total_phase_noise > 0.0 && r.total_phase_noise < 1.0);
        prop_assert!(r.b_factor > 0.0);
        prop_assert!(r.u_value >= 0.25 - tol, "U = {}", r.u_value);
        prop_assert!((r.cos_mean.powi(2) + r.sin_mean.powi(2) + r.total_phase_noise - 1.0).abs() <= 1e-10);
        let robertson = 1.0 / (16.0 * (r.n_bar + 0.5).powi(2));
        prop_assert!(r.var_c * r.var_s >= robertson - 1e-10);
        prop_assert!((r.d_u - (r.u_value - 0.5)).abs() == 0.0);
    }

    #[test]
    fn both_u_paths_agree(params in any_params()) {
        let state = StateSpec::new(params).state().unwrap();
        let Ok(r) = bp_phase_report(&state) else { return Ok(()) };
        prop_assume!(r.mean_a > 1e-6);
        let tol = 1e-10f64.max(10.0 * r.u_uncertainty);
        prop_assert!((r.u_value - r.u_reduced).abs() <= tol, "{} vs {}", r.u_value, r.u_reduced);
    }

    #[test]
    fn phase_reduction_implies_antibunching(params in any_params()) {
        let state = StateSpec::new(params).state().unwrap();
        let Ok(du) = d_u(&state) else { return Ok(()) };
        if du < -1e-12 {
            prop_assert!(antibunching_witness(&state) < 0.0);
        }
    }

    #[test]
    fn second_order_witness_is_antibunching(params in any_params()) {
        let state = StateSpec::new(params).state().unwrap();
        let state = state.padded(state.n_max().max(2));
        let a = antibunching_witness(&state);
        let h = hoa_witness(&state, 2).unwrap();
        prop_assert!((a - h).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {h}");
    }

    #[test]
    fn padding_changes_nothing(params in any_params(), extra in 1usize..6) {
        let state = StateSpec::new(params).state().unwrap();
        let padded = state.padded(state.n_max() + extra);
        prop_assert_eq!(padded.mean_photon(), state.mean_photon());
        prop_assert_eq!(padded.amplitude_moment(1), state.amplitude_moment(1));
        prop_assert_eq!(padded.amplitude_moment(2), state.amplitude_moment(2));
        prop_assert_eq!(padded.photon_variance(), state.photon_variance());
    }

    #[test]
    fn twelve_digit_rendering_round_trips(x in prop::num::f64::NORMAL) {
        let back: f64 = format_float(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs(), "{x} -> {}", format_float(x));
    }
}

#[test]
fn sweep_output_is_deterministic() {
    for id in 1..=5 {
        let config = figure_preset(id).unwrap();
        let a = run_sweep(&config).unwrap().to_csv_string();
        let b = run_sweep(&config).unwrap().to_csv_string();
        assert_eq!(a, b, "figure {id}");
    }
}
