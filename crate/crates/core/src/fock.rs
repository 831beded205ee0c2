//! Pure states as real amplitude vectors in the photon-number basis.
//!
//! A [`FockState`] keeps the probability mass that was cut away when an
//! infinite expansion was truncated. The vector is never renormalized, so
//! `Σ c_n² + residual_mass = 1` and every moment computed from it is a lower
//! truncation of the exact series.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::ln_ladder;

/// Tolerance used when validating `Σ c_n² + residual = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Ladder factors up to this order are formed as plain products.
const DIRECT_LADDER_MAX: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockState {
    amplitudes: Vec<f64>,
    residual_mass: f64,
}

impl FockState {
    /// Validates and wraps an amplitude vector `c_0..c_{n_max}`.
    pub fn new(amplitudes: Vec<f64>, residual_mass: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyState);
        }
        if let Some((index, &value)) = amplitudes.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::InvalidAmplitude { index, value });
        }
        if !(0.0..=1.0).contains(&residual_mass) {
            return Err(Error::Param(format!(
                "residual mass {residual_mass} outside [0, 1]"
            )));
        }
        let total = amplitudes.iter().map(|c| c * c).sum::<f64>() + residual_mass;
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization { total });
        }
        Ok(Self {
            amplitudes,
            residual_mass,
        })
    }

    pub fn vacuum() -> Self {
        Self::number(0)
    }

    /// Number state `|n⟩`.
    pub fn number(n: usize) -> Self {
        let mut amplitudes = vec![0.0; n + 1];
        amplitudes[n] = 1.0;
        Self {
            amplitudes,
            residual_mass: 0.0,
        }
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Highest retained photon number.
    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn residual_mass(&self) -> f64 {
        self.residual_mass
    }

    /// `Σ c_n²` over the retained amplitudes.
    pub fn retained_mass(&self) -> f64 {
        self.amplitudes.iter().map(|c| c * c).sum()
    }

    /// `Σ c_n² + residual − 1`.
    pub fn normalization_defect(&self) -> f64 {
        self.retained_mass() + self.residual_mass - 1.0
    }

    /// True when nothing was truncated away.
    pub fn is_finite_support(&self) -> bool {
        self.residual_mass == 0.0
    }

    /// Same state with zero amplitudes appended up to `n_max`.
    ///
    /// No moment changes; this only widens the range of operator orders that
    /// [`normally_ordered_moment`](Self::normally_ordered_moment) accepts.
    pub fn padded(&self, n_max: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        if amplitudes.len() <= n_max {
            amplitudes.resize(n_max + 1, 0.0);
        }
        Self {
            amplitudes,
            residual_mass: self.residual_mass,
        }
    }

    /// `⟨a†ʲ aᵏ⟩ = Σ_n c_{n+j} c_{n+k} √((n+j)!/n!) √((n+k)!/n!)`.
    pub fn normally_ordered_moment(&self, j: usize, k: usize) -> Result<f64> {
        let order = j.max(k);
        if order > self.n_max() {
            return Err(Error::Dimension {
                order,
                n_max: self.n_max(),
            });
        }
        Ok(self.moment(j, k))
    }

    /// Same sum as [`normally_ordered_moment`](Self::normally_ordered_moment);
    /// terms beyond `n_max` are treated as zero instead of being rejected.
    pub(crate) fn moment(&self, j: usize, k: usize) -> f64 {
        let c = &self.amplitudes;
        let order = j.max(k);
        if order > self.n_max() {
            return 0.0;
        }
        let direct = order <= DIRECT_LADDER_MAX;
        (0..=self.n_max() - order)
            .map(|n| {
                let (x, y) = (c[n + j], c[n + k]);
                if x == 0.0 || y == 0.0 {
                    return 0.0;
                }
                if direct {
                    let pj = ladder_product(n, j);
                    let factor = if j == k {
                        pj
                    } else {
                        (pj * ladder_product(n, k)).sqrt()
                    };
                    x * y * factor
                } else {
                    let sign = (x * y).signum();
                    let log =
                        x.abs().ln() + y.abs().ln() + 0.5 * (ln_ladder(n, j) + ln_ladder(n, k));
                    sign * log.exp()
                }
            })
            .sum()
    }

    /// `⟨a†a⟩`
    pub fn mean_photon(&self) -> f64 {
        self.moment(1, 1)
    }

    /// `ΔN² = ⟨a†²a²⟩ + ⟨a†a⟩ − ⟨a†a⟩²`
    pub fn photon_variance(&self) -> f64 {
        let n = self.moment(1, 1);
        self.moment(2, 2) + n - n * n
    }

    /// `⟨aᵏ⟩`; for real amplitudes this also equals `⟨a†ᵏ⟩`.
    pub fn amplitude_moment(&self, k: usize) -> f64 {
        self.moment(0, k)
    }

    /// Heuristic worst-case error of `⟨a†ʲaᵏ⟩` caused by the truncated tail.
    ///
    /// Treats the residual mass as if it sat just above the cutoff, where the
    /// ladder factor is `√((n_max+1+j)^j (n_max+1+k)^k)`. Zero for states with
    /// finite support.
    pub fn moment_error_bound(&self, j: usize, k: usize) -> f64 {
        if self.residual_mass == 0.0 {
            return 0.0;
        }
        let top = (self.n_max() + 1) as f64;
        let weight = 0.5 * (j as f64 * (top + j as f64).ln() + k as f64 * (top + k as f64).ln());
        // The ⟨a⟩-type cross terms pair one retained and one discarded amplitude,
        // so scale by the square root of the residual as well.
        let cross = if j != k {
            self.residual_mass.sqrt() * self.amplitudes[self.n_max()].abs()
        } else {
            0.0
        };
        2.0 * (self.residual_mass + cross) * weight.exp()
    }
}

fn ladder_product(n: usize, j: usize) -> f64 {
    (1..=j).map(|i| (n + i) as f64).product()
}

/// Normally ordered moments needed by the phase and antibunching metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSet {
    /// `⟨a⟩`
    pub mean_a: f64,
    /// `⟨a²⟩`
    pub mean_a2: f64,
    /// `⟨a†a⟩`
    pub n_mean: f64,
    /// `⟨a†²a²⟩`
    pub n2_normord: f64,
    /// `⟨a†ˡaˡ⟩` for each requested order `l`
    pub higher: BTreeMap<usize, f64>,
}

impl MomentSet {
    pub fn of(state: &FockState, higher_orders: &[usize]) -> Self {
        Self {
            mean_a: state.moment(0, 1),
            mean_a2: state.moment(0, 2),
            n_mean: state.moment(1, 1),
            n2_normord: state.moment(2, 2),
            higher: higher_orders
                .iter()
                .map(|&l| (l, state.moment(l, l)))
                .collect(),
        }
    }

    pub fn photon_variance(&self) -> f64 {
        self.n2_normord + self.n_mean - self.n_mean * self.n_mean
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bs_half_two() -> FockState {
        FockState::new(vec![0.5, FRAC_1_SQRT_2, 0.5], 0.0).unwrap()
    }

    #[test]
    fn make_state_accepts_vacuum_and_binomial() {
        let vac = FockState::new(vec![1.0], 0.0).unwrap();
        assert_eq!(vac, FockState::vacuum());
        assert_eq!(vac.n_max(), 0);
        let bs = bs_half_two();
        assert_eq!(bs.n_max(), 2);
        assert!(bs.is_finite_support());
    }

    #[test]
    fn make_state_rejects_bad_input() {
        assert!(
            matches!(FockState::new(vec![0.5, 0.5], 0.0), Err(Error::Normalization { total }) if (total - 0.5).abs() < 1e-15)
        );
        assert!(matches!(
            FockState::new(vec![1.0, f64::NAN], 0.0),
            Err(Error::InvalidAmplitude { index: 1, .. })
        ));
        assert!(matches!(
            FockState::new(vec![], 0.0),
            Err(Error::EmptyState)
        ));
        assert!(matches!(
            FockState::new(vec![1.0], -0.1),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn binomial_moments() {
        let bs = bs_half_two();
        assert_abs_diff_eq!(
            bs.normally_ordered_moment(1, 1).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            bs.normally_ordered_moment(2, 2).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(bs.photon_variance(), 0.5, epsilon = 1e-15);
        // ½ + √2/4
        assert_abs_diff_eq!(bs.amplitude_moment(1), 0.853553390593274, epsilon = 1e-14);
    }

    #[test]
    fn order_beyond_cutoff_is_a_dimension_error() {
        let bs = bs_half_two();
        assert!(matches!(
            bs.normally_ordered_moment(3, 3),
            Err(Error::Dimension { order: 3, n_max: 2 })
        ));
        assert_eq!(bs.padded(3).normally_ordered_moment(3, 3).unwrap(), 0.0);
    }

    #[test]
    fn number_states() {
        for n in 0..12 {
            let s = FockState::number(n);
            assert_eq!(s.photon_variance(), 0.0);
            assert_eq!(s.mean_photon(), n as f64);
            assert_eq!(s.moment(2, 2), (n * n.saturating_sub(1)) as f64);
            assert_eq!(s.amplitude_moment(1), 0.0);
        }
    }

    #[test]
    fn high_order_log_path_matches_direct() {
        let amps: Vec<f64> = (0..40)
            .map(|n| if n % 3 == 0 { 1.0 } else { 0.5 })
            .collect();
        let norm = amps.iter().map(|c| c * c).sum::<f64>().sqrt();
        let s = FockState::new(amps.iter().map(|c| c / norm).collect(), 0.0).unwrap();
        for (j, k) in [(17, 17), (17, 18), (20, 19)] {
            let direct: f64 = (0..=s.n_max() - j.max(k))
                .map(|n| {
                    let c = s.amplitudes();
                    c[n + j] * c[n + k] * (ladder_product(n, j) * ladder_product(n, k)).sqrt()
                })
                .sum();
            let m = s.moment(j, k);
            assert!(
                (m - direct).abs() <= 1e-12 * direct.abs(),
                "{j},{k}: {m} vs {direct}"
            );
        }
    }

    #[test]
    fn moment_set_collects_higher_orders() {
        let m = MomentSet::of(&bs_half_two(), &[2, 3]);
        assert_eq!(m.higher[&2], m.n2_normord);
        assert_eq!(m.higher[&3], 0.0);
        assert_abs_diff_eq!(m.photon_variance(), 0.5, epsilon = 1e-15);
    }
}
