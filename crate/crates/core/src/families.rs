//! Constructors for the intermediate photon states and the coherent baseline.
//!
//! All weights are evaluated in log space. Families with infinite support are
//! cut at the smallest `n_max` whose geometric tail bound drops below the
//! requested tolerance; the discarded mass is summed explicitly and kept on
//! the returned [`FockState`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::fock::FockState;
use crate::special::{laguerre, ln_binomial, ln_choose, ln_factorial, ln_ladder, ln_rising};

pub const DEFAULT_EPSILON: f64 = 1e-12;
pub const DEFAULT_NMAX_CAP: usize = 1_000_000;

/// Weight-sum tolerance for the generalized binomial state.
const GBS_SUM_TOL: f64 = 1e-10;
/// Weight-sum tolerance for the hypergeometric state.
const HS_SUM_TOL: f64 = 1e-9;
/// Relative slack on the `Lp ≥ M`, `L(1−p) ≥ M` domain test, so that grid values
/// like `p = 0.1 + 80·0.01` are not rejected over one ulp.
const HS_DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Family {
    Binomial,
    GeneralizedBinomial,
    NegativeBinomial,
    Hypergeometric,
    PhotonAddedCoherent,
    Coherent,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Binomial,
        Family::GeneralizedBinomial,
        Family::NegativeBinomial,
        Family::Hypergeometric,
        Family::PhotonAddedCoherent,
        Family::Coherent,
    ];

    /// Short tag used on the command line and in CSV output.
    pub fn tag(self) -> &'static str {
        match self {
            Family::Binomial => "binomial",
            Family::GeneralizedBinomial => "gbs",
            Family::NegativeBinomial => "nbs",
            Family::Hypergeometric => "hs",
            Family::PhotonAddedCoherent => "pacs",
            Family::Coherent => "coherent",
        }
    }

    /// Parameter names in canonical (CSV column) order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Binomial => &["p", "M"],
            Family::GeneralizedBinomial => &["alpha", "beta", "N"],
            Family::NegativeBinomial => &["p", "M"],
            Family::Hypergeometric => &["L", "M", "p"],
            Family::PhotonAddedCoherent => &["alpha", "m"],
            Family::Coherent => &["alpha"],
        }
    }

    pub fn is_integer_param(self, name: &str) -> bool {
        matches!(name, "M" | "N" | "m")
    }

    /// Families whose expansion is infinite and has to be truncated.
    pub fn is_truncated(self) -> bool {
        matches!(
            self,
            Family::NegativeBinomial | Family::PhotonAddedCoherent | Family::Coherent
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Ok(match key.as_str() {
            "binomial" | "bs" => Family::Binomial,
            "gbs" | "generalized_binomial" => Family::GeneralizedBinomial,
            "nbs" | "negative_binomial" => Family::NegativeBinomial,
            "hs" | "hypergeometric" => Family::Hypergeometric,
            "pacs" | "photon_added_coherent" => Family::PhotonAddedCoherent,
            "coherent" | "cs" => Family::Coherent,
            _ => return Err(param(format!("unknown state family '{s}'"))),
        })
    }
}

impl TryFrom<String> for Family {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Family> for String {
    fn from(f: Family) -> String {
        f.tag().to_string()
    }
}

/// Family-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateParams {
    Binomial {
        p: f64,
        #[serde(rename = "M")]
        m: usize,
    },
    GeneralizedBinomial {
        alpha: f64,
        beta: f64,
        #[serde(rename = "N")]
        n: usize,
    },
    NegativeBinomial {
        p: f64,
        #[serde(rename = "M")]
        m: usize,
    },
    Hypergeometric {
        #[serde(rename = "L")]
        l: f64,
        #[serde(rename = "M")]
        m: usize,
        p: f64,
    },
    PhotonAddedCoherent {
        alpha: f64,
        m: usize,
    },
    Coherent {
        alpha: f64,
    },
}

impl StateParams {
    pub fn family(&self) -> Family {
        match self {
            StateParams::Binomial { .. } => Family::Binomial,
            StateParams::GeneralizedBinomial { .. } => Family::GeneralizedBinomial,
            StateParams::NegativeBinomial { .. } => Family::NegativeBinomial,
            StateParams::Hypergeometric { .. } => Family::Hypergeometric,
            StateParams::PhotonAddedCoherent { .. } => Family::PhotonAddedCoherent,
            StateParams::Coherent { .. } => Family::Coherent,
        }
    }

    /// Parameter values in the order of [`Family::param_names`].
    pub fn values(&self) -> Vec<f64> {
        match *self {
            StateParams::Binomial { p, m } | StateParams::NegativeBinomial { p, m } => {
                vec![p, m as f64]
            }
            StateParams::GeneralizedBinomial { alpha, beta, n } => vec![alpha, beta, n as f64],
            StateParams::Hypergeometric { l, m, p } => vec![l, m as f64, p],
            StateParams::PhotonAddedCoherent { alpha, m } => vec![alpha, m as f64],
            StateParams::Coherent { alpha } => vec![alpha],
        }
    }

    /// Builds parameters from a name → value map, checking that every name is
    /// known, none is missing and integer parameters hold integral values.
    pub fn from_map(family: Family, values: &BTreeMap<String, f64>) -> Result<Self> {
        let names = family.param_names();
        if let Some(extra) = values.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(param(format!(
                "'{extra}' is not a parameter of {family} (expected {names:?})"
            )));
        }
        let real = |name: &str| -> Result<f64> {
            let v = *values
                .get(name)
                .ok_or_else(|| param(format!("missing parameter '{name}' for {family}")))?;
            if !v.is_finite() {
                return Err(param(format!("parameter '{name}' must be finite, got {v}")));
            }
            Ok(v)
        };
        let int = |name: &str| -> Result<usize> {
            let v = real(name)?;
            let r = v.round();
            if (v - r).abs() > 1e-9 || r < 0.0 {
                return Err(param(format!(
                    "parameter '{name}' must be a nonnegative integer, got {v}"
                )));
            }
            Ok(r as usize)
        };
        Ok(match family {
            Family::Binomial => StateParams::Binomial {
                p: real("p")?,
                m: int("M")?,
            },
            Family::GeneralizedBinomial => StateParams::GeneralizedBinomial {
                alpha: real("alpha")?,
                beta: real("beta")?,
                n: int("N")?,
            },
            Family::NegativeBinomial => StateParams::NegativeBinomial {
                p: real("p")?,
                m: int("M")?,
            },
            Family::Hypergeometric => StateParams::Hypergeometric {
                l: real("L")?,
                m: int("M")?,
                p: real("p")?,
            },
            Family::PhotonAddedCoherent => StateParams::PhotonAddedCoherent {
                alpha: real("alpha")?,
                m: int("m")?,
            },
            Family::Coherent => StateParams::Coherent {
                alpha: real("alpha")?,
            },
        })
    }

    /// Range checks, without building the state.
    pub fn validate(&self) -> Result<()> {
        match *self {
            StateParams::Binomial { p, m } => {
                check_open_unit("p", p)?;
                check_at_least("M", m, 1)
            }
            StateParams::GeneralizedBinomial { alpha, beta, n } => {
                check_above("alpha", alpha, -1.0)?;
                check_above("beta", beta, -1.0)?;
                check_at_least("N", n, 1)
            }
            StateParams::NegativeBinomial { p, .. } => check_open_unit("p", p),
            StateParams::Hypergeometric { l, m, p } => {
                check_above("L", l, 0.0)?;
                check_at_least("M", m, 1)?;
                check_open_unit("p", p)?;
                let need = m as f64 * (1.0 - HS_DOMAIN_SLACK);
                if l * p < need || l * (1.0 - p) < need {
                    return Err(Error::Domain(format!(
                        "hypergeometric state needs Lp ≥ M and L(1−p) ≥ M (L={l}, M={m}, p={p})"
                    )));
                }
                Ok(())
            }
            StateParams::PhotonAddedCoherent { alpha, .. } | StateParams::Coherent { alpha } => {
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return Err(param(format!("alpha must be finite and ≥ 0, got {alpha}")));
                }
                Ok(())
            }
        }
    }
}

/// Truncation settings for families with infinite support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub epsilon: f64,
    pub nmax_cap: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            nmax_cap: DEFAULT_NMAX_CAP,
        }
    }
}

impl Truncation {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(param(format!(
                "truncation tolerance must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// A family, its parameters and the truncation tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateSpec {
    pub params: StateParams,
    pub truncation: Truncation,
}

impl StateSpec {
    pub fn new(params: StateParams) -> Self {
        Self {
            params,
            truncation: Truncation::default(),
        }
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.truncation.epsilon = epsilon;
        self
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    /// Builds the state. Finite families report their support as `n_max`
    /// with zero residual.
    pub fn build(&self) -> Result<(FockState, TruncationReport)> {
        let t = self.truncation;
        match self.params {
            StateParams::Binomial { p, m } => binomial_state(p, m).map(finite),
            StateParams::GeneralizedBinomial { alpha, beta, n } => {
                generalized_binomial_state(alpha, beta, n).map(finite)
            }
            StateParams::NegativeBinomial { p, m } => negative_binomial_state(p, m, t),
            StateParams::Hypergeometric { l, m, p } => hypergeometric_state(l, m, p).map(finite),
            StateParams::PhotonAddedCoherent { alpha, m } => {
                photon_added_coherent_state(alpha, m, t)
            }
            StateParams::Coherent { alpha } => coherent_state(alpha, t),
        }
    }

    pub fn state(&self) -> Result<FockState> {
        self.build().map(|(s, _)| s)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = self.family();
        write!(f, "{family}(")?;
        for (i, (name, v)) in family
            .param_names()
            .iter()
            .zip(self.params.values())
            .enumerate()
        {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={}", crate::sweep::format_float(v))?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub n_max: usize,
    pub residual_mass: f64,
    pub tail_bound_used: String,
}

fn finite(state: FockState) -> (FockState, TruncationReport) {
    let report = TruncationReport {
        n_max: state.n_max(),
        residual_mass: 0.0,
        tail_bound_used: "finite support, nothing truncated".into(),
    };
    (state, report)
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(param(format!(
            "{name} must lie strictly inside (0, 1), got {v}"
        )));
    }
    Ok(())
}

fn check_above(name: &str, v: f64, lower: f64) -> Result<()> {
    if !(v > lower && v.is_finite()) {
        return Err(param(format!(
            "{name} must be finite and > {lower}, got {v}"
        )));
    }
    Ok(())
}

fn check_at_least(name: &str, v: usize, lower: usize) -> Result<()> {
    if v < lower {
        return Err(param(format!("{name} must be ≥ {lower}, got {v}")));
    }
    Ok(())
}

fn amplitudes_from_log_weights(log_weights: impl IntoIterator<Item = f64>) -> Vec<f64> {
    log_weights.into_iter().map(|lw| (0.5 * lw).exp()).collect()
}

/// `c_n = √(C(M,n) pⁿ (1−p)^{M−n})`, `n = 0..=M`.
pub fn binomial_state(p: f64, m: usize) -> Result<FockState> {
    StateParams::Binomial { p, m }.validate()?;
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let amps = amplitudes_from_log_weights(
        (0..=m).map(|n| ln_choose(m, n).unwrap() + n as f64 * lp + (m - n) as f64 * lq),
    );
    FockState::new(amps, 0.0)
}

/// `ln ω(n, N, α, β)` for the generalized binomial weights
/// `N!/(α+β+2)_N · (α+1)_n (β+1)_{N−n} / (n!(N−n)!)`.
pub(crate) fn ln_gbs_weight(n: usize, big_n: usize, alpha: f64, beta: f64) -> f64 {
    ln_factorial(big_n) - ln_rising(alpha + beta + 2.0, big_n)
        + ln_rising(alpha + 1.0, n)
        + ln_rising(beta + 1.0, big_n - n)
        - ln_factorial(n)
        - ln_factorial(big_n - n)
}

/// Generalized binomial state with Pochhammer weights; `α, β > −1`, `N ≥ 1`.
pub fn generalized_binomial_state(alpha: f64, beta: f64, n: usize) -> Result<FockState> {
    StateParams::GeneralizedBinomial { alpha, beta, n }.validate()?;
    let amps = amplitudes_from_log_weights((0..=n).map(|k| ln_gbs_weight(k, n, alpha, beta)));
    let sum: f64 = amps.iter().map(|c| c * c).sum();
    if (sum - 1.0).abs() > GBS_SUM_TOL {
        return Err(Error::Domain(format!(
            "generalized binomial weights sum to {sum}"
        )));
    }
    FockState::new(amps, 0.0)
}

/// `H_n^M(p, L)² = C(Lp, n) C(L(1−p), M−n) / C(L, M)` with Γ-defined binomials.
pub fn hypergeometric_state(l: f64, m: usize, p: f64) -> Result<FockState> {
    StateParams::Hypergeometric { l, m, p }.validate()?;
    let domain = || {
        Error::Domain(format!(
            "binomial coefficient undefined for L={l}, M={m}, p={p}"
        ))
    };
    let norm = ln_binomial(l, m).ok_or_else(domain)?;
    let mut log_weights = Vec::with_capacity(m + 1);
    for n in 0..=m {
        let a = ln_binomial(l * p, n).ok_or_else(domain)?;
        let b = ln_binomial(l * (1.0 - p), m - n).ok_or_else(domain)?;
        log_weights.push(a + b - norm);
    }
    let amps = amplitudes_from_log_weights(log_weights);
    let sum: f64 = amps.iter().map(|c| c * c).sum();
    if !((sum - 1.0).abs() <= HS_SUM_TOL) {
        return Err(Error::Domain(format!(
            "hypergeometric weights sum to {sum}, not 1"
        )));
    }
    FockState::new(amps, 0.0)
}

/// `c_n = √(C(n,M) p^{M+1} (1−p)^{n−M})` for `n ≥ M`, truncated.
pub fn negative_binomial_state(
    p: f64,
    m: usize,
    truncation: Truncation,
) -> Result<(FockState, TruncationReport)> {
    StateParams::NegativeBinomial { p, m }.validate()?;
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let log_weight =
        |n: usize| ln_choose(n, m).unwrap() + (m + 1) as f64 * lp + (n - m) as f64 * lq;
    truncate(m, log_weight, truncation)
}

/// Photon-added coherent state
/// `c_{n+m} = e^{−α²/2} αⁿ √((n+m)!) / (n! √(L_m(−α²) m!))`, truncated.
pub fn photon_added_coherent_state(
    alpha: f64,
    m: usize,
    truncation: Truncation,
) -> Result<(FockState, TruncationReport)> {
    StateParams::PhotonAddedCoherent { alpha, m }.validate()?;
    truncation.validate()?;
    if alpha == 0.0 {
        return Ok(finite(FockState::number(m)));
    }
    let x = alpha * alpha;
    let ln_norm = laguerre(m, -x).ln() + ln_factorial(m);
    let la = alpha.ln();
    let log_weight = |k: usize| {
        let n = k - m;
        -x + 2.0 * n as f64 * la + ln_ladder(n, m) - ln_factorial(n) - ln_norm
    };
    truncate(m, log_weight, truncation)
}

/// Coherent state with real `α ≥ 0`, `c_n = e^{−α²/2} αⁿ / √(n!)`, truncated.
pub fn coherent_state(alpha: f64, truncation: Truncation) -> Result<(FockState, TruncationReport)> {
    StateParams::Coherent { alpha }.validate()?;
    truncation.validate()?;
    if alpha == 0.0 {
        return Ok(finite(FockState::vacuum()));
    }
    let x = alpha * alpha;
    let la = alpha.ln();
    truncate(
        0,
        |n| -x + 2.0 * n as f64 * la - ln_factorial(n),
        truncation,
    )
}

/// Cuts an infinite weight sequence starting at `start`.
///
/// The weight ratio `w_{n+1}/w_n` of every supported family is nonincreasing
/// in `n`, so once `r = w_{n+2}/w_{n+1} < 1` the tail beyond `n` is bounded by
/// `w_{n+1} / (1 − r)`. The first `n` where that bound falls below `epsilon`
/// becomes `n_max`. The residual itself is then summed term by term.
fn truncate(
    start: usize,
    log_weight: impl Fn(usize) -> f64,
    truncation: Truncation,
) -> Result<(FockState, TruncationReport)> {
    truncation.validate()?;
    let Truncation { epsilon, nmax_cap } = truncation;
    let tail_bound = |n: usize| -> Option<f64> {
        let next = log_weight(n + 1);
        let ratio = (log_weight(n + 2) - next).exp();
        (ratio < 1.0).then(|| next.exp() / (1.0 - ratio))
    };

    let mut amplitudes = vec![0.0; start];
    let mut n = start;
    loop {
        if n > nmax_cap {
            return Err(Error::Truncation {
                cap: nmax_cap,
                epsilon,
            });
        }
        amplitudes.push((0.5 * log_weight(n)).exp());
        if tail_bound(n).is_some_and(|b| b < epsilon) {
            break;
        }
        n += 1;
    }
    let n_max = n;

    let mut residual = 0.0;
    let mut k = n_max + 1;
    loop {
        let w = log_weight(k).exp();
        residual += w;
        match tail_bound(k) {
            Some(b) if b <= 1e-6 * f64::EPSILON * residual.max(f64::MIN_POSITIVE) => break,
            _ if k - n_max > 100_000 => break,
            _ => k += 1,
        }
    }

    let report = TruncationReport {
        n_max,
        residual_mass: residual,
        tail_bound_used: format!(
            "geometric tail bound w(n+1)/(1 - w(n+2)/w(n+1)) < {epsilon:e} at n = {n_max}; residual summed explicitly"
        ),
    };
    Ok((FockState::new(amplitudes, residual)?, report))
}
