//! Reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's moment or combinatorics code.
//! Amplitudes are rebuilt by ratio recursion, and phase quantities come from
//! dense operator matrices.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qphase::{FockState, StateParams, StateSpec};

/// Lowering operator on `0..dim`.
pub fn lowering(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(
        dim,
        dim,
        |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 },
    )
}

/// `⟨a†ʲ aᵏ⟩ = (aʲc)·(aᵏc)` with the vector padded so the top of the space
/// is never touched.
pub fn dense_moment(c: &[f64], j: usize, k: usize) -> f64 {
    let dim = c.len() + 2;
    let a = lowering(dim);
    let v = padded(c, dim);
    let apply = |n: usize| (0..n).fold(v.clone(), |x, _| &a * x);
    apply(j).dot(&apply(k))
}

fn padded(c: &[f64], dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |i, _| c.get(i).copied().unwrap_or(0.0))
}

/// Phase quantities assembled from explicit `E`, `C` and `S` matrices.
#[derive(Debug, Clone, Copy)]
pub struct DensePhase {
    pub n_bar: f64,
    pub var_n: f64,
    pub cos_mean: f64,
    pub var_c: f64,
    pub var_s: f64,
    pub t: f64,
    pub u: f64,
    pub d_u: f64,
    pub antibunch: f64,
}

pub fn dense_phase(c: &[f64]) -> DensePhase {
    let dim = c.len() + 3;
    let a = lowering(dim);
    let v = padded(c, dim);
    let number = a.transpose() * &a;
    let n_bar = v.dot(&(&number * &v));
    let n2 = v.dot(&(&number * &number * &v));
    let var_n = n2 - n_bar * n_bar;
    let e = &a / (n_bar + 0.5).sqrt();
    let sum = &e + e.transpose();
    let diff = &e - e.transpose();
    // C = (E+E†)/2; S = −i(E−E†)/2, so S² = −(E−E†)²/4 and ⟨S⟩ = 0 for real c.
    let cos_mean = 0.5 * v.dot(&(&sum * &v));
    let c2 = 0.25 * v.dot(&(&sum * &sum * &v));
    let s2 = -0.25 * v.dot(&(&diff * &diff * &v));
    let var_c = c2 - cos_mean * cos_mean;
    let var_s = s2;
    let t = var_c + var_s;
    let u = var_n * t / (1.0 - t);
    DensePhase {
        n_bar,
        var_n,
        cos_mean,
        var_c,
        var_s,
        t,
        u,
        d_u: u - 0.5,
        antibunch: var_n - n_bar,
    }
}

fn normalized(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x = (*x / total).sqrt());
    w
}

/// Weights from `w_0 = 1` and `w_{n+1}/w_n = ratio(n)`, normalized by their sum.
fn by_ratio(len: usize, ratio: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut w = vec![1.0];
    for n in 0..len - 1 {
        let next = w[n] * ratio(n);
        w.push(next);
    }
    normalized(w)
}

pub fn bs_amplitudes(p: f64, m: usize) -> Vec<f64> {
    let mf = m as f64;
    by_ratio(m + 1, |n| {
        (mf - n as f64) / (n as f64 + 1.0) * p / (1.0 - p)
    })
}

pub fn gbs_amplitudes(alpha: f64, beta: f64, big_n: usize) -> Vec<f64> {
    let nf = big_n as f64;
    by_ratio(big_n + 1, |n| {
        let n = n as f64;
        (alpha + 1.0 + n) / (n + 1.0) * (nf - n) / (beta + nf - n)
    })
}

pub fn hs_amplitudes(l: f64, m: usize, p: f64) -> Vec<f64> {
    let (a, b, mf) = (l * p, l * (1.0 - p), m as f64);
    by_ratio(m + 1, |n| {
        let n = n as f64;
        (a - n) / (n + 1.0) * (mf - n) / (b - mf + n + 1.0)
    })
}

/// Exact (unrenormalized) amplitudes `c_0..c_{n_max}`.
pub fn nbs_amplitudes(p: f64, m: usize, n_max: usize) -> Vec<f64> {
    let mut w = vec![0.0; n_max + 1];
    if m > n_max {
        return w;
    }
    w[m] = p.powi(m as i32 + 1);
    for n in m..n_max {
        w[n + 1] = w[n] * (n as f64 + 1.0) / (n as f64 + 1.0 - m as f64) * (1.0 - p);
    }
    w.into_iter().map(f64::sqrt).collect()
}

/// `L_m(−x) = Σ_k C(m,k) xᵏ/k!`
pub fn laguerre_neg(m: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut total = 1.0;
    for k in 0..m {
        term *= (m - k) as f64 / ((k + 1) * (k + 1)) as f64 * x;
        total += term;
    }
    total
}

pub fn pacs_amplitudes(alpha: f64, m: usize, n_max: usize) -> Vec<f64> {
    let mut c = vec![0.0; n_max + 1];
    if m > n_max {
        return c;
    }
    let a2 = alpha * alpha;
    c[m] = (-a2 / 2.0).exp() / laguerre_neg(m, a2).sqrt();
    for n in m..n_max {
        c[n + 1] = c[n] * alpha * (n as f64 + 1.0).sqrt() / (n as f64 + 1.0 - m as f64);
    }
    c
}

pub fn coherent_amplitudes(alpha: f64, n_max: usize) -> Vec<f64> {
    pacs_amplitudes(alpha, 0, n_max)
}

/// Reference amplitudes for `spec`, on the same support as `state`.
pub fn reference_amplitudes(spec: &StateSpec, state: &FockState) -> Vec<f64> {
    let n_max = state.n_max();
    match spec.params {
        StateParams::Binomial { p, m } => bs_amplitudes(p, m),
        StateParams::GeneralizedBinomial { alpha, beta, n } => gbs_amplitudes(alpha, beta, n),
        StateParams::NegativeBinomial { p, m } => nbs_amplitudes(p, m, n_max),
        StateParams::Hypergeometric { l, m, p } => hs_amplitudes(l, m, p),
        StateParams::PhotonAddedCoherent { alpha, m } => pacs_amplitudes(alpha, m, n_max),
        StateParams::Coherent { alpha } => coherent_amplitudes(alpha, n_max),
    }
}

fn steps(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

/// Parameter points across all five families (coherent excluded), with the
/// hypergeometric points restricted to `Lp ≥ M`, `L(1−p) ≥ M`.
pub fn validation_grid() -> Vec<StateSpec> {
    let mut grid = Vec::new();
    for m in [1, 2, 3, 5, 8, 12, 20] {
        for p in steps(0.05, 0.95, 0.1) {
            grid.push(StateParams::Binomial { p, m });
        }
    }
    let ab = [-0.5, 0.0, 0.5, 2.0, 5.0, 10.0];
    for n in [1, 3, 6, 10] {
        for alpha in ab {
            for beta in ab {
                grid.push(StateParams::GeneralizedBinomial { alpha, beta, n });
            }
        }
    }
    for m in 0..=5 {
        for p in steps(0.1, 0.9, 0.1) {
            grid.push(StateParams::NegativeBinomial { p, m });
        }
    }
    for l in [20.0, 50.0, 200.0] {
        for m in [2, 4, 8] {
            for p in steps(0.1, 0.9, 0.1) {
                let slack = 1e-9 * m as f64;
                if l * p + slack >= m as f64 && l * (1.0 - p) + slack >= m as f64 {
                    grid.push(StateParams::Hypergeometric { l, m, p });
                }
            }
        }
    }
    for m in 0..=5 {
        for alpha in steps(0.1, 3.0, 0.1) {
            grid.push(StateParams::PhotonAddedCoherent { alpha, m });
        }
    }
    grid.into_iter().map(StateSpec::new).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
