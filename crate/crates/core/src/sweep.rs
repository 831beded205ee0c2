//! Parameter sweeps over one family and CSV emission.
//!
//! Grid points are evaluated in parallel and written in lexicographic order of
//! the axes (first axis outermost), so the output is byte-identical between
//! runs. A point that fails (no phase, parameters outside the domain) becomes
//! a status row with empty metric columns.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{
    Family, StateParams, StateSpec, Truncation, DEFAULT_EPSILON, DEFAULT_NMAX_CAP,
};
use crate::fock::FockState;
use crate::phase::{antibunching_witness, bp_phase_report, hoa_witness};

pub const DEFAULT_HOA_ORDERS: [usize; 2] = [2, 3];

/// Columns following the family parameters.
const METRIC_COLUMNS: [&str; 7] = ["n_bar", "var_n", "mean_a", "T", "U", "d_u", "antibunch"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(name: impl Into<String>, start: f64, stop: f64, step: f64) -> Self {
        Self {
            name: name.into(),
            start,
            stop,
            step,
        }
    }

    /// Parses `name=start:stop:step`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "axis '{s}' is not of the form name=start:stop:step"
            ))
        };
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<f64> = range
            .split(':')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        Ok(Self::new(name.trim(), start, stop, step))
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!(
                "axis '{}': step must be > 0",
                self.name
            )));
        }
        if !(self.start < self.stop && self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config(format!(
                "axis '{}': start must be < stop",
                self.name
            )));
        }
        Ok(())
    }

    /// `start + k·step` for every `k` that stays within `stop` (with a small
    /// allowance for rounding in `step`).
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_nmax_cap() -> usize {
    DEFAULT_NMAX_CAP
}

fn default_hoa_orders() -> Vec<usize> {
    DEFAULT_HOA_ORDERS.to_vec()
}

/// Sweep description; also the schema of the TOML config file.
///
/// ```toml
/// family = "binomial"
/// epsilon = 1e-12
/// hoa_orders = [2, 3]
///
/// [params]
/// M = 10
///
/// [[axes]]
/// name = "p"
/// start = 0.02
/// stop = 0.98
/// step = 0.02
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Family,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_nmax_cap")]
    pub nmax_cap: usize,
    #[serde(default = "default_hoa_orders")]
    pub hoa_orders: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            params: BTreeMap::new(),
            axes: Vec::new(),
            epsilon: DEFAULT_EPSILON,
            nmax_cap: DEFAULT_NMAX_CAP,
            hoa_orders: default_hoa_orders(),
            output: None,
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn axis(mut self, name: &str, start: f64, stop: f64, step: f64) -> Self {
        self.axes.push(Axis::new(name, start, stop, step));
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation {
            epsilon: self.epsilon,
            nmax_cap: self.nmax_cap,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let names = self.family.param_names();
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!(
                "a sweep needs 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            axis.validate()?;
            if !names.contains(&axis.name.as_str()) {
                return Err(Error::Config(format!(
                    "axis '{}' is not a parameter of {} (expected one of {names:?})",
                    axis.name, self.family
                )));
            }
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return Err(Error::Config(format!("axis '{}' given twice", axis.name)));
            }
        }
        for name in names {
            let swept = self.axes.iter().any(|a| a.name == *name);
            if !swept && !self.params.contains_key(*name) {
                return Err(Error::Config(format!(
                    "parameter '{name}' is neither fixed nor swept"
                )));
            }
        }
        if let Some(l) = self.hoa_orders.iter().find(|&&l| l < 2) {
            return Err(Error::Config(format!(
                "higher-order antibunching order {l} must be ≥ 2"
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Parameter maps for every grid point, first axis outermost.
    pub fn grid(&self) -> Result<Vec<BTreeMap<String, f64>>> {
        self.validate()?;
        let mut points = vec![self.params.clone()];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|base| {
                    values.iter().map(move |&v| {
                        let mut p = base.clone();
                        p.insert(axis.name.clone(), v);
                        p
                    })
                })
                .collect();
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    PhaseUndefined,
    DomainError,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::PhaseUndefined => "phase_undefined",
            RowStatus::DomainError => "domain_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowMetrics {
    pub n_bar: f64,
    pub var_n: f64,
    pub mean_a: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub d_u: f64,
    pub antibunch: f64,
    /// One value per configured order, in order.
    pub hoa: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// Family parameters in [`Family::param_names`] order.
    pub params: Vec<f64>,
    pub metrics: Option<RowMetrics>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub family: Family,
    pub hoa_orders: Vec<usize>,
    pub rows: Vec<SweepRow>,
}

/// Metrics for one state; the vector is padded so every requested order is
/// in range (padding does not change any moment).
pub fn evaluate_state(state: &FockState, hoa_orders: &[usize]) -> Result<RowMetrics> {
    let top = hoa_orders.iter().copied().max().unwrap_or(0);
    let state = if top > state.n_max() {
        state.padded(top)
    } else {
        state.clone()
    };
    let report = bp_phase_report(&state)?;
    let hoa = hoa_orders
        .iter()
        .map(|&l| hoa_witness(&state, l))
        .collect::<Result<_>>()?;
    Ok(RowMetrics {
        n_bar: report.n_bar,
        var_n: report.photon_variance,
        mean_a: report.mean_a,
        t: report.total_phase_noise,
        u: report.u_value,
        d_u: report.d_u,
        antibunch: antibunching_witness(&state),
        hoa,
    })
}

fn evaluate_point(family: Family, point: &BTreeMap<String, f64>, config: &SweepConfig) -> SweepRow {
    let values: Vec<f64> = family.param_names().iter().map(|n| point[*n]).collect();
    let outcome = StateParams::from_map(family, point)
        .map(|p| StateSpec::new(p).with_truncation(config.truncation()))
        .and_then(|spec| spec.state())
        .and_then(|state| evaluate_state(&state, &config.hoa_orders));
    let (metrics, status) = match outcome {
        Ok(m) => (Some(m), RowStatus::Ok),
        Err(Error::PhaseUndefined { .. }) => (None, RowStatus::PhaseUndefined),
        Err(_) => (None, RowStatus::DomainError),
    };
    SweepRow {
        params: values,
        metrics,
        status,
    }
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    let grid = config.grid()?;
    let rows = grid
        .par_iter()
        .map(|p| evaluate_point(config.family, p, config))
        .collect();
    Ok(SweepTable {
        family: config.family,
        hoa_orders: config.hoa_orders.clone(),
        rows,
    })
}

/// Shortest `%.12g`-style rendering: 12 significant digits, trailing zeros
/// dropped, scientific notation outside `1e-5 ≤ |x| < 1e12`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&exp) {
        let s = format!("{x:.11e}");
        let (mantissa, e) = s.split_once('e').unwrap();
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl SweepTable {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["family".to_string()];
        h.extend(self.family.param_names().iter().map(|s| s.to_string()));
        h.extend(METRIC_COLUMNS.iter().map(|s| s.to_string()));
        h.extend(self.hoa_orders.iter().map(|l| format!("hoa{l}")));
        h.push("status".into());
        h
    }

    fn record(&self, row: &SweepRow) -> Vec<String> {
        let mut r = vec![self.family.tag().to_string()];
        r.extend(row.params.iter().map(|&v| format_float(v)));
        match &row.metrics {
            Some(m) => {
                r.extend(
                    [m.n_bar, m.var_n, m.mean_a, m.t, m.u, m.d_u, m.antibunch].map(format_float),
                );
                r.extend(m.hoa.iter().map(|&v| format_float(v)));
            }
            None => r.extend(std::iter::repeat_n(
                String::new(),
                METRIC_COLUMNS.len() + self.hoa_orders.len(),
            )),
        }
        r.push(row.status.as_str().into());
        r
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.header())?;
        for row in &self.rows {
            w.write_record(self.record(row))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Aligned plain-text table.
    pub fn to_human(&self) -> String {
        let header = self.header();
        let records: Vec<Vec<String>> = self.rows.iter().map(|r| self.record(r)).collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                records
                    .iter()
                    .map(|r| r[i].len())
                    .chain([header[i].len()])
                    .max()
                    .unwrap()
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = line(&header);
        for r in &records {
            out.push('\n');
            out.push_str(&line(r));
        }
        out.push('\n');
        out
    }

    pub fn ok_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows
            .iter()
            .filter(|r| r.status == RowStatus::Ok)
            .count() as f64
            / self.rows.len() as f64
    }
}

/// Preset sweeps for the five figure data sets.
///
/// The ranges are representative choices:
///
/// | id | family | fixed | axes |
/// |----|--------|-------|------|
/// | 1 | binomial | | `M` 2..20 step 2, `p` 0.02..0.98 step 0.02 |
/// | 2 | gbs | `N` = 10 | `alpha` 0..20 step 1, `beta` 0..20 step 1 |
/// | 3 | pacs | | `m` 0..3, `alpha` 0.1..2 step 0.05 |
/// | 4 | nbs | | `M` 0..5, `p` 0.2..0.9 step 0.01 |
/// | 5 | hs | `L` = 100, `M` = 10 | `p` 0.1..0.9 step 0.01 |
pub fn figure_preset(id: u32) -> Result<SweepConfig> {
    Ok(match id {
        1 => SweepConfig::new(Family::Binomial)
            .axis("M", 2.0, 20.0, 2.0)
            .axis("p", 0.02, 0.98, 0.02),
        2 => SweepConfig::new(Family::GeneralizedBinomial)
            .param("N", 10.0)
            .axis("alpha", 0.0, 20.0, 1.0)
            .axis("beta", 0.0, 20.0, 1.0),
        3 => SweepConfig::new(Family::PhotonAddedCoherent)
            .axis("m", 0.0, 3.0, 1.0)
            .axis("alpha", 0.1, 2.0, 0.05),
        4 => SweepConfig::new(Family::NegativeBinomial)
            .axis("M", 0.0, 5.0, 1.0)
            .axis("p", 0.2, 0.9, 0.01),
        5 => SweepConfig::new(Family::Hypergeometric)
            .param("L", 100.0)
            .param("M", 10.0)
            .axis("p", 0.1, 0.9, 0.01),
        _ => return Err(Error::UnknownFigure(id)),
    })
}

/// Result of re-reading an emitted CSV and checking every `ok` row.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CsvValidation {
    pub rows: usize,
    pub ok_rows: usize,
    pub violations: Vec<String>,
}

impl CsvValidation {
    pub fn ok_fraction(&self) -> f64 {
        if self.rows == 0 {
            0.0
        } else {
            self.ok_rows as f64 / self.rows as f64
        }
    }
}

/// Checks the phase-metric invariants on the rows of a sweep CSV.
///
/// Values are rounded to 12 significant digits on output, so comparisons
/// carry a matching relative slack.
pub fn validate_csv<R: Read>(reader: R) -> Result<CsvValidation> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("CSV has no '{name}' column")))
    };
    let metric_cols: Vec<usize> = METRIC_COLUMNS
        .iter()
        .map(|c| col(c))
        .collect::<Result<_>>()?;
    let hoa_cols: Vec<(String, usize)> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("hoa"))
        .map(|(i, h)| (h.to_string(), i))
        .collect();
    let status_col = col("status")?;

    let mut out = CsvValidation::default();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        out.rows += 1;
        let status = &record[status_col];
        let cells: Vec<usize> = metric_cols
            .iter()
            .copied()
            .chain(hoa_cols.iter().map(|(_, i)| *i))
            .collect();
        if status != "ok" {
            if cells.iter().any(|&i| !record[i].is_empty()) {
                out.violations
                    .push(format!("row {line}: status {status} but metrics present"));
            }
            continue;
        }
        out.ok_rows += 1;
        let parsed: Vec<f64> = cells
            .iter()
            .map(|&i| record[i].parse::<f64>().unwrap_or(f64::NAN))
            .collect();
        if parsed.iter().any(|v| !v.is_finite()) {
            out.violations
                .push(format!("row {line}: non-finite metric"));
            continue;
        }
        let [n_bar, var_n, mean_a, t, u, d_u, antibunch] = parsed[..7] else {
            unreachable!()
        };
        let slack = |x: f64| 1e-10 * x.abs().max(1.0);
        let mut fail = |msg: String| out.violations.push(format!("row {line}: {msg}"));
        if n_bar < 0.0 || var_n < -slack(n_bar * n_bar) {
            fail(format!(
                "negative photon statistics (n_bar={n_bar}, var_n={var_n})"
            ));
        }
        if mean_a * mean_a > n_bar + slack(n_bar) {
            fail(format!(
                "<a>² = {} exceeds n_bar = {n_bar}",
                mean_a * mean_a
            ));
        }
        if !(t > 0.0 && t < 1.0) {
            fail(format!("T = {t} outside (0, 1)"));
        }
        if u < 0.25 - slack(u) {
            fail(format!("U = {u} below 1/4"));
        }
        if (d_u - (u - 0.5)).abs() > slack(u) {
            fail(format!("d_u = {d_u} but U − ½ = {}", u - 0.5));
        }
        if d_u < -1e-12 && antibunch >= 0.0 {
            fail(format!(
                "d_u = {d_u} < 0 without antibunching ({antibunch})"
            ));
        }
        if let Some(pos) = hoa_cols.iter().position(|(h, _)| h == "hoa2") {
            let hoa2 = parsed[7 + pos];
            if (hoa2 - antibunch).abs() > slack(n_bar * n_bar) {
                fail(format!(
                    "hoa2 = {hoa2} differs from antibunch = {antibunch}"
                ));
            }
        }
    }
    Ok(out)
}
