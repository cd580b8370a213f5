//! Flat `key = value` sweep configuration.
//!
//! ```text
//! # reference relay, outage against SNR
//! axis = snr_db
//! values = 0:2:20
//! series = max_rounds
//! series_values = 1, 2, 4
//! metrics = outage, no_relay
//! rate_r1 = 2
//! ```
//!
//! `values` takes a comma list or an inclusive `start:step:stop` range.
//! Later assignments win, so command-line overrides are applied as extra
//! lines after the file.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use harq_core::sim::SrdModel;
use harq_core::{BaselinePower, ContourConfig, LinkProfile, ScenarioParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{origin}:{line}: `{field}`: {message}")]
pub struct ConfigError {
    pub origin: String,
    pub line: usize,
    pub field: String,
    pub message: String,
}

/// Scenario coordinate that a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    SnrDb,
    RateR1,
    MaxRounds,
    ArrivalRate,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::SnrDb, Axis::RateR1, Axis::MaxRounds, Axis::ArrivalRate];

    pub fn name(&self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::RateR1 => "rate_r1",
            Axis::MaxRounds => "max_rounds",
            Axis::ArrivalRate => "arrival_rate",
        }
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown axis `{s}` (snr_db, rate_r1, max_rounds, arrival_rate)"))
    }
}

/// Metric groups; each expands to a fixed set of columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Outage,
    NoRelay,
    Oracle,
    AvgTx,
    AvgRate,
    EnergyEff,
    Waiting,
    Sojourn,
    Mc,
    Queue,
}

impl Metric {
    pub const ALL: [Metric; 10] = [
        Metric::Outage,
        Metric::NoRelay,
        Metric::Oracle,
        Metric::AvgTx,
        Metric::AvgRate,
        Metric::EnergyEff,
        Metric::Waiting,
        Metric::Sojourn,
        Metric::Mc,
        Metric::Queue,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Outage => "outage",
            Metric::NoRelay => "no_relay",
            Metric::Oracle => "oracle",
            Metric::AvgTx => "avg_tx",
            Metric::AvgRate => "avg_rate",
            Metric::EnergyEff => "energy_eff",
            Metric::Waiting => "waiting",
            Metric::Sojourn => "sojourn",
            Metric::Mc => "mc",
            Metric::Queue => "queue",
        }
    }

    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            Metric::Outage => &["outage_exact", "outage_bound"],
            Metric::NoRelay => &["outage_no_relay"],
            Metric::Oracle => &["oracle_outage"],
            Metric::AvgTx => &["avg_tx_exact", "avg_tx_bound"],
            Metric::AvgRate => &["avg_rate_exact", "avg_rate_bound"],
            Metric::EnergyEff => &["energy_eff_exact", "energy_eff_bound"],
            Metric::Waiting => &["waiting_exact", "waiting_bound"],
            Metric::Sojourn => &["sojourn_exact", "sojourn_bound"],
            Metric::Mc => &["mc_outage", "mc_outage_se", "mc_avg_tx", "mc_avg_tx_se"],
            Metric::Queue => &["mc_waiting", "mc_waiting_se", "mc_sojourn", "mc_sojourn_se"],
        }
    }
}

impl FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Metric::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Metric::ALL.iter().map(|m| m.name()).collect();
            format!("unknown metric `{s}` ({})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            _ => Err(format!("unknown format `{s}` (csv, jsonl)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        })
    }
}

/// Fixed scenario values before the axis and series are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Base {
    pub mean_sd: f64,
    pub mean_sr: f64,
    pub mean_rd: f64,
    pub power: f64,
    pub snr_db: f64,
    pub rate_r1: f64,
    pub max_rounds: usize,
    pub frame_time: f64,
    pub arrival_rate: f64,
}

impl Default for Base {
    fn default() -> Self {
        Self {
            mean_sd: 0.1,
            mean_sr: 0.3,
            mean_rd: 0.5,
            power: 1.0,
            snr_db: 10.0,
            rate_r1: 1.0,
            max_rounds: 3,
            frame_time: 1.0,
            arrival_rate: 0.01,
        }
    }
}

impl Base {
    pub fn with(&self, axis: Axis, v: f64) -> Base {
        let mut b = *self;
        match axis {
            Axis::SnrDb => b.snr_db = v,
            Axis::RateR1 => b.rate_r1 = v,
            Axis::MaxRounds => b.max_rounds = v as usize,
            Axis::ArrivalRate => b.arrival_rate = v,
        }
        b
    }

    pub fn params(&self) -> harq_core::Result<ScenarioParams> {
        let profile = LinkProfile::new(self.mean_sd, self.mean_sr, self.mean_rd, self.power, self.snr_db)?;
        ScenarioParams::new(profile, self.rate_r1, self.max_rounds, self.frame_time, self.arrival_rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub series: Option<(Axis, Vec<f64>)>,
    pub metrics: Vec<Metric>,
    pub base: Base,
    pub trials: u64,
    pub seed: u64,
    pub packets: usize,
    pub replications: usize,
    pub baseline: BaselinePower,
    pub srd: SrdModel,
    pub contour: ContourConfig,
    pub noise_limit: f64,
    pub oracle_tol: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: Axis::SnrDb,
            values: Vec::new(),
            series: None,
            metrics: Vec::new(),
            base: Base::default(),
            trials: 100_000,
            seed: 1,
            packets: 20_000,
            replications: 8,
            baseline: BaselinePower::PerNode,
            srd: SrdModel::MinBound,
            contour: ContourConfig::default(),
            noise_limit: 1e-8,
            oracle_tol: 1e-7,
            format: Format::Csv,
            output: None,
        }
    }
}

/// One `key = value` assignment with its source position.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub origin: String,
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits config text into entries; blank lines and `#` comments are
/// skipped.
pub fn entries(text: &str, origin: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError {
            origin: origin.into(),
            line: i + 1,
            field: line.into(),
            message: "expected `key = value`".into(),
        })?;
        out.push(Entry { origin: origin.into(), line: i + 1, key: k.trim().into(), value: v.trim().into() });
    }
    Ok(out)
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let nums: Vec<f64> =
            parts.iter().map(|p| p.parse::<f64>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let (a, step, b) = (nums[0], nums[1], nums[2]);
        if step.is_nan() || step <= 0.0 || b < a {
            return Err("range needs step > 0 and stop >= start".into());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        if n > 100_000 {
            return Err("range has too many points".into());
        }
        return Ok((0..=n).map(|i| a + i as f64 * step).collect());
    }
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", p.trim()))).collect()
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse::<T>().map_err(|e| format!("`{s}`: {e}"))
}

impl SweepConfig {
    /// Builds a config from the entries in order; later keys override.
    pub fn from_entries(list: &[Entry]) -> Result<SweepConfig, ConfigError> {
        let mut c = SweepConfig::default();
        let mut series_axis: Option<(Axis, &Entry)> = None;
        let mut series_values: Option<(Vec<f64>, &Entry)> = None;
        let mut values_at: Option<&Entry> = None;
        let mut metrics_at: Option<&Entry> = None;
        for e in list {
            let fail =
                |message: String| ConfigError { origin: e.origin.clone(), line: e.line, field: e.key.clone(), message };
            let v = e.value.as_str();
            match e.key.as_str() {
                "axis" => c.axis = v.parse().map_err(fail)?,
                "values" => {
                    c.values = parse_list(v).map_err(fail)?;
                    values_at = Some(e);
                }
                "series" => {
                    series_axis = if v.is_empty() || v == "none" { None } else { Some((v.parse().map_err(fail)?, e)) }
                }
                "series_values" => series_values = Some((parse_list(v).map_err(fail)?, e)),
                "metrics" => {
                    c.metrics = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::parse)
                        .collect::<Result<_, _>>()
                        .map_err(fail)?;
                    metrics_at = Some(e);
                }
                "mean_sd" => c.base.mean_sd = parse_num(v).map_err(fail)?,
                "mean_sr" => c.base.mean_sr = parse_num(v).map_err(fail)?,
                "mean_rd" => c.base.mean_rd = parse_num(v).map_err(fail)?,
                "power" => c.base.power = parse_num(v).map_err(fail)?,
                "snr_db" => c.base.snr_db = parse_num(v).map_err(fail)?,
                "rate_r1" => c.base.rate_r1 = parse_num(v).map_err(fail)?,
                "max_rounds" => c.base.max_rounds = parse_num(v).map_err(fail)?,
                "frame_time" => c.base.frame_time = parse_num(v).map_err(fail)?,
                "arrival_rate" => c.base.arrival_rate = parse_num(v).map_err(fail)?,
                "trials" => c.trials = parse_num(v).map_err(fail)?,
                "seed" => c.seed = parse_num(v).map_err(fail)?,
                "packets" => c.packets = parse_num(v).map_err(fail)?,
                "replications" => c.replications = parse_num(v).map_err(fail)?,
                "baseline" => {
                    c.baseline = match v {
                        "per_node" => BaselinePower::PerNode,
                        "total_energy" => BaselinePower::TotalEnergy,
                        _ => return Err(fail(format!("unknown baseline `{v}` (per_node, total_energy)"))),
                    }
                }
                "srd" => {
                    c.srd = match v {
                        "min" => SrdModel::MinBound,
                        "exact" => SrdModel::Exact,
                        _ => return Err(fail(format!("unknown relay SNR model `{v}` (min, exact)"))),
                    }
                }
                "tail_tol" => c.contour.tail_tol = parse_num(v).map_err(fail)?,
                "half_extent" => c.contour.half_extent = parse_num(v).map_err(fail)?,
                "abscissa" => c.contour.abscissa = if v == "auto" { None } else { Some(parse_num(v).map_err(fail)?) },
                "noise_limit" => c.noise_limit = parse_num(v).map_err(fail)?,
                "oracle_tol" => c.oracle_tol = parse_num(v).map_err(fail)?,
                "format" => c.format = v.parse().map_err(fail)?,
                "output" => c.output = if v == "-" || v.is_empty() { None } else { Some(PathBuf::from(v)) },
                other => return Err(fail(format!("unknown key `{other}`"))),
            }
        }

        let at = |e: Option<&Entry>, field: &str, message: &str| {
            let (origin, line) = e.map(|e| (e.origin.clone(), e.line)).unwrap_or_else(|| ("config".into(), 0));
            ConfigError { origin, line, field: field.into(), message: message.into() }
        };
        check_axis_values(&c.values).map_err(|m| at(values_at, "values", &m))?;
        if c.metrics.is_empty() {
            return Err(at(metrics_at, "metrics", "at least one metric is required"));
        }
        match (series_axis, series_values) {
            (Some((axis, e)), Some((vals, ve))) => {
                if axis == c.axis {
                    return Err(at(Some(e), "series", "series must differ from the axis"));
                }
                check_axis_values(&vals).map_err(|m| at(Some(ve), "series_values", &m))?;
                c.series = Some((axis, vals));
            }
            (Some((_, e)), None) => return Err(at(Some(e), "series_values", "series needs series_values")),
            (None, _) => c.series = None,
        }
        if c.trials == 0 {
            return Err(at(None, "trials", "must be >= 1"));
        }
        c.contour.validate().map_err(|err| at(None, "contour", &err.to_string()))?;
        Ok(c)
    }

    pub fn parse(text: &str, origin: &str) -> Result<SweepConfig, ConfigError> {
        SweepConfig::from_entries(&entries(text, origin)?)
    }

    /// Every grid point in output order: series outer, axis inner.
    pub fn points(&self) -> Vec<Base> {
        let series: Vec<Base> = match &self.series {
            Some((axis, vals)) => vals.iter().map(|&v| self.base.with(*axis, v)).collect(),
            None => vec![self.base],
        };
        series.iter().flat_map(|b| self.values.iter().map(move |&v| b.with(self.axis, v))).collect()
    }

    /// Output columns; a pure function of the metric list.
    pub fn columns(&self) -> Vec<&'static str> {
        let mut cols: Vec<&'static str> = Axis::ALL.iter().map(|a| a.name()).collect();
        for m in &self.metrics {
            cols.extend_from_slice(m.columns());
        }
        cols.push("error");
        cols
    }
}

fn check_axis_values(v: &[f64]) -> Result<(), String> {
    if v.is_empty() {
        return Err("axis values must not be empty".into());
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("axis values must be finite".into());
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err("axis values must be strictly increasing".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges_and_lists() {
        assert_eq!(parse_list("0:5:20").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_list("1, 2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert!(parse_list("1:0:3").is_err());
    }

    #[test]
    fn later_keys_override() {
        let c = SweepConfig::parse("values = 1,2\nmetrics = outage\nseed = 3\nseed = 9\n", "t").unwrap();
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn diagnostics_carry_line_and_field() {
        let e = SweepConfig::parse("values = 1,2\n\nmetrics = outage, bogus\n", "f.cfg").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (3, "metrics"));
        let e = SweepConfig::parse("values =\nmetrics = outage\n", "f.cfg").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (1, "values"));
        let e = SweepConfig::parse("values = 2, 1\nmetrics = outage\n", "f.cfg").unwrap_err();
        assert!(e.message.contains("increasing"));
        let e = SweepConfig::parse("nonsense\n", "f.cfg").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn series_expands_outer() {
        let c = SweepConfig::parse(
            "axis = snr_db\nvalues = 0, 10\nseries = max_rounds\nseries_values = 1, 2\nmetrics = outage\n",
            "t",
        )
        .unwrap();
        let pts: Vec<(usize, f64)> = c.points().iter().map(|b| (b.max_rounds, b.snr_db)).collect();
        assert_eq!(pts, vec![(1, 0.0), (1, 10.0), (2, 0.0), (2, 10.0)]);
    }

    #[test]
    fn columns_follow_metrics() {
        let c = SweepConfig::parse("values = 1\nmetrics = mc, outage\n", "t").unwrap();
        let cols = c.columns();
        assert_eq!(cols[4], "mc_outage");
        assert_eq!(*cols.last().unwrap(), "error");
    }
}
