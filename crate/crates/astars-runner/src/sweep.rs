//! Parameter sweeps: analytic values and Monte Carlo estimates per grid point,
//! emitted as one CSV per metric.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use astars_core::analytic::{Analytic, MetricKind, SicMode};
use astars_core::exec;
use astars_core::model::{dbm_to_watts, NetworkConfig};
use astars_core::montecarlo::{budget_to_ps, simulate, Estimate, Scheme};

use crate::error::{CliError, Result};
use crate::plot;

/// Exact CSV header.
pub const CSV_HEADER: &str =
    "axis_name,axis_value,metric,mode,scheme,analytic,mc_mean,mc_ci95,trials,flag";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    QTotDbm,
    PsDbm,
    NumElements,
    AmpLambda,
    BetaRAr,
}

impl Axis {
    pub const ALL: [Axis; 5] = [
        Axis::QTotDbm,
        Axis::PsDbm,
        Axis::NumElements,
        Axis::AmpLambda,
        Axis::BetaRAr,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Axis::QTotDbm => "q_tot_dbm",
            Axis::PsDbm => "ps_dbm",
            Axis::NumElements => "num_elements",
            Axis::AmpLambda => "amp_lambda",
            Axis::BetaRAr => "beta_r_x_a_r",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.tag() == s)
    }

    fn uses_pairs(self) -> bool {
        self == Axis::BetaRAr
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisValue {
    Scalar(f64),
    /// (β_r, a_r); β_t and a_t take the complements.
    Pair(f64, f64),
}

impl AxisValue {
    pub fn label(self) -> String {
        match self {
            AxisValue::Scalar(x) => format!("{x}"),
            AxisValue::Pair(b, a) => format!("{b}:{a}"),
        }
    }
}

/// Operating power for axes that do not set it themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operating {
    /// Total budget in dBm, split by the scheme's budget model.
    BudgetDbm(f64),
    /// BS transmit power in dBm.
    TransmitDbm(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<AxisValue>,
    pub metrics: Vec<MetricKind>,
    pub modes: Vec<SicMode>,
    pub schemes: Vec<Scheme>,
    pub analytic: bool,
    pub monte_carlo: bool,
    pub operating: Operating,
    /// Extra marker appended to every row's flag column.
    pub note: Option<&'static str>,
}

/// Inclusive grid start, start+step, ..., ≤ stop.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(CliError::config("step", "step > 0 violated"));
    }
    if !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::config("stop", "stop ≥ start violated"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

impl SweepSpec {
    /// Budget sweep of `metrics` for every SIC mode on the ASTARS-NOMA link.
    pub fn budget(values: &[f64], metrics: &[MetricKind]) -> Self {
        SweepSpec {
            axis: Axis::QTotDbm,
            values: values.iter().map(|&v| AxisValue::Scalar(v)).collect(),
            metrics: metrics.to_vec(),
            modes: SicMode::ALL.to_vec(),
            schemes: vec![Scheme::AstarsNoma],
            analytic: true,
            monte_carlo: true,
            operating: Operating::BudgetDbm(30.0),
            note: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(CliError::config("grid", "nonempty grid required"));
        }
        if self.metrics.is_empty() {
            return Err(CliError::config("metrics", "at least one metric required"));
        }
        if self.modes.is_empty() {
            return Err(CliError::config("modes", "at least one SIC mode required"));
        }
        if self.schemes.is_empty() {
            return Err(CliError::config("schemes", "at least one scheme required"));
        }
        if !self.analytic && !self.monte_carlo {
            return Err(CliError::config(
                "sweep",
                "analytic and Monte Carlo both disabled",
            ));
        }
        for v in &self.values {
            match (*v, self.axis.uses_pairs()) {
                (AxisValue::Pair(b, a), true) if b > 0.0 && b < 1.0 && (0.0..=0.5).contains(&a) => {
                }
                (AxisValue::Scalar(x), false) if x.is_finite() => {
                    if self.axis == Axis::NumElements && (x < 1.0 || x.fract() != 0.0) {
                        return Err(CliError::config(
                            "num_elements",
                            format!("{x} is not a positive integer"),
                        ));
                    }
                }
                _ => {
                    return Err(CliError::config(
                        self.axis.tag(),
                        format!("grid value {} invalid for this axis", v.label()),
                    ))
                }
            }
        }
        Ok(())
    }

    fn uses_budget(&self) -> bool {
        match self.axis {
            Axis::QTotDbm => true,
            Axis::PsDbm => false,
            _ => matches!(self.operating, Operating::BudgetDbm(_)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub trials: usize,
    pub seed: u64,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis: Axis,
    pub axis_value: AxisValue,
    pub metric: MetricKind,
    /// `None` for metrics that do not depend on the SIC mode.
    pub mode: Option<SicMode>,
    pub scheme: Scheme,
    pub analytic: Option<f64>,
    pub mc: Option<Estimate>,
    pub flag: String,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

impl Row {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.axis.tag(),
            self.axis_value.label(),
            self.metric.tag(),
            self.mode.map_or("none", |m| m.tag()),
            self.scheme.tag(),
            cell(self.analytic),
            cell(self.mc.map(|e| e.mean)),
            cell(self.mc.map(|e| e.ci95_halfwidth)),
            self.mc.map(|e| e.trials.to_string()).unwrap_or_default(),
            self.flag,
        )
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Rows in grid order, then scheme, metric and mode order.
    pub rows: Vec<Row>,
}

impl SweepResult {
    pub fn rows_for(&self, metric: MetricKind) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    pub fn csv(&self, metric: MetricKind) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in self.rows_for(metric) {
            let _ = writeln!(out, "{}", r.csv_line());
        }
        out
    }
}

fn point_config(base: &NetworkConfig, axis: Axis, v: AxisValue) -> Result<NetworkConfig> {
    let mut c = base.clone();
    match (axis, v) {
        (Axis::NumElements, AxisValue::Scalar(x)) => c.num_elements = x as usize,
        (Axis::AmpLambda, AxisValue::Scalar(x)) => c.amp_lambda = x,
        (Axis::BetaRAr, AxisValue::Pair(b, a)) => {
            c.beta_r = b;
            c.beta_t = 1.0 - b;
            c.a_r = a;
            c.a_t = 1.0 - a;
        }
        _ => {}
    }
    c.validate()?;
    Ok(c)
}

fn transmit_power(
    spec: &SweepSpec,
    v: AxisValue,
    cfg: &NetworkConfig,
    scheme: Scheme,
) -> Option<f64> {
    let budget = |dbm: f64| budget_to_ps(dbm_to_watts(dbm), cfg, scheme.is_active()).ok();
    match (spec.axis, v, spec.operating) {
        (Axis::QTotDbm, AxisValue::Scalar(q), _) => budget(q),
        (Axis::PsDbm, AxisValue::Scalar(p), _) => Some(dbm_to_watts(p)),
        (_, _, Operating::BudgetDbm(q)) => budget(q),
        (_, _, Operating::TransmitDbm(p)) => Some(dbm_to_watts(p)),
    }
}

fn check_cell(metric: MetricKind, v: f64) -> Result<f64> {
    let ok = if metric.is_probability() {
        (0.0..=1.0).contains(&v)
    } else {
        v >= 0.0 && v.is_finite()
    };
    if ok {
        Ok(v)
    } else {
        Err(astars_core::Error::Integrity {
            func: "run_sweep",
            value: v,
            expected: if metric.is_probability() {
                "[0, 1]"
            } else {
                "[0, ∞)"
            },
        }
        .into())
    }
}

fn compute_point(
    base: &NetworkConfig,
    spec: &SweepSpec,
    opts: RunOptions,
    idx: usize,
) -> Result<Vec<Row>> {
    let v = spec.values[idx];
    let cfg = point_config(base, spec.axis, v)?;
    let analytic = if spec.analytic && spec.schemes.contains(&Scheme::AstarsNoma) {
        Some(Analytic::new(&cfg)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        let ps = transmit_power(spec, v, &cfg, scheme);
        let mut flags: Vec<&str> = Vec::new();
        if spec.uses_budget() {
            flags.push(if scheme.is_active() {
                "pract_expected"
            } else {
                "passive_budget"
            });
        }
        if ps.is_none() {
            flags.push("infeasible_budget");
        }
        if let Some(n) = spec.note {
            flags.push(n);
        }
        let flag = flags.join(";");
        let estimates = match ps {
            Some(p) if spec.monte_carlo => Some(simulate(&cfg, scheme, p, opts.trials, opts.seed)?),
            _ => None,
        };
        for &metric in &spec.metrics {
            let modes: Vec<Option<SicMode>> = if metric.depends_on_mode() {
                spec.modes.iter().copied().map(Some).collect()
            } else {
                vec![None]
            };
            for mode in modes {
                let m = mode.unwrap_or(SicMode::Perfect);
                let analytic_value = match (&analytic, ps, scheme) {
                    (Some(an), Some(p), Scheme::AstarsNoma) => {
                        Some(check_cell(metric, an.metric(metric, m, p)?.value)?)
                    }
                    _ => None,
                };
                let mc = match &estimates {
                    Some(set) => {
                        let e = *set.get(metric, m).expect("every metric is simulated");
                        check_cell(metric, e.mean)?;
                        Some(e)
                    }
                    None => None,
                };
                rows.push(Row {
                    axis: spec.axis,
                    axis_value: v,
                    metric,
                    mode,
                    scheme,
                    analytic: analytic_value,
                    mc,
                    flag: flag.clone(),
                });
            }
        }
    }
    Ok(rows)
}

/// Evaluates every grid point; points run concurrently, rows come back in grid order.
pub fn run_sweep(cfg: &NetworkConfig, spec: &SweepSpec, opts: RunOptions) -> Result<SweepResult> {
    cfg.validate()?;
    spec.validate()?;
    let parts = exec::map_indexed(spec.values.len(), |i| compute_point(cfg, spec, opts, i));
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes `<metric>.csv` (and `<metric>.svg` when `plots`) under `dir`.
pub fn write_outputs(
    result: &SweepResult,
    dir: &Path,
    plots: bool,
    title: &str,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for &metric in &result.spec.metrics {
        let path = dir.join(format!("{}.csv", metric.tag()));
        write_file(&path, &result.csv(metric))?;
        written.push(path);
        if plots {
            let path = dir.join(format!("{}.svg", metric.tag()));
            write_file(&path, &plot::sweep_svg(result, metric, title))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> NetworkConfig {
        NetworkConfig {
            quad_k: 40,
            quad_u: 40,
            quad_q: 40,
            cheb_n: 40,
            ..NetworkConfig::table_one()
        }
    }

    #[test]
    fn grid_is_inclusive() {
        let g = grid(0.0, 50.0, 5.0).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 50.0);
        assert_eq!(grid(0.0, 50.0, 2.5).unwrap().len(), 21);
        assert!(grid(0.0, 1.0, 0.0).is_err());
        assert!(grid(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn header_is_exact() {
        assert_eq!(
            CSV_HEADER,
            "axis_name,axis_value,metric,mode,scheme,analytic,mc_mean,mc_ci95,trials,flag"
        );
    }

    #[test]
    fn analytic_rows_and_flags() {
        let spec = SweepSpec {
            monte_carlo: false,
            ..SweepSpec::budget(&[10.0, 20.0], &[MetricKind::OutageR, MetricKind::OutageT])
        };
        let res = run_sweep(
            &quick_cfg(),
            &spec,
            RunOptions {
                trials: 1000,
                seed: 1,
            },
        )
        .unwrap();
        assert_eq!(res.rows_for(MetricKind::OutageR).count(), 4);
        assert_eq!(res.rows_for(MetricKind::OutageT).count(), 2);
        for r in &res.rows {
            assert_eq!(r.flag, "pract_expected");
            assert!(r.mc.is_none() && r.analytic.is_some());
        }
        let csv = res.csv(MetricKind::OutageT);
        let line = csv.lines().nth(1).unwrap();
        assert!(
            line.starts_with("q_tot_dbm,10,outage_t,none,astars_noma,0."),
            "{line}"
        );
        assert!(line.ends_with(",,,,pract_expected"), "{line}");
    }

    #[test]
    fn infeasible_budget_keeps_row() {
        let spec = SweepSpec {
            schemes: vec![Scheme::AstarsNoma, Scheme::PstarsNoma],
            ..SweepSpec::budget(&[-30.0, 20.0], &[MetricKind::OutageSystem])
        };
        let res = run_sweep(
            &quick_cfg(),
            &spec,
            RunOptions {
                trials: 1000,
                seed: 1,
            },
        )
        .unwrap();
        let first = res
            .rows
            .iter()
            .find(|r| r.scheme == Scheme::AstarsNoma)
            .unwrap();
        assert!(first.flag.contains("infeasible_budget"));
        assert!(first.analytic.is_none() && first.mc.is_none());
        assert!(first.csv_line().contains(",,,,"));
        let passive = res
            .rows
            .iter()
            .filter(|r| r.scheme == Scheme::PstarsNoma)
            .count();
        assert_eq!(passive, 4);
    }

    #[test]
    fn pair_axis_updates_complements() {
        let c = point_config(&quick_cfg(), Axis::BetaRAr, AxisValue::Pair(0.4, 0.2)).unwrap();
        assert_eq!((c.beta_r, c.beta_t, c.a_r, c.a_t), (0.4, 0.6, 0.2, 0.8));
        let spec = SweepSpec {
            axis: Axis::BetaRAr,
            values: vec![AxisValue::Scalar(0.3)],
            ..SweepSpec::budget(&[1.0], &[MetricKind::OutageSystem])
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn element_axis_requires_integers() {
        let spec = SweepSpec {
            axis: Axis::NumElements,
            values: vec![AxisValue::Scalar(2.5)],
            ..SweepSpec::budget(&[1.0], &[MetricKind::OutageR])
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = SweepSpec {
            schemes: vec![Scheme::AstarsNoma, Scheme::AstarsOma],
            ..SweepSpec::budget(&[15.0, 25.0], &[MetricKind::ThroughputLimited])
        };
        let opts = RunOptions {
            trials: 2000,
            seed: 9,
        };
        let a = run_sweep(&quick_cfg(), &spec, opts).unwrap();
        let b = run_sweep(&quick_cfg(), &spec, opts).unwrap();
        assert_eq!(
            a.csv(MetricKind::ThroughputLimited),
            b.csv(MetricKind::ThroughputLimited)
        );
    }
}
