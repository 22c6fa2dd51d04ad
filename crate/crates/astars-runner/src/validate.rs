//! Analytic-vs-simulation agreement gates, slope fits and ordering checks.

use std::fmt::Write as _;
use std::path::Path;

use astars_core::analytic::{Analytic, MetricKind, SicMode};
use astars_core::asymptotic::{
    ergodic_bound_r_psic, fit_order, outage_asym_r_psic, outage_asym_t, outage_floor_r_ipsic,
    top_decade, SlopeScale,
};
use astars_core::model::{cascade_cdf, dbm_to_watts, gamma_fit, NetworkConfig};
use astars_core::montecarlo::{budget_to_ps, cascade_gain_samples, Scheme};

use crate::error::{CliError, Result};
use crate::sweep::{self, grid, AxisValue, RunOptions, SweepResult, SweepSpec};

/// Probability agreement floor (absolute).
pub const OUTAGE_ABS_TOL: f64 = 0.02;
/// Binomial standard deviations allowed on top of the floor.
pub const OUTAGE_SIGMAS: f64 = 3.0;
/// Rate agreement (relative).
pub const RATE_REL_TOL: f64 = 0.03;
/// Ceiling of the transmission-user rate (absolute, bits).
pub const CEILING_TOL: f64 = 1e-3;
/// Diversity order, relative to L.
pub const DIVERSITY_REL_TOL: f64 = 0.05;
/// Zero slopes (error floor, saturated rates), absolute.
pub const ZERO_SLOPE_TOL: f64 = 0.05;
/// Floor against the finite-power outage at the top of the sweep, relative.
pub const FLOOR_REL_TOL: f64 = 0.05;
/// Unit multiplexing gain, relative.
pub const MUX_REL_TOL: f64 = 0.05;
/// Jensen bound dominance slack.
pub const JENSEN_TOL: f64 = 1e-9;
/// Sup-norm budget of the Gamma-fit cascade CDF.
pub const CDF_SUP_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub criterion: u8,
    pub name: String,
    pub observed: f64,
    pub tolerance: String,
    pub pass: bool,
}

impl Gate {
    fn new(
        criterion: u8,
        name: impl Into<String>,
        observed: f64,
        tolerance: impl Into<String>,
        pass: bool,
    ) -> Self {
        Gate {
            criterion,
            name: name.into(),
            observed,
            tolerance: tolerance.into(),
            pass,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub trials: usize,
    pub seed: u64,
    pub outage_points_dbm: Vec<f64>,
    pub rate_points_dbm: Vec<f64>,
    /// Budget grid for slope fits; fits use its top decade of transmit power.
    pub slope_grid_dbm: Vec<f64>,
    pub ordering_grid_dbm: Vec<f64>,
    pub diversity_elements: Vec<usize>,
    /// Budget at which the transmission-user rate is compared with its ceiling.
    pub ceiling_dbm: f64,
    pub cdf_samples: usize,
}

impl ValidateOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        ValidateOptions {
            trials,
            seed,
            outage_points_dbm: vec![10.0, 20.0, 30.0, 40.0],
            rate_points_dbm: vec![20.0, 30.0, 40.0],
            slope_grid_dbm: grid(0.0, 60.0, 2.5).expect("static grid"),
            ordering_grid_dbm: grid(20.0, 50.0, 2.5).expect("static grid"),
            diversity_elements: vec![2, 4],
            ceiling_dbm: 60.0,
            cdf_samples: 1_000_000,
        }
    }

    fn run(&self) -> RunOptions {
        RunOptions {
            trials: self.trials,
            seed: self.seed,
        }
    }
}

fn mode_label(mode: Option<SicMode>) -> &'static str {
    mode.map_or("", |m| m.tag())
}

fn point_label(v: AxisValue) -> String {
    format!("{}dBm", v.label())
}

/// Rate configuration: a_r = 0.2, a_t = 0.8.
pub fn rate_config(cfg: &NetworkConfig) -> NetworkConfig {
    NetworkConfig {
        a_r: 0.2,
        a_t: 0.8,
        ..cfg.clone()
    }
}

/// Outage agreement on the budget points (criterion 1).
pub fn outage_agreement(
    cfg: &NetworkConfig,
    opts: &ValidateOptions,
) -> Result<(Vec<Gate>, SweepResult)> {
    let spec = SweepSpec::budget(
        &opts.outage_points_dbm,
        &[MetricKind::OutageR, MetricKind::OutageT],
    );
    let res = sweep::run_sweep(cfg, &spec, opts.run())?;
    let mut gates = Vec::new();
    for r in &res.rows {
        let (Some(a), Some(e)) = (r.analytic, r.mc) else {
            continue;
        };
        let sigma = (e.mean * (1.0 - e.mean) / e.trials as f64).sqrt();
        let tol = OUTAGE_ABS_TOL.max(OUTAGE_SIGMAS * sigma);
        let diff = (a - e.mean).abs();
        let name = format!(
            "{}_{}@{}",
            r.metric.tag(),
            mode_label(r.mode),
            point_label(r.axis_value)
        )
        .replace("_@", "@");
        gates.push(Gate::new(
            1,
            name,
            diff,
            format!("|analytic-mc| <= {tol}"),
            diff <= tol,
        ));
    }
    Ok((gates, res))
}

/// Rate agreement and the transmission-user ceiling (criterion 3).
pub fn rate_agreement(
    cfg: &NetworkConfig,
    opts: &ValidateOptions,
) -> Result<(Vec<Gate>, SweepResult)> {
    let rcfg = rate_config(cfg);
    let spec = SweepSpec::budget(
        &opts.rate_points_dbm,
        &[MetricKind::RateR, MetricKind::RateT],
    );
    let res = sweep::run_sweep(&rcfg, &spec, opts.run())?;
    let mut gates = Vec::new();
    for r in &res.rows {
        let (Some(a), Some(e)) = (r.analytic, r.mc) else {
            continue;
        };
        let rel = (a - e.mean).abs() / e.mean.abs();
        let name = format!(
            "{}_{}@{}",
            r.metric.tag(),
            mode_label(r.mode),
            point_label(r.axis_value)
        )
        .replace("_@", "@");
        gates.push(Gate::new(
            3,
            name,
            rel,
            format!("relative <= {RATE_REL_TOL}"),
            rel <= RATE_REL_TOL,
        ));
    }
    let an = Analytic::new(&rcfg)?;
    let ps = budget_to_ps(dbm_to_watts(opts.ceiling_dbm), &rcfg, true)?;
    let ceiling = (1.0 + rcfg.a_t / rcfg.a_r).log2();
    let gap = (an.ergodic_rate_t(ps)? - ceiling).abs();
    gates.push(Gate::new(
        3,
        format!("rate_t_ceiling@{}dBm", opts.ceiling_dbm),
        gap,
        format!("|rate - log2(1+a_t/a_r)| <= {CEILING_TOL}"),
        gap <= CEILING_TOL,
    ));
    Ok((gates, res))
}

fn budget_powers(cfg: &NetworkConfig, grid_dbm: &[f64]) -> Vec<f64> {
    grid_dbm
        .iter()
        .filter_map(|&q| budget_to_ps(dbm_to_watts(q), cfg, true).ok())
        .collect()
}

fn fit_top<F: Fn(f64) -> astars_core::Result<f64>>(
    ps: &[f64],
    scale: SlopeScale,
    f: F,
) -> Result<f64> {
    let top = ps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pts = ps
        .iter()
        .filter(|&&p| p >= top / 10.0 * (1.0 - 1e-12))
        .map(|&p| Ok((p, f(p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(fit_order(&top_decade(&pts), scale)?.slope)
}

/// Diversity orders and the imperfect-SIC floor (criterion 2).
pub fn diversity(cfg: &NetworkConfig, opts: &ValidateOptions) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for &l in &opts.diversity_elements {
        let c = NetworkConfig {
            num_elements: l,
            ..cfg.clone()
        };
        let an = Analytic::new(&c)?;
        let ps = budget_powers(&c, &opts.slope_grid_dbm);
        let lf = l as f64;
        let order_tol = format!("{l} +/- {}%", DIVERSITY_REL_TOL * 100.0);
        let within = |s: f64| (s - lf).abs() <= DIVERSITY_REL_TOL * lf;

        let r = fit_top(&ps, SlopeScale::LogLog, |p| {
            an.outage_r(SicMode::Perfect, p)
        })?;
        gates.push(Gate::new(
            2,
            format!("diversity_r_psic_L{l}"),
            r,
            order_tol.clone(),
            within(r),
        ));
        let t = fit_top(&ps, SlopeScale::LogLog, |p| an.outage_t(p))?;
        gates.push(Gate::new(
            2,
            format!("diversity_t_L{l}"),
            t,
            order_tol.clone(),
            within(t),
        ));
        let i = fit_top(&ps, SlopeScale::LogLog, |p| {
            an.outage_r(SicMode::Imperfect, p)
        })?;
        gates.push(Gate::new(
            2,
            format!("diversity_r_ipsic_L{l}"),
            i,
            format!("0 +/- {ZERO_SLOPE_TOL}"),
            i.abs() <= ZERO_SLOPE_TOL,
        ));

        let top = *ps.last().expect("nonempty grid");
        let floor = outage_floor_r_ipsic(&an)?;
        let at_top = an.outage_r(SicMode::Imperfect, top)?;
        let rel = (floor - at_top).abs() / at_top;
        gates.push(Gate::new(
            2,
            format!("ipsic_floor_L{l}"),
            rel,
            format!("relative <= {FLOOR_REL_TOL}"),
            rel <= FLOOR_REL_TOL,
        ));

        // Slopes of the high-SNR expressions themselves, for comparison.
        let ar = fit_top(&ps, SlopeScale::LogLog, |p| outage_asym_r_psic(&an, p))?;
        gates.push(Gate::new(
            2,
            format!("asymptotic_expr_r_psic_L{l}"),
            ar,
            order_tol.clone(),
            within(ar),
        ));
        let at = fit_top(&ps, SlopeScale::LogLog, |p| outage_asym_t(&an, p))?;
        gates.push(Gate::new(
            2,
            format!("asymptotic_expr_t_L{l}"),
            at,
            order_tol,
            within(at),
        ));
    }
    Ok(gates)
}

/// Multiplexing gains and Jensen dominance (criterion 4).
pub fn multiplexing(cfg: &NetworkConfig, opts: &ValidateOptions) -> Result<Vec<Gate>> {
    let rcfg = rate_config(cfg);
    let an = Analytic::new(&rcfg)?;
    let ps = budget_powers(&rcfg, &opts.slope_grid_dbm);
    let mut gates = Vec::new();
    let p = fit_top(&ps, SlopeScale::SemiLogX, |x| {
        an.ergodic_rate_r(SicMode::Perfect, x)
    })?;
    gates.push(Gate::new(
        4,
        "multiplexing_r_psic",
        p,
        format!("1 +/- {}%", MUX_REL_TOL * 100.0),
        (p - 1.0).abs() <= MUX_REL_TOL,
    ));
    let i = fit_top(&ps, SlopeScale::SemiLogX, |x| {
        an.ergodic_rate_r(SicMode::Imperfect, x)
    })?;
    gates.push(Gate::new(
        4,
        "multiplexing_r_ipsic",
        i,
        format!("0 +/- {ZERO_SLOPE_TOL}"),
        i.abs() <= ZERO_SLOPE_TOL,
    ));
    let t = fit_top(&ps, SlopeScale::SemiLogX, |x| an.ergodic_rate_t(x))?;
    gates.push(Gate::new(
        4,
        "multiplexing_t",
        t,
        format!("0 +/- {ZERO_SLOPE_TOL}"),
        t.abs() <= ZERO_SLOPE_TOL,
    ));
    let mut excess = f64::NEG_INFINITY;
    for &x in &ps {
        excess =
            excess.max(an.ergodic_rate_r(SicMode::Perfect, x)? - ergodic_bound_r_psic(&an, x)?);
    }
    gates.push(Gate::new(
        4,
        "jensen_bound_dominates",
        excess,
        format!("max(exact - bound) <= {JENSEN_TOL}"),
        excess <= JENSEN_TOL,
    ));
    Ok(gates)
}

/// Scheme orderings under the matched budget model (criterion 5).
pub fn ordering(cfg: &NetworkConfig, opts: &ValidateOptions) -> Result<(Vec<Gate>, SweepResult)> {
    let spec = SweepSpec {
        schemes: vec![Scheme::AstarsNoma, Scheme::AstarsOma, Scheme::PstarsNoma],
        modes: vec![SicMode::Perfect],
        analytic: false,
        ..SweepSpec::budget(
            &opts.ordering_grid_dbm,
            &[
                MetricKind::ThroughputLimited,
                MetricKind::ThroughputTolerant,
                MetricKind::OutageSystem,
            ],
        )
    };
    let res = sweep::run_sweep(cfg, &spec, opts.run())?;
    let find = |v: AxisValue, metric: MetricKind, scheme: Scheme| {
        res.rows
            .iter()
            .find(|r| r.axis_value == v && r.metric == metric && r.scheme == scheme)
            .and_then(|r| r.mc)
    };
    // Worst CI-aware margin; ≥ 0 means the ordering holds at every point.
    let mut margins = [f64::INFINITY; 3];
    for &v in &spec.values {
        let pairs = [
            (
                MetricKind::ThroughputLimited,
                Scheme::AstarsNoma,
                Scheme::AstarsOma,
            ),
            (
                MetricKind::ThroughputTolerant,
                Scheme::AstarsNoma,
                Scheme::AstarsOma,
            ),
            (
                MetricKind::OutageSystem,
                Scheme::PstarsNoma,
                Scheme::AstarsNoma,
            ),
        ];
        for (slot, (metric, better_high, lower)) in pairs.into_iter().enumerate() {
            let (Some(hi), Some(lo)) = (find(v, metric, better_high), find(v, metric, lower))
            else {
                return Err(CliError::config(
                    "q_tot",
                    format!("budget {} infeasible for the ordering grid", v.label()),
                ));
            };
            let m = hi.mean - lo.mean + hi.ci95_halfwidth + lo.ci95_halfwidth;
            margins[slot] = margins[slot].min(m);
        }
    }
    let names = [
        "noma_ge_oma_throughput_limited",
        "noma_ge_oma_throughput_tolerant",
        "astars_le_pstars_system_outage",
    ];
    let gates = names
        .iter()
        .zip(margins)
        .map(|(n, m)| Gate::new(5, *n, m, "worst margin incl. 95% CIs >= 0", m >= 0.0))
        .collect();
    Ok((gates, res))
}

/// Largest gap between the fitted and empirical cascade CDF on the 1%..99%
/// empirical quantiles (50 points).
pub fn cascade_sup_norm(kappa: f64, num_elements: usize, samples: usize, seed: u64) -> Result<f64> {
    let mut xs = cascade_gain_samples(kappa, num_elements, samples, seed);
    xs.sort_by(|a, b| a.total_cmp(b));
    let g = gamma_fit(kappa, num_elements)?;
    let n = xs.len();
    Ok((0..50)
        .map(|i| {
            let level = 0.01 + 0.98 * i as f64 / 49.0;
            let idx = ((level * n as f64) as usize).min(n - 1);
            (cascade_cdf(g, xs[idx]) - (idx + 1) as f64 / n as f64).abs()
        })
        .fold(0.0, f64::max))
}

/// Gamma-fit approximation budget (criterion 7).
pub fn approximation_budget(opts: &ValidateOptions) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for kappa in [0.0, 0.316] {
        for l in [1usize, 4, 10] {
            let d = cascade_sup_norm(kappa, l, opts.cdf_samples, opts.seed)?;
            gates.push(Gate::new(
                7,
                format!("cascade_cdf_sup_kappa{kappa}_L{l}"),
                d,
                format!("<= {CDF_SUP_TOL}"),
                d <= CDF_SUP_TOL,
            ));
        }
    }
    Ok(gates)
}

pub fn gates_csv(gates: &[Gate]) -> String {
    let mut out = String::from("criterion,gate,observed,tolerance,verdict\n");
    for g in gates {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            g.criterion,
            g.name,
            g.observed,
            g.tolerance,
            g.verdict()
        );
    }
    out
}

pub fn render_table(gates: &[Gate]) -> String {
    let width = gates.iter().map(|g| g.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<3} {:<width$} {:>14}  {:<40} verdict\n",
        "#", "gate", "observed", "tolerance"
    );
    for g in gates {
        let _ = writeln!(
            out,
            "{:<3} {:<width$} {:>14.6e}  {:<40} {}",
            g.criterion,
            g.name,
            g.observed,
            g.tolerance,
            g.verdict()
        );
    }
    let failed = gates.iter().filter(|g| !g.pass).count();
    let _ = writeln!(out, "{} gates, {} failed", gates.len(), failed);
    out
}

/// Runs every gate; writes `gates.csv`, `report.txt` and the underlying sweep
/// CSVs under `out` when given.
pub fn run_validate(
    cfg: &NetworkConfig,
    opts: &ValidateOptions,
    out: Option<&Path>,
    plots: bool,
) -> Result<Vec<Gate>> {
    cfg.validate()?;
    let (mut gates, outage) = outage_agreement(cfg, opts)?;
    gates.extend(diversity(cfg, opts)?);
    let (rate_gates, rates) = rate_agreement(cfg, opts)?;
    gates.extend(rate_gates);
    gates.extend(multiplexing(cfg, opts)?);
    let (order_gates, order) = ordering(cfg, opts)?;
    gates.extend(order_gates);
    gates.extend(approximation_budget(opts)?);
    if let Some(dir) = out {
        for (name, res) in [
            ("agreement_outage", &outage),
            ("agreement_rate", &rates),
            ("ordering", &order),
        ] {
            sweep::write_outputs(res, &dir.join(name), plots, name)?;
        }
        let write = |file: &str, text: String| {
            let p = dir.join(file);
            std::fs::write(&p, text).map_err(|e| CliError::io(&p, e))
        };
        write("gates.csv", gates_csv(&gates))?;
        write("report.txt", render_table(&gates))?;
    }
    Ok(gates)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_table_shapes() {
        let gates = vec![
            Gate::new(1, "a", 0.5, "<= 1", true),
            Gate::new(2, "b", 2.0, "<= 1", false),
        ];
        let csv = gates_csv(&gates);
        assert_eq!(
            csv.lines().next().unwrap(),
            "criterion,gate,observed,tolerance,verdict"
        );
        assert_eq!(csv.lines().nth(2).unwrap(), "2,b,2,<= 1,FAIL");
        assert!(render_table(&gates).contains("2 gates, 1 failed"));
    }

    #[test]
    fn sup_norm_is_small_for_many_elements() {
        let d = cascade_sup_norm(0.316, 10, 20_000, 1).unwrap();
        assert!(d < 0.03, "{d}");
    }
}
