//! Preset sweeps behind `astars figure <id>`.
//!
//! Axis ranges are not tabulated in the source material; every preset uses
//! the default budget grid or a plausible range and flags its rows with
//! `range_approximated`.

use astars_core::analytic::MetricKind;
use astars_core::model::{dbm_to_watts, NetworkConfig};
use astars_core::montecarlo::Scheme;

use crate::error::{CliError, Result};
use crate::sweep::{grid, Axis, AxisValue, Operating, SweepSpec};

pub const FIGURE_IDS: [&str; 11] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6", "fig8a",
    "fig8b",
];

const NOTE: Option<&str> = Some("range_approximated");

#[derive(Debug, Clone)]
pub struct FigureRun {
    /// Subdirectory name; empty for single-run figures.
    pub name: String,
    pub config: NetworkConfig,
    pub spec: SweepSpec,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub id: &'static str,
    pub title: &'static str,
    pub runs: Vec<FigureRun>,
}

fn scalars(v: &[f64]) -> Vec<AxisValue> {
    v.iter().map(|&x| AxisValue::Scalar(x)).collect()
}

fn budget_spec(metrics: &[MetricKind], schemes: &[Scheme]) -> SweepSpec {
    let g = grid(0.0, 50.0, 2.5).expect("static grid");
    SweepSpec {
        schemes: schemes.to_vec(),
        note: NOTE,
        ..SweepSpec::budget(&g, metrics)
    }
}

fn single(config: &NetworkConfig, spec: SweepSpec) -> Vec<FigureRun> {
    vec![FigureRun {
        name: String::new(),
        config: config.clone(),
        spec,
    }]
}

/// Resolves a figure id (aliases `fig7a`/`fig7b` map to `fig8a`/`fig8b`).
pub fn preset(id: &str, base: &NetworkConfig) -> Result<Figure> {
    use MetricKind::*;
    use Scheme::*;
    let id = match id {
        "fig7a" => "fig8a",
        "fig7b" => "fig8b",
        other => other,
    };
    let rate_cfg = NetworkConfig {
        a_r: 0.2,
        a_t: 0.8,
        ..base.clone()
    };
    let fig = match id {
        "fig2a" => Figure {
            id: "fig2a",
            title: "Outage probability versus system power budget",
            runs: single(
                base,
                budget_spec(&[OutageR, OutageT], &[AstarsNoma, AstarsOma]),
            ),
        },
        "fig2b" => Figure {
            id: "fig2b",
            title: "Outage probability versus BS transmit power, L = 3, 6, 9",
            runs: [3usize, 6, 9]
                .iter()
                .map(|&l| FigureRun {
                    name: format!("L{l}"),
                    config: NetworkConfig {
                        num_elements: l,
                        ..base.clone()
                    },
                    spec: SweepSpec {
                        axis: Axis::PsDbm,
                        ..budget_spec(&[OutageR, OutageT], &[AstarsNoma])
                    },
                })
                .collect(),
        },
        "fig3a" => Figure {
            id: "fig3a",
            title: "Outage probability versus number of elements",
            runs: single(
                &NetworkConfig {
                    amp_lambda: 10.0,
                    noise_sigma_s2: dbm_to_watts(-30.0),
                    ..base.clone()
                },
                SweepSpec {
                    axis: Axis::NumElements,
                    values: scalars(&grid(2.0, 40.0, 2.0)?),
                    operating: Operating::BudgetDbm(20.0),
                    ..budget_spec(&[OutageR, OutageT, OutageSystem], &[AstarsNoma, PstarsNoma])
                },
            ),
        },
        "fig3b" => Figure {
            id: "fig3b",
            title: "System outage probability versus system power budget",
            runs: single(
                base,
                budget_spec(&[OutageSystem], &[AstarsNoma, AstarsOma, PstarsNoma]),
            ),
        },
        "fig4a" => {
            let mut values = Vec::new();
            for b in grid(0.1, 0.9, 0.1)? {
                for a in grid(0.05, 0.45, 0.05)? {
                    values.push(AxisValue::Pair(
                        (b * 100.0).round() / 100.0,
                        (a * 100.0).round() / 100.0,
                    ));
                }
            }
            Figure {
                id: "fig4a",
                title: "System outage probability versus beta_r and a_r",
                runs: single(
                    base,
                    SweepSpec {
                        axis: Axis::BetaRAr,
                        values,
                        operating: Operating::BudgetDbm(20.0),
                        ..budget_spec(&[OutageSystem], &[AstarsNoma])
                    },
                ),
            }
        }
        "fig4b" => Figure {
            id: "fig4b",
            title: "System outage probability versus amplification factor",
            runs: [35.0, 25.0]
                .iter()
                .map(|&d| FigureRun {
                    name: format!("D{d}"),
                    config: NetworkConfig {
                        radius_d: d,
                        noise_sigma_s2: dbm_to_watts(-50.0),
                        ..base.clone()
                    },
                    spec: SweepSpec {
                        axis: Axis::AmpLambda,
                        values: scalars(&grid(2.0, 40.0, 2.0).expect("static grid")),
                        operating: Operating::TransmitDbm(25.0),
                        ..budget_spec(&[OutageSystem], &[AstarsNoma])
                    },
                })
                .collect(),
        },
        "fig5a" => Figure {
            id: "fig5a",
            title: "Ergodic data rate versus system power budget, active and passive",
            runs: single(
                &rate_cfg,
                budget_spec(&[RateR, RateT], &[AstarsNoma, PstarsNoma]),
            ),
        },
        "fig5b" => Figure {
            id: "fig5b",
            title: "Ergodic data rate versus system power budget, NOMA and OMA",
            runs: single(
                &rate_cfg,
                budget_spec(&[RateR, RateT], &[AstarsNoma, AstarsOma]),
            ),
        },
        "fig6" => Figure {
            id: "fig6",
            title: "Ergodic data rate versus system power budget, alpha = 2, 2.5, 3",
            runs: [2.0, 2.5, 3.0]
                .iter()
                .map(|&alpha| FigureRun {
                    name: format!("alpha{alpha}"),
                    config: NetworkConfig {
                        path_alpha: alpha,
                        ..rate_cfg.clone()
                    },
                    spec: budget_spec(&[RateR, RateT], &[AstarsNoma]),
                })
                .collect(),
        },
        "fig8a" => Figure {
            id: "fig8a",
            title: "System throughput versus system power budget, delay-limited",
            runs: single(
                base,
                budget_spec(&[ThroughputLimited], &[AstarsNoma, AstarsOma, PstarsNoma]),
            ),
        },
        "fig8b" => {
            let tolerant = NetworkConfig {
                path_alpha: 2.3,
                ..rate_cfg.clone()
            };
            let variants = [
                ("reference", tolerant.clone()),
                (
                    "sigma_re2_-80",
                    NetworkConfig {
                        noise_sigma_re2: dbm_to_watts(-80.0),
                        ..tolerant.clone()
                    },
                ),
                (
                    "sigma_s2_-60",
                    NetworkConfig {
                        noise_sigma_s2: dbm_to_watts(-60.0),
                        ..tolerant.clone()
                    },
                ),
            ];
            Figure {
                id: "fig8b",
                title: "System throughput versus system power budget, delay-tolerant",
                runs: variants
                    .into_iter()
                    .map(|(name, config)| FigureRun {
                        name: name.to_string(),
                        config,
                        spec: budget_spec(&[ThroughputTolerant], &[AstarsNoma]),
                    })
                    .collect(),
            }
        }
        other => {
            return Err(CliError::config(
                "figure",
                format!(
                    "unknown id `{other}`; expected one of {}",
                    FIGURE_IDS.join(", ")
                ),
            ))
        }
    };
    Ok(fig)
}
