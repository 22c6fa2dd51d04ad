//! Closed-form outage probabilities, ergodic rates and throughputs.
//!
//! All evaluators average over the user position in the disk with a
//! Gauss–Chebyshev rule in χ = (x+1)D/2, over the residual-interference power
//! with Gauss–Laguerre (imperfect SIC only), and over the Gamma-fitted cascade
//! amplitude either through the incomplete gamma function (outage) or a second
//! Gauss–Laguerre rule (rates).

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::model::{GammaApprox, NetworkConfig};
use crate::numerics::{
    gamma_p, gamma_q, gauss_chebyshev_nodes, gauss_laguerre_rule, ln_gamma, QuadratureRule,
};

/// Successive interference cancellation quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SicMode {
    Perfect,
    Imperfect,
}

impl SicMode {
    pub const ALL: [SicMode; 2] = [SicMode::Perfect, SicMode::Imperfect];

    /// ε: 0 for perfect, 1 for imperfect SIC.
    pub fn epsilon(self) -> f64 {
        match self {
            SicMode::Perfect => 0.0,
            SicMode::Imperfect => 1.0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            SicMode::Perfect => "psic",
            SicMode::Imperfect => "ipsic",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psic" => Some(SicMode::Perfect),
            "ipsic" => Some(SicMode::Imperfect),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    OutageR,
    OutageT,
    OutageSystem,
    RateR,
    RateT,
    ThroughputLimited,
    ThroughputTolerant,
}

impl MetricKind {
    pub const ALL: [MetricKind; 7] = [
        MetricKind::OutageR,
        MetricKind::OutageT,
        MetricKind::OutageSystem,
        MetricKind::RateR,
        MetricKind::RateT,
        MetricKind::ThroughputLimited,
        MetricKind::ThroughputTolerant,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            MetricKind::OutageR => "outage_r",
            MetricKind::OutageT => "outage_t",
            MetricKind::OutageSystem => "outage_system",
            MetricKind::RateR => "rate_r",
            MetricKind::RateT => "rate_t",
            MetricKind::ThroughputLimited => "throughput_limited",
            MetricKind::ThroughputTolerant => "throughput_tolerant",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == s)
    }

    pub fn is_probability(self) -> bool {
        matches!(
            self,
            MetricKind::OutageR | MetricKind::OutageT | MetricKind::OutageSystem
        )
    }

    /// Whether the value depends on the SIC mode.
    pub fn depends_on_mode(self) -> bool {
        !matches!(self, MetricKind::OutageT | MetricKind::RateT)
    }
}

/// One evaluated metric at one transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPoint {
    pub ps_watts: f64,
    pub value: f64,
    pub kind: MetricKind,
}

const PROB_SLACK: f64 = 1e-9;

fn check_probability(func: &'static str, v: f64) -> Result<f64> {
    if (-PROB_SLACK..=1.0 + PROB_SLACK).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::Integrity {
            func,
            value: v,
            expected: "[0, 1]",
        })
    }
}

fn check_power(func: &'static str, ps: f64) -> Result<()> {
    if ps > 0.0 && ps.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            func,
            format!("transmit power {ps} must be positive"),
        ))
    }
}

/// Distance-averaging rule: E_d[G(d)] ≈ Σ_j w_j G(χ_j) for d with density 2d/D².
///
/// Gauss–Chebyshev nodes in χ = (x+1)D/2 with the Jacobian folded into
/// π(x+1)√(1−x²)/(2U). The h²/24 Euler–Maclaurin endpoint term at χ = D is
/// charged to the outermost node (G there differs from G(D) by O(h²)), which
/// keeps every weight positive. Weights are normalized to sum to one, so the
/// rule is a convex combination of node values.
#[derive(Debug, Clone)]
pub struct DistanceRule {
    pub chi: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DistanceRule {
    pub fn new(u: usize, radius: f64) -> Result<Self> {
        let rule = gauss_chebyshev_nodes(u)?;
        let uf = u as f64;
        let chi: Vec<f64> = rule
            .nodes
            .iter()
            .map(|&x| (x + 1.0) * radius / 2.0)
            .collect();
        let mut weights: Vec<f64> = rule
            .nodes
            .iter()
            .map(|&x| PI * (x + 1.0) * ((1.0 - x) * (1.0 + x)).sqrt() / (2.0 * uf))
            .collect();
        if u > 1 {
            weights[u - 1] -= endpoint_term(u);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(DistanceRule { chi, weights })
    }

    pub fn average<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.chi
            .iter()
            .zip(&self.weights)
            .map(|(&d, &w)| w * f(d))
            .sum()
    }

    pub fn try_average<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&d, &w) in self.chi.iter().zip(&self.weights) {
            acc += w * f(d)?;
        }
        Ok(acc)
    }
}

/// Per-distance link constants for one user side.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Link {
    /// Signal scale: received signal power is `signal * ps * X`.
    pub signal: f64,
    /// Noise after the surface: λβ η₀ d^{-α} σ_s² ζ + σ₀².
    pub noise: f64,
}

/// Closed-form evaluator with cached quadrature rules.
#[derive(Debug, Clone)]
pub struct Analytic {
    cfg: NetworkConfig,
    fit: GammaApprox,
    zeta: f64,
    dist: DistanceRule,
    /// Residual-interference rule (size K).
    lag_k: QuadratureRule,
    /// Cascade-amplitude rule (size Q) with Gamma(p,1) weights folded in.
    amp_nodes_sq: Vec<f64>,
    amp_weights: Vec<f64>,
    /// Outer Chebyshev rule for the transmission-user rate (size N).
    cheb: QuadratureRule,
}

impl Analytic {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        let fit = cfg.gamma_fit()?;
        let lag_q = gauss_laguerre_rule(cfg.quad_q)?;
        let lg = ln_gamma(fit.p);
        let amp_weights = lag_q
            .nodes
            .iter()
            .zip(&lag_q.ln_weights)
            .map(|(&x, &lw)| (lw + (fit.p - 1.0) * x.ln() - lg).exp())
            .collect();
        let amp_nodes_sq = lag_q.nodes.iter().map(|x| x * x).collect();
        Ok(Analytic {
            cfg: cfg.clone(),
            fit,
            zeta: cfg.zeta(),
            dist: DistanceRule::new(cfg.quad_u, cfg.radius_d)?,
            lag_k: gauss_laguerre_rule(cfg.quad_k)?,
            amp_nodes_sq,
            amp_weights,
            cheb: gauss_chebyshev_nodes(cfg.cheb_n)?,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn fit(&self) -> GammaApprox {
        self.fit
    }

    pub fn distance_rule(&self) -> &DistanceRule {
        &self.dist
    }

    pub fn laguerre_k(&self) -> &QuadratureRule {
        &self.lag_k
    }

    pub(crate) fn link(&self, reflect: bool, d: f64) -> Link {
        let c = &self.cfg;
        let lb = c.amp_lambda * c.beta(reflect);
        let path = c.path_eta0 * d.powf(-c.path_alpha);
        Link {
            signal: lb * c.path_eta0 * path * c.dist_bs.powf(-c.path_alpha),
            noise: lb * path * c.noise_sigma_s2 * self.zeta + c.noise_sigma_02,
        }
    }

    /// P(X ≤ x) under the Gamma fit.
    pub(crate) fn cdf(&self, x: f64) -> f64 {
        gamma_p(self.fit.p, x.sqrt() / self.fit.q).unwrap_or(1.0)
    }

    /// P(X > x) under the Gamma fit.
    pub(crate) fn ccdf(&self, x: f64) -> f64 {
        gamma_q(self.fit.p, x.sqrt() / self.fit.q).unwrap_or(0.0)
    }

    /// ∂ = γ̂_t / (a_t − γ̂_t a_r), or `None` when the SIC stage can never succeed.
    pub fn sic_ratio(&self) -> Option<f64> {
        let c = &self.cfg;
        let gt = c.gamma_hat_t();
        let den = c.a_t - gt * c.a_r;
        (den > 0.0).then(|| gt / den)
    }

    /// Outage probability of the reflection user (SIC stage or own signal fails).
    pub fn outage_r(&self, mode: SicMode, ps: f64) -> Result<f64> {
        check_power("outage_r", ps)?;
        let Some(sic) = self.sic_ratio() else {
            return Ok(1.0);
        };
        let c = &self.cfg;
        let gr = c.gamma_hat_r();
        if c.a_r == 0.0 && gr > 0.0 {
            return Ok(1.0);
        }
        let own = if gr > 0.0 { gr / c.a_r } else { 0.0 };
        let v = self.dist.average(|d| {
            let link = self.link(true, d);
            let scale = link.signal * ps;
            match mode {
                SicMode::Perfect => self.cdf(sic.max(own) * link.noise / scale),
                SicMode::Imperfect => {
                    let ri = ps * c.noise_sigma_re2;
                    self.lag_k
                        .nodes
                        .iter()
                        .zip(&self.lag_k.weights)
                        .map(|(&t, &w)| {
                            let thr = (sic * link.noise).max(own * (link.noise + ri * t));
                            w * self.cdf(thr / scale)
                        })
                        .sum()
                }
            }
        });
        check_probability("outage_r", v)
    }

    /// Outage probability of the transmission user.
    pub fn outage_t(&self, ps: f64) -> Result<f64> {
        check_power("outage_t", ps)?;
        let Some(sic) = self.sic_ratio() else {
            return Ok(1.0);
        };
        let v = self.dist.average(|d| {
            let link = self.link(false, d);
            self.cdf(sic * link.noise / (link.signal * ps))
        });
        check_probability("outage_t", v)
    }

    pub fn system_outage(&self, mode: SicMode, ps: f64) -> Result<f64> {
        let pr = self.outage_r(mode, ps)?;
        let pt = self.outage_t(ps)?;
        check_probability("system_outage", system_outage_from(pr, pt))
    }

    /// Ergodic rate of the reflection user (bits per channel use).
    pub fn ergodic_rate_r(&self, mode: SicMode, ps: f64) -> Result<f64> {
        check_power("ergodic_rate_r", ps)?;
        let c = &self.cfg;
        if c.a_r == 0.0 {
            return Ok(0.0);
        }
        let q2 = self.fit.q * self.fit.q;
        let nats = self.dist.average(|d| {
            let link = self.link(true, d);
            let gain = c.a_r * link.signal * ps * q2;
            match mode {
                SicMode::Perfect => self.amplitude_log_mean(gain / link.noise),
                SicMode::Imperfect => {
                    let ri = ps * c.noise_sigma_re2;
                    self.lag_k
                        .nodes
                        .iter()
                        .zip(&self.lag_k.weights)
                        .map(|(&t, &w)| w * self.amplitude_log_mean(gain / (link.noise + ri * t)))
                        .sum()
                }
            }
        });
        let rate = nats / LN_2;
        if rate < 0.0 || !rate.is_finite() {
            return Err(Error::Integrity {
                func: "ergodic_rate_r",
                value: rate,
                expected: "[0, ∞)",
            });
        }
        Ok(rate)
    }

    /// E_g[ln(1 + k g²)] for g ~ Gamma(p, 1).
    pub(crate) fn amplitude_log_mean(&self, k: f64) -> f64 {
        self.amp_nodes_sq
            .iter()
            .zip(&self.amp_weights)
            .map(|(&g2, &w)| w * (k * g2).ln_1p())
            .sum()
    }

    /// Outer Chebyshev sum for ∫₀^{a_t/a_r} S(y)/((1+y) ln 2) dy.
    ///
    /// The h²/24 endpoint term at y = 0 is charged to the node nearest y = 0,
    /// which also switches it off when S falls too steeply there to be
    /// resolved. `far_end` applies the same term at y = a_t/a_r.
    pub(crate) fn rate_t_sum<F: FnMut(f64) -> f64>(&self, mut survival: F, far_end: bool) -> f64 {
        let c = &self.cfg;
        let n = self.cheb.len();
        let span = c.a_t / c.a_r;
        let end = endpoint_term(n);
        let body: f64 = self
            .cheb
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let y = (x + 1.0) * span / 2.0;
                let mut w = PI / n as f64 * ((1.0 - x) * (1.0 + x)).sqrt();
                if n > 1 && i == 0 {
                    w -= end;
                }
                if n > 1 && far_end && i == n - 1 {
                    w -= end;
                }
                w * survival(y) / (1.0 + y)
            })
            .sum();
        span / (2.0 * LN_2) * body
    }

    /// Ergodic rate of the transmission user.
    pub fn ergodic_rate_t(&self, ps: f64) -> Result<f64> {
        check_power("ergodic_rate_t", ps)?;
        let c = &self.cfg;
        if !(c.a_r > 0.0) {
            return Err(Error::domain("ergodic_rate_t", "a_r must be positive"));
        }
        let dist_links: Vec<Link> = self.dist.chi.iter().map(|&d| self.link(false, d)).collect();
        let rate = self.rate_t_sum(
            |y| {
                let den = c.a_t - y * c.a_r;
                dist_links
                    .iter()
                    .zip(&self.dist.weights)
                    .map(|(l, &w)| w * self.ccdf(y * l.noise / (den * l.signal * ps)))
                    .sum()
            },
            false,
        );
        let ceiling = self.rate_t_sum(|_| 1.0, false);
        if !(rate >= 0.0) || rate > ceiling + 1e-6 {
            return Err(Error::Integrity {
                func: "ergodic_rate_t",
                value: rate,
                expected: "[0, log2(1 + a_t/a_r)]",
            });
        }
        Ok(rate)
    }

    /// (1 − P_r) R̂_r + (1 − P_t) R̂_t.
    pub fn throughput_delay_limited(&self, mode: SicMode, ps: f64) -> Result<f64> {
        let pr = self.outage_r(mode, ps)?;
        let pt = self.outage_t(ps)?;
        Ok(delay_limited_from(
            pr,
            pt,
            self.cfg.target_rate_r,
            self.cfg.target_rate_t,
        ))
    }

    /// R_r + R_t.
    pub fn throughput_delay_tolerant(&self, mode: SicMode, ps: f64) -> Result<f64> {
        Ok(self.ergodic_rate_r(mode, ps)? + self.ergodic_rate_t(ps)?)
    }

    /// Evaluates any metric kind.
    pub fn metric(&self, kind: MetricKind, mode: SicMode, ps: f64) -> Result<MetricPoint> {
        let value = match kind {
            MetricKind::OutageR => self.outage_r(mode, ps)?,
            MetricKind::OutageT => self.outage_t(ps)?,
            MetricKind::OutageSystem => self.system_outage(mode, ps)?,
            MetricKind::RateR => self.ergodic_rate_r(mode, ps)?,
            MetricKind::RateT => self.ergodic_rate_t(ps)?,
            MetricKind::ThroughputLimited => self.throughput_delay_limited(mode, ps)?,
            MetricKind::ThroughputTolerant => self.throughput_delay_tolerant(mode, ps)?,
        };
        Ok(MetricPoint {
            ps_watts: ps,
            value,
            kind,
        })
    }
}

/// Euler–Maclaurin endpoint weight (π/n)²/24 of the n-point Chebyshev rule.
fn endpoint_term(n: usize) -> f64 {
    (PI / n as f64).powi(2) / 24.0
}

/// 1 − (1 − P_r)(1 − P_t).
pub fn system_outage_from(pr: f64, pt: f64) -> f64 {
    1.0 - (1.0 - pr) * (1.0 - pt)
}

pub fn delay_limited_from(pr: f64, pt: f64, rate_r: f64, rate_t: f64) -> f64 {
    (1.0 - pr) * rate_r + (1.0 - pt) * rate_t
}

pub fn outage_r(cfg: &NetworkConfig, mode: SicMode, ps: f64) -> Result<f64> {
    Analytic::new(cfg)?.outage_r(mode, ps)
}

pub fn outage_t(cfg: &NetworkConfig, ps: f64) -> Result<f64> {
    Analytic::new(cfg)?.outage_t(ps)
}

pub fn system_outage(cfg: &NetworkConfig, mode: SicMode, ps: f64) -> Result<f64> {
    Analytic::new(cfg)?.system_outage(mode, ps)
}

pub fn ergodic_rate_r(cfg: &NetworkConfig, mode: SicMode, ps: f64) -> Result<f64> {
    Analytic::new(cfg)?.ergodic_rate_r(mode, ps)
}

pub fn ergodic_rate_t(cfg: &NetworkConfig, ps: f64) -> Result<f64> {
    Analytic::new(cfg)?.ergodic_rate_t(ps)
}

pub fn throughput_delay_limited(cfg: &NetworkConfig, mode: SicMode, ps: f64) -> Result<f64> {
    Analytic::new(cfg)?.throughput_delay_limited(mode, ps)
}

pub fn throughput_delay_tolerant(cfg: &NetworkConfig, mode: SicMode, ps: f64) -> Result<f64> {
    Analytic::new(cfg)?.throughput_delay_tolerant(mode, ps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dbm_to_watts;
    use approx::assert_relative_eq;

    #[test]
    fn roundoff_overshoot_is_clamped() {
        assert_eq!(check_probability("t", 1.0 + 1e-14).unwrap(), 1.0);
        assert_eq!(check_probability("t", -1e-14).unwrap(), 0.0);
        assert!(check_probability("t", 1.0 + 1e-6).is_err());
    }

    fn small() -> NetworkConfig {
        NetworkConfig {
            quad_k: 60,
            quad_u: 60,
            quad_q: 60,
            cheb_n: 60,
            ..NetworkConfig::table_one()
        }
    }

    #[test]
    fn distance_rule_integrates_density() {
        let r = DistanceRule::new(200, 35.0).unwrap();
        assert_relative_eq!(r.average(|_| 1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.average(|d| d), 2.0 * 35.0 / 3.0, max_relative = 1e-9);
        assert_relative_eq!(
            r.average(|d| d.powi(4)),
            35f64.powi(4) / 3.0,
            max_relative = 1e-8
        );
    }

    #[test]
    fn degenerate_sic_is_sure_outage() {
        let cfg = NetworkConfig {
            target_rate_t: 2.0,
            ..small()
        };
        let a = Analytic::new(&cfg).unwrap();
        assert_eq!(a.outage_r(SicMode::Perfect, 1.0).unwrap(), 1.0);
        assert_eq!(a.outage_r(SicMode::Imperfect, 1.0).unwrap(), 1.0);
        assert_eq!(a.outage_t(1.0).unwrap(), 1.0);
    }

    #[test]
    fn low_power_limits() {
        let a = Analytic::new(&small()).unwrap();
        let ps = 1e-12;
        assert!(a.outage_r(SicMode::Perfect, ps).unwrap() > 1.0 - 1e-9);
        assert!(a.outage_t(ps).unwrap() > 1.0 - 1e-9);
        assert!(a.ergodic_rate_r(SicMode::Perfect, ps).unwrap() < 1e-6);
        assert!(a.ergodic_rate_t(ps).unwrap() < 1e-6);
    }

    #[test]
    fn rate_t_tends_to_ceiling() {
        let cfg = NetworkConfig {
            a_r: 0.2,
            a_t: 0.8,
            ..small()
        };
        let a = Analytic::new(&cfg).unwrap();
        let r = a.ergodic_rate_t(dbm_to_watts(60.0)).unwrap();
        assert!((r - 5f64.log2()).abs() < 1e-3, "{r}");
    }

    #[test]
    fn composition_identities() {
        assert_eq!(system_outage_from(0.0, 0.0), 0.0);
        assert_eq!(system_outage_from(1.0, 0.3), 1.0);
        assert_relative_eq!(system_outage_from(0.1, 0.2), 0.28, max_relative = 1e-15);
        assert_eq!(delay_limited_from(1.0, 1.0, 1.0, 1.0), 0.0);
        assert_eq!(delay_limited_from(0.0, 0.0, 1.0, 1.0), 2.0);
    }

    #[test]
    fn throughput_tolerant_is_exact_sum() {
        let a = Analytic::new(&small()).unwrap();
        let ps = dbm_to_watts(25.0);
        let sum = a.throughput_delay_tolerant(SicMode::Perfect, ps).unwrap();
        let r = a.ergodic_rate_r(SicMode::Perfect, ps).unwrap();
        let t = a.ergodic_rate_t(ps).unwrap();
        assert_eq!(sum.to_bits(), (r + t).to_bits());
    }

    #[test]
    fn stronger_amplification_raises_rate() {
        let base = small();
        let boosted = NetworkConfig {
            amp_lambda: base.amp_lambda * 4.0,
            ..base.clone()
        };
        let ps = dbm_to_watts(20.0);
        let r0 = Analytic::new(&base)
            .unwrap()
            .ergodic_rate_r(SicMode::Perfect, ps)
            .unwrap();
        let r1 = Analytic::new(&boosted)
            .unwrap()
            .ergodic_rate_r(SicMode::Perfect, ps)
            .unwrap();
        assert!(r1 > r0);
    }

    #[test]
    fn rejects_nonpositive_power() {
        let a = Analytic::new(&small()).unwrap();
        assert!(a.outage_t(0.0).is_err());
        assert!(a.ergodic_rate_r(SicMode::Perfect, -1.0).is_err());
    }

    #[test]
    fn tags_round_trip() {
        for k in MetricKind::ALL {
            assert_eq!(MetricKind::from_tag(k.tag()), Some(k));
        }
        for m in SicMode::ALL {
            assert_eq!(SicMode::from_tag(m.tag()), Some(m));
        }
    }
}
