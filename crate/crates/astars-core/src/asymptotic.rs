//! High-SNR expressions, error floors, rate ceilings and slope extraction.

use std::f64::consts::LN_2;

use crate::analytic::{Analytic, SicMode};
use crate::error::{Error, Result};
use crate::model::element_moments;
use crate::numerics::{hyp2f1_series, hyp2f1_unit_neg, ln_gamma};

/// Least-squares line through transformed points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeScale {
    /// −d ln(value) / d ln(ps): diversity order.
    LogLog,
    /// d value / d log₂(ps): multiplexing gain.
    SemiLogX,
}

/// ln of the constant (C/Λ)^L / (2L)! in the small-argument cascade CDF.
fn ln_high_snr_constant(kappa: f64, num_elements: usize, z_cap: f64) -> Result<f64> {
    let lambda = 3.0 * (2.0 * kappa).exp() / (16.0 * (1.0 + kappa).powi(2));
    let c = hyp2f1_series(2.0, 0.5, 2.5, z_cap)?;
    let l = num_elements as f64;
    Ok(l * (c / lambda).ln() - ln_gamma(2.0 * l + 1.0))
}

/// Leading small-x term of the cascade CDF,
/// F(x) ≈ (C/Λ)^L x^L / (2L)!, Λ = 3e^{2κ}/(16(1+κ)²), C = ₂F₁(2, ½; 5/2; z_cap).
pub fn high_snr_cascade_cdf(kappa: f64, num_elements: usize, x: f64, z_cap: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(
            "high_snr_cascade_cdf",
            format!("x = {x} must be ≥ 0"),
        ));
    }
    if !(kappa >= 0.0) || num_elements == 0 {
        return Err(Error::domain(
            "high_snr_cascade_cdf",
            "need kappa ≥ 0 and L ≥ 1",
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let v =
        (ln_high_snr_constant(kappa, num_elements, z_cap)? + num_elements as f64 * x.ln()).exp();
    if v > 1.0 {
        return Err(Error::OutOfRegime {
            func: "high_snr_cascade_cdf",
            detail: format!("value {v} exceeds 1 at x = {x}"),
        });
    }
    Ok(v)
}

fn regime_check(func: &'static str, v: f64) -> Result<f64> {
    if v > 1.0 {
        Err(Error::OutOfRegime {
            func,
            detail: format!("asymptotic value {v} exceeds 1; increase ps"),
        })
    } else {
        Ok(v)
    }
}

/// Error floor of the reflection user under imperfect SIC: the ps → ∞ limit
/// of the finite-power expression, where residual interference dominates.
pub fn outage_floor_r_ipsic(an: &Analytic) -> Result<f64> {
    let c = an.config();
    if an.sic_ratio().is_none() {
        return Ok(1.0);
    }
    let gr = c.gamma_hat_r();
    if gr == 0.0 {
        return Ok(0.0);
    }
    if c.a_r == 0.0 {
        return Ok(1.0);
    }
    let own = gr / c.a_r;
    let lag = an.laguerre_k();
    Ok(an.distance_rule().average(|d| {
        let link = an.link(true, d);
        lag.nodes
            .iter()
            .zip(&lag.weights)
            .map(|(&t, &w)| w * an.cdf(own * c.noise_sigma_re2 * t / link.signal))
            .sum()
    }))
}

fn asym_outage(an: &Analytic, reflect: bool, multiplier: f64, ps: f64) -> Result<f64> {
    let c = an.config();
    let ln_const = ln_high_snr_constant(c.rician_kappa, c.num_elements, c.hyp2f1_z_cap)?;
    let l = c.num_elements as f64;
    Ok(an.distance_rule().average(|d| {
        let link = an.link(reflect, d);
        (ln_const + l * (multiplier * link.noise / (link.signal * ps)).ln()).exp()
    }))
}

/// High-SNR outage of the reflection user with perfect SIC; scales as ps^{-L}.
pub fn outage_asym_r_psic(an: &Analytic, ps: f64) -> Result<f64> {
    let c = an.config();
    let Some(sic) = an.sic_ratio() else {
        return Err(Error::OutOfRegime {
            func: "outage_asym_r_psic",
            detail: "a_t ≤ γ̂_t a_r: outage is identically one".into(),
        });
    };
    let own = if c.a_r > 0.0 {
        c.gamma_hat_r() / c.a_r
    } else {
        f64::INFINITY
    };
    regime_check(
        "outage_asym_r_psic",
        asym_outage(an, true, sic.max(own), ps)?,
    )
}

/// High-SNR outage of the transmission user; scales as ps^{-L}.
pub fn outage_asym_t(an: &Analytic, ps: f64) -> Result<f64> {
    let Some(sic) = an.sic_ratio() else {
        return Err(Error::OutOfRegime {
            func: "outage_asym_t",
            detail: "a_t ≤ γ̂_t a_r: outage is identically one".into(),
        });
    };
    regime_check("outage_asym_t", asym_outage(an, false, sic, ps)?)
}

/// Rate ceiling of the reflection user under imperfect SIC (ps → ∞).
pub fn ergodic_asym_r_ipsic(an: &Analytic) -> Result<f64> {
    let c = an.config();
    if c.a_r == 0.0 {
        return Ok(0.0);
    }
    let fit = an.fit();
    let lag = an.laguerre_k();
    let nats = an.distance_rule().average(|d| {
        let link = an.link(true, d);
        let gain = c.a_r * link.signal * fit.q * fit.q / c.noise_sigma_re2;
        lag.nodes
            .iter()
            .zip(&lag.weights)
            .map(|(&t, &w)| w * an.amplitude_log_mean(gain / t))
            .sum()
    });
    Ok(nats / LN_2)
}

/// log₂(1 + E[γ_r]) with perfect SIC: a Jensen upper bound on the ergodic rate.
///
/// E[X] = L v + L² m², and E_d[1/(A + σ₀² d^α)] = ₂F₁(1, 2/α; 1+2/α; −σ₀²D^α/A)/A.
pub fn ergodic_bound_r_psic(an: &Analytic, ps: f64) -> Result<f64> {
    let c = an.config();
    if !(ps > 0.0) {
        return Err(Error::domain("ergodic_bound_r_psic", "ps must be positive"));
    }
    let (m, v) = element_moments(c.rician_kappa)?;
    let l = c.num_elements as f64;
    let mean_x = l * v + l * l * m * m;
    let lb = c.amp_lambda * c.beta_r;
    let a = lb * c.path_eta0 * c.noise_sigma_s2 * c.zeta();
    let w = c.noise_sigma_02 * c.radius_d.powf(c.path_alpha) / a;
    let mean_inv = hyp2f1_unit_neg(2.0 / c.path_alpha, w)? / a;
    let snr =
        c.a_r * lb * ps * c.path_eta0.powi(2) * c.dist_bs.powf(-c.path_alpha) * mean_x * mean_inv;
    Ok(snr.ln_1p() / LN_2)
}

/// Rate ceiling of the transmission user, log₂(1 + a_t/a_r), by the same
/// Chebyshev rule as the finite-power rate with both endpoint terms applied.
pub fn ergodic_asym_t(an: &Analytic) -> Result<f64> {
    let c = an.config();
    if !(c.a_r > 0.0) {
        return Err(Error::domain("ergodic_asym_t", "a_r must be positive"));
    }
    Ok(an.rate_t_sum(|_| 1.0, true))
}

/// Least-squares slope of transformed (ps, value) points.
pub fn fit_order(points: &[(f64, f64)], scale: SlopeScale) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::domain("fit_order", "need at least 3 points"));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points[0].0 <= 0.0 {
        return Err(Error::domain(
            "fit_order",
            "ps must be positive and strictly increasing",
        ));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = match scale {
        SlopeScale::LogLog => {
            if let Some(&(_, v)) = points.iter().find(|p| !(p.1 > 0.0)) {
                return Err(Error::domain(
                    "fit_order",
                    format!("nonpositive value {v} on log scale"),
                ));
            }
            points.iter().map(|&(p, v)| (p.ln(), v.ln())).unzip()
        }
        SlopeScale::SemiLogX => points.iter().map(|&(p, v)| (p.log2(), v)).unzip(),
    };
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let sign = match scale {
        SlopeScale::LogLog => -1.0,
        SlopeScale::SemiLogX => 1.0,
    };
    Ok(SlopeFit {
        slope: sign * slope,
        intercept,
        r_squared,
        points_used: points.len(),
    })
}

/// Points whose ps lies within the top decade of the sweep.
pub fn top_decade(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    points
        .iter()
        .copied()
        .filter(|p| p.0 >= max / 10.0 * (1.0 - 1e-12))
        .collect()
}

/// Diversity order of a mode's outage over the top decade of `ps_grid`.
pub fn diversity_order_r(an: &Analytic, mode: SicMode, ps_grid: &[f64]) -> Result<SlopeFit> {
    let pts = ps_grid
        .iter()
        .map(|&p| Ok((p, an.outage_r(mode, p)?)))
        .collect::<Result<Vec<_>>>()?;
    fit_order(&top_decade(&pts), SlopeScale::LogLog)
}
