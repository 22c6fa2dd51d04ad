//! Network configuration, cascade-channel statistics and user placement.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{gamma_p, laguerre_half, MAX_CHEBYSHEV, MAX_LAGUERRE};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Every physical and numerical parameter, in linear units.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Rician factor κ.
    pub rician_kappa: f64,
    /// Amplification factor λ of each active element.
    pub amp_lambda: f64,
    /// Number of surface elements L.
    pub num_elements: usize,
    /// Radius D of the user disks (m).
    pub radius_d: f64,
    /// BS to surface distance d_s (m).
    pub dist_bs: f64,
    pub beta_r: f64,
    pub beta_t: f64,
    pub a_r: f64,
    pub a_t: f64,
    /// Per-element thermal noise power σ_s² (W).
    pub noise_sigma_s2: f64,
    /// Receiver noise power σ₀² (W).
    pub noise_sigma_02: f64,
    /// Mean residual interference power σ_re² after imperfect SIC (W).
    pub noise_sigma_re2: f64,
    pub path_alpha: f64,
    pub path_eta0: f64,
    pub target_rate_r: f64,
    pub target_rate_t: f64,
    pub quad_k: usize,
    pub quad_u: usize,
    pub quad_q: usize,
    pub cheb_n: usize,
    pub mc_trials: usize,
    pub seed: u64,
    /// Per-element circuit power P_c (W).
    pub pc_watts: f64,
    /// Per-element amplifier bias power P_d (W).
    pub pd_watts: f64,
    pub hyp2f1_z_cap: f64,
    /// Replace the drawn amplified noise by its mean in simulation.
    pub mean_noise_mode: bool,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self::table_one()
    }
}

impl NetworkConfig {
    /// Reference parameter set.
    pub fn table_one() -> Self {
        NetworkConfig {
            rician_kappa: db_to_linear(-5.0),
            amp_lambda: 5.0,
            num_elements: 10,
            radius_d: 35.0,
            dist_bs: 50.0,
            beta_r: 0.7,
            beta_t: 0.3,
            a_r: 0.3,
            a_t: 0.7,
            noise_sigma_s2: dbm_to_watts(-70.0),
            noise_sigma_02: dbm_to_watts(-90.0),
            noise_sigma_re2: dbm_to_watts(-90.0),
            path_alpha: 2.0,
            path_eta0: db_to_linear(-30.0),
            target_rate_r: 1.0,
            target_rate_t: 1.0,
            quad_k: 200,
            quad_u: 200,
            quad_q: 200,
            cheb_n: 200,
            mc_trials: 100_000,
            seed: 0x5EED_A57A,
            pc_watts: dbm_to_watts(-20.0),
            pd_watts: dbm_to_watts(-20.0),
            hyp2f1_z_cap: 1.0 - 1e-3,
            mean_noise_mode: false,
        }
    }

    /// Checks every invariant; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(
                    key,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        if !(self.rician_kappa >= 0.0) || !self.rician_kappa.is_finite() {
            return Err(Error::config(
                "kappa_db",
                "linear kappa must be finite and ≥ 0",
            ));
        }
        if !(self.amp_lambda > 1.0) || !self.amp_lambda.is_finite() {
            return Err(Error::config("lambda", "lambda > 1 violated"));
        }
        if self.num_elements == 0 {
            return Err(Error::config("num_elements", "num_elements ≥ 1 violated"));
        }
        positive("radius_d", self.radius_d)?;
        positive("dist_bs", self.dist_bs)?;
        positive("beta_r", self.beta_r)?;
        positive("beta_t", self.beta_t)?;
        if self.beta_r + self.beta_t > 1.0 + 1e-12 {
            return Err(Error::config("beta_r", "beta_r+beta_t ≤ 1 violated"));
        }
        if !(self.a_r >= 0.0) || !(self.a_t > 0.0) {
            return Err(Error::config(
                "a_r",
                "power allocation factors must be nonnegative",
            ));
        }
        if (self.a_r + self.a_t - 1.0).abs() > 1e-9 {
            return Err(Error::config("a_r", "a_r+a_t = 1 violated"));
        }
        if self.a_r > self.a_t {
            return Err(Error::config("a_r", "a_r ≤ a_t violated"));
        }
        positive("sigma_s2_dbm", self.noise_sigma_s2)?;
        positive("sigma_02_dbm", self.noise_sigma_02)?;
        positive("sigma_re2_dbm", self.noise_sigma_re2)?;
        if !(self.path_alpha >= 2.0) || !self.path_alpha.is_finite() {
            return Err(Error::config("alpha", "alpha ≥ 2 violated"));
        }
        positive("eta0_db", self.path_eta0)?;
        if !(self.target_rate_r >= 0.0) || !self.target_rate_r.is_finite() {
            return Err(Error::config(
                "rate_r",
                "target rate must be finite and ≥ 0",
            ));
        }
        if !(self.target_rate_t >= 0.0) || !self.target_rate_t.is_finite() {
            return Err(Error::config(
                "rate_t",
                "target rate must be finite and ≥ 0",
            ));
        }
        for (key, v, max) in [
            ("quad_k", self.quad_k, MAX_LAGUERRE),
            ("quad_q", self.quad_q, MAX_LAGUERRE),
            ("quad_u", self.quad_u, MAX_CHEBYSHEV),
            ("cheb_n", self.cheb_n, MAX_CHEBYSHEV),
        ] {
            if v == 0 || v > max {
                return Err(Error::config(
                    key,
                    format!("must lie in 1..={max}, got {v}"),
                ));
            }
        }
        if self.mc_trials == 0 {
            return Err(Error::config("mc_trials", "mc_trials ≥ 1 violated"));
        }
        if !(self.pc_watts >= 0.0) || !(self.pd_watts >= 0.0) {
            return Err(Error::config(
                "pc_dbm",
                "circuit powers must be nonnegative",
            ));
        }
        if !(self.hyp2f1_z_cap > 0.0 && self.hyp2f1_z_cap < 1.0) {
            return Err(Error::config("hyp2f1_z_cap", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// SINR target for the reflection user, 2^{R̂_r} − 1.
    pub fn gamma_hat_r(&self) -> f64 {
        self.target_rate_r.exp2() - 1.0
    }

    /// SINR target for the transmission user, 2^{R̂_t} − 1.
    pub fn gamma_hat_t(&self) -> f64 {
        self.target_rate_t.exp2() - 1.0
    }

    pub fn gamma_fit(&self) -> Result<GammaApprox> {
        gamma_fit(self.rician_kappa, self.num_elements)
    }

    pub fn zeta(&self) -> f64 {
        noise_power_factor(self.rician_kappa, self.num_elements)
    }

    /// Coefficient β_φ for the reflection (`true`) or transmission side.
    pub fn beta(&self, reflect: bool) -> f64 {
        if reflect {
            self.beta_r
        } else {
            self.beta_t
        }
    }
}

/// Shape/scale pair of the Gamma law fitted to the cascade amplitude √X.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox {
    pub p: f64,
    pub q: f64,
}

/// Mean and variance of one element's cascade amplitude |h_s^l||h_φ^l|.
pub fn element_moments(kappa: f64) -> Result<(f64, f64)> {
    if !(kappa >= 0.0) {
        return Err(Error::domain(
            "element_moments",
            format!("kappa = {kappa} must be ≥ 0"),
        ));
    }
    let lh = laguerre_half(-kappa);
    let mean = std::f64::consts::PI / (4.0 * (kappa + 1.0)) * lh * lh;
    let var = 1.0 - (std::f64::consts::PI / (4.0 * (kappa + 1.0))).powi(2) * lh.powi(4);
    Ok((mean, var))
}

pub fn gamma_fit(kappa: f64, num_elements: usize) -> Result<GammaApprox> {
    if num_elements == 0 {
        return Err(Error::domain("gamma_fit", "element count must be ≥ 1"));
    }
    let (m, v) = element_moments(kappa)?;
    Ok(GammaApprox {
        p: num_elements as f64 * m * m / v,
        q: v / m,
    })
}

/// Approximate CDF of the squared cascade gain X = (Σ_l |h_s^l||h_φ^l|)².
pub fn cascade_cdf(g: GammaApprox, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    gamma_p(g.p, x.sqrt() / g.q).unwrap_or(1.0)
}

/// ζ = L(Lκ+1)/(κ+1): mean power of Σ_l h_φ^l with unaligned phases.
pub fn noise_power_factor(kappa: f64, num_elements: usize) -> f64 {
    let l = num_elements as f64;
    l * (l * kappa + 1.0) / (kappa + 1.0)
}

/// Density 2x/D² of a user uniformly placed in a disk of radius D.
pub fn distance_pdf(x: f64, radius: f64) -> f64 {
    if (0.0..=radius).contains(&x) {
        2.0 * x / (radius * radius)
    } else {
        0.0
    }
}

/// Inverse-CDF sample D·√u.
pub fn sample_distance<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> f64 {
    let u: f64 = rng.random();
    radius * u.sqrt()
}
