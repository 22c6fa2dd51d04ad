//! Monte Carlo simulation of the exact signal model, baselines and the
//! power-budget mapping.
//!
//! Trial `i` draws from its own ChaCha8 stream (`seed`, stream `i`), trials
//! are reduced in fixed-size chunks and chunk statistics are merged in index
//! order, so every estimate is bit-identical for any worker count.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::analytic::{MetricKind, SicMode};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{sample_distance, NetworkConfig};

pub const MIN_TRIALS: usize = 1000;
const CHUNK: usize = 1024;

/// Transmission scheme compared by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Active STAR surface, NOMA.
    AstarsNoma,
    /// Active STAR surface, one user per time slot.
    AstarsOma,
    /// Passive STAR surface, NOMA.
    PstarsNoma,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::AstarsNoma, Scheme::AstarsOma, Scheme::PstarsNoma];

    pub fn tag(self) -> &'static str {
        match self {
            Scheme::AstarsNoma => "astars_noma",
            Scheme::AstarsOma => "astars_oma",
            Scheme::PstarsNoma => "pstars_noma",
        }
    }

    pub fn from_tag(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::config("scheme", format!("unknown scheme tag {s:?}")))
    }

    /// Whether the surface elements are active (amplifying).
    pub fn is_active(self) -> bool {
        !matches!(self, Scheme::PstarsNoma)
    }
}

/// One channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDraw {
    pub h_s: Vec<Complex64>,
    pub h_r: Vec<Complex64>,
    pub h_t: Vec<Complex64>,
    /// Thermal noise at the elements, per-element power σ_s².
    pub n_s: Vec<Complex64>,
    /// Residual interference power, exponential with mean σ_re².
    pub h_re_sq: f64,
    pub d_r: f64,
    pub d_t: f64,
}

impl TrialDraw {
    fn with_capacity(l: usize) -> Self {
        TrialDraw {
            h_s: Vec::with_capacity(l),
            h_r: Vec::with_capacity(l),
            h_t: Vec::with_capacity(l),
            n_s: Vec::with_capacity(l),
            h_re_sq: 0.0,
            d_r: 0.0,
            d_t: 0.0,
        }
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (std * std::f64::consts::FRAC_1_SQRT_2)
}

fn rician<R: Rng + ?Sized>(rng: &mut R, los: f64, scatter: f64) -> Complex64 {
    Complex64::new(los, 0.0) + complex_normal(rng, scatter)
}

/// A distance in (0, D] with density 2x/D².
fn user_distance<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> f64 {
    let d = sample_distance(rng, radius);
    if d > 0.0 {
        d
    } else {
        radius * f64::MIN_POSITIVE.sqrt()
    }
}

fn draw_into<R: Rng + ?Sized>(rng: &mut R, cfg: &NetworkConfig, out: &mut TrialDraw) {
    let k = cfg.rician_kappa;
    let los = (k / (k + 1.0)).sqrt();
    let scatter = (1.0 / (k + 1.0)).sqrt();
    let l = cfg.num_elements;
    out.h_s.clear();
    out.h_r.clear();
    out.h_t.clear();
    out.n_s.clear();
    for _ in 0..l {
        out.h_s.push(rician(rng, los, scatter));
        out.h_r.push(rician(rng, los, scatter));
        out.h_t.push(rician(rng, los, scatter));
        out.n_s.push(complex_normal(rng, cfg.noise_sigma_s2.sqrt()));
    }
    let e: f64 = rng.sample(Exp1);
    out.h_re_sq = e * cfg.noise_sigma_re2;
    out.d_r = user_distance(rng, cfg.radius_d);
    out.d_t = user_distance(rng, cfg.radius_d);
}

/// Draws one independent channel realization.
pub fn draw_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &NetworkConfig) -> TrialDraw {
    let mut t = TrialDraw::with_capacity(cfg.num_elements);
    draw_into(rng, cfg, &mut t);
    t
}

/// The four SINRs of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSet {
    /// Reflection user decoding the transmission user's signal.
    pub gamma_r_to_t: f64,
    pub gamma_r_psic: f64,
    pub gamma_r_ipsic: f64,
    pub gamma_t: f64,
}

#[derive(Debug, Clone, Copy)]
struct SideChannel {
    /// Received signal power per unit transmit power, before the λβ factor.
    signal: f64,
    /// Amplified thermal noise power before the λβ factor.
    noise: f64,
}

fn side(
    trial: &TrialDraw,
    h: &[Complex64],
    d: f64,
    cfg: &NetworkConfig,
    amplified_noise: bool,
) -> SideChannel {
    let amp: f64 = trial
        .h_s
        .iter()
        .zip(h)
        .map(|(a, b)| a.norm() * b.norm())
        .sum();
    let path = cfg.path_eta0 * d.powf(-cfg.path_alpha);
    let signal = cfg.path_eta0 * cfg.dist_bs.powf(-cfg.path_alpha) * path * amp * amp;
    let noise = if !amplified_noise {
        0.0
    } else if cfg.mean_noise_mode {
        path * cfg.noise_sigma_s2 * cfg.zeta()
    } else {
        let s: Complex64 = trial.n_s.iter().zip(h).map(|(n, g)| n * g).sum();
        path * s.norm_sqr()
    };
    SideChannel { signal, noise }
}

fn noma_sinrs(
    trial: &TrialDraw,
    cfg: &NetworkConfig,
    ps: f64,
    lambda: f64,
    amplified_noise: bool,
) -> SinrSet {
    let r = side(trial, &trial.h_r, trial.d_r, cfg, amplified_noise);
    let t = side(trial, &trial.h_t, trial.d_t, cfg, amplified_noise);
    let lr = lambda * cfg.beta_r;
    let lt = lambda * cfg.beta_t;
    let sr = lr * ps * r.signal;
    let nr = lr * r.noise + cfg.noise_sigma_02;
    let st = lt * ps * t.signal;
    let nt = lt * t.noise + cfg.noise_sigma_02;
    SinrSet {
        gamma_r_to_t: cfg.a_t * sr / (cfg.a_r * sr + nr),
        gamma_r_psic: cfg.a_r * sr / nr,
        gamma_r_ipsic: cfg.a_r * sr / (nr + trial.h_re_sq * ps),
        gamma_t: cfg.a_t * st / (cfg.a_r * st + nt),
    }
}

/// SINRs of the active-surface NOMA link for one realization.
pub fn sinr_set(trial: &TrialDraw, cfg: &NetworkConfig, ps: f64) -> SinrSet {
    noma_sinrs(trial, cfg, ps, cfg.amp_lambda, true)
}

/// Monte Carlo estimate of one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub trials: usize,
    pub ci95_halfwidth: f64,
    pub kind: MetricKind,
}

/// Running mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n / n;
        self.m2 += o.m2 + d * d * self.n * o.n / n;
        self.n = n;
    }

    fn estimate(&self, kind: MetricKind) -> Estimate {
        let n = self.n;
        // Streaming updates can leave a 0/1 mean an ulp outside [0, 1].
        let mean = if kind.is_probability() {
            self.mean.clamp(0.0, 1.0)
        } else {
            self.mean
        };
        let half = if kind.is_probability() {
            1.96 * (mean * (1.0 - mean) / n).sqrt()
        } else if n > 1.0 {
            1.96 * (self.m2 / (n - 1.0)).max(0.0).sqrt() / n.sqrt()
        } else {
            0.0
        };
        Estimate {
            mean,
            trials: n as usize,
            ci95_halfwidth: half,
            kind,
        }
    }
}

/// Metric slots produced per trial. Mode-independent metrics use `None`.
const SLOTS: [(MetricKind, Option<SicMode>); 12] = [
    (MetricKind::OutageR, Some(SicMode::Perfect)),
    (MetricKind::OutageR, Some(SicMode::Imperfect)),
    (MetricKind::OutageT, None),
    (MetricKind::OutageSystem, Some(SicMode::Perfect)),
    (MetricKind::OutageSystem, Some(SicMode::Imperfect)),
    (MetricKind::RateR, Some(SicMode::Perfect)),
    (MetricKind::RateR, Some(SicMode::Imperfect)),
    (MetricKind::RateT, None),
    (MetricKind::ThroughputLimited, Some(SicMode::Perfect)),
    (MetricKind::ThroughputLimited, Some(SicMode::Imperfect)),
    (MetricKind::ThroughputTolerant, Some(SicMode::Perfect)),
    (MetricKind::ThroughputTolerant, Some(SicMode::Imperfect)),
];

/// All simulated metrics of one scheme at one power.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet {
    pub scheme: Scheme,
    pub ps_watts: f64,
    entries: BTreeMap<(usize, usize), Estimate>,
}

fn kind_index(k: MetricKind) -> usize {
    MetricKind::ALL.iter().position(|&x| x == k).unwrap_or(0)
}

fn mode_index(m: Option<SicMode>) -> usize {
    match m {
        None => 0,
        Some(SicMode::Perfect) => 1,
        Some(SicMode::Imperfect) => 2,
    }
}

impl EstimateSet {
    /// Looks up a metric; mode-independent metrics answer for either mode.
    pub fn get(&self, kind: MetricKind, mode: SicMode) -> Option<&Estimate> {
        let k = kind_index(kind);
        self.entries
            .get(&(k, mode_index(Some(mode))))
            .or_else(|| self.entries.get(&(k, 0)))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Estimate> {
        self.entries.values()
    }
}

fn ln2_rate(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Per-trial values in `SLOTS` order.
fn trial_values(trial: &TrialDraw, cfg: &NetworkConfig, scheme: Scheme, ps: f64) -> [f64; 12] {
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let (rr, rt) = (cfg.target_rate_r, cfg.target_rate_t);
    match scheme {
        Scheme::AstarsNoma | Scheme::PstarsNoma => {
            let s = if scheme == Scheme::AstarsNoma {
                noma_sinrs(trial, cfg, ps, cfg.amp_lambda, true)
            } else {
                noma_sinrs(trial, cfg, ps, 1.0, false)
            };
            let (gr, gt) = (cfg.gamma_hat_r(), cfg.gamma_hat_t());
            let sic_fail = s.gamma_r_to_t <= gt;
            let out_rp = sic_fail || s.gamma_r_psic <= gr;
            let out_ri = sic_fail || s.gamma_r_ipsic <= gr;
            let out_t = s.gamma_t <= gt;
            let rate_rp = ln2_rate(s.gamma_r_psic);
            let rate_ri = ln2_rate(s.gamma_r_ipsic);
            let rate_t = ln2_rate(s.gamma_t);
            [
                ind(out_rp),
                ind(out_ri),
                ind(out_t),
                ind(out_rp || out_t),
                ind(out_ri || out_t),
                rate_rp,
                rate_ri,
                rate_t,
                ind(!out_rp) * rr + ind(!out_t) * rt,
                ind(!out_ri) * rr + ind(!out_t) * rt,
                rate_rp + rate_t,
                rate_ri + rate_t,
            ]
        }
        Scheme::AstarsOma => {
            let r = side(trial, &trial.h_r, trial.d_r, cfg, true);
            let t = side(trial, &trial.h_t, trial.d_t, cfg, true);
            let snr = |beta: f64, c: SideChannel| {
                let lb = cfg.amp_lambda * beta;
                lb * ps * c.signal / (lb * c.noise + cfg.noise_sigma_02)
            };
            let (snr_r, snr_t) = (snr(cfg.beta_r, r), snr(cfg.beta_t, t));
            // Half-length slots: the target rate needs 2^{2R̂} − 1.
            let out_r = snr_r <= (2.0 * rr).exp2() - 1.0;
            let out_t = snr_t <= (2.0 * rt).exp2() - 1.0;
            let rate_r = 0.5 * ln2_rate(snr_r);
            let rate_t = 0.5 * ln2_rate(snr_t);
            let lim = ind(!out_r) * rr + ind(!out_t) * rt;
            [
                ind(out_r),
                ind(out_r),
                ind(out_t),
                ind(out_r || out_t),
                ind(out_r || out_t),
                rate_r,
                rate_r,
                rate_t,
                lim,
                lim,
                rate_r + rate_t,
                rate_r + rate_t,
            ]
        }
    }
}

fn chunk_moments(
    cfg: &NetworkConfig,
    scheme: Scheme,
    ps: f64,
    trials: usize,
    seed: u64,
    chunk: usize,
) -> [Moments; 12] {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = [Moments::default(); 12];
    let mut draw = TrialDraw::with_capacity(cfg.num_elements);
    let start = chunk * CHUNK;
    let end = (start + CHUNK).min(trials);
    for i in start..end {
        let mut rng = base.clone();
        rng.set_stream(i as u64);
        draw_into(&mut rng, cfg, &mut draw);
        let v = trial_values(&draw, cfg, scheme, ps);
        for (m, x) in acc.iter_mut().zip(v) {
            m.push(x);
        }
    }
    acc
}

fn check_inputs(ps: f64, trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::config(
            "mc_trials",
            format!("at least {MIN_TRIALS} trials required, got {trials}"),
        ));
    }
    if !(ps > 0.0) || !ps.is_finite() {
        return Err(Error::domain(
            "simulate",
            format!("transmit power {ps} must be positive"),
        ));
    }
    Ok(())
}

fn finish(parts: Vec<[Moments; 12]>, scheme: Scheme, ps: f64) -> EstimateSet {
    let mut total = [Moments::default(); 12];
    for p in &parts {
        for (t, m) in total.iter_mut().zip(p) {
            t.merge(m);
        }
    }
    let entries = SLOTS
        .iter()
        .zip(&total)
        .map(|(&(k, m), mom)| ((kind_index(k), mode_index(m)), mom.estimate(k)))
        .collect();
    EstimateSet {
        scheme,
        ps_watts: ps,
        entries,
    }
}

/// Simulates every metric of `scheme` at transmit power `ps`.
pub fn simulate(
    cfg: &NetworkConfig,
    scheme: Scheme,
    ps: f64,
    trials: usize,
    seed: u64,
) -> Result<EstimateSet> {
    check_inputs(ps, trials)?;
    let chunks = trials.div_ceil(CHUNK);
    let parts = exec::map_indexed(chunks, |c| chunk_moments(cfg, scheme, ps, trials, seed, c));
    Ok(finish(parts, scheme, ps))
}

/// Single-threaded [`simulate`]; produces bit-identical results.
pub fn simulate_sequential(
    cfg: &NetworkConfig,
    scheme: Scheme,
    ps: f64,
    trials: usize,
    seed: u64,
) -> Result<EstimateSet> {
    check_inputs(ps, trials)?;
    let chunks = trials.div_ceil(CHUNK);
    let parts = exec::map_indexed_seq(chunks, |c| chunk_moments(cfg, scheme, ps, trials, seed, c));
    Ok(finish(parts, scheme, ps))
}

/// Outage estimates of one SIC mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimates {
    pub r: Estimate,
    pub t: Estimate,
    pub system: Estimate,
}

/// Ergodic-rate estimates of one SIC mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimates {
    pub r: Estimate,
    pub t: Estimate,
    pub sum: Estimate,
}

fn pick(set: &EstimateSet, kind: MetricKind, mode: SicMode) -> Estimate {
    *set.get(kind, mode).expect("every slot is populated")
}

pub fn estimate_outage(
    cfg: &NetworkConfig,
    mode: SicMode,
    ps: f64,
    trials: usize,
    seed: u64,
) -> Result<OutageEstimates> {
    let s = simulate(cfg, Scheme::AstarsNoma, ps, trials, seed)?;
    Ok(OutageEstimates {
        r: pick(&s, MetricKind::OutageR, mode),
        t: pick(&s, MetricKind::OutageT, mode),
        system: pick(&s, MetricKind::OutageSystem, mode),
    })
}

pub fn estimate_ergodic(
    cfg: &NetworkConfig,
    mode: SicMode,
    ps: f64,
    trials: usize,
    seed: u64,
) -> Result<RateEstimates> {
    let s = simulate(cfg, Scheme::AstarsNoma, ps, trials, seed)?;
    Ok(RateEstimates {
        r: pick(&s, MetricKind::RateR, mode),
        t: pick(&s, MetricKind::RateT, mode),
        sum: pick(&s, MetricKind::ThroughputTolerant, mode),
    })
}

/// Simulates a comparison scheme at transmit power `ps`.
pub fn baseline_estimate(
    cfg: &NetworkConfig,
    scheme: Scheme,
    ps: f64,
    trials: usize,
    seed: u64,
) -> Result<EstimateSet> {
    if scheme == Scheme::AstarsNoma {
        return Err(Error::config("scheme", "astars_noma is not a baseline"));
    }
    simulate(cfg, scheme, ps, trials, seed)
}

/// Transmit power left for the BS under a total power budget `q_tot` (W).
///
/// Active surface: Q = P_s + λ(β_r+β_t)L(η₀d_s^{-α}P_s + σ_s²) + L(P_c+P_d),
/// the middle term being the expected surface output power.
/// Passive surface: Q = P_s + L·P_c.
pub fn budget_to_ps(q_tot: f64, cfg: &NetworkConfig, active: bool) -> Result<f64> {
    let l = cfg.num_elements as f64;
    let ps = if active {
        let k = cfg.amp_lambda * (cfg.beta_r + cfg.beta_t) * l;
        (q_tot - l * (cfg.pc_watts + cfg.pd_watts) - k * cfg.noise_sigma_s2)
            / (1.0 + k * cfg.path_eta0 * cfg.dist_bs.powf(-cfg.path_alpha))
    } else {
        q_tot - l * cfg.pc_watts
    };
    if ps > 0.0 && ps.is_finite() {
        Ok(ps)
    } else {
        Err(Error::config(
            "q_tot",
            format!("budget {q_tot} W leaves no transmit power (got {ps} W)"),
        ))
    }
}

/// Total budget consumed by transmit power `ps` (inverse of [`budget_to_ps`]).
pub fn ps_to_budget(ps: f64, cfg: &NetworkConfig, active: bool) -> f64 {
    let l = cfg.num_elements as f64;
    if active {
        let k = cfg.amp_lambda * (cfg.beta_r + cfg.beta_t) * l;
        ps + k * (cfg.path_eta0 * cfg.dist_bs.powf(-cfg.path_alpha) * ps + cfg.noise_sigma_s2)
            + l * (cfg.pc_watts + cfg.pd_watts)
    } else {
        ps + l * cfg.pc_watts
    }
}

/// `n` samples of the squared cascade gain (Σ_l |h_s^l||h_φ^l|)².
pub fn cascade_gain_samples(kappa: f64, num_elements: usize, n: usize, seed: u64) -> Vec<f64> {
    let los = (kappa / (kappa + 1.0)).sqrt();
    let scatter = (1.0 / (kappa + 1.0)).sqrt();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = n.div_ceil(CHUNK);
    exec::map_indexed(chunks, |c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(n);
        (start..end)
            .map(|i| {
                let mut rng = base.clone();
                rng.set_stream(i as u64);
                let a: f64 = (0..num_elements)
                    .map(|_| {
                        rician(&mut rng, los, scatter).norm()
                            * rician(&mut rng, los, scatter).norm()
                    })
                    .sum();
                a * a
            })
            .collect::<Vec<_>>()
    })
    .concat()
}
