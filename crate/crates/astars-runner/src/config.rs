//! Flat `key = value` configuration files.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use astars_core::model::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm, NetworkConfig};

use crate::error::{CliError, Result};

/// Every accepted key, in the order `render_config` writes them.
pub const KEYS: [&str; 26] = [
    "kappa_db",
    "lambda",
    "num_elements",
    "radius_d",
    "dist_bs",
    "beta_r",
    "beta_t",
    "a_r",
    "a_t",
    "sigma_s2_dbm",
    "sigma_02_dbm",
    "sigma_re2_dbm",
    "alpha",
    "eta0_db",
    "rate_r",
    "rate_t",
    "quad_k",
    "quad_u",
    "quad_q",
    "cheb_n",
    "mc_trials",
    "seed",
    "pc_dbm",
    "pd_dbm",
    "hyp2f1_z_cap",
    "mean_noise_mode",
];

pub fn parse_config(path: &Path) -> Result<NetworkConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text)
}

/// Parses config text over the reference defaults and validates the result.
pub fn parse_config_str(text: &str) -> Result<NetworkConfig> {
    let mut cfg = NetworkConfig::table_one();
    let mut seen = HashSet::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(
                format!("line {}", no + 1),
                "expected `key = value`",
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_owned()) {
            return Err(CliError::config(key, "duplicate key"));
        }
        apply(&mut cfg, key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn number(key: &str, value: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::config(
            key,
            format!("`{value}` is not a finite number"),
        )),
    }
}

fn count(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::config(key, format!("`{value}` is not a nonnegative integer")))
}

pub fn parse_seed(value: &str) -> Result<u64> {
    let parsed = match value
        .strip_prefix("0x")
        .or_else(|| value.strip_prefix("0X"))
    {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => value.replace('_', "").parse::<u64>(),
    };
    parsed.map_err(|_| CliError::config("seed", format!("`{value}` is not a 64-bit integer")))
}

fn apply(cfg: &mut NetworkConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "kappa_db" => cfg.rician_kappa = db_to_linear(number(key, value)?),
        "lambda" => cfg.amp_lambda = number(key, value)?,
        "num_elements" => cfg.num_elements = count(key, value)?,
        "radius_d" => cfg.radius_d = number(key, value)?,
        "dist_bs" => cfg.dist_bs = number(key, value)?,
        "beta_r" => cfg.beta_r = number(key, value)?,
        "beta_t" => cfg.beta_t = number(key, value)?,
        "a_r" => cfg.a_r = number(key, value)?,
        "a_t" => cfg.a_t = number(key, value)?,
        "sigma_s2_dbm" => cfg.noise_sigma_s2 = dbm_to_watts(number(key, value)?),
        "sigma_02_dbm" => cfg.noise_sigma_02 = dbm_to_watts(number(key, value)?),
        "sigma_re2_dbm" => cfg.noise_sigma_re2 = dbm_to_watts(number(key, value)?),
        "alpha" => cfg.path_alpha = number(key, value)?,
        "eta0_db" => cfg.path_eta0 = db_to_linear(number(key, value)?),
        "rate_r" => cfg.target_rate_r = number(key, value)?,
        "rate_t" => cfg.target_rate_t = number(key, value)?,
        "quad_k" => cfg.quad_k = count(key, value)?,
        "quad_u" => cfg.quad_u = count(key, value)?,
        "quad_q" => cfg.quad_q = count(key, value)?,
        "cheb_n" => cfg.cheb_n = count(key, value)?,
        "mc_trials" => cfg.mc_trials = count(key, value)?,
        "seed" => cfg.seed = parse_seed(value)?,
        "pc_dbm" => cfg.pc_watts = dbm_to_watts(number(key, value)?),
        "pd_dbm" => cfg.pd_watts = dbm_to_watts(number(key, value)?),
        "hyp2f1_z_cap" => cfg.hyp2f1_z_cap = number(key, value)?,
        "mean_noise_mode" => {
            cfg.mean_noise_mode = match value {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" => false,
                _ => return Err(CliError::config(key, format!("`{value}` is not a boolean"))),
            }
        }
        _ => return Err(CliError::config(key, "unknown key")),
    }
    Ok(())
}

/// Writes `cfg` back in file form, with dB/dBm keys in their input units.
pub fn render_config(cfg: &NetworkConfig) -> String {
    let values: [String; 26] = [
        linear_to_db(cfg.rician_kappa).to_string(),
        cfg.amp_lambda.to_string(),
        cfg.num_elements.to_string(),
        cfg.radius_d.to_string(),
        cfg.dist_bs.to_string(),
        cfg.beta_r.to_string(),
        cfg.beta_t.to_string(),
        cfg.a_r.to_string(),
        cfg.a_t.to_string(),
        watts_to_dbm(cfg.noise_sigma_s2).to_string(),
        watts_to_dbm(cfg.noise_sigma_02).to_string(),
        watts_to_dbm(cfg.noise_sigma_re2).to_string(),
        cfg.path_alpha.to_string(),
        linear_to_db(cfg.path_eta0).to_string(),
        cfg.target_rate_r.to_string(),
        cfg.target_rate_t.to_string(),
        cfg.quad_k.to_string(),
        cfg.quad_u.to_string(),
        cfg.quad_q.to_string(),
        cfg.cheb_n.to_string(),
        cfg.mc_trials.to_string(),
        format!("{:#x}", cfg.seed),
        watts_to_dbm(cfg.pc_watts).to_string(),
        watts_to_dbm(cfg.pd_watts).to_string(),
        cfg.hyp2f1_z_cap.to_string(),
        cfg.mean_noise_mode.to_string(),
    ];
    let mut out = String::new();
    for (k, v) in KEYS.iter().zip(values) {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg, NetworkConfig::table_one());
        let cfg = parse_config_str("# only a comment\n\n   \n").unwrap();
        assert_eq!(cfg, NetworkConfig::table_one());
    }

    #[test]
    fn kappa_in_db() {
        let cfg = parse_config_str("kappa_db = -5").unwrap();
        assert!((cfg.rician_kappa - 0.316_227_766).abs() < 1e-9);
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = parse_config_str("  lambda=7 # stronger\nnum_elements =4\n").unwrap();
        assert_eq!(cfg.amp_lambda, 7.0);
        assert_eq!(cfg.num_elements, 4);
    }

    #[test]
    fn invariant_violation_names_constraint() {
        let e = parse_config_str("beta_r = 0.8\nbeta_t = 0.3").unwrap_err();
        assert!(e.to_string().contains("beta_r+beta_t ≤ 1 violated"), "{e}");
        assert_eq!(e.exit_code(), 1);
        let e = parse_config_str("a_r = 0.9\na_t = 0.1").unwrap_err();
        assert!(e.to_string().contains("a_r ≤ a_t violated"), "{e}");
    }

    #[test]
    fn malformed_input_rejected() {
        for text in [
            "gamma = 3",
            "lambda",
            "lambda = fast",
            "lambda = 2\nlambda = 3",
            "num_elements = -1",
            "mean_noise_mode = maybe",
        ] {
            let e = parse_config_str(text).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{text}");
        }
    }

    #[test]
    fn seeds_accept_hex() {
        assert_eq!(parse_seed("0x10").unwrap(), 16);
        assert_eq!(parse_seed("1_000").unwrap(), 1000);
        assert!(parse_seed("-1").is_err());
    }

    #[test]
    fn render_round_trips() {
        let mut cfg = NetworkConfig::table_one();
        cfg.num_elements = 6;
        cfg.mean_noise_mode = true;
        let back = parse_config_str(&render_config(&cfg)).unwrap();
        assert_eq!(back.num_elements, 6);
        assert_eq!(back.seed, cfg.seed);
        assert!(back.mean_noise_mode);
        assert!((back.rician_kappa / cfg.rician_kappa - 1.0).abs() < 1e-12);
        assert!((back.noise_sigma_s2 / cfg.noise_sigma_s2 - 1.0).abs() < 1e-12);
        assert!((back.pc_watts / cfg.pc_watts - 1.0).abs() < 1e-12);
        assert_eq!(render_config(&cfg).lines().count(), KEYS.len());
    }
}
