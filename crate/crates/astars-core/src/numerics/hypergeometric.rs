//! Gauss hypergeometric function on the real line.

use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000_000;

/// ₂F₁(a, b; c; z) by its power series, for 0 ≤ z < 1.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::domain(
            "hyp2f1_series",
            format!("c = {c} is a nonpositive integer"),
        ));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::domain(
            "hyp2f1_series",
            format!("z = {z} outside [0, 1)"),
        ));
    }
    series(a, b, c, z)
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Once the term ratio has dropped below 1 the tail is bounded by a
        // geometric series with ratio ≤ z.
        let ratio = (a + nf + 1.0) * (b + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0)) * z;
        if ratio.abs() < 1.0 && (term * ratio / (1.0 - ratio.abs())).abs() <= 1e-16 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::domain(
        "hyp2f1_series",
        format!("series did not converge for a={a}, b={b}, c={c}, z={z}"),
    ))
}

/// ₂F₁(1, b; 1+b; −w) for 0 < b ≤ 1 and w ≥ 0, i.e. b∫₀¹ s^{b−1}/(1+ws) ds.
pub fn hyp2f1_unit_neg(b: f64, w: f64) -> Result<f64> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::domain(
            "hyp2f1_unit_neg",
            format!("b = {b} outside (0, 1]"),
        ));
    }
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::domain(
            "hyp2f1_unit_neg",
            format!("w = {w} must be finite and nonnegative"),
        ));
    }
    if w == 0.0 {
        return Ok(1.0);
    }
    if b == 1.0 {
        return Ok(w.ln_1p() / w);
    }
    if w <= 9.0 || (1.0 - b) < 1e-3 {
        // Pfaff: (1+w)^{-1} ₂F₁(1, 1; 1+b; w/(1+w))
        let u = w / (1.0 + w);
        return Ok(series(1.0, 1.0, 1.0 + b, u)? / (1.0 + w));
    }
    // Large-argument expansion:
    // bπ/sin(πb) w^{-b} − b Σ_{n≥0} (−1)^n w^{−1−n}/(n+1−b)
    let lead = b * std::f64::consts::PI / (std::f64::consts::PI * b).sin() * w.powf(-b);
    let mut tail = 0.0;
    let mut wp = 1.0 / w;
    let mut sign = 1.0;
    for n in 0..10_000 {
        let t = sign * wp / (n as f64 + 1.0 - b);
        tail += t;
        if t.abs() < 1e-17 * tail.abs() {
            break;
        }
        wp /= w;
        sign = -sign;
    }
    Ok(lead - b * tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_term() {
        assert_eq!(hyp2f1_series(2.0, 0.5, 2.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn log_closed_form() {
        let z: f64 = 0.3;
        assert_relative_eq!(
            hyp2f1_series(1.0, 1.0, 2.0, z).unwrap(),
            -(1.0 - z).ln() / z,
            max_relative = 1e-14
        );
    }

    #[test]
    fn domain_errors() {
        assert!(hyp2f1_series(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(hyp2f1_series(1.0, 1.0, 2.0, -0.1).is_err());
        assert!(hyp2f1_series(1.0, 1.0, -2.0, 0.5).is_err());
    }

    #[test]
    fn near_singular_point_converges() {
        // c − a − b = 0: logarithmic growth, still finite below 1
        let v = hyp2f1_series(2.0, 0.5, 2.5, 1.0 - 1e-3).unwrap();
        assert!(v.is_finite() && v > 1.0);
    }

    #[test]
    fn unit_neg_branches_agree() {
        for &b in &[0.4, 2.0 / 3.0, 0.8] {
            for &w in &[8.9, 9.1, 25.0] {
                let pfaff = series(1.0, 1.0, 1.0 + b, w / (1.0 + w)).unwrap() / (1.0 + w);
                assert_relative_eq!(hyp2f1_unit_neg(b, w).unwrap(), pfaff, max_relative = 1e-12);
            }
        }
        assert_relative_eq!(hyp2f1_unit_neg(1.0, 3.0).unwrap(), 4f64.ln() / 3.0);
    }
}
