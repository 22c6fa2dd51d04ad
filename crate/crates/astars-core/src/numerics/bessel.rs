//! Modified Bessel functions of real argument.

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 20.0;

/// Exponentially scaled I₀: e^{-|x|} I₀(x).
pub fn bessel_i0e(x: f64) -> f64 {
    scaled_i(0, x.abs())
}

/// Exponentially scaled I₁: e^{-|x|} I₁(x). Odd in x.
pub fn bessel_i1e(x: f64) -> f64 {
    let v = scaled_i(1, x.abs());
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// I₀(x).
pub fn bessel_i0(x: f64) -> f64 {
    bessel_i0e(x) * x.abs().exp()
}

/// I₁(x).
pub fn bessel_i1(x: f64) -> f64 {
    bessel_i1e(x) * x.abs().exp()
}

fn scaled_i(order: u32, x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        series_i(order, x)
    } else {
        hankel_i(order, x)
    }
}

fn series_i(order: u32, x: f64) -> f64 {
    {
        let nu = order as f64;
        let q = 0.25 * x * x;
        let mut term = (0.5 * x).powi(order as i32);
        let mut sum = term;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * (k + nu));
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        sum * (-x).exp()
    }
}

fn hankel_i(order: u32, x: f64) -> f64 {
    {
        // Hankel expansion, truncated at the smallest term.
        let mu = 4.0 * (order as f64).powi(2);
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut k = 1.0f64;
        loop {
            let next = -term * (mu - (2.0 * k - 1.0).powi(2)) / (k * 8.0 * x);
            if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
                if next.abs() < term.abs() {
                    sum += next;
                }
                break;
            }
            sum += next;
            term = next;
            k += 1.0;
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// K_ν(x) for real order ν and x > 0.
///
/// Uses K_ν(x) = ½∫_{-∞}^{∞} exp(νt − x cosh t) dt with the trapezoid rule,
/// which converges geometrically for this entire, doubly decaying integrand.
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "bessel_k",
            format!("x = {x} must be positive"),
        ));
    }
    if !order.is_finite() {
        return Err(Error::domain(
            "bessel_k",
            format!("order = {order} must be finite"),
        ));
    }
    let nu = order.abs();
    let log_f = |t: f64| nu * t - x * t.cosh();
    let t_peak = (nu / x).asinh();
    let peak = log_f(t_peak);
    let h = 1.0 / 16.0;
    let mut sum = 1.0;
    for dir in [1.0, -1.0] {
        let mut j = 1.0;
        loop {
            let v = (log_f(t_peak + dir * j * h) - peak).exp();
            sum += v;
            if v < 1e-18 * sum {
                break;
            }
            j += 1.0;
        }
    }
    Ok(0.5 * h * sum * peak.exp())
}

/// Laguerre polynomial of order one half:
/// L_{1/2}(x) = e^{x/2}[(1−x) I₀(−x/2) − x I₁(−x/2)].
pub fn laguerre_half(x: f64) -> f64 {
    let y = -0.5 * x;
    // e^{x/2} I_n(y) = e^{x/2 + |y|} I_n^e(y)
    let scale = (0.5 * x + y.abs()).exp();
    scale * ((1.0 - x) * bessel_i0e(y) - x * bessel_i1e(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn i0_i1_reference_values() {
        // Abramowitz & Stegun Table 9.8
        assert_relative_eq!(
            bessel_i0(1.0),
            1.266_065_877_752_008_4,
            max_relative = 1e-14
        );
        assert_relative_eq!(bessel_i1(1.0), 0.565_159_103_992_485, max_relative = 1e-14);
        assert_relative_eq!(bessel_i0(0.0), 1.0);
        assert_eq!(bessel_i1(0.0), 0.0);
        assert_relative_eq!(bessel_i1(-1.0), -bessel_i1(1.0));
    }

    #[test]
    fn scaled_forms_continuous_across_switch() {
        for order in [0, 1] {
            let a = series_i(order, SERIES_LIMIT);
            let b = hankel_i(order, SERIES_LIMIT);
            assert_relative_eq!(a, b, max_relative = 1e-14);
        }
    }

    #[test]
    fn bessel_k_half_integer() {
        let x: f64 = 2.0;
        let expected = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
        assert_relative_eq!(bessel_k(0.5, x).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(-0.5, x).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(expected, 0.119_938, max_relative = 1e-5);
    }

    #[test]
    fn bessel_k_rejects_nonpositive() {
        assert!(bessel_k(0.0, 0.0).is_err());
        assert!(bessel_k(1.0, -2.0).is_err());
    }

    #[test]
    fn laguerre_half_at_zero() {
        assert_relative_eq!(laguerre_half(0.0), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn laguerre_half_table_kappa() {
        let k = 10f64.powf(-0.5);
        assert_relative_eq!(laguerre_half(-k), 1.152_177_704, max_relative = 1e-9);
    }
}
