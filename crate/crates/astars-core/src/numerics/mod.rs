//! Special functions and quadrature rules. Pure functions only.

mod bessel;
mod gamma;
mod hypergeometric;
mod quadrature;

pub use bessel::{bessel_i0, bessel_i0e, bessel_i1, bessel_i1e, bessel_k, laguerre_half};
pub use gamma::{gamma, gamma_p, gamma_q, ln_gamma, lower_incomplete_gamma};
pub use hypergeometric::{hyp2f1_series, hyp2f1_unit_neg};
pub use quadrature::{
    gauss_chebyshev_nodes, gauss_laguerre_rule, tridiagonal_eigenvalues, QuadratureRule, RuleKind,
    MAX_CHEBYSHEV, MAX_LAGUERRE,
};

/// log(Σ exp(v_i)) without overflow.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
