//! Gauss–Laguerre and Gauss–Chebyshev rules.

use crate::error::{Error, Result};

pub const MAX_LAGUERRE: usize = 2000;
pub const MAX_CHEBYSHEV: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Laguerre,
    Chebyshev,
}

/// Nodes and weights of a one-dimensional quadrature rule.
///
/// Nodes are stored in increasing order. `ln_weights` holds the natural log of
/// each weight; Laguerre weights in the far tail underflow `f64` (they fall
/// below e^{-745}), so `weights` may contain zeros there while `ln_weights`
/// stays finite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub ln_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method.
///
/// `diag` has length n, `off` has length n-1. Returned unsorted.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d
}

/// Evaluates L_n(x) and L_{n-1}(x) by the three-term recurrence with
/// rescaling. Returns (L_n, L_{n-1}, ln_scale) such that the true values are
/// the returned ones times exp(ln_scale).
fn laguerre_pair(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 1.0;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    let mut cur = 1.0 - x;
    let mut ln_scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            cur *= 1e-150;
            prev *= 1e-150;
            ln_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (cur, prev, ln_scale)
}

/// ln Σ_{j=0}^{n-1} L_j(x)², rescaled to stay in range.
fn ln_christoffel_sum(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    let mut acc = 1.0;
    if n == 1 {
        return 0.0;
    }
    let mut cur = 1.0 - x;
    acc += cur * cur;
    let mut ln_scale = 0.0;
    for j in 1..n - 1 {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - x) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        acc += cur * cur;
        if acc > 1e200 {
            cur *= 1e-100;
            prev *= 1e-100;
            acc *= 1e-200;
            ln_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    acc.ln() + ln_scale
}

/// Gauss–Laguerre rule for ∫₀^∞ e^{-t} f(t) dt with K nodes.
///
/// Nodes are eigenvalues of the Jacobi matrix (Golub–Welsch), polished by
/// Newton steps on L_K. Weights are Christoffel numbers 1/Σ_{j<K} L_j(y_k)²,
/// accumulated with rescaling; the sum of squares has no cancellation, so each
/// weight keeps full relative accuracy even where it underflows in linear form.
pub fn gauss_laguerre_rule(k: usize) -> Result<QuadratureRule> {
    if k == 0 || k > MAX_LAGUERRE {
        return Err(Error::config(
            "quad_k",
            format!("Gauss-Laguerre size {k} outside 1..={MAX_LAGUERRE}"),
        ));
    }
    let diag: Vec<f64> = (0..k).map(|i| 2.0 * i as f64 + 1.0).collect();
    let off: Vec<f64> = (1..k).map(|i| i as f64).collect();
    let mut nodes = tridiagonal_eigenvalues(&diag, &off);
    nodes.sort_by(|a, b| a.total_cmp(b));

    let kf = k as f64;
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (lk, lk1, _) = laguerre_pair(k, *x);
            // L_K' = K (L_K - L_{K-1}) / x
            let step = *x * lk / (kf * (lk - lk1));
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
    }

    let ln_weights: Vec<f64> = nodes.iter().map(|&x| -ln_christoffel_sum(k, x)).collect();
    let weights = ln_weights.iter().map(|w| w.exp()).collect();
    Ok(QuadratureRule {
        kind: RuleKind::Laguerre,
        nodes,
        weights,
        ln_weights,
    })
}

/// Gauss–Chebyshev nodes x_u = cos((2u−1)π/(2U)), u = 1..U, stored in
/// increasing order, each with the uniform weight π/U.
pub fn gauss_chebyshev_nodes(u: usize) -> Result<QuadratureRule> {
    if u == 0 || u > MAX_CHEBYSHEV {
        return Err(Error::config(
            "quad_u",
            format!("Gauss-Chebyshev size {u} outside 1..={MAX_CHEBYSHEV}"),
        ));
    }
    let uf = u as f64;
    // cos((2j−1)π/(2U)) = sin((U−2j+1)π/(2U)); the sine form is exactly
    // antisymmetric and gives an exact zero for the middle node.
    let mut nodes: Vec<f64> = (1..=u)
        .map(|j| ((uf - 2.0 * j as f64 + 1.0) * std::f64::consts::PI / (2.0 * uf)).sin())
        .collect();
    nodes.reverse();
    let w = std::f64::consts::PI / uf;
    Ok(QuadratureRule {
        kind: RuleKind::Chebyshev,
        nodes,
        weights: vec![w; u],
        ln_weights: vec![w.ln(); u],
    })
}
