//! Test-only oracles, independent of the library's quadrature rules.
#![allow(dead_code)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: (estimate, error).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32) -> f64 {
    let (est, err) = whole;
    if err <= tol.max(1e-300) || depth == 0 {
        return est;
    }
    let m = 0.5 * (a + b);
    let l = gk15(f, a, m);
    let r = gk15(f, m, b);
    adapt(f, a, m, l, 0.5 * tol, depth - 1) + adapt(f, m, b, r, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod integral of f over [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let first = gk15(&f, a, b);
    // Seed the absolute tolerance from a coarse pass over 16 panels.
    let scale: f64 = (0..16)
        .map(|i| {
            let w = (b - a) / 16.0;
            gk15(&f, a + i as f64 * w, a + (i + 1) as f64 * w).0.abs()
        })
        .sum();
    adapt(&f, a, b, first, rel_tol * scale.max(first.0.abs()), 40)
}

/// ∫₀^∞ f via t ↦ t/(1−t).
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> f64 {
    integrate(
        |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let t = u / (1.0 - u);
            let v = f(t) / ((1.0 - u) * (1.0 - u));
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        rel_tol,
    )
}

/// Relative difference with an absolute floor for values near zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
