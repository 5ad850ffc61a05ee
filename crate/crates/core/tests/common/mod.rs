#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// Tanh-sinh quadrature on `[a, b]`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
    let h = 1.0 / 64.0;
    let mut sum = 0.0;
    let mut k = -(4.0 / h) as i64;
    while (k as f64) * h <= 4.0 {
        let t = k as f64 * h;
        let s = FRAC_PI_2 * t.sinh();
        let x = s.tanh();
        let w = FRAC_PI_2 * t.cosh() / (s.cosh() * s.cosh());
        let node = mid + half * x;
        if node > a && node < b && w > 0.0 {
            let v = f(node);
            if v.is_finite() {
                sum += w * v;
            }
        }
        k += 1;
    }
    sum * half * h
}

/// `E[exp(-c U)]` for each `c`, for a density known up to a constant.
///
/// Trapezoid rule in `y = ln u` over `[lo, hi]`, normalised by the same sum
/// at `c = 0`.
pub fn laplace_by_quadrature<D: Fn(f64) -> f64>(
    density: D,
    cs: &[f64],
    lo: f64,
    hi: f64,
) -> Vec<f64> {
    let step = 0.01;
    let n = ((hi - lo) / step).ceil() as usize;
    let mut num = vec![0.0; cs.len()];
    let mut den = 0.0;
    for i in 0..=n {
        let u = (lo + (hi - lo) * i as f64 / n as f64).exp();
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let g = w * density(u) * u;
        den += g;
        for (acc, c) in num.iter_mut().zip(cs) {
            *acc += g * (-c * u).exp();
        }
    }
    num.into_iter().map(|x| x / den).collect()
}

/// Density of the positive stable law with `E exp(-s X) = exp(-s^alpha)`,
/// `0 < alpha < 1`, from Zolotarev's integral representation.
pub fn positive_stable_density(alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let k = 1.0 / (1.0 - alpha);
    let scale = x.powf(-alpha * k);
    let integrand = |phi: f64| {
        let a = ((alpha * phi).sin() / phi.sin()).powf(k) * ((1.0 - alpha) * phi).sin()
            / (alpha * phi).sin();
        a * (-scale * a).exp()
    };
    alpha * k * x.powf(-k) * tanh_sinh(integrand, 0.0, PI) / PI
}

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}
