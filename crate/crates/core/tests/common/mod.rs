//! Brute-force reference propagator built directly from the spin matrices,
//! with matrix exponentials from a scaled Taylor series.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

/// `(Jx, Jz)` for spin `N/2` on the basis `m = -j..=j`.
pub fn spin_matrices(n: usize) -> (CMat, CMat) {
    let d = n + 1;
    let j = n as f64 / 2.0;
    let mut jx = CMat::zeros(d, d);
    let mut jz = CMat::zeros(d, d);
    for a in 0..d {
        let m = a as f64 - j;
        jz[(a, a)] = Complex64::new(m, 0.0);
        if a + 1 < d {
            // ⟨m+1|J+|m⟩ = sqrt((j-m)(j+m+1))
            let e = 0.5 * ((j - m) * (j + m + 1.0)).sqrt();
            jx[(a + 1, a)] = Complex64::new(e, 0.0);
            jx[(a, a + 1)] = Complex64::new(e, 0.0);
        }
    }
    (jx, jz)
}

/// `exp(A)` by scaling, a 30-term Taylor series and repeated squaring.
pub fn expm(a: &CMat) -> CMat {
    let d = a.nrows();
    let norm: f64 = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * d as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * Complex64::new(scale, 0.0);
    let mut sum = CMat::identity(d, d);
    let mut term = CMat::identity(d, d);
    for k in 1..=30 {
        term = &term * &b * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Twist after rotation: `exp(-iκ Jz²/2j) · exp(-iV Jx)`.
pub fn floquet(n: usize, kappa: f64, v: f64) -> CMat {
    let (jx, jz) = spin_matrices(n);
    let j = n as f64 / 2.0;
    let mi = Complex64::new(0.0, -1.0);
    let twist = expm(&(&jz * &jz * (mi * kappa / (2.0 * j))));
    let rotation = expm(&(jx * (mi * v)));
    twist * rotation
}

/// Coherent amplitudes straight from binomial coefficients.
pub fn coherent(n: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    (0..=n)
        .map(|l| {
            let mut binom = 1.0;
            for k in 0..l {
                binom *= (n - k) as f64 / (k + 1) as f64;
            }
            let r = binom.sqrt() * c.powi(l as i32) * s.powi((n - l) as i32);
            Complex64::from_polar(r, (n - l) as f64 * phi)
        })
        .collect()
}

/// `F` from amplitudes by direct moments.
pub fn fluctuation(amps: &[Complex64]) -> f64 {
    let n = (amps.len() - 1) as f64;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (l, a) in amps.iter().enumerate() {
        let x = l as f64 / n;
        m1 += a.norm_sqr() * x;
        m2 += a.norm_sqr() * x * x;
    }
    (m2 - m1 * m1).max(0.0).sqrt()
}

/// Least-squares slope of `ln y` against `ln n` over kicks `lo..=hi`.
pub fn loglog_slope(values: &[f64], lo: usize, hi: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|n| ((n as f64).ln(), values[n].ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
