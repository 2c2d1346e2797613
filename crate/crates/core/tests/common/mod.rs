#![allow(dead_code)]

use fbdiff::linalg::{DenseMatrix, Lu};
use fbdiff::spectral::DefectMatrix;

/// exp(X) by diagonal Pade(6,6) with scaling and squaring.
pub fn expm(x: &DenseMatrix) -> DenseMatrix {
    let n = x.n;
    let norm = x.norm_inf();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let xs = DenseMatrix { n, data: x.data.iter().map(|v| v * scale).collect() };
    let q = 6usize;
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let coef: Vec<f64> = (0..=q)
        .map(|k| fact(2 * q - k) * fact(q) / (fact(2 * q) * fact(k) * fact(q - k)))
        .collect();
    let mut num = DenseMatrix::zeros(n);
    let mut den = DenseMatrix::zeros(n);
    let mut power = DenseMatrix::identity(n);
    for (k, c) in coef.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..n * n {
            num.data[i] += c * power.data[i];
            den.data[i] += sign * c * power.data[i];
        }
        power = power.matmul(&xs);
    }
    let lu = Lu::new(&den).unwrap();
    let mut r = DenseMatrix::zeros(n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| num[(i, j)]).collect();
        let s = lu.solve(&col);
        for i in 0..n {
            r[(i, j)] = s[i];
        }
    }
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    r
}

/// First tau at which component L reaches `level` under dU/dtau = -B U + F (RK4).
pub fn rk4_crossing(n: usize, l: usize, u0: &[f64], level: f64, dtau: f64, tau_max: f64) -> Option<f64> {
    let b = DefectMatrix::new(n, l).unwrap();
    let f = b.forcing();
    let rhs = |u: &[f64]| -> Vec<f64> { b.apply(u).iter().zip(&f).map(|(bu, fi)| fi - bu).collect() };
    let axpy = |u: &[f64], k: &[f64], s: f64| -> Vec<f64> { u.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let mut u = u0.to_vec();
    let mut tau = 0.0;
    while tau < tau_max {
        let k1 = rhs(&u);
        let k2 = rhs(&axpy(&u, &k1, 0.5 * dtau));
        let k3 = rhs(&axpy(&u, &k2, 0.5 * dtau));
        let k4 = rhs(&axpy(&u, &k3, dtau));
        let next: Vec<f64> = (0..n)
            .map(|i| u[i] + dtau / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        let (a, c) = (u[l - 1], next[l - 1]);
        if a < level && c >= level {
            return Some(tau + dtau * (level - a) / (c - a));
        }
        u = next;
        tau += dtau;
    }
    None
}

/// Roots of f on [lo, hi] located by sign changes on a uniform scan, then bisection.
pub fn bracketed_roots(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, scan: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let dx = (hi - lo) / scan as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for k in 1..=scan {
        let x1 = lo + k as f64 * dx;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            let (mut a, mut b, fa) = (x0, x1, f0);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if f(m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
