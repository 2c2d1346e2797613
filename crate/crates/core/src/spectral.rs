//! Discrete Neumann Laplacian and the matrices derived from it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{general_eigenvalues, inverse_iteration, solve_tridiagonal, DenseMatrix};

/// Tridiagonal J x J matrix with rows (1, -1), (-1, 2, -1), (-1, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeumannLaplacian {
    pub n: usize,
}

impl NeumannLaplacian {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Neumann Laplacian needs at least two points");
        Self { n }
    }

    pub fn diag(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            1.0
        } else {
            2.0
        }
    }

    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        out[0] = w[0] - w[1];
        out[n - 1] = w[n - 1] - w[n - 2];
        for i in 1..n - 1 {
            out[i] = 2.0 * w[i] - w[i - 1] - w[i + 1];
        }
        out
    }

    pub fn dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, |i, j| {
            if i == j {
                self.diag(i)
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    /// 4 sin^2((j-1) pi / 2J), j = 1..J.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        let s = ((j - 1) as f64 * PI / (2.0 * self.n as f64)).sin();
        4.0 * s * s
    }

    /// Unit eigenvector for the 1-based index j.
    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        let n = self.n as f64;
        let raw: Vec<f64> = (0..self.n)
            .map(|k| ((j - 1) as f64 * PI * (k as f64 + 0.5) / n).cos())
            .collect();
        let s = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        raw.into_iter().map(|v| v / s).collect()
    }
}

pub fn eigenvalues_a(n: usize) -> Vec<f64> {
    let a = NeumannLaplacian::new(n);
    (1..=n).map(|j| a.eigenvalue(j)).collect()
}

/// (h^2 I + eps A)^{-1} A w.
pub fn apply_regularized(n: usize, h: f64, eps: f64, w: &[f64]) -> Vec<f64> {
    let a = NeumannLaplacian::new(n);
    let aw = a.apply(w);
    let h2 = h * h;
    if eps == 0.0 {
        return aw.into_iter().map(|v| v / h2).collect();
    }
    let diag: Vec<f64> = (0..n).map(|i| h2 + eps * a.diag(i)).collect();
    let off = vec![-eps; n];
    solve_tridiagonal(&off, &diag, &off, &aw).expect("h^2 I + eps A is positive definite")
}

/// Eigenvalues of (h^2 I + eps A)^{-1} A, ascending.
pub fn filtered_eigenvalues(n: usize, h: f64, eps: f64) -> Vec<f64> {
    let h2 = h * h;
    eigenvalues_a(n)
        .into_iter()
        .map(|l| if eps == 0.0 { l / h2 } else { l / (h2 + eps * l) })
        .collect()
}

/// exp(-s A) v by the cosine eigenbasis.
pub fn expa_apply(n: usize, s: f64, v: &[f64]) -> Vec<f64> {
    let a = NeumannLaplacian::new(n);
    let mean = v.iter().sum::<f64>() / n as f64;
    let mut out = vec![mean; n];
    for j in 2..=n {
        let decay = (-s * a.eigenvalue(j)).exp();
        if decay == 0.0 {
            continue;
        }
        let q = a.eigenvector(j);
        let c = decay * q.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
        for (o, qk) in out.iter_mut().zip(&q) {
            *o += c * qk;
        }
    }
    let drift = out.iter().sum::<f64>() / n as f64 - mean;
    for o in &mut out {
        *o -= drift;
    }
    out
}

pub fn expa_matrix(n: usize, s: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let col = expa_apply(n, s, &e);
        for i in 0..n {
            m[(i, k)] = col[i];
        }
    }
    m
}

/// A D with D = diag(2, .., -1 at L, .., 2) and forcing -3 at L-1, +3 at L+1 (1-based L).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DefectMatrix {
    pub n: usize,
    pub l: usize,
}

impl DefectMatrix {
    pub fn new(n: usize, l: usize) -> Result<Self> {
        if l < 2 || l + 1 > n {
            return Err(Error::IndexOutOfRange { index: l, lo: 2, hi: n.saturating_sub(1) });
        }
        Ok(Self { n, l })
    }

    pub fn d_diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| if i + 1 == self.l { -1.0 } else { 2.0 }).collect()
    }

    pub fn dense(&self) -> DenseMatrix {
        let a = NeumannLaplacian::new(self.n).dense();
        let d = self.d_diag();
        DenseMatrix::from_fn(self.n, |i, j| a[(i, j)] * d[j])
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let du: Vec<f64> = u.iter().zip(self.d_diag()).map(|(x, d)| x * d).collect();
        NeumannLaplacian::new(self.n).apply(&du)
    }

    pub fn forcing(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.n];
        f[self.l - 2] = -3.0;
        f[self.l] = 3.0;
        f
    }

    /// D^{-1} ones spans the kernel.
    pub fn kernel_vector(&self) -> Vec<f64> {
        self.d_diag().into_iter().map(|d| 1.0 / d).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub values: Vec<f64>,
    /// Right eigenvectors.
    pub right: Vec<Vec<f64>>,
    /// Left eigenvectors scaled so that left[k] . right[k] = 1.
    pub left: Vec<Vec<f64>>,
}

impl SpectralDecomposition {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn project(&self, k: usize, x: &[f64]) -> Vec<f64> {
        let c: f64 = self.left[k].iter().zip(x).map(|(a, b)| a * b).sum();
        self.right[k].iter().map(|v| c * v).collect()
    }

    pub fn projector(&self, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(self.dimension(), |i, j| self.right[k][i] * self.left[k][j])
    }

    /// Index of the eigenvalue closest to zero.
    pub fn zero_index(&self) -> usize {
        (0..self.dimension())
            .min_by(|&i, &j| self.values[i].abs().total_cmp(&self.values[j].abs()))
            .unwrap()
    }
}

/// Eigen-decomposition of the defect matrix, values ascending.
pub fn spectrum_b(n: usize, l: usize) -> Result<SpectralDecomposition> {
    let b = DefectMatrix::new(n, l)?;
    let dense = b.dense();
    let norm = dense.norm_inf();
    let raw = general_eigenvalues(&dense)?;
    if let Some(&(_, im)) = raw.iter().find(|(_, im)| im.abs() > 1e-8 * norm) {
        return Err(Error::NotTransitionConfiguration(format!(
            "complex eigenvalue with imaginary part {im}"
        )));
    }
    let mut values: Vec<f64> = raw.into_iter().map(|(re, _)| re).collect();
    values.sort_by(f64::total_cmp);
    let zero_tol = 1e-8 * norm;
    let bt = dense.transpose();
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for mu in values.iter_mut() {
        let (v, w) = if mu.abs() < zero_tol {
            *mu = 0.0;
            (b.kernel_vector(), vec![1.0; n])
        } else {
            (inverse_iteration(&dense, *mu), inverse_iteration(&bt, *mu))
        };
        let wv: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        if *mu != 0.0 {
            // Rayleigh-type refinement with both vectors
            let bv = dense.mul_vec(&v);
            *mu = w.iter().zip(&bv).map(|(a, b)| a * b).sum::<f64>() / wv;
        }
        left.push(w.into_iter().map(|x| x / wv).collect());
        right.push(v);
    }
    Ok(SpectralDecomposition { values, right, left })
}

/// v+^k + v-^k with v+- = 1 - mu/4 +- sqrt(mu/2 (mu/8 - 1)), for mu in [-4, 0) or (0, 8).
fn power_sum_direct(mu: f64, k: i64) -> f64 {
    let k = k.unsigned_abs() as i32;
    let x = 1.0 - mu / 4.0;
    let disc = 0.5 * mu * (mu / 8.0 - 1.0);
    if disc >= 0.0 {
        let r = disc.sqrt();
        (x + r).powi(k) + (x - r).powi(k)
    } else {
        // unit-modulus pair e^{+-i theta}
        2.0 * (k as f64 * x.clamp(-1.0, 1.0).acos()).cos()
    }
}

/// Same sum as a polynomial in mu: 2 sum_p C(k, 2p) x^{k-2p} (x^2 - 1)^p, x = 1 - mu/4.
pub fn power_sum_binomial(mu: f64, k: i64) -> f64 {
    let k = k.unsigned_abs();
    let x = 1.0 - mu / 4.0;
    let y = -0.5 * mu * (1.0 - mu / 8.0);
    let mut binom = 1.0f64;
    let mut sum = 0.0;
    for p in 0..=k / 2 {
        if p > 0 {
            let (a, b) = (2 * p - 1, 2 * p);
            binom *= (k - a + 1) as f64 * (k - b + 1) as f64 / (a as f64 * b as f64);
        }
        sum += binom * x.powi((k - 2 * p) as i32) * y.powi(p as i32);
    }
    2.0 * sum
}

fn chi_with(mu: f64, n: usize, l: usize, s: impl Fn(f64, i64) -> f64) -> f64 {
    let (n, l) = (n as i64, l as i64);
    -2.0 * (mu + 2.0) * s(mu, n - 2) + (4.0 + mu * (2.0 - mu)) * s(mu, n - 1) + 3.0 * mu * s(mu, n - 2 * l - 1)
}

/// The characteristic function with its defect index `ell` as printed; its
/// roots are the spectrum of the defect matrix with L = ell + 1.
pub fn chi_printed(mu: f64, n: usize, ell: usize) -> f64 {
    let direct = (-4.0..0.0).contains(&mu) || (mu > 0.0 && mu < 8.0);
    if direct {
        chi_with(mu, n, ell, power_sum_direct)
    } else {
        chi_with(mu, n, ell, power_sum_binomial)
    }
}

pub fn chi_printed_binomial(mu: f64, n: usize, ell: usize) -> f64 {
    chi_with(mu, n, ell, power_sum_binomial)
}

/// Characteristic function of the defect matrix with defect at L (1-based).
pub fn char_poly_chi(mu: f64, n: usize, l: usize) -> f64 {
    chi_printed(mu, n, l - 1)
}

pub fn char_poly_chi_binomial(mu: f64, n: usize, l: usize) -> f64 {
    chi_printed_binomial(mu, n, l - 1)
}

/// chi / (8 - mu), defect at L.
pub fn chi_tilde(mu: f64, n: usize, l: usize) -> f64 {
    char_poly_chi(mu, n, l) / (8.0 - mu)
}

pub fn chi_tilde_printed(mu: f64, n: usize, ell: usize) -> f64 {
    chi_printed(mu, n, ell) / (8.0 - mu)
}

/// Closed form of chi_tilde_printed(-1, n, ell).
pub fn chi_tilde_at_minus_one(n: usize, ell: usize) -> f64 {
    let (n, l) = (n as f64, ell as f64);
    -((1.0 - n).exp2() + (n - 2.0 * l - 1.0).exp2() + (2.0 * l + 1.0 - n).exp2()) / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitTimeEstimate {
    /// -(1/mu_-1) log((a - steady_L) / transient_L), in tau = t / h^2 units.
    pub standard: f64,
    /// log(a - steady_L) / log(transient_L) as printed in the source formula.
    pub verbatim: f64,
    pub mu_minus1: f64,
    pub steady_l: f64,
    pub transient_l: f64,
}

/// Exit time of component L from the unstable phase for the canonical flux.
pub fn exit_time_estimate(u0: &[f64], n: usize, l: usize) -> Result<ExitTimeEstimate> {
    let (b, a) = (-1.0, 1.0);
    if u0.len() != n {
        return Err(Error::NotTransitionConfiguration(format!("length {} != {n}", u0.len())));
    }
    let defect = DefectMatrix::new(n, l).map_err(|e| Error::NotTransitionConfiguration(e.to_string()))?;
    let li = l - 1;
    if u0[..li].iter().any(|&u| u > b) {
        return Err(Error::NotTransitionConfiguration("left block not in the minus phase".into()));
    }
    if !(u0[li] >= b && u0[li] < a) {
        return Err(Error::NotTransitionConfiguration(format!("U_L = {} not on [b, a)", u0[li])));
    }
    if u0[li + 1..].iter().any(|&u| u < a) {
        return Err(Error::NotTransitionConfiguration("right block not in the plus phase".into()));
    }
    let sd = spectrum_b(n, l)?;
    let forcing = defect.forcing();
    let k_neg = 0;
    let mu_m1 = sd.values[k_neg];
    let k0 = sd.zero_index();
    let mut steady = sd.project(k0, u0)[li];
    for k in 0..n {
        if k == k0 {
            continue;
        }
        steady += sd.project(k, &forcing)[li] / sd.values[k];
    }
    let shifted: Vec<f64> = u0.iter().zip(&forcing).map(|(u, f)| u - f / mu_m1).collect();
    let transient = sd.project(k_neg, &shifted)[li];
    let scale = u0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let ratio = (a - steady) / transient;
    let standard = if transient.abs() <= 1e-12 * scale || ratio <= 0.0 {
        f64::INFINITY
    } else {
        -ratio.ln() / mu_m1
    };
    Ok(ExitTimeEstimate {
        standard,
        verbatim: (a - steady).ln() / transient.ln(),
        mu_minus1: mu_m1,
        steady_l: steady,
        transient_l: transient,
    })
}

/// (b, .., b, d, d + delta, ..) with U_L = b on the verge of the unstable phase.
pub fn transition_configuration(n: usize, l: usize, delta: f64) -> Vec<f64> {
    (1..=n)
        .map(|j| {
            if j <= l {
                -1.0
            } else if j == l + 1 {
                2.0
            } else {
                2.0 + delta
            }
        })
        .collect()
}

/// Symmetric (J-2) x (J-2) operator acting on V with the two interface cells
/// eliminated by V_{j*} = V_{j*+1} = (V_{j*-1} + V_{j*+2}) / 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedLaplacian {
    pub n: usize,
    pub j_star: usize,
    pub matrix: DenseMatrix,
}

impl ReducedLaplacian {
    /// Original 0-based indices kept, in order.
    pub fn kept(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| i + 1 != self.j_star && i != self.j_star).collect()
    }
}

pub fn build_a_hat(n: usize, j_star: usize) -> Result<ReducedLaplacian> {
    if j_star < 2 || j_star + 2 > n {
        return Err(Error::IndexOutOfRange { index: j_star, lo: 2, hi: n.saturating_sub(2) });
    }
    let a = NeumannLaplacian::new(n).dense();
    let (p, q) = (j_star - 1, j_star); // removed, 0-based
    let kept: Vec<usize> = (0..n).filter(|&i| i != p && i != q).collect();
    let m = n - 2;
    let left = kept.iter().position(|&i| i == p - 1).unwrap();
    let right = kept.iter().position(|&i| i == q + 1).unwrap();
    let mut hat = DenseMatrix::zeros(m);
    for (r, &i) in kept.iter().enumerate() {
        for (c, &j) in kept.iter().enumerate() {
            hat[(r, c)] += a[(i, j)];
        }
        let removed = a[(i, p)] + a[(i, q)];
        hat[(r, left)] += 0.5 * removed;
        hat[(r, right)] += 0.5 * removed;
    }
    Ok(ReducedLaplacian { n, j_star, matrix: hat })
}
