//! Small dense and tridiagonal kernels.

use crate::error::{Error, Result};

/// Solves a tridiagonal system by elimination without pivoting.
/// `sub[i]` multiplies x[i-1] in row i (sub[0] unused), `sup[i]` multiplies x[i+1].
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let scale = diag.iter().chain(sub).chain(sup).fold(0.0f64, |m, v| m.max(v.abs()));
    let tiny = f64::EPSILON * scale * 1e-3;
    let mut beta = diag[0];
    if beta.abs() <= tiny {
        return Err(Error::SingularSystem { row: 0, pivot: beta });
    }
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i - 1];
        if beta.abs() <= tiny || !beta.is_finite() {
            return Err(Error::SingularSystem { row: i, pivot: beta });
        }
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factors with partial pivoting, packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Exactly zero pivots are an error.
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        Self::factor(a, None)
    }

    /// Zero pivots are replaced by `floor`; used by inverse iteration where the
    /// shifted matrix is singular by design.
    pub fn new_regularized(a: &DenseMatrix, floor: f64) -> Self {
        Self::factor(a, Some(floor)).expect("regularized factorization cannot fail")
    }

    fn factor(a: &DenseMatrix, floor: Option<f64>) -> Result<Self> {
        let n = a.n;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
                .unwrap();
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let mut piv = lu[(k, k)];
            if piv == 0.0 {
                match floor {
                    Some(f) => {
                        piv = f;
                        lu[(k, k)] = f;
                    }
                    None => return Err(Error::SingularSystem { row: k, pivot: 0.0 }),
                }
            }
            for i in k + 1..n {
                let l = lu[(i, k)] / piv;
                lu[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        lu.data[i * n + j] -= l * lu.data[k * n + j];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Eigenpairs of a symmetric matrix: ascending values, vectors as columns.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = a.n;
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((d, v))
}

// Householder reduction to tridiagonal form, accumulating the transform in v.
fn tred2(v: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) {
    let n = v.n;
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e), then sort ascending.
fn tql2(v: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = v.n;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::ConvergenceFailure(iter));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let sorted_v = DenseMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    d.copy_from_slice(&sorted_d);
    *v = sorted_v;
    Ok(())
}

/// Householder reduction to upper Hessenberg form (similarity, in place).
pub fn hessenberg(a: &mut DenseMatrix) {
    let n = a.n;
    for k in 0..n.saturating_sub(2) {
        let alpha: f64 = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let mut u: Vec<f64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let s = if u[0] >= 0.0 { alpha } else { -alpha };
        u[0] += s;
        let unorm2: f64 = u.iter().map(|x| x * x).sum();
        if unorm2 == 0.0 {
            continue;
        }
        // A <- (I - 2uu^T/|u|^2) A (I - 2uu^T/|u|^2)
        for j in 0..n {
            let dot: f64 = u.iter().enumerate().map(|(t, ut)| ut * a[(k + 1 + t, j)]).sum();
            let f = 2.0 * dot / unorm2;
            for (t, ut) in u.iter().enumerate() {
                a[(k + 1 + t, j)] -= f * ut;
            }
        }
        for i in 0..n {
            let dot: f64 = u.iter().enumerate().map(|(t, ut)| ut * a[(i, k + 1 + t)]).sum();
            let f = 2.0 * dot / unorm2;
            for (t, ut) in u.iter().enumerate() {
                a[(i, k + 1 + t)] -= f * ut;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Eigenvalues of a general real matrix as (re, im) pairs, unordered.
pub fn general_eigenvalues(a: &DenseMatrix) -> Result<Vec<(f64, f64)>> {
    let mut h = a.clone();
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

// Explicitly shifted QR with Givens rotations on the active window.
fn hessenberg_qr(h: &mut DenseMatrix) -> Result<Vec<(f64, f64)>> {
    let n = h.n;
    let mut eig = vec![(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let norm = h.norm_inf().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = (h[(0, 0)], 0.0);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = h[(l, l)].abs() + h[(l - 1, l - 1)].abs();
            let s = if s == 0.0 { norm } else { s };
            // absolute floor: near-zero diagonals would otherwise never deflate
            if h[(l, l - 1)].abs() <= eps * s || h[(l, l - 1)].abs() <= 1e-3 * eps * norm {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = (h[(hi, hi)], 0.0);
            hi -= 1;
            iter = 0;
            continue;
        }
        if l + 1 == hi {
            let (p, q) = eig2(h[(l, l)], h[(l, hi)], h[(hi, l)], h[(hi, hi)]);
            eig[l] = p;
            eig[hi] = q;
            if l == 0 {
                break;
            }
            hi = l - 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::ConvergenceFailure(total));
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].abs()
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (x, y) = (h[(k, k)], h[(k + 1, k)]);
            let r = x.hypot(y);
            let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (x / r, y / r) };
            for j in k..=hi {
                let (a, b) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c * a + s * b;
                h[(k + 1, j)] = -s * a + c * b;
            }
            rots.push((c, s));
        }
        for (t, &(c, s)) in rots.iter().enumerate() {
            let k = l + t;
            for i in l..=(k + 1).min(hi) {
                let (a, b) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = c * a + s * b;
                h[(i, k + 1)] = -s * a + c * b;
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(eig)
}

fn eig2(a: f64, b: f64, c: f64, d: f64) -> ((f64, f64), (f64, f64)) {
    let p = 0.5 * (a - d);
    let q = p * p + b * c;
    let mid = 0.5 * (a + d);
    if q >= 0.0 {
        let z = q.sqrt();
        let big = if p >= 0.0 { mid + z } else { mid - z };
        // the smaller one from the determinant avoids cancellation
        let det = a * d - b * c;
        let small = if big != 0.0 { det / big } else { mid - (big - mid) };
        ((big, 0.0), (small, 0.0))
    } else {
        let z = (-q).sqrt();
        ((mid, z), (mid, -z))
    }
}

fn wilkinson(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let ((r1, i1), (r2, _)) = eig2(a, b, c, d);
    if i1 != 0.0 {
        return d;
    }
    if (r1 - d).abs() < (r2 - d).abs() {
        r1
    } else {
        r2
    }
}

/// Null vector of (a - mu I) by inverse iteration, normalized to unit 2-norm.
pub fn inverse_iteration(a: &DenseMatrix, mu: f64) -> Vec<f64> {
    let n = a.n;
    let norm = a.norm_inf().max(1.0);
    let shift = mu + 1e-13 * norm;
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let lu = Lu::new_regularized(&m, f64::EPSILON * norm);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..3 {
        x = lu.solve(&x);
        let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut x {
            *v /= s;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn thomas_matches_lu() {
        let n = 9;
        let sub: Vec<f64> = (0..n).map(|i| -1.0 - 0.1 * i as f64).collect();
        let sup: Vec<f64> = (0..n).map(|i| -0.5 + 0.05 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 3.0 + (i % 3) as f64).collect();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
        let dense = DenseMatrix::from_fn(n, |i, j| {
            if i == j {
                diag[i]
            } else if j + 1 == i {
                sub[i]
            } else if i + 1 == j {
                sup[i]
            } else {
                0.0
            }
        });
        let y = Lu::new(&dense).unwrap().solve(&rhs);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn thomas_reports_zero_pivot() {
        let r = solve_tridiagonal(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(r, Err(Error::SingularSystem { row: 0, .. })));
    }

    #[test]
    fn lu_rejects_singular() {
        let a = DenseMatrix::from_fn(3, |i, _| i as f64);
        assert!(Lu::new(&a).is_err());
    }

    #[test]
    fn symmetric_eigen_small_known() {
        // [[2,1],[1,2]] has eigenvalues 1, 3
        let a = DenseMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let (d, v) = symmetric_eigen(&a).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15 && (d[1] - 3.0).abs() < 1e-15);
        assert!((v[(0, 0)].abs() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn general_eigenvalues_complex_pair() {
        // rotation generator plus a real mode
        let a = DenseMatrix { n: 3, data: vec![0.0, -2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 5.0] };
        let mut e = general_eigenvalues(&a).unwrap();
        e.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        assert!((e[0].0).abs() < 1e-14 && (e[0].1 + 2.0).abs() < 1e-14);
        assert!((e[1].1 - 2.0).abs() < 1e-14);
        assert!((e[2].0 - 5.0).abs() < 1e-14);
    }

    fn random_matrix(n: usize, seed: &[f64]) -> DenseMatrix {
        DenseMatrix::from_fn(n, |i, j| seed[(i * n + j) % seed.len()] * (1.0 + 0.01 * (i + 2 * j) as f64))
    }

    proptest! {
        #[test]
        fn symmetric_eigen_residuals(n in 2usize..24, seed in prop::collection::vec(-1.0f64..1.0, 7..40)) {
            let b = random_matrix(n, &seed);
            let a = DenseMatrix::from_fn(n, |i, j| b[(i, j)] + b[(j, i)]);
            let (d, v) = symmetric_eigen(&a).unwrap();
            prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
            for k in 0..n {
                let col: Vec<f64> = (0..n).map(|i| v[(i, k)]).collect();
                let av = a.mul_vec(&col);
                let res = av.iter().zip(&col).map(|(x, y)| (x - d[k] * y).abs()).fold(0.0, f64::max);
                prop_assert!(res < 1e-12 * a.norm_inf().max(1.0));
            }
            let vtv = v.transpose().matmul(&v);
            prop_assert!(vtv.max_abs_diff(&DenseMatrix::identity(n)) < 1e-12);
        }

        #[test]
        fn hessenberg_preserves_trace_and_shape(n in 3usize..16, seed in prop::collection::vec(-1.0f64..1.0, 5..30)) {
            let a = random_matrix(n, &seed);
            let mut h = a.clone();
            hessenberg(&mut h);
            let tr = |m: &DenseMatrix| (0..n).map(|i| m[(i, i)]).sum::<f64>();
            prop_assert!((tr(&a) - tr(&h)).abs() < 1e-12);
            let fro = |m: &DenseMatrix| m.data.iter().map(|x| x * x).sum::<f64>();
            prop_assert!((fro(&a) - fro(&h)).abs() < 1e-11 * fro(&a).max(1.0));
            for i in 2..n {
                for j in 0..i - 1 {
                    prop_assert_eq!(h[(i, j)], 0.0);
                }
            }
        }

        #[test]
        fn general_matches_symmetric_on_symmetric(n in 2usize..20, seed in prop::collection::vec(-1.0f64..1.0, 5..30)) {
            let b = random_matrix(n, &seed);
            let a = DenseMatrix::from_fn(n, |i, j| b[(i, j)] + b[(j, i)]);
            let (d, _) = symmetric_eigen(&a).unwrap();
            let mut e: Vec<f64> = general_eigenvalues(&a).unwrap().into_iter().map(|(r, i)| {
                assert!(i.abs() < 1e-8);
                r
            }).collect();
            e.sort_by(f64::total_cmp);
            for (x, y) in d.iter().zip(&e) {
                prop_assert!((x - y).abs() < 1e-10 * a.norm_inf().max(1.0));
            }
        }
    }
}
