//! Internal dense complex matrix type and the singular-value engine.
//!
//! Everything in here is crate-private plumbing: row-major storage, the
//! textbook kernels (multiply, Kronecker product, adjoint), and a cyclic
//! Jacobi eigensolver for Hermitian matrices that backs the operator norm.
//! The public API wraps this in [`crate::category::Morphism`].

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Scalar;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub(crate) struct Mat<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> std::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Mat({}x{})", self.rows, self.cols)
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds from a 0-based entry function `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex<T>) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Nonzero entries of every column, indexed by column.
    pub fn all_col_nonzeros(&self) -> Vec<Vec<(usize, Complex<T>)>> {
        let mut out = vec![Vec::new(); self.cols];
        for r in 0..self.rows {
            let row = self.row(r);
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    out[c].push((r, *v));
                }
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out = vec![Complex::<T>::zero(); self.rows * rhs.cols];
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in arow.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let brow = rhs.row(k);
                for (o, &b) in orow.iter_mut().zip(brow.iter()) {
                    *o += a * b;
                }
            }
        }
        Mat {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        }
    }

    /// Kronecker product: entry `((i*rb + i'), (j*cb + j')) = a[i,j] * b[i',j']`.
    pub fn kron(&self, rhs: &Mat<T>) -> Mat<T> {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut data = vec![Complex::<T>::zero(); rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j];
                if a.is_zero() {
                    continue;
                }
                for ip in 0..rhs.rows {
                    let brow = rhs.row(ip);
                    let base = (i * rhs.rows + ip) * cols + j * rhs.cols;
                    for (jp, &b) in brow.iter().enumerate() {
                        data[base + jp] = a * b;
                    }
                }
            }
        }
        Mat { rows, cols, data }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat<T> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            for (c, v) in row.iter().enumerate() {
                out.data[c * self.rows + r] = v.conj();
            }
        }
        out
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Mat<T> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            for (c, v) in row.iter().enumerate() {
                out.data[c * self.rows + r] = *v;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, z: Complex<T>) -> Mat<T> {
        let data = self.data.iter().map(|a| a * z).collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn trace(&self) -> Complex<T> {
        assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
        let mut t = Complex::zero();
        for i in 0..self.rows {
            t += self.data[i * self.cols + i];
        }
        t
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Largest singular value (operator norm for the Euclidean vector norms).
    ///
    /// Reduces to the Gram matrix on the smaller side (`A A†` if the matrix
    /// is wide-or-square in rows, `A† A` otherwise) and takes the square root
    /// of its largest eigenvalue, computed by cyclic Jacobi iteration. For
    /// the positive semi-definite Gram matrices arising here, Jacobi is
    /// accurate to a small multiple of machine epsilon relative to the norm
    /// itself.
    pub fn op_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        if self.rows == 1 || self.cols == 1 {
            // Rank-one shortcut: a row or column vector's operator norm is
            // its Euclidean norm.
            return self.frobenius_norm();
        }
        let gram = if self.rows <= self.cols {
            self.gram_rows()
        } else {
            self.gram_cols()
        };
        let lambda = hermitian_max_eigenvalue(gram);
        lambda.max(T::zero()).sqrt()
    }

    /// `A A†` (rows x rows).
    fn gram_rows(&self) -> Mat<T> {
        let n = self.rows;
        let mut g = Mat::zeros(n, n);
        for i in 0..n {
            let ri = self.row(i);
            for j in 0..=i {
                let rj = self.row(j);
                let mut s = Complex::<T>::zero();
                for (a, b) in ri.iter().zip(rj.iter()) {
                    s += a * b.conj();
                }
                g.data[i * n + j] = s;
                g.data[j * n + i] = s.conj();
            }
        }
        g
    }

    /// `A† A` (cols x cols).
    fn gram_cols(&self) -> Mat<T> {
        let n = self.cols;
        let mut g = Mat::zeros(n, n);
        // Accumulate row by row: A†A = sum over rows r of (row_r)† (row_r).
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ai = row[i].conj();
                if ai.is_zero() {
                    continue;
                }
                let grow = &mut g.data[i * n..(i + 1) * n];
                for (gj, &aj) in grow.iter_mut().zip(row.iter()) {
                    *gj += ai * aj;
                }
            }
        }
        g
    }
}

/// Largest eigenvalue of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Each rotation phases the pivot entry real (`diag(1, e^{-i phi})`) and then
/// applies the classical real 2x2 rotation that annihilates it. Sweeps stop
/// when no off-diagonal entry is large relative to its diagonal pair.
pub(crate) fn hermitian_max_eigenvalue<T: Scalar>(mut h: Mat<T>) -> T {
    let n = h.rows();
    assert_eq!(n, h.cols());
    if n == 0 {
        return T::zero();
    }
    if n == 1 {
        return h.get(0, 0).re;
    }
    let eps = T::epsilon();
    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = h.get(p, q);
                let m = hpq.norm();
                let app = h.get(p, p).re;
                let aqq = h.get(q, q).re;
                if m <= (app.abs() + aqq.abs()) * eps {
                    continue;
                }
                rotated = true;
                // Unit phase of the pivot: hpq = m * u.
                let u = hpq / m;
                // Real rotation zeroing the phased pivot.
                let tau = (aqq - app) / (m + m);
                let t = if tau.is_zero() {
                    T::one()
                } else {
                    // Smaller-magnitude root of t^2 - 2*tau*t - 1 = 0.
                    -tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let sp = u.scale(s); // s * e^{+i phi}
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let hpk = h.get(p, k);
                    let hqk = h.get(q, k);
                    let new_pk = hpk.scale(c) + sp * hqk;
                    let new_qk = (u * hqk).scale(c) - hpk.scale(s);
                    h.set(p, k, new_pk);
                    h.set(q, k, new_qk);
                    h.set(k, p, new_pk.conj());
                    h.set(k, q, new_qk.conj());
                }
                h.set(p, p, Complex::new(app + t * m, T::zero()));
                h.set(q, q, Complex::new(aqq - t * m, T::zero()));
                h.set(p, q, Complex::zero());
                h.set(q, p, Complex::zero());
            }
        }
        if !rotated {
            break;
        }
    }
    let mut best = h.get(0, 0).re;
    for i in 1..n {
        let d = h.get(i, i).re;
        if d > best {
            best = d;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type M = Mat<f64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent oracle for the operator norm: power iteration on A†A with
    /// restarts, run far past convergence.
    pub(crate) fn op_norm_power_iteration(a: &M) -> f64 {
        use rand::Rng;
        use rand::SeedableRng;
        let mut best = 0.0f64;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x5eed);
        for _ in 0..20 {
            let mut v: Vec<Complex64> = (0..a.cols())
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let mut sigma = 0.0f64;
            for _ in 0..10_000 {
                // w = A v
                let mut w = vec![c(0.0, 0.0); a.rows()];
                for i in 0..a.rows() {
                    let row = a.row(i);
                    let mut s = c(0.0, 0.0);
                    for (x, y) in row.iter().zip(v.iter()) {
                        s += x * y;
                    }
                    w[i] = s;
                }
                // v' = A† w
                let mut v2 = vec![c(0.0, 0.0); a.cols()];
                for i in 0..a.rows() {
                    let row = a.row(i);
                    let wi = w[i];
                    for (j, x) in row.iter().enumerate() {
                        v2[j] += x.conj() * wi;
                    }
                }
                let norm = v2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    sigma = 0.0;
                    break;
                }
                for z in v2.iter_mut() {
                    *z /= norm;
                }
                sigma = norm.sqrt(); // ||A†A v|| -> lambda_max, sigma = sqrt
                v = v2;
            }
            best = best.max(sigma);
        }
        best
    }

    #[test]
    fn op_norm_of_diagonal_is_largest_entry() {
        let mut a = M::zeros(2, 2);
        a.set(0, 0, c(3.0, 0.0));
        a.set(1, 1, c(1.0, 0.0));
        assert!((a.op_norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn op_norm_of_zero_matrix_is_zero() {
        let a = M::zeros(5, 3);
        assert_eq!(a.op_norm(), 0.0);
    }

    #[test]
    fn op_norm_of_identity_is_one() {
        let a = M::identity(7);
        assert!((a.op_norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn op_norm_matches_power_iteration_oracle_on_random_matrices() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(41);
        for &(r, co) in &[(3usize, 3usize), (5, 2), (2, 5), (8, 8), (13, 7)] {
            let a = M::from_fn(r, co, |_, _| {
                c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
            });
            let jacobi = a.op_norm();
            let power = op_norm_power_iteration(&a);
            let rel = (jacobi - power).abs() / power.max(1e-30);
            assert!(
                rel < 1e-10,
                "Jacobi {jacobi} vs power-iteration {power} (rel {rel:e}) at {r}x{co}"
            );
        }
    }

    #[test]
    fn op_norm_is_invariant_under_adjoint() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let a = M::from_fn(6, 11, |_, _| c(rng.gen(), rng.gen()));
        let d = (a.op_norm() - a.adjoint().op_norm()).abs();
        assert!(d < 1e-12, "norm differs under dagger by {d:e}");
    }

    #[test]
    fn hermitian_jacobi_recovers_known_eigenvalue() {
        // [[2, 1+i], [1-i, 3]] has eigenvalues (5 +- sqrt(9)) / 2 = 4 and 1.
        let mut h = M::zeros(2, 2);
        h.set(0, 0, c(2.0, 0.0));
        h.set(0, 1, c(1.0, 1.0));
        h.set(1, 0, c(1.0, -1.0));
        h.set(1, 1, c(3.0, 0.0));
        let lam = hermitian_max_eigenvalue(h);
        assert!((lam - 4.0).abs() < 1e-12, "got {lam}");
    }

    #[test]
    fn mul_matches_hand_computed_product() {
        // [[1, i], [0, 2]] * [[1, 1], [1, 0]] = [[1+i, 1], [2, 0]]
        let a = M::from_vec(2, 2, vec![c(1., 0.), c(0., 1.), c(0., 0.), c(2., 0.)]);
        let b = M::from_vec(2, 2, vec![c(1., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let p = a.mul(&b);
        assert_eq!(p.get(0, 0), c(1., 1.));
        assert_eq!(p.get(0, 1), c(1., 0.));
        assert_eq!(p.get(1, 0), c(2., 0.));
        assert_eq!(p.get(1, 1), c(0., 0.));
    }

    #[test]
    fn kron_matches_four_index_formula() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let a = M::from_fn(2, 3, |_, _| c(rng.gen(), rng.gen()));
        let b = M::from_fn(3, 2, |_, _| c(rng.gen(), rng.gen()));
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        for i in 0..2 {
            for j in 0..3 {
                for ip in 0..3 {
                    for jp in 0..2 {
                        let lhs = k.get(i * 3 + ip, j * 2 + jp);
                        let rhs = a.get(i, j) * b.get(ip, jp);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = M::from_vec(1, 2, vec![c(1., 2.), c(3., -4.)]);
        let d = a.adjoint();
        assert_eq!((d.rows(), d.cols()), (2, 1));
        assert_eq!(d.get(0, 0), c(1., -2.));
        assert_eq!(d.get(1, 0), c(3., 4.));
    }
}
