//! Seeded random morphisms, states, and unitaries for tests and the
//! verification harness.
//!
//! Everything takes an explicit `Rng`, so callers control seeding and
//! determinism; the harness derives one generator per check from its
//! configured seed.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::category::{Morphism, TruncObject};
use crate::scalar::Scalar;

/// A standard complex Gaussian: independent `N(0, 1)` real and imaginary
/// parts.
pub fn complex_normal<T, R>(rng: &mut R) -> Complex<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A random morphism with independent complex Gaussian entries scaled by
/// `1/sqrt(dom.kappa())`, so the operator norm stays `O(1)` as dimensions
/// grow and residuals of exact laws stay near machine epsilon.
pub fn morphism<T, R>(dom: &TruncObject<T>, cod: &TruncObject<T>, rng: &mut R) -> Morphism<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let scale = T::one() / T::from_usize(dom.kappa()).sqrt();
    Morphism::from_fn(dom.clone(), cod.clone(), |_, _| {
        complex_normal::<T, R>(rng).scale(scale)
    })
}

/// A Haar-like random unit state: a complex Gaussian vector, normalized.
pub fn unit_state<T, R>(obj: &TruncObject<T>, rng: &mut R) -> Morphism<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    loop {
        let coeffs: Vec<Complex<T>> = (0..obj.kappa())
            .map(|_| complex_normal::<T, R>(rng))
            .collect();
        let norm = coeffs
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm > T::from_f64(1e-6) {
            let inv = T::one() / norm;
            let coeffs: Vec<Complex<T>> = coeffs.into_iter().map(|z| z.scale(inv)).collect();
            return Morphism::ket(obj, &coeffs).expect("length matches kappa");
        }
    }
}

/// Columns of a random unitary matrix, produced by Gram-Schmidt with a
/// re-orthogonalization pass on complex Gaussian vectors. The result is
/// unitary to a small multiple of machine epsilon times the dimension, well
/// inside the default tolerance used by basis validators.
pub fn unitary_columns<T, R>(n: usize, rng: &mut R) -> Vec<Vec<Complex<T>>>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    assert!(n >= 1, "unitary dimension must be at least 1");
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex<T>> = (0..n).map(|_| complex_normal::<T, R>(rng)).collect();
        // Two projection passes keep orthogonality at machine precision.
        for _ in 0..2 {
            for u in &cols {
                let mut inner = Complex::new(T::zero(), T::zero());
                for (a, b) in u.iter().zip(v.iter()) {
                    inner += a.conj() * b;
                }
                for (a, b) in u.iter().zip(v.iter_mut()) {
                    *b -= a * inner;
                }
            }
        }
        let norm = v
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm > T::from_f64(1e-6) {
            let inv = T::one() / norm;
            for z in v.iter_mut() {
                *z = z.scale(inv);
            }
            cols.push(v);
        }
    }
    cols
}
