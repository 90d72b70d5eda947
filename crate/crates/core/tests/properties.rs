//! Property-based tests of the algebraic laws the library is built on:
//! index flattening is a bijection, modular labels form an abelian group,
//! the dagger is an involutive antihomomorphism, the tensor product obeys
//! the interchange law, and the operator norm behaves like a norm.

use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use starhilb::analysis::operator_norm;
use starhilb::category::{braiding, compose, tensor, varsigma, varsigma_inv};
use starhilb::circle::{theta, theta_inv, ModInt};
use starhilb::frobenius::trace;
use starhilb::random;
use starhilb::{Morphism64, TruncObject64};

/// Absolute slack for identities that only reorder floating-point sums.
const EXACT_REORDER_TOL: f64 = 1e-12;
/// Relative slack for spectral quantities computed by the Jacobi solver.
const SPECTRAL_TOL: f64 = 1e-9;

fn obj(kappa: usize, label: &str) -> TruncObject64 {
    TruncObject64::standard(kappa, label).expect("valid rank")
}

fn random_morphism(dom_dim: usize, cod_dim: usize, seed: u64) -> Morphism64 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    random::morphism(&obj(dom_dim, "dom"), &obj(cod_dim, "cod"), &mut rng)
}

fn diff_norm(a: &Morphism64, b: &Morphism64) -> f64 {
    a.sub(b).expect("same shape").frobenius_norm()
}

fn small_dim() -> impl Strategy<Value = usize> {
    2usize..=8
}

proptest! {
    /// Flattening a valid index pair and splitting it back is the identity.
    #[test]
    fn varsigma_then_inverse_is_identity(
        n in 1usize..=64,
        m in 1usize..=64,
        nu in 1usize..=64,
    ) {
        let m = (m - 1) % nu + 1;
        let k = varsigma(n, m, nu).unwrap();
        let pair = varsigma_inv(k, nu).unwrap();
        prop_assert_eq!((pair.n, pair.m), (n, m));
    }

    /// Splitting any flattened index and re-flattening recovers it, and the
    /// recovered inner index respects its range.
    #[test]
    fn inverse_then_varsigma_is_identity(k in 1usize..=4096, nu in 1usize..=64) {
        let pair = varsigma_inv(k, nu).unwrap();
        prop_assert!(1 <= pair.m && pair.m <= nu);
        prop_assert_eq!(varsigma(pair.n, pair.m, nu).unwrap(), k);
    }

    /// Out-of-range inner indices are rejected rather than silently wrapped.
    #[test]
    fn varsigma_rejects_inner_index_outside_range(n in 1usize..=64, nu in 1usize..=64) {
        prop_assert!(varsigma(n, 0, nu).is_err());
        prop_assert!(varsigma(n, nu + 1, nu).is_err());
    }

    /// Modular mode labels form an abelian group under `oplus`.
    #[test]
    fn mod_int_addition_is_an_abelian_group(
        a in -1_000_000i64..=1_000_000,
        b in -1_000_000i64..=1_000_000,
        c in -1_000_000i64..=1_000_000,
        omega in 1usize..=64,
    ) {
        let (x, y, z) = (
            ModInt::new(a, omega),
            ModInt::new(b, omega),
            ModInt::new(c, omega),
        );
        let zero = ModInt::new(0, omega);
        prop_assert_eq!(x.oplus(y).oplus(z), x.oplus(y.oplus(z)));
        prop_assert_eq!(x.oplus(y), y.oplus(x));
        prop_assert_eq!(x.oplus(zero), x);
        prop_assert_eq!(x.oplus(x.inverse()), zero);
        // Representatives stay centered: re-normalizing is a no-op.
        let sum = x.oplus(y);
        prop_assert_eq!(ModInt::new(sum.value(), omega), sum);
    }

    /// The zigzag mode enumeration is a bijection between signed modes and
    /// 1-based basis positions.
    #[test]
    fn theta_round_trips_both_ways(n in -1_000_000i64..=1_000_000, l in 1usize..=2_000_000) {
        prop_assert_eq!(theta_inv(theta(n)).unwrap(), n);
        prop_assert_eq!(theta(theta_inv(l).unwrap()), l);
    }

    /// Taking the dagger twice returns the original morphism exactly.
    #[test]
    fn dagger_is_an_involution(
        rows in small_dim(),
        cols in small_dim(),
        seed in any::<u64>(),
    ) {
        let f = random_morphism(cols, rows, seed);
        let twice = f.dagger().dagger();
        prop_assert_eq!(twice.entries_row_major(), f.entries_row_major());
    }

    /// The dagger reverses composition: `(g . f)^† = f^† . g^†`.
    #[test]
    fn dagger_is_an_antihomomorphism(
        a in small_dim(),
        b in small_dim(),
        c in small_dim(),
        seed in any::<u64>(),
    ) {
        let f = random_morphism(a, b, seed);
        let g = random_morphism(b, c, seed.wrapping_add(1));
        let lhs = compose(&g, &f).unwrap().dagger();
        let rhs = compose(&f.dagger(), &g.dagger()).unwrap();
        let scale = 1.0 + lhs.frobenius_norm();
        prop_assert!(diff_norm(&lhs, &rhs) <= EXACT_REORDER_TOL * scale);
    }

    /// Tensoring and composing commute: the interchange law
    /// `(g1 (x) g2) . (f1 (x) f2) = (g1 . f1) (x) (g2 . f2)`.
    #[test]
    fn tensor_and_composition_interchange(
        a in 2usize..=4,
        b in 2usize..=4,
        c in 2usize..=4,
        seed in any::<u64>(),
    ) {
        let f1 = random_morphism(a, b, seed);
        let g1 = random_morphism(b, c, seed.wrapping_add(1));
        let f2 = random_morphism(c, a, seed.wrapping_add(2));
        let g2 = random_morphism(a, b, seed.wrapping_add(3));
        let lhs = compose(&tensor(&g1, &g2), &tensor(&f1, &f2)).unwrap();
        let rhs = tensor(&compose(&g1, &f1).unwrap(), &compose(&g2, &f2).unwrap());
        let scale = 1.0 + rhs.frobenius_norm();
        prop_assert!(diff_norm(&lhs, &rhs) <= EXACT_REORDER_TOL * scale);
    }

    /// Swapping two factors twice is exactly the identity permutation.
    #[test]
    fn braiding_is_an_involution(a in small_dim(), b in small_dim()) {
        let (oa, ob) = (obj(a, "a"), obj(b, "b"));
        let there = braiding(&oa, &ob);
        let back = braiding(&ob, &oa);
        let round = compose(&back, &there).unwrap();
        let id = Morphism64::identity(round.dom());
        prop_assert_eq!(diff_norm(&round, &id), 0.0);
    }

    /// The tensor product of identities is exactly the identity of the
    /// tensor product.
    #[test]
    fn tensor_of_identities_is_the_identity(a in small_dim(), b in small_dim()) {
        let (oa, ob) = (obj(a, "a"), obj(b, "b"));
        let lhs = tensor(&Morphism64::identity(&oa), &Morphism64::identity(&ob));
        let id = Morphism64::identity(lhs.dom());
        prop_assert_eq!(diff_norm(&lhs, &id), 0.0);
    }

    /// The operator norm is absolutely homogeneous.
    #[test]
    fn operator_norm_is_homogeneous(
        rows in small_dim(),
        cols in small_dim(),
        seed in any::<u64>(),
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let f = random_morphism(cols, rows, seed);
        let z = Complex::new(re, im);
        let lhs = operator_norm(&f.scaled(z));
        let rhs = z.norm() * operator_norm(&f);
        prop_assert!((lhs - rhs).abs() <= SPECTRAL_TOL * (1.0 + rhs));
    }

    /// The operator norm obeys the triangle inequality.
    #[test]
    fn operator_norm_obeys_the_triangle_inequality(
        rows in small_dim(),
        cols in small_dim(),
        seed in any::<u64>(),
    ) {
        let f = random_morphism(cols, rows, seed);
        let g = random_morphism(cols, rows, seed.wrapping_add(1));
        let sum = f.add(&g).unwrap();
        let bound = operator_norm(&f) + operator_norm(&g);
        prop_assert!(operator_norm(&sum) <= bound * (1.0 + SPECTRAL_TOL) + SPECTRAL_TOL);
    }

    /// The operator norm is submultiplicative under composition.
    #[test]
    fn operator_norm_is_submultiplicative(
        a in small_dim(),
        b in small_dim(),
        c in small_dim(),
        seed in any::<u64>(),
    ) {
        let f = random_morphism(a, b, seed);
        let g = random_morphism(b, c, seed.wrapping_add(1));
        let bound = operator_norm(&g) * operator_norm(&f);
        let lhs = operator_norm(&compose(&g, &f).unwrap());
        prop_assert!(lhs <= bound * (1.0 + SPECTRAL_TOL) + SPECTRAL_TOL);
    }

    /// Applying a morphism to a unit vector never exceeds its operator norm.
    #[test]
    fn operator_norm_bounds_the_image_of_unit_states(
        rows in small_dim(),
        cols in small_dim(),
        seed in any::<u64>(),
    ) {
        let f = random_morphism(cols, rows, seed);
        let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(1));
        let xi = random::unit_state(f.dom(), &mut rng);
        let image = compose(&f, &xi).unwrap();
        let bound = operator_norm(&f) * xi.frobenius_norm();
        prop_assert!(image.frobenius_norm() <= bound * (1.0 + 1e-10));
    }

    /// The trace is cyclic: `tr(g . f) = tr(f . g)`.
    #[test]
    fn trace_is_cyclic(
        a in small_dim(),
        b in small_dim(),
        seed in any::<u64>(),
    ) {
        let f = random_morphism(a, b, seed);
        let g = random_morphism(b, a, seed.wrapping_add(1));
        let lhs = trace(&compose(&g, &f).unwrap()).unwrap();
        let rhs = trace(&compose(&f, &g).unwrap()).unwrap();
        let scale = 1.0 + lhs.norm();
        prop_assert!((lhs - rhs).norm() <= EXACT_REORDER_TOL * scale);
    }
}
