//! Truncated Hilbert spaces and the linear maps between them.
//!
//! An object is a finite truncation rank together with a labeled choice of
//! orthonormal basis; a morphism is a dense complex matrix indexed by the
//! chosen bases of its endpoint objects. Composition is matrix product,
//! `dagger` is conjugate transpose, and the tensor product of objects
//! concatenates their basis factors so that the flattening bijection
//! [`varsigma`] makes the monoidal structure strict: reassociating or
//! padding with the unit never changes an index, so equations between
//! composites hold as exact matrix equations.
//!
//! All public entry indices are 1-based, matching the usual bra-ket
//! conventions; row `m`, column `n` of `f: A -> B` is the amplitude
//! `<b_m| f |a_n>`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// A pair of 1-based indices produced by [`varsigma_inv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexPair {
    /// Index into the left (outer) factor, `1 <= n`.
    pub n: usize,
    /// Index into the right (inner) factor, `1 <= m <= nu`.
    pub m: usize,
}

/// Flattens a pair of 1-based indices into a single 1-based index, where the
/// right factor has dimension `nu`: `(n, m) -> (n-1)*nu + m`.
///
/// This is the bijection that identifies the chosen basis of a tensor product
/// with the lexicographic enumeration of basis pairs. Its associativity is
/// what makes the tensor product strictly associative at the matrix level.
pub fn varsigma(n: usize, m: usize, nu: usize) -> Result<usize> {
    if nu == 0 {
        return Err(Error::IndexOutOfRange {
            what: "nu",
            value: 0,
            range: "1..".into(),
        });
    }
    if n == 0 {
        return Err(Error::IndexOutOfRange {
            what: "n",
            value: 0,
            range: "1..".into(),
        });
    }
    if m == 0 || m > nu {
        return Err(Error::IndexOutOfRange {
            what: "m",
            value: m as i64,
            range: format!("1..={nu}"),
        });
    }
    Ok((n - 1) * nu + m)
}

/// Inverse of [`varsigma`]: recovers the index pair from a flattened index.
pub fn varsigma_inv(k: usize, nu: usize) -> Result<IndexPair> {
    if nu == 0 {
        return Err(Error::IndexOutOfRange {
            what: "nu",
            value: 0,
            range: "1..".into(),
        });
    }
    if k == 0 {
        return Err(Error::IndexOutOfRange {
            what: "k",
            value: 0,
            range: "1..".into(),
        });
    }
    Ok(IndexPair {
        n: (k - 1) / nu + 1,
        m: (k - 1) % nu + 1,
    })
}

/// An explicit unitary change of basis carried by a [`BasisFactor::Custom`]
/// factor. Columns are the basis vectors, expressed in the chosen basis.
#[derive(Debug)]
pub struct UnitaryBasis<T: Scalar> {
    pub(crate) mat: Mat<T>,
}

impl<T: Scalar> UnitaryBasis<T> {
    /// Dimension of the space the basis spans.
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// 1-based entry: coefficient of chosen-basis vector `row` in basis
    /// vector `col`.
    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        assert!(
            (1..=self.mat.rows()).contains(&row) && (1..=self.mat.cols()).contains(&col),
            "unitary basis entry ({row},{col}) out of range for dim {}",
            self.mat.rows()
        );
        self.mat.get(row - 1, col - 1)
    }
}

/// One tensor factor of an object's basis choice.
#[derive(Debug, Clone)]
pub enum BasisFactor<T: Scalar> {
    /// The chosen (standard) basis of the given dimension.
    Standard { dim: usize },
    /// The normalized plane-wave basis of a circle of circumference `length`
    /// truncated to modes `|n| <= half_width`; dimension `2*half_width + 1`.
    Fourier { length: T, half_width: usize },
    /// An explicit unitary change of basis.
    Custom(Arc<UnitaryBasis<T>>),
}

impl<T: Scalar> BasisFactor<T> {
    /// Dimension contributed by this factor.
    pub fn dim(&self) -> usize {
        match self {
            BasisFactor::Standard { dim } => *dim,
            BasisFactor::Fourier { half_width, .. } => 2 * half_width + 1,
            BasisFactor::Custom(u) => u.dim(),
        }
    }
}

impl<T: Scalar> PartialEq for BasisFactor<T> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BasisFactor::Standard { dim: a }, BasisFactor::Standard { dim: b }) => a == b,
            (
                BasisFactor::Fourier {
                    length: l1,
                    half_width: w1,
                },
                BasisFactor::Fourier {
                    length: l2,
                    half_width: w2,
                },
            ) => l1 == l2 && w1 == w2,
            (BasisFactor::Custom(a), BasisFactor::Custom(b)) => {
                Arc::ptr_eq(a, b) || a.mat == b.mat
            }
            _ => false,
        }
    }
}

/// A truncated Hilbert space: a dimension (`kappa`) with a labeled choice of
/// orthonormal basis, kept as a list of tensor factors.
///
/// Two objects are equal when their factor lists are equal; the label is
/// documentation only and never participates in equality. Tensoring
/// concatenates factor lists, merging adjacent `Standard` factors and
/// dropping one-dimensional `Standard` factors, so that the tensor product
/// is strictly associative and strictly unital: `(A (x) B) (x) C`,
/// `A (x) (B (x) C)`, and `A (x) I` are the *same* object, not merely
/// isomorphic ones.
#[derive(Debug, Clone)]
pub struct TruncObject<T: Scalar> {
    label: Arc<str>,
    factors: Vec<BasisFactor<T>>,
    kappa: usize,
}

impl<T: Scalar> PartialEq for TruncObject<T> {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

fn normalized_factors<T: Scalar>(raw: Vec<BasisFactor<T>>) -> Vec<BasisFactor<T>> {
    let mut out: Vec<BasisFactor<T>> = Vec::with_capacity(raw.len());
    for f in raw {
        match f {
            BasisFactor::Standard { dim } if dim == 1 => {}
            BasisFactor::Standard { dim } => match out.last_mut() {
                Some(BasisFactor::Standard { dim: d }) => *d *= dim,
                _ => out.push(BasisFactor::Standard { dim }),
            },
            other => out.push(other),
        }
    }
    out
}

impl<T: Scalar> TruncObject<T> {
    fn from_factors(label: impl Into<Arc<str>>, raw: Vec<BasisFactor<T>>) -> Self {
        let factors = normalized_factors(raw);
        let kappa = factors.iter().map(BasisFactor::dim).product::<usize>();
        debug_assert!(kappa >= 1);
        TruncObject {
            label: label.into(),
            factors,
            kappa,
        }
    }

    /// The tensor unit: the one-dimensional space with its chosen basis.
    pub fn unit() -> Self {
        TruncObject::from_factors("I", Vec::new())
    }

    /// A `kappa`-dimensional space in its chosen basis. `kappa` must be at
    /// least 1; the one-dimensional case is the tensor unit.
    pub fn standard(kappa: usize, label: &str) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::IndexOutOfRange {
                what: "kappa",
                value: 0,
                range: "1..".into(),
            });
        }
        Ok(TruncObject::from_factors(
            label,
            vec![BasisFactor::Standard { dim: kappa }],
        ))
    }

    /// A space tagged with the truncated plane-wave basis of a circle of
    /// circumference `length` (dimension `2*half_width + 1`).
    pub fn fourier(length: T, half_width: usize, label: &str) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::ConfigInvalid(format!(
                "circle circumference must be positive and finite, got {length}"
            )));
        }
        Ok(TruncObject::from_factors(
            label,
            vec![BasisFactor::Fourier { length, half_width }],
        ))
    }

    /// A space tagged with an explicit orthonormal basis, given as columns in
    /// the chosen basis. Fails with [`Error::NotOrthonormal`] if the matrix
    /// is not unitary to the scalar's default tolerance (in operator norm).
    pub fn custom(columns: &[Vec<Complex<T>>], label: &str) -> Result<Self> {
        Self::custom_with_tolerance(columns, label, T::default_tolerance())
    }

    /// [`TruncObject::custom`] with an explicit unitarity tolerance.
    pub fn custom_with_tolerance(
        columns: &[Vec<Complex<T>>],
        label: &str,
        tolerance: T,
    ) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(Error::IndexOutOfRange {
                what: "kappa",
                value: 0,
                range: "1..".into(),
            });
        }
        for col in columns {
            if col.len() != n {
                return Err(Error::ShapeMismatch {
                    expected_rows: n,
                    expected_cols: n,
                    rows: col.len(),
                    cols: n,
                });
            }
        }
        let mat = Mat::from_fn(n, n, |r, c| columns[c][r]);
        let residual = mat.adjoint().mul(&mat).sub(&Mat::identity(n)).op_norm();
        if !(residual <= tolerance) {
            return Err(Error::NotOrthonormal {
                residual: residual.to_f64(),
                tolerance: tolerance.to_f64(),
            });
        }
        Ok(TruncObject::from_factors(
            label,
            vec![BasisFactor::Custom(Arc::new(UnitaryBasis { mat }))],
        ))
    }

    /// Truncation rank: the dimension of the space.
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Human-readable label (not part of object equality).
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Returns a copy of this object carrying a different label. Labels do
    /// not affect equality, composition, or anything else observable.
    pub fn relabeled(&self, label: &str) -> Self {
        TruncObject {
            label: label.into(),
            factors: self.factors.clone(),
            kappa: self.kappa,
        }
    }

    /// The basis factors making up this object's tensor structure.
    pub fn factors(&self) -> &[BasisFactor<T>] {
        &self.factors
    }

    /// True for the tensor unit.
    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    /// Splits the factor list at a dimension boundary: returns `(left,
    /// right)` with `left.kappa() == left_dim`. `Standard` factors may be
    /// split anywhere their dimension factors; `Fourier` and `Custom`
    /// factors are atomic. Fails with [`Error::ShapeNotFactorable`] when the
    /// boundary falls inside an atomic factor or does not divide a standard
    /// one.
    pub fn split_at_dim(&self, left_dim: usize) -> Result<(Self, Self)> {
        if left_dim == 0 || self.kappa % left_dim != 0 {
            return Err(Error::ShapeNotFactorable(format!(
                "dimension {left_dim} does not divide kappa = {}",
                self.kappa
            )));
        }
        let mut left: Vec<BasisFactor<T>> = Vec::new();
        let mut right: Vec<BasisFactor<T>> = Vec::new();
        let mut acc = 1usize;
        for f in &self.factors {
            let d = f.dim();
            if acc * d <= left_dim {
                acc *= d;
                left.push(f.clone());
            } else if acc >= left_dim {
                right.push(f.clone());
            } else {
                // Boundary falls inside this factor.
                let need = left_dim / acc;
                match f {
                    BasisFactor::Standard { dim }
                        if left_dim % acc == 0 && dim % need == 0 =>
                    {
                        left.push(BasisFactor::Standard { dim: need });
                        right.push(BasisFactor::Standard { dim: dim / need });
                        acc *= need;
                    }
                    _ => {
                        return Err(Error::ShapeNotFactorable(format!(
                            "boundary {left_dim} falls inside an atomic factor of {self}"
                        )));
                    }
                }
            }
        }
        if acc != left_dim {
            return Err(Error::ShapeNotFactorable(format!(
                "factors of {self} do not split at dimension {left_dim}"
            )));
        }
        Ok((
            TruncObject::from_factors(self.label.clone(), left),
            TruncObject::from_factors(self.label.clone(), right),
        ))
    }
}

impl<T: Scalar> fmt::Display for TruncObject<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(kappa={}", self.label, self.kappa)?;
        for factor in &self.factors {
            match factor {
                BasisFactor::Standard { dim } => write!(f, ", std[{dim}]")?,
                BasisFactor::Fourier { length, half_width } => {
                    write!(f, ", fourier[L={length}, w={half_width}]")?
                }
                BasisFactor::Custom(u) => write!(f, ", custom[{}]", u.dim())?,
            }
        }
        write!(f, ")")
    }
}

/// Tensor product of objects: concatenates basis factor lists (with
/// normalization), so the product is strictly associative and the unit is
/// strictly neutral.
pub fn tensor_obj<T: Scalar>(a: &TruncObject<T>, b: &TruncObject<T>) -> TruncObject<T> {
    let label: Arc<str> = if a.is_unit() {
        b.label.clone()
    } else if b.is_unit() {
        a.label.clone()
    } else {
        format!("{}(x){}", a.label, b.label).into()
    };
    let mut raw = Vec::with_capacity(a.factors.len() + b.factors.len());
    raw.extend(a.factors.iter().cloned());
    raw.extend(b.factors.iter().cloned());
    TruncObject::from_factors(label, raw)
}

/// A linear map between truncated Hilbert spaces, stored as a dense complex
/// matrix with `cod.kappa()` rows and `dom.kappa()` columns.
///
/// Morphisms are immutable: every operation returns a new value. Equality is
/// exact (objects equal and entries bit-for-bit equal); use
/// [`crate::analysis::operator_norm`] of a difference for approximate
/// comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism<T: Scalar> {
    dom: TruncObject<T>,
    cod: TruncObject<T>,
    mat: Mat<T>,
}

impl<T: Scalar> Morphism<T> {
    /// Builds a morphism from row-major entries (row `m`, column `n` is the
    /// amplitude from the `n`-th domain basis vector to the `m`-th codomain
    /// basis vector).
    pub fn new(
        dom: TruncObject<T>,
        cod: TruncObject<T>,
        entries: Vec<Complex<T>>,
    ) -> Result<Self> {
        let (rows, cols) = (cod.kappa(), dom.kappa());
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: entries.len() / cols.max(1),
                cols,
            });
        }
        Ok(Morphism {
            dom,
            cod,
            mat: Mat::from_vec(rows, cols, entries),
        })
    }

    /// Builds a morphism from a 1-based entry function `f(m, n)` with `m`
    /// ranging over codomain indices and `n` over domain indices.
    pub fn from_fn(
        dom: TruncObject<T>,
        cod: TruncObject<T>,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mat = Mat::from_fn(cod.kappa(), dom.kappa(), |r, c| f(r + 1, c + 1));
        Morphism { dom, cod, mat }
    }

    /// The identity on an object: the truncating projector onto its basis.
    pub fn identity(obj: &TruncObject<T>) -> Self {
        Morphism {
            dom: obj.clone(),
            cod: obj.clone(),
            mat: Mat::identity(obj.kappa()),
        }
    }

    /// The zero morphism.
    pub fn zero(dom: &TruncObject<T>, cod: &TruncObject<T>) -> Self {
        Morphism {
            dom: dom.clone(),
            cod: cod.clone(),
            mat: Mat::zeros(cod.kappa(), dom.kappa()),
        }
    }

    /// A scalar, as a morphism on the tensor unit.
    pub fn scalar(z: Complex<T>) -> Self {
        let unit = TruncObject::unit();
        Morphism {
            dom: unit.clone(),
            cod: unit,
            mat: Mat::from_vec(1, 1, vec![z]),
        }
    }

    /// A state (morphism from the unit) with the given coefficients in the
    /// codomain's chosen basis.
    pub fn ket(obj: &TruncObject<T>, coeffs: &[Complex<T>]) -> Result<Self> {
        if coeffs.len() != obj.kappa() {
            return Err(Error::ShapeMismatch {
                expected_rows: obj.kappa(),
                expected_cols: 1,
                rows: coeffs.len(),
                cols: 1,
            });
        }
        Ok(Morphism {
            dom: TruncObject::unit(),
            cod: obj.clone(),
            mat: Mat::from_vec(obj.kappa(), 1, coeffs.to_vec()),
        })
    }

    /// The `n`-th chosen-basis vector as a state (1-based).
    pub fn basis_state(obj: &TruncObject<T>, n: usize) -> Result<Self> {
        if n == 0 || n > obj.kappa() {
            return Err(Error::IndexOutOfRange {
                what: "basis index",
                value: n as i64,
                range: format!("1..={}", obj.kappa()),
            });
        }
        let mut coeffs = vec![Complex::zero(); obj.kappa()];
        coeffs[n - 1] = Complex::new(T::one(), T::zero());
        Morphism::ket(obj, &coeffs)
    }

    pub fn dom(&self) -> &TruncObject<T> {
        &self.dom
    }

    pub fn cod(&self) -> &TruncObject<T> {
        &self.cod
    }

    /// Number of rows (`cod().kappa()`).
    pub fn rows(&self) -> usize {
        self.mat.rows()
    }

    /// Number of columns (`dom().kappa()`).
    pub fn cols(&self) -> usize {
        self.mat.cols()
    }

    /// 1-based entry access: row `m`, column `n`.
    ///
    /// # Panics
    /// Panics if an index is 0 or exceeds the corresponding dimension.
    pub fn entry(&self, m: usize, n: usize) -> Complex<T> {
        assert!(
            (1..=self.rows()).contains(&m) && (1..=self.cols()).contains(&n),
            "entry ({m},{n}) out of range for a {}x{} morphism",
            self.rows(),
            self.cols()
        );
        self.mat.get(m - 1, n - 1)
    }

    /// Row-major view of all entries.
    pub fn entries_row_major(&self) -> &[Complex<T>] {
        self.mat.data()
    }

    /// Conjugate transpose, with domain and codomain swapped.
    pub fn dagger(&self) -> Self {
        Morphism {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            mat: self.mat.adjoint(),
        }
    }

    /// Entrywise sum; both morphisms must live in the same hom-set.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.require_same_homset(rhs)?;
        Ok(Morphism {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            mat: self.mat.add(&rhs.mat),
        })
    }

    /// Entrywise difference; both morphisms must live in the same hom-set.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.require_same_homset(rhs)?;
        Ok(Morphism {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            mat: self.mat.sub(&rhs.mat),
        })
    }

    /// Scalar multiple.
    pub fn scaled(&self, z: Complex<T>) -> Self {
        Morphism {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            mat: self.mat.scale(z),
        }
    }

    /// Square root of the sum of squared entry magnitudes. For states this
    /// is the vector 2-norm.
    pub fn frobenius_norm(&self) -> T {
        self.mat.frobenius_norm()
    }

    fn require_same_homset(&self, rhs: &Self) -> Result<()> {
        if self.dom != rhs.dom || self.cod != rhs.cod {
            return Err(Error::DomainMismatch {
                expected: format!("{} -> {}", self.dom, self.cod),
                found: format!("{} -> {}", rhs.dom, rhs.cod),
            });
        }
        Ok(())
    }

    pub(crate) fn mat(&self) -> &Mat<T> {
        &self.mat
    }

    pub(crate) fn from_mat(dom: TruncObject<T>, cod: TruncObject<T>, mat: Mat<T>) -> Self {
        debug_assert_eq!(mat.rows(), cod.kappa());
        debug_assert_eq!(mat.cols(), dom.kappa());
        Morphism { dom, cod, mat }
    }
}

/// Composition `g (after) f`: applies `f` first. Fails with
/// [`Error::DomainMismatch`] unless `f`'s codomain equals `g`'s domain.
pub fn compose<T: Scalar>(g: &Morphism<T>, f: &Morphism<T>) -> Result<Morphism<T>> {
    if f.cod != g.dom {
        return Err(Error::DomainMismatch {
            expected: g.dom.to_string(),
            found: f.cod.to_string(),
        });
    }
    Ok(Morphism {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        mat: g.mat.mul(&f.mat),
    })
}

/// Tensor product of morphisms. Entries satisfy
/// `(f (x) g)[varsigma(m, m'), varsigma(n, n')] = f[m, n] * g[m', n']`
/// with the flattening taken against the right-hand dimensions.
pub fn tensor<T: Scalar>(f: &Morphism<T>, g: &Morphism<T>) -> Morphism<T> {
    Morphism {
        dom: tensor_obj(&f.dom, &g.dom),
        cod: tensor_obj(&f.cod, &g.cod),
        mat: f.mat.kron(&g.mat),
    }
}

/// Conjugate transpose (free-function form of [`Morphism::dagger`]).
pub fn dagger<T: Scalar>(f: &Morphism<T>) -> Morphism<T> {
    f.dagger()
}

/// The symmetry `A (x) B -> B (x) A` permuting flattened basis indices:
/// `varsigma(n, m)` is sent to `varsigma(m, n)`.
pub fn braiding<T: Scalar>(a: &TruncObject<T>, b: &TruncObject<T>) -> Morphism<T> {
    let (ka, kb) = (a.kappa(), b.kappa());
    let dom = tensor_obj(a, b);
    let cod = tensor_obj(b, a);
    let mut mat = Mat::zeros(ka * kb, ka * kb);
    let one = Complex::new(T::one(), T::zero());
    for n in 0..ka {
        for m in 0..kb {
            // 0-based flattenings of (n, m) against nu = kb and (m, n)
            // against nu = ka.
            mat.set(m * ka + n, n * kb + m, one);
        }
    }
    Morphism { dom, cod, mat }
}
