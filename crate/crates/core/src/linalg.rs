//! Dense complex matrices, density matrices and effects.
//!
//! Every operator in the toolkit is a small dense square matrix. States and
//! effects validate their invariants once, at construction, so the rest of the
//! crate can treat them as trusted values.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hermiticity, trace and positivity tolerance used when none is given.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Relative eigenvalue cutoff separating support from kernel.
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-10;

pub type Vector = DVector<Complex64>;

/// Dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Sum of eigenprojectors whose eigenvalue satisfies `keep`.
    pub fn projector_where(&self, keep: impl Fn(f64) -> bool) -> ComplexMatrix {
        let dim = self.vectors.nrows();
        let mut out = DMatrix::zeros(dim, dim);
        for (k, &value) in self.values.iter().enumerate() {
            if keep(value) {
                let v = self.vectors.column(k);
                out += v * v.adjoint();
            }
        }
        ComplexMatrix(out)
    }

    /// Rebuild `sum f(lambda_k) |v_k><v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let dim = self.vectors.nrows();
        let mut out = DMatrix::zeros(dim, dim);
        for (k, &value) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * Complex64::new(f(value), 0.0);
        }
        ComplexMatrix(out)
    }
}

impl ComplexMatrix {
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare { rows: inner.nrows(), cols: inner.ncols() });
        }
        if inner.nrows() == 0 {
            return Err(Error::Empty);
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(inner))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let values = DVector::from_iterator(diag.len(), diag.iter().map(|&d| Complex64::new(d, 0.0)));
        Self(DMatrix::from_diagonal(&values))
    }

    /// Builds a matrix from row-major real and imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let dim = re.len();
        if im.len() != dim {
            return Err(Error::Malformed(format!("re has {} rows, im has {}", dim, im.len())));
        }
        for (r, row) in re.iter().chain(im.iter()).enumerate() {
            if row.len() != dim {
                return Err(Error::Malformed(format!(
                    "row {} has {} entries, expected {}",
                    r % dim.max(1),
                    row.len(),
                    dim
                )));
            }
        }
        Self::new(DMatrix::from_fn(dim, dim, |i, j| Complex64::new(re[i][j], im[i][j])))
    }

    /// `|u><v|`.
    pub fn outer(u: &Vector, v: &Vector) -> Self {
        Self(u * v.adjoint())
    }

    /// `|v><v|`.
    pub fn projector(v: &Vector) -> Self {
        Self::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(&self.0 * Complex64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |X - X^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(X + X^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Spectral decomposition of the hermitian part.
    pub fn eigh(&self) -> Spectrum {
        let eig = self.hermitian_part().0.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), order.len(), |i, c| eig.eigenvectors[(i, order[c])]);
        Spectrum { values, vectors }
    }

    /// Positive square root, with negative rounding noise in the spectrum clipped.
    pub fn psd_sqrt(&self) -> Self {
        self.eigh().map(|v| v.max(0.0).sqrt())
    }

    /// Sum of absolute eigenvalues of the hermitian part.
    pub fn trace_norm(&self) -> f64 {
        self.eigh().values.iter().map(|v| v.abs()).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(i, j)] * other.0[(j, i)];
            }
        }
        acc
    }

    /// `U * self * U^dagger` for a possibly rectangular `U`.
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Self {
        Self(u * &self.0 * u.adjoint())
    }

    /// `<v| self |v>`.
    pub fn expectation(&self, v: &Vector) -> Complex64 {
        (v.adjoint() * &self.0 * v)[(0, 0)]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// JSON exchange form `{"dim": n, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixExchange {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixExchange {
    fn from(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let rows = |part: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| part(&m.0[(i, j)])).collect()).collect()
        };
        Self { dim: n, re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl TryFrom<MatrixExchange> for ComplexMatrix {
    type Error = Error;

    fn try_from(x: MatrixExchange) -> Result<Self> {
        if x.re.len() != x.dim {
            return Err(Error::Malformed(format!("dim is {} but re has {} rows", x.dim, x.re.len())));
        }
        ComplexMatrix::from_parts(&x.re, &x.im)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixExchange::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = MatrixExchange::deserialize(d)?;
        ComplexMatrix::try_from(x).map_err(serde::de::Error::custom)
    }
}

/// Density matrix: hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    matrix: ComplexMatrix,
    tolerance: f64,
}

impl State {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tolerance {
            return Err(Error::NotHermitian { defect });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tolerance {
            return Err(Error::TraceNotOne { trace });
        }
        let min_eigenvalue = matrix.eigh().min();
        if min_eigenvalue < -tolerance {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix, tolerance })
    }

    /// `|v><v|` for a unit vector.
    pub fn pure(v: &Vector) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > DEFAULT_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(ComplexMatrix::projector(v))
    }

    /// Computational basis state `|index><index|`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self { matrix: ComplexMatrix::from_diagonal(&diag), tolerance: DEFAULT_TOLERANCE }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64), tolerance: DEFAULT_TOLERANCE }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(diag))
    }

    /// `weight * a + (1 - weight) * b`.
    pub fn mix(weight: f64, a: &State, b: &State) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::WeightOutOfRange(weight));
        }
        check_dims(a.dim(), b.dim())?;
        let matrix = &a.matrix.scale(weight) + &b.matrix.scale(1.0 - weight);
        Self::with_tolerance(matrix, a.tolerance.max(b.tolerance))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `Tr(X^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= self.tolerance.max(1e-12) * 10.0
    }

    /// The unit vector `v` with `X = |v><v|`, up to global phase.
    pub fn pure_vector(&self) -> Result<Vector> {
        if !self.is_pure() {
            return Err(Error::NotPure { purity: self.purity() });
        }
        let spectrum = self.matrix.eigh();
        let last = spectrum.values.len() - 1;
        Ok(spectrum.vectors.column(last).into_owned())
    }
}

impl Serialize for State {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        State::new(m).map_err(serde::de::Error::custom)
    }
}

/// Effect (observable) `0 <= A <= I`.
///
/// An effect produced by [`Effect::complement`] remembers the matrix it was
/// derived from, so complementing twice returns the original bit for bit.
#[derive(Clone, Debug)]
pub struct Effect {
    matrix: ComplexMatrix,
    tolerance: f64,
    complement_of: Option<Arc<ComplexMatrix>>,
}

impl PartialEq for Effect {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.tolerance == other.tolerance
    }
}

impl Effect {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tolerance {
            return Err(Error::NotHermitian { defect });
        }
        let spectrum = matrix.eigh();
        let (min, max) = (spectrum.min(), spectrum.max());
        if min < -tolerance || max > 1.0 + tolerance {
            return Err(Error::SpectrumOutOfRange { min, max });
        }
        Ok(Self { matrix, tolerance, complement_of: None })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim), tolerance: DEFAULT_TOLERANCE, complement_of: None }
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(dim), tolerance: DEFAULT_TOLERANCE, complement_of: None }
    }

    /// `|v><v|` for a unit vector.
    pub fn projector(v: &Vector) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > DEFAULT_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(ComplexMatrix::projector(v))
    }

    /// `|index><index|`.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self { matrix: ComplexMatrix::from_diagonal(&diag), tolerance: DEFAULT_TOLERANCE, complement_of: None }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `I - A`: the effect of the negated event.
    pub fn complement(&self) -> Effect {
        let matrix = match &self.complement_of {
            Some(origin) => (**origin).clone(),
            None => &ComplexMatrix::identity(self.dim()) - &self.matrix,
        };
        Effect { matrix, tolerance: self.tolerance, complement_of: Some(Arc::new(self.matrix.clone())) }
    }

    /// `(1 - eta) A + eta I / d`: a detector that answers at random with
    /// probability `eta`.
    pub fn degrade(&self, eta: f64) -> Result<Effect> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("noise {eta} outside [0, 1]")));
        }
        let d = self.dim() as f64;
        let matrix = &self.matrix.scale(1.0 - eta) + &ComplexMatrix::identity(self.dim()).scale(eta / d);
        Effect::with_tolerance(matrix, self.tolerance)
    }
}

impl Serialize for Effect {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Effect {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        Effect::new(m).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Slack allowed on the trace of a product of two validated operators.
fn combined_slack(a_tol: f64, x_tol: f64, dim: usize) -> f64 {
    (a_tol + x_tol + 1e3 * f64::EPSILON) * dim as f64
}

/// Event probability `(A, X) = Tr[A X]`.
pub fn prob(a: &Effect, x: &State) -> Result<f64> {
    check_dims(a.dim(), x.dim())?;
    let t = a.matrix.trace_product(&x.matrix);
    let slack = combined_slack(a.tolerance, x.tolerance, a.dim());
    if t.im.abs() > slack {
        return Err(Error::ImaginaryResidue { residue: t.im.abs() });
    }
    clamp_probability(t.re, slack)
}

pub(crate) fn clamp_probability(value: f64, slack: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else if value < 0.0 && value >= -slack {
        Ok(0.0)
    } else if value > 1.0 && value <= 1.0 + slack {
        Ok(1.0)
    } else {
        Err(Error::ProbabilityOutOfRange { value })
    }
}

pub fn complement(a: &Effect) -> Effect {
    a.complement()
}

/// Projector onto the eigenvectors of `X` whose eigenvalue exceeds
/// `rank_cutoff * max_eigenvalue`.
pub fn support_projector(x: &State, rank_cutoff: f64) -> Result<Effect> {
    if rank_cutoff.is_nan() || rank_cutoff <= 0.0 {
        return Err(Error::InvalidParameter(format!("rank cutoff {rank_cutoff} must be positive")));
    }
    let spectrum = x.matrix.eigh();
    let top = spectrum.max();
    if top.is_nan() || top <= 0.0 {
        return Err(Error::DegenerateSupport);
    }
    let threshold = rank_cutoff * top;
    let p = spectrum.projector_where(|v| v > threshold);
    Ok(Effect { matrix: p, tolerance: x.tolerance, complement_of: None })
}

/// `I - support_projector(X)`.
pub fn kernel_projector(x: &State, rank_cutoff: f64) -> Result<Effect> {
    Ok(support_projector(x, rank_cutoff)?.complement())
}

/// Rank of the support of `X` at the given relative cutoff.
pub fn support_rank(x: &State, rank_cutoff: f64) -> usize {
    let spectrum = x.matrix.eigh();
    let threshold = rank_cutoff * spectrum.max();
    spectrum.values.iter().filter(|&&v| v > threshold).count()
}

/// Kronecker product `A (x) B`; the first factor is the most significant index.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut acc = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for f in factors {
        acc = acc.kronecker(&f.0);
    }
    ComplexMatrix(acc)
}

pub fn tensor_vectors<'a>(factors: impl IntoIterator<Item = &'a Vector>) -> Vector {
    let mut acc = DVector::from_element(1, Complex64::new(1.0, 0.0));
    for f in factors {
        acc = acc.kronecker(f);
    }
    acc
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their
/// original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let product: usize = dims.iter().product();
    if product != m.dim() || dims.contains(&0) {
        return Err(Error::Factorization { product, dim: m.dim() });
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::SubsystemIndex { index: k, count: dims.len() });
        }
        kept[k] = true;
    }

    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    // Full-space offsets of every kept (resp. traced) multi-index.
    let offsets = |select: bool| -> Vec<usize> {
        let mut out = vec![0usize];
        for (k, &d) in dims.iter().enumerate() {
            if kept[k] != select {
                continue;
            }
            let stride = strides[k];
            out = out.iter().flat_map(|&base| (0..d).map(move |digit| base + digit * stride)).collect();
        }
        out
    };
    let kept_offsets = offsets(true);
    let traced_offsets = offsets(false);

    let n = kept_offsets.len();
    let out = DMatrix::from_fn(n, n, |a, b| {
        traced_offsets.iter().map(|&t| m.0[(kept_offsets[a] + t, kept_offsets[b] + t)]).sum()
    });
    Ok(ComplexMatrix(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> Vector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Vector::from_vec(vec![c(s, 0.0), c(s, 0.0)])
    }

    #[test]
    fn prob_identity_is_one() {
        let x = State::from_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(prob(&Effect::identity(3), &x).unwrap(), 1.0);
    }

    #[test]
    fn prob_basis_on_plus_is_half() {
        let x = State::pure(&plus()).unwrap();
        let a = Effect::basis_projector(2, 0);
        assert!((prob(&a, &x).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn prob_rejects_dimension_mismatch() {
        let err = prob(&Effect::identity(2), &State::maximally_mixed(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn prob_clamps_tiny_overshoot() {
        let m = ComplexMatrix::from_diagonal(&[1.0 + 1e-11, 0.0]);
        let a = Effect::new(m).unwrap();
        assert_eq!(prob(&a, &State::basis(2, 0)).unwrap(), 1.0);
        let m = ComplexMatrix::from_diagonal(&[-1e-11, 0.0]);
        let a = Effect::new(m).unwrap();
        assert_eq!(prob(&a, &State::basis(2, 0)).unwrap(), 0.0);
    }

    #[test]
    fn prob_flags_imaginary_residue() {
        // Anti-hermitian junk that bypassed validation.
        let mut inner = DMatrix::zeros(2, 2);
        inner[(0, 1)] = c(0.0, 1e-3);
        inner[(1, 0)] = c(0.0, 1e-3);
        inner[(0, 0)] = c(0.5, 0.0);
        let a = Effect { matrix: ComplexMatrix(inner), tolerance: DEFAULT_TOLERANCE, complement_of: None };
        let x = State::pure(&plus()).unwrap();
        assert!(matches!(prob(&a, &x), Err(Error::ImaginaryResidue { .. })));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Effect::identity(2).complement().matrix(), &ComplexMatrix::zeros(2));
        assert_eq!(Effect::zero(2).complement().matrix(), &ComplexMatrix::identity(2));
        let a = Effect::new(ComplexMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        let spectrum = a.complement().matrix().eigh().values;
        assert!((spectrum[0] - 0.3).abs() < 1e-15 && (spectrum[1] - 0.7).abs() < 1e-15);
        let ac = a.complement();
        assert!((ac.matrix().get(0, 0).re - 0.7).abs() < 1e-15);
    }

    #[test]
    fn complement_twice_is_bit_exact() {
        let a = Effect::new(ComplexMatrix::from_diagonal(&[0.1, 0.3])).unwrap();
        assert_eq!(a.complement().complement().matrix(), a.matrix());
        assert_eq!(a.complement().complement().complement().matrix(), a.complement().matrix());
    }

    #[test]
    fn support_and_kernel_examples() {
        let tol = DEFAULT_RANK_CUTOFF;
        let p = support_projector(&State::basis(2, 0), tol).unwrap();
        assert!(p.matrix().max_abs_diff(&ComplexMatrix::from_diagonal(&[1.0, 0.0])) < 1e-14);

        let p = support_projector(&State::maximally_mixed(3), tol).unwrap();
        assert!(p.matrix().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);

        let x = State::from_diagonal(&[0.7, 0.3, 0.0]).unwrap();
        let p = support_projector(&x, tol).unwrap();
        assert!(p.matrix().max_abs_diff(&ComplexMatrix::from_diagonal(&[1.0, 1.0, 0.0])) < 1e-14);
        let q = kernel_projector(&x, tol).unwrap();
        assert!(q.matrix().max_abs_diff(&ComplexMatrix::from_diagonal(&[0.0, 0.0, 1.0])) < 1e-14);

        let q = kernel_projector(&State::basis(2, 0), tol).unwrap();
        assert!(q.matrix().max_abs_diff(&ComplexMatrix::from_diagonal(&[0.0, 1.0])) < 1e-14);
        let q = kernel_projector(&State::maximally_mixed(4), tol).unwrap();
        assert!(q.matrix().max_abs() < 1e-14);
    }

    #[test]
    fn support_rejects_bad_cutoff() {
        assert!(support_projector(&State::basis(2, 0), 0.0).is_err());
    }

    #[test]
    fn tensor_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let x1 = State::from_diagonal(&[0.25, 0.75]).unwrap();
        let x2 = State::from_diagonal(&[0.1, 0.2, 0.7]).unwrap();
        let joint = tensor(x1.matrix(), x2.matrix());
        let left = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!(left.max_abs_diff(x1.matrix()) < 1e-15);
        let right = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!(right.max_abs_diff(x2.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_projector() {
        // (|00> + |11>)/sqrt2, written out by hand.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Vector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let rho = ComplexMatrix::projector(&bell);
        for keep in [0, 1] {
            let r = partial_trace(&rho, &[2, 2], &[keep]).unwrap();
            assert!(r.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let m = ComplexMatrix::identity(6);
        assert!(matches!(partial_trace(&m, &[2, 2], &[0]), Err(Error::Factorization { .. })));
        assert!(matches!(partial_trace(&m, &[2, 3], &[2]), Err(Error::SubsystemIndex { .. })));
    }

    #[test]
    fn partial_trace_keeps_middle_factor() {
        let a = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        let b = ComplexMatrix::from_diagonal(&[0.1, 0.9]);
        let cm = ComplexMatrix::from_diagonal(&[0.3, 0.3, 0.4]);
        let joint = tensor_all([&a, &b, &cm]);
        let mid = partial_trace(&joint, &[2, 2, 3], &[1]).unwrap();
        assert!(mid.max_abs_diff(&b) < 1e-15);
        let outer = partial_trace(&joint, &[2, 2, 3], &[0, 2]).unwrap();
        assert!(outer.max_abs_diff(&tensor(&a, &cm)) < 1e-15);
    }

    #[test]
    fn state_validation_errors() {
        assert!(matches!(State::from_diagonal(&[0.5, 0.6]), Err(Error::TraceNotOne { .. })));
        assert!(matches!(State::from_diagonal(&[1.2, -0.2]), Err(Error::NotPositive { .. })));
        let mut inner = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        inner[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(State::new(ComplexMatrix::new(inner).unwrap()), Err(Error::NotHermitian { .. })));
        assert!(matches!(ComplexMatrix::new(DMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
        let mut nan = DMatrix::zeros(2, 2);
        nan[(0, 0)] = c(f64::NAN, 0.0);
        assert_eq!(ComplexMatrix::new(nan), Err(Error::NonFinite));
    }

    #[test]
    fn effect_validation_errors() {
        assert!(matches!(
            Effect::new(ComplexMatrix::from_diagonal(&[1.5, 0.0])),
            Err(Error::SpectrumOutOfRange { .. })
        ));
        assert!(matches!(
            Effect::new(ComplexMatrix::from_diagonal(&[-0.1, 0.0])),
            Err(Error::SpectrumOutOfRange { .. })
        ));
    }

    #[test]
    fn exchange_format_roundtrip() {
        let m = ComplexMatrix::outer(&plus(), &Vector::from_vec(vec![c(0.0, 1.0), c(0.0, 0.0)]));
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.starts_with("{\"dim\":2,\"re\":"));
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn exchange_format_rejects_ragged_rows() {
        let json = r#"{"dim":2,"re":[[1,0],[0]],"im":[[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(json).is_err());
        let json = r#"{"dim":3,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(json).is_err());
    }

    #[test]
    fn pure_vector_recovers_projector() {
        let x = State::pure(&plus()).unwrap();
        let v = x.pure_vector().unwrap();
        assert!(ComplexMatrix::projector(&v).max_abs_diff(x.matrix()) < 1e-14);
        assert!(State::maximally_mixed(2).pure_vector().is_err());
    }

    #[test]
    fn degrade_mixes_towards_uniform() {
        let a = Effect::basis_projector(2, 0).degrade(0.1).unwrap();
        assert!(a.matrix().max_abs_diff(&ComplexMatrix::from_diagonal(&[0.95, 0.05])) < 1e-15);
        assert!(Effect::identity(2).degrade(1.5).is_err());
    }
}
