//! Superposition sets of two orthogonal states.
//!
//! A state `X` belongs to `S(w1 X1, w2 X2)` when every effect blind to `X1`
//! sees `X` as `w2 X2`, and every effect blind to `X2` sees it as `w1 X1`.
//! Effects blind to `X1` are exactly the effects living on `ker X1`, and those
//! span all hermitian operators on that subspace, so membership reduces to
//! two block identities: `Q1 X Q1 = w2 X2` and `Q2 X Q2 = w1 X1` with
//! `Qi` the kernel projector of `Xi`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_dims, kernel_projector, prob, support_projector, ComplexMatrix, Effect, State, Vector, DEFAULT_RANK_CUTOFF,
    DEFAULT_TOLERANCE,
};
use crate::random::Sampler;

/// Pair of orthogonal states with branch weights `w1 + w2 = 1`.
#[derive(Clone, Debug)]
pub struct SuperpositionSpec {
    x1: State,
    x2: State,
    w1: f64,
    w2: f64,
    tolerance: f64,
    branches: Option<(Vector, Vector)>,
}

/// `n` equally spaced phases on `[0, 2 pi)`.
pub fn uniform_phases(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Coherence/phase sampling plan for members of a superposition set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferenceGrid {
    pub coherences: Vec<f64>,
    pub phases: Vec<f64>,
}

impl Default for InterferenceGrid {
    fn default() -> Self {
        Self { coherences: vec![0.0, 0.25, 0.5, 0.75, 1.0], phases: uniform_phases(8) }
    }
}

impl SuperpositionSpec {
    pub fn new(x1: State, x2: State, w1: f64, w2: f64) -> Result<Self> {
        Self::with_tolerance(x1, x2, w1, w2, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(x1: State, x2: State, w1: f64, w2: f64, tolerance: f64) -> Result<Self> {
        check_dims(x1.dim(), x2.dim())?;
        for w in [w1, w2] {
            if !(-tolerance..=1.0 + tolerance).contains(&w) {
                return Err(Error::WeightOutOfRange(w));
            }
        }
        if (w1 + w2 - 1.0).abs() > tolerance {
            return Err(Error::WeightsNotNormalized { sum: w1 + w2 });
        }
        let overlap = x1.matrix().trace_product(x2.matrix()).re;
        if overlap > tolerance {
            return Err(Error::NotOrthogonal { overlap });
        }
        let branches = match (x1.pure_vector(), x2.pure_vector()) {
            (Ok(a), Ok(b)) => Some((a, b)),
            _ => None,
        };
        Ok(Self { x1, x2, w1: w1.clamp(0.0, 1.0), w2: w2.clamp(0.0, 1.0), tolerance, branches })
    }

    /// Spec for pure branches `|phi1>`, `|phi2>`, keeping their phases.
    pub fn pure(phi1: &Vector, phi2: &Vector, w1: f64) -> Result<Self> {
        let mut spec = Self::new(State::pure(phi1)?, State::pure(phi2)?, w1, 1.0 - w1)?;
        spec.branches = Some((phi1.clone(), phi2.clone()));
        Ok(spec)
    }

    /// Same branch states, new weights.
    pub fn reweighted(&self, w1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w1) {
            return Err(Error::WeightOutOfRange(w1));
        }
        Ok(Self { w1, w2: 1.0 - w1, ..self.clone() })
    }

    pub fn x1(&self) -> &State {
        &self.x1
    }

    pub fn x2(&self) -> &State {
        &self.x2
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }

    pub fn dim(&self) -> usize {
        self.x1.dim()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn branches(&self) -> Option<&(Vector, Vector)> {
        self.branches.as_ref()
    }

    pub fn is_pure(&self) -> bool {
        self.branches.is_some()
    }

    /// `w1 X1 + w2 X2`.
    pub fn mixture(&self) -> State {
        let m = &self.x1.matrix().scale(self.w1) + &self.x2.matrix().scale(self.w2);
        State::with_tolerance(m, self.tolerance).expect("convex combination of states")
    }
}

#[derive(Serialize, Deserialize)]
struct SpecExchange {
    x1: State,
    x2: State,
    w1: f64,
    w2: f64,
}

impl Serialize for SuperpositionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecExchange { x1: self.x1.clone(), x2: self.x2.clone(), w1: self.w1, w2: self.w2 }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperpositionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = SpecExchange::deserialize(d)?;
        SuperpositionSpec::new(x.x1, x.x2, x.w1, x.w2).map_err(serde::de::Error::custom)
    }
}

/// `Tr(X1 X2) <= tolerance`; for positive operators this means disjoint supports.
pub fn is_orthogonal(x1: &State, x2: &State) -> Result<bool> {
    check_dims(x1.dim(), x2.dim())?;
    let tol = x1.tolerance().max(x2.tolerance());
    Ok(x1.matrix().trace_product(x2.matrix()).re <= tol)
}

/// `|phi><phi|` with `phi = c1 phi1 + c2 phi2`.
pub fn make_pure_superposition(phi1: &Vector, phi2: &Vector, c1: Complex64, c2: Complex64) -> Result<State> {
    check_dims(phi1.len(), phi2.len())?;
    for phi in [phi1, phi2] {
        let norm = phi.norm();
        if (norm - 1.0).abs() > DEFAULT_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
    }
    let overlap = phi1.dotc(phi2).norm();
    if overlap > DEFAULT_TOLERANCE {
        return Err(Error::NotOrthogonal { overlap });
    }
    let sum = c1.norm_sqr() + c2.norm_sqr();
    if (sum - 1.0).abs() > DEFAULT_TOLERANCE {
        return Err(Error::WeightsNotNormalized { sum });
    }
    let phi = phi1 * c1 + phi2 * c2;
    State::new(ComplexMatrix::projector(&phi))
}

/// Member of `S(w1 X1, w2 X2)` with the cross term
/// `coherence * sqrt(w1 w2) e^{i phase} |phi1><phi2| + h.c.` added to the
/// incoherent mixture. Coherent members need pure branches.
pub fn superposition_family(spec: &SuperpositionSpec, coherence: f64, phase: f64) -> Result<State> {
    if !(0.0..=1.0).contains(&coherence) {
        return Err(Error::CoherenceOutOfRange(coherence));
    }
    let mixture = spec.mixture();
    if coherence == 0.0 {
        return Ok(mixture);
    }
    let (phi1, phi2) = spec.branches.as_ref().ok_or(Error::CoherenceRequiresPure)?;
    let amplitude = Complex64::from_polar(coherence * (spec.w1 * spec.w2).sqrt(), phase);
    let cross = ComplexMatrix::outer(phi1, phi2).scale_complex(amplitude);
    let m = &(mixture.matrix() + &cross) + &cross.adjoint();
    State::with_tolerance(m, spec.tolerance)
}

/// Every family member on the grid, in coherence-major order.
pub fn family_members(spec: &SuperpositionSpec, grid: &InterferenceGrid) -> Result<Vec<State>> {
    let mut out = Vec::with_capacity(grid.coherences.len() * grid.phases.len());
    for &c in &grid.coherences {
        for &p in &grid.phases {
            out.push(superposition_family(spec, c, p)?);
        }
    }
    Ok(out)
}

/// Random member with cross term `C = (w1 X1)^{1/2} K (w2 X2)^{1/2}` for a
/// gaussian `K` rescaled to a random operator norm in `[0, 1]`. Works for
/// mixed branches, where the whole set is spanned by such cross terms.
pub fn random_member(spec: &SuperpositionSpec, sampler: &mut Sampler) -> Result<State> {
    let dim = spec.dim();
    let k = sampler.ginibre(dim, dim);
    let norm = k.clone().singular_values().max();
    let k = k * Complex64::new(sampler.uniform() / norm, 0.0);
    let left = support_sqrt(spec.x1.matrix().scale(spec.w1));
    let right = support_sqrt(spec.x2.matrix().scale(spec.w2));
    let cross = ComplexMatrix::new(left.as_inner() * k * right.as_inner())?;
    let m = &(spec.mixture().matrix() + &cross) + &cross.adjoint();
    State::with_tolerance(m.hermitian_part(), spec.tolerance)
}

/// Square root with round-off eigenvalues below the rank cutoff zeroed, so
/// that the root stays on the support.
fn support_sqrt(m: ComplexMatrix) -> ComplexMatrix {
    let spectrum = m.eigh();
    let threshold = DEFAULT_RANK_CUTOFF * spectrum.max().abs();
    spectrum.map(|v| if v > threshold { v.sqrt() } else { 0.0 })
}

/// `(max |Q1 X Q1 - w2 X2|, max |Q2 X Q2 - w1 X1|)`.
pub fn membership_residuals(x: &State, spec: &SuperpositionSpec) -> Result<(f64, f64)> {
    check_dims(spec.dim(), x.dim())?;
    let q1 = kernel_projector(spec.x1(), DEFAULT_RANK_CUTOFF)?;
    let q2 = kernel_projector(spec.x2(), DEFAULT_RANK_CUTOFF)?;
    let block = |q: &Effect| &(q.matrix() * x.matrix()) * q.matrix();
    let r1 = block(&q1).max_abs_diff(&spec.x2().matrix().scale(spec.w2));
    let r2 = block(&q2).max_abs_diff(&spec.x1().matrix().scale(spec.w1));
    Ok((r1, r2))
}

pub fn is_member(x: &State, spec: &SuperpositionSpec) -> Result<bool> {
    let (r1, r2) = membership_residuals(x, spec)?;
    Ok(r1 <= spec.tolerance && r2 <= spec.tolerance)
}

/// Largest `|(A, X) - (A, mixture)|` over family members on the grid.
pub fn interference_response(a: &Effect, spec: &SuperpositionSpec, grid: &InterferenceGrid) -> Result<f64> {
    if !spec.is_pure() {
        return Err(Error::CoherenceRequiresPure);
    }
    check_dims(spec.dim(), a.dim())?;
    let baseline = prob(a, &spec.mixture())?;
    let mut worst: f64 = 0.0;
    for member in family_members(spec, grid)? {
        worst = worst.max((prob(a, &member)? - baseline).abs());
    }
    Ok(worst)
}

pub fn is_sensitive_to_interference(a: &Effect, spec: &SuperpositionSpec, grid: &InterferenceGrid) -> Result<bool> {
    Ok(interference_response(a, spec, grid)? > spec.tolerance)
}

/// `||P1 A P2||_max` with `Pi` the support projectors of the branches.
pub fn cross_block_norm(a: &Effect, spec: &SuperpositionSpec) -> Result<f64> {
    check_dims(spec.dim(), a.dim())?;
    let p1 = support_projector(spec.x1(), DEFAULT_RANK_CUTOFF)?;
    let p2 = support_projector(spec.x2(), DEFAULT_RANK_CUTOFF)?;
    Ok((&(p1.matrix() * a.matrix()) * p2.matrix()).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn basis(dim: usize, k: usize) -> Vector {
        let mut v = Vector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn orthogonality_examples() {
        assert!(is_orthogonal(&State::basis(2, 0), &State::basis(2, 1)).unwrap());
        let plus =
            make_pure_superposition(&basis(2, 0), &basis(2, 1), c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        assert!(!is_orthogonal(&State::basis(2, 0), &plus).unwrap());
        let a = State::from_diagonal(&[0.5, 0.5, 0.0, 0.0]).unwrap();
        let b = State::from_diagonal(&[0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!(is_orthogonal(&a, &b).unwrap());
        assert!(is_orthogonal(&a, &State::basis(3, 0)).is_err());
    }

    #[test]
    fn pure_superposition_examples() {
        let (p1, p2) = (basis(3, 0), basis(3, 2));
        let x = make_pure_superposition(&p1, &p2, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(x.matrix().max_abs_diff(&ComplexMatrix::projector(&p1)) < 1e-15);

        let h = FRAC_1_SQRT_2;
        let x = make_pure_superposition(&p1, &p2, c(h, 0.0), c(h, 0.0)).unwrap();
        let w = x.matrix().trace_product(&ComplexMatrix::projector(&p1)).re;
        assert!((w - 0.5).abs() < 1e-15);
    }

    #[test]
    fn relative_phase_rotates_cross_block_only() {
        let (p1, p2) = (basis(2, 0), basis(2, 1));
        let (c1, c2) = (c(0.6, 0.0), c(0.0, 0.8));
        let theta = 0.7;
        let x = make_pure_superposition(&p1, &p2, c1, c2).unwrap();
        let y = make_pure_superposition(&p1, &p2, c1, c2 * Complex64::from_polar(1.0, theta)).unwrap();
        let (xm, ym) = (x.matrix(), y.matrix());
        assert!((xm.get(0, 0) - ym.get(0, 0)).norm() < 1e-15);
        assert!((xm.get(1, 1) - ym.get(1, 1)).norm() < 1e-15);
        // X01 = c1 c2^*; rotating c2 by theta rotates X01 by -theta.
        let expected = xm.get(0, 1) * Complex64::from_polar(1.0, -theta);
        assert!((ym.get(0, 1) - expected).norm() < 1e-15);
    }

    #[test]
    fn pure_superposition_errors() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let plus = (basis(2, 0) + basis(2, 1)) * h;
        assert!(matches!(make_pure_superposition(&basis(2, 0), &plus, h, h), Err(Error::NotOrthogonal { .. })));
        assert!(matches!(
            make_pure_superposition(&basis(2, 0), &basis(2, 1), h, c(1.0, 0.0)),
            Err(Error::WeightsNotNormalized { .. })
        ));
    }

    #[test]
    fn global_phase_is_invisible() {
        let (p1, p2) = (basis(2, 0), basis(2, 1));
        let (c1, c2) = (c(0.6, 0.0), c(0.0, 0.8));
        let g = Complex64::from_polar(1.0, 1.3);
        let x = make_pure_superposition(&p1, &p2, c1, c2).unwrap();
        let y = make_pure_superposition(&p1, &p2, c1 * g, c2 * g).unwrap();
        assert!(x.matrix().max_abs_diff(y.matrix()) < 1e-15);
    }

    #[test]
    fn family_endpoints() {
        let spec = SuperpositionSpec::pure(&basis(2, 0), &basis(2, 1), 0.5).unwrap();
        let x = superposition_family(&spec, 0.0, 1.0).unwrap();
        assert!(x.matrix().max_abs_diff(spec.mixture().matrix()) < 1e-15);

        let x = superposition_family(&spec, 1.0, 0.0).unwrap();
        assert!((x.purity() - 1.0).abs() < 1e-14);
        let h = c(FRAC_1_SQRT_2, 0.0);
        let eq1 = make_pure_superposition(&basis(2, 0), &basis(2, 1), h, h).unwrap();
        assert!(x.matrix().max_abs_diff(eq1.matrix()) < 1e-15);
    }

    #[test]
    fn family_grid_members_pass_membership() {
        for w1 in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let spec = SuperpositionSpec::pure(&basis(3, 0), &basis(3, 2), w1).unwrap();
            for x in family_members(&spec, &InterferenceGrid::default()).unwrap() {
                assert!(is_member(&x, &spec).unwrap());
            }
        }
    }

    #[test]
    fn family_errors() {
        let spec = SuperpositionSpec::pure(&basis(2, 0), &basis(2, 1), 0.5).unwrap();
        assert_eq!(superposition_family(&spec, 1.5, 0.0).unwrap_err(), Error::CoherenceOutOfRange(1.5));
        let mixed =
            SuperpositionSpec::new(State::from_diagonal(&[0.5, 0.5, 0.0]).unwrap(), State::basis(3, 2), 0.5, 0.5)
                .unwrap();
        assert!(superposition_family(&mixed, 0.0, 0.0).is_ok());
        assert_eq!(superposition_family(&mixed, 0.5, 0.0).unwrap_err(), Error::CoherenceRequiresPure);
    }

    #[test]
    fn membership_examples() {
        let spec = SuperpositionSpec::new(
            State::from_diagonal(&[0.5, 0.5, 0.0, 0.0]).unwrap(),
            State::from_diagonal(&[0.0, 0.0, 0.25, 0.75]).unwrap(),
            0.3,
            0.7,
        )
        .unwrap();
        assert!(is_member(&spec.mixture(), &spec).unwrap());
        assert!(!is_member(spec.x1(), &spec).unwrap());
    }

    #[test]
    fn spec_rejects_bad_inputs() {
        let plus =
            make_pure_superposition(&basis(2, 0), &basis(2, 1), c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        assert!(matches!(SuperpositionSpec::new(State::basis(2, 0), plus, 0.5, 0.5), Err(Error::NotOrthogonal { .. })));
        assert!(matches!(
            SuperpositionSpec::new(State::basis(2, 0), State::basis(2, 1), 0.5, 0.6),
            Err(Error::WeightsNotNormalized { .. })
        ));
    }

    #[test]
    fn convex_combinations_of_members_are_members() {
        let mut s = Sampler::new(9);
        let frame = s.orthonormal_frame(4, 2);
        let (p1, p2) = (frame.column(0).into_owned(), frame.column(1).into_owned());
        let spec = SuperpositionSpec::pure(&p1, &p2, 0.35).unwrap();
        for _ in 0..50 {
            let a = superposition_family(&spec, s.uniform(), s.uniform_range(0.0, TAU)).unwrap();
            let b = superposition_family(&spec, s.uniform(), s.uniform_range(0.0, TAU)).unwrap();
            let mix = State::mix(s.uniform(), &a, &b).unwrap();
            assert!(is_member(&mix, &spec).unwrap());
        }
    }

    #[test]
    fn interference_sensitivity_examples() {
        let spec = SuperpositionSpec::pure(&basis(2, 0), &basis(2, 1), 0.5).unwrap();
        let grid = InterferenceGrid::default();
        let p1 = support_projector(spec.x1(), DEFAULT_RANK_CUTOFF).unwrap();
        assert!(!is_sensitive_to_interference(&p1, &spec, &grid).unwrap());
        let h = c(FRAC_1_SQRT_2, 0.0);
        let plus = Effect::projector(&((basis(2, 0) + basis(2, 1)) * h)).unwrap();
        assert!(is_sensitive_to_interference(&plus, &spec, &grid).unwrap());
        assert!((cross_block_norm(&plus, &spec).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sensitivity_needs_pure_branches() {
        let mixed =
            SuperpositionSpec::new(State::from_diagonal(&[0.5, 0.5, 0.0]).unwrap(), State::basis(3, 2), 0.5, 0.5)
                .unwrap();
        assert_eq!(
            is_sensitive_to_interference(&Effect::identity(3), &mixed, &InterferenceGrid::default()).unwrap_err(),
            Error::CoherenceRequiresPure
        );
    }

    #[test]
    fn spec_json_shape() {
        let spec = SuperpositionSpec::pure(&basis(2, 0), &basis(2, 1), 0.25).unwrap();
        let v: serde_json::Value = serde_json::to_value(&spec).unwrap();
        for key in ["x1", "x2", "w1", "w2"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: SuperpositionSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back.w1(), 0.25);
        assert!(back.is_pure());
    }

    #[test]
    fn random_members_of_mixed_specs_are_members() {
        let mut s = Sampler::new(17);
        for _ in 0..100 {
            let dim = s.index(2, 6);
            let (x1, x2) = s.orthogonal_pair(dim);
            let w1 = s.uniform();
            let spec = SuperpositionSpec::new(x1, x2, w1, 1.0 - w1).unwrap();
            let x = random_member(&spec, &mut s).unwrap();
            assert!(is_member(&x, &spec).unwrap());
        }
    }
}
