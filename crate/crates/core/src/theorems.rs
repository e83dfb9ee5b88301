//! Numerical verifiers for the non-coincidence and objectivity results.
//!
//! Verifiers never assume the statement they check: they evaluate both sides
//! of every identity and report the residuals. A [`Verifier`] can be armed
//! with a [`Mutation`] that corrupts one construction step, which must make
//! the corresponding check fail.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::{prob, ComplexMatrix, Effect, State, Vector, DEFAULT_TOLERANCE};
use crate::measurement::{
    branch_isometry, branch_projectors, build_premeasurement, discriminating_reading, m_eval, separability_residual,
    ChannelLayout, MeasurementModel, PointerPair, ReadingSet, SupportPadding,
};
use crate::random::Sampler;
use crate::superposition::{
    family_members, is_member, membership_residuals, superposition_family, uniform_phases, InterferenceGrid,
    SuperpositionSpec,
};

/// Fault-injection hooks for mutation testing of the verification battery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// [`Verifier::annihilating_effect`] only projects out the first vector.
    BrokenPsdProjection,
    /// [`Verifier::premeasurement`] tilts every second pointer towards the first.
    NonOrthogonalPointers,
    /// [`Verifier::complement`] returns the reading unchanged.
    SkippedComplement,
}

impl Mutation {
    pub const ALL: [Mutation; 3] =
        [Mutation::BrokenPsdProjection, Mutation::NonOrthogonalPointers, Mutation::SkippedComplement];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::BrokenPsdProjection => "broken-psd-projection",
            Mutation::NonOrthogonalPointers => "non-orthogonal-pointers",
            Mutation::SkippedComplement => "skipped-complement",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mutation {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Precondition {
    pub satisfied: bool,
    pub value: f64,
}

/// Structured verification outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: String,
    pub pass: bool,
    pub preconditions: BTreeMap<String, Precondition>,
    pub residuals: BTreeMap<String, f64>,
    pub witnesses: BTreeMap<String, serde_json::Value>,
}

impl Report {
    fn new(theorem: &str) -> Self {
        Self {
            theorem: theorem.to_string(),
            pass: false,
            preconditions: BTreeMap::new(),
            residuals: BTreeMap::new(),
            witnesses: BTreeMap::new(),
        }
    }

    fn precondition(&mut self, name: impl Into<String>, satisfied: bool, value: f64) {
        self.preconditions.insert(name.into(), Precondition { satisfied, value });
    }

    pub fn preconditions_hold(&self) -> bool {
        self.preconditions.values().all(|p| p.satisfied)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).copied()
    }
}

/// `|c1|^2` values and relative phases for `psi = c1 psi1 + c2 psi2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientGrid {
    pub weights: Vec<f64>,
    pub phases: Vec<f64>,
}

impl Default for CoefficientGrid {
    fn default() -> Self {
        Self { weights: vec![0.0, 0.25, 0.5, 0.75, 1.0], phases: uniform_phases(8) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verifier {
    pub tolerance: f64,
    pub mutation: Option<Mutation>,
}

impl Default for Verifier {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, mutation: None }
    }
}

impl Verifier {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, mutation: None }
    }

    pub fn mutated(mut self, mutation: Option<Mutation>) -> Self {
        self.mutation = mutation;
        self
    }

    fn is(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }

    pub fn complement(&self, a: &Effect) -> Effect {
        if self.is(Mutation::SkippedComplement) {
            a.clone()
        } else {
            a.complement()
        }
    }

    /// `Q B Q` with `Q = I - |psi1><psi1| - |psi2><psi2|`.
    pub fn annihilating_effect(&self, b: &Effect, psi1: &Vector, psi2: &Vector) -> Result<Effect> {
        let dim = b.dim();
        let mut q = &ComplexMatrix::identity(dim) - &ComplexMatrix::projector(psi1);
        if !self.is(Mutation::BrokenPsdProjection) {
            q = &q - &ComplexMatrix::projector(psi2);
        }
        let m = &(&q * b.matrix()) * &q;
        Effect::with_tolerance(m.hermitian_part(), b.tolerance())
    }

    /// [`build_premeasurement`], or an unchecked build with tilted pointers
    /// under [`Mutation::NonOrthogonalPointers`].
    pub fn premeasurement(
        &self,
        x1: &State,
        x2: &State,
        layout: ChannelLayout,
        pointers: &[PointerPair],
        padding: SupportPadding,
    ) -> Result<MeasurementModel> {
        if !self.is(Mutation::NonOrthogonalPointers) {
            return build_premeasurement(x1, x2, layout, pointers, padding);
        }
        let tilted: Vec<PointerPair> = pointers
            .iter()
            .map(|p| {
                let mixed = &p.first + &p.second;
                let n = mixed.norm();
                PointerPair::new(p.first.clone(), mixed / Complex64::new(n, 0.0))
            })
            .collect();
        let (p1, p2, _) = branch_projectors(x1, x2, padding)?;
        MeasurementModel::from_isometry(x1.dim(), layout, branch_isometry(&tilted, &p1, &p2))
    }

    pub fn separability(
        &self,
        model: &MeasurementModel,
        x: &State,
        mu: usize,
        nu: usize,
        a_mu: &Effect,
        a_nu: &Effect,
    ) -> Result<f64> {
        separability_residual(model, x, mu, nu, a_mu, a_nu, &self.complement(a_nu))
    }

    /// Checks that a positive operator blind to `psi1` and `psi2` is blind
    /// to every superposition of them on the grid.
    pub fn theorem1(&self, a: &Effect, psi1: &Vector, psi2: &Vector, grid: &CoefficientGrid) -> Result<Report> {
        let tol = self.tolerance;
        for psi in [psi1, psi2] {
            let norm = psi.norm();
            if (norm - 1.0).abs() > tol {
                return Err(Error::NotNormalized { norm });
            }
        }
        let overlap = psi1.dotc(psi2).norm();
        if overlap > tol {
            return Err(Error::NotOrthogonal { overlap });
        }
        let min_eigenvalue = a.matrix().eigh().min();
        if min_eigenvalue < -tol {
            return Err(Error::NotPositive { min_eigenvalue });
        }

        let mut report = Report::new("theorem1");
        let e1 = a.matrix().expectation(psi1).re;
        let e2 = a.matrix().expectation(psi2).re;
        report.precondition("psi1_annihilated", e1 <= tol, e1);
        report.precondition("psi2_annihilated", e2 <= tol, e2);

        let mut worst: f64 = 0.0;
        let mut points = 0usize;
        for &w in &grid.weights {
            for &phase in &grid.phases {
                let c1 = Complex64::new(w.sqrt(), 0.0);
                let c2 = Complex64::from_polar((1.0 - w).max(0.0).sqrt(), phase);
                let psi = psi1 * c1 + psi2 * c2;
                worst = worst.max(a.matrix().expectation(&psi).re);
                points += 1;
            }
        }
        let witness = (a.matrix().as_inner() * psi1).norm() + (a.matrix().as_inner() * psi2).norm();
        report.residuals.insert("max_grid_expectation".into(), worst);
        report.witnesses.insert("kernel_witness".into(), json!(witness));
        report.witnesses.insert("grid_points".into(), json!(points));
        report.pass = report.preconditions_hold() && worst <= tol;
        Ok(report)
    }

    /// Checks `(A, X) = 0` on superposition members of two states `A` ignores.
    pub fn theorem1_prime(&self, a: &Effect, spec: &SuperpositionSpec, members: &[State]) -> Result<Report> {
        let tol = self.tolerance;
        check_members(spec, members)?;
        let mut report = Report::new("theorem1_prime");
        let p1 = prob(a, spec.x1())?;
        let p2 = prob(a, spec.x2())?;
        report.precondition("x1_blind", p1 <= tol, p1);
        report.precondition("x2_blind", p2 <= tol, p2);
        let mut worst: f64 = 0.0;
        for x in members {
            worst = worst.max(prob(a, x)?);
        }
        report.residuals.insert("max_member_probability".into(), worst);
        report.witnesses.insert("members".into(), json!(members.len()));
        report.pass = report.preconditions_hold() && worst <= tol;
        Ok(report)
    }

    /// Two readings that each discriminate `X1` against `X2` agree on every
    /// superposition member and fire with probability `w1`.
    #[allow(clippy::too_many_arguments)]
    pub fn theorem2(
        &self,
        model: &MeasurementModel,
        mu: usize,
        nu: usize,
        a_mu: &Effect,
        a_nu: &Effect,
        spec: &SuperpositionSpec,
        members: &[State],
    ) -> Result<Report> {
        if mu == nu {
            return Err(Error::ChannelCollision(mu));
        }
        let tol = self.tolerance;
        check_members(spec, members)?;
        let mut report = Report::new("theorem2");
        for (channel, reading) in [(mu, a_mu), (nu, a_nu)] {
            let single = ReadingSet::new().with(channel, reading.clone());
            let on1 = m_eval(model, &single, spec.x1())?;
            let on2 = m_eval(model, &single, spec.x2())?;
            let defect = (1.0 - on1).abs().max(on2);
            report.precondition(format!("channel_{channel}_discriminates"), defect <= tol, defect);
        }

        let (not_mu, not_nu) = (self.complement(a_mu), self.complement(a_nu));
        let only = |c: usize, a: &Effect| ReadingSet::new().with(c, a.clone());
        let pair = |a: &Effect, b: &Effect| ReadingSet::new().with(mu, a.clone()).with(nu, b.clone());
        let w1 = spec.w1();
        let (mut eq4_dev, mut eq5_max, mut sep_max) = (0.0f64, 0.0f64, 0.0f64);
        let mut eq4_rows = Vec::with_capacity(members.len());
        let mut eq5_rows = Vec::with_capacity(members.len());
        for x in members {
            let joint = m_eval(model, &pair(a_mu, a_nu), x)?;
            let m_mu = m_eval(model, &only(mu, a_mu), x)?;
            let m_nu = m_eval(model, &only(nu, a_nu), x)?;
            let split_mu = m_eval(model, &pair(a_mu, &not_nu), x)?;
            let split_nu = m_eval(model, &pair(&not_mu, a_nu), x)?;
            eq4_dev = eq4_dev.max((joint - w1).abs()).max((m_mu - w1).abs()).max((m_nu - w1).abs());
            eq5_max = eq5_max.max(split_mu).max(split_nu);
            sep_max = sep_max.max((joint + split_mu - m_mu).abs());
            eq4_rows.push(json!([joint, m_mu, m_nu]));
            eq5_rows.push(json!([split_mu, split_nu]));
        }
        report.residuals.insert("eq4_max_deviation".into(), eq4_dev);
        report.residuals.insert("eq5_max_disagreement".into(), eq5_max);
        report.residuals.insert("separability".into(), sep_max);
        report.witnesses.insert("w1".into(), json!(w1));
        report.witnesses.insert("eq4".into(), json!(eq4_rows));
        report.witnesses.insert("eq5".into(), json!(eq5_rows));
        report.pass = report.preconditions_hold() && eq4_dev <= tol && eq5_max <= tol;
        Ok(report)
    }

    /// Degrades the discriminating readings of channels `mu`, `nu` with
    /// detector noise `eta` and reports the largest disagreement probability
    /// over superposition members: the grid family plus `trials` random ones.
    #[allow(clippy::too_many_arguments)]
    pub fn counterexample_search(
        &self,
        model: &MeasurementModel,
        spec: &SuperpositionSpec,
        mu: usize,
        nu: usize,
        eta: f64,
        trials: usize,
        seed: u64,
    ) -> Result<Report> {
        if mu == nu {
            return Err(Error::ChannelCollision(mu));
        }
        let a_mu = discriminating_reading(model, mu, spec.x1(), spec.x2())?.degrade(eta)?;
        let a_nu = discriminating_reading(model, nu, spec.x1(), spec.x2())?.degrade(eta)?;
        let (not_mu, not_nu) = (self.complement(&a_mu), self.complement(&a_nu));

        let mut members =
            if spec.is_pure() { family_members(spec, &InterferenceGrid::default())? } else { vec![spec.mixture()] };
        let mut sampler = Sampler::new(seed);
        for _ in 0..trials {
            let coherence = if spec.is_pure() { sampler.uniform() } else { 0.0 };
            let phase = sampler.uniform_range(0.0, TAU);
            members.push(superposition_family(spec, coherence, phase)?);
        }

        let (mut worst, mut worst_total) = (0.0f64, 0.0f64);
        for x in &members {
            let d1 = m_eval(model, &ReadingSet::new().with(mu, a_mu.clone()).with(nu, not_nu.clone()), x)?;
            let d2 = m_eval(model, &ReadingSet::new().with(mu, not_mu.clone()).with(nu, a_nu.clone()), x)?;
            worst = worst.max(d1);
            worst_total = worst_total.max(d1 + d2);
        }
        let mut report = Report::new("counterexample_search");
        report.precondition("noise_in_range", (0.0..=1.0).contains(&eta), eta);
        report.residuals.insert("max_disagreement".into(), worst);
        report.residuals.insert("max_total_disagreement".into(), worst_total);
        report.witnesses.insert("eta".into(), json!(eta));
        report.witnesses.insert("members".into(), json!(members.len()));
        // Exact objectivity survives only exact discrimination.
        let expected_positive = eta > 0.0;
        report.pass = if expected_positive { worst > self.tolerance } else { worst <= self.tolerance };
        Ok(report)
    }
}

fn check_members(spec: &SuperpositionSpec, members: &[State]) -> Result<()> {
    for x in members {
        if !is_member(x, spec)? {
            let (kernel1, kernel2) = membership_residuals(x, spec)?;
            return Err(Error::NotMember { kernel1, kernel2 });
        }
    }
    Ok(())
}

pub fn verify_theorem1(a: &Effect, psi1: &Vector, psi2: &Vector, grid: &CoefficientGrid) -> Result<Report> {
    Verifier::default().theorem1(a, psi1, psi2, grid)
}

pub fn verify_theorem1_prime(a: &Effect, spec: &SuperpositionSpec, members: &[State]) -> Result<Report> {
    Verifier::default().theorem1_prime(a, spec, members)
}

pub fn verify_theorem2(
    model: &MeasurementModel,
    mu: usize,
    nu: usize,
    a_mu: &Effect,
    a_nu: &Effect,
    spec: &SuperpositionSpec,
    members: &[State],
) -> Result<Report> {
    Verifier::default().theorem2(model, mu, nu, a_mu, a_nu, spec, members)
}

pub fn counterexample_search(
    model: &MeasurementModel,
    spec: &SuperpositionSpec,
    eta: f64,
    trials: usize,
    seed: u64,
) -> Result<Report> {
    Verifier::default().counterexample_search(model, spec, 0, 1, eta, trials, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub max_violation: f64,
    pub samples: usize,
}

/// Evaluates `predicate` on `samples` seeded random effects and returns the
/// largest violation it reports. With `subspace` set to a projector `Q`, each
/// effect is `Q B Q` for a random effect `B`, so it lives on `range Q`.
pub fn brute_force_effect_oracle<F>(
    dim: usize,
    samples: usize,
    seed: u64,
    subspace: Option<&ComplexMatrix>,
    mut predicate: F,
) -> Result<OracleVerdict>
where
    F: FnMut(&Effect) -> Result<f64>,
{
    let mut sampler = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut a = sampler.effect(dim);
        if let Some(q) = subspace {
            let m = &(q * a.matrix()) * q;
            a = Effect::with_tolerance(m.hermitian_part(), a.tolerance().max(DEFAULT_TOLERANCE))?;
        }
        worst = worst.max(predicate(&a)?);
    }
    Ok(OracleVerdict { max_violation: worst, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kernel_projector, DEFAULT_RANK_CUTOFF};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn e(dim: usize, k: usize) -> Vector {
        let mut v = Vector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    fn ghz() -> MeasurementModel {
        let layout = ChannelLayout::new(vec![2, 2]).unwrap();
        let pointers = vec![PointerPair::basis(2, 0, 1); 2];
        build_premeasurement(&State::basis(2, 0), &State::basis(2, 1), layout, &pointers, SupportPadding::Reject)
            .unwrap()
    }

    #[test]
    fn theorem1_examples() {
        let a = Effect::basis_projector(3, 2);
        let r = verify_theorem1(&a, &e(3, 0), &e(3, 1), &CoefficientGrid::default()).unwrap();
        assert!(r.pass);
        assert_eq!(r.residual("max_grid_expectation"), Some(0.0));

        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let plus = Effect::projector(&((e(2, 0) + e(2, 1)) * h)).unwrap();
        let r = verify_theorem1(&plus, &e(2, 0), &e(2, 1), &CoefficientGrid::default()).unwrap();
        assert!(!r.pass);
        let pre = r.preconditions["psi1_annihilated"];
        assert!(!pre.satisfied && (pre.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn theorem1_on_random_annihilating_effects() {
        let mut s = Sampler::new(77);
        let v = Verifier::default();
        for _ in 0..500 {
            let dim = s.index(2, 8);
            let psi = s.orthonormal_vectors(dim, 2);
            let b = s.effect(dim);
            let a = v.annihilating_effect(&b, &psi[0], &psi[1]).unwrap();
            let r = v.theorem1(&a, &psi[0], &psi[1], &CoefficientGrid::default()).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn broken_projection_is_caught() {
        let mut s = Sampler::new(78);
        let v = Verifier::default().mutated(Some(Mutation::BrokenPsdProjection));
        let psi = s.orthonormal_vectors(3, 2);
        let a = v.annihilating_effect(&s.effect(3), &psi[0], &psi[1]).unwrap();
        assert!(!v.theorem1(&a, &psi[0], &psi[1], &CoefficientGrid::default()).unwrap().pass);
    }

    #[test]
    fn theorem1_rejects_bad_vectors() {
        let a = Effect::basis_projector(2, 0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let plus = (e(2, 0) + e(2, 1)) * h;
        assert!(matches!(
            verify_theorem1(&a, &e(2, 0), &plus, &CoefficientGrid::default()),
            Err(Error::NotOrthogonal { .. })
        ));
        assert!(matches!(
            verify_theorem1(&a, &(e(2, 0) * h), &e(2, 1), &CoefficientGrid::default()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn theorem1_prime_examples() {
        let spec = SuperpositionSpec::pure(&e(3, 0), &e(3, 1), 0.5).unwrap();
        let a = Effect::basis_projector(3, 2);
        let r = verify_theorem1_prime(&a, &spec, &[spec.mixture()]).unwrap();
        assert!(r.pass);
        let members = family_members(&spec, &InterferenceGrid::default()).unwrap();
        assert!(verify_theorem1_prime(&a, &spec, &members).unwrap().pass);

        let leaky = Effect::new(ComplexMatrix::from_diagonal(&[0.1, 0.0, 1.0])).unwrap();
        let r = verify_theorem1_prime(&leaky, &spec, &members).unwrap();
        assert!(!r.pass && !r.preconditions["x1_blind"].satisfied);
    }

    #[test]
    fn theorem1_prime_rejects_non_members() {
        let spec = SuperpositionSpec::pure(&e(2, 0), &e(2, 1), 0.5).unwrap();
        assert!(matches!(
            verify_theorem1_prime(&Effect::zero(2), &spec, &[State::basis(2, 0)]),
            Err(Error::NotMember { .. })
        ));
    }

    #[test]
    fn theorem2_on_ghz() {
        let model = ghz();
        let a = Effect::basis_projector(2, 0);
        for (w1, expected) in [(0.5, 0.5), (0.25, 0.25)] {
            let spec = SuperpositionSpec::pure(&e(2, 0), &e(2, 1), w1).unwrap();
            let members = family_members(&spec, &InterferenceGrid::default()).unwrap();
            let r = verify_theorem2(&model, 0, 1, &a, &a, &spec, &members).unwrap();
            assert!(r.pass, "{r:?}");
            let eq4 = &r.witnesses["eq4"][0];
            assert!((eq4[0].as_f64().unwrap() - expected).abs() < 1e-12);
        }
        let spec = SuperpositionSpec::pure(&e(2, 0), &e(2, 1), 1.0).unwrap();
        let r = verify_theorem2(&model, 0, 1, &a, &a, &spec, &[State::basis(2, 0)]).unwrap();
        assert!(r.pass);
        assert_eq!(r.witnesses["eq4"][0], json!([1.0, 1.0, 1.0]));
        assert_eq!(r.witnesses["eq5"][0], json!([0.0, 0.0]));
    }

    #[test]
    fn theorem2_flags_failing_channel() {
        let model = ghz();
        let spec = SuperpositionSpec::pure(&e(2, 0), &e(2, 1), 0.5).unwrap();
        let good = Effect::basis_projector(2, 0);
        let bad = Effect::new(ComplexMatrix::identity(2).scale(0.5)).unwrap();
        let r = verify_theorem2(&model, 0, 1, &good, &bad, &spec, &[spec.mixture()]).unwrap();
        assert!(!r.pass);
        assert!(r.preconditions["channel_0_discriminates"].satisfied);
        assert!(!r.preconditions["channel_1_discriminates"].satisfied);
        assert!(verify_theorem2(&model, 1, 1, &good, &good, &spec, &[]).is_err());
    }

    #[test]
    fn skipped_complement_breaks_eq5_and_separability() {
        let model = ghz();
        let spec = SuperpositionSpec::pure(&e(2, 0), &e(2, 1), 0.5).unwrap();
        let a = Effect::basis_projector(2, 0);
        let v = Verifier::default().mutated(Some(Mutation::SkippedComplement));
        assert!(!v.theorem2(&model, 0, 1, &a, &a, &spec, &[spec.mixture()]).unwrap().pass);
        assert!(v.separability(&model, &spec.mixture(), 0, 1, &a, &a).unwrap() > 0.1);
    }

    #[test]
    fn tilted_pointers_break_discrimination() {
        let layout = ChannelLayout::new(vec![2, 2]).unwrap();
        let pointers = vec![PointerPair::basis(2, 0, 1); 2];
        let v = Verifier::default().mutated(Some(Mutation::NonOrthogonalPointers));
        let model = v
            .premeasurement(&State::basis(2, 0), &State::basis(2, 1), layout, &pointers, SupportPadding::Reject)
            .unwrap();
        assert!(matches!(
            discriminating_reading(&model, 0, &State::basis(2, 0), &State::basis(2, 1)),
            Err(Error::ChannelNotDiscriminating { .. })
        ));
    }

    #[test]
    fn counterexample_search_matches_closed_form() {
        let model = ghz();
        let spec = SuperpositionSpec::pure(&e(2, 0), &e(2, 1), 0.5).unwrap();
        let r = counterexample_search(&model, &spec, 0.0, 10, 1).unwrap();
        assert!(r.pass);
        assert!(r.residual("max_disagreement").unwrap() <= 1e-12);

        // Degraded readings are diag(1 - eta/2, eta/2); the two branches each
        // contribute w * (1 - eta/2) * eta/2.
        let r = counterexample_search(&model, &spec, 0.1, 10, 1).unwrap();
        let expected = (1.0 - 0.05) * 0.05;
        assert!((r.residual("max_disagreement").unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn oracle_examples() {
        let x = State::basis(3, 0);
        let v = brute_force_effect_oracle(3, 100, 5, None, |a| Ok((prob(a, &x)? - prob(a, &x)?).abs())).unwrap();
        assert_eq!(v.max_violation, 0.0);

        let spec = SuperpositionSpec::pure(&e(3, 0), &e(3, 1), 0.5).unwrap();
        let member = superposition_family(&spec, 0.8, 1.1).unwrap();
        let q1 = kernel_projector(spec.x1(), DEFAULT_RANK_CUTOFF).unwrap();
        let eq2 = |x: &State| {
            let x = x.clone();
            let spec = spec.clone();
            move |a: &Effect| Ok((prob(a, &x)? - spec.w2() * prob(a, spec.x2())?).abs())
        };
        let v = brute_force_effect_oracle(3, 1000, 6, Some(q1.matrix()), eq2(&member)).unwrap();
        assert!(v.max_violation <= 1e-10);

        // X1 itself against a w1 = 1/2 spec: effects near |1><1| see 0 instead of 1/2.
        let v = brute_force_effect_oracle(3, 1000, 6, Some(q1.matrix()), eq2(spec.x1())).unwrap();
        assert!(v.max_violation > 0.4 && v.max_violation <= 0.5 + 1e-12);
    }

    #[test]
    fn mutation_names_roundtrip() {
        for m in Mutation::ALL {
            assert_eq!(m.name().parse::<Mutation>().unwrap(), m);
        }
        assert!("nope".parse::<Mutation>().is_err());
    }
}
