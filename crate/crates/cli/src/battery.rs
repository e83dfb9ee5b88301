//! The `verify-all` battery: every verifier and oracle on random inputs in
//! object dimensions 2 to 8, plus the built-in scenarios.

use std::collections::BTreeMap;

use objectiva::discrimination::{best_discrimination_error, discriminates, synthesize_discriminator};
use objectiva::measurement::{random_pointer_pair, ReadingSet};
use objectiva::superposition::{family_members, is_member, random_member};
use objectiva::theorems::brute_force_effect_oracle;
use objectiva::{
    kernel_projector, prob, ChannelLayout, CoefficientGrid, Effect, InterferenceGrid, MeasurementModel, Mutation,
    Result, Sampler, State, SuperpositionSpec, SupportPadding, Verifier, DEFAULT_RANK_CUTOFF,
};
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::scenarios::{self, ghz_arrangement, realized_effect_gap, REALIZED_TOLERANCE};

pub const DIMS: std::ops::RangeInclusive<usize> = 2..=8;

/// Violation below which the sampling oracle calls a state a member.
const ORACLE_MEMBER_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryOptions {
    pub seed: u64,
    pub tolerance: f64,
    /// Random cases per object dimension and check.
    pub cases_per_dim: usize,
    /// Random effects per oracle call.
    pub oracle_samples: usize,
    /// Sampled trials in the scenario runs.
    pub trials: usize,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self { seed: 0, tolerance: objectiva::DEFAULT_TOLERANCE, cases_per_dim: 6, oracle_samples: 200, trials: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryCheck {
    pub pass: bool,
    pub cases: usize,
    /// Largest residual seen, or the count of failing cases.
    pub worst: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub version: String,
    pub mutation: Option<Mutation>,
    pub options: BatteryOptions,
    pub pass: bool,
    pub checks: BTreeMap<String, BatteryCheck>,
}

/// Running tally of one check.
#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn record(&mut self, ok: bool, residual: f64) {
        self.cases += 1;
        self.failures += usize::from(!ok);
        self.worst = self.worst.max(residual);
    }
}

type CheckFn = fn(&Verifier, &BatteryOptions, &mut Sampler) -> Result<Tally>;

pub fn verify_all(options: &BatteryOptions, mutation: Option<Mutation>) -> BatteryReport {
    let verifier = Verifier::with_tolerance(options.tolerance).mutated(mutation);
    let checks: [(&str, CheckFn); 10] = [
        ("theorem1", theorem1),
        ("theorem1_prime", theorem1_prime),
        ("membership_oracle", membership_oracle),
        ("discrimination", discrimination),
        ("separability", separability),
        ("realized_effect", realized_effect),
        ("theorem2_ghz", theorem2_ghz),
        ("theorem2_random", theorem2_random),
        ("counterexample_search", counterexample),
        ("scenarios", builtin_scenarios),
    ];
    let mut out = BTreeMap::new();
    for (k, (name, check)) in checks.into_iter().enumerate() {
        let mut sampler = Sampler::new(options.seed.wrapping_add(k as u64));
        let entry = match check(&verifier, options, &mut sampler) {
            Ok(t) => BatteryCheck { pass: t.failures == 0 && t.cases > 0, cases: t.cases, worst: t.worst, error: None },
            Err(e) => BatteryCheck { pass: false, cases: 0, worst: f64::NAN, error: Some(e.to_string()) },
        };
        out.insert(name.to_string(), entry);
    }
    BatteryReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        mutation,
        options: *options,
        pass: out.values().all(|c| c.pass),
        checks: out,
    }
}

pub fn render_text(report: &BatteryReport) -> String {
    let verdict = |pass: bool| if pass { "PASS" } else { "FAIL" };
    let mutation = report.mutation.map_or("none".to_string(), |m| m.to_string());
    let mut out = format!("{} verify-all (objectiva {}, mutation {mutation})\n", verdict(report.pass), report.version);
    for (name, c) in &report.checks {
        out += &format!("  {} {name}: {} cases, worst {:.3e}", verdict(c.pass), c.cases, c.worst);
        if let Some(e) = &c.error {
            out += &format!(", error: {e}");
        }
        out.push('\n');
    }
    out
}

fn pure_spec(s: &mut Sampler, dim: usize, tol: f64) -> Result<SuperpositionSpec> {
    let (p1, p2) = s.orthogonal_pure_pair(dim);
    let w1 = s.uniform();
    SuperpositionSpec::with_tolerance(State::pure(&p1)?, State::pure(&p2)?, w1, 1.0 - w1, tol)
}

fn theorem1(v: &Verifier, o: &BatteryOptions, s: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for dim in DIMS {
        for _ in 0..o.cases_per_dim {
            let (psi1, psi2) = s.orthogonal_pure_pair(dim);
            let a = v.annihilating_effect(&s.effect(dim), &psi1, &psi2)?;
            let report = v.theorem1(&a, &psi1, &psi2, &CoefficientGrid::default())?;
            t.record(report.pass, report.residual("max_grid_expectation").unwrap_or(f64::NAN));
        }
    }
    Ok(t)
}

fn theorem1_prime(v: &Verifier, o: &BatteryOptions, s: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for dim in DIMS {
        for _ in 0..o.cases_per_dim {
            let spec = pure_spec(s, dim, v.tolerance)?;
            let (p1, p2) = spec.branches().cloned().expect("pure");
            let a = v.annihilating_effect(&s.effect(dim), &p1, &p2)?;
            let members = family_members(&spec, &InterferenceGrid::default())?;
            let report = v.theorem1_prime(&a, &spec, &members)?;
            t.record(report.pass, report.residual("max_member_probability").unwrap_or(f64::NAN));
        }
    }
    Ok(t)
}

/// Largest `|(A, X) - w2 (A, X2)|` over sampled effects on `ker X1`, or
/// `|(A, X) - w1 (A, X1)|` over sampled effects on `ker X2`.
pub fn oracle_violation(x: &State, spec: &SuperpositionSpec, samples: usize, seed: u64) -> Result<f64> {
    let q1 = kernel_projector(spec.x1(), DEFAULT_RANK_CUTOFF)?;
    let q2 = kernel_projector(spec.x2(), DEFAULT_RANK_CUTOFF)?;
    let blind1 = brute_force_effect_oracle(spec.dim(), samples, seed, Some(q1.matrix()), |a: &Effect| {
        Ok((prob(a, x)? - spec.w2() * prob(a, spec.x2())?).abs())
    })?;
    let blind2 = brute_force_effect_oracle(spec.dim(), samples, seed ^ 1, Some(q2.matrix()), |a: &Effect| {
        Ok((prob(a, x)? - spec.w1() * prob(a, spec.x1())?).abs())
    })?;
    Ok(blind1.max_violation.max(blind2.max_violation))
}

fn membership_oracle(v: &Verifier, o: &BatteryOptions, s: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for dim in DIMS {
        for k in 0..o.cases_per_dim {
            let (x1, x2) = s.orthogonal_pair(dim);
            let w1 = s.uniform_range(0.1, 0.9);
            let spec = SuperpositionSpec::with_tolerance(x1, x2, w1, 1.0 - w1, v.tolerance)?;
            let x = match k % 3 {
                0 => random_member(&spec, s)?,
                1 => s.state(dim),
                _ => spec.x1().clone(),
            };
            let violation = oracle_violation(&x, &spec, o.oracle_samples, s.index(0, 1 << 30) as u64)?;
            t.record(is_member(&x, &spec)? == (violation <= ORACLE_MEMBER_LIMIT), 0.0);
        }
    }
    Ok(t)
}

fn discrimination(v: &Verifier, o: &BatteryOptions, s: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for dim in DIMS {
        for _ in 0..o.cases_per_dim {
            let (x1, x2) = s.orthogonal_pair(dim);
            let a = synthesize_discriminator(&x1, &x2)?;
            let not_a = v.complement(&a);
            let complement_law = (prob(&a, &x1)? + prob(&not_a, &x1)? - 1.0).abs();
            let helstrom = best_discrimination_error(&x1, &x2, 0.5)?;
            let ok = discriminates(&a, &x1, &x2)? && discriminates(&not_a, &x1, &x2)?;
            t.record(ok && complement_law <= v.tolerance && helstrom <= v.tolerance, complement_law.max(helstrom));
        }
    }
    Ok(t)
}

/// Random premeasurement built through the verifier, so that pointer
/// mutations reach it. Returns pointer projectors of the first branch.
fn random_model(v: &Verifier, s: &mut Sampler, dim: usize) -> Result<(MeasurementModel, State, State, ReadingSet)> {
    let (x1, x2) = s.orthogonal_pair(dim);
    let channels: Vec<usize> = (0..s.index(2, 3)).map(|_| s.index(2, 3)).collect();
    let pointers: Vec<_> = channels.iter().map(|&d| random_pointer_pair(s, d)).collect();
    let readings = pointers
        .iter()
        .enumerate()
        .map(|(c, p)| Effect::projector(&p.first).map(|e| (c, e)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(ReadingSet::new(), |set, (c, e)| set.with(c, e));
    let model = v.premeasurement(&x1, &x2, ChannelLayout::new(channels)?, &pointers, SupportPadding::RouteToSecond)?;
    Ok((model, x1, x2, readings))
}

fn separability(v: &Verifier, o: &BatteryOptions, s: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for dim in DIMS {
        for _ in 0..o.cases_per_dim {
            let (model, _, _, _) = random_model(v, s, dim)?;
            let dims = model.layout().channel_dims().to_vec();
            let (mu, nu) = (0, dims.len() - 1);
            let (a_mu, a_nu) = (s.effect(dims[mu]), s.effect(dims[nu]));
            let residual = v.separability(&model, &s.state(dim), mu, nu, &a_mu, &a_nu)?;
            t.record(residual <= REALIZED_TOLERANCE, residual);
        }
    }
    Ok(t)
}

fn realized_effect(v: &Verifier, o: &BatteryOptions, s: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for dim in DIMS {
        for _ in 0..o.cases_per_dim {
            let (model, _, _, _) = random_model(v, s, dim)?;
            let readings = model
                .layout()
                .channel_dims()
                .iter()
                .enumerate()
                .fold(ReadingSet::new(), |set, (c, &d)| set.with(c, s.effect(d)));
            let states = [s.state(dim), s.state_of_rank(dim, 1)];
            let gap = realized_effect_gap(&model, &readings, &states)?;
            t.record(gap <= REALIZED_TOLERANCE, gap);
        }
    }
    Ok(t)
}

fn weight_grid() -> Vec<f64> {
    CoefficientGrid::default().weights
}

fn theorem2_ghz(v: &Verifier, _: &BatteryOptions, _: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for channels in [2, 3] {
        let arr = ghz_arrangement(channels, v)?;
        for w in weight_grid() {
            let spec = arr.spec(w, v.tolerance)?;
            let members = family_members(&spec, &InterferenceGrid::default())?;
            let (a0, a1) = (arr.readings.get(0).unwrap(), arr.readings.get(channels - 1).unwrap());
            let report = v.theorem2(&arr.model, 0, channels - 1, a0, a1, &spec, &members)?;
            let worst =
                report.residual("eq4_max_deviation").unwrap().max(report.residual("eq5_max_disagreement").unwrap());
            t.record(report.pass, worst);
        }
    }
    Ok(t)
}

fn theorem2_random(v: &Verifier, o: &BatteryOptions, s: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for dim in DIMS {
        for _ in 0..o.cases_per_dim {
            let (model, x1, x2, readings) = random_model(v, s, dim)?;
            let w1 = s.uniform();
            let spec = SuperpositionSpec::with_tolerance(x1, x2, w1, 1.0 - w1, v.tolerance)?;
            let members = scenarios::members(&spec, &InterferenceGrid::default(), s.index(0, 1 << 30) as u64)?;
            let report =
                v.theorem2(&model, 0, 1, readings.get(0).unwrap(), readings.get(1).unwrap(), &spec, &members)?;
            let worst =
                report.residual("eq4_max_deviation").unwrap().max(report.residual("eq5_max_disagreement").unwrap());
            t.record(report.pass, worst);
        }
    }
    Ok(t)
}

/// Disagreement of two noisy GHZ detectors at `w1 = 1/2`: each branch makes
/// a reading fire with `1 - eta/2` or `eta/2`.
pub fn ghz_noisy_disagreement(eta: f64) -> f64 {
    (1.0 - eta / 2.0) * (eta / 2.0)
}

pub const NOISE_GRID: [f64; 5] = [0.0, 0.01, 0.05, 0.1, 0.2];

fn counterexample(v: &Verifier, o: &BatteryOptions, _: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    let arr = ghz_arrangement(2, v)?;
    let spec = arr.spec(0.5, v.tolerance)?;
    let mut previous = 0.0;
    for eta in NOISE_GRID {
        let report = v.counterexample_search(&arr.model, &spec, 0, 1, eta, 16, o.seed)?;
        let got = report.residual("max_disagreement").unwrap();
        let gap = (got - ghz_noisy_disagreement(eta)).abs();
        t.record(report.pass && got >= previous && gap <= v.tolerance, gap);
        previous = got;
    }
    Ok(t)
}

fn builtin_scenarios(v: &Verifier, o: &BatteryOptions, _: &mut Sampler) -> Result<Tally> {
    let mut t = Tally::default();
    for kind in ScenarioKind::ALL.into_iter().filter(|k| *k != ScenarioKind::Custom) {
        let mut config = ScenarioConfig::new(kind);
        config.seed = o.seed;
        config.tolerance = o.tolerance;
        config.trials = o.trials;
        let report = scenarios::run(&config, v)?;
        t.record(report.pass, 0.0);
    }
    Ok(t)
}
