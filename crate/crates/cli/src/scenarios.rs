//! The built-in interferometer and Stern-Gerlach arrangements.
//!
//! Every arrangement is a premeasurement whose channels are detectors. A
//! detector channel is a qubit whose pointer `|1>` means "fired". Readings
//! are pointer projectors, degraded by the configured detector noise.
//!
//! Mach-Zehnder convention: arm I is `|0>`, arm II is `|1>`, and the
//! recombining beam splitter is the Hadamard matrix, so output port 0 sees
//! `|+><+|` and fires with probability `1/2 + c sqrt(w1 w2) cos(phase)` on the
//! family member with coherence `c` and relative phase `phase`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use objectiva::measurement::{m_eval, realized_effect, sample_events, MeasurementModel, OutcomeRecord, ReadingSet};
use objectiva::superposition::{family_members, random_member, superposition_family};
use objectiva::theorems::Report;
use objectiva::{
    prob, ChannelLayout, ComplexMatrix, Effect, Error, InterferenceGrid, PointerPair, Result, Sampler, State,
    SuperpositionSpec, SupportPadding, Vector, Verifier,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{ScenarioConfig, ScenarioKind};

/// Agreement required between `V^dagger O V` and the measurement functional.
pub const REALIZED_TOLERANCE: f64 = 1e-12;

/// Random members drawn per weight when the branches are mixed.
const MIXED_MEMBERS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub value: f64,
}

impl Check {
    pub fn at_most(value: f64, limit: f64) -> Self {
        Self { pass: value <= limit, value }
    }

    pub fn above(value: f64, limit: f64) -> Self {
        Self { pass: value > limit, value }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: ScenarioKind,
    pub version: String,
    pub config_hash: String,
    pub pass: bool,
    pub checks: BTreeMap<String, Check>,
    pub reports: Vec<Report>,
    pub tables: BTreeMap<String, Value>,
}

impl ScenarioReport {
    fn new(config: &ScenarioConfig) -> Self {
        Self {
            scenario: config.scenario,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
            pass: false,
            checks: BTreeMap::new(),
            reports: Vec::new(),
            tables: BTreeMap::new(),
        }
    }

    fn check(&mut self, name: &str, check: Check) {
        self.checks.insert(name.to_string(), check);
    }

    fn finish(mut self) -> Self {
        self.pass = self.checks.values().all(|c| c.pass) && self.reports.iter().all(|r| r.pass);
        self
    }
}

/// A premeasurement together with its branch states and detector readings.
#[derive(Clone, Debug)]
pub struct Arrangement {
    pub model: MeasurementModel,
    pub x1: State,
    pub x2: State,
    /// Pure branch vectors, when the branches are pure.
    pub branches: Option<(Vector, Vector)>,
    /// One noiseless reading per channel.
    pub readings: ReadingSet,
}

impl Arrangement {
    fn from_vectors(
        phi1: Vector,
        phi2: Vector,
        pointers: Vec<PointerPair>,
        readings: ReadingSet,
        verifier: &Verifier,
    ) -> Result<Self> {
        let (x1, x2) = (State::pure(&phi1)?, State::pure(&phi2)?);
        let dims = pointers.iter().map(|p| p.first.len()).collect();
        let model = verifier.premeasurement(&x1, &x2, ChannelLayout::new(dims)?, &pointers, SupportPadding::Reject)?;
        Ok(Self { model, x1, x2, branches: Some((phi1, phi2)), readings })
    }

    /// Readings degraded by detector noise `eta`.
    pub fn noisy_readings(&self, eta: f64) -> Result<ReadingSet> {
        let mut out = ReadingSet::new();
        for (channel, reading) in self.readings.iter() {
            out.insert(channel, reading.degrade(eta)?);
        }
        Ok(out)
    }

    pub fn spec(&self, w1: f64, tolerance: f64) -> Result<SuperpositionSpec> {
        SuperpositionSpec::with_tolerance(self.x1.clone(), self.x2.clone(), w1, 1.0 - w1, tolerance)
    }
}

fn basis(dim: usize, k: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Pointer pair of a detector that fires on the first branch only.
fn fires_on_first() -> PointerPair {
    PointerPair::basis(2, 1, 0)
}

fn fires_on_second() -> PointerPair {
    PointerPair::basis(2, 0, 1)
}

fn fired(channels: usize) -> ReadingSet {
    (0..channels).fold(ReadingSet::new(), |set, c| set.with(c, Effect::basis_projector(2, 1)))
}

fn hadamard() -> DMatrix<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

/// Effect of output port `port` behind the recombining beam splitter.
pub fn port_effect(port: usize) -> Result<Effect> {
    let b = hadamard();
    Effect::new(ComplexMatrix::new(b.adjoint() * ComplexMatrix::projector(&basis(2, port)).as_inner() * b)?)
}

/// Detectors behind the two output ports of the Mach-Zehnder arrangement.
pub fn fig1a_arrangement(verifier: &Verifier) -> Result<Arrangement> {
    let b = hadamard();
    let plus = b.adjoint() * basis(2, 0);
    let minus = b.adjoint() * basis(2, 1);
    Arrangement::from_vectors(plus, minus, vec![fires_on_first(), fires_on_second()], fired(2), verifier)
}

/// One detector in each arm.
pub fn fig1b_arrangement(verifier: &Verifier) -> Result<Arrangement> {
    Arrangement::from_vectors(basis(2, 0), basis(2, 1), vec![fires_on_first(), fires_on_second()], fired(2), verifier)
}

/// Two detectors in arm I, the first one non-absorbing.
pub fn fig1c_arrangement(verifier: &Verifier) -> Result<Arrangement> {
    Arrangement::from_vectors(basis(2, 0), basis(2, 1), vec![fires_on_first(), fires_on_first()], fired(2), verifier)
}

/// Spin-1/2 with an up detector, a down detector and a three-cell screen
/// whose upper cell is hit by the up beam and lower cell by the down beam.
/// Every reading reports "spin up": the up detector fired, the down detector
/// stayed silent, the upper screen cell is lit.
pub fn stern_gerlach_arrangement(verifier: &Verifier) -> Result<Arrangement> {
    let screen = PointerPair::basis(3, 0, 2);
    let readings = fired(1).with(1, Effect::basis_projector(2, 0)).with(2, Effect::basis_projector(3, 0));
    Arrangement::from_vectors(
        basis(2, 0),
        basis(2, 1),
        vec![fires_on_first(), fires_on_second(), screen],
        readings,
        verifier,
    )
}

/// Qubit copied onto `channels` qubit registers, `|0>` for the first
/// branch. Readings are the first-branch pointer projectors.
pub fn ghz_arrangement(channels: usize, verifier: &Verifier) -> Result<Arrangement> {
    let pointers = vec![PointerPair::basis(2, 0, 1); channels];
    let readings = (0..channels).fold(ReadingSet::new(), |s, c| s.with(c, Effect::basis_projector(2, 0)));
    Arrangement::from_vectors(basis(2, 0), basis(2, 1), pointers, readings, verifier)
}

/// User-supplied branches; channel `k` records `|0>` for the first branch
/// and `|1>` for the second, and its reading is `|0><0|`. Directions outside
/// both supports are assigned to the second branch.
pub fn custom_arrangement(config: &ScenarioConfig, verifier: &Verifier) -> Result<Arrangement> {
    let custom = config
        .custom
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("custom scenario needs a custom section".into()))?;
    let x1 = State::with_tolerance(custom.x1.clone(), config.tolerance)?;
    let x2 = State::with_tolerance(custom.x2.clone(), config.tolerance)?;
    let pointers: Vec<PointerPair> = custom.channel_dims.iter().map(|&d| PointerPair::basis(d, 0, 1)).collect();
    let layout = ChannelLayout::new(custom.channel_dims.clone())?;
    let model = verifier.premeasurement(&x1, &x2, layout, &pointers, SupportPadding::RouteToSecond)?;
    let readings = custom
        .channel_dims
        .iter()
        .enumerate()
        .fold(ReadingSet::new(), |s, (c, &d)| s.with(c, Effect::basis_projector(d, 0)));
    let branches = match (x1.pure_vector(), x2.pure_vector()) {
        (Ok(a), Ok(b)) => Some((a, b)),
        _ => None,
    };
    Ok(Arrangement { model, x1, x2, branches, readings })
}

pub fn arrangement(config: &ScenarioConfig, verifier: &Verifier) -> Result<Arrangement> {
    match config.scenario {
        ScenarioKind::Fig1aInterference => fig1a_arrangement(verifier),
        ScenarioKind::Fig1bCoincidence => fig1b_arrangement(verifier),
        ScenarioKind::Fig1cReduction => fig1c_arrangement(verifier),
        ScenarioKind::SternGerlach => stern_gerlach_arrangement(verifier),
        ScenarioKind::Custom => custom_arrangement(config, verifier),
    }
}

pub fn interference_grid(config: &ScenarioConfig) -> InterferenceGrid {
    InterferenceGrid { coherences: config.coherence_grid.clone(), phases: config.phase_grid.phases() }
}

/// Grid family of `spec`, or the mixture plus seeded random members when the
/// branches are mixed.
pub fn members(spec: &SuperpositionSpec, grid: &InterferenceGrid, seed: u64) -> Result<Vec<State>> {
    if spec.is_pure() {
        return family_members(spec, grid);
    }
    let mut sampler = Sampler::new(seed);
    let mut out = vec![spec.mixture()];
    for _ in 0..MIXED_MEMBERS {
        out.push(random_member(spec, &mut sampler)?);
    }
    Ok(out)
}

/// State that `sample` draws events from.
pub fn sample_state(arr: &Arrangement, config: &ScenarioConfig) -> Result<State> {
    let spec = arr.spec(config.weights.0, config.tolerance)?;
    let coherence = if spec.is_pure() { config.sample_coherence } else { 0.0 };
    superposition_family(&spec, coherence, config.sample_phase)
}

pub fn sample(config: &ScenarioConfig, verifier: &Verifier) -> Result<Vec<OutcomeRecord>> {
    let arr = arrangement(config, verifier)?;
    let x = sample_state(&arr, config)?;
    sample_events(&arr.model, &arr.noisy_readings(config.detector_noise)?, &x, config.trials, config.seed)
}

/// Largest gap between `prob(V^dagger O V, X)` and `m(O; X)` over the full
/// reading set and each single reading. Fails if a realized operator is not
/// an effect.
pub fn realized_effect_gap(model: &MeasurementModel, readings: &ReadingSet, states: &[State]) -> Result<f64> {
    let mut sets = vec![readings.clone()];
    sets.extend(readings.iter().map(|(c, a)| ReadingSet::new().with(c, a.clone())));
    let mut worst: f64 = 0.0;
    for set in &sets {
        let realized = realized_effect(model, set)?;
        let strict = Effect::new(realized.matrix().clone())?;
        for x in states {
            worst = worst.max((prob(&strict, x)? - m_eval(model, set, x)?).abs());
        }
    }
    Ok(worst)
}

/// Channel readings for channels `0` and `1` with complements where
/// `fire[k]` is false.
fn pattern(readings: &ReadingSet, a: usize, b: usize, fire: [bool; 2], verifier: &Verifier) -> ReadingSet {
    let pick = |c: usize, f: bool| {
        let r = readings.get(c).expect("reading present");
        if f {
            r.clone()
        } else {
            verifier.complement(r)
        }
    };
    ReadingSet::new().with(a, pick(a, fire[0])).with(b, pick(b, fire[1]))
}

/// Detector-pair statistics from the two-channel reduced state: the reduced
/// state is diagonal in the pointer basis under the built-in arrangements,
/// and each noisy reading is diagonal, so every probability is a sum over
/// pointer pairs `(i, j)` of `rho_ij,ij` times per-detector firing rates.
/// Returns `(P(disagree), P(both fire))`.
pub fn joint_distribution_oracle(model: &MeasurementModel, readings: &ReadingSet, x: &State) -> Result<(f64, f64)> {
    let rho = model.reduced_states(x, &[0, 1])?;
    let rate = |c: usize| -> Vec<f64> {
        let m = readings.get(c).expect("reading present").matrix();
        (0..m.dim()).map(|i| m.get(i, i).re).collect()
    };
    let (r0, r1) = (rate(0), rate(1));
    let (mut disagree, mut both) = (0.0, 0.0);
    for (i, a) in r0.iter().enumerate() {
        for (j, b) in r1.iter().enumerate() {
            let p = rho.matrix().get(i * r1.len() + j, i * r1.len() + j).re;
            disagree += p * (a * (1.0 - b) + (1.0 - a) * b);
            both += p * a * b;
        }
    }
    Ok((disagree, both))
}

fn add_realized_check(
    report: &mut ScenarioReport,
    arr: &Arrangement,
    readings: &ReadingSet,
    states: &[State],
) -> Result<()> {
    let gap = realized_effect_gap(&arr.model, readings, states)?;
    report.check("realized_effect", Check::at_most(gap, REALIZED_TOLERANCE));
    Ok(())
}

fn grid_members(arr: &Arrangement, config: &ScenarioConfig) -> Result<Vec<(f64, Vec<State>)>> {
    let grid = interference_grid(config);
    config.weight_grid.iter().map(|&w| Ok((w, members(&arr.spec(w, config.tolerance)?, &grid, config.seed)?))).collect()
}

pub fn run_fig1a(config: &ScenarioConfig, verifier: &Verifier) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(config);
    let tol = config.tolerance;
    let arr = fig1a_arrangement(verifier)?;
    let port = port_effect(0)?;
    let (w1, w2) = config.weights;
    let arms = SuperpositionSpec::with_tolerance(State::basis(2, 0), State::basis(2, 1), w1, w2, tol)?;

    let phases = config.phase_grid.phases();
    let (mut closed_form_gap, mut flat_spread, mut min_fringe): (f64, f64, Option<f64>) = (0.0, 0.0, None);
    let mut rows = Vec::new();
    let mut visibility = Vec::new();
    let mut states = Vec::new();
    for &c in &config.coherence_grid {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &phase in &phases {
            let x = superposition_family(&arms, c, phase)?;
            let p = prob(&port, &x)?;
            let expected = 0.5 + c * (w1 * w2).sqrt() * phase.cos();
            closed_form_gap = closed_form_gap.max((p - expected).abs());
            lo = lo.min(p);
            hi = hi.max(p);
            rows.push(json!({"coherence": c, "phase": phase, "prob": p}));
            states.push(x);
        }
        let spread = hi - lo;
        if c == 0.0 {
            flat_spread = flat_spread.max(spread);
        } else if w1 * w2 > 0.0 {
            min_fringe = Some(min_fringe.map_or(spread, |m: f64| m.min(spread)));
        }
        visibility.push(json!({"coherence": c, "visibility": spread / (hi + lo), "bound": 2.0 * c * (w1 * w2).sqrt()}));
    }
    report.check("fringe_closed_form", Check::at_most(closed_form_gap, tol));
    if config.coherence_grid.contains(&0.0) {
        report.check("flat_without_coherence", Check::at_most(flat_spread, tol));
    }
    if let Some(spread) = min_fringe {
        report.check("fringe_with_coherence", Check::above(spread, tol));
    }

    // The detector behind port 0 realizes the port effect.
    let realized = realized_effect(&arr.model, &ReadingSet::new().with(0, arr.readings.get(0).unwrap().clone()))?;
    report.check("port_effect_realized", Check::at_most(realized.matrix().max_abs_diff(port.matrix()), tol));
    let mut both: f64 = 0.0;
    for x in &states {
        both = both.max(m_eval(&arr.model, &arr.readings, x)?);
    }
    report.check("ports_never_coincide", Check::at_most(both, tol));
    add_realized_check(&mut report, &arr, &arr.readings, &states)?;

    report.tables.insert("fringe".into(), json!(rows));
    report.tables.insert("visibility".into(), json!(visibility));
    Ok(report.finish())
}

pub fn run_fig1b(config: &ScenarioConfig, verifier: &Verifier) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(config);
    let tol = config.tolerance;
    let arr = fig1b_arrangement(verifier)?;
    let (phi1, phi2) = arr.branches.clone().expect("pure arms");

    let realized = realized_effect(&arr.model, &arr.readings)?;
    let leak = ComplexMatrix::projector(&phi1).scale(config.coincidence_leak);
    let coincidence = Effect::with_tolerance(realized.matrix() + &leak, tol)?;

    let grid = objectiva::CoefficientGrid { weights: config.weight_grid.clone(), phases: config.phase_grid.phases() };
    let check = verifier.theorem1(&coincidence, &phi1, &phi2, &grid)?;
    let arm_check = Check {
        pass: check.preconditions_hold(),
        value: check.preconditions.values().map(|p| p.value).fold(0.0, f64::max),
    };
    report.check("zero_arm_components", arm_check);

    let (mut worst, mut rate_gap) = (0.0f64, 0.0f64);
    let mut all_states = Vec::new();
    let mut table = Vec::new();
    for (w, states) in grid_members(&arr, config)? {
        let mut worst_here: f64 = 0.0;
        for x in &states {
            worst_here = worst_here.max(prob(&coincidence, x)?);
            let arm1 = m_eval(&arr.model, &ReadingSet::new().with(0, arr.readings.get(0).unwrap().clone()), x)?;
            let arm2 = m_eval(&arr.model, &ReadingSet::new().with(1, arr.readings.get(1).unwrap().clone()), x)?;
            rate_gap = rate_gap.max((arm1 - w).abs()).max((arm2 - (1.0 - w)).abs());
        }
        worst = worst.max(worst_here);
        table.push(json!({"w1": w, "max_coincidence": worst_here}));
        all_states.extend(states);
    }
    report.check("coincidence", Check::at_most(worst, tol));
    report.check("arm_rates", Check::at_most(rate_gap, tol));
    add_realized_check(&mut report, &arr, &arr.readings, &all_states)?;
    report.reports.push(check);
    report.tables.insert("coincidence".into(), json!(table));
    Ok(report.finish())
}

pub fn run_fig1c(config: &ScenarioConfig, verifier: &Verifier) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(config);
    let tol = config.tolerance;
    let eta = config.detector_noise;
    let arr = fig1c_arrangement(verifier)?;
    let readings = arr.noisy_readings(eta)?;

    let (mut max_disagree, mut min_disagree, mut both_gap, mut oracle_gap) = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    let mut table = Vec::new();
    let mut all_states = Vec::new();
    for (w, states) in grid_members(&arr, config)? {
        let mut row = (0.0f64, 0.0f64);
        for x in &states {
            let disagree = m_eval(&arr.model, &pattern(&readings, 0, 1, [true, false], verifier), x)?
                + m_eval(&arr.model, &pattern(&readings, 0, 1, [false, true], verifier), x)?;
            let both = m_eval(&arr.model, &readings, x)?;
            let (oracle_disagree, oracle_both) = joint_distribution_oracle(&arr.model, &readings, x)?;
            oracle_gap = oracle_gap.max((disagree - oracle_disagree).abs()).max((both - oracle_both).abs());
            max_disagree = max_disagree.max(disagree);
            min_disagree = min_disagree.min(disagree);
            both_gap = both_gap.max((both - w).abs());
            row = (row.0.max(disagree), row.1.max(both));
        }
        table.push(json!({"w1": w, "max_disagreement": row.0, "max_both_fire": row.1}));
        if eta == 0.0 {
            let spec = arr.spec(w, tol)?;
            let (a0, a1) = (readings.get(0).unwrap(), readings.get(1).unwrap());
            report.reports.push(verifier.theorem2(&arr.model, 0, 1, a0, a1, &spec, &states)?);
        }
        all_states.extend(states);
    }
    if eta == 0.0 {
        report.check("disagreement", Check::at_most(max_disagree, tol));
        report.check("both_fire_rate", Check::at_most(both_gap, tol));
    } else {
        report.check("disagreement_with_noise", Check::above(min_disagree, 0.0));
    }
    report.check("joint_distribution_oracle", Check::at_most(oracle_gap, tol));
    add_realized_check(&mut report, &arr, &readings, &all_states)?;
    report.tables.insert("reduction".into(), json!(table));
    Ok(report.finish())
}

/// The agreement check on every channel pair over the weight grid, with the noiseless
/// readings.
fn theorem2_all_pairs(
    report: &mut ScenarioReport,
    arr: &Arrangement,
    config: &ScenarioConfig,
    verifier: &Verifier,
) -> Result<Vec<State>> {
    let channels = arr.readings.channels();
    let mut all_states = Vec::new();
    for (w, states) in grid_members(arr, config)? {
        let spec = arr.spec(w, config.tolerance)?;
        for (i, &mu) in channels.iter().enumerate() {
            for &nu in &channels[i + 1..] {
                let (a_mu, a_nu) = (arr.readings.get(mu).unwrap(), arr.readings.get(nu).unwrap());
                report.reports.push(verifier.theorem2(&arr.model, mu, nu, a_mu, a_nu, &spec, &states)?);
            }
        }
        all_states.extend(states);
    }
    Ok(all_states)
}

fn noisy_search(
    report: &mut ScenarioReport,
    arr: &Arrangement,
    config: &ScenarioConfig,
    verifier: &Verifier,
) -> Result<()> {
    if config.detector_noise > 0.0 {
        let spec = arr.spec(config.weights.0, config.tolerance)?;
        let search = verifier.counterexample_search(&arr.model, &spec, 0, 1, config.detector_noise, 32, config.seed)?;
        report.reports.push(search);
    }
    Ok(())
}

pub fn run_stern_gerlach(config: &ScenarioConfig, verifier: &Verifier) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(config);
    let arr = stern_gerlach_arrangement(verifier)?;
    let states = theorem2_all_pairs(&mut report, &arr, config, verifier)?;
    add_realized_check(&mut report, &arr, &arr.readings, &states)?;
    noisy_search(&mut report, &arr, config, verifier)?;

    let x = sample_state(&arr, config)?;
    let readings = arr.noisy_readings(config.detector_noise)?;
    let records = sample_events(&arr.model, &readings, &x, config.trials, config.seed)?;
    let disagreements = records.iter().filter(|r| !all_equal(r)).count();
    let up = records.iter().filter(|r| r.outcomes[&0] == 1).count();
    let p = m_eval(&arr.model, &ReadingSet::new().with(0, readings.get(0).unwrap().clone()), &x)?;
    let n = config.trials.max(1) as f64;
    let sigma = (p * (1.0 - p) / n).sqrt();
    let deviation = (up as f64 / n - p).abs();
    if config.detector_noise == 0.0 {
        report.check("sampled_disagreements", Check::at_most(disagreements as f64, 0.0));
    }
    report.check("up_frequency_sigmas", Check::at_most(deviation, 3.0 * sigma + f64::EPSILON));
    report.tables.insert(
        "sampling".into(),
        json!({"trials": config.trials, "disagreements": disagreements, "up": up, "p_up": p, "sigma": sigma}),
    );
    Ok(report.finish())
}

fn all_equal(record: &OutcomeRecord) -> bool {
    let mut values = record.outcomes.values();
    let first = values.next();
    values.all(|v| Some(v) == first)
}

pub fn run_custom(config: &ScenarioConfig, verifier: &Verifier) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(config);
    let arr = custom_arrangement(config, verifier)?;
    let states = theorem2_all_pairs(&mut report, &arr, config, verifier)?;
    add_realized_check(&mut report, &arr, &arr.readings, &states)?;
    noisy_search(&mut report, &arr, config, verifier)?;
    report.check("padded_dimensions", Check { pass: true, value: arr.model.padded_dims() as f64 });
    Ok(report.finish())
}

pub fn run(config: &ScenarioConfig, verifier: &Verifier) -> Result<ScenarioReport> {
    match config.scenario {
        ScenarioKind::Fig1aInterference => run_fig1a(config, verifier),
        ScenarioKind::Fig1bCoincidence => run_fig1b(config, verifier),
        ScenarioKind::Fig1cReduction => run_fig1c(config, verifier),
        ScenarioKind::SternGerlach => run_stern_gerlach(config, verifier),
        ScenarioKind::Custom => run_custom(config, verifier),
    }
}

/// One line per check and per theorem report.
pub fn render_text(report: &ScenarioReport) -> String {
    let verdict = |pass: bool| if pass { "PASS" } else { "FAIL" };
    let mut out = format!(
        "{} {} (objectiva {}, config {})\n",
        verdict(report.pass),
        report.scenario,
        report.version,
        &report.config_hash[..12]
    );
    for (name, check) in &report.checks {
        out += &format!("  {} {name} = {:.3e}\n", verdict(check.pass), check.value);
    }
    for r in &report.reports {
        let worst = r.residuals.values().copied().fold(0.0, f64::max);
        out += &format!("  {} {} max residual {:.3e}\n", verdict(r.pass), r.theorem, worst);
    }
    if let Some(Value::Array(rows)) = report.tables.get("fringe") {
        out += "  coherence  phase    prob\n";
        for row in rows {
            out += &format!(
                "  {:9.3}  {:6.3}  {:.6}\n",
                row["coherence"].as_f64().unwrap_or(f64::NAN),
                row["phase"].as_f64().unwrap_or(f64::NAN),
                row["prob"].as_f64().unwrap_or(f64::NAN)
            );
        }
    }
    out
}
