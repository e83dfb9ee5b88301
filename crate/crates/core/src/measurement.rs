//! Multi-channel measurements realized by a premeasurement isometry.
//!
//! The isometry `V` maps the object space into `channel_1 (x) ... (x)
//! channel_n (x) object`. Branch `b` of the object (the support of `X1` or
//! `X2`) is copied unchanged into the object register while every channel
//! receives that branch's pointer vector. Readings act on single channels;
//! unread channels and the object register are traced over.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::discrimination::synthesize_discriminator;
use crate::error::{Error, Result};
use crate::linalg::{
    check_dims, clamp_probability, partial_trace, prob, support_projector, support_rank, tensor_all, tensor_vectors,
    ComplexMatrix, Effect, State, Vector, DEFAULT_RANK_CUTOFF, DEFAULT_TOLERANCE,
};
use crate::random::Sampler;

/// Largest number of read channels `sample_events` will tabulate.
pub const MAX_SAMPLED_CHANNELS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelLayout {
    channel_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl ChannelLayout {
    pub fn new(channel_dims: Vec<usize>) -> Result<Self> {
        if channel_dims.len() < 2 {
            return Err(Error::TooFewChannels(channel_dims.len()));
        }
        if channel_dims.contains(&0) {
            return Err(Error::InvalidParameter("channel dimension must be positive".into()));
        }
        Ok(Self { channel_dims, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.channel_dims.len() {
            return Err(Error::DimensionMismatch { expected: self.channel_dims.len(), found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn channel_dims(&self) -> &[usize] {
        &self.channel_dims
    }

    pub fn channel_count(&self) -> usize {
        self.channel_dims.len()
    }

    pub fn label(&self, channel: usize) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(channel)).map(String::as_str)
    }

    fn check_channel(&self, channel: usize) -> Result<()> {
        if channel >= self.channel_count() {
            return Err(Error::ChannelIndex { index: channel, count: self.channel_count() });
        }
        Ok(())
    }
}

/// Pointer states written to one channel: `first` for the X1 branch,
/// `second` for the X2 branch.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerPair {
    pub first: Vector,
    pub second: Vector,
}

impl PointerPair {
    pub fn new(first: Vector, second: Vector) -> Self {
        Self { first, second }
    }

    /// `|i>` and `|j>` in a `dim`-dimensional channel.
    pub fn basis(dim: usize, first: usize, second: usize) -> Self {
        let e = |k: usize| {
            let mut v = Vector::zeros(dim);
            v[k] = Complex64::new(1.0, 0.0);
            v
        };
        Self::new(e(first), e(second))
    }

    /// Largest deviation of the pair's Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n1 = (self.first.norm_squared() - 1.0).abs();
        let n2 = (self.second.norm_squared() - 1.0).abs();
        let overlap = self.first.dotc(&self.second).norm();
        n1.max(n2).max(overlap)
    }
}

/// What to do with object directions outside `supp X1 + supp X2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportPadding {
    /// Send the remainder through the X2 pointers.
    #[default]
    RouteToSecond,
    Reject,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementModel {
    object_dim: usize,
    layout: ChannelLayout,
    isometry: DMatrix<Complex64>,
    padded: usize,
}

impl MeasurementModel {
    /// Wraps a given isometry of shape `(prod channel_dims * object_dim) x object_dim`.
    pub fn from_isometry(object_dim: usize, layout: ChannelLayout, isometry: DMatrix<Complex64>) -> Result<Self> {
        let rows: usize = layout.channel_dims.iter().product::<usize>() * object_dim;
        if isometry.nrows() != rows {
            return Err(Error::DimensionMismatch { expected: rows, found: isometry.nrows() });
        }
        check_dims(object_dim, isometry.ncols())?;
        if isometry.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = isometry_defect(&isometry);
        if defect > DEFAULT_TOLERANCE {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self { object_dim, layout, isometry, padded: 0 })
    }

    pub fn object_dim(&self) -> usize {
        self.object_dim
    }

    pub fn layout(&self) -> &ChannelLayout {
        &self.layout
    }

    pub fn isometry(&self) -> &DMatrix<Complex64> {
        &self.isometry
    }

    /// Number of object dimensions routed by [`SupportPadding::RouteToSecond`].
    pub fn padded_dims(&self) -> usize {
        self.padded
    }

    /// Factor dimensions of the output space: every channel, then the object register.
    pub fn register_dims(&self) -> Vec<usize> {
        let mut dims = self.layout.channel_dims.clone();
        dims.push(self.object_dim);
        dims
    }

    /// `V X V^dagger`.
    pub fn joint_state(&self, x: &State) -> Result<State> {
        check_dims(self.object_dim, x.dim())?;
        let m = x.matrix().conjugate_by(&self.isometry).hermitian_part();
        State::with_tolerance(m, x.tolerance())
    }

    /// State of a single channel after tracing out everything else.
    pub fn reduced_state(&self, x: &State, channel: usize) -> Result<State> {
        self.reduced_states(x, &[channel])
    }

    /// Joint state of the listed channels, in the listed (ascending) order.
    pub fn reduced_states(&self, x: &State, channels: &[usize]) -> Result<State> {
        for &c in channels {
            self.layout.check_channel(c)?;
        }
        let joint = self.joint_state(x)?;
        let reduced = partial_trace(joint.matrix(), &self.register_dims(), channels)?;
        State::with_tolerance(reduced.hermitian_part(), x.tolerance())
    }
}

/// `max |V^dagger V - I|`.
pub fn isometry_defect(v: &DMatrix<Complex64>) -> f64 {
    let gram = v.adjoint() * v;
    let n = gram.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// `(x)_mu first_mu (x) P1 + (x)_mu second_mu (x) P2` without validating the pointers.
pub fn branch_isometry(pointers: &[PointerPair], p1: &ComplexMatrix, p2: &ComplexMatrix) -> DMatrix<Complex64> {
    let first = tensor_vectors(pointers.iter().map(|p| &p.first));
    let second = tensor_vectors(pointers.iter().map(|p| &p.second));
    first.kronecker(p1.as_inner()) + second.kronecker(p2.as_inner())
}

/// Premeasurement copying the X1/X2 branch label onto every channel.
pub fn build_premeasurement(
    x1: &State,
    x2: &State,
    layout: ChannelLayout,
    pointers: &[PointerPair],
    padding: SupportPadding,
) -> Result<MeasurementModel> {
    check_dims(x1.dim(), x2.dim())?;
    let overlap = x1.matrix().trace_product(x2.matrix()).re;
    if overlap > x1.tolerance().max(x2.tolerance()) {
        return Err(Error::NotOrthogonal { overlap });
    }
    check_dims(layout.channel_count(), pointers.len())?;
    for (channel, (pair, &dim)) in pointers.iter().zip(&layout.channel_dims).enumerate() {
        check_dims(dim, pair.first.len())?;
        check_dims(dim, pair.second.len())?;
        let defect = pair.orthonormality_defect();
        if defect > DEFAULT_TOLERANCE {
            return Err(Error::PointersNotOrthonormal { channel, defect });
        }
    }
    let (p1, p2, padded) = branch_projectors(x1, x2, padding)?;
    let v = branch_isometry(pointers, &p1, &p2);
    let mut model = MeasurementModel::from_isometry(x1.dim(), layout, v)?;
    model.padded = padded;
    Ok(model)
}

/// Support projectors of the two branches, the second one widened by the
/// uncovered remainder when padding is allowed.
pub fn branch_projectors(
    x1: &State,
    x2: &State,
    padding: SupportPadding,
) -> Result<(ComplexMatrix, ComplexMatrix, usize)> {
    let dim = x1.dim();
    let missing = dim.saturating_sub(support_rank(x1, DEFAULT_RANK_CUTOFF) + support_rank(x2, DEFAULT_RANK_CUTOFF));
    let p1 = support_projector(x1, DEFAULT_RANK_CUTOFF)?.matrix().clone();
    let p2 = match (missing, padding) {
        (0, _) => support_projector(x2, DEFAULT_RANK_CUTOFF)?.matrix().clone(),
        (_, SupportPadding::RouteToSecond) => &ComplexMatrix::identity(dim) - &p1,
        (_, SupportPadding::Reject) => return Err(Error::SupportDeficiency { missing }),
    };
    Ok((p1, p2, missing))
}

/// Random orthonormal pointer pair in a `dim`-dimensional channel.
pub fn random_pointer_pair(sampler: &mut Sampler, dim: usize) -> PointerPair {
    let v = sampler.orthonormal_vectors(dim, 2);
    PointerPair::new(v[0].clone(), v[1].clone())
}

/// Premeasurement of a random orthogonal pair with random pointers;
/// uncovered object directions are padded into the second branch.
pub fn random_premeasurement(
    sampler: &mut Sampler,
    object_dim: usize,
    channel_dims: &[usize],
) -> Result<(MeasurementModel, State, State)> {
    let (x1, x2) = sampler.orthogonal_pair(object_dim);
    let layout = ChannelLayout::new(channel_dims.to_vec())?;
    let pointers: Vec<PointerPair> = channel_dims.iter().map(|&d| random_pointer_pair(sampler, d)).collect();
    let model = build_premeasurement(&x1, &x2, layout, &pointers, SupportPadding::RouteToSecond)?;
    Ok((model, x1, x2))
}

/// Channel readings `A^mu`, keyed by channel index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReadingSet {
    entries: BTreeMap<usize, Effect>,
}

impl ReadingSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, channel: usize, reading: Effect) -> Self {
        self.entries.insert(channel, reading);
        self
    }

    pub fn insert(&mut self, channel: usize, reading: Effect) {
        self.entries.insert(channel, reading);
    }

    pub fn get(&self, channel: usize) -> Option<&Effect> {
        self.entries.get(&channel)
    }

    pub fn channels(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Effect)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    fn validate(&self, layout: &ChannelLayout) -> Result<()> {
        for (&channel, reading) in &self.entries {
            layout.check_channel(channel)?;
            check_dims(layout.channel_dims[channel], reading.dim())?;
        }
        Ok(())
    }

    fn tolerance(&self) -> f64 {
        self.entries.values().map(Effect::tolerance).fold(DEFAULT_TOLERANCE, f64::max)
    }
}

/// `(x)_mu A^mu (x) I_unread (x) I_object` on the full output space.
pub fn reading_operator(model: &MeasurementModel, readings: &ReadingSet) -> Result<ComplexMatrix> {
    readings.validate(&model.layout)?;
    let identities: Vec<ComplexMatrix> = model.register_dims().iter().map(|&d| ComplexMatrix::identity(d)).collect();
    let factors = identities.iter().enumerate().map(|(k, id)| match readings.get(k) {
        Some(a) => a.matrix(),
        None => id,
    });
    Ok(tensor_all(factors))
}

/// `m({A^mu}; X)`: probability that every read channel fires.
pub fn m_eval(model: &MeasurementModel, readings: &ReadingSet, x: &State) -> Result<f64> {
    check_dims(model.object_dim, x.dim())?;
    if readings.is_empty() {
        return Ok(1.0);
    }
    let op = reading_operator(model, readings)?;
    let joint = x.matrix().conjugate_by(&model.isometry);
    let t = op.trace_product(&joint);
    let slack = (readings.tolerance() + x.tolerance()) * op.dim() as f64;
    if t.im.abs() > slack {
        return Err(Error::ImaginaryResidue { residue: t.im.abs() });
    }
    clamp_probability(t.re, slack)
}

/// The object-space effect `V^dagger ((x) A^mu (x) I) V` realized by fixed readings.
pub fn realized_effect(model: &MeasurementModel, readings: &ReadingSet) -> Result<Effect> {
    let op = reading_operator(model, readings)?;
    let v = &model.isometry;
    let m = ComplexMatrix::new(v.adjoint() * op.as_inner() * v)?;
    Effect::with_tolerance(m, readings.tolerance())
}

/// `|m(A^mu, A^nu; X) + m(A^mu, not A^nu; X) - m(A^mu; X)|`.
pub fn verify_separability(
    model: &MeasurementModel,
    x: &State,
    mu: usize,
    nu: usize,
    a_mu: &Effect,
    a_nu: &Effect,
) -> Result<f64> {
    separability_residual(model, x, mu, nu, a_mu, a_nu, &a_nu.complement())
}

/// Separability residual with the complement of `A^nu` supplied by the caller.
pub fn separability_residual(
    model: &MeasurementModel,
    x: &State,
    mu: usize,
    nu: usize,
    a_mu: &Effect,
    a_nu: &Effect,
    not_a_nu: &Effect,
) -> Result<f64> {
    if mu == nu {
        return Err(Error::ChannelCollision(mu));
    }
    let both = ReadingSet::new().with(mu, a_mu.clone()).with(nu, a_nu.clone());
    let ignored = ReadingSet::new().with(mu, a_mu.clone()).with(nu, not_a_nu.clone());
    let single = ReadingSet::new().with(mu, a_mu.clone());
    Ok((m_eval(model, &both, x)? + m_eval(model, &ignored, x)? - m_eval(model, &single, x)?).abs())
}

/// Reading on channel `mu` with `m(A; X1) = 1` and `m(A; X2) = 0`.
pub fn discriminating_reading(model: &MeasurementModel, mu: usize, x1: &State, x2: &State) -> Result<Effect> {
    let r1 = model.reduced_state(x1, mu)?;
    let r2 = model.reduced_state(x2, mu)?;
    let overlap = r1.matrix().trace_product(r2.matrix()).re;
    if overlap > r1.tolerance().max(r2.tolerance()) {
        return Err(Error::ChannelNotDiscriminating { channel: mu, overlap });
    }
    synthesize_discriminator(&r1, &r2)
}

/// Probability of every firing pattern of the read channels. Bit `k` of the
/// pattern is the event on the `k`-th read channel in ascending order.
pub fn outcome_distribution(model: &MeasurementModel, readings: &ReadingSet, x: &State) -> Result<Vec<f64>> {
    let channels = readings.channels();
    if channels.len() > MAX_SAMPLED_CHANNELS {
        return Err(Error::TooManyChannels { count: channels.len(), limit: MAX_SAMPLED_CHANNELS });
    }
    readings.validate(&model.layout)?;
    let complements: Vec<Effect> = channels.iter().map(|&c| readings.get(c).unwrap().complement()).collect();
    (0..1usize << channels.len())
        .map(|pattern| {
            let mut set = ReadingSet::new();
            for (k, &c) in channels.iter().enumerate() {
                let reading =
                    if pattern >> k & 1 == 1 { readings.get(c).unwrap().clone() } else { complements[k].clone() };
                set.insert(c, reading);
            }
            m_eval(model, &set, x)
        })
        .collect()
}

/// One trial: the event `e^mu` of every read channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub trial: usize,
    pub outcomes: BTreeMap<usize, u8>,
}

/// Draws `trials` joint outcomes from [`outcome_distribution`].
pub fn sample_events(
    model: &MeasurementModel,
    readings: &ReadingSet,
    x: &State,
    trials: usize,
    seed: u64,
) -> Result<Vec<OutcomeRecord>> {
    let table = outcome_distribution(model, readings, x)?;
    let channels = readings.channels();
    let total: f64 = table.iter().sum();
    let mut sampler = Sampler::new(seed);
    let last_possible = table.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let records = (0..trials)
        .map(|trial| {
            let u = sampler.rng().random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = last_possible;
            for (pattern, &p) in table.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = pattern;
                    break;
                }
            }
            let outcomes = channels.iter().enumerate().map(|(k, &c)| (c, (pick >> k & 1) as u8)).collect();
            OutcomeRecord { trial, outcomes }
        })
        .collect();
    Ok(records)
}

#[derive(Serialize, Deserialize)]
struct IsometryExchange {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ModelExchange {
    object_dim: usize,
    channel_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    isometry: IsometryExchange,
}

impl Serialize for MeasurementModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = &self.isometry;
        let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..v.nrows()).map(|i| (0..v.ncols()).map(|j| f(&v[(i, j)])).collect()).collect()
        };
        ModelExchange {
            object_dim: self.object_dim,
            channel_dims: self.layout.channel_dims.clone(),
            labels: self.layout.labels.clone(),
            isometry: IsometryExchange { rows: v.nrows(), cols: v.ncols(), re: part(|z| z.re), im: part(|z| z.im) },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasurementModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let x = ModelExchange::deserialize(d)?;
        let iso = &x.isometry;
        if iso.re.len() != iso.rows
            || iso.im.len() != iso.rows
            || iso.re.iter().chain(&iso.im).any(|r| r.len() != iso.cols)
        {
            return Err(D::Error::custom("isometry rows/cols do not match re/im"));
        }
        let v = DMatrix::from_fn(iso.rows, iso.cols, |i, j| Complex64::new(iso.re[i][j], iso.im[i][j]));
        let mut layout = ChannelLayout::new(x.channel_dims).map_err(D::Error::custom)?;
        if let Some(labels) = x.labels {
            layout = layout.with_labels(labels).map_err(D::Error::custom)?;
        }
        MeasurementModel::from_isometry(x.object_dim, layout, v).map_err(D::Error::custom)
    }
}

/// `(A, X)` for the realized effect; handy when comparing against [`m_eval`].
pub fn realized_probability(model: &MeasurementModel, readings: &ReadingSet, x: &State) -> Result<f64> {
    prob(&realized_effect(model, readings)?, x)
}
