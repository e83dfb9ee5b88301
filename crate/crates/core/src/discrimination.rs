//! Effects that tell two states apart.

use crate::error::{Error, Result};
use crate::linalg::{check_dims, prob, ComplexMatrix, Effect, State, DEFAULT_RANK_CUTOFF};

/// `(A, X1), (A, X2)` within tolerance of `(1, 0)` or `(0, 1)`.
pub fn discriminates(a: &Effect, x1: &State, x2: &State) -> Result<bool> {
    check_dims(x1.dim(), x2.dim())?;
    let tol = a.tolerance().max(x1.tolerance()).max(x2.tolerance());
    let (p1, p2) = (prob(a, x1)?, prob(a, x2)?);
    let near = |value: f64, target: f64| (value - target).abs() <= tol;
    Ok((near(p1, 1.0) && near(p2, 0.0)) || (near(p1, 0.0) && near(p2, 1.0)))
}

/// Projector onto the strictly positive eigenspace of `X1 - X2`.
///
/// Eigenvalues within `cutoff * max|lambda|` of zero are dropped, so the
/// joint kernel of both states is excluded.
pub fn positive_part_projector(x1: &State, x2: &State, cutoff: f64) -> Result<Effect> {
    check_dims(x1.dim(), x2.dim())?;
    let diff = x1.matrix() - x2.matrix();
    let spectrum = diff.eigh();
    let scale = spectrum.min().abs().max(spectrum.max().abs());
    let threshold = cutoff * scale;
    let p = spectrum.projector_where(|v| v > threshold).hermitian_part();
    Effect::with_tolerance(p, x1.tolerance().max(x2.tolerance()))
}

/// Canonical discriminator of two orthogonal states: equals the support
/// projector of `X1` on the joint support and vanishes elsewhere.
pub fn synthesize_discriminator(x1: &State, x2: &State) -> Result<Effect> {
    check_dims(x1.dim(), x2.dim())?;
    let overlap = x1.matrix().trace_product(x2.matrix()).re;
    if overlap > x1.tolerance().max(x2.tolerance()) {
        return Err(Error::NotOrthogonal { overlap });
    }
    positive_part_projector(x1, x2, DEFAULT_RANK_CUTOFF)
}

/// Minimum error of a two-outcome guess between `X1` (with probability
/// `prior`) and `X2`: `(1 - ||prior X1 - (1 - prior) X2||_1) / 2`.
pub fn best_discrimination_error(x1: &State, x2: &State, prior: f64) -> Result<f64> {
    check_dims(x1.dim(), x2.dim())?;
    if !(0.0..=1.0).contains(&prior) {
        return Err(Error::InvalidParameter(format!("prior {prior} outside [0, 1]")));
    }
    let weighted: ComplexMatrix = &x1.matrix().scale(prior) - &x2.matrix().scale(1.0 - prior);
    let err = 0.5 * (1.0 - weighted.trace_norm());
    Ok(err.max(0.0))
}
