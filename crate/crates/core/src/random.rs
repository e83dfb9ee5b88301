//! Seeded generators for states, effects and orthonormal frames.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, Effect, State, Vector, DEFAULT_TOLERANCE};

/// Deterministic source of random operators. Two samplers built from the
/// same seed produce identical sequences.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn gaussian(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> DMatrix<Complex64> {
        let entries: Vec<Complex64> = (0..rows * cols).map(|_| self.gaussian()).collect();
        DMatrix::from_column_slice(rows, cols, &entries)
    }

    pub fn unit_vector(&mut self, dim: usize) -> Vector {
        let v = self.ginibre(dim, 1).column(0).into_owned();
        let n = v.norm();
        v / Complex64::new(n, 0.0)
    }

    /// `count` orthonormal vectors in `dim` dimensions, as matrix columns.
    pub fn orthonormal_frame(&mut self, dim: usize, count: usize) -> DMatrix<Complex64> {
        assert!(count <= dim, "cannot fit {count} orthonormal vectors in {dim} dimensions");
        let g = self.ginibre(dim, dim);
        let q = g.qr().q();
        q.columns(0, count).into_owned()
    }

    pub fn orthonormal_vectors(&mut self, dim: usize, count: usize) -> Vec<Vector> {
        let frame = self.orthonormal_frame(dim, count);
        (0..count).map(|k| frame.column(k).into_owned()).collect()
    }

    /// GUE-style random hermitian matrix.
    pub fn hermitian(&mut self, dim: usize) -> ComplexMatrix {
        let g = self.ginibre(dim, dim);
        let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
        ComplexMatrix::new(h).expect("finite gaussian entries")
    }

    /// `G G^dagger / Tr(G G^dagger)` for a complex gaussian `G`.
    pub fn state(&mut self, dim: usize) -> State {
        self.state_of_rank(dim, dim)
    }

    /// Random state of rank `rank` (generically) from a `dim x rank` gaussian.
    pub fn state_of_rank(&mut self, dim: usize, rank: usize) -> State {
        let g = self.ginibre(dim, rank.max(1));
        let gg = &g * g.adjoint();
        let t = gg.trace().re;
        let m = ComplexMatrix::new(gg / Complex64::new(t, 0.0)).expect("finite");
        State::new(m.hermitian_part()).expect("gram matrices are states")
    }

    /// Random state supported on the span of the columns of `frame`.
    pub fn state_on(&mut self, frame: &DMatrix<Complex64>) -> State {
        let inner = self.state(frame.ncols());
        let m = inner.matrix().conjugate_by(frame);
        State::new(m.hermitian_part()).expect("isometric embedding preserves states")
    }

    /// Random hermitian matrix with its spectrum affinely rescaled onto [0, 1].
    pub fn effect(&mut self, dim: usize) -> Effect {
        let spectrum = self.hermitian(dim).eigh();
        let (lo, hi) = (spectrum.min(), spectrum.max());
        let spread = hi - lo;
        let m = spectrum.map(|v| if spread > 0.0 { (v - lo) / spread } else { 0.5 });
        Effect::with_tolerance(m.hermitian_part(), DEFAULT_TOLERANCE).expect("rescaled spectrum is in [0, 1]")
    }

    /// Orthogonal states of random ranks on disjoint random subspaces.
    /// Their supports need not cover the whole space.
    pub fn orthogonal_pair(&mut self, dim: usize) -> (State, State) {
        assert!(dim >= 2, "orthogonal pairs need dim >= 2");
        let r1 = self.index(1, dim - 1);
        let r2 = self.index(1, dim - r1);
        let frame = self.orthonormal_frame(dim, r1 + r2);
        let x1 = self.state_on(&frame.columns(0, r1).into_owned());
        let x2 = self.state_on(&frame.columns(r1, r2).into_owned());
        (x1, x2)
    }

    /// Orthogonal pure states.
    pub fn orthogonal_pure_pair(&mut self, dim: usize) -> (Vector, Vector) {
        let v = self.orthonormal_vectors(dim, 2);
        (v[0].clone(), v[1].clone())
    }
}

pub fn random_state(dim: usize, seed: u64) -> State {
    Sampler::new(seed).state(dim)
}

pub fn random_effect(dim: usize, seed: u64) -> Effect {
    Sampler::new(seed).effect(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrices() {
        assert_eq!(random_state(4, 7), random_state(4, 7));
        assert_eq!(random_effect(4, 7), random_effect(4, 7));
        assert_ne!(random_state(4, 7), random_state(4, 8));
    }

    #[test]
    fn thousand_samples_are_valid() {
        let mut s = Sampler::new(11);
        for _ in 0..1000 {
            let x = s.state(4);
            assert!(State::new(x.matrix().clone()).is_ok());
            let a = s.effect(4);
            assert!(Effect::new(a.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn ginibre_states_average_to_maximally_mixed() {
        let dim = 4;
        let mut s = Sampler::new(2024);
        let mut acc = ComplexMatrix::zeros(dim);
        for _ in 0..1000 {
            acc = &acc + s.state(dim).matrix();
        }
        let mean = acc.scale(1.0 / 1000.0);
        let target = 1.0 / dim as f64;
        assert!(mean.max_abs_diff(&ComplexMatrix::identity(dim).scale(target)) < 0.05 * target);
    }

    #[test]
    fn frames_are_orthonormal() {
        let mut s = Sampler::new(3);
        let f = s.orthonormal_frame(6, 4);
        let gram = f.adjoint() * &f;
        let defect = (gram - DMatrix::identity(4, 4)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(defect < 1e-13);
    }

    #[test]
    fn state_on_subspace_stays_inside() {
        let mut s = Sampler::new(5);
        let f = s.orthonormal_frame(5, 2);
        let x = s.state_on(&f);
        let proj = ComplexMatrix::new(&f * f.adjoint()).unwrap();
        let inside = &(&proj * x.matrix()) * &proj;
        assert!(inside.max_abs_diff(x.matrix()) < 1e-13);
    }
}
