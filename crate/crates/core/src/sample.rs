//! Seeded random inputs. Every trial draws from its own ChaCha stream, so
//! results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{KForm, Vector};
use crate::g2::{project_lambda2, CoassocFrame, G2Structure, SymTensor2};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

pub type TrialRng = ChaCha8Rng;

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Scalars that can be drawn at random: small rationals p/q in exact mode,
/// uniform values in [−1, 1) in float mode.
pub trait Sample: Scalar {
    fn sample(rng: &mut TrialRng) -> Self;
}

impl Sample for f64 {
    fn sample(rng: &mut TrialRng) -> Self {
        rng.random_range(-1.0..1.0)
    }
}

impl Sample for Rational {
    fn sample(rng: &mut TrialRng) -> Self {
        let p = rng.random_range(-9i64..=9);
        let q = rng.random_range(1i64..=6);
        Rational::from_ratio(p, q)
    }
}

pub fn vector<S: Sample>(rng: &mut TrialRng, dim: usize) -> Vector<S> {
    Vector::new((0..dim).map(|_| S::sample(rng)).collect())
}

pub fn matrix<S: Sample>(rng: &mut TrialRng, rows: usize, cols: usize) -> Matrix<S> {
    Matrix::from_fn(rows, cols, |_, _| S::sample(rng))
}

pub fn symmetric<S: Sample>(rng: &mut TrialRng, n: usize) -> SymTensor2<S> {
    SymTensor2::from_upper(n, |_, _| S::sample(rng))
}

pub fn form<S: Sample>(rng: &mut TrialRng, dim: usize, degree: usize) -> KForm<S> {
    let n = crate::exterior::binomial(dim, degree);
    KForm::try_new(dim, degree, (0..n).map(|_| S::sample(rng)).collect()).expect("valid shape")
}

/// A random element of Λ²₁₄.
pub fn lambda2_14<S: Sample>(rng: &mut TrialRng, g2: &G2Structure<S>) -> KForm<S> {
    project_lambda2(g2, &form(rng, 7, 2))
        .expect("2-form on R^7")
        .1
}

/// A random vector normal to the frame's plane.
pub fn normal_vector<S: Sample>(rng: &mut TrialRng, frame: &CoassocFrame<S>) -> Vector<S> {
    let c: Vec<S> = (0..3).map(|_| S::sample(rng)).collect();
    frame.normal().embed(&c)
}

/// A random self-dual 2-form on R⁴.
pub fn self_dual_4<S: Sample>(rng: &mut TrialRng) -> KForm<S> {
    crate::exterior::self_dual_part(&form(rng, 4, 2)).expect("2-form on R^4")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..4).map(|_| f64::sample(&mut trial_rng(7, 3))).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let b = f64::sample(&mut trial_rng(7, 4));
        assert_ne!(a[0], b);
        let q = Rational::sample(&mut trial_rng(1, 0));
        assert!(q.to_f64().abs() <= 9.0);
    }
}
