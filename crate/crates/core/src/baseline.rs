//! Analytical cost of independent (imitation-free) search.
//!
//! A lone agent flipping one uniformly random bit per trial performs a
//! random walk on the Hamming distance to the global optimum. The walk's
//! (N+1)-state transition matrix has second-largest eigenvalue lambda_N,
//! and the expected rescaled cost of L independent agents is
//! C = L / (2^N (1 - lambda_N^L)).

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Column-stochastic transition matrix of the distance-to-optimum walk.
/// State N (all bits correct) is absorbing.
#[derive(Clone, Debug)]
pub struct TransitionMatrix<S: Scalar> {
    n: usize,
    /// Row-major (n+1) x (n+1); entry(i, j) is the probability of moving
    /// to state i from state j.
    entries: Vec<S>,
}

/// Largest n the dense walk matrix is built for.
pub const MAX_MATRIX_N: usize = 64;

/// Builds the walk matrix for string length n: from state j (number of
/// correctly set bits), a uniformly random flip moves up with probability
/// 1 - j/n and down with probability j/n; column 0 forces an up-move and
/// column n is absorbing.
pub fn build_matrix<S: Scalar>(n: usize) -> Result<TransitionMatrix<S>> {
    if !(2..=MAX_MATRIX_N).contains(&n) {
        return Err(Error::Parameter(format!(
            "matrix size must be in 2..={MAX_MATRIX_N}, got {n}"
        )));
    }
    let dim = n + 1;
    let mut entries = vec![S::zero(); dim * dim];
    let nf = S::from_usize(n).unwrap();
    for j in 1..n {
        let jf = S::from_usize(j).unwrap();
        entries[(j + 1) * dim + j] = S::one() - jf / nf;
        entries[(j - 1) * dim + j] = jf / nf;
    }
    entries[dim] = S::one(); // column 0: always to state 1
    entries[n * dim + n] = S::one(); // column n: absorbing
    Ok(TransitionMatrix { n, entries })
}

impl<S: Scalar> TransitionMatrix<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> S {
        self.entries[i * self.dim() + j]
    }

    pub fn column_sums(&self) -> Vec<S> {
        let dim = self.dim();
        (0..dim)
            .map(|j| (0..dim).fold(S::zero(), |acc, i| acc + self.entry(i, j)))
            .collect()
    }
}

/// Second-largest eigenvalue of the walk matrix.
///
/// The dominant eigenvalue of a stochastic matrix is 1 with right
/// eigenvector e_N (the absorbing state) and left eigenvector all-ones, so
/// Wielandt deflation B = T - e_N 1^T removes it exactly. The transient
/// spectrum is symmetric about zero (the walk is bipartite), so plain power
/// iteration on B would oscillate; iterating B + I instead makes 1 +
/// lambda_N strictly dominant. Right and left eigenvectors are each
/// iterated to the scalar tolerance (1e-12 for f64) and combined in a
/// two-sided Rayleigh quotient, which squares the residual error away.
pub fn second_largest_eigenvalue<S: Scalar>(tm: &TransitionMatrix<S>) -> Result<S> {
    let x = dominant_deflated_vector(tm, false)?;
    let y = dominant_deflated_vector(tm, true)?;
    let bx = apply_deflated_plus_identity(tm, &x, false);
    let overlap = dot(&y, &x);
    // Unit eigenvectors of a defective or ill-conditioned pair would be
    // near-orthogonal; this walk's dominant transient mode never is.
    if overlap.abs() < S::from_f64(1e-6).unwrap() {
        return Err(Error::Numerical(
            "left and right eigenvectors are near-orthogonal".into(),
        ));
    }
    Ok(dot(&y, &bx) / overlap - S::one())
}

/// w = (B + I) v, or its adjoint: B = T - e_n 1^T, B^T = T^T - 1 e_n^T.
fn apply_deflated_plus_identity<S: Scalar>(tm: &TransitionMatrix<S>, v: &[S], adjoint: bool) -> Vec<S> {
    let dim = tm.dim();
    let ones_dot = v.iter().fold(S::zero(), |acc, &x| acc + x);
    (0..dim)
        .map(|i| {
            let mut acc = S::zero();
            for j in 0..dim {
                let t = if adjoint { tm.entry(j, i) } else { tm.entry(i, j) };
                acc = acc + t * v[j];
            }
            if adjoint {
                acc = acc - v[tm.n];
            } else if i == tm.n {
                acc = acc - ones_dot;
            }
            acc + v[i]
        })
        .collect()
}

/// Power iteration on B + I (or its adjoint) until the eigenpair residual
/// ||w - mu v|| drops below the scalar tolerance.
fn dominant_deflated_vector<S: Scalar>(tm: &TransitionMatrix<S>, adjoint: bool) -> Result<Vec<S>> {
    let tol = S::convergence_tolerance();
    // v starts dense and asymmetric so it overlaps the dominant mode.
    let mut v: Vec<S> = (0..tm.dim())
        .map(|i| S::one() / S::from_usize(i + 2).unwrap())
        .collect();
    normalize(&mut v);

    const MAX_ITERS: usize = 200_000;
    for _ in 0..MAX_ITERS {
        let mut w = apply_deflated_plus_identity(tm, &v, adjoint);
        // Rayleigh quotient with ||v|| = 1; (mu, v) is an eigenpair of
        // B + I exactly when w - mu v vanishes.
        let mu = dot(&w, &v);
        let res = w
            .iter()
            .zip(&v)
            .fold(S::zero(), |acc, (&wi, &vi)| acc.max((wi - mu * vi).abs()));
        normalize(&mut w);
        std::mem::swap(&mut v, &mut w);
        if res <= tol {
            return Ok(v);
        }
    }
    Err(Error::Numerical(format!(
        "power iteration did not converge to {tol} within {MAX_ITERS} iterations"
    )))
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

fn normalize<S: Scalar>(v: &mut [S]) {
    let norm = v.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt();
    for x in v.iter_mut() {
        *x = *x / norm;
    }
}

/// Expected rescaled cost C = L / (2^n (1 - lambda_n^L)) of L independent
/// agents. Evaluated via expm1/ln_1p so the near-cancellation 1 - lambda^L
/// keeps full precision for lambda close to 1 and large L.
pub fn independent_cost<S: Scalar>(n: usize, l: u64) -> Result<S> {
    if l < 1 {
        return Err(Error::Parameter("group size must be at least 1".into()));
    }
    let lambda = second_largest_eigenvalue(&build_matrix::<S>(n)?)?;
    let lf = S::from_u64(l).unwrap();
    // 1 - lambda^L = -expm1(L * ln(1 + (lambda - 1)))
    let one_minus_pow = -(lf * (lambda - S::one()).ln_1p()).exp_m1();
    let pow2n = S::from_f64((n as f64).exp2()).unwrap();
    Ok(lf / (pow2n * one_minus_pow))
}
