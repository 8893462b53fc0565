//! Two lowest eigenpairs of `H(s)`.
//!
//! The iterative path is a Lanczos iteration with full reorthogonalization
//! and explicit restarts; the dense path diagonalizes the explicit matrix and
//! serves as the test oracle for small `n`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::hamiltonian::{dense_matrix, InterpolatedOperator, LinearOperator};
use crate::state::{axpy, dot, norm};
use crate::{Error, Result, StateVector};

/// Size of the deterministic perturbation added to a warm start.
pub const WARM_START_PERTURBATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Residual tolerance relative to `max(1, |e|)` for both Ritz pairs.
    pub tol: f64,
    /// Largest Krylov basis kept before an explicit restart.
    pub max_krylov: usize,
    pub max_restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_krylov: 300,
            max_restarts: 10,
        }
    }
}

/// Ground and first excited energies plus the ground vector.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub e0: f64,
    pub e1: f64,
    /// Normalized, with non-negative amplitude sum.
    pub ground: StateVector,
    pub residual0: f64,
    pub residual1: f64,
    /// Operator applications (iterative) or 0 (dense).
    pub iterations: usize,
}

impl EigenResult {
    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }
}

struct RitzPair {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
}

/// Lanczos for the two lowest eigenpairs of a symmetric operator.
///
/// Starts from `warm_start` plus a `1e-3` random perturbation drawn from
/// `rng`, or from a random unit vector when no warm start is given. The result
/// is deterministic for a fixed starting vector.
pub fn lowest_two_iterative<A, R>(
    op: &A,
    opts: &SolverOptions,
    warm_start: Option<&StateVector>,
    rng: &mut R,
) -> Result<EigenResult>
where
    A: LinearOperator + ?Sized,
    R: Rng + ?Sized,
{
    let dim = op.dim();
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {dim} < 2")));
    }
    if opts.tol <= 0.0 || opts.max_krylov < 2 {
        return Err(Error::InvalidArgument(
            "solver needs tol > 0 and max_krylov >= 2".into(),
        ));
    }
    let mut start = random_vector(dim, rng);
    if let Some(w) = warm_start {
        if w.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: w.len(),
            });
        }
        let scale = WARM_START_PERTURBATION / norm(&start);
        start
            .iter_mut()
            .zip(w.as_slice())
            .for_each(|(r, &g)| *r = g + scale * *r);
    }

    let kmax = opts.max_krylov.min(dim);
    let mut iterations = 0;
    let mut best = (f64::INFINITY, f64::INFINITY);

    for _restart in 0..=opts.max_restarts {
        let (pairs, used) = lanczos_cycle(op, opts, kmax, start, rng)?;
        iterations += used;
        let [p0, p1] = pairs;
        let ok0 = p0.residual <= opts.tol * p0.value.abs().max(1.0);
        let ok1 = p1.residual <= opts.tol * p1.value.abs().max(1.0);
        if p0.residual.max(p1.residual) < best.0.max(best.1) {
            best = (p0.residual, p1.residual);
        }
        if ok0 && ok1 {
            let mut ground = p0.vector;
            if ground.iter().sum::<f64>() < 0.0 {
                ground.iter_mut().for_each(|a| *a = -*a);
            }
            return Ok(EigenResult {
                e0: p0.value,
                e1: p1.value,
                ground: StateVector::from_amplitudes(ground)?,
                residual0: p0.residual,
                residual1: p1.residual,
                iterations,
            });
        }
        // Restart from a vector carrying both wanted directions.
        start = p0.vector;
        axpy(1.0, &p1.vector, &mut start);
    }
    Err(Error::NonConvergence {
        iterations,
        residual0: best.0,
        residual1: best.1,
    })
}

/// One Lanczos cycle of at most `kmax` steps. Returns the two lowest Ritz
/// pairs with true residuals, either on convergence or when the basis is full.
fn lanczos_cycle<A, R>(
    op: &A,
    opts: &SolverOptions,
    kmax: usize,
    mut start: Vec<f64>,
    rng: &mut R,
) -> Result<([RitzPair; 2], usize)>
where
    A: LinearOperator + ?Sized,
    R: Rng + ?Sized,
{
    let dim = op.dim();
    let n0 = norm(&start);
    if !(n0 > 0.0 && n0.is_finite()) {
        start = random_vector(dim, rng);
    }
    let n0 = norm(&start);
    start.iter_mut().for_each(|a| *a /= n0);

    let mut basis: Vec<Vec<f64>> = vec![start];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut scale = 1.0f64;
    let mut used = 0;

    loop {
        let j = basis.len() - 1;
        op.apply_into(&basis[j], &mut w);
        used += 1;
        let mut a = dot(&basis[j], &w);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        // Full reorthogonalization; a second pass only when the first
        // removed a large part of the vector.
        for _pass in 0..2 {
            let before = norm(&w);
            let coeffs: Vec<f64> = basis.iter().map(|q| dot(q, &w)).collect();
            for (q, &c) in basis.iter().zip(&coeffs) {
                axpy(-c, q, &mut w);
            }
            a += coeffs[j];
            if norm(&w) > 0.5 * before {
                break;
            }
        }
        alpha.push(a);
        let b = norm(&w);
        scale = scale.max(a.abs() + b);
        let k = alpha.len();
        let breakdown = b <= 1e-12 * scale;

        if k >= 2 && (k <= 10 || k.is_multiple_of(5) || k == kmax || breakdown) {
            let (values, vectors) = tridiagonal_lowest_two(&alpha, &beta);
            let converged = (0..2).all(|i| {
                let estimate = b * vectors[i][k - 1].abs();
                estimate <= opts.tol * values[i].abs().max(1.0)
            });
            if converged || k == kmax {
                let pairs = ritz_pairs(op, &basis, &values, &vectors);
                let ok = pairs
                    .iter()
                    .all(|p| p.residual <= opts.tol * p.value.abs().max(1.0));
                if ok || k == kmax {
                    return Ok((pairs, used + 2));
                }
            }
        }

        if breakdown {
            // Invariant subspace: continue with a fresh orthogonal direction.
            let mut r = random_vector(dim, rng);
            for _pass in 0..2 {
                for q in &basis {
                    let c = dot(q, &r);
                    axpy(-c, q, &mut r);
                }
            }
            let nr = norm(&r);
            r.iter_mut().for_each(|x| *x /= nr);
            beta.push(0.0);
            basis.push(r);
        } else {
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }
}

/// Two lowest eigenpairs of the symmetric tridiagonal matrix (alpha, beta).
fn tridiagonal_lowest_two(alpha: &[f64], beta: &[f64]) -> ([f64; 2], [Vec<f64>; 2]) {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (i0, i1) = two_smallest(eig.eigenvalues.as_slice());
    let col = |i: usize| eig.eigenvectors.column(i).iter().copied().collect();
    (
        [eig.eigenvalues[i0], eig.eigenvalues[i1]],
        [col(i0), col(i1)],
    )
}

fn ritz_pairs<A>(
    op: &A,
    basis: &[Vec<f64>],
    values: &[f64; 2],
    coeffs: &[Vec<f64>; 2],
) -> [RitzPair; 2]
where
    A: LinearOperator + ?Sized,
{
    let dim = op.dim();
    let make = |i: usize| {
        let mut x = vec![0.0; dim];
        for (q, &c) in basis.iter().zip(&coeffs[i]) {
            axpy(c, q, &mut x);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|a| *a /= nx);
        let mut hx = vec![0.0; dim];
        op.apply_into(&x, &mut hx);
        axpy(-values[i], &x, &mut hx);
        RitzPair {
            value: values[i],
            residual: norm(&hx),
            vector: x,
        }
    };
    [make(0), make(1)]
}

fn two_smallest(values: &[f64]) -> (usize, usize) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    (order[0], order[1])
}

fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|a| *a /= nv);
    v
}

/// Two lowest eigenpairs of `H(s)` by full dense diagonalization (`n <= 12`).
pub fn dense_lowest_two(op: &InterpolatedOperator<'_>) -> Result<EigenResult> {
    lowest_two_of_matrix(dense_matrix(op)?)
}

/// Two lowest eigenpairs of an explicit symmetric matrix.
pub fn lowest_two_of_matrix(m: DMatrix<f64>) -> Result<EigenResult> {
    let dim = m.nrows();
    if dim < 2 || !dim.is_power_of_two() || m.ncols() != dim {
        return Err(Error::InvalidArgument(format!(
            "expected a square 2^n matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let eig = SymmetricEigen::new(m.clone());
    let (i0, i1) = two_smallest(eig.eigenvalues.as_slice());
    let residual = |i: usize| {
        let v = eig.eigenvectors.column(i).into_owned();
        (&m * &v - &v * eig.eigenvalues[i]).norm()
    };
    let mut ground: Vec<f64> = eig.eigenvectors.column(i0).iter().copied().collect();
    if ground.iter().sum::<f64>() < 0.0 {
        ground.iter_mut().for_each(|a| *a = -*a);
    }
    Ok(EigenResult {
        e0: eig.eigenvalues[i0],
        e1: eig.eigenvalues[i1],
        residual0: residual(i0),
        residual1: residual(i1),
        ground: StateVector::from_amplitudes(ground)?,
        iterations: 0,
    })
}

/// Full ascending spectrum and eigenvectors of an explicit symmetric matrix.
pub fn dense_spectrum(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<DVector<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    (values, DMatrix::from_columns(&cols))
}
