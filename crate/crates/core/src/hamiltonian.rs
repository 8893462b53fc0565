//! Problem diagonal, driver degrees and the interpolated operator
//! `H(s) = (1 - s) H0 + s HP`.
//!
//! `HP` is diagonal in the computational basis with entry `x` equal to the
//! number of clauses violated by `x`. The driver is
//! `H0 = sum_i (d_i / 2)(1 - sigma^x_i)` where `d_i` is the number of clauses
//! containing qubit `i`, so
//!
//! ```text
//! (H0 v)[x] = sum_i (d_i / 2) (v[x] - v[x ^ 2^i])
//! ```

use nalgebra::DMatrix;

use crate::instances::{clause_satisfied, BitString, Clause, Instance};
use crate::{Error, Result, StateVector, DENSE_CAP, STATE_VECTOR_CAP};

/// Violation penalty of a single clause: 0 if satisfied, 1 otherwise.
pub fn clause_energy(c: &Clause, x: BitString) -> u32 {
    u32::from(!clause_satisfied(c, x))
}

/// Diagonal of `HP`: `energies[x]` is the violation count of basis state `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDiagonal {
    n: usize,
    energies: Vec<f64>,
}

impl ProblemDiagonal {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Second-smallest distinct energy, which is the first excited level of `HP`.
    pub fn first_excited(&self) -> f64 {
        self.energies
            .iter()
            .copied()
            .filter(|&e| e > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn build_problem_diagonal(inst: &Instance) -> Result<ProblemDiagonal> {
    let n = inst.n();
    if n > STATE_VECTOR_CAP {
        return Err(Error::SizeCap {
            what: "problem diagonal",
            n,
            cap: STATE_VECTOR_CAP,
        });
    }
    let mut energies = vec![0.0; 1 << n];
    for c in inst.clauses() {
        for (x, e) in energies.iter_mut().enumerate() {
            *e += f64::from(clause_energy(c, BitString(x as u32)));
        }
    }
    Ok(ProblemDiagonal { n, energies })
}

/// Clause degree `d_i` of every qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriverDegrees {
    d: Vec<u32>,
}

impl DriverDegrees {
    pub fn from_instance(inst: &Instance) -> Self {
        let mut d = vec![0u32; inst.n()];
        for c in inst.clauses() {
            for i in c.indices() {
                d[i] += 1;
            }
        }
        Self { d }
    }

    pub fn from_degrees(d: Vec<u32>) -> Self {
        Self { d }
    }

    pub fn degrees(&self) -> &[u32] {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn total(&self) -> u32 {
        self.d.iter().sum()
    }
}

/// Everything of an instance that `H(s)` depends on, built once per instance.
#[derive(Debug, Clone)]
pub struct ProblemHamiltonian {
    pub diag: ProblemDiagonal,
    pub degrees: DriverDegrees,
}

impl ProblemHamiltonian {
    pub fn new(inst: &Instance) -> Result<Self> {
        Ok(Self {
            diag: build_problem_diagonal(inst)?,
            degrees: DriverDegrees::from_instance(inst),
        })
    }

    /// Driver and diagonal from raw parts (used for toy models in tests).
    pub fn from_parts(energies: Vec<f64>, degrees: DriverDegrees) -> Result<Self> {
        let n = degrees.n();
        if energies.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: energies.len(),
            });
        }
        Ok(Self {
            diag: ProblemDiagonal { n, energies },
            degrees,
        })
    }

    pub fn at(&self, s: f64) -> Result<InterpolatedOperator<'_>> {
        InterpolatedOperator::new(s, &self.diag, &self.degrees)
    }
}

/// Symmetric linear operator acting on real vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `out = A v`; both slices have length `dim()`.
    fn apply_into(&self, v: &[f64], out: &mut [f64]);
}

/// `H(s)` for one instance, applied matrix-free.
#[derive(Debug, Clone, Copy)]
pub struct InterpolatedOperator<'a> {
    s: f64,
    diag: &'a ProblemDiagonal,
    degrees: &'a DriverDegrees,
}

impl<'a> InterpolatedOperator<'a> {
    pub fn new(s: f64, diag: &'a ProblemDiagonal, degrees: &'a DriverDegrees) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")));
        }
        if diag.n != degrees.n() {
            return Err(Error::DimensionMismatch {
                expected: diag.n,
                found: degrees.n(),
            });
        }
        Ok(Self { s, diag, degrees })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n(&self) -> usize {
        self.diag.n
    }

    pub fn diag(&self) -> &ProblemDiagonal {
        self.diag
    }

    pub fn degrees(&self) -> &DriverDegrees {
        self.degrees
    }
}

impl LinearOperator for InterpolatedOperator<'_> {
    fn dim(&self) -> usize {
        1 << self.diag.n
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let s = self.s;
        let driver_diag = 0.5 * (1.0 - s) * f64::from(self.degrees.total());
        for ((o, &vx), &e) in out.iter_mut().zip(v).zip(&self.diag.energies) {
            *o = (driver_diag + s * e) * vx;
        }
        if s == 1.0 {
            return;
        }
        // One streaming pass per qubit over pairs (x, x ^ 2^i).
        for (i, &d) in self.degrees.d.iter().enumerate() {
            let h = 0.5 * (1.0 - s) * f64::from(d);
            let m = 1usize << i;
            for base in (0..v.len()).step_by(2 * m) {
                let (lo_out, hi_out) = out[base..base + 2 * m].split_at_mut(m);
                let (lo_v, hi_v) = v[base..base + 2 * m].split_at(m);
                for j in 0..m {
                    lo_out[j] -= h * hi_v[j];
                    hi_out[j] -= h * lo_v[j];
                }
            }
        }
    }
}

/// `H(s) v` as a new vector.
pub fn apply_hamiltonian(op: &InterpolatedOperator<'_>, v: &StateVector) -> Result<StateVector> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: v.len(),
        });
    }
    let mut out = vec![0.0; v.len()];
    op.apply_into(v.as_slice(), &mut out);
    StateVector::from_amplitudes(out)
}

/// Explicit `2^n x 2^n` matrix of `H(s)`, assembled entry by entry.
pub fn dense_matrix(op: &InterpolatedOperator<'_>) -> Result<DMatrix<f64>> {
    let n = op.n();
    if n > DENSE_CAP {
        return Err(Error::SizeCap {
            what: "dense_matrix",
            n,
            cap: DENSE_CAP,
        });
    }
    let dim = 1usize << n;
    let s = op.s;
    let d = op.degrees.degrees();
    let driver_diag = 0.5 * (1.0 - s) * f64::from(op.degrees.total());
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        m[(x, x)] = driver_diag + s * op.diag.energies[x];
        for (i, &di) in d.iter().enumerate() {
            m[(x, x ^ (1 << i))] = -0.5 * (1.0 - s) * f64::from(di);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::generate_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct evaluation of the five-projector clause penalty with
    /// `sigma^z |0> = |0>`, `sigma^z |1> = -|1>`.
    fn projector_energy(c: &Clause, x: u32) -> f64 {
        let z = |q: usize| if (x >> q) & 1 == 0 { 1.0 } else { -1.0 };
        let [i, j, k] = c.indices();
        let (zi, zj, zk) = (z(i), z(j), z(k));
        ((1.0 + zi) * (1.0 + zj) * (1.0 + zk)
            + (1.0 - zi) * (1.0 - zj) * (1.0 - zk)
            + (1.0 - zi) * (1.0 - zj) * (1.0 + zk)
            + (1.0 - zi) * (1.0 + zj) * (1.0 - zk)
            + (1.0 + zi) * (1.0 - zj) * (1.0 - zk))
            / 8.0
    }

    fn single_clause_system() -> ProblemHamiltonian {
        let c = Clause::new(0, 1, 2).unwrap();
        let energies = (0..8)
            .map(|x| f64::from(clause_energy(&c, BitString(x))))
            .collect();
        ProblemHamiltonian::from_parts(energies, DriverDegrees::from_degrees(vec![1, 1, 1]))
            .unwrap()
    }

    #[test]
    fn clause_energy_matches_projectors() {
        let c = Clause::new(0, 1, 2).unwrap();
        assert_eq!(clause_energy(&c, BitString(0b010)), 0);
        assert_eq!(clause_energy(&c, BitString(0b000)), 1);
        let energies: Vec<u32> = (0..8).map(|x| clause_energy(&c, BitString(x))).collect();
        assert_eq!(energies.iter().filter(|&&e| e == 0).count(), 3);
        assert_eq!(energies.iter().filter(|&&e| e == 1).count(), 5);
        for x in 0..8 {
            assert_eq!(f64::from(energies[x as usize]), projector_energy(&c, x));
        }
        let c = Clause::new(1, 3, 4).unwrap();
        for x in 0..32 {
            assert_eq!(
                f64::from(clause_energy(&c, BitString(x))),
                projector_energy(&c, x)
            );
        }
    }

    #[test]
    fn single_clause_diagonal() {
        let h = single_clause_system();
        assert_eq!(h.diag.energies(), &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_of_generated_instance() {
        let inst = generate_instance(8, 3).unwrap();
        let diag = build_problem_diagonal(&inst).unwrap();
        let e = diag.energies();
        assert_eq!(e[inst.solution().index()], 0.0);
        assert_eq!(e.iter().filter(|&&v| v == 0.0).count(), 1);
        let m = inst.clauses().len() as f64;
        assert!(e.iter().all(|&v| (0.0..=m).contains(&v)));
        assert!(diag.first_excited() >= 1.0);
    }

    #[test]
    fn degrees_sum_to_three_per_clause() {
        let inst = generate_instance(10, 4).unwrap();
        let d = DriverDegrees::from_instance(&inst);
        assert_eq!(d.total() as usize, 3 * inst.clauses().len());
        assert!(d.degrees().iter().all(|&di| di >= 1));
    }

    #[test]
    fn uniform_state_is_annihilated_at_s0() {
        let inst = generate_instance(7, 1).unwrap();
        let h = ProblemHamiltonian::new(&inst).unwrap();
        let out = apply_hamiltonian(&h.at(0.0).unwrap(), &StateVector::uniform(7)).unwrap();
        assert!(out.norm() < 1e-13);
    }

    #[test]
    fn diagonal_action_at_s1() {
        let inst = generate_instance(6, 2).unwrap();
        let h = ProblemHamiltonian::new(&inst).unwrap();
        let op = h.at(1.0).unwrap();
        for x in 0..64 {
            let out = apply_hamiltonian(&op, &StateVector::basis(6, x)).unwrap();
            let mut expected = vec![0.0; 64];
            expected[x] = h.diag.energies()[x];
            assert_eq!(out.as_slice(), &expected[..]);
        }
    }

    #[test]
    fn matches_dense_matrix() {
        let inst = generate_instance(6, 8).unwrap();
        let h = ProblemHamiltonian::new(&inst).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &s in &[0.0, 0.3, 0.71, 1.0] {
            let op = h.at(s).unwrap();
            let m = dense_matrix(&op).unwrap();
            let v = StateVector::random_unit(6, &mut rng);
            let fast = apply_hamiltonian(&op, &v).unwrap();
            let slow = &m * nalgebra::DVector::from_column_slice(v.as_slice());
            for (a, b) in fast.as_slice().iter().zip(slow.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_single_clause_hand_assembled() {
        let h = single_clause_system();
        let m = dense_matrix(&h.at(0.5).unwrap()).unwrap();
        // 0.5 * H0 + 0.5 * HP with H0 = sum_i (1/2)(1 - X_i).
        let mut expected = DMatrix::<f64>::zeros(8, 8);
        for x in 0..8usize {
            expected[(x, x)] = 0.5 * 1.5 + 0.5 * h.diag.energies()[x];
            for i in 0..3 {
                expected[(x, x ^ (1 << i))] = -0.25;
            }
        }
        assert_eq!(m, expected);
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn dense_off_diagonal_structure_at_s0() {
        let inst = generate_instance(6, 13).unwrap();
        let h = ProblemHamiltonian::new(&inst).unwrap();
        let m = dense_matrix(&h.at(0.0).unwrap()).unwrap();
        let d = h.degrees.degrees();
        for x in 0..64 {
            let mut nonzero = 0;
            for y in 0..64 {
                if x != y && m[(x, y)] != 0.0 {
                    nonzero += 1;
                    let i = (x ^ y).trailing_zeros() as usize;
                    assert_eq!((x ^ y).count_ones(), 1);
                    assert_eq!(m[(x, y)], -0.5 * f64::from(d[i]));
                }
            }
            assert_eq!(nonzero, 6);
        }
    }

    #[test]
    fn dense_cap() {
        let inst = generate_instance(13, 0).unwrap();
        let h = ProblemHamiltonian::new(&inst).unwrap();
        assert!(matches!(
            dense_matrix(&h.at(0.5).unwrap()),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        let inst = generate_instance(6, 0).unwrap();
        let h = ProblemHamiltonian::new(&inst).unwrap();
        assert!(h.at(1.5).is_err());
        assert!(h.at(-0.1).is_err());
        let op = h.at(0.5).unwrap();
        assert!(matches!(
            apply_hamiltonian(&op, &StateVector::uniform(5)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    /// Expansion of the diagonal over sigma^z monomials via Walsh-Hadamard.
    fn walsh_hadamard(values: &[f64]) -> Vec<f64> {
        let mut a = values.to_vec();
        let mut h = 1;
        while h < a.len() {
            for base in (0..a.len()).step_by(2 * h) {
                for j in base..base + h {
                    let (u, v) = (a[j], a[j + h]);
                    a[j] = u + v;
                    a[j + h] = u - v;
                }
            }
            h *= 2;
        }
        let scale = a.len() as f64;
        a.iter_mut().for_each(|c| *c /= scale);
        a
    }

    #[test]
    fn problem_diagonal_has_at_most_three_body_terms() {
        for seed in 0..5 {
            let inst = generate_instance(8, seed).unwrap();
            let diag = build_problem_diagonal(&inst).unwrap();
            let coeffs = walsh_hadamard(diag.energies());
            let max_order = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.abs() > 1e-12)
                .map(|(mask, _)| mask.count_ones())
                .max()
                .unwrap();
            assert_eq!(max_order, 3);
        }
    }
}
