//! Random Exact Cover instances with a unique satisfying assignment.
//!
//! A clause over bits `i, j, k` is satisfied iff `x_i + x_j + x_k = 1`.
//! Instances are grown by adding uniformly random, non-duplicate clauses
//! until exactly one assignment survives; if none survive the attempt is
//! discarded and generation starts over.

use std::collections::HashSet;
use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest `n` for which the satisfying set is enumerated by brute force.
pub const BRUTE_FORCE_CAP: usize = 24;

/// Restart budget for [`generate_instance`].
pub const MAX_RESTARTS: usize = 10_000;

/// Assignment of all `n` variables; bit `b` of the value is `x_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitString(pub u32);

impl BitString {
    pub fn bit(self, b: usize) -> bool {
        (self.0 >> b) & 1 == 1
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Three distinct qubit indices, stored sorted so that equality is set equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct Clause([usize; 3]);

impl Clause {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        if a == b || b == c || a == c {
            return Err(Error::InvalidClause(a, b, c));
        }
        let mut idx = [a, b, c];
        idx.sort_unstable();
        Ok(Self(idx))
    }

    pub fn indices(&self) -> [usize; 3] {
        self.0
    }

    /// Bit mask with the clause's three qubits set.
    pub fn mask(&self) -> u32 {
        self.0.iter().fold(0, |m, &i| m | (1 << i))
    }

    pub fn max_index(&self) -> usize {
        self.0[2]
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.0.contains(&qubit)
    }
}

impl TryFrom<[usize; 3]> for Clause {
    type Error = Error;

    fn try_from(idx: [usize; 3]) -> Result<Self> {
        Clause::new(idx[0], idx[1], idx[2])
    }
}

impl From<Clause> for [usize; 3] {
    fn from(c: Clause) -> Self {
        c.0
    }
}

/// True iff exactly one of the clause's three bits is set in `x`.
pub fn clause_satisfied(c: &Clause, x: BitString) -> bool {
    (x.0 & c.mask()).count_ones() == 1
}

/// All bit strings in `[0, 2^n)` satisfying every clause, in increasing order.
pub fn satisfying_set(clauses: &[Clause], n: usize) -> Result<Vec<BitString>> {
    if n > BRUTE_FORCE_CAP {
        return Err(Error::SizeCap {
            what: "satisfying_set",
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    check_indices(clauses, n)?;
    let mut set: Vec<BitString> = (0..1u32 << n).map(BitString).collect();
    for c in clauses {
        set.retain(|&x| clause_satisfied(c, x));
    }
    Ok(set)
}

fn check_indices(clauses: &[Clause], n: usize) -> Result<()> {
    match clauses.iter().find(|c| c.max_index() >= n) {
        Some(c) => Err(Error::QubitOutOfRange {
            index: c.max_index(),
            n,
        }),
        None => Ok(()),
    }
}

/// An Exact Cover instance whose clauses admit exactly one solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    n: usize,
    clauses: Vec<Clause>,
    solution: BitString,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    clauses: Vec<Clause>,
    solution: BitString,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.n, raw.clauses, raw.solution)
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> Self {
        RawInstance {
            n: inst.n,
            clauses: inst.clauses,
            solution: inst.solution,
        }
    }
}

impl Instance {
    /// Builds an instance and verifies all invariants, including uniqueness
    /// of the solution by exhaustive enumeration.
    pub fn new(n: usize, clauses: Vec<Clause>, solution: BitString) -> Result<Self> {
        if n > BRUTE_FORCE_CAP {
            return Err(Error::SizeCap {
                what: "instance",
                n,
                cap: BRUTE_FORCE_CAP,
            });
        }
        let mut seen = HashSet::with_capacity(clauses.len());
        if let Some(dup) = clauses.iter().find(|c| !seen.insert(**c)) {
            return Err(Error::InvalidInstance(format!(
                "duplicate clause {:?}",
                dup.indices()
            )));
        }
        let sat = satisfying_set(&clauses, n)?;
        if sat != [solution] {
            return Err(Error::InvalidInstance(format!(
                "expected unique solution {solution}, found {} satisfying assignments",
                sat.len()
            )));
        }
        let inst = Self {
            n,
            clauses,
            solution,
        };
        if let Some(q) = (0..n).find(|&q| inst.degree(q) == 0) {
            return Err(Error::InvalidInstance(format!(
                "qubit {q} appears in no clause"
            )));
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn solution(&self) -> BitString {
        self.solution
    }

    /// Number of clauses containing `qubit`.
    pub fn degree(&self, qubit: usize) -> usize {
        self.clauses.iter().filter(|c| c.contains(qubit)).count()
    }
}

/// Number of clauses not satisfied by `x`; the `HP` eigenvalue of `|x>`.
pub fn violation_count(inst: &Instance, x: BitString) -> usize {
    inst.clauses
        .iter()
        .filter(|c| !clause_satisfied(c, x))
        .count()
}

/// Deterministic RNG for instance `index` of an ensemble seeded by `master`.
pub fn instance_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Generates an instance for a fixed `(n, seed)`; equivalent to
/// [`generate_instance_with`] on `instance_rng(seed, 0)`.
pub fn generate_instance(n: usize, seed: u64) -> Result<Instance> {
    generate_instance_with(n, &mut instance_rng(seed, 0))
}

pub fn generate_instance_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Instance> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "instance generation needs n >= 3, got {n}"
        )));
    }
    if n > BRUTE_FORCE_CAP {
        return Err(Error::SizeCap {
            what: "generate_instance",
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let pool_size = n * (n - 1) * (n - 2) / 6;
    let full: Vec<BitString> = (0..1u32 << n).map(BitString).collect();

    for _ in 0..MAX_RESTARTS {
        let mut clauses = Vec::new();
        let mut seen = HashSet::new();
        let mut sat = full.clone();
        // Every triple unused: an exhausted pool with several survivors
        // (only possible for tiny n) counts as a failed attempt.
        while seen.len() < pool_size {
            let mut idx = index::sample(rng, n, 3).into_vec();
            idx.sort_unstable();
            let clause = Clause([idx[0], idx[1], idx[2]]);
            if !seen.insert(clause) {
                continue;
            }
            clauses.push(clause);
            sat.retain(|&x| clause_satisfied(&clause, x));
            match sat.len() {
                0 => break,
                1 => {
                    let solution = sat[0];
                    return Ok(Instance {
                        n,
                        clauses,
                        solution,
                    });
                }
                _ => {}
            }
        }
    }
    Err(Error::GenerationFailed {
        n,
        restarts: MAX_RESTARTS,
    })
}
