use aqc::eigensolver::{dense_lowest_two, lowest_two_iterative, SolverOptions};
use aqc::entanglement::{
    bipartition_entropy, reduced_density, schmidt_coefficients, schmidt_rank, Bipartition,
    SCHMIDT_CUTOFF,
};
use aqc::grover::{grover_entropy, grover_ground_state};
use aqc::hamiltonian::{apply_hamiltonian, dense_matrix, LinearOperator, ProblemHamiltonian};
use aqc::instances::{
    clause_satisfied, generate_instance, satisfying_set, violation_count, BitString, Clause,
    Instance,
};
use aqc::sweep::{aggregate, spearman, InstanceResult, SweepPoint};
use aqc::StateVector;
use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(n: usize, seed: u64) -> Instance {
    generate_instance(n, seed).expect("generation succeeds for n >= 5")
}

fn random_state(n: usize, seed: u64) -> StateVector {
    StateVector::random_unit(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn block_from_mask(n: usize, mask: u32) -> Vec<usize> {
    (0..n).filter(|&q| mask >> q & 1 == 1).collect()
}

/// (n, proper non-empty block mask)
fn bipartition() -> impl Strategy<Value = (usize, u32)> {
    (2usize..=9).prop_flat_map(|n| (Just(n), 1u32..(1 << n) - 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operator_is_symmetric_and_linear(
        n in 5usize..=10,
        seed in any::<u64>(),
        s in 0.0f64..=1.0,
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let ham = ProblemHamiltonian::new(&instance(n, seed)).unwrap();
        let op = ham.at(s).unwrap();
        let u = random_state(n, seed ^ 1);
        let v = random_state(n, seed ^ 2);
        let hu = apply_hamiltonian(&op, &u).unwrap();
        let hv = apply_hamiltonian(&op, &v).unwrap();
        prop_assert!((u.dot(&hv) - hu.dot(&v)).abs() <= 1e-12 * hu.norm().max(1.0));

        let combo: Vec<f64> = u.as_slice().iter().zip(v.as_slice()).map(|(x, y)| a * x + b * y).collect();
        let combo = StateVector::from_amplitudes(combo).unwrap();
        let lhs = apply_hamiltonian(&op, &combo).unwrap();
        for ((l, x), y) in lhs.as_slice().iter().zip(hu.as_slice()).zip(hv.as_slice()) {
            prop_assert!((l - (a * x + b * y)).abs() <= 1e-12 * (hu.norm() + hv.norm()).max(1.0));
        }
    }

    #[test]
    fn off_diagonal_entries_are_non_positive(n in 5usize..=8, seed in any::<u64>(), s in 0.0f64..1.0) {
        let ham = ProblemHamiltonian::new(&instance(n, seed)).unwrap();
        let m = dense_matrix(&ham.at(s).unwrap()).unwrap();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i != j {
                    prop_assert!(m[(i, j)] <= 0.0);
                    prop_assert_eq!(m[(i, j)], m[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn problem_hamiltonian_is_diagonal_in_basis(n in 5usize..=10, seed in any::<u64>(), x in any::<u32>()) {
        let inst = instance(n, seed);
        let ham = ProblemHamiltonian::new(&inst).unwrap();
        let op = ham.at(1.0).unwrap();
        let x = (x as usize) % (1 << n);
        let hx = apply_hamiltonian(&op, &StateVector::basis(n, x)).unwrap();
        let expected = violation_count(&inst, BitString(x as u32)) as f64;
        for (y, &amp) in hx.as_slice().iter().enumerate() {
            prop_assert_eq!(amp, if y == x { expected } else { 0.0 });
        }
        prop_assert_eq!(expected == 0.0, x == inst.solution().index());
    }

    #[test]
    fn generation_is_deterministic_and_valid(n in 5usize..=12, seed in any::<u64>()) {
        let first = instance(n, seed);
        prop_assert_eq!(&first, &instance(n, seed));
        prop_assert_eq!(satisfying_set(first.clauses(), n).unwrap(), vec![first.solution()]);
        prop_assert!(first.clauses().iter().all(|c| clause_satisfied(c, first.solution())));
        prop_assert!((0..n).all(|q| first.degree(q) > 0));
        let json = serde_json::to_string(&first).unwrap();
        let back: Instance = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &first);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn clause_is_canonical_under_permutation(a in 0usize..30, b in 0usize..30, c in 0usize..30) {
        prop_assume!(a != b && b != c && a != c);
        let reference = Clause::new(a, b, c).unwrap();
        for [x, y, z] in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            prop_assert_eq!(Clause::new(x, y, z).unwrap(), reference);
        }
        let idx = reference.indices();
        prop_assert!(idx[0] < idx[1] && idx[1] < idx[2]);
    }

    #[test]
    fn entropy_is_symmetric_and_bounded((n, mask) in bipartition(), seed in any::<u64>()) {
        let state = random_state(n, seed);
        let part = Bipartition::new(n, block_from_mask(n, mask)).unwrap();
        let a = bipartition_entropy(&state, &part).unwrap();
        let b = bipartition_entropy(&state, &part.swapped()).unwrap();
        prop_assert!((a.entropy_bits - b.entropy_bits).abs() <= 1e-10);
        prop_assert_eq!(a.schmidt_rank, b.schmidt_rank);
        let smaller = part.block().len().min(n - part.block().len()) as f64;
        prop_assert!(a.entropy_bits >= 0.0);
        prop_assert!(a.entropy_bits <= a.log2_chi + 1e-10);
        prop_assert!(a.log2_chi <= smaller + 1e-12);
    }

    #[test]
    fn entropy_invariant_under_bit_flip((n, mask) in bipartition(), seed in any::<u64>(), q in 0usize..9) {
        let state = random_state(n, seed);
        let part = Bipartition::new(n, block_from_mask(n, mask)).unwrap();
        let flipped = state.flip_qubit(q % n);
        let a = bipartition_entropy(&state, &part).unwrap();
        let b = bipartition_entropy(&flipped, &part).unwrap();
        prop_assert!((a.entropy_bits - b.entropy_bits).abs() <= 1e-10);
        prop_assert_eq!(a.schmidt_rank, b.schmidt_rank);
    }

    #[test]
    fn density_spectrum_matches_schmidt((n, mask) in bipartition(), seed in any::<u64>()) {
        let state = random_state(n, seed);
        let part = Bipartition::new(n, block_from_mask(n, mask)).unwrap();
        let rho = reduced_density(&state, &part).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-10);
        let mut eig: Vec<f64> = SymmetricEigen::new(rho).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        let sigma = schmidt_coefficients(&state, &part).unwrap();
        for (i, lambda) in eig.iter().enumerate() {
            let sq = sigma.get(i).map_or(0.0, |s| s * s);
            prop_assert!((lambda - sq).abs() <= 1e-10);
        }
    }

    #[test]
    fn grover_ground_has_rank_at_most_two(
        (n, mask) in bipartition(),
        s in 0.0f64..=1.0,
        x0 in any::<u32>(),
    ) {
        let x0 = (x0 as usize) % (1 << n);
        let state = grover_ground_state(s, n, x0).unwrap();
        let part = Bipartition::new(n, block_from_mask(n, mask)).unwrap();
        let rec = bipartition_entropy(&state, &part).unwrap();
        prop_assert!(rec.schmidt_rank <= 2);
        prop_assert!(rec.entropy_bits <= 1.0 + 1e-12);
        let k = part.block().len();
        let closed = grover_entropy(s, n, k).unwrap();
        prop_assert!((closed - rec.entropy_bits).abs() <= 1e-10);
    }

    #[test]
    fn aggregation_ignores_input_order(
        values in prop::collection::vec((0.0f64..3.0, 0.01f64..1.0, 0usize..11, 0usize..11), 2..12),
        shuffle_seed in any::<u64>(),
    ) {
        let results: Vec<InstanceResult> = values
            .iter()
            .enumerate()
            .map(|(id, &(emax, gmin, ipeak, igap))| {
                let points = (0..=10)
                    .map(|i| {
                        let s = i as f64 / 10.0;
                        let peak = if i == ipeak { emax } else { emax * 0.5 };
                        let gap = if i == igap { gmin } else { gmin + 1.0 };
                        SweepPoint { s, e0: 0.0, e1: gap, gap, entropy_bits: peak, schmidt_rank: 2 }
                    })
                    .collect();
                InstanceResult::from_points(id as u64, 6, points).unwrap()
            })
            .collect();
        let mut shuffled = results.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        prop_assert_eq!(aggregate(&results).unwrap(), aggregate(&shuffled).unwrap());
    }

    #[test]
    fn spearman_is_a_correlation(xs in prop::collection::vec(-5.0f64..5.0, 3..20)) {
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        if let Some(rho) = spearman(&xs, &ys) {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&rho));
        }
        let rho = spearman(&xs, &xs);
        if let Some(rho) = rho {
            prop_assert!((rho - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ground_state_is_positive_and_non_degenerate(n in 5usize..=9, seed in any::<u64>(), s in 0.0f64..0.95) {
        let ham = ProblemHamiltonian::new(&instance(n, seed)).unwrap();
        let res = dense_lowest_two(&ham.at(s).unwrap()).unwrap();
        prop_assert!(res.gap() > 1e-8);
        let min = res.ground.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min > 0.0, "minimum amplitude {min}");
    }

    #[test]
    fn iterative_ground_matches_dense(n in 5usize..=9, seed in any::<u64>(), s in 0.0f64..=1.0) {
        let ham = ProblemHamiltonian::new(&instance(n, seed)).unwrap();
        let op = ham.at(s).unwrap();
        let dense = dense_lowest_two(&op).unwrap();
        let it = lowest_two_iterative(&op, &SolverOptions::default(), None, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!((dense.e0 - it.e0).abs() <= 1e-8);
        prop_assert!((dense.e1 - it.e1).abs() <= 1e-8);
        prop_assert!(it.e0 <= it.e1);
        prop_assert!((it.ground.norm() - 1.0).abs() <= 1e-10);
        prop_assert_eq!(op.dim(), 1 << n);
    }
}

#[test]
fn perron_frobenius_at_ten_qubits() {
    let ham = ProblemHamiltonian::new(&instance(10, 3)).unwrap();
    for s in [0.0, 0.3, 0.6, 0.8] {
        let res = dense_lowest_two(&ham.at(s).unwrap()).unwrap();
        assert!(res.gap() > 1e-8, "s={s}: gap {}", res.gap());
        let min = res
            .ground
            .as_slice()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert!(min > 0.0, "s={s}: minimum amplitude {min}");
    }
}

#[test]
fn ground_state_entropy_symmetric() {
    let ham = ProblemHamiltonian::new(&instance(9, 11)).unwrap();
    let ground = dense_lowest_two(&ham.at(0.6).unwrap()).unwrap().ground;
    for mask in [0b1u32, 0b11, 0b101010, 0b1111, 0b10000001] {
        let part = Bipartition::new(9, block_from_mask(9, mask)).unwrap();
        let a = bipartition_entropy(&ground, &part).unwrap();
        let b = bipartition_entropy(&ground, &part.swapped()).unwrap();
        assert!((a.entropy_bits - b.entropy_bits).abs() <= 1e-10);
        assert_eq!(
            schmidt_rank(&ground, &part, SCHMIDT_CUTOFF).unwrap(),
            a.schmidt_rank
        );
    }
}
