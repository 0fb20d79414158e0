//! End-to-end acceptance suite. Each test covers one numbered criterion and
//! prints a single PASS/FAIL line for it.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use mvln::dynamics::{attractor_set_of, attractors, max_invariant_subset};
use mvln::expr::{operator_matrix, Operator};
use mvln::network::{
    assemble, build_augmented, decode_state, encode_state, simulate, AugmentedSystem,
};
use mvln::parse::parse_network;
use mvln::pinning::{
    attractors_to_perturb, synthesize, verify_plan, Redirect, TargetPolicy,
};
use mvln::stp::{
    cheng_product, kronecker, logic_compose, power_reducing_matrix, swap_matrix, DenseMatrix,
    LogicMatrix,
};
use mvln::sync::{
    check_global_sync, check_global_sync_index_form, check_local_sync,
    check_local_sync_index_form, global_sast, masb, sast, sync_cardinality, sync_state_set, Basin,
    SyncSpec,
};

fn criterion<F: FnOnce() + std::panic::UnwindSafe>(number: usize, label: &str, body: F) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {number} ({label}): PASS"),
        Err(e) => {
            println!("criterion {number} ({label}): FAIL");
            resume_unwind(e);
        }
    }
}

fn fixture(name: &str) -> AugmentedSystem {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    let network = parse_network(&text).expect("fixture parses");
    build_augmented(&assemble(&network).expect("assembles")).expect("augments")
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self, bound: usize) -> usize {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 33) as usize % bound
    }
}

#[test]
fn criterion_1_bidirectional_five_valued() {
    criterion(1, "example 1", || {
        let sys = fixture("example1.mvln");
        let spec = SyncSpec::new(5, 3, 1).unwrap();
        let lambda = sync_state_set(spec).unwrap();
        assert_eq!(lambda.members.len(), 2197);
        let report = attractors(&sys);
        let cycles: BTreeSet<Vec<usize>> = report.cycles.iter().cloned().collect();
        assert_eq!(cycles, BTreeSet::from([vec![2], vec![3908]]));
        assert_eq!(report.tau, 9);
        assert!(check_global_sync(&report, &lambda));
        assert_eq!(global_sast(&sys, &report, &lambda).unwrap().gamma_time, 9);
        let phi = Basin::of([9469]);
        assert_eq!(sast(&sys, &report, &phi, &lambda).unwrap().gamma_time, 6);
    });
}

#[test]
fn criterion_2_unidirectional_five_valued_pinning() {
    criterion(2, "example 2", || {
        let sys = fixture("example2.mvln");
        let spec = SyncSpec::new(5, 3, 1).unwrap();
        let lambda = sync_state_set(spec).unwrap();
        let report = attractors(&sys);
        let fixed: BTreeSet<usize> = report.cycles.iter().flatten().copied().collect();
        assert_eq!(
            fixed,
            BTreeSet::from([7813, 11688, 11719, 15563, 15594, 15625])
        );
        assert!(report.cycles.iter().all(|c| c.len() == 1));
        assert_eq!(report.tau, 8);
        let basin = masb(&sys, &report, &lambda);
        assert_eq!(basin.members.len(), 15376);
        assert_eq!(sast(&sys, &report, &basin, &lambda).unwrap().gamma_time, 8);
        let targets = attractors_to_perturb(&report, &lambda, sys.state_count());
        assert_eq!(targets.omega0, vec![vec![15563]]);

        // uncontrolled trajectory enters the bad attractor in 3 steps
        let traj = simulate(&sys, 8003, 3).unwrap();
        assert_eq!(traj.last().unwrap().delta_index, 15563);

        // redirect fixture pinning nodes 2, 3, 4
        let policy =
            TargetPolicy::Explicit(vec![Redirect { source: 15563, target: 13888 }]);
        let plan = synthesize(&sys, &lambda, &policy).unwrap();
        assert_eq!(plan.pinned, BTreeSet::from([2, 3, 4]));
        assert_eq!(plan.p1(), BTreeSet::from([2, 3]));
        assert_eq!(plan.p2(), BTreeSet::from([1]));

        // the solved feedback satisfies the coupling equation column-wise
        for node in plan.nodes.values() {
            let fb = node.feedback.as_ref().unwrap();
            for l in 1..=node.h.num_cols() {
                let idx = (fb.k_matrix.col(l) - 1) * 5 + node.h.col(l);
                assert_eq!(fb.m_matrix.col(idx), node.h_bar.col(l));
            }
        }
        let verify = verify_plan(&sys, &plan, &lambda).unwrap();
        assert!(verify.global_sync);
        assert_eq!(verify.gamma_time, Some(9));

        // post-pinning time from the redirected attractor
        let bar = AugmentedSystem { k: 5, n: 3, l: plan.l_bar.clone() };
        let bar_report = attractors(&bar);
        let phi2 = Basin::of([15563]);
        assert_eq!(sast(&bar, &bar_report, &phi2, &lambda).unwrap().gamma_time, 6);
    });
}

#[test]
fn criterion_3_nfsr_cascade_complete_sync() {
    criterion(3, "example 3", || {
        let sys = fixture("example3.mvln");
        let spec = SyncSpec::new(4, 3, 0).unwrap();
        let lambda = sync_state_set(spec).unwrap();
        let report = attractors(&sys);
        let cycles: BTreeSet<Vec<usize>> = report.cycles.iter().cloned().collect();
        assert_eq!(cycles, BTreeSet::from([vec![1387], vec![2752], vec![4096]]));
        assert_eq!(report.tau, 11);
        assert!(!check_global_sync(&report, &lambda));
        let basin = masb(&sys, &report, &lambda);
        assert_eq!(basin.members.len(), 2576);
        assert_eq!(sast(&sys, &report, &basin, &lambda).unwrap().gamma_time, 10);
    });
}

#[test]
fn criterion_4_boolean_model_complete_sync() {
    criterion(4, "example 4", || {
        let sys = fixture("example4.mvln");
        // frozen matrix prefix and suffix
        for (col, val) in [(1, 37), (2, 37), (3, 38), (4, 38), (61, 63), (62, 27), (63, 64), (64, 28)]
        {
            assert_eq!(sys.l.col(col), val, "column {col}");
        }
        let spec = SyncSpec::new(2, 3, 0).unwrap();
        let lambda = sync_state_set(spec).unwrap();
        assert_eq!(
            lambda.members,
            BTreeSet::from([1, 10, 19, 28, 37, 46, 55, 64])
        );
        let report = attractors(&sys);
        assert_eq!(report.tau, 3);
        assert!(check_global_sync(&report, &lambda));
        assert_eq!(global_sast(&sys, &report, &lambda).unwrap().gamma_time, 3);
    });
}

#[test]
fn criterion_5_cardinality_formula() {
    criterion(5, "cardinality formula", || {
        for k in 3..=6 {
            for n in 1..=3 {
                let spec = SyncSpec::new(k, n, 1).unwrap();
                let enumerated = sync_state_set(spec).unwrap().members.len();
                assert_eq!(sync_cardinality(k, n), enumerated, "k={k} n={n}");
                assert_eq!(sync_cardinality(k, n), (3 * k - 2).pow(n as u32));
            }
        }
    });
}

fn dense_augmented_oracle(f: &LogicMatrix, g: &LogicMatrix, k: usize, n: usize) -> LogicMatrix {
    // L = F (I ⊗ G) M_r over the composite space
    let total = k.pow(2 * n as u32);
    let eye = DenseMatrix::identity(total);
    let ig = kronecker(&eye, &g.to_dense().unwrap()).unwrap();
    let mr = power_reducing_matrix(total).to_dense().unwrap();
    let dense = cheng_product(&cheng_product(&f.to_dense().unwrap(), &ig).unwrap(), &mr).unwrap();
    let mut cols = Vec::with_capacity(total);
    for j in 0..total {
        let mut hit = None;
        for i in 0..total {
            if dense.get(i, j) == 1 {
                assert!(hit.is_none(), "two entries in a logic column");
                hit = Some(i + 1);
            } else {
                assert_eq!(dense.get(i, j), 0);
            }
        }
        cols.push(hit.expect("logic column"));
    }
    LogicMatrix::new(total, cols).unwrap()
}

fn random_node_pair(rng: &mut Lcg, k: usize, n: usize) -> (LogicMatrix, LogicMatrix) {
    let rows = k.pow(n as u32);
    let cols = k.pow(2 * n as u32);
    let f = LogicMatrix::new(rows, (0..cols).map(|_| rng.next(rows) + 1).collect()).unwrap();
    let g = LogicMatrix::new(rows, (0..cols).map(|_| rng.next(rows) + 1).collect()).unwrap();
    (f, g)
}

#[test]
fn criterion_6_oracle_equivalences() {
    criterion(6, "oracle equivalences", || {
        // (a) index shortcut vs dense formula, exhaustive k=2 n=1
        for code in 0..256usize {
            let f = LogicMatrix::new(2, vec![code % 2 + 1, code / 2 % 2 + 1, code / 4 % 2 + 1, code / 8 % 2 + 1]).unwrap();
            let g = LogicMatrix::new(2, vec![code / 16 % 2 + 1, code / 32 % 2 + 1, code / 64 % 2 + 1, code / 128 % 2 + 1]).unwrap();
            let alg = mvln::network::CoupledAlgebraic { k: 2, n: 1, f: f.clone(), g: g.clone() };
            let sys = build_augmented(&alg).unwrap();
            assert_eq!(sys.l, dense_augmented_oracle(&f, &g, 2, 1), "code={code}");
        }
        // (a) continued: 100 random k=3 n=1 systems, plus (b) on each
        let mut rng = Lcg(0xfeed);
        for trial in 0..100 {
            let (f, g) = random_node_pair(&mut rng, 3, 1);
            let alg = mvln::network::CoupledAlgebraic { k: 3, n: 1, f: f.clone(), g: g.clone() };
            let sys = build_augmented(&alg).unwrap();
            assert_eq!(sys.l, dense_augmented_oracle(&f, &g, 3, 1), "trial={trial}");

            // (b) set-inclusion criterion vs index-vector criterion
            let report = attractors(&sys);
            for gamma in 0..=1 {
                let lambda = sync_state_set(SyncSpec::new(3, 1, gamma).unwrap()).unwrap();
                assert_eq!(
                    check_global_sync(&report, &lambda),
                    check_global_sync_index_form(&sys, &report, &lambda)
                );
                let phi = Basin::of([1 + rng.next(9), 1 + rng.next(9)]);
                assert_eq!(
                    check_local_sync(&sys, &report, &phi, &lambda).unwrap(),
                    check_local_sync_index_form(&sys, &report, &phi, &lambda).unwrap()
                );
            }
        }
        // (c) MASB vs brute-force tail membership, k ≤ 3, n = 1
        for k in 2..=3usize {
            let total = k.pow(2);
            for trial in 0..300 {
                let cols: Vec<usize> = (0..total).map(|_| rng.next(total) + 1).collect();
                let sys = AugmentedSystem { k, n: 1, l: LogicMatrix::new(total, cols).unwrap() };
                let report = attractors(&sys);
                let lambda = sync_state_set(SyncSpec::new(k, 1, 0).unwrap()).unwrap();
                let basin = masb(&sys, &report, &lambda);
                let brute: BTreeSet<usize> = (1..=total)
                    .filter(|&s| {
                        let mut u = s;
                        for _ in 0..report.tau {
                            u = sys.step(u);
                        }
                        (0..report.lambda).all(|_| {
                            let ok = lambda.members.contains(&u);
                            u = sys.step(u);
                            ok
                        })
                    })
                    .collect();
                assert_eq!(basin.members, brute, "k={k} trial={trial}");
            }
        }
        // (d) invariance and maximality of the invariant subset
        for trial in 0..100 {
            let cols: Vec<usize> = (0..9).map(|_| rng.next(9) + 1).collect();
            let sys = AugmentedSystem { k: 3, n: 1, l: LogicMatrix::new(9, cols).unwrap() };
            let s: BTreeSet<usize> = (1..=9).filter(|_| rng.next(2) == 0).collect();
            let inv = max_invariant_subset(&sys, &s).unwrap();
            assert!(inv.iter().all(|&i| inv.contains(&sys.step(i))), "trial={trial}");
            for &extra in s.difference(&inv) {
                let mut grown = inv.clone();
                grown.insert(extra);
                assert!(
                    !grown.iter().all(|&i| grown.contains(&sys.step(i))),
                    "adding {extra} keeps invariance (trial {trial})"
                );
            }
        }
        // (e) Lemma 3 on the four example systems
        for name in ["example1.mvln", "example2.mvln", "example3.mvln", "example4.mvln"] {
            let sys = fixture(name);
            let report = attractors(&sys);
            let mut pow = LogicMatrix::identity(sys.state_count());
            let mut powers = vec![pow.clone()];
            for _ in 0..(report.tau + report.lambda) {
                pow = logic_compose(&sys.l, &pow).unwrap();
                powers.push(pow.clone());
            }
            assert_eq!(powers[report.tau], powers[report.tau + report.lambda], "{name}");
            for t in 0..report.tau {
                assert_ne!(powers[t], powers[t + report.lambda], "{name} t={t}");
            }
        }
    });
}

#[test]
fn criterion_7_pinning_soundness_sweep() {
    criterion(7, "pinning soundness sweep", || {
        let mut rng = Lcg(0xbead);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 1).unwrap()).unwrap();
        let mut failing = 0;
        let mut attempts = 0;
        while failing < 50 {
            attempts += 1;
            assert!(attempts < 10_000, "could not find enough failing systems");
            let cols: Vec<usize> = (0..9).map(|_| rng.next(9) + 1).collect();
            let sys = AugmentedSystem { k: 3, n: 1, l: LogicMatrix::new(9, cols).unwrap() };
            let report = attractors(&sys);
            if check_global_sync(&report, &lambda) {
                continue;
            }
            failing += 1;
            let plan = synthesize(&sys, &lambda, &TargetPolicy::LowestIndex).unwrap();
            let verify = verify_plan(&sys, &plan, &lambda).unwrap();
            assert!(verify.global_sync, "system {:?}", sys.l.col_indices());
            for node in plan.nodes.values() {
                let fb = node.feedback.as_ref().unwrap();
                for l in 1..=9 {
                    let idx = (fb.k_matrix.col(l) - 1) * 3 + node.h.col(l);
                    assert_eq!(fb.m_matrix.col(idx), node.h_bar.col(l));
                }
            }
        }
    });
}

#[test]
fn criterion_8_stp_kernel_laws() {
    criterion(8, "stp kernel laws", || {
        // swap matrix: W x ⋉ y = y ⋉ x, exhaustive m, n ≤ 5
        for m in 1..=5usize {
            for n in 1..=5usize {
                let w = swap_matrix(m, n);
                for i in 1..=m {
                    for j in 1..=n {
                        let xy = (i - 1) * n + j;
                        let yx = (j - 1) * m + i;
                        assert_eq!(w.col(xy), yx);
                    }
                }
            }
        }
        // power-reducing: M_r ⋉ x = x ⋉ x
        for k in 2..=5usize {
            let mr = power_reducing_matrix(k);
            for i in 1..=k {
                assert_eq!(mr.col(i), (i - 1) * k + i);
            }
        }
        // pseudo-commutativity: x ⋉ A = (I_t ⊗ A) ⋉ x, exhaustive k ≤ 5
        for k in 2..=5usize {
            let a = operator_matrix(Operator::Negation, k, None).unwrap().to_dense().unwrap();
            for t in 1..=5usize {
                for i in 1..=t {
                    let mut x = DenseMatrix::zeros(t, 1).unwrap();
                    x.set(i - 1, 0, 1);
                    let lhs = cheng_product(&x, &a).unwrap();
                    let it_a = kronecker(&DenseMatrix::identity(t), &a).unwrap();
                    let rhs = cheng_product(&it_a, &x).unwrap();
                    assert_eq!(lhs, rhs, "k={k} t={t} i={i}");
                }
            }
        }
        // logic_compose ≡ dense Cheng product on random logic matrices
        let mut rng = Lcg(0xabba);
        for _ in 0..200 {
            let m = rng.next(5) + 2;
            let n = rng.next(5) + 2;
            let p = rng.next(5) + 2;
            let a = LogicMatrix::new(m, (0..n).map(|_| rng.next(m) + 1).collect()).unwrap();
            let b = LogicMatrix::new(n, (0..p).map(|_| rng.next(n) + 1).collect()).unwrap();
            let lhs = logic_compose(&a, &b).unwrap().to_dense().unwrap();
            let rhs = cheng_product(&a.to_dense().unwrap(), &b.to_dense().unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    });
}

#[test]
fn full_pipeline_runs_quickly() {
    // every end-to-end pipeline must finish well under the 5 s budget
    let start = std::time::Instant::now();
    for (name, k, n, gamma) in [
        ("example1.mvln", 5, 3, 1),
        ("example2.mvln", 5, 3, 1),
        ("example3.mvln", 4, 3, 0),
        ("example4.mvln", 2, 3, 0),
    ] {
        let sys = fixture(name);
        let spec = SyncSpec::new(k, n, gamma).unwrap();
        let analysis = mvln::sync::analyze(&sys, spec).unwrap();
        if !analysis.global_sync {
            let lambda = sync_state_set(spec).unwrap();
            let plan = synthesize(&sys, &lambda, &TargetPolicy::LowestIndex).unwrap();
            let _ = verify_plan(&sys, &plan, &lambda).unwrap();
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0, "pipelines too slow: {:?}", start.elapsed());
}

#[test]
fn encoding_spot_checks() {
    // frozen state encodings
    let st = decode_state(9469, 5, 3).unwrap();
    assert_eq!(st.scalars(5), vec!["1/4", "1", "1", "1/4", "1/4", "1/4"]);
    let st = decode_state(8003, 5, 3).unwrap();
    assert_eq!(st.scalars(5), vec!["1/2", "1/2", "0", "1", "1", "1/2"]);
    let levels = [4, 1, 1, 4, 4, 4];
    assert_eq!(encode_state(&levels, 5).unwrap().delta_index, 9469);
    // attractor of the frozen probe state
    let sys = fixture("example1.mvln");
    let report = attractors(&sys);
    let omega = attractor_set_of(&sys, &report, &BTreeSet::from([9469])).unwrap();
    assert!(omega == BTreeSet::from([2]) || omega == BTreeSet::from([3908]));
}
