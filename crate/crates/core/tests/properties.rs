//! Randomized property tests over the core algebra and analysis layers.

use std::collections::BTreeSet;

use proptest::collection::vec;
use proptest::prelude::*;

use mvln::dynamics::{attractor_set_of, attractors, max_invariant_subset};
use mvln::expr::{logical_form, structure_matrix};
use mvln::network::{build_augmented, node_structure_from_l, simulate, AugmentedSystem, CoupledAlgebraic};
use mvln::stp::{cheng_product, khatri_rao, logic_compose, LogicMatrix};
use mvln::sync::{masb, sync_state_set, SyncSpec};

fn logic_matrix(rows: usize, cols: usize) -> impl Strategy<Value = LogicMatrix> {
    vec(1..=rows, cols).prop_map(move |c| LogicMatrix::new(rows, c).unwrap())
}

fn system_3_1() -> impl Strategy<Value = AugmentedSystem> {
    logic_matrix(9, 9).prop_map(|l| AugmentedSystem { k: 3, n: 1, l })
}

proptest! {
    #[test]
    fn compose_matches_dense_product(
        a in logic_matrix(6, 4),
        b in logic_matrix(4, 5),
    ) {
        let lhs = logic_compose(&a, &b).unwrap().to_dense().unwrap();
        let rhs = cheng_product(&a.to_dense().unwrap(), &b.to_dense().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compose_is_associative(
        a in logic_matrix(5, 6),
        b in logic_matrix(6, 4),
        c in logic_matrix(4, 7),
    ) {
        let left = logic_compose(&logic_compose(&a, &b).unwrap(), &c).unwrap();
        let right = logic_compose(&a, &logic_compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn logical_form_round_trips(m in logic_matrix(4, 16)) {
        let e = logical_form(&m, 4, 2).unwrap();
        let back = structure_matrix(&e, &["x1", "x2"], 4).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn augmented_digit_projections_rebuild_l(
        f in logic_matrix(3, 9),
        g in logic_matrix(3, 9),
    ) {
        let sys = build_augmented(&CoupledAlgebraic { k: 3, n: 1, f: f.clone(), g: g.clone() }).unwrap();
        prop_assert_eq!(node_structure_from_l(&sys.l, 3, 1, 1).unwrap(), f);
        prop_assert_eq!(node_structure_from_l(&sys.l, 3, 1, 2).unwrap(), g);
        let rebuilt = khatri_rao(
            &node_structure_from_l(&sys.l, 3, 1, 1).unwrap(),
            &node_structure_from_l(&sys.l, 3, 1, 2).unwrap(),
        ).unwrap();
        prop_assert_eq!(rebuilt, sys.l);
    }

    #[test]
    fn trajectory_matches_matrix_powers(sys in system_3_1(), start in 1usize..=9) {
        let steps = 12;
        let traj = simulate(&sys, start, steps).unwrap();
        let mut pow = LogicMatrix::identity(9);
        for (t, state) in traj.iter().enumerate() {
            prop_assert_eq!(state.delta_index, pow.col(start), "t={}", t);
            pow = logic_compose(&sys.l, &pow).unwrap();
        }
    }

    #[test]
    fn transients_and_cycles_consistent(sys in system_3_1()) {
        let report = attractors(&sys);
        for idx in 1..=9usize {
            let t = report.per_state_transient[idx];
            prop_assert!(t <= report.tau);
            // after t steps the walk is on its cycle, not before
            let mut u = idx;
            for _ in 0..t {
                prop_assert!(!report.is_on_cycle(u) || t == 0);
                u = sys.step(u);
            }
            prop_assert!(report.is_on_cycle(u));
            prop_assert_eq!(report.cycle_of[idx], report.cycle_of[u]);
        }
    }

    #[test]
    fn masb_classification(sys in system_3_1(), gamma in 0usize..=2) {
        let report = attractors(&sys);
        let lambda = sync_state_set(SyncSpec::new(3, 1, gamma).unwrap()).unwrap();
        let basin = masb(&sys, &report, &lambda);
        let inv = max_invariant_subset(&sys, &lambda.members).unwrap();
        // empty basin exactly when Λ holds no invariant subset
        prop_assert_eq!(basin.members.is_empty(), inv.is_empty());
        // nonempty basin sends its attractors into the invariant subset
        if !basin.members.is_empty() {
            let omega = attractor_set_of(&sys, &report, &basin.members).unwrap();
            prop_assert!(omega.is_subset(&inv));
        }
        // full basin exactly when every attractor state is in Λ
        let attractor_states: BTreeSet<usize> = report.cycles.iter().flatten().copied().collect();
        prop_assert_eq!(
            basin.members.len() == 9,
            attractor_states.is_subset(&lambda.members)
        );
    }
}
