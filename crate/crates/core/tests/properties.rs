mod common;

use albhw::generator::{generate, random_base, GeneratorConfig, RandomBaseConfig, TypePolicy, PARAMETER_GRID};
use albhw::heuristics::{constructive, TaskRule, WorkerRule};
use albhw::milp::{build_msy, export_lp, extract_solution, import_lp, solve, SolveStatus};
use albhw::preprocess::{solve_conflict_knapsack, KnapsackMode};
use albhw::{check_feasibility, compute_closures, Instance, Solution, Station};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 1usize..=12, 1usize..=4).prop_map(|(seed, n, l)| common::random_instance(seed, n, l))
}

/// Any assignment of tasks to stations and workers, feasible or not.
fn random_layout(inst: &Instance, seed: u64) -> Solution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=inst.task_count());
    let mut groups = vec![Vec::new(); m];
    for i in 0..inst.task_count() {
        if rng.gen_bool(0.95) {
            groups[rng.gen_range(0..m)].push(i);
        }
    }
    Solution::new(groups.into_iter().map(|g| Station::new(rng.gen_range(0..inst.type_count()), g)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closures_match_reachability(inst in instance()) {
        let c = compute_closures(&inst);
        let reach = common::reachability(&inst);
        let mut direct = common::successors(&inst);
        direct.iter_mut().for_each(|s| s.sort_unstable());
        for i in 0..inst.task_count() {
            let all: Vec<usize> = (0..inst.task_count()).filter(|&j| reach[i][j]).collect();
            prop_assert_eq!(&c.all_succs[i], &all);
            prop_assert_eq!(&c.succs[i], &direct[i]);
            for j in 0..inst.task_count() {
                prop_assert_eq!(c.reaches(i, j), reach[i][j]);
                prop_assert_eq!(c.all_preds[j].contains(&i), reach[i][j]);
            }
        }
    }

    #[test]
    fn instance_text_round_trip(inst in instance()) {
        let back = Instance::parse(&inst.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), inst.to_text());
        prop_assert_eq!(back.costs(), inst.costs());
        prop_assert_eq!(back.task_types(), inst.task_types());
    }

    #[test]
    fn feasibility_check_agrees_with_oracle(inst in instance(), seed in any::<u64>()) {
        let sol = random_layout(&inst, seed);
        prop_assert_eq!(check_feasibility(&inst, &sol).is_empty(), common::is_feasible(&inst, &sol));
        let (back, cost) = Solution::parse(&sol.to_text(17)).unwrap();
        prop_assert_eq!(back, sol);
        prop_assert_eq!(cost, 17);
    }

    #[test]
    fn every_rule_pair_builds_a_feasible_line(inst in instance()) {
        for t in TaskRule::ALL {
            for w in WorkerRule::ALL {
                let sol = constructive(&inst, t, w);
                prop_assert!(common::is_feasible(&inst, &sol), "{}/{}", t, w);
            }
        }
    }

    #[test]
    fn generated_instances_respect_the_scaling(seed in any::<u64>(), tasks in 1usize..25, g in 0usize..5, levels in 1usize..5) {
        let base = random_base(&RandomBaseConfig { tasks, ..Default::default() }, seed);
        let (w1, w2) = PARAMETER_GRID[g];
        let cfg = GeneratorConfig { levels, w1, w2, seed, ..Default::default() };
        let inst = generate(&base, &cfg).unwrap();
        prop_assert_eq!(inst.task_count(), tasks);
        prop_assert_eq!(inst.cycle_time(), base.cycle_time);
        prop_assert_eq!(inst.cost(0), 100);
        prop_assert!(inst.costs().windows(2).all(|c| c[1] <= c[0]));
        for i in 0..tasks {
            prop_assert_eq!(inst.time(i, 0), Some(base.times[i]));
            for h in 1..=inst.task_type(i) {
                let (a, b) = (inst.time(i, h - 1).unwrap() as f64, inst.time(i, h).unwrap() as f64);
                prop_assert!((b - w1 * a).abs() <= 0.5 + 1e-6);
            }
        }
        prop_assert_eq!(generate(&base, &cfg).unwrap().to_text(), inst.to_text());
    }

    #[test]
    fn quota_policy_hits_its_counts(seed in any::<u64>(), tasks in 1usize..40) {
        let base = random_base(&RandomBaseConfig { tasks, ..Default::default() }, seed);
        let cfg = GeneratorConfig { policy: TypePolicy::Quota(vec![0.5, 0.3, 0.2]), seed, ..Default::default() };
        let inst = generate(&base, &cfg).unwrap();
        let mut counts = [0usize; 3];
        for &k in inst.task_types() {
            counts[k] += 1;
        }
        prop_assert_eq!(counts.iter().sum::<usize>(), tasks);
        for (c, q) in counts.iter().zip([0.5, 0.3, 0.2]) {
            prop_assert!((*c as f64 - q * tasks as f64).abs() < 1.0);
        }
    }

    #[test]
    fn knapsack_matches_enumeration(
        weights in prop::collection::vec(0i64..40, 0..12),
        capacity in 0i64..120,
        pairs in prop::collection::vec((0usize..12, 0usize..12), 0..20),
    ) {
        let pairs: Vec<(usize, usize)> = pairs.into_iter().filter(|&(a, b)| a != b && a.max(b) < weights.len()).collect();
        for (mode, by_weight) in [(KnapsackMode::MaxCardinality, false), (KnapsackMode::MaxWeight, true)] {
            let got = solve_conflict_knapsack(&weights, capacity, &pairs, mode);
            prop_assert_eq!(got.objective, common::knapsack_by_enumeration(&weights, capacity, &pairs, by_weight));
            let load: i64 = got.chosen.iter().map(|&i| weights[i]).sum();
            prop_assert!(load <= capacity);
            prop_assert!(pairs.iter().all(|&(a, b)| !(got.chosen.contains(&a) && got.chosen.contains(&b))));
        }
    }

    #[test]
    fn lp_text_round_trip(inst in instance()) {
        let model = build_msy(&inst, inst.task_count());
        let text = export_lp(&model).unwrap();
        let back = import_lp(&text).unwrap();
        prop_assert!(back.same_program(&model));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn msy_solves_small_lines_exactly(seed in any::<u64>()) {
        let inst = common::random_instance(seed, 6, 3);
        let model = build_msy(&inst, inst.task_count());
        let r = solve(&model, 60.0, None).unwrap();
        prop_assert_eq!(r.status, SolveStatus::Optimal);
        let sol = extract_solution(&inst, &model, &r).unwrap();
        prop_assert!(common::is_feasible(&inst, &sol));
        prop_assert_eq!(common::cost(&inst, &sol), common::brute_force_optimum(&inst));
    }
}
