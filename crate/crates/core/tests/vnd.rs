mod common;

use albhw::milp::{solution_values, solve, SolveResult, SolveStatus, Symbol};
use albhw::vnd::{
    admissible_stations, apply_milp2_result, build_milp2, reassignment_step, relocation_step, vnd, vnd_with,
    VndConfig, VndError,
};
use albhw::{evaluate, Instance, Solution, Station};

/// Four tasks of time 5, one worker type at cost 100, cycle time 10.
fn four_halves() -> Instance {
    Instance::new(10, vec![100], vec![0; 4], vec![vec![Some(5)]; 4], vec![]).unwrap()
}

fn line(groups: &[&[usize]]) -> Solution {
    Solution::new(groups.iter().map(|g| Station::new(0, g.iter().map(|t| t - 1).collect())).collect())
}

#[test]
fn admissible_stations_are_adjacent() {
    assert_eq!(admissible_stations(0, 1), 0..=0);
    assert_eq!(admissible_stations(0, 3), 0..=1);
    assert_eq!(admissible_stations(1, 3), 0..=2);
    assert_eq!(admissible_stations(2, 3), 1..=2);
}

#[test]
fn relocation_closes_a_station() {
    let inst = four_halves();
    let base = line(&[&[1], &[2], &[3, 4]]);
    assert_eq!(evaluate(&inst, &base).unwrap(), 300);
    let better = relocation_step(&inst, &base, 10.0).unwrap();
    assert!(common::is_feasible(&inst, &better));
    assert_eq!(evaluate(&inst, &better).unwrap(), 200);
}

#[test]
fn reassignment_consolidates() {
    let inst = four_halves();
    let base = line(&[&[1, 2], &[3], &[4]]);
    let model = build_milp2(&inst, &base);
    let r = solve(&model, 10.0, solution_values(&model, &base).as_deref()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.objective, Some(100.0));
    let better = apply_milp2_result(&inst, &base, &model, &r).unwrap();
    assert_eq!(better.station_count(), 2);
    assert_eq!(evaluate(&inst, &better).unwrap(), 200);
    assert_eq!(reassignment_step(&inst, &base, 10.0).map(|s| evaluate(&inst, &s).unwrap()), Some(200));
}

#[test]
fn descent_report_counts() {
    let inst = four_halves();
    let base = line(&[&[1, 2], &[3], &[4]]);
    let report = vnd_with(&inst, &base, &VndConfig { k_max: 2, time_limit: 10.0 }, &albhw::milp::EmbeddedBackend);
    assert_eq!(report.initial_cost, 300);
    assert_eq!(report.cost, 200);
    assert_eq!(report.improvements, 1);
    // relocation improves, then relocation and reassignment both stall
    assert_eq!(report.calls, 3);
    assert!(common::is_feasible(&inst, &report.solution));

    // 2 moves back and 3 forward in one relocation
    let only_first =
        vnd_with(&inst, &line(&[&[1], &[2, 3], &[4]]), &VndConfig { k_max: 1, time_limit: 10.0 }, &albhw::milp::EmbeddedBackend);
    assert_eq!((only_first.cost, only_first.calls, only_first.improvements), (200, 2, 1));
}

#[test]
fn emptied_station_with_tasks_is_rejected() {
    let inst = four_halves();
    let base = line(&[&[1, 2], &[3], &[4]]);
    let model = build_milp2(&inst, &base);
    let mut values = solution_values(&model, &base).unwrap();
    let beta = model.var_by_symbol(Symbol::Emptied { station: 1 }).unwrap();
    values[beta.0] = 1.0;
    let result =
        SolveResult { status: SolveStatus::Feasible, values: Some(values), objective: Some(100.0), bound: 100.0, nodes: 0, seconds: 0.0 };
    assert_eq!(apply_milp2_result(&inst, &base, &model, &result).unwrap_err(), VndError::EmptiedStationHasTasks(2));
}

#[test]
fn golden_descent_from_every_rule_pair() {
    use albhw::heuristics::{constructive, TaskRule, WorkerRule};
    let inst = common::golden();
    for t in [TaskRule::T1, TaskRule::T5] {
        for w in WorkerRule::ALL {
            let ch = constructive(&inst, t, w);
            let before = evaluate(&inst, &ch).unwrap();
            let after = vnd(&inst, &ch, 2, 5.0);
            assert!(common::is_feasible(&inst, &after));
            let after = evaluate(&inst, &after).unwrap();
            assert!((319..=before).contains(&after), "{t}/{w}: {before} -> {after}");
        }
    }
}
