mod common;

use albhw::milp::{
    build_msy, export_lp, import_lp, parse_solution_file, solve, write_solution_file, Backend, ExternalBackend,
    MilpModel, ObjectiveSense, Sense, SolveError, SolveStatus, VarKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binary_pair() -> MilpModel {
    let mut m = MilpModel::new("pair", ObjectiveSense::Minimize);
    let x = m.add_binary("x").unwrap();
    let y = m.add_binary("y").unwrap();
    m.add_constraint("sum", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0).unwrap();
    m.set_objective(ObjectiveSense::Minimize, vec![(x, 1.0), (y, 1.0)]);
    m
}

#[test]
fn infeasible_binary_system() {
    let r = solve(&binary_pair(), 10.0, None).unwrap();
    assert_eq!(r.status, SolveStatus::Infeasible);
    assert!(r.values.is_none());
    assert!(r.objective.is_none());
}

#[test]
fn invalid_time_limit_is_rejected() {
    for t in [0.0, -1.0, f64::NAN] {
        assert!(matches!(solve(&binary_pair(), t, None), Err(SolveError::TimeLimit)));
    }
}

struct Ip {
    model: MilpModel,
    upper: Vec<i64>,
}

fn random_ip(rng: &mut ChaCha8Rng) -> Ip {
    let sense = if rng.gen_bool(0.5) { ObjectiveSense::Minimize } else { ObjectiveSense::Maximize };
    let mut m = MilpModel::new("ip", sense);
    let n = rng.gen_range(2..=4);
    let mut vars = Vec::new();
    let mut upper = Vec::new();
    for j in 0..n {
        let ub = rng.gen_range(1..=3);
        let kind = if ub == 1 { VarKind::Binary } else { VarKind::Integer };
        vars.push(m.add_var(format!("v{j}"), 0.0, ub as f64, kind).unwrap());
        upper.push(ub);
    }
    for r in 0..rng.gen_range(1..=3) {
        let terms = vars.iter().map(|&v| (v, rng.gen_range(-4..=5) as f64)).filter(|t| t.1 != 0.0).collect();
        let s = [Sense::Le, Sense::Ge, Sense::Eq][rng.gen_range(0..3)];
        m.add_constraint(format!("r{r}"), terms, s, rng.gen_range(-2..=8) as f64).unwrap();
    }
    let obj = vars.iter().map(|&v| (v, rng.gen_range(-5..=5) as f64)).collect();
    m.set_objective(sense, obj);
    Ip { model: m, upper }
}

fn enumerate(ip: &Ip) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut x = vec![0i64; ip.upper.len()];
    loop {
        let values: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        if ip.model.constraints().iter().all(|c| c.is_satisfied(&values, 1e-9)) {
            let z = ip.model.objective().value(&values);
            let better = match (best, ip.model.objective().sense) {
                (None, _) => true,
                (Some(b), ObjectiveSense::Minimize) => z < b,
                (Some(b), ObjectiveSense::Maximize) => z > b,
            };
            if better {
                best = Some(z);
            }
        }
        let mut j = 0;
        while j < x.len() && x[j] == ip.upper[j] {
            x[j] = 0;
            j += 1;
        }
        if j == x.len() {
            return best;
        }
        x[j] += 1;
    }
}

#[test]
fn small_integer_programs_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..2000 {
        let ip = random_ip(&mut rng);
        let r = solve(&ip.model, 10.0, None).unwrap();
        match enumerate(&ip) {
            Some(z) => {
                assert_eq!(r.status, SolveStatus::Optimal, "case {case}");
                assert!((r.objective.unwrap() - z).abs() < 1e-6, "case {case}: {:?} vs {z}\n{}", r.objective, export_lp(&ip.model).unwrap());
                assert!(ip.model.is_feasible(r.values.as_ref().unwrap(), 1e-6));
            }
            None => assert_eq!(r.status, SolveStatus::Infeasible, "case {case}"),
        }
    }
}

#[test]
fn hint_is_kept_or_improved() {
    let inst = common::golden();
    let model = build_msy(&inst, 13);
    let (sol, _) = albhw::Solution::parse(common::GOLDEN_SOLUTION).unwrap();
    let hint = albhw::milp::solution_values(&model, &sol).unwrap();
    assert!(model.is_feasible(&hint, 1e-9));
    let r = solve(&model, 60.0, Some(&hint)).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.objective, Some(319.0));
}

#[test]
fn tiny_time_limit_reports_a_consistent_status() {
    let inst = common::golden();
    let model = build_msy(&inst, 13).without_structure();
    let r = solve(&model, 1e-4, None).unwrap();
    match r.status {
        SolveStatus::TimeLimit => assert!(r.values.is_none()),
        SolveStatus::Feasible | SolveStatus::Optimal => {
            let v = r.values.as_ref().unwrap();
            assert!(model.is_feasible(v, 1e-6));
            assert!(r.bound <= r.objective.unwrap() + 1e-6);
        }
        SolveStatus::Infeasible => panic!("golden line is feasible"),
    }
}

#[test]
fn several_continuous_variables_in_one_row_are_unsupported() {
    let mut m = MilpModel::new("cont", ObjectiveSense::Minimize);
    let a = m.add_var("a", 0.0, 5.0, VarKind::Continuous).unwrap();
    let b = m.add_var("b", 0.0, 5.0, VarKind::Continuous).unwrap();
    m.add_constraint("r", vec![(a, 1.0), (b, 1.0)], Sense::Ge, 1.5).unwrap();
    m.set_objective(ObjectiveSense::Minimize, vec![(a, 1.0), (b, 1.0)]);
    assert!(matches!(solve(&m, 1.0, None), Err(SolveError::Unsupported(_))));
}

#[test]
fn single_continuous_variable_per_row() {
    let mut m = MilpModel::new("cont", ObjectiveSense::Maximize);
    let x = m.add_binary("x").unwrap();
    let y = m.add_binary("y").unwrap();
    let a = m.add_var("a", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous).unwrap();
    m.add_constraint("cap", vec![(a, 1.0), (x, -2.5)], Sense::Le, 0.0).unwrap();
    m.add_constraint("pick", vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0).unwrap();
    m.set_objective(ObjectiveSense::Maximize, vec![(a, 1.0), (y, 2.0)]);
    let r = solve(&m, 10.0, None).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective.unwrap() - 2.5).abs() < 1e-6);
}

#[test]
fn solution_file_round_trip() {
    let inst = common::golden();
    let model = build_msy(&inst, 4);
    let r = solve(&model, 60.0, None).unwrap();
    let text = write_solution_file(&model, &r);
    let back = parse_solution_file(&model, &text).unwrap();
    assert_eq!(back.status, r.status);
    assert_eq!(back.objective, r.objective);
    assert_eq!(back.values, r.values);
    assert_eq!(back.nodes, r.nodes);

    assert!(matches!(parse_solution_file(&model, "status DONE\n"), Err(SolveError::Parse { line: 1, .. })));
    assert!(matches!(parse_solution_file(&model, "# c\nnot_a_var 1\n"), Err(SolveError::Parse { line: 2, .. })));
    let empty = parse_solution_file(&model, "").unwrap();
    assert_eq!(empty.status, SolveStatus::TimeLimit);
}

#[test]
fn external_backend_runs_the_embedded_solver() {
    let inst = common::golden();
    let model = build_msy(&inst, 4);
    let exe = env!("CARGO_BIN_EXE_albhw");
    let backend = ExternalBackend::new(format!("'{exe}' solve-lp {{model}} {{solution}} --time-limit {{time_limit}}"));
    let r = backend.solve(&model, 60.0, None).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.objective, Some(319.0));
    assert!(model.is_feasible(r.values.as_ref().unwrap(), 1e-6));
    // the file went through LP names, so the program must survive export
    assert!(import_lp(&export_lp(&model).unwrap()).unwrap().same_program(&model));
}

#[test]
fn failing_external_command() {
    let model = binary_pair();
    let r = ExternalBackend::new("echo boom >&2; exit 3").solve(&model, 1.0, None);
    match r {
        Err(SolveError::Process { stderr, .. }) => assert_eq!(stderr, "boom"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(ExternalBackend::new("true").solve(&model, 1.0, None), Err(SolveError::Io(_))));
}
