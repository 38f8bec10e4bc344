//! Every example doubles as a smoke test.

#[path = "../examples/case_study.rs"]
mod case_study;
#[path = "../examples/evaluate_formula.rs"]
mod evaluate_formula;
#[path = "../examples/learn_policy.rs"]
mod learn_policy;
#[path = "../examples/metric_values.rs"]
mod metric_values;
#[path = "../examples/property_lab.rs"]
mod property_lab;
#[path = "../examples/scenario_file.rs"]
mod scenario_file;
#[path = "../examples/simulate_robot.rs"]
mod simulate_robot;

#[test]
fn case_study_example() {
    case_study::run_example().unwrap();
}

#[test]
fn evaluate_formula_example() {
    evaluate_formula::run_example().unwrap();
}

#[test]
fn learn_policy_example() {
    learn_policy::run_example().unwrap();
}

#[test]
fn metric_values_example() {
    metric_values::run_example().unwrap();
}

#[test]
fn property_lab_example() {
    property_lab::run_example().unwrap();
}

#[test]
fn scenario_file_example() {
    scenario_file::run_example().unwrap();
}

#[test]
fn simulate_robot_example() {
    simulate_robot::run_example().unwrap();
}
