use qcqp_vqe::document::{parse_instance, serialize_instance, ReportDocument};
use qcqp_vqe::dual::trace_csv;
use qcqp_vqe::suite::{run_suite, Suite, SuiteSpec};
use qcqp_vqe::{gen_instance, lp_solve, solve, DualConfig, Execution, VqeSettings};

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn three_bit_instance_matches_lp() {
    let inst = gen_instance(3, 2, 7, true).unwrap();
    let lp = lp_solve(&inst).unwrap();
    let report = solve(&inst, &VqeSettings::default(), &DualConfig::default(), 1).unwrap();
    assert!(report.converged);
    assert!(max_gap(&report.pmf, lp.pmf.as_ref().unwrap()) < 1e-3);
    assert!(max_gap(&report.lambda, lp.duals.as_ref().unwrap()) < 1e-3);
    assert!((report.objective - lp.objective.unwrap()).abs() < 1e-4);
    assert!(report.constraint_values.iter().all(|&v| v <= 1e-4));

    let last = report.trace.last().unwrap();
    assert_eq!(last.lambda, report.lambda);
    assert!(report
        .trace
        .iter()
        .all(|r| r.lambda.iter().all(|&l| l >= 0.0)));
}

#[test]
fn report_is_consistent_with_pmf() {
    let inst = gen_instance(2, 1, 3, true).unwrap();
    let report = solve(&inst, &VqeSettings::default(), &DualConfig::default(), 5).unwrap();
    assert!((report.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let f0: f64 = report
        .pmf
        .iter()
        .enumerate()
        .map(|(k, p)| p * inst.objective().eval_index(k))
        .sum();
    assert!((f0 - report.objective).abs() < 1e-9);
    for (g, v) in inst.constraints().iter().zip(&report.constraint_values) {
        let e: f64 = report
            .pmf
            .iter()
            .enumerate()
            .map(|(k, p)| p * g.eval_index(k))
            .sum();
        assert!((e - v).abs() < 1e-9);
    }
}

#[test]
fn sampled_dual_updates_still_land_near_lp() {
    let inst = gen_instance(2, 1, 3, true).unwrap();
    let lp = lp_solve(&inst).unwrap();
    let cfg = DualConfig {
        shots: 10_000,
        max_outer: 200,
        ..DualConfig::default()
    };
    let report = solve(&inst, &VqeSettings::default(), &cfg, 2).unwrap();
    assert!((report.objective - lp.objective.unwrap()).abs() < 0.1);
    assert!(report
        .trace
        .iter()
        .all(|r| r.lambda.iter().all(|&l| l >= 0.0)));
}

#[test]
fn solves_are_deterministic_and_serialize_identically() {
    let inst = parse_instance(&serialize_instance(&gen_instance(3, 2, 7, true).unwrap())).unwrap();
    let a = solve(&inst, &VqeSettings::default(), &DualConfig::default(), 8).unwrap();
    let par = VqeSettings {
        execution: Execution::Parallel,
        ..VqeSettings::default()
    };
    let b = solve(&inst, &par, &DualConfig::default(), 8).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        ReportDocument::from_solve(&inst, &a).to_json(),
        ReportDocument::from_solve(&inst, &b).to_json()
    );
    assert_eq!(trace_csv(&a), trace_csv(&b));
}

#[test]
fn table1_suite_is_order_independent() {
    let mut seq = SuiteSpec::new(Suite::Table1, 4);
    seq.execution = Execution::Sequential;
    let mut par = seq.clone();
    par.execution = Execution::Parallel;
    let a = run_suite(&seq).unwrap();
    let b = run_suite(&par).unwrap();
    assert_eq!(a.len(), 4);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.report, y.report);
        assert!(x.pmf_distance() <= 0.05);
        assert!(x.dual_distance() <= 0.02);
    }
}
