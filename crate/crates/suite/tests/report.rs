use std::fs;

use nslab_suite::{run_suite, SuiteError};

#[test]
fn unknown_suite_is_rejected() {
    assert!(matches!(run_suite("nope", 7, None), Err(SuiteError::UnknownSuite(_))));
}

#[test]
fn lift_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_suite("lift", 7, Some(&a)).unwrap();
    run_suite("lift", 7, Some(&b)).unwrap();
    for file in ["report.json", "report.txt"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    assert!(a.join("timings.json").exists());
}

#[test]
fn text_and_json_reports_agree_on_every_number() {
    let (report, _) = run_suite("encoding", 7, None).unwrap();
    let text = report.to_text();
    for c in &report.checks {
        for (k, v) in &c.quantities {
            assert!(text.contains(&format!("{k}={v}")), "{k}={v} missing from the text report");
        }
    }
    assert!(report.passed);
}

#[test]
fn dequantize_suite_reports_no_failures() {
    let (report, _) = run_suite("dequantize", 7, None).unwrap();
    assert_eq!(report.checks.len(), 1);
    assert_eq!(report.checks[0].failure_count, 0);
}
