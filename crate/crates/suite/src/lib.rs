//! Acceptance suite: corpora, brute-force oracles, the eight checks and a
//! runner that writes reproducible reports.

pub mod algorithms;
pub mod corpus;
pub mod criteria;
pub mod oracle;
pub mod report;

use std::fs;
use std::path::Path;
use std::thread;
use std::time::Instant;

use report::{CheckReport, Environment, RunReport, Timings};

pub use report::KEPT_FAILURES;

/// Suite ids accepted by [`run_suite`], with the checks each one runs.
pub const SUITES: &[(&str, &[u8])] = &[
    ("all", &[1, 2, 3, 4, 5, 6, 7, 8]),
    ("dequantize", &[1]),
    ("local-expectation", &[2]),
    ("non-signaling", &[3]),
    ("encoding", &[4]),
    ("factor-three", &[5]),
    ("gadgets", &[6]),
    ("lift", &[7]),
    ("locality", &[8]),
];

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

pub fn suite_checks(name: &str) -> Option<&'static [u8]> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

type Timed<T> = (T, f64);

fn join<T>(h: Option<thread::ScopedJoinHandle<'_, T>>) -> Option<T> {
    h.map(|h| h.join().expect("check thread panicked"))
}

fn timed<T>(f: impl FnOnce() -> T) -> Timed<T> {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64())
}

/// Runs the named suite with its checks on separate threads and assembles
/// the report in check order.
pub fn run_checks(name: &str, seed: u64) -> Result<(RunReport, Timings), SuiteError> {
    let wanted = suite_checks(name).ok_or_else(|| SuiteError::UnknownSuite(name.to_string()))?;
    let want = |id: u8| wanted.contains(&id);
    // The locality check reads the runs of checks 5 and 7.
    let need5 = want(5) || want(8);
    let need7 = want(7) || want(8);

    let (r1, r2, r3, r4, r5, r6, r7) = thread::scope(|s| {
        let h1 = want(1).then(|| s.spawn(|| timed(|| criteria::dequantization_soundness(seed))));
        let h2 = want(2).then(|| s.spawn(|| timed(|| criteria::local_expectation_equivalence(seed))));
        let h3 = want(3).then(|| s.spawn(|| timed(|| criteria::non_signaling(seed))));
        let h4 = want(4).then(|| s.spawn(|| timed(|| criteria::matching_encoding(seed))));
        let h5 = need5.then(|| s.spawn(|| timed(|| criteria::factor_three(seed))));
        let h6 = want(6).then(|| s.spawn(|| timed(|| criteria::gadget_laws(seed))));
        let h7 = need7.then(|| s.spawn(|| timed(|| criteria::lift_end_to_end(seed))));
        (join(h1), join(h2), join(h3), join(h4), join(h5), join(h6), join(h7))
    });

    let mut checks: Vec<Timed<CheckReport>> = Vec::new();
    checks.extend(r1);
    checks.extend(r2);
    checks.extend(r3);
    checks.extend(r4);
    let five = r5.map(|((c, l), t)| ((c, t), l));
    let seven = r7.map(|((c, l), t)| ((c, t), l));
    if want(5) {
        checks.push(five.as_ref().expect("check 5 ran").0.clone());
    }
    checks.extend(r6);
    if want(7) {
        checks.push(seven.as_ref().expect("check 7 ran").0.clone());
    }
    if want(8) {
        let (a, b) = (&five.as_ref().expect("check 5 ran").1, &seven.as_ref().expect("check 7 ran").1);
        checks.push(timed(|| criteria::greedy_locality(a, b)));
    }

    let mut timings = Timings { suite: name.to_string(), ..Timings::default() };
    for (c, secs) in &checks {
        timings.seconds.insert(format!("{} {}", c.id, c.name), *secs);
    }
    let checks: Vec<CheckReport> = checks.into_iter().map(|(c, _)| c).collect();
    let report = RunReport {
        suite: name.to_string(),
        environment: Environment { version: env!("CARGO_PKG_VERSION").to_string(), seed },
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    Ok((report, timings))
}

/// [`run_checks`], then writes `report.json`, `report.txt` and
/// `timings.json` into `out_dir` when one is given.
pub fn run_suite(name: &str, seed: u64, out_dir: Option<&Path>) -> Result<(RunReport, Timings), SuiteError> {
    if suite_checks(name).is_none() {
        return Err(SuiteError::UnknownSuite(name.to_string()));
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }
    let (report, timings) = run_checks(name, seed)?;
    if let Some(dir) = out_dir {
        fs::write(dir.join("report.json"), report.to_json() + "\n")?;
        fs::write(dir.join("report.txt"), report.to_text())?;
        fs::write(dir.join("timings.json"), serde_json::to_string_pretty(&timings).expect("timings serialize") + "\n")?;
    }
    Ok((report, timings))
}
