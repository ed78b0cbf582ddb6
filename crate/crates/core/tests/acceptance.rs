use std::process::ExitCode;
use std::time::Instant;

use jetcalc_core::suites::{plan_rank_report, probes_suite, run_suite, SuiteConfig, SuiteReport};

const DIMS: &[(usize, usize)] = &[(2, 1), (2, 2), (3, 2)];

fn over_dims(suites: &[&str], order: usize, seed: u64, samples: usize) -> SuiteReport {
    let mut total = SuiteReport::default();
    for (di, &(m, n)) in DIMS.iter().enumerate() {
        let cfg = SuiteConfig::new(m, n, order, seed + 100 * di as u64, samples);
        for name in suites {
            match run_suite(name, &cfg) {
                Ok(r) => total.merge(r),
                Err(e) => {
                    total.checks += 1;
                    total.failures.push(format!("{name}: {e}"));
                }
            }
        }
    }
    total
}

fn print(n: usize, what: &str, report: &SuiteReport, secs: f64) -> bool {
    let ok = report.passed();
    println!(
        "criterion {n}: {} {what} ({} checks, {} failures, {secs:.1}s)",
        if ok { "PASS" } else { "FAIL" },
        report.checks,
        report.failures.len()
    );
    for f in report.failures.iter().take(5) {
        println!("    {f}");
    }
    ok
}

fn main() -> ExitCode {
    let mut all = true;
    let mut run = |n: usize, what: &str, f: &dyn Fn() -> SuiteReport| {
        let t = Instant::now();
        let report = f();
        let ok = print(n, what, &report, t.elapsed().as_secs_f64());
        all &= ok;
        ok
    };

    run(1, "truncated series arithmetic", &|| over_dims(&["series"], 4, 1, 20));
    run(2, "group laws and left actions", &|| over_dims(&["group"], 4, 2, 20));
    let gate = run(3, "kernel shift convention", &|| over_dims(&["convention"], 4, 3, 20));
    if !gate {
        for (n, what) in [
            (4, "Bianchi and Ricci identities"),
            (5, "equivariance"),
            (6, "first reduction"),
            (7, "second reduction"),
            (8, "reconstruction rank trace"),
        ] {
            println!("criterion {n}: FAIL {what} (blocked by convention gate)");
        }
        return ExitCode::FAILURE;
    }
    run(4, "Bianchi and Ricci identities", &|| {
        over_dims(&["bianchi", "ricci", "curvature-formula"], 4, 4, 20)
    });
    run(5, "equivariance", &|| over_dims(&["equivariance"], 4, 5, 20));
    run(6, "first reduction", &|| {
        let mut r = over_dims(&["reduction"], 4, 6, 20);
        r.merge(probes_suite());
        r
    });
    run(7, "second reduction", &|| over_dims(&["second"], 3, 7, 20));
    run(8, "reconstruction rank trace", &|| {
        let mut r = over_dims(&["solver"], 4, 8, 20);
        r.merge(plan_rank_report(3, 4));
        r
    });

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
