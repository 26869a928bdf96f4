//! One PASS/FAIL line per acceptance criterion. The expensive blow-up runs
//! are computed once and shared between the criteria that use them.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use inls::corpus::DEFAULT_SEED;
use inls::experiments::{self, CollapseRun, Report, SFamilyRun};
use inls::inequalities::{run_suite, InequalityReport, SuiteOptions};

fn mass_critical() -> &'static CollapseRun {
    static RUN: OnceLock<CollapseRun> = OnceLock::new();
    RUN.get_or_init(|| experiments::mass_critical_collapse().expect("mass-critical collapse"))
}

/// The run and the seconds it took.
fn intercritical_timed() -> &'static (CollapseRun, f64) {
    static RUN: OnceLock<(CollapseRun, f64)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let run = experiments::intercritical_collapse().expect("intercritical collapse");
        (run, start.elapsed().as_secs_f64())
    })
}

fn intercritical() -> &'static CollapseRun {
    &intercritical_timed().0
}

fn s_family() -> &'static SFamilyRun {
    static RUN: OnceLock<SFamilyRun> = OnceLock::new();
    RUN.get_or_init(|| experiments::s_family_run().expect("S-family run"))
}

fn suite() -> &'static [InequalityReport] {
    static SUITE: OnceLock<Vec<InequalityReport>> = OnceLock::new();
    SUITE.get_or_init(|| run_suite(&SuiteOptions { seed: DEFAULT_SEED, ..SuiteOptions::default() }).expect("inequality suite"))
}

fn criterion(n: u8) -> inls::Result<Report> {
    match n {
        1 => experiments::ground_state_validation(),
        2 => experiments::pohozaev_gate(),
        3 => experiments::gn_sharpness(suite()),
        4 => experiments::c_of_mm_check(),
        5 => experiments::conservation(),
        6 => experiments::virial(mass_critical(), intercritical()),
        7 => experiments::s_family_tracking(s_family()),
        8 => experiments::theorem1(mass_critical()),
        9 => {
            let (mc, ic, sf) = (mass_critical(), intercritical(), s_family());
            experiments::rate_bound(&[
                ("mass_critical", &mc.traj, &mc.fit),
                ("intercritical", &ic.traj, &ic.fit),
                ("s_family", &sf.traj, &sf.fit),
            ])
        }
        10 => experiments::theorem3(s_family()),
        11 => {
            let (run, evolve_s) = intercritical_timed();
            let mut r = experiments::theorem5(run)?;
            let elapsed = evolve_s + r.elapsed_s;
            r.checks.push(experiments::Check::at_most(11, "runtime incl. evolution (s)", elapsed, 300.0));
            Ok(r)
        }
        12 => experiments::inequalities(suite()),
        _ => unreachable!(),
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    for n in 1..=12u8 {
        let start = Instant::now();
        match criterion(n) {
            Ok(report) => {
                let verdict = if report.passed() { "PASS" } else { "FAIL" };
                println!("{verdict} criterion {n:2} {} ({:.1}s)", report.name, start.elapsed().as_secs_f64());
                for c in &report.checks {
                    let mark = if c.passed { "ok  " } else { "FAIL" };
                    println!("       {mark} {} = {:.4e} ({})", c.description, c.value, c.threshold);
                }
                for note in &report.notes {
                    println!("       note: {note}");
                }
                if !report.passed() {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("FAIL criterion {n:2}: {e}");
                failed += 1;
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
