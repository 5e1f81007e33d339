//! Acceptance gate: one line per criterion, non-zero exit on any failure.

use std::process::{Command, ExitCode};

use crosspoly_core::reproduce::{run_all, CheckItem};

const SEED: u64 = 0;

fn crosspoly(threads: usize, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_crosspoly"))
        .args(args)
        .args(["--threads", &threads.to_string()])
        .env_remove("CROSSPOLY_THREADS")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn thread_determinism() -> Vec<CheckItem> {
    let commands: [&[&str]; 5] = [
        &["lattice", "min-vectors", "--name", "l0"],
        &["lattice", "equiv", "--a", "l1", "--b", "l1_prime"],
        &["kissing", "build", "--n", "10", "--m1", "3", "--m2", "1", "--greedy"],
        &["rates", "lower"],
        &["rates", "sweep", "--steps", "6"],
    ];
    commands
        .iter()
        .map(|args| {
            let same = crosspoly(1, args) == crosspoly(8, args);
            CheckItem {
                item: format!("byte-identical output, 1 vs 8 threads: {}", args.join(" ")),
                expected: "identical".into(),
                computed: if same { "identical" } else { "differs" }.into(),
                pass: same,
            }
        })
        .collect()
}

fn main() -> ExitCode {
    let mut results = run_all(SEED);
    if let Some(props) = results.iter_mut().find(|r| r.number == 9) {
        props.items.extend(thread_determinism());
    }
    let mut failed = 0;
    for r in &results {
        let verdict = if r.pass() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {}: {} ({} checks, {:.2?})",
            r.number,
            r.title,
            r.items.len(),
            r.elapsed
        );
        for i in r.failing() {
            println!("    {}: expected {}, computed {}", i.item, i.expected, i.computed);
        }
        if !r.pass() {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
