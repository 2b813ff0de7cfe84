//! Command-line half of acceptance criterion 8: rerunning any command with
//! identical flags produces byte-identical output. (The parallel-vs-serial
//! trial identity lives in the library's acceptance suite.)

use std::process::Command;

fn capture(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_fracmc"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code())
}

#[test]
fn acceptance_criterion_8_cli_byte_identity() {
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "sample", "--alpha", "0.3", "--method", "1", "--n", "500", "--draws", "20", "--seed",
            "42",
        ],
        vec![
            "sample", "--alpha", "0.3", "--method", "2", "--n", "500", "--draws", "20", "--seed",
            "42",
        ],
        vec!["compare", "--alpha", "0.5", "--n", "200", "--draws", "30", "--seed", "7"],
        vec!["weights", "--alpha", "3.5", "--kmax", "40"],
        vec![
            "deriv",
            "--alpha",
            "1.7",
            "--func",
            "example2",
            "--t-start",
            "1",
            "--t-end",
            "3",
            "--t-step",
            "1",
            "--n-samples",
            "1000",
            "--trials",
            "25",
            "--seed",
            "42",
        ],
        vec![
            "deriv",
            "--alpha",
            "2.5",
            "--func",
            "example3",
            "--t-start",
            "2",
            "--t-end",
            "2",
            "--n-samples",
            "500",
            "--trials",
            "10",
            "--emit-trials",
        ],
        vec![
            "integ",
            "--alpha",
            "1.4",
            "--func",
            "example5",
            "--t-start",
            "1",
            "--t-end",
            "3",
            "--t-step",
            "1",
            "--n-samples",
            "1000",
            "--trials",
            "25",
            "--seed",
            "42",
        ],
    ];
    let mut failures = Vec::new();
    for args in &invocations {
        let (a, code_a) = capture(args);
        let (b, code_b) = capture(args);
        if code_a != Some(0) || code_b != Some(0) {
            failures.push(format!("{args:?}: nonzero exit ({code_a:?}, {code_b:?})"));
        } else if a != b {
            failures.push(format!("{args:?}: outputs differ"));
        } else if a.is_empty() {
            failures.push(format!("{args:?}: empty output"));
        }
    }
    if failures.is_empty() {
        println!(
            "criterion 8 (cli byte-identity): PASS — {} invocations reproduced exactly",
            invocations.len()
        );
    } else {
        println!("criterion 8 (cli byte-identity): FAIL — {}", failures.join("; "));
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
