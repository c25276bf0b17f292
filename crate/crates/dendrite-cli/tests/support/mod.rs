//! The golden cases and a runner for the binary, shared by the golden and
//! acceptance targets.

#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

pub const BIN: &str = env!("CARGO_BIN_EXE_dendrite");

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// golden file whose contents are fed on stdin
    pub stdin: Option<&'static str>,
    pub code: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], code: i32) -> Case {
    Case { name, args, stdin: None, code }
}

pub const CASES: &[Case] = &[
    case("gen-universe", &["gen-universe", "--seed", "7"], 0),
    case("gen-universe-dot", &["gen-universe", "--seed", "7", "--format", "dot"], 0),
    case("gen-universe-table", &["gen-universe", "--seed", "7", "--format", "table"], 0),
    case("gen-system", &["gen-system", "--seed", "5"], 0),
    case("check-L-fail", &["check-L", "--seed", "5"], 1),
    case("check-L-table", &["check-L", "--seed", "1", "--format", "table"], 0),
    Case { name: "check-L-piped", args: &["check-L", "--input", "-"], stdin: Some("gen-system"), code: 1 },
    case("extend-L", &["extend-L", "--seed", "5"], 0),
    case("amalgamate", &["amalgamate", "--seed", "3", "--max-points", "5"], 0),
    case("amalgamate-notap", &["amalgamate", "--notap"], 1),
    case("joint-embed", &["joint-embed", "--seed", "4", "--max-points", "4"], 0),
    case("jep-obstruction", &["jep-obstruction", "--k", "3"], 0),
    case("classify-dynamics", &["classify-dynamics", "--seed", "6"], 0),
    case("classify-dynamics-dot", &["classify-dynamics", "--seed", "6", "--format", "dot"], 0),
    case("example-d3", &["example-d3", "--seed", "2", "--trials", "10", "--format", "table"], 0),
    case("build-clo", &["build-clo", "--seed", "8"], 0),
    case("check-clo", &["check-clo", "--seed", "8", "--format", "table"], 0),
    case("nonconvex-example", &["nonconvex-example"], 0),
    case("nonconvex-example-dot", &["nonconvex-example", "--format", "dot"], 0),
    Case { name: "check-clo-nonconvex", args: &["check-clo", "--input", "-"], stdin: Some("nonconvex-example"), code: 1 },
    case("transport-order", &["transport-order", "--seed", "9"], 0),
    case("sample-measure", &["sample-measure", "--seed", "1", "--trials", "6000", "--k", "3", "--pushforwards", "2"], 0),
    case("sample-measure-table", &["sample-measure", "--seed", "1", "--trials", "2400", "--k", "4", "--format", "table"], 0),
    case("count-orbits", &["count-orbits", "--k", "3"], 0),
    case("count-orbits-table", &["count-orbits", "--k", "4", "--orders", "3,inf", "--format", "table"], 0),
    case("kspace-validate", &["kspace-validate", "--seed", "11"], 0),
    case("kspace-validate-double", &["kspace-validate", "--seed", "11", "--double-infinity"], 1),
    case("kspace-classify", &["kspace-classify", "--seed", "11"], 0),
    case("cauchy-compare", &["cauchy-compare", "--horizon", "2", "--length", "6"], 0),
    case(
        "cauchy-compare-table",
        &["cauchy-compare", "--sequence", "descending", "--length", "8", "--horizon", "3", "--format", "table"],
        0,
    ),
];

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.out"))
}

pub fn run(args: &[&str], stdin: Option<&[u8]>) -> (Vec<u8>, Vec<u8>, i32) {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).unwrap();
    drop(pipe);
    let out = child.wait_with_output().unwrap();
    (out.stdout, out.stderr, out.status.code().expect("exited"))
}

/// Runs every case; the names whose bytes or status differ from the files.
pub fn mismatches(bless: bool) -> Vec<String> {
    let mut out = Vec::new();
    for c in CASES {
        let input = c.stdin.map(|n| std::fs::read(golden(n)).expect("stdin golden exists"));
        let (stdout, _, code) = run(c.args, input.as_deref());
        if code != c.code {
            out.push(format!("{} (exit {code}, want {})", c.name, c.code));
            continue;
        }
        if bless {
            std::fs::write(golden(c.name), &stdout).unwrap();
        } else if std::fs::read(golden(c.name)).ok().as_deref() != Some(&stdout[..]) {
            out.push(c.name.to_string());
        }
    }
    out
}
