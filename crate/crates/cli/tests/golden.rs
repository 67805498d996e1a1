//! Golden reports for the example corpus. Set `INVDIV_BLESS=1` to rewrite.

use std::path::{Path, PathBuf};

use invdiv_cli::{run, ExitStatus};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

const EXPECTED: &[(&str, ExitStatus)] = &[
    ("arity_mismatch", ExitStatus::Error),
    ("bad_token", ExitStatus::Error),
    ("base_locus_p2", ExitStatus::Error),
    ("budget_p3_four_planes", ExitStatus::Budget),
    ("conic_only", ExitStatus::Error),
    ("cube_p2_nodal", ExitStatus::Conclusive),
    ("mixed_p2_hyperplane", ExitStatus::Conclusive),
    ("nodal_only", ExitStatus::Error),
    ("square_p2_conic", ExitStatus::Conclusive),
    ("square_p2_triangle", ExitStatus::Conclusive),
    ("square_p2_two_lines", ExitStatus::Conclusive),
    ("square_p3_hyperplane", ExitStatus::Conclusive),
    ("square_p3_quadric", ExitStatus::Conclusive),
    ("square_p3_two_planes", ExitStatus::Inconclusive),
    ("square_p3_two_planes_iterate", ExitStatus::Inconclusive),
    ("square_p3_whitney", ExitStatus::Conclusive),
];

fn check(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("INVDIV_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

#[test]
fn corpus_is_listed() {
    let mut names: Vec<String> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let listed: Vec<&str> = EXPECTED.iter().map(|(n, _)| *n).collect();
    assert_eq!(names, listed);
}

#[test]
fn analyze_reports_and_exit_codes() {
    for (name, status) in EXPECTED {
        let file = corpus().join(format!("{name}.json"));
        let out = run(["invdiv", "analyze", file.to_str().unwrap()]);
        assert_eq!(out.status, *status, "{name}: {}", out.stderr);
        let text = format!("exit {}\n{}{}", out.status.code(), out.stdout, out.stderr);
        check(&format!("{name}.analyze.txt"), &text);
    }
}

#[test]
fn parse_echoes() {
    for name in ["square_p2_conic", "cube_p2_nodal", "bad_token", "arity_mismatch", "nodal_only"] {
        let file = corpus().join(format!("{name}.json"));
        let out = run(["invdiv", "parse", file.to_str().unwrap()]);
        let text = format!("exit {}\n{}{}", out.status.code(), out.stdout, out.stderr);
        check(&format!("{name}.parse.txt"), &text);
    }
}

#[test]
fn bound_tables() {
    for (n, d, z) in [(3, 3, None), (3, 2, None), (2, 1, None), (3, 3, Some(1)), (6, 5, Some(1)), (3, 4, None)] {
        let mut args = vec!["invdiv".to_string(), "bound".into(), "--n".into(), n.to_string(), "--d".into(), d.to_string()];
        if let Some(z) = z {
            args.extend(["--deg-z".to_string(), z.to_string()]);
        }
        let out = run(&args);
        assert_eq!(out.status, ExitStatus::Conclusive);
        let tag = z.map_or(String::new(), |z| format!("_z{z}"));
        check(&format!("bound_n{n}_d{d}{tag}.txt"), &out.stdout);
    }
}

#[test]
fn rank_reports() {
    let cases = [
        ("conic_only", "1:0:0", true, ExitStatus::Conclusive),
        ("conic_only", "1:1:2", false, ExitStatus::Conclusive),
        ("nodal_only", "0:0:1", true, ExitStatus::Conclusive),
        ("conic_only", "1:2:1", true, ExitStatus::Error),
    ];
    for (name, point, on, status) in cases {
        let file = corpus().join(format!("{name}.json"));
        let mut args = vec!["invdiv", "rank", file.to_str().unwrap(), "--point", point];
        if on {
            args.push("--on-divisor");
        }
        let out = run(&args);
        assert_eq!(out.status, status, "{name} {point}: {}", out.stderr);
        let text = format!("exit {}\n{}{}", out.status.code(), out.stdout, out.stderr);
        check(&format!("rank_{name}_{}.txt", point.replace(':', "_")), &text);
    }
}
