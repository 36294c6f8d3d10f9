use std::process::{Command, Output};

use mlradon_cli::spec::builtin;
use mlradon_core::polytope::build_polytope;
use mlradon_core::symalg::rat;
use mlradon_core::{BigRational, Catalog, NewtonPolytope};
use num::Zero;
use proptest::prelude::*;

fn mlradon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlradon")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = mlradon(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn classify_on_loomis_whitney_space() {
    let out = stdout(&["classify", "lw3", "--p", "2,2,2"]);
    assert!(out.contains("verdict ENDPOINT_UNKNOWN") && out.contains("b (1,1,1)"), "{out}");
    let out = stdout(&["classify", "lw3", "--p", "5/2,5/2,5/2"]);
    assert!(out.contains("verdict STRONG_TYPE") && out.contains("b (2,2,2)"), "{out}");
}

#[test]
fn polytope_on_tao_wright() {
    let out = stdout(&["polytope", "tao-wright"]);
    assert!(out.contains("(2,1)") && out.contains("(1,2)"), "{out}");
}

#[test]
fn exit_codes_follow_error_classes() {
    let dir = std::env::temp_dir().join(format!("mlradon-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad_syntax = dir.join("syntax.spec");
    std::fs::write(&bad_syntax, "n=2 k=2\nfield 1: 1, 0\nfield 2: 0, 1 +\n").unwrap();
    let bad_dim = dir.join("dim.spec");
    std::fs::write(&bad_dim, "n=2 k=1\nfield 1: x1\n").unwrap();
    let bad_map = dir.join("map.spec");
    std::fs::write(&bad_map, "n=2 k=1\nmap 1: x1 + 1\n").unwrap();

    let code = |args: &[&str]| mlradon(args).status.code();
    assert_eq!(code(&["polytope", bad_syntax.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["polytope", bad_dim.to_str().unwrap()]), Some(3));
    assert_eq!(code(&["polytope", bad_map.to_str().unwrap()]), Some(3));
    assert_eq!(code(&["classify", "lw2", "--p", "2,2,2"]), Some(3));
    assert_eq!(code(&["polytope", dir.join("missing.spec").to_str().unwrap()]), Some(5));
    let err = String::from_utf8(mlradon(&["polytope", bad_dim.to_str().unwrap()]).stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_is_written_and_reports_repeat() {
    let path = std::env::temp_dir().join(format!("mlradon-scan-{}.csv", std::process::id()));
    let args = ["volume-scan", "heisenberg", "--delta-list", "0.2,0.1", "--samples", "20000", "--seed", "3"];
    let mut with_csv = args.to_vec();
    with_csv.extend(["--csv", path.to_str().unwrap()]);
    let a = stdout(&with_csv);
    let b = stdout(&with_csv);
    assert_eq!(a, b);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("delta_1,delta_2,volume,lambda,ratio\n") && csv.lines().count() == 3, "{csv}");
    std::fs::remove_file(&path).unwrap();
}

fn serialized(name: &str) -> String {
    let out = stdout(&["polytope", name, "--cap", "4"]);
    out.split("serialized\n").nth(1).unwrap().to_string()
}

fn built(name: &str) -> NewtonPolytope {
    let s = builtin(name).unwrap();
    let origin = vec![BigRational::zero(); s.n];
    let c = Catalog::truncated(s.fields, 4, &s.options.eps, &origin).unwrap();
    build_polytope(&c, &origin).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn printed_polytope_round_trips(name in prop::sample::select(vec!["lw2", "tao-wright", "heisenberg"]),
                                    bs in prop::collection::vec((0i64..=12, 0i64..=12), 1..64)) {
        let printed = NewtonPolytope::from_text(&serialized(name)).unwrap();
        let original = built(name);
        for (x, y) in bs {
            let b = [rat(x, 4), rat(y, 4)];
            prop_assert_eq!(printed.contains(&b).unwrap(), original.contains(&b).unwrap());
        }
    }
}
