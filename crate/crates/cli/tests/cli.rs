use std::path::PathBuf;

use itlab::derivation::check_derivation;
use itlab::format::parse_derivation;
use itlab::types::{equivalent, parse_type};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["itlab"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = itlab_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    let start = line.find(&format!("{key}=")).unwrap_or_else(|| panic!("no {key} in {line}")) + key.len() + 1;
    let rest = &line[start..];
    if let Some(quoted) = rest.strip_prefix('"') {
        &quoted[..quoted.find('"').unwrap()]
    } else {
        rest.split_whitespace().next().unwrap()
    }
}

#[test]
fn checks_the_self_application_example() {
    let (code, out, _) = run(&["check", "--system", "ls", &data("self_application.drv")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("valid ls derivation"));
}

#[test]
fn rejects_a_broken_axiom_with_diagnostics() {
    let (code, out, _) = run(&["check", &data("bad_axiom.drv")]);
    assert_eq!(code, 1);
    assert!(out.contains("(Ax)") && out.contains("RuleMismatch"), "{out}");
}

#[test]
fn omega_is_non_sn() {
    let (code, out, _) = run(&["--porcelain", "sn", "(\\x. x x)(\\x. x x)"]);
    assert_eq!(code, 1);
    assert_eq!(field(&out, "verdict"), "NonSN");
}

#[test]
fn types_self_application() {
    let (code, out, _) = run(&["--porcelain", "type-sn", "\\x. x x"]);
    assert_eq!(code, 0);
    let ty = parse_type(field(&out, "type")).unwrap();
    assert!(equivalent(&ty, &parse_type("(φ0 & (φ0 -> φ1)) -> φ1").unwrap(), false));
    assert_eq!(field(&out, "type"), "(φ0 & (φ0 -> φ1)) -> φ1");
    assert!(!field(&out, "rules").contains("RCap"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["type-wn", "(\\x y. x)(\\z. z)((\\w. w w)(\\w. w w))"][..],
        &["enumerate", "--max-size", "5"],
        &["reduce", "(\\x y. y x) a (\\z. z)"],
    ] {
        assert_eq!(run(args), run(args));
    }
}

#[test]
fn written_derivations_re_read_and_check() {
    let dir = std::env::temp_dir().join(format!("itlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let first = dir.join("wn.drv");
    let first_s = first.to_string_lossy().into_owned();
    let (code, _, err) = run(&["type-wn", "(\\x y. x)(\\z. z)((\\w. w w)(\\w. w w))", "-o", &first_s]);
    assert_eq!(code, 0, "{err}");
    for to in ["nd", "ndw", "ls", "lsw", "ll", "llw"] {
        let target = dir.join(format!("{to}.drv"));
        let target_s = target.to_string_lossy().into_owned();
        let (code, _, err) = run(&["translate", "--to", to, &first_s, "-o", &target_s]);
        if matches!(to, "nd" | "ls") {
            // Nothing leads out of the ω systems into these two.
            assert_eq!(code, 2, "{to}: {err}");
            continue;
        }
        assert_eq!(code, 0, "{to}: {err}");
        let d = parse_derivation(&std::fs::read_to_string(&target).unwrap(), None).unwrap();
        assert!(check_derivation(&d).is_valid());
        assert_eq!(d.system.name(), to);
    }
    // Going to (Beta)ℓ drops the argument premiss that typed Ω, so no ω
    // remains.
    let ll = std::fs::read_to_string(dir.join("ll.drv")).unwrap();
    assert!(!ll.contains("(Omega"));
    let llw = dir.join("llw.drv").to_string_lossy().into_owned();
    let (code, out, err) = run(&["--porcelain", "approx", &llw]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(field(&out, "approximant"), r"\\z. z");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn expands_step_by_step() {
    let dir = std::env::temp_dir().join(format!("itlab-expand-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = |n: &str| dir.join(n).to_string_lossy().into_owned();
    assert_eq!(run(&["type-wn", "\\z. z", "-o", &path("0.drv")]).0, 0);
    // The root of this term is not a redex.
    let (code, _, _) = run(&["expand", &path("0.drv"), "--term", "(\\x. \\y. y) w (\\z. z)", "--at", "root"]);
    assert_eq!(code, 2);
    let (code, _, err) = run(&["expand", &path("0.drv"), "--term", "(\\y. y) (\\z. z)", "--at", "root", "-o", &path("1.drv")]);
    assert_eq!(code, 0, "{err}");
    let (code, out, err) =
        run(&["--porcelain", "expand", &path("1.drv"), "--term", "(\\x. \\y. y) w (\\z. z)", "--at", "fun", "-o", &path("2.drv")]);
    assert_eq!(code, 0, "{err}");
    assert!(field(&out, "sequent").starts_with("|- (\\\\x. \\\\y. y) w"), "{out}");
    assert_eq!(run(&["check", &path("2.drv")]).0, 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn preorder_verdicts() {
    assert_eq!(run(&["leq", "a & b", "b & a"]).0, 0);
    assert_eq!(run(&["leq", "a", "a & b"]).0, 1);
    assert_eq!(run(&["leq", "--omega", "a", "a & ω"]).0, 0);
    assert_eq!(run(&["leq", "a", "ω"]).0, 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["sn", "\\x."]).0, 2);
    assert_eq!(run(&["check", "/nonexistent/file.drv"]).0, 2);
    assert_eq!(run(&["check", "--system", "xyz", &data("self_application.drv")]).0, 2);
    assert_eq!(run(&["prop", "nope"]).0, 2);
}

#[test]
fn fuel_comes_from_the_environment_or_flag() {
    let (code, out, _) = run(&["--porcelain", "--fuel", "3", "wn", "(\\x. x x)(\\x. x x)"]);
    assert_eq!(code, 1);
    assert_eq!(field(&out, "steps"), "3");
}

#[test]
fn enumerates_closed_terms() {
    let (code, out, _) = run(&["enumerate", "--max-size", "2", "--closed"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "\\x. x");
    let (_, out, _) = run(&["--porcelain", "enumerate", "--max-size", "7", "--closed"]);
    assert_eq!(out.trim(), "count=201");
}

#[test]
fn property_suites_pass_on_small_corpora() {
    for suite in ["sn", "wn", "translate", "format", "approx"] {
        let (code, out, _) = run(&["--porcelain", "prop", suite, "--max-size", "5"]);
        assert_eq!(code, 0, "{suite}: {out}");
        assert_eq!(field(&out, "counterexamples"), "0");
    }
}
