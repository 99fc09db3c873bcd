use dmz::cli::{default_corpus, run, run_corpus, Sampling};
use dmz::sysfile::SystemFile;
use std::path::PathBuf;

fn corpus(name: &str) -> String {
    default_corpus().join(name).to_string_lossy().into_owned()
}

fn dmz(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dmz").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dmz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn every_golden_file_matches() {
    let sampling = Sampling {
        seed: 0,
        samples: 32,
        precision: 256,
    };
    let rows = run_corpus(&default_corpus(), &sampling).unwrap();
    assert!(rows.len() >= 28);
    let bad: Vec<_> = rows.iter().filter(|r| !r.ok()).map(|r| r.name.clone()).collect();
    assert!(bad.is_empty(), "{:?}", bad);
}

#[test]
fn exit_codes_follow_the_verdict() {
    assert_eq!(dmz(&["check-involutive", &corpus("kt_abelian.dmz")]).0, 0);
    assert_eq!(dmz(&["check-involutive", &corpus("kt_perturbed.dmz")]).0, 1);
    assert_eq!(dmz(&["semiham", &corpus("generic.hydro")]).0, 1);
    assert_eq!(dmz(&["check-involutive", "/nonexistent.dmz"]).0, 2);
    assert_eq!(dmz(&["no-such-command"]).0, 2);
    assert_eq!(dmz(&["--help"]).0, 0);
}

#[test]
fn failures_report_a_witness() {
    let (code, out, _) = dmz(&["check-involutive", &corpus("kt_perturbed.dmz")]);
    assert_eq!(code, 1);
    assert!(out.contains("first non-vanishing residual"), "{}", out);
    assert!(out.contains("witness"), "{}", out);
}

#[test]
fn output_is_deterministic() {
    let a = dmz(&["--seed", "7", "check-involutive", &corpus("oblate.dmz")]);
    let b = dmz(&["--seed", "7", "check-involutive", &corpus("oblate.dmz")]);
    assert_eq!(a, b);
    let c = dmz(&["construct", &corpus("sigma_quotient.dist")]);
    let d = dmz(&["construct", &corpus("sigma_quotient.dist")]);
    assert_eq!(c, d);
}

#[test]
fn malformed_files_point_at_the_error() {
    let path = scratch("broken.dmz");
    std::fs::write(&path, "format = 1\nkind = \"dmz\"\ncoords = [\"x\", \"y\"]\nC[1][2] = \"x*(y\"\n").unwrap();
    let (code, _, err) = dmz(&["check-involutive", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("broken.dmz:4:"), "{}", err);

    std::fs::write(&path, "format = 1\nkind = \"dmz\"\ncoords = [\"x\", \"y\"]\nC[1][2] = \"w\"\n").unwrap();
    let (code, _, err) = dmz(&["check-involutive", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{}", err);
}

#[test]
fn gauge_round_trip_through_files() {
    let out = scratch("gauged.dmz");
    let (code, _, err) = dmz(&[
        "gauge",
        &corpus("m3wri_sol.dmz"),
        "--lambda",
        "-ln(z*(x-z))",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{}", err);
    let s = SystemFile::read(&out).unwrap().dmz().unwrap();
    assert!(s.has_zero_c());
    assert_eq!(dmz(&["check-involutive", out.to_str().unwrap()]).0, 0);
    assert_eq!(dmz(&["lame", out.to_str().unwrap()]).0, 0);
}

#[test]
fn construct_writes_a_compatible_system() {
    let out = scratch("constructed.gdmz");
    let (code, _, err) = dmz(&["construct", &corpus("ex31.dist"), "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{}", err);
    assert_eq!(dmz(&["compat", out.to_str().unwrap()]).0, 0);
}

#[test]
fn hodograph_writes_csv() {
    let out = scratch("sweep.csv");
    let (code, _, err) = dmz(&[
        "hodograph",
        &corpus("three_component.hydro"),
        "--x",
        "1",
        "--t",
        "1/10",
        "--guess",
        "1,2,3",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{}", err);
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,t,u1,u2,u3,residual"));
    assert_eq!(lines.count(), 25);
}
