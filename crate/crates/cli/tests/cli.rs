//! End-to-end checks of the command-line surface: compile the builtin
//! pipeline, round-trip a presentation through the file formats, build and
//! evaluate the magic-square strategy, and verify exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use lsg_core::gf2::BinaryLinearSystem;
use lsg_core::presentation::{default_names, k_group, solution_group};
use lsg_core::replab::reps::pauli_magic_rep;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lsg"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lsg-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn compile_builtin_reproduces_flagship_header() {
    let dir = workdir("builtin");
    let out = dir.join("k.lsys");
    let report = dir.join("prov.json");
    let status = bin()
        .args([
            "compile",
            "builtin:K",
            "-o",
            out.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(status.status.success());
    let lsys = fs::read_to_string(&out).unwrap();
    assert!(lsys.starts_with("184 235\n"), "unexpected header");
    let prov: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(prov["designated"]["a_image"], "a");
    // Byte-identical re-run: the pipeline is deterministic.
    let out2 = dir.join("k2.lsys");
    bin()
        .args(["compile", "builtin:K", "-o", out2.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(lsys, fs::read_to_string(&out2).unwrap());
}

#[test]
fn compile_exported_source_group_matches_builtin() {
    let dir = workdir("roundtrip");
    let grp = dir.join("k.grp");
    let (k, _) = k_group();
    fs::write(&grp, k.presentation().unwrap().to_grp()).unwrap();
    let out = dir.join("k.lsys");
    let status = bin()
        .args([
            "compile",
            grp.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
            "--hnn",
            "a",
        ])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&status.stderr)
    );
    let lsys = fs::read_to_string(&out).unwrap();
    assert!(lsys.starts_with("184 235\n"));
}

#[test]
fn compile_homogeneous_without_hnn_target_exits_two() {
    let dir = workdir("nohnn");
    let grp = dir.join("k.grp");
    let (k, _) = k_group();
    fs::write(&grp, k.presentation().unwrap().to_grp()).unwrap();
    let out = dir.join("k.lsys");
    let status = bin()
        .args(["compile", grp.to_str().unwrap(), "-o", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn evaluate_magic_square_strategy_is_all_ones() {
    let dir = workdir("magic");
    let sys_path = dir.join("magic.lsys");
    let rep_path = dir.join("pauli.json");
    let strat_path = dir.join("strat.json");
    fs::write(&sys_path, BinaryLinearSystem::magic_square().to_lsys()).unwrap();
    fs::write(
        &rep_path,
        serde_json::to_string(&pauli_magic_rep().to_json()).unwrap(),
    )
    .unwrap();
    let status = bin()
        .args([
            "strategy",
            rep_path.to_str().unwrap(),
            sys_path.to_str().unwrap(),
            "-o",
            strat_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&status.stderr)
    );
    let output = bin()
        .args([
            "evaluate",
            strat_path.to_str().unwrap(),
            sys_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "i,j,p,bias");
    assert_eq!(lines.len(), 1 + 18);
    for line in &lines[1..] {
        let p = line.split(',').nth(2).unwrap();
        assert_eq!(p, "1.000000000", "line {line}");
    }
}

#[test]
fn defect_of_pauli_rep_is_tiny() {
    let dir = workdir("defect");
    let rep_path = dir.join("pauli.json");
    let grp_path = dir.join("magic.grp");
    fs::write(
        &rep_path,
        serde_json::to_string(&pauli_magic_rep().to_json()).unwrap(),
    )
    .unwrap();
    let pres = solution_group(&BinaryLinearSystem::magic_square(), &default_names(9)).unwrap();
    fs::write(&grp_path, pres.to_grp()).unwrap();
    let output = bin()
        .args(["defect", rep_path.to_str().unwrap(), grp_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(report["epsilon"].as_f64().unwrap() < 1e-9);
}

#[test]
fn round_involution_then_split_recovers_a_playable_rep() {
    // Perturb the magic-square representation, round it back to involutions
    // through the CLI, then split on J; the certificates must be finite and
    // the output representation must parse back.
    use lsg_core::cmat::{exp_i_hermitian, random_hermitian_unit};
    use lsg_core::replab::ApproxRep;
    use rand::SeedableRng;

    let dir = workdir("round");
    let rep_path = dir.join("noisy.json");
    let grp_path = dir.join("magic.grp");
    let rounded_path = dir.join("rounded.json");
    let split_path = dir.join("split.json");

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let pauli = pauli_magic_rep();
    let mut noisy = ApproxRep::new(4);
    for (g, m) in pauli.images() {
        let h = random_hermitian_unit(&mut rng, 4);
        noisy
            .assign(g.clone(), m.mul(&exp_i_hermitian(&h, 0.02).unwrap()))
            .unwrap();
    }
    fs::write(&rep_path, serde_json::to_string(&noisy.to_json()).unwrap()).unwrap();
    let pres = solution_group(&BinaryLinearSystem::magic_square(), &default_names(9)).unwrap();
    fs::write(&grp_path, pres.to_grp()).unwrap();

    let out = bin()
        .args([
            "round",
            rep_path.to_str().unwrap(),
            "--lemma",
            "involution",
            "-o",
            rounded_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = bin()
        .args([
            "round",
            rounded_path.to_str().unwrap(),
            "--lemma",
            "splitJ",
            "--pres",
            grp_path.to_str().unwrap(),
            "--delta",
            "0.5",
            "-o",
            split_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let split = ApproxRep::from_json(
        &serde_json::from_str(&fs::read_to_string(&split_path).unwrap()).unwrap(),
    )
    .unwrap();
    assert_eq!(split.dim(), 4);
}

#[test]
fn round_abelian_stabilizes_a_commuting_pair() {
    use lsg_core::cmat::CMat;
    use lsg_core::replab::ApproxRep;
    use num_complex::Complex64;

    let dir = workdir("abelian");
    let rep_path = dir.join("pair.json");
    let one = Complex64::new(1.0, 0.0);
    let mut rep = ApproxRep::new(2);
    rep.assign("p", CMat::diag(&[one, -one])).unwrap();
    rep.assign("q", CMat::diag(&[-one, -one])).unwrap();
    fs::write(&rep_path, serde_json::to_string(&rep.to_json()).unwrap()).unwrap();
    let out = bin()
        .args(["round", rep_path.to_str().unwrap(), "--lemma", "abelian"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(cert["max_move"].as_f64().unwrap() < 1e-9);
}

#[test]
fn homs_guard_exits_three() {
    let dir = workdir("homsguard");
    let grp = dir.join("many.grp");
    let gens: String = (0..20).map(|i| format!("gen g{i} inv\n")).collect();
    fs::write(&grp, gens).unwrap();
    let status = bin()
        .args(["homs", grp.to_str().unwrap(), "--degree", "6"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
}

#[test]
fn unknown_command_exits_two() {
    let status = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
}
