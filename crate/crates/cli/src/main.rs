//! Command-line driver: compile presentations down to linear-system games,
//! forecast pass sizes, measure representation defects, apply the stability
//! roundings, build and evaluate strategies, enumerate finite
//! homomorphisms, and run the acceptance suite.
//!
//! Exit codes: 0 success, 2 validation failure (malformed input, bad
//! arguments), 3 feasibility guard (enumeration or dimension bound).

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use lsg_core::compiler::{
    build_counterexample, compile_lpc, forecast_ehlpc, forecast_lpc, lower_ehlpc, LpcSize,
};
use lsg_core::error::Error;
use lsg_core::games::{strategy_from_rep, win_stats, win_stats_csv, Game, ObservableStrategy};
use lsg_core::gf2::BinaryLinearSystem;
use lsg_core::presentation::{
    default_names, hnn_z2, recognize, Presentation, Recognized,
};
use lsg_core::replab::homs::enumerate_homs;
use lsg_core::replab::stability::{
    round_commuting, round_unitary_to_involution, split_on_j, stabilize_abelian,
};
use lsg_core::replab::ApproxRep;
use lsg_core::word::J;

const USAGE: &str = "\
usage: lsg <command> [args]

commands:
  compile <in.grp|builtin:K> -o <out.lsys> [--report <prov.json>] [--hnn <gen>]
      Lower a presentation to a linear system. Homogeneous inputs need
      --hnn <generator> to pick the HNN target.
  forecast <in.grp|builtin:K>
      Print closed-form size forecasts next to measured pass outputs.
  defect <rep.json> <pres.grp>
      Print the per-relation defect report (JSON).
  round <rep.json> --lemma <involution|commuting|abelian|splitJ>
        [-o <out.json>] [--pres <pres.grp>] [--delta <x>] [--target <gen>]
      Apply a stability rounding; prints the certified bound.
  strategy <rep.json> <sys.lsys> -o <strat.json>
      Build the observable strategy of a representation with J = -1.
  evaluate <strat.json> <sys.lsys> [-o <out.csv>]
      Per-pair winning probabilities and biases (CSV).
  homs <pres.grp> --degree <k> [--generator <g>]
      Enumerate homomorphisms into S_k; summarize a generator's images.
  selftest [--seed <n>]
      Run the acceptance suite; exit 0 iff all criteria pass.

The default seed comes from LSG_SEED (0 if unset).";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Feasibility(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(args: &[String]) -> Result<(), Error> {
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return Err(Error::validation("missing command"));
    };
    let rest = &args[1..];
    match command.as_str() {
        "compile" => cmd_compile(rest),
        "forecast" => cmd_forecast(rest),
        "defect" => cmd_defect(rest),
        "round" => cmd_round(rest),
        "strategy" => cmd_strategy(rest),
        "evaluate" => cmd_evaluate(rest),
        "homs" => cmd_homs(rest),
        "selftest" => cmd_selftest(rest),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        other => Err(Error::validation(format!("unknown command {other:?}"))),
    }
}

/// Tiny flag parser: positional arguments plus `--flag value` pairs
/// (`-o` is shorthand for `--out`).
struct Args {
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
}

fn parse_args(rest: &[String], known_flags: &[&str]) -> Result<Args, Error> {
    let mut positional = Vec::new();
    let mut flags = BTreeMap::new();
    let mut it = rest.iter();
    while let Some(arg) = it.next() {
        if let Some(name) = arg.strip_prefix("--") {
            if !known_flags.contains(&name) {
                return Err(Error::validation(format!("unknown flag --{name}")));
            }
            let value = it
                .next()
                .ok_or_else(|| Error::validation(format!("--{name} needs a value")))?;
            flags.insert(name.to_string(), value.clone());
        } else if arg == "-o" {
            let value = it
                .next()
                .ok_or_else(|| Error::validation("-o needs a value"))?;
            flags.insert("out".to_string(), value.clone());
        } else {
            positional.push(arg.clone());
        }
    }
    Ok(Args { positional, flags })
}

fn read(path: &str) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::validation(format!("cannot read {path}: {e}")))
}

fn write_out(path: &str, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::validation(format!("cannot write {path}: {e}")))
}

fn seed_from(flags: &BTreeMap<String, String>) -> Result<u64, Error> {
    if let Some(s) = flags.get("seed") {
        return s
            .parse()
            .map_err(|_| Error::validation(format!("bad seed {s:?}")));
    }
    match std::env::var("LSG_SEED") {
        Ok(s) => s
            .parse()
            .map_err(|_| Error::validation(format!("bad LSG_SEED {s:?}"))),
        Err(_) => Ok(0),
    }
}

fn cmd_compile(rest: &[String]) -> Result<(), Error> {
    let args = parse_args(rest, &["report", "hnn", "out"])?;
    let [input] = args.positional.as_slice() else {
        return Err(Error::validation("compile takes exactly one input"));
    };
    let out_path = args
        .flags
        .get("out")
        .ok_or_else(|| Error::validation("compile needs -o <out.lsys>"))?;

    let (sys, provenance) = if input == "builtin:K" {
        let built = build_counterexample()?;
        (
            built.compiled.sys.clone(),
            serde_json::to_value(&built.provenance).expect("serializable"),
        )
    } else {
        let pres = Presentation::from_grp(&read(input)?)?;
        match recognize(&pres)? {
            Recognized::Lpc(lpc) => {
                let compiled = compile_lpc(&lpc)?;
                let report = serde_json::json!({
                    "passes": [{
                        "pass": "compile-lpc",
                        "predicted": compiled.forecast,
                        "measured": compiled.measured,
                    }],
                    "map": compiled
                        .map
                        .iter()
                        .map(|(s, w)| (s.clone(), w.to_token_string()))
                        .collect::<Vec<_>>(),
                });
                (compiled.sys, report)
            }
            Recognized::Ehlpc(e) => {
                let target = args.flags.get("hnn").ok_or_else(|| {
                    Error::validation(
                        "homogeneous input: pass --hnn <generator> to pick the HNN target",
                    )
                })?;
                let eh_forecast = forecast_ehlpc(&e);
                let (hlpc, map1) = lower_ehlpc(&e)?;
                let image = map1
                    .image(target)
                    .ok_or_else(|| Error::validation(format!("no generator {target:?}")))?;
                let image_name = match image.letters() {
                    [l] if !l.inv => l.gen.clone(),
                    _ => {
                        return Err(Error::validation(
                            "HNN target must map to a single generator",
                        ))
                    }
                };
                let lpc = hnn_z2(&hlpc, &image_name)?;
                let compiled = compile_lpc(&lpc)?;
                let full_map = map1.then(&compiled.map)?;
                let report = serde_json::json!({
                    "passes": [
                        {
                            "pass": "eliminate-noninvolutary",
                            "predicted": eh_forecast,
                            "measured": LpcSize::of_hlpc(&hlpc),
                        },
                        {
                            "pass": "hnn-z2",
                            "predicted": LpcSize {
                                variables: hlpc.num_vars() + 2,
                                rows: hlpc.num_rows() + 1,
                                triples: hlpc.num_triples() + 1,
                            },
                            "measured": LpcSize::of(&lpc),
                        },
                        {
                            "pass": "compile-lpc",
                            "predicted": compiled.forecast,
                            "measured": compiled.measured,
                        },
                    ],
                    "map": full_map
                        .iter()
                        .map(|(s, w)| (s.clone(), w.to_token_string()))
                        .collect::<Vec<_>>(),
                });
                (compiled.sys, report)
            }
        }
    };
    write_out(out_path, &sys.to_lsys())?;
    println!(
        "compiled: {} equations, {} variables -> {out_path}",
        sys.num_rows(),
        sys.num_cols()
    );
    if let Some(report_path) = args.flags.get("report") {
        write_out(
            report_path,
            &serde_json::to_string_pretty(&provenance).expect("serializable"),
        )?;
        println!("provenance -> {report_path}");
    }
    Ok(())
}

fn cmd_forecast(rest: &[String]) -> Result<(), Error> {
    let args = parse_args(rest, &[])?;
    let [input] = args.positional.as_slice() else {
        return Err(Error::validation("forecast takes exactly one input"));
    };
    if input == "builtin:K" {
        let built = build_counterexample()?;
        for pass in &built.provenance.passes {
            println!(
                "{}: predicted {} measured {}",
                pass.pass, pass.predicted, pass.measured
            );
        }
        return Ok(());
    }
    let pres = Presentation::from_grp(&read(input)?)?;
    match recognize(&pres)? {
        Recognized::Lpc(lpc) => {
            let predicted = forecast_lpc(&lpc);
            let compiled = compile_lpc(&lpc)?;
            println!(
                "compile-lpc: predicted {} variables / {} equations, measured {} / {}",
                predicted.variables,
                predicted.equations,
                compiled.measured.variables,
                compiled.measured.equations
            );
        }
        Recognized::Ehlpc(e) => {
            let predicted = forecast_ehlpc(&e);
            let (hlpc, _) = lower_ehlpc(&e)?;
            println!(
                "eliminate-noninvolutary: predicted {} variables / {} triples / {} rows, \
                 measured {} / {} / {}",
                predicted.variables,
                predicted.triples,
                predicted.rows,
                hlpc.num_vars(),
                hlpc.num_triples(),
                hlpc.num_rows()
            );
        }
    }
    Ok(())
}

fn cmd_defect(rest: &[String]) -> Result<(), Error> {
    let args = parse_args(rest, &[])?;
    let [rep_path, pres_path] = args.positional.as_slice() else {
        return Err(Error::validation("defect takes <rep.json> <pres.grp>"));
    };
    let rep = ApproxRep::from_json(&parse_json(&read(rep_path)?)?)?;
    let pres = Presentation::from_grp(&read(pres_path)?)?;
    let report = rep.defect(&pres)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report.to_json()).expect("serializable")
    );
    Ok(())
}

fn parse_json(text: &str) -> Result<serde_json::Value, Error> {
    serde_json::from_str(text).map_err(|e| Error::validation(format!("bad JSON: {e}")))
}

fn cmd_round(rest: &[String]) -> Result<(), Error> {
    let args = parse_args(rest, &["lemma", "pres", "delta", "target", "out"])?;
    let [rep_path] = args.positional.as_slice() else {
        return Err(Error::validation("round takes <rep.json>"));
    };
    let rep = ApproxRep::from_json(&parse_json(&read(rep_path)?)?)?;
    let lemma = args
        .flags
        .get("lemma")
        .ok_or_else(|| Error::validation("round needs --lemma"))?;
    let (out_rep, certificate) = match lemma.as_str() {
        "involution" => {
            let mut out = ApproxRep::new(rep.dim());
            let mut bounds = serde_json::Map::new();
            for (g, m) in rep.images() {
                let (rounded, bound) = round_unitary_to_involution(m)?;
                bounds.insert(g.clone(), serde_json::json!(bound));
                out.assign(g.clone(), rounded)?;
            }
            (
                out,
                serde_json::json!({"lemma": "involution", "bounds": bounds}),
            )
        }
        "commuting" => {
            let gens: Vec<String> = rep.generators().cloned().collect();
            let target = args
                .flags
                .get("target")
                .cloned()
                .or_else(|| gens.last().cloned())
                .ok_or_else(|| Error::validation("representation has no generators"))?;
            let family: Vec<&lsg_core::cmat::CMat> = gens
                .iter()
                .filter(|g| **g != target)
                .map(|g| rep.image(g).expect("listed"))
                .collect();
            let y = rep
                .image(&target)
                .ok_or_else(|| Error::validation(format!("no generator {target:?}")))?;
            let (z, bound) = round_commuting(&family, y, 1e-6)?;
            let mut out = rep.clone();
            out.assign(target.clone(), z)?;
            (
                out,
                serde_json::json!({"lemma": "commuting", "target": target, "bound": bound}),
            )
        }
        "abelian" => {
            let gens: Vec<String> = rep.generators().filter(|g| *g != J).cloned().collect();
            let stabilized = stabilize_abelian(&rep, &gens)?;
            let mut out = stabilized.rep.clone();
            if let Some(jm) = rep.image(J) {
                out.assign(J, jm.clone())?;
            }
            (
                out,
                serde_json::json!({
                    "lemma": "abelian",
                    "constant": stabilized.constant,
                    "max_move": stabilized.max_move,
                }),
            )
        }
        "splitJ" => {
            let pres_path = args
                .flags
                .get("pres")
                .ok_or_else(|| Error::validation("splitJ needs --pres <pres.grp>"))?;
            let delta: f64 = args
                .flags
                .get("delta")
                .ok_or_else(|| Error::validation("splitJ needs --delta"))?
                .parse()
                .map_err(|_| Error::validation("bad --delta"))?;
            let pres = Presentation::from_grp(&read(pres_path)?)?;
            let split = split_on_j(&rep, &pres, delta)?;
            let cert = serde_json::json!({
                "lemma": "splitJ",
                "certified": split.certified,
                "measured": split.measured,
                "dim": split.rep.dim(),
            });
            (split.rep, cert)
        }
        other => {
            return Err(Error::validation(format!(
                "unknown lemma {other:?}; use involution|commuting|abelian|splitJ"
            )))
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&certificate).expect("serializable")
    );
    if let Some(out_path) = args.flags.get("out") {
        write_out(
            out_path,
            &serde_json::to_string(&out_rep.to_json()).expect("serializable"),
        )?;
        println!("rounded representation -> {out_path}");
    }
    Ok(())
}

fn cmd_strategy(rest: &[String]) -> Result<(), Error> {
    let args = parse_args(rest, &["out"])?;
    let [rep_path, sys_path] = args.positional.as_slice() else {
        return Err(Error::validation("strategy takes <rep.json> <sys.lsys>"));
    };
    let out_path = args
        .flags
        .get("out")
        .ok_or_else(|| Error::validation("strategy needs -o <strat.json>"))?;
    let rep = ApproxRep::from_json(&parse_json(&read(rep_path)?)?)?;
    let sys = BinaryLinearSystem::from_lsys(&read(sys_path)?)?;
    let strategy = strategy_from_rep(&rep, &sys, &default_names(sys.num_cols()))?;
    write_out(
        out_path,
        &serde_json::to_string(&strategy.to_json()).expect("serializable"),
    )?;
    println!("strategy (dim {}) -> {out_path}", strategy.dim);
    Ok(())
}

fn cmd_evaluate(rest: &[String]) -> Result<(), Error> {
    let args = parse_args(rest, &["out"])?;
    let [strat_path, sys_path] = args.positional.as_slice() else {
        return Err(Error::validation("evaluate takes <strat.json> <sys.lsys>"));
    };
    let strategy = ObservableStrategy::from_json(&parse_json(&read(strat_path)?)?)?;
    let sys = BinaryLinearSystem::from_lsys(&read(sys_path)?)?;
    let game = Game::from_system(&sys)?;
    strategy.validate(&game, 1e-6)?;
    let stats = win_stats(&strategy, &game)?;
    let csv = win_stats_csv(&stats);
    match args.flags.get("out") {
        Some(path) => {
            write_out(path, &csv)?;
            println!("win statistics -> {path}");
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_homs(rest: &[String]) -> Result<(), Error> {
    let args = parse_args(rest, &["degree", "generator"])?;
    let [pres_path] = args.positional.as_slice() else {
        return Err(Error::validation("homs takes <pres.grp>"));
    };
    let degree: usize = args
        .flags
        .get("degree")
        .ok_or_else(|| Error::validation("homs needs --degree"))?
        .parse()
        .map_err(|_| Error::validation("bad --degree"))?;
    let pres = Presentation::from_grp(&read(pres_path)?)?;
    let watched = args
        .flags
        .get("generator")
        .cloned()
        .or_else(|| pres.generators().first().cloned())
        .ok_or_else(|| Error::validation("presentation has no generators"))?;
    let homs = enumerate_homs(&pres, degree)?;
    let mut image_counts: BTreeMap<String, usize> = BTreeMap::new();
    for hom in &homs {
        let image = hom
            .get(&watched)
            .ok_or_else(|| Error::validation(format!("no generator {watched:?}")))?;
        let key = format!("{image:?}");
        *image_counts.entry(key).or_insert(0) += 1;
    }
    println!("homomorphisms into S_{degree}: {}", homs.len());
    println!("images of {watched}:");
    for (image, count) in image_counts {
        println!("  {image}: {count}");
    }
    Ok(())
}

fn cmd_selftest(rest: &[String]) -> Result<(), Error> {
    let args = parse_args(rest, &["seed"])?;
    if !args.positional.is_empty() {
        return Err(Error::validation("selftest takes no positional arguments"));
    }
    let seed = seed_from(&args.flags)?;
    let outcomes = lsg_core::selftest::run_all(seed);
    let mut all_pass = true;
    for o in &outcomes {
        println!(
            "criterion {}: {} ... {} ({:.1}s)",
            o.id,
            o.name,
            if o.pass { "PASS" } else { "FAIL" },
            o.seconds
        );
        println!("  {}", o.detail);
        all_pass &= o.pass;
    }
    if all_pass {
        println!("selftest: all {} criteria pass", outcomes.len());
        Ok(())
    } else {
        Err(Error::numeric("selftest: at least one criterion failed"))
    }
}
