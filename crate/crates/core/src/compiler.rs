//! Lowering passes: embedding a linear-plus-conjugacy group into a nice one,
//! replacing conjugacies by linear gadgets, eliminating non-involutary
//! generators from extended homogeneous groups, and the end-to-end flagship
//! pipeline. Every pass carries a generator map, and every pass's measured
//! output size is checked against the closed-form forecast; a mismatch is a
//! hard error, never a warning.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::BinaryLinearSystem;
use crate::presentation::{fresh_name, hnn_z2, k_group, Ehlpc, Hlpc, Lpc};
use crate::word::{GeneratorMap, GroupWord, J};

/// Measured or forecast size of a plain linear system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SystemSize {
    pub variables: usize,
    pub equations: usize,
}

/// Measured or forecast size of linear-plus-conjugacy data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LpcSize {
    pub variables: usize,
    pub rows: usize,
    pub triples: usize,
}

impl LpcSize {
    pub fn of(g: &Lpc) -> Self {
        Self {
            variables: g.num_vars(),
            rows: g.num_rows(),
            triples: g.num_triples(),
        }
    }

    pub fn of_hlpc(g: &Hlpc) -> Self {
        Self {
            variables: g.num_vars(),
            rows: g.num_rows(),
            triples: g.num_triples(),
        }
    }
}

/// Closed-form size of the compiled solution group of an (n, m, c)
/// linear-plus-conjugacy group: `11n + 8c + 1` variables and `8n + m + 7c`
/// equations.
pub fn forecast_lpc(g: &Lpc) -> SystemSize {
    let (n, m, c) = (g.num_vars(), g.num_rows(), g.num_triples());
    SystemSize {
        variables: 11 * n + 8 * c + 1,
        equations: 8 * n + m + 7 * c,
    }
}

/// Closed-form size of the homogeneous group produced by eliminating all
/// non-involutary generators:
/// `n' = n + 2ℓ + C(ℓ,2) + |C1| + sum(L)` and
/// `|C'| = |C0| + 2|C1| + 2·C(ℓ,2) + sum(L) + #(L)`; the row count is
/// unchanged.
pub fn forecast_ehlpc(g: &Ehlpc) -> LpcSize {
    let n = g.num_x();
    let ell = g.num_y();
    let choose2 = ell * ell.saturating_sub(1) / 2;
    let sum_l = g.sum_l() as usize;
    LpcSize {
        variables: n + 2 * ell + choose2 + g.c1.len() + sum_l,
        rows: g.a.num_rows(),
        triples: g.c0.len() + 2 * g.c1.len() + 2 * choose2 + sum_l + g.count_l(),
    }
}

/// Whether every conjugacy triple's last two variables co-occur in some row.
pub fn is_nice(g: &Lpc) -> bool {
    g.triples.iter().all(|&[_, jv, k]| {
        (0..g.num_rows()).any(|r| {
            let row = g.sys.row(r);
            row.get(jv) && row.get(k)
        })
    })
}

fn push_fresh(names: &mut Vec<String>, base: String) -> String {
    let name = fresh_name(names, &base);
    names.push(name.clone());
    name
}

/// Embeds a linear-plus-conjugacy group into a nice one.
///
/// Per source variable `x_j` this adds involutions `y_j, z_j, w_j`, plus one
/// global `f`, with linear rows `x_j y_j z_j = e` and `x_j f w_j = e` and
/// conjugacies `f y_j f = z_j`. Each conjugacy triple `(i, j, k)` contributes
/// an ancilla row `g y_j z_k = e` and the conjugacy `w_i y_j w_i = z_k`.
/// The generator map fixes every source variable.
pub fn nice_embed(g: &Lpc) -> Result<(Lpc, GeneratorMap)> {
    let n = g.num_vars();
    let c = g.num_triples();
    let mut names = g.names.clone();
    let y: Vec<String> = g
        .names
        .clone()
        .iter()
        .map(|s| push_fresh(&mut names, format!("y.{s}")))
        .collect();
    let z: Vec<String> = g
        .names
        .clone()
        .iter()
        .map(|s| push_fresh(&mut names, format!("z.{s}")))
        .collect();
    let w: Vec<String> = g
        .names
        .clone()
        .iter()
        .map(|s| push_fresh(&mut names, format!("w.{s}")))
        .collect();
    let f = push_fresh(&mut names, "f".to_string());
    let gs: Vec<String> = (0..c)
        .map(|t| push_fresh(&mut names, format!("g.{t}")))
        .collect();

    let idx_of = |name: &String| names.iter().position(|x| x == name).unwrap();
    let y_idx: Vec<usize> = y.iter().map(idx_of).collect();
    let z_idx: Vec<usize> = z.iter().map(idx_of).collect();
    let w_idx: Vec<usize> = w.iter().map(idx_of).collect();
    let f_idx = idx_of(&f);
    let g_idx: Vec<usize> = gs.iter().map(idx_of).collect();

    let mut supports: Vec<Vec<usize>> = (0..g.num_rows())
        .map(|i| g.sys.row_support(i))
        .collect::<Result<_>>()?;
    let mut b: Vec<bool> = (0..g.num_rows()).map(|i| g.sys.rhs(i)).collect();
    for j in 0..n {
        supports.push(vec![j, y_idx[j], z_idx[j]]);
        b.push(false);
    }
    for j in 0..n {
        supports.push(vec![j, f_idx, w_idx[j]]);
        b.push(false);
    }
    for (t, &[_, jv, k]) in g.triples.iter().enumerate() {
        supports.push(vec![g_idx[t], y_idx[jv], z_idx[k]]);
        b.push(false);
    }
    let sys = BinaryLinearSystem::from_supports(names.len(), &supports, &b)?;

    let mut triples: Vec<[usize; 3]> = (0..n).map(|j| [f_idx, y_idx[j], z_idx[j]]).collect();
    for &[i, jv, k] in &g.triples {
        triples.push([w_idx[i], y_idx[jv], z_idx[k]]);
    }

    let out = Lpc::new(sys, triples, names)?;
    let mut map = GeneratorMap::identity(&g.names);
    map.insert(J, GroupWord::gen(J));
    Ok((out, map))
}

/// Replaces every conjugacy triple of a nice group by the seven-variable,
/// six-equation gadget, leaving a plain linear system. Rejects inputs that
/// fail the niceness predicate.
pub fn gadgetize(g: &Lpc) -> Result<(BinaryLinearSystem, Vec<String>, GeneratorMap)> {
    if !is_nice(g) {
        return Err(Error::validation(
            "gadgetize requires a nice linear-plus-conjugacy group",
        ));
    }
    let mut names = g.names.clone();
    let mut supports: Vec<Vec<usize>> = (0..g.num_rows())
        .map(|i| g.sys.row_support(i))
        .collect::<Result<_>>()?;
    let mut b: Vec<bool> = (0..g.num_rows()).map(|i| g.sys.rhs(i)).collect();
    for (t, &[i, jv, k]) in g.triples.iter().enumerate() {
        let q: Vec<usize> = (1..=7)
            .map(|slot| {
                push_fresh(&mut names, format!("q.{t}.{slot}"));
                names.len() - 1
            })
            .collect();
        let rows = [
            vec![i, q[0], q[1]],
            vec![jv, q[1], q[2]],
            vec![q[2], q[3], q[4]],
            vec![i, q[4], q[5]],
            vec![k, q[5], q[6]],
            vec![q[0], q[3], q[6]],
        ];
        for row in rows {
            supports.push(row);
            b.push(false);
        }
    }
    let sys = BinaryLinearSystem::from_supports(names.len(), &supports, &b)?;
    let mut map = GeneratorMap::identity(&g.names);
    map.insert(J, GroupWord::gen(J));
    Ok((sys, names, map))
}

/// The compiled output of [`compile_lpc`].
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub sys: BinaryLinearSystem,
    pub names: Vec<String>,
    pub map: GeneratorMap,
    pub measured: SystemSize,
    pub forecast: SystemSize,
}

/// Full lowering of a linear-plus-conjugacy group to a solution-group
/// system: nice embedding followed by gadgets. The measured output size must
/// equal the closed-form forecast exactly.
pub fn compile_lpc(g: &Lpc) -> Result<CompiledSystem> {
    let forecast = forecast_lpc(g);
    let (nice, map1) = nice_embed(g)?;
    let (sys, names, map2) = gadgetize(&nice)?;
    let map = map1.then(&map2)?;
    let measured = SystemSize {
        variables: sys.num_cols(),
        equations: sys.num_rows(),
    };
    if measured != forecast {
        return Err(Error::SizeMismatch(format!(
            "compile_lpc: measured {measured:?} differs from forecast {forecast:?}"
        )));
    }
    Ok(CompiledSystem {
        sys,
        names,
        map,
        measured,
        forecast,
    })
}

/// Layout of one elimination step, consumed by the representation lifts.
#[derive(Clone, Debug)]
pub struct PeelLayout {
    pub z: String,
    pub w: String,
    /// Processed `(0, j, k)` conjugacies: (x_j name, x_k name, ancilla name).
    pub c1_processed: Vec<(String, String, String)>,
    /// Power-relation chains: one per `L_{i,0}` entry.
    pub chains: Vec<ChainLayout>,
    /// Original indices (>= 1) of the surviving generators given a
    /// commutation conjugacy with `z`.
    pub commuted: Vec<usize>,
}

/// One eliminated power relation `y_i y_1 y_i^{-1} = y_1^v`.
#[derive(Clone, Debug)]
pub struct ChainLayout {
    /// Original index of the acting generator (>= 1).
    pub i: usize,
    pub v: u32,
    /// Ancilla names, innermost first (`v - 1` of them).
    pub ancillas: Vec<String>,
    /// Defining word of each ancilla over `{z, w}`.
    pub words: Vec<GroupWord>,
    /// Name equal to `w (z w)^{v-1}`: the last ancilla, or `w` when `v = 1`.
    pub final_target: String,
}

/// Alternating palindrome `w (z w)^{v-1}` built outward from its center
/// letter; entry `s` is the word after `s` conjugations.
fn chain_words(z: &str, w: &str, v: u32) -> Vec<GroupWord> {
    let letter = |pos: i64| {
        if pos.rem_euclid(2) == 0 {
            crate::word::Letter::new(w)
        } else {
            crate::word::Letter::new(z)
        }
    };
    let center = i64::from(v) - 1;
    let mut words = Vec::new();
    let mut current = GroupWord::from_letters(vec![letter(center)]);
    for s in 1..i64::from(v) {
        current = GroupWord::from_letters(
            std::iter::once(letter(center - s))
                .chain(current.letters().iter().cloned())
                .chain(std::iter::once(letter(center - s)))
                .collect(),
        );
        words.push(current.clone());
    }
    words
}

/// Peels the first non-involutary generator off an extended homogeneous
/// group: `y_1 = z w` with fresh involutions `z, w`; conjugacies
/// `(1, j, k)` become `w x_j w = Z` and `z Z z = x_k`; each power relation
/// `y_i y_1 y_i^{-1} = y_1^v` becomes a chain of `v - 1` ancillas plus a
/// final conjugacy; the commutations `z y_i = y_i z` survive as conjugacies
/// on the next level.
pub fn lower_one(g: &Ehlpc, iteration: usize) -> Result<(Ehlpc, GeneratorMap, PeelLayout)> {
    if g.num_y() == 0 {
        return Err(Error::validation("lower_one: no non-involutary generators"));
    }
    let ell = g.num_y();
    let mut x_names = g.x_names.clone();
    let z = push_fresh(&mut x_names, format!("z.{iteration}"));
    let w = push_fresh(&mut x_names, format!("w.{iteration}"));
    let z_idx = x_names.len() - 2;
    let w_idx = x_names.len() - 1;

    let mut c0 = g.c0.clone();
    let mut c1_next: Vec<(usize, usize, usize)> = Vec::new();
    let mut c1_processed = Vec::new();

    // Surviving conjugacies shift down one level.
    for &(yi, xj, xk) in &g.c1 {
        if yi >= 1 {
            c1_next.push((yi - 1, xj, xk));
        }
    }
    // Conjugacies acted on by the peeled generator.
    for (t, &(yi, xj, xk)) in g.c1.iter().enumerate() {
        if yi != 0 {
            continue;
        }
        let anc = push_fresh(&mut x_names, format!("Z.{iteration}.{t}"));
        let anc_idx = x_names.len() - 1;
        c0.push([w_idx, xj, anc_idx]);
        c0.push([z_idx, anc_idx, xk]);
        c1_processed.push((
            g.x_names[xj].clone(),
            g.x_names[xk].clone(),
            anc,
        ));
    }
    // Power relations on the peeled generator.
    let mut l_next: Vec<(usize, usize, u32)> = Vec::new();
    let mut chains = Vec::new();
    let mut chain_finals: Vec<(usize, usize)> = Vec::new();
    for (e, &(i, jv, v)) in g.l.iter().enumerate() {
        if jv >= 1 {
            l_next.push((i - 1, jv - 1, v));
            continue;
        }
        let words = chain_words(&z, &w, v);
        let mut ancillas = Vec::new();
        let mut prev_idx = if v % 2 == 1 { w_idx } else { z_idx };
        for (s, _word) in words.iter().enumerate() {
            let anc = push_fresh(&mut x_names, format!("W.{iteration}.{e}.{s}"));
            let anc_idx = x_names.len() - 1;
            // Conjugator alternates outward from the center letter.
            let conj_idx = if (i64::from(v) - 1 - (s as i64 + 1)).rem_euclid(2) == 0 {
                w_idx
            } else {
                z_idx
            };
            c0.push([conj_idx, prev_idx, anc_idx]);
            prev_idx = anc_idx;
            ancillas.push(anc);
        }
        let final_idx = prev_idx;
        chain_finals.push((i - 1, final_idx));
        chains.push(ChainLayout {
            i,
            v,
            ancillas,
            words,
            final_target: x_names[final_idx].clone(),
        });
    }
    for &(i, final_idx) in &chain_finals {
        c1_next.push((i, w_idx, final_idx));
    }
    // Commutations of the surviving generators with z.
    let mut commuted = Vec::new();
    for i in 1..ell {
        c1_next.push((i - 1, z_idx, z_idx));
        commuted.push(i);
    }

    let supports: Vec<Vec<usize>> = (0..g.a.num_rows())
        .map(|i| g.a.row_support(i))
        .collect::<Result<_>>()?;
    let b = vec![false; g.a.num_rows()];
    let a = BinaryLinearSystem::from_supports(x_names.len(), &supports, &b)?;

    let y_names: Vec<String> = g.y_names[1..].to_vec();
    let next = Ehlpc::new(a, c0, c1_next, l_next, x_names, y_names)?;

    let mut map = GeneratorMap::identity(&g.x_names);
    map.insert(
        g.y_names[0].clone(),
        GroupWord::gen(&z).concat(&GroupWord::gen(&w)),
    );
    for name in &g.y_names[1..] {
        map.insert(name.clone(), GroupWord::gen(name));
    }
    let layout = PeelLayout {
        z,
        w,
        c1_processed,
        chains,
        commuted,
    };
    Ok((next, map, layout))
}

/// Eliminates every non-involutary generator, one peel per iteration.
/// The measured output size must equal the closed-form forecast exactly.
pub fn lower_ehlpc(g: &Ehlpc) -> Result<(Hlpc, GeneratorMap)> {
    let forecast = forecast_ehlpc(g);
    let mut current = g.clone();
    let mut map = GeneratorMap::identity(&g.x_names);
    for name in &g.y_names {
        map.insert(name.clone(), GroupWord::gen(name));
    }
    let mut iteration = 1usize;
    while current.num_y() > 0 {
        let (next, step_map, _) = lower_one(&current, iteration)?;
        map = map.then(&step_map)?;
        current = next;
        iteration += 1;
    }
    let out = Hlpc::new(current.a, current.c0, current.x_names)?;
    let measured = LpcSize::of_hlpc(&out);
    if measured != forecast {
        return Err(Error::SizeMismatch(format!(
            "lower_ehlpc: measured {measured:?} differs from forecast {forecast:?}"
        )));
    }
    Ok((out, map))
}

/// Sizes recorded after each pass of the flagship pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct PassRecord {
    pub pass: String,
    pub predicted: serde_json::Value,
    pub measured: serde_json::Value,
}

/// Where the designated generators ended up in the final system.
#[derive(Clone, Debug, Serialize)]
pub struct DesignatedImages {
    pub a_image: String,
    pub t: String,
    pub z_ancilla: String,
    /// Rows of the final system whose right-hand side is 1.
    pub j_rows: Vec<usize>,
}

/// Pass-by-pass record of the flagship build.
#[derive(Clone, Debug, Serialize)]
pub struct ProvenanceReport {
    pub passes: Vec<PassRecord>,
    pub designated: DesignatedImages,
    /// Composed generator map from the source group to the final system.
    pub map: Vec<(String, String)>,
}

/// The fully built flagship pipeline.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub source: Ehlpc,
    pub designated: String,
    pub hlpc: Hlpc,
    pub hlpc_map: GeneratorMap,
    pub lpc: Lpc,
    pub compiled: CompiledSystem,
    pub provenance: ProvenanceReport,
}

/// Runs the whole flagship pipeline: the source group, elimination of its
/// non-involutary generators, the Z₂-HNN step on the designated generator's
/// image, and the final lowering to a solution-group system.
pub fn build_counterexample() -> Result<Counterexample> {
    let (k, designated) = k_group();
    let mut passes = Vec::new();
    passes.push(PassRecord {
        pass: "source".into(),
        predicted: serde_json::json!({
            "x": k.num_x(), "y": k.num_y(),
            "c1": k.c1.len(), "sum_l": k.sum_l(), "rows": k.a.num_rows(),
        }),
        measured: serde_json::json!({
            "x": k.num_x(), "y": k.num_y(),
            "c1": k.c1.len(), "sum_l": k.sum_l(), "rows": k.a.num_rows(),
        }),
    });

    let eh_forecast = forecast_ehlpc(&k);
    let (hlpc, hlpc_map) = lower_ehlpc(&k)?;
    passes.push(PassRecord {
        pass: "eliminate-noninvolutary".into(),
        predicted: serde_json::to_value(eh_forecast).unwrap(),
        measured: serde_json::to_value(LpcSize::of_hlpc(&hlpc)).unwrap(),
    });

    let a_image_word = hlpc_map
        .image(&designated)
        .ok_or_else(|| Error::validation("designated generator lost its image"))?;
    let a_image = match a_image_word.letters() {
        [letter] if !letter.inv => letter.gen.clone(),
        _ => {
            return Err(Error::validation(
                "designated generator must map to a single generator",
            ))
        }
    };
    let lpc = hnn_z2(&hlpc, &a_image)?;
    let hnn_predicted = LpcSize {
        variables: hlpc.num_vars() + 2,
        rows: hlpc.num_rows() + 1,
        triples: hlpc.num_triples() + 1,
    };
    passes.push(PassRecord {
        pass: "hnn-z2".into(),
        predicted: serde_json::to_value(hnn_predicted).unwrap(),
        measured: serde_json::to_value(LpcSize::of(&lpc)).unwrap(),
    });

    let compiled = compile_lpc(&lpc)?;
    passes.push(PassRecord {
        pass: "compile-lpc".into(),
        predicted: serde_json::to_value(compiled.forecast).unwrap(),
        measured: serde_json::to_value(compiled.measured).unwrap(),
    });

    // HNN names sit at positions n and n+1 of the LPC variable list.
    let t_name = lpc.names[hlpc.num_vars()].clone();
    let z_name = lpc.names[hlpc.num_vars() + 1].clone();
    let j_rows: Vec<usize> = (0..compiled.sys.num_rows())
        .filter(|&i| compiled.sys.rhs(i))
        .collect();

    let hnn_map = GeneratorMap::identity(&hlpc.names);
    let full_map = hlpc_map.then(&hnn_map)?.then(&compiled.map)?;
    let map_table: Vec<(String, String)> = full_map
        .iter()
        .map(|(src, img)| (src.clone(), img.to_token_string()))
        .collect();
    let provenance = ProvenanceReport {
        passes,
        designated: DesignatedImages {
            a_image,
            t: t_name,
            z_ancilla: z_name,
            j_rows,
        },
        map: map_table,
    };
    Ok(Counterexample {
        source: k,
        designated,
        hlpc,
        hlpc_map,
        lpc,
        compiled,
        provenance,
    })
}
