//! Group presentations over Z₂ and the typed lowering hierarchy: solution
//! groups, linear-plus-conjugacy (LPC), homogeneous (HLPC), and extended
//! homogeneous (EHLPC) presentations.
//!
//! A presentation over Z₂ always carries the distinguished central involution
//! `J` together with its closure relations (`J^2 = e` and `[J, s] = e` for
//! every other generator), materialized exactly once each. Homogeneous
//! presentations carry no `J` at all.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::BinaryLinearSystem;
use crate::word::{GroupWord, J};

/// A labelled relation `word = e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub label: String,
    pub word: GroupWord,
}

impl Relation {
    pub fn new(label: impl Into<String>, word: GroupWord) -> Self {
        Self {
            label: label.into(),
            word,
        }
    }
}

/// A finite presentation, either plain or over Z₂.
///
/// When `over_z2` is set, `J` is a declared generator and the relation list
/// contains the Z₂-closure relations exactly once each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    involutary: BTreeSet<String>,
    relations: Vec<Relation>,
    over_z2: bool,
}

impl Presentation {
    /// Plain presentation (no `J`). Involutary generators get their `s^2 = e`
    /// relation emitted here; `relations` holds everything else.
    pub fn plain(
        generators: Vec<String>,
        involutary: Vec<String>,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        let p = Self::assemble(generators, involutary, relations, false)?;
        Ok(p)
    }

    /// Presentation over Z₂: appends `J` and the closure relations.
    pub fn over_z2(
        generators: Vec<String>,
        involutary: Vec<String>,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        Self::assemble(generators, involutary, relations, true)
    }

    fn assemble(
        generators: Vec<String>,
        involutary: Vec<String>,
        mut relations: Vec<Relation>,
        over_z2: bool,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if g == J {
                return Err(Error::validation(
                    "generator name J is reserved for the central involution",
                ));
            }
            if !seen.insert(g.clone()) {
                return Err(Error::validation(format!("duplicate generator {g:?}")));
            }
        }
        let involutary: BTreeSet<String> = involutary.into_iter().collect();
        for g in &involutary {
            if !seen.contains(g) {
                return Err(Error::validation(format!(
                    "involutary generator {g:?} not declared"
                )));
            }
        }
        let mut inv_relations: Vec<Relation> = involutary
            .iter()
            .map(|g| Relation::new(format!("inv:{g}"), GroupWord::gen(g).concat(&GroupWord::gen(g))))
            .collect();
        // Involutary relations come first in declaration order, then the rest.
        let mut ordered: Vec<Relation> = Vec::new();
        inv_relations.sort_by(|a, b| a.label.cmp(&b.label));
        ordered.append(&mut inv_relations);
        ordered.append(&mut relations);
        let mut generators = generators;
        if over_z2 {
            ordered.push(Relation::new(
                "J2",
                GroupWord::gen(J).concat(&GroupWord::gen(J)),
            ));
            for g in &generators {
                ordered.push(Relation::new(
                    format!("Jcomm:{g}"),
                    GroupWord::commutator(&GroupWord::gen(J), &GroupWord::gen(g)),
                ));
            }
            generators.push(J.to_string());
        }
        let declared: BTreeSet<&String> = generators.iter().collect();
        for rel in &ordered {
            for letter in rel.word.letters() {
                if !declared.contains(&letter.gen) {
                    return Err(Error::validation(format!(
                        "relation {:?} mentions undeclared generator {:?}",
                        rel.label, letter.gen
                    )));
                }
            }
        }
        let mut involutary = involutary;
        if over_z2 {
            involutary.insert(J.to_string());
        }
        Ok(Self {
            generators,
            involutary,
            relations: ordered,
            over_z2,
        })
    }

    /// All generator names, `J` last when present.
    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    /// Generator names excluding `J`.
    pub fn generators_without_j(&self) -> Vec<String> {
        self.generators.iter().filter(|g| *g != J).cloned().collect()
    }

    pub fn is_involutary(&self, g: &str) -> bool {
        self.involutary.contains(g)
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn has_j(&self) -> bool {
        self.over_z2
    }

    pub fn relation(&self, label: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.label == label)
    }

    /// Length of the longest relation word.
    pub fn longest_relation_len(&self) -> usize {
        self.relations.iter().map(|r| r.word.len()).max().unwrap_or(0)
    }

    /// Serializes to the `.grp` text format: `gen <name> [inv]` lines
    /// followed by `rel <word>` lines. `J` is implicit (it appears only in
    /// relation tokens).
    pub fn to_grp(&self) -> String {
        let mut out = String::new();
        for g in &self.generators {
            if g == J {
                continue;
            }
            if self.involutary.contains(g) {
                let _ = writeln!(out, "gen {g} inv");
            } else {
                let _ = writeln!(out, "gen {g}");
            }
        }
        for rel in &self.relations {
            let _ = writeln!(out, "rel {}", rel.word.to_token_string());
        }
        out
    }

    /// JSON mirror of the `.grp` fields: generator names with involution
    /// flags, and relation words in token form.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "over_z2": self.over_z2,
            "generators": self
                .generators
                .iter()
                .filter(|g| *g != J)
                .map(|g| {
                    serde_json::json!({
                        "name": g,
                        "involutary": self.involutary.contains(g),
                    })
                })
                .collect::<Vec<_>>(),
            "relations": self
                .relations
                .iter()
                .map(|r| serde_json::json!({"label": r.label, "word": r.word.to_token_string()}))
                .collect::<Vec<_>>(),
        })
    }

    /// Parses the `.grp` text format. A presentation is over Z₂ exactly when
    /// some relation mentions `J`; the closure relations are then recognized
    /// (and deduplicated) rather than duplicated.
    pub fn from_grp(text: &str) -> Result<Self> {
        let mut generators = Vec::new();
        let mut involutary = Vec::new();
        let mut words = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("gen") => {
                    let name = parts
                        .next()
                        .ok_or_else(|| {
                            Error::validation(format!("line {}: gen needs a name", lineno + 1))
                        })?
                        .to_string();
                    match parts.next() {
                        None => {}
                        Some("inv") => involutary.push(name.clone()),
                        Some(tok) => {
                            return Err(Error::validation(format!(
                                "line {}: unexpected token {tok:?}",
                                lineno + 1
                            )))
                        }
                    }
                    generators.push(name);
                }
                Some("rel") => {
                    let rest = line[3..].trim();
                    words.push(GroupWord::parse_tokens(rest)?);
                }
                Some(tok) => {
                    return Err(Error::validation(format!(
                        "line {}: unknown directive {tok:?}",
                        lineno + 1
                    )))
                }
                None => unreachable!(),
            }
        }
        let over_z2 = words
            .iter()
            .any(|w| w.letters().iter().any(|l| l.gen == J));
        // Drop closure relations and involutary squares; `assemble` re-adds
        // them canonically, keeping the "exactly once" invariant.
        let inv_set: BTreeSet<&String> = involutary.iter().collect();
        let mut relations = Vec::new();
        let mut counter = 0usize;
        for w in words {
            if over_z2 && is_closure_relation(&w) {
                continue;
            }
            if is_involutary_square(&w, &inv_set) {
                continue;
            }
            relations.push(Relation::new(format!("rel:{counter}"), w));
            counter += 1;
        }
        Self::assemble(generators, involutary, relations, over_z2)
    }
}

fn is_closure_relation(w: &GroupWord) -> bool {
    let r = w.reduce();
    let ls = r.letters();
    // J^2 (or J J^-1 variants collapse under reduce, so only J J counts).
    if ls.len() == 2 && ls.iter().all(|l| l.gen == J) {
        return true;
    }
    // [J, s] in any of its cyclic spellings: 4 letters, two J's, two of one
    // other generator.
    if ls.len() == 4 {
        let js = ls.iter().filter(|l| l.gen == J).count();
        let others: BTreeSet<&String> = ls.iter().filter(|l| l.gen != J).map(|l| &l.gen).collect();
        if js == 2 && others.len() == 1 {
            return true;
        }
    }
    false
}

fn is_involutary_square(w: &GroupWord, involutary: &BTreeSet<&String>) -> bool {
    let ls = w.letters();
    ls.len() == 2
        && ls[0].gen == ls[1].gen
        && involutary.contains(&ls[0].gen)
        && ls[0].inv == ls[1].inv
}

/// Default variable names `x1..xn` for bare linear systems.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("x{j}")).collect()
}

/// The solution group Γ(A, b) of a linear system, as a presentation over Z₂:
/// involutions `x_j^2 = e`, one product relation `∏_{j∈V_i} x_j = J^{b_i}`
/// per row, and one commutation per unordered variable pair sharing a row.
pub fn solution_group(sys: &BinaryLinearSystem, names: &[String]) -> Result<Presentation> {
    if names.len() != sys.num_cols() {
        return Err(Error::validation(format!(
            "{} names supplied for {} variables",
            names.len(),
            sys.num_cols()
        )));
    }
    let mut relations = Vec::new();
    for i in 0..sys.num_rows() {
        let support = sys.row_support(i)?;
        let mut word = GroupWord::empty();
        for &jv in &support {
            word = word.concat(&GroupWord::gen(&names[jv]));
        }
        if sys.rhs(i) {
            word = word.concat(&GroupWord::gen_inv(J));
        }
        relations.push(Relation::new(format!("row:{i}"), word));
    }
    let mut seen_pairs = BTreeSet::new();
    for i in 0..sys.num_rows() {
        let support = sys.row_support(i)?;
        for a in 0..support.len() {
            for b in a + 1..support.len() {
                let pair = (support[a], support[b]);
                if seen_pairs.insert(pair) {
                    relations.push(Relation::new(
                        format!("comm:{}.{}", names[pair.0], names[pair.1]),
                        GroupWord::commutator(
                            &GroupWord::gen(&names[pair.0]),
                            &GroupWord::gen(&names[pair.1]),
                        ),
                    ));
                }
            }
        }
    }
    Presentation::over_z2(names.to_vec(), names.to_vec(), relations)
}

/// Linear-plus-conjugacy data: a solution group together with conjugacy
/// relations `x_i x_j x_i = x_k` for each triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lpc {
    pub sys: BinaryLinearSystem,
    pub triples: Vec<[usize; 3]>,
    pub names: Vec<String>,
}

impl Lpc {
    pub fn new(
        sys: BinaryLinearSystem,
        triples: Vec<[usize; 3]>,
        names: Vec<String>,
    ) -> Result<Self> {
        let n = sys.num_cols();
        if names.len() != n {
            return Err(Error::validation("LPC name count mismatch"));
        }
        for t in &triples {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::validation(format!(
                    "conjugacy triple {t:?} out of range (n={n})"
                )));
            }
        }
        Ok(Self {
            sys,
            triples,
            names,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.sys.num_cols()
    }

    pub fn num_rows(&self) -> usize {
        self.sys.num_rows()
    }

    pub fn num_triples(&self) -> usize {
        self.triples.len()
    }

    /// Expands to an explicit presentation over Z₂: the solution group of
    /// the system plus one `x_i x_j x_i x_k^{-1}` relation per triple.
    pub fn presentation(&self) -> Result<Presentation> {
        let base = solution_group(&self.sys, &self.names)?;
        let mut relations: Vec<Relation> = base
            .relations()
            .iter()
            .filter(|r| {
                !r.label.starts_with("inv:") && r.label != "J2" && !r.label.starts_with("Jcomm:")
            })
            .cloned()
            .collect();
        for (t, &[i, jv, k]) in self.triples.iter().enumerate() {
            relations.push(Relation::new(
                format!("conj:{t}"),
                conjugacy_word(&self.names[i], &self.names[jv], &self.names[k], false),
            ));
        }
        Presentation::over_z2(self.names.clone(), self.names.clone(), relations)
    }
}

/// Relation word for `u v u^{±1} = w`, rendered as `u v u^{±1} w^{-1}`.
/// For involutary conjugators the middle exponent is +1.
pub fn conjugacy_word(u: &str, v: &str, w: &str, invert_back: bool) -> GroupWord {
    let back = if invert_back {
        GroupWord::gen_inv(u)
    } else {
        GroupWord::gen(u)
    };
    GroupWord::gen(u)
        .concat(&GroupWord::gen(v))
        .concat(&back)
        .concat(&GroupWord::gen_inv(w))
}

/// Homogeneous linear-plus-conjugacy data: a coefficient matrix with zero
/// right-hand side, no `J`, and conjugacy triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hlpc {
    /// Coefficient matrix, stored with an all-zero rhs.
    pub a: BinaryLinearSystem,
    pub triples: Vec<[usize; 3]>,
    pub names: Vec<String>,
}

impl Hlpc {
    pub fn new(
        a: BinaryLinearSystem,
        triples: Vec<[usize; 3]>,
        names: Vec<String>,
    ) -> Result<Self> {
        if (0..a.num_rows()).any(|i| a.rhs(i)) {
            return Err(Error::validation("homogeneous system must have b = 0"));
        }
        let n = a.num_cols();
        if names.len() != n {
            return Err(Error::validation("HLPC name count mismatch"));
        }
        for t in &triples {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::validation(format!(
                    "conjugacy triple {t:?} out of range (n={n})"
                )));
            }
        }
        Ok(Self { a, triples, names })
    }

    pub fn num_vars(&self) -> usize {
        self.a.num_cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.num_rows()
    }

    pub fn num_triples(&self) -> usize {
        self.triples.len()
    }

    /// Expands to a plain presentation (no `J` anywhere).
    pub fn presentation(&self) -> Result<Presentation> {
        let mut relations = Vec::new();
        for i in 0..self.a.num_rows() {
            let support = self.a.row_support(i)?;
            let mut word = GroupWord::empty();
            for &jv in &support {
                word = word.concat(&GroupWord::gen(&self.names[jv]));
            }
            relations.push(Relation::new(format!("row:{i}"), word));
        }
        let mut seen_pairs = BTreeSet::new();
        for i in 0..self.a.num_rows() {
            let support = self.a.row_support(i)?;
            for a in 0..support.len() {
                for b in a + 1..support.len() {
                    let pair = (support[a], support[b]);
                    if seen_pairs.insert(pair) {
                        relations.push(Relation::new(
                            format!("comm:{}.{}", self.names[pair.0], self.names[pair.1]),
                            GroupWord::commutator(
                                &GroupWord::gen(&self.names[pair.0]),
                                &GroupWord::gen(&self.names[pair.1]),
                            ),
                        ));
                    }
                }
            }
        }
        for (t, &[i, jv, k]) in self.triples.iter().enumerate() {
            relations.push(Relation::new(
                format!("conj:{t}"),
                conjugacy_word(&self.names[i], &self.names[jv], &self.names[k], false),
            ));
        }
        Presentation::plain(self.names.clone(), self.names.clone(), relations)
    }
}

/// Extended homogeneous linear-plus-conjugacy data.
///
/// Involutary generators `x_1..x_n` obey the homogeneous system and the `C0`
/// triples; non-involutary generators `y_1..y_ℓ` act by conjugation on the
/// `x`'s through `C1` (`y_i x_j y_i^{-1} = x_k`) and on each other through
/// the strictly lower-triangular exponent matrix `L`
/// (`y_i y_j y_i^{-1} = y_j^{L_ij}` whenever `i > j` and `L_ij > 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ehlpc {
    pub a: BinaryLinearSystem,
    pub c0: Vec<[usize; 3]>,
    /// (y index, x index, x index)
    pub c1: Vec<(usize, usize, usize)>,
    /// Strictly-lower-triangular positive entries: (i, j, L_ij) with i > j.
    pub l: Vec<(usize, usize, u32)>,
    pub x_names: Vec<String>,
    pub y_names: Vec<String>,
}

impl Ehlpc {
    pub fn new(
        a: BinaryLinearSystem,
        c0: Vec<[usize; 3]>,
        c1: Vec<(usize, usize, usize)>,
        l: Vec<(usize, usize, u32)>,
        x_names: Vec<String>,
        y_names: Vec<String>,
    ) -> Result<Self> {
        if (0..a.num_rows()).any(|i| a.rhs(i)) {
            return Err(Error::validation("extended homogeneous system must have b = 0"));
        }
        let n = a.num_cols();
        let ell = y_names.len();
        if x_names.len() != n {
            return Err(Error::validation("EHLPC x-name count mismatch"));
        }
        for t in &c0 {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::validation(format!("C0 triple {t:?} out of range")));
            }
        }
        for &(yi, xj, xk) in &c1 {
            if yi >= ell || xj >= n || xk >= n {
                return Err(Error::validation(format!(
                    "C1 triple ({yi},{xj},{xk}) out of range"
                )));
            }
        }
        for &(i, jv, v) in &l {
            if i >= ell || jv >= ell {
                return Err(Error::validation(format!("L entry ({i},{jv}) out of range")));
            }
            if i <= jv {
                return Err(Error::validation(format!(
                    "L must be strictly lower-triangular: entry ({i},{jv})"
                )));
            }
            if v == 0 {
                return Err(Error::validation("L entries must be positive"));
            }
        }
        Ok(Self {
            a,
            c0,
            c1,
            l,
            x_names,
            y_names,
        })
    }

    pub fn num_x(&self) -> usize {
        self.x_names.len()
    }

    pub fn num_y(&self) -> usize {
        self.y_names.len()
    }

    pub fn sum_l(&self) -> u64 {
        self.l.iter().map(|&(_, _, v)| u64::from(v)).sum()
    }

    pub fn count_l(&self) -> usize {
        self.l.len()
    }

    /// Expands to a plain presentation: the homogeneous part, then the `C1`
    /// conjugacies `y_i x_j y_i^{-1} x_k^{-1}` and the power relations
    /// `y_i y_j y_i^{-1} y_j^{-L_ij}`.
    pub fn presentation(&self) -> Result<Presentation> {
        let hl = Hlpc::new(self.a.clone(), self.c0.clone(), self.x_names.clone())?;
        let base = hl.presentation()?;
        let mut relations: Vec<Relation> = base
            .relations()
            .iter()
            .filter(|r| !r.label.starts_with("inv:"))
            .cloned()
            .collect();
        for (t, &(yi, xj, xk)) in self.c1.iter().enumerate() {
            relations.push(Relation::new(
                format!("c1:{t}"),
                conjugacy_word(
                    &self.y_names[yi],
                    &self.x_names[xj],
                    &self.x_names[xk],
                    true,
                ),
            ));
        }
        for &(i, jv, v) in &self.l {
            let yi = GroupWord::gen(&self.y_names[i]);
            let yj = GroupWord::gen(&self.y_names[jv]);
            let mut word = yi.concat(&yj).concat(&yi.inverse());
            for _ in 0..v {
                word = word.concat(&yj.inverse());
            }
            relations.push(Relation::new(format!("L:{i}.{jv}"), word.reduce()));
        }
        let mut generators = self.x_names.clone();
        generators.extend(self.y_names.iter().cloned());
        Presentation::plain(generators, self.x_names.clone(), relations)
    }
}

/// The flagship group: three involutary generators `a, b, c` with one linear
/// relation `abc = e`, two non-involutary generators `y (= y_1)` and
/// `x (= y_2)`, conjugacies `y a y^{-1} = a` and `y b y^{-1} = c`, and the
/// power relation `x y x^{-1} = y^2`. Returns the extended-homogeneous data
/// and the designated involutary generator `a`.
pub fn k_group() -> (Ehlpc, String) {
    let a = BinaryLinearSystem::from_supports(3, &[vec![0, 1, 2]], &[false])
        .expect("K system is well-formed");
    let ehlpc = Ehlpc::new(
        a,
        vec![],
        vec![(0, 0, 0), (0, 1, 2)],
        vec![(1, 0, 2)],
        vec!["a".into(), "b".into(), "c".into()],
        vec!["y".into(), "x".into()],
    )
    .expect("K data is well-formed");
    (ehlpc, "a".to_string())
}

/// The Z₂-HNN step used on the flagship pipeline: given a homogeneous group
/// and an involutary generator `x_i`, adjoins `t` and an ancilla `Z`, turning
/// `t x_i t = J x_i` into the conjugacy `t x_i t = Z` plus the linear row
/// `Z x_i = J`. The result is linear-plus-conjugacy over Z₂.
pub fn hnn_z2(h: &Hlpc, target: &str) -> Result<Lpc> {
    let Some(target_idx) = h.names.iter().position(|g| g == target) else {
        return Err(Error::validation(format!(
            "HNN target {target:?} is not a generator"
        )));
    };
    let n = h.num_vars();
    let mut names = h.names.clone();
    let t_name = fresh_name(&names, "t");
    names.push(t_name.clone());
    let z_name = fresh_name(&names, "Z");
    names.push(z_name.clone());
    let t_idx = n;
    let z_idx = n + 1;

    let mut supports: Vec<Vec<usize>> = (0..h.num_rows())
        .map(|i| h.a.row_support(i))
        .collect::<Result<_>>()?;
    let mut b = vec![false; h.num_rows()];
    supports.push(vec![target_idx, z_idx]);
    b.push(true);
    let sys = BinaryLinearSystem::from_supports(n + 2, &supports, &b)?;

    let mut triples = h.triples.clone();
    triples.push([t_idx, target_idx, z_idx]);
    Lpc::new(sys, triples, names)
}

/// Presentation over Z₂ of the HNN extension `⟨G, t : t² = e, t a t = J a⟩`
/// of a plain presentation. Used to measure defects of amplified
/// representations.
pub fn hnn_extension_presentation(pres: &Presentation, a: &str) -> Result<Presentation> {
    if pres.has_j() {
        return Err(Error::validation("HNN extension expects a plain presentation"));
    }
    if !pres.is_involutary(a) {
        return Err(Error::validation(format!(
            "HNN target {a:?} must be involutary"
        )));
    }
    let mut generators = pres.generators().to_vec();
    let t_name = fresh_name(&generators, "t");
    generators.push(t_name.clone());
    let mut involutary: Vec<String> = generators
        .iter()
        .filter(|g| pres.is_involutary(g))
        .cloned()
        .collect();
    involutary.push(t_name.clone());
    let mut relations: Vec<Relation> = pres
        .relations()
        .iter()
        .filter(|r| !r.label.starts_with("inv:"))
        .cloned()
        .collect();
    // t a t (J a)^-1
    relations.push(Relation::new(
        "hnn",
        GroupWord::gen(&t_name)
            .concat(&GroupWord::gen(a))
            .concat(&GroupWord::gen(&t_name))
            .concat(&GroupWord::gen_inv(a))
            .concat(&GroupWord::gen_inv(J)),
    ));
    Presentation::over_z2(generators, involutary, relations)
}

/// First name in `base, base', base''…` style (`base`, `base_1`, …) not
/// already taken.
pub fn fresh_name(taken: &[String], base: &str) -> String {
    if !taken.iter().any(|g| g == base) {
        return base.to_string();
    }
    for k in 1.. {
        let cand = format!("{base}_{k}");
        if !taken.iter().any(|g| g == &cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Classification of a presentation back into typed lowering data, used by
/// the CLI to accept `.grp` inputs.
pub enum Recognized {
    Lpc(Lpc),
    Ehlpc(Ehlpc),
}

/// Recognizes a presentation as LPC (when over Z₂) or EHLPC (when plain).
///
/// Relations must be, up to the shapes emitted by this crate: row products
/// (optionally ending in `J`), commutations, involutary conjugacies,
/// `y x y^{-1} = x'` conjugacies, or `y_i y_j y_i^{-1} = y_j^v` powers.
/// Commutations between involutary generators that do not co-occur in a row
/// become conjugacy triples `(j, k, k)`.
pub fn recognize(pres: &Presentation) -> Result<Recognized> {
    let x_names: Vec<String> = pres
        .generators_without_j()
        .into_iter()
        .filter(|g| pres.is_involutary(g))
        .collect();
    let y_names: Vec<String> = pres
        .generators_without_j()
        .into_iter()
        .filter(|g| !pres.is_involutary(g))
        .collect();
    if pres.has_j() && !y_names.is_empty() {
        return Err(Error::validation(
            "a presentation over Z2 with non-involutary generators is not lowerable",
        ));
    }
    let x_index: BTreeMap<&String, usize> = x_names.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let y_index: BTreeMap<&String, usize> = y_names.iter().enumerate().map(|(i, g)| (g, i)).collect();

    let mut supports: Vec<Vec<usize>> = Vec::new();
    let mut b = Vec::new();
    let mut commutations: Vec<(usize, usize)> = Vec::new();
    let mut c0: Vec<[usize; 3]> = Vec::new();
    let mut c1: Vec<(usize, usize, usize)> = Vec::new();
    let mut l: Vec<(usize, usize, u32)> = Vec::new();

    for rel in pres.relations() {
        if rel.label.starts_with("inv:") || rel.label == "J2" || rel.label.starts_with("Jcomm:") {
            continue;
        }
        let w = rel.word.reduce();
        let ls = w.letters();
        if let Some(shape) = as_row_product(&w, &x_index) {
            supports.push(shape.0);
            b.push(shape.1);
            continue;
        }
        if ls.len() == 4 && ls[0].gen == ls[2].gen {
            // Pattern u v u^±1 w^±1 over involutary generators: either a
            // commutation (w == v, also covering [u, v]) or a conjugacy
            // x_i x_j x_i = x_k. Exponents are irrelevant mod s^2 = e.
            if let (Some(&i), Some(&jv), Some(&k)) = (
                x_index.get(&ls[0].gen),
                x_index.get(&ls[1].gen),
                x_index.get(&ls[3].gen),
            ) {
                if ls[1].gen == ls[3].gen {
                    if i != jv {
                        commutations.push((i, jv));
                    }
                } else {
                    c0.push([i, jv, k]);
                }
                continue;
            }
            // Non-involutary conjugacy y x y^-1 x'^-1.
            if !ls[0].inv && ls[2].inv {
                if let (Some(&yi), Some(&xj), Some(&xk)) = (
                    y_index.get(&ls[0].gen),
                    x_index.get(&ls[1].gen),
                    x_index.get(&ls[3].gen),
                ) {
                    c1.push((yi, xj, xk));
                    continue;
                }
            }
        }
        // Power relation y_i y_j y_i^-1 y_j^-v.
        if let Some((i, jv, v)) = as_power_relation(&w, &y_index) {
            l.push((i, jv, v));
            continue;
        }
        return Err(Error::validation(format!(
            "relation {:?} ({}) does not fit the lowering hierarchy",
            rel.label,
            rel.word.to_token_string()
        )));
    }

    // A commutation not implied by a shared row becomes a conjugacy (j,k,k).
    for (u, v) in commutations {
        let covered = supports.iter().any(|s| s.contains(&u) && s.contains(&v));
        if !covered {
            c0.push([u, v, v]);
        }
    }

    if supports.is_empty() {
        return Err(Error::validation(
            "presentation has no linear relation; nothing to lower",
        ));
    }
    let sys = BinaryLinearSystem::from_supports(x_names.len(), &supports, &b)?;
    if pres.has_j() {
        Ok(Recognized::Lpc(Lpc::new(sys, c0, x_names)?))
    } else {
        Ok(Recognized::Ehlpc(Ehlpc::new(
            sys, c0, c1, l, x_names, y_names,
        )?))
    }
}

fn as_row_product(w: &GroupWord, x_index: &BTreeMap<&String, usize>) -> Option<(Vec<usize>, bool)> {
    let ls = w.letters();
    if ls.is_empty() {
        return None;
    }
    let (body, rhs) = if ls.last().unwrap().gen == J {
        (&ls[..ls.len() - 1], true)
    } else {
        (ls, false)
    };
    if body.is_empty() {
        return None;
    }
    let mut support = Vec::new();
    for letter in body {
        let &idx = x_index.get(&letter.gen)?;
        if support.contains(&idx) {
            return None;
        }
        support.push(idx);
    }
    // Conjugacy words also have x-only letters; require the product shape:
    // all exponents +1 and no generator repeated (checked above), plus at
    // least... a 4-letter word u v u w would have repeated u. So uniqueness
    // suffices, but exponents must all be +1.
    if body.iter().any(|letter| letter.inv) {
        return None;
    }
    Some((support, rhs))
}

fn as_power_relation(
    w: &GroupWord,
    y_index: &BTreeMap<&String, usize>,
) -> Option<(usize, usize, u32)> {
    let ls = w.letters();
    if ls.len() < 4 {
        return None;
    }
    let (a, b) = (&ls[0], &ls[1]);
    if a.inv || b.inv || ls[2].gen != a.gen || !ls[2].inv {
        return None;
    }
    let &i = y_index.get(&a.gen)?;
    let &jv = y_index.get(&b.gen)?;
    let tail = &ls[3..];
    if tail.iter().any(|t| t.gen != b.gen || !t.inv) {
        return None;
    }
    let v = u32::try_from(tail.len()).ok()?;
    if i <= jv {
        return None;
    }
    Some((i, jv, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::GeneratorMap;

    #[test]
    fn solution_group_one_by_one() {
        let sys = BinaryLinearSystem::from_supports(1, &[vec![0]], &[true]).unwrap();
        let pres = solution_group(&sys, &default_names(1)).unwrap();
        assert_eq!(pres.generators(), &["x1".to_string(), J.to_string()]);
        let row = pres.relation("row:0").unwrap();
        assert_eq!(row.word.to_token_string(), "x1 J^-1");
        assert!(pres.relation("inv:x1").is_some());
        assert!(pres.relation("J2").is_some());
    }

    #[test]
    fn solution_group_magic_square_counts() {
        let pres = solution_group(&BinaryLinearSystem::magic_square(), &default_names(9)).unwrap();
        let rows = pres
            .relations()
            .iter()
            .filter(|r| r.label.starts_with("row:"))
            .count();
        let comms = pres
            .relations()
            .iter()
            .filter(|r| r.label.starts_with("comm:"))
            .count();
        let invs = pres
            .relations()
            .iter()
            .filter(|r| r.label.starts_with("inv:"))
            .count();
        let j2 = pres.relations().iter().filter(|r| r.label == "J2").count();
        let jcomms = pres
            .relations()
            .iter()
            .filter(|r| r.label.starts_with("Jcomm:"))
            .count();
        assert_eq!((rows, comms, invs, j2, jcomms), (6, 18, 9, 1, 9));
    }

    #[test]
    fn k_group_bookkeeping() {
        let (k, designated) = k_group();
        assert_eq!(designated, "a");
        assert_eq!(k.num_y(), 2);
        assert_eq!(k.c1.len(), 2);
        assert_eq!(k.sum_l(), 2);
        assert_eq!(k.count_l(), 1);
        let pres = k.presentation().unwrap();
        assert!(pres
            .relations()
            .iter()
            .any(|r| r.word.to_token_string() == "x y x^-1 y^-1 y^-1"));
        assert!(pres.relation("inv:a").is_some());
        assert!(!pres.has_j());
    }

    #[test]
    fn k_group_relation_census() {
        let (k, _) = k_group();
        let pres = k.presentation().unwrap();
        let count = |prefix: &str| {
            pres.relations()
                .iter()
                .filter(|r| r.label.starts_with(prefix))
                .count()
        };
        assert_eq!(count("inv:"), 3);
        assert_eq!(count("row:"), 1);
        assert_eq!(count("comm:"), 3);
        assert_eq!(count("c1:"), 2);
        assert_eq!(count("L:"), 1);
        assert_eq!(pres.relations().len(), 10);
    }

    #[test]
    fn lpc_empty_triples_matches_solution_group() {
        let sys = BinaryLinearSystem::magic_square();
        let lpc = Lpc::new(sys.clone(), vec![], default_names(9)).unwrap();
        assert_eq!(
            lpc.presentation().unwrap(),
            solution_group(&sys, &default_names(9)).unwrap()
        );
    }

    #[test]
    fn hlpc_presentation_carries_no_j() {
        let a = BinaryLinearSystem::from_supports(2, &[vec![0, 1]], &[false]).unwrap();
        let h = Hlpc::new(a, vec![], default_names(2)).unwrap();
        let pres = h.presentation().unwrap();
        assert!(!pres.has_j());
        assert!(pres.generators().iter().all(|g| g != J));
    }

    #[test]
    fn hnn_adds_two_vars_one_row_one_triple() {
        let a = BinaryLinearSystem::from_supports(3, &[vec![0, 1, 2]], &[false]).unwrap();
        let h = Hlpc::new(a, vec![[0, 1, 2]], default_names(3)).unwrap();
        let lpc = hnn_z2(&h, "x1").unwrap();
        assert_eq!(lpc.num_vars(), 5);
        assert_eq!(lpc.num_rows(), 2);
        assert_eq!(lpc.num_triples(), 2);
        // New row has support {x_i, Z} and rhs 1.
        assert_eq!(lpc.sys.row_support(1).unwrap(), vec![0, 4]);
        assert!(lpc.sys.rhs(1));
        assert_eq!(lpc.triples[1], [3, 0, 4]);
    }

    #[test]
    fn hnn_substitution_recovers_txt_equals_jx() {
        let a = BinaryLinearSystem::from_supports(2, &[vec![0, 1]], &[false]).unwrap();
        let h = Hlpc::new(a, vec![], default_names(2)).unwrap();
        let lpc = hnn_z2(&h, "x2").unwrap();
        let pres = lpc.presentation().unwrap();
        let conj = pres.relation("conj:0").unwrap();
        // Substitute Z := J x2 into the conjugacy relation and compare with
        // t x2 t (J x2)^-1 after reduction.
        let mut subst = GeneratorMap::identity(&pres.generators().to_vec());
        subst.insert("Z", GroupWord::gen(J).concat(&GroupWord::gen("x2")));
        let substituted = subst.apply(&conj.word).unwrap();
        let expected = GroupWord::parse_tokens("t x2 t x2^-1 J^-1").unwrap().reduce();
        assert_eq!(substituted, expected);
    }

    #[test]
    fn hnn_target_must_exist() {
        let a = BinaryLinearSystem::from_supports(2, &[vec![0, 1]], &[false]).unwrap();
        let h = Hlpc::new(a, vec![], default_names(2)).unwrap();
        assert!(hnn_z2(&h, "nope").is_err());
    }

    #[test]
    fn presentation_json_mirrors_grp_fields() {
        let (k, _) = k_group();
        let pres = k.presentation().unwrap();
        let value = pres.to_json();
        assert_eq!(value["over_z2"], false);
        assert_eq!(value["generators"].as_array().unwrap().len(), 5);
        assert_eq!(
            value["relations"].as_array().unwrap().len(),
            pres.relations().len()
        );
    }

    #[test]
    fn grp_round_trip_solution_group() {
        let pres = solution_group(&BinaryLinearSystem::magic_square(), &default_names(9)).unwrap();
        let text = pres.to_grp();
        let parsed = Presentation::from_grp(&text).unwrap();
        assert_eq!(parsed.generators(), pres.generators());
        assert_eq!(parsed.relations().len(), pres.relations().len());
        assert!(parsed.has_j());
    }

    #[test]
    fn grp_round_trip_k_group() {
        let (k, _) = k_group();
        let pres = k.presentation().unwrap();
        let parsed = Presentation::from_grp(&pres.to_grp()).unwrap();
        assert!(!parsed.has_j());
        match recognize(&parsed).unwrap() {
            Recognized::Ehlpc(e) => {
                assert_eq!(e.x_names, k.x_names);
                assert_eq!(e.y_names, k.y_names);
                assert_eq!(e.c1, k.c1);
                assert_eq!(e.l, k.l);
            }
            Recognized::Lpc(_) => panic!("expected EHLPC"),
        }
    }

    #[test]
    fn recognize_lpc_round_trip() {
        let sys = BinaryLinearSystem::from_supports(3, &[vec![0, 1], vec![1, 2]], &[true, false])
            .unwrap();
        let lpc = Lpc::new(sys, vec![[0, 1, 2]], default_names(3)).unwrap();
        let pres = lpc.presentation().unwrap();
        let parsed = Presentation::from_grp(&pres.to_grp()).unwrap();
        match recognize(&parsed).unwrap() {
            Recognized::Lpc(g) => {
                assert_eq!(g.sys, lpc.sys);
                assert_eq!(g.triples, lpc.triples);
            }
            Recognized::Ehlpc(_) => panic!("expected LPC"),
        }
    }

    #[test]
    fn ehlpc_rejects_non_lower_triangular() {
        let a = BinaryLinearSystem::from_supports(1, &[vec![0]], &[false]).unwrap();
        let bad = Ehlpc::new(
            a,
            vec![],
            vec![],
            vec![(0, 1, 2)],
            vec!["p".into()],
            vec!["u".into(), "v".into()],
        );
        assert!(bad.is_err());
    }
}
