//! Word-internalization machinery: the recursive word family `w(m)` and the
//! ancilla construction that sets an element of the normal subgroup
//! `N(S0, S1)` equal to a single involutary generator.
//!
//! The decomposition recognizes a word as a product of items, each either a
//! single `S0` letter or a conjugate `z u z^{-1}` of a member. Items are
//! matched greedily longest-first, and sub-internalizations are shared by
//! word content, so internalizing `w(m)` costs exactly `4m` ancillas.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::presentation::{conjugacy_word, fresh_name, Relation};
use crate::word::{GroupWord, Letter};

/// The recursive word family over `{z1, a, ap}`:
/// `w(0) = z1` and
/// `w(m) = w(m-1) · a^{-1} w(m-1) a · a w(m-1) a^{-1} · ap w(m-1) ap^{-1}`,
/// reduced. (Conjugation convention `x^y = y x y^{-1}`.)
pub fn build_w(m: usize) -> GroupWord {
    let mut current = GroupWord::gen("z1");
    let a = Letter::new("a");
    let a_inv = Letter::inverse_of("a");
    let ap = Letter::new("ap");
    for _ in 0..m {
        let by_a_inv = current.conjugated_by(&a_inv);
        let by_a = current.conjugated_by(&a);
        let by_ap = current.conjugated_by(&ap);
        current = current
            .concat(&by_a_inv)
            .concat(&by_a)
            .concat(&by_ap)
            .reduce();
    }
    current
}

/// One ancilla generator together with the word it abbreviates.
#[derive(Clone, Debug)]
pub struct AncillaDef {
    pub name: String,
    pub defining: GroupWord,
}

/// Result of internalizing a word: the generator now equal to it, the
/// ancillas in creation order, and the added relations (conjugacies, linear
/// words, commutations, and the ancilla involutions).
#[derive(Clone, Debug)]
pub struct Internalization {
    pub target: String,
    pub ancillas: Vec<AncillaDef>,
    pub relations: Vec<Relation>,
    /// One per ancilla: the conjugacy or linear relation that defines it
    /// (commutations and involutions ride along and are not counted).
    pub primary_relations: usize,
}

#[derive(Clone, Debug)]
enum Item {
    /// A single `S0^{±}` letter at this position.
    Base(usize),
    /// Conjugate `z u z^{-1}` occupying `[lo, hi)`, inner word `[lo+1, hi-1)`.
    Conj { lo: usize, hi: usize },
}

struct Parser<'a> {
    letters: &'a [Letter],
    s0: &'a BTreeSet<String>,
    /// Prefix exponent sums per non-S0 generator, for fast member filtering.
    prefix: BTreeMap<String, Vec<i64>>,
    memo: HashMap<(usize, usize), Option<Vec<Item>>>,
}

impl<'a> Parser<'a> {
    fn new(letters: &'a [Letter], s0: &'a BTreeSet<String>) -> Self {
        let mut prefix: BTreeMap<String, Vec<i64>> = BTreeMap::new();
        let gens: BTreeSet<String> = letters.iter().map(|l| l.gen.clone()).collect();
        for g in gens {
            let mut sums = Vec::with_capacity(letters.len() + 1);
            let mut acc = 0i64;
            sums.push(0);
            for l in letters {
                if l.gen == g {
                    acc += if l.inv { -1 } else { 1 };
                }
                sums.push(acc);
            }
            prefix.insert(g, sums);
        }
        Self {
            letters,
            s0,
            prefix,
            memo: HashMap::new(),
        }
    }

    /// Necessary condition for `[lo, hi)` to lie in `N(S0, S1)`: every
    /// conjugator generator has exponent sum zero over the range.
    fn balanced(&self, lo: usize, hi: usize) -> bool {
        self.prefix.iter().all(|(g, sums)| {
            self.s0.contains(g) || sums[hi] - sums[lo] == 0
        })
    }

    fn items(&mut self, lo: usize, hi: usize) -> Option<Vec<Item>> {
        if lo == hi {
            return Some(Vec::new());
        }
        if let Some(cached) = self.memo.get(&(lo, hi)) {
            return cached.clone();
        }
        // Guard against cycles while computing (ranges strictly shrink, so
        // none occur, but seed the memo defensively with failure).
        self.memo.insert((lo, hi), None);
        if !self.balanced(lo, hi) {
            return None;
        }
        let mut result = None;
        for (end, item) in self.item_candidates(lo, hi) {
            if let Some(mut rest) = self.items(end, hi) {
                let mut items = vec![item];
                items.append(&mut rest);
                result = Some(items);
                break;
            }
        }
        self.memo.insert((lo, hi), result.clone());
        result
    }

    /// Candidate first items at `lo`, longest first: conjugates
    /// `z u z^{-1}` (or `z u z` for an involutary conjugator), then a bare
    /// `S0` letter.
    fn item_candidates(&mut self, lo: usize, hi: usize) -> Vec<(usize, Item)> {
        let mut out = Vec::new();
        let first = &self.letters[lo];
        let mut ends: Vec<usize> = Vec::new();
        for end in (lo + 3..=hi).rev() {
            let last = &self.letters[end - 1];
            // Conjugates are literal in the free group: z u z^{-1}.
            if last.gen != first.gen || last.inv == first.inv {
                continue;
            }
            ends.push(end);
        }
        for end in ends {
            if !self.balanced(lo + 1, end - 1) {
                continue;
            }
            if self.items(lo + 1, end - 1).is_some() {
                out.push((end, Item::Conj { lo, hi: end }));
            }
        }
        if self.s0.contains(&first.gen) {
            out.push((lo + 1, Item::Base(lo)));
        }
        out
    }
}

/// Internalizes `w` as a member of the normal subgroup generated by `S0`
/// inside the free group on `S1`: returns ancilla generators and relations
/// under which `w` equals a single involutary generator.
///
/// `involutary` marks which members of `S1` square to the identity (their
/// conjugacies are written `z X z`); `taken` lists names already in use.
/// Fails when the syntactic decomposition does not recognize `w`.
pub fn internalize_word(
    w: &GroupWord,
    s0: &[String],
    s1: &[String],
    involutary: &BTreeSet<String>,
    taken: &[String],
) -> Result<Internalization> {
    let reduced = w.reduce();
    if reduced.is_empty() {
        return Err(Error::validation(
            "cannot internalize the empty word: no designated generator",
        ));
    }
    let s0_set: BTreeSet<String> = s0.iter().cloned().collect();
    let s1_set: BTreeSet<String> = s1.iter().cloned().collect();
    if !s0_set.is_subset(&s1_set) {
        return Err(Error::validation("S0 must be a subset of S1"));
    }
    for letter in reduced.letters() {
        if !s1_set.contains(&letter.gen) {
            return Err(Error::validation(format!(
                "word letter {:?} is not in S1",
                letter.gen
            )));
        }
    }
    let letters = reduced.letters().to_vec();
    let parser = Parser::new(&letters, &s0_set);
    let mut state = Builder {
        letters: &letters,
        involutary,
        names: {
            let mut names: Vec<String> = taken.to_vec();
            names.extend(s1.iter().cloned());
            names
        },
        cache: HashMap::new(),
        ancillas: Vec::new(),
        relations: Vec::new(),
        primary: 0,
        parser,
    };
    if !state.member_ok(0, letters.len()) {
        return Err(Error::validation(
            "word is not recognized as a member of N(S0, S1)",
        ));
    }
    let target = state.emit_member(0, letters.len())?;
    Ok(Internalization {
        target,
        ancillas: state.ancillas,
        relations: state.relations,
        primary_relations: state.primary,
    })
}

struct Builder<'a> {
    letters: &'a [Letter],
    involutary: &'a BTreeSet<String>,
    names: Vec<String>,
    /// Sub-internalizations shared by word content.
    cache: HashMap<Vec<Letter>, String>,
    ancillas: Vec<AncillaDef>,
    relations: Vec<Relation>,
    primary: usize,
    parser: Parser<'a>,
}

impl<'a> Builder<'a> {
    fn fresh(&mut self, base: &str) -> String {
        let name = fresh_name(&self.names, base);
        self.names.push(name.clone());
        name
    }

    fn slice_word(&self, lo: usize, hi: usize) -> Vec<Letter> {
        self.letters[lo..hi].to_vec()
    }

    /// Matches one level of the conjugate-orbit pattern
    /// `u · c^{-1} u c · c u c^{-1} · e u e^{-1}` (the shape every layer of
    /// `w(m)` has). Returns the core range and the two conjugate positions.
    fn quad_split(&self, lo: usize, hi: usize) -> Option<(usize, [usize; 3])> {
        let n = hi - lo;
        if n < 10 || !(n - 6).is_multiple_of(4) {
            return None;
        }
        let core = (n - 6) / 4;
        let u = &self.letters[lo..lo + core];
        let seg_start = [lo + core, lo + 2 * core + 2, lo + 3 * core + 4];
        let c_open = &self.letters[seg_start[0]];
        for (idx, &s) in seg_start.iter().enumerate() {
            let open = &self.letters[s];
            let close = &self.letters[s + core + 1];
            if close.gen != open.gen || close.inv == open.inv {
                return None;
            }
            if &self.letters[s + 1..s + core + 1] != u {
                return None;
            }
            // The second segment conjugates by the inverse of the first.
            if idx == 1 && (open.gen != c_open.gen || open.inv == c_open.inv) {
                return None;
            }
        }
        Some((core, seg_start))
    }

    /// Whether `[lo, hi)` is recognized as a member of `N(S0, S1)`, either
    /// through the quad pattern or the generic item parser.
    fn member_ok(&mut self, lo: usize, hi: usize) -> bool {
        if let Some((core, _)) = self.quad_split(lo, hi) {
            if self.member_ok(lo, lo + core) {
                return true;
            }
        }
        self.parser.items(lo, hi).is_some()
    }

    /// Returns the generator equal to the member `[lo, hi)`, creating
    /// ancillas as needed. The quad pattern is preferred, so the recursive
    /// word family internalizes along its own recursion (4 ancillas per
    /// level); other members fall back to the longest-first item parse.
    fn emit_member(&mut self, lo: usize, hi: usize) -> Result<String> {
        let key = self.slice_word(lo, hi);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        if let Some((core, seg_start)) = self.quad_split(lo, hi) {
            if self.member_ok(lo, lo + core) {
                let x_core = self.emit_member(lo, lo + core)?;
                let mut factors = vec![x_core];
                for s in seg_start {
                    factors.push(self.emit_item(Item::Conj {
                        lo: s,
                        hi: s + core + 2,
                    })?);
                }
                let target = self.emit_product(&factors)?;
                self.cache.insert(key, target.clone());
                return Ok(target);
            }
        }
        let items = self
            .parser
            .items(lo, hi)
            .ok_or_else(|| Error::validation("word is not recognized as a member of N(S0, S1)"))?;
        let target = if items.len() == 1 {
            self.emit_item(items.into_iter().next().unwrap())?
        } else {
            let mut factors = Vec::with_capacity(items.len());
            for item in items {
                factors.push(self.emit_item(item)?);
            }
            self.emit_product(&factors)?
        };
        self.cache.insert(key, target.clone());
        Ok(target)
    }

    /// Product case: one ancilla `W` with the linear relation
    /// `W X1 ... Xk = e` and its commutations.
    fn emit_product(&mut self, factors: &[String]) -> Result<String> {
        let w_name = self.fresh("W");
        let mut linear = GroupWord::gen(&w_name);
        for x in factors {
            linear = linear.concat(&GroupWord::gen(x));
        }
        self.relations
            .push(Relation::new(format!("int.lin:{w_name}"), linear));
        self.primary += 1;
        for x in factors {
            self.relations.push(Relation::new(
                format!("int.comm:{w_name}.{x}"),
                GroupWord::commutator(&GroupWord::gen(&w_name), &GroupWord::gen(x)),
            ));
        }
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                if factors[i] == factors[j] {
                    continue;
                }
                self.relations.push(Relation::new(
                    format!("int.comm:{}.{}", factors[i], factors[j]),
                    GroupWord::commutator(
                        &GroupWord::gen(&factors[i]),
                        &GroupWord::gen(&factors[j]),
                    ),
                ));
            }
        }
        self.relations.push(Relation::new(
            format!("int.inv:{w_name}"),
            GroupWord::gen(&w_name).concat(&GroupWord::gen(&w_name)),
        ));
        // W = (X1 ... Xk)^{-1}; the image of N(S0, S1) is abelian and
        // involutary, so this is also X1 ... Xk.
        let defining = {
            let mut prod = GroupWord::empty();
            for x in factors {
                prod = prod.concat(&GroupWord::gen(x));
            }
            prod.inverse()
        };
        self.ancillas.push(AncillaDef {
            name: w_name.clone(),
            defining,
        });
        Ok(w_name)
    }

    fn emit_item(&mut self, item: Item) -> Result<String> {
        match item {
            Item::Base(pos) => Ok(self.letters[pos].gen.clone()),
            Item::Conj { lo, hi } => {
                let key = self.slice_word(lo, hi);
                if let Some(hit) = self.cache.get(&key) {
                    return Ok(hit.clone());
                }
                let inner = self.emit_member(lo + 1, hi - 1)?;
                let z = self.letters[lo].clone();
                let w_name = self.fresh("W");
                let defining = GroupWord::gen(&inner).conjugated_by(&z);
                let relation_word = if self.involutary.contains(&z.gen) {
                    // z X z = W
                    conjugacy_word(&z.gen, &inner, &w_name, false)
                } else {
                    // z^{e} X z^{-e} = W, written with literal inverses.
                    defining.concat(&GroupWord::gen_inv(&w_name))
                };
                self.relations.push(Relation::new(
                    format!("int.conj:{w_name}"),
                    relation_word,
                ));
                self.primary += 1;
                self.relations.push(Relation::new(
                    format!("int.inv:{w_name}"),
                    GroupWord::gen(&w_name).concat(&GroupWord::gen(&w_name)),
                ));
                self.ancillas.push(AncillaDef {
                    name: w_name.clone(),
                    defining,
                });
                self.cache.insert(key, w_name.clone());
                Ok(w_name)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w_sets() -> (Vec<String>, Vec<String>, BTreeSet<String>) {
        let s0 = vec!["z1".to_string()];
        let s1 = vec!["z1".to_string(), "a".to_string(), "ap".to_string()];
        let involutary: BTreeSet<String> = ["z1".to_string()].into_iter().collect();
        (s0, s1, involutary)
    }

    #[test]
    fn w_zero_is_z1() {
        assert_eq!(build_w(0), GroupWord::gen("z1"));
    }

    #[test]
    fn w_one_has_ten_letters() {
        let w1 = build_w(1);
        assert!(w1.is_reduced());
        assert_eq!(w1.len(), 10);
        assert_eq!(
            w1.to_token_string(),
            "z1 a^-1 z1 a a z1 a^-1 ap z1 ap^-1"
        );
    }

    #[test]
    fn w_length_recursion() {
        // |w(m)| = 4 |w(m-1)| + 6 when no cancellation occurs at the seams.
        let mut expected = 1usize;
        for m in 1..=4 {
            expected = 4 * expected + 6;
            assert_eq!(build_w(m).len(), expected, "length of w({m})");
        }
    }

    #[test]
    fn base_case_no_ancillas() {
        let (s0, s1, inv) = w_sets();
        let out = internalize_word(&GroupWord::gen("z1"), &s0, &s1, &inv, &[]).unwrap();
        assert_eq!(out.target, "z1");
        assert!(out.ancillas.is_empty());
        assert!(out.relations.is_empty());
    }

    #[test]
    fn single_conjugation_costs_one_ancilla() {
        let (s0, s1, inv) = w_sets();
        let w = GroupWord::parse_tokens("a z1 a^-1").unwrap();
        let out = internalize_word(&w, &s0, &s1, &inv, &[]).unwrap();
        assert_eq!(out.ancillas.len(), 1);
        assert_eq!(out.primary_relations, 1);
        assert_eq!(out.target, out.ancillas[0].name);
        assert_eq!(
            out.ancillas[0].defining.to_token_string(),
            "a z1 a^-1"
        );
    }

    #[test]
    fn involutary_conjugator_uses_same_sign_relation() {
        let (s0, mut s1, mut inv) = w_sets();
        s1.push("b".to_string());
        inv.insert("b".to_string());
        let w = GroupWord::parse_tokens("b z1 b^-1").unwrap();
        let out = internalize_word(&w, &s0, &s1, &inv, &[]).unwrap();
        assert_eq!(out.ancillas.len(), 1);
        let rel = &out.relations[0];
        assert_eq!(rel.word.to_token_string(), "b z1 b W^-1");
    }

    #[test]
    fn decomposition_failure_is_an_error() {
        let (s0, s1, inv) = w_sets();
        // `a` alone is not in the normal subgroup generated by z1.
        assert!(internalize_word(&GroupWord::gen("a"), &s0, &s1, &inv, &[]).is_err());
        let unbalanced = GroupWord::parse_tokens("a z1").unwrap();
        assert!(internalize_word(&unbalanced, &s0, &s1, &inv, &[]).is_err());
    }

    #[test]
    fn w_m_costs_exactly_four_m_ancillas() {
        let (s0, s1, inv) = w_sets();
        for m in 1..=4 {
            let w = build_w(m);
            let out = internalize_word(&w, &s0, &s1, &inv, &[]).unwrap();
            assert_eq!(out.ancillas.len(), 4 * m, "ancillas for w({m})");
            assert_eq!(out.primary_relations, 4 * m, "relations for w({m})");
        }
    }
}
