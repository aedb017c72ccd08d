//! Words in free groups and generator maps (lifts of homomorphisms).
//!
//! A word is a sequence of letters, each a generator name with exponent ±1.
//! The distinguished central generator of presentations over Z₂ is spelled
//! `"J"`. Reduction cancels adjacent inverse pairs only; involution relations
//! are never applied at the word level.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Reserved name of the distinguished central involution.
pub const J: &str = "J";

/// One letter of a word: a generator and an exponent in {+1, -1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: String,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: impl Into<String>) -> Self {
        Self {
            gen: gen.into(),
            inv: false,
        }
    }

    pub fn inverse_of(gen: impl Into<String>) -> Self {
        Self {
            gen: gen.into(),
            inv: true,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            gen: self.gen.clone(),
            inv: !self.inv,
        }
    }

    fn cancels(&self, other: &Self) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

/// A word in a free group, stored as written (not necessarily reduced).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    /// Single-generator word `g`.
    pub fn gen(name: impl Into<String>) -> Self {
        Self {
            letters: vec![Letter::new(name)],
        }
    }

    /// Single-generator word `g^{-1}`.
    pub fn gen_inv(name: impl Into<String>) -> Self {
        Self {
            letters: vec![Letter::inverse_of(name)],
        }
    }

    /// Builds a word from (name, inverted) pairs.
    pub fn from_pairs<S: Into<String>>(pairs: Vec<(S, bool)>) -> Self {
        Self {
            letters: pairs
                .into_iter()
                .map(|(g, inv)| Letter {
                    gen: g.into(),
                    inv,
                })
                .collect(),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self · other` (no reduction).
    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Self { letters }
    }

    /// The formal inverse: letters reversed, exponents flipped.
    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    /// Conjugate `z w z^{-1}` for a single-letter conjugator.
    pub fn conjugated_by(&self, z: &Letter) -> Self {
        let mut letters = Vec::with_capacity(self.letters.len() + 2);
        letters.push(z.clone());
        letters.extend(self.letters.iter().cloned());
        letters.push(z.inverse());
        Self { letters }
    }

    /// Free reduction: removes adjacent inverse pairs until none remain.
    /// The result is equal in the free group; reduction is idempotent and
    /// never increases length.
    pub fn reduce(&self) -> Self {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for letter in &self.letters {
            if stack.last().is_some_and(|top| top.cancels(letter)) {
                stack.pop();
            } else {
                stack.push(letter.clone());
            }
        }
        Self { letters: stack }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters
            .windows(2)
            .all(|w| !w[0].cancels(&w[1]))
    }

    /// Sorted, deduplicated generator names appearing in the word.
    pub fn generators(&self) -> Vec<String> {
        let mut names: Vec<String> = self.letters.iter().map(|l| l.gen.clone()).collect();
        names.sort();
        names.dedup();
        names
    }

    /// Commutator `[u, v] = u v u^{-1} v^{-1}`.
    pub fn commutator(u: &Self, v: &Self) -> Self {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    /// Renders the word as space-separated tokens `name` / `name^-1`.
    /// The empty word renders as `e`.
    pub fn to_token_string(&self) -> String {
        if self.letters.is_empty() {
            return "e".to_string();
        }
        self.letters
            .iter()
            .map(|l| {
                if l.inv {
                    format!("{}^-1", l.gen)
                } else {
                    l.gen.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses the token form produced by [`GroupWord::to_token_string`].
    pub fn parse_tokens(text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "e" {
                continue;
            }
            if let Some(name) = token.strip_suffix("^-1") {
                if name.is_empty() {
                    return Err(Error::validation(format!("bad word token {token:?}")));
                }
                letters.push(Letter::inverse_of(name));
            } else if token.contains('^') {
                return Err(Error::validation(format!("bad word token {token:?}")));
            } else {
                letters.push(Letter::new(token));
            }
        }
        Ok(Self { letters })
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_token_string())
    }
}

/// A lift Ψ of a homomorphism: each source generator is sent to a word over
/// the target generators. Applying the map substitutes images (inverting
/// them for inverse letters) and reduces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorMap {
    images: BTreeMap<String, GroupWord>,
}

impl GeneratorMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity map on the given generator names.
    pub fn identity<S: AsRef<str>>(gens: &[S]) -> Self {
        let mut map = Self::new();
        for g in gens {
            map.insert(g.as_ref(), GroupWord::gen(g.as_ref()));
        }
        map
    }

    pub fn insert(&mut self, source: impl Into<String>, image: GroupWord) {
        self.images.insert(source.into(), image);
    }

    pub fn image(&self, source: &str) -> Option<&GroupWord> {
        self.images.get(source)
    }

    pub fn sources(&self) -> impl Iterator<Item = &String> {
        self.images.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &GroupWord)> {
        self.images.iter()
    }

    /// Substitution homomorphism: replaces each letter with its image
    /// (formally inverted for inverse letters) and reduces the result.
    pub fn apply(&self, w: &GroupWord) -> Result<GroupWord> {
        let mut out = Vec::new();
        for letter in w.letters() {
            let image = self.images.get(&letter.gen).ok_or_else(|| {
                Error::validation(format!("generator {:?} not in map domain", letter.gen))
            })?;
            if letter.inv {
                out.extend(image.inverse().letters);
            } else {
                out.extend(image.letters().iter().cloned());
            }
        }
        Ok(GroupWord::from_letters(out).reduce())
    }

    /// Composition: `other ∘ self` (apply `self` first, then `other`).
    pub fn then(&self, other: &Self) -> Result<Self> {
        let mut composed = Self::new();
        for (source, image) in &self.images {
            composed.insert(source.clone(), other.apply(image)?);
        }
        Ok(composed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(tokens: &str) -> GroupWord {
        GroupWord::parse_tokens(tokens).unwrap()
    }

    #[test]
    fn reduce_cancels_inverse_pair() {
        assert!(w("x x^-1").reduce().is_empty());
    }

    #[test]
    fn reduce_inner_cancellation() {
        assert_eq!(w("x y y^-1 x").reduce(), w("x x"));
    }

    #[test]
    fn reduce_fixed_point_on_reduced_words() {
        let word = w("x y x^-1");
        assert_eq!(word.reduce(), word);
    }

    #[test]
    fn reduce_cascading() {
        assert!(w("x y y^-1 x^-1").reduce().is_empty());
    }

    #[test]
    fn apply_identity_map_reduces() {
        let map = GeneratorMap::identity(&["x", "y"]);
        assert_eq!(map.apply(&w("x y y^-1")).unwrap(), w("x"));
    }

    #[test]
    fn apply_map_inverts_images() {
        let mut map = GeneratorMap::new();
        map.insert("x", w("a b"));
        assert_eq!(map.apply(&w("x^-1")).unwrap(), w("b^-1 a^-1"));
    }

    #[test]
    fn apply_map_unmapped_generator_errors() {
        let map = GeneratorMap::new();
        assert!(map.apply(&w("x")).is_err());
    }

    #[test]
    fn token_round_trip() {
        let word = w("x y^-1 J z");
        assert_eq!(GroupWord::parse_tokens(&word.to_token_string()).unwrap(), word);
        assert_eq!(GroupWord::parse_tokens("e").unwrap(), GroupWord::empty());
        assert_eq!(GroupWord::empty().to_token_string(), "e");
    }

    fn arb_word() -> impl Strategy<Value = GroupWord> {
        proptest::collection::vec((0u8..4, proptest::bool::ANY), 0..20).prop_map(|ls| {
            GroupWord::from_letters(
                ls.into_iter()
                    .map(|(g, inv)| Letter {
                        gen: format!("g{g}"),
                        inv,
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_nonincreasing(word in arb_word()) {
            let reduced = word.reduce();
            prop_assert!(reduced.len() <= word.len());
            prop_assert!(reduced.is_reduced());
            prop_assert_eq!(reduced.reduce(), reduced);
        }

        #[test]
        fn word_times_inverse_reduces_to_identity(word in arb_word()) {
            prop_assert!(word.concat(&word.inverse()).reduce().is_empty());
        }

        #[test]
        fn apply_map_is_multiplicative(u in arb_word(), v in arb_word()) {
            let mut map = GeneratorMap::new();
            map.insert("g0", GroupWord::parse_tokens("a b").unwrap());
            map.insert("g1", GroupWord::parse_tokens("b^-1").unwrap());
            map.insert("g2", GroupWord::parse_tokens("c a c^-1").unwrap());
            map.insert("g3", GroupWord::parse_tokens("e").unwrap());
            let lhs = map.apply(&u.concat(&v)).unwrap();
            let rhs = map.apply(&u).unwrap().concat(&map.apply(&v).unwrap()).reduce();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
