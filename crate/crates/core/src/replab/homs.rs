//! Brute-force enumeration of homomorphisms from a finitely presented group
//! into a symmetric group: the desk-scale oracle for finite-dimensional
//! (non-)triviality. Backtracking over generator assignments, checking each
//! relation as soon as all of its generators are placed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::GroupWord;

/// A permutation of `{0, .., k-1}` as its image table.
pub type Perm = Vec<usize>;

/// Enumeration guard: `|S_k|^{#generators}` may not exceed this.
pub const SEARCH_BOUND: f64 = 1e9;

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

fn all_perms(k: usize) -> Vec<Perm> {
    let mut out = Vec::with_capacity(factorial(k) as usize);
    let mut current: Perm = (0..k).collect();
    heap_permutations(&mut current, k, &mut out);
    out.sort();
    out
}

fn heap_permutations(current: &mut Perm, n: usize, out: &mut Vec<Perm>) {
    if n <= 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..n {
        heap_permutations(current, n - 1, out);
        if n.is_multiple_of(2) {
            current.swap(i, n - 1);
        } else {
            current.swap(0, n - 1);
        }
    }
}

fn invert(p: &Perm) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

fn is_identity(p: &Perm) -> bool {
    p.iter().enumerate().all(|(i, &v)| i == v)
}

fn evaluate_word(word: &GroupWord, assignment: &BTreeMap<&str, &Perm>, k: usize) -> Option<Perm> {
    let mut acc: Perm = (0..k).collect();
    for letter in word.letters() {
        let img = assignment.get(letter.gen.as_str())?;
        let step = if letter.inv { invert(img) } else { (*img).clone() };
        // Left-to-right products compose right-to-left as functions,
        // matching the matrix convention: (acc · step)(i) = acc(step(i)).
        acc = (0..k).map(|i| acc[step[i]]).collect();
    }
    Some(acc)
}

/// All homomorphisms of the presentation into the symmetric group `S_k`,
/// as generator-to-permutation tables (deterministic order).
///
/// Fails with a feasibility error when `(k!)^{#generators}` exceeds
/// [`SEARCH_BOUND`]. The presentation must be plain (no `J`).
pub fn enumerate_homs(
    pres: &Presentation,
    degree: usize,
) -> Result<Vec<BTreeMap<String, Perm>>> {
    if pres.has_j() {
        return Err(Error::validation(
            "enumerate_homs expects a presentation without J",
        ));
    }
    if degree == 0 {
        return Err(Error::validation("degree must be at least 1"));
    }
    let gens = pres.generators().to_vec();
    let order = factorial(degree) as f64;
    if order.powi(gens.len() as i32) > SEARCH_BOUND {
        return Err(Error::feasibility(format!(
            "({degree}!)^{} exceeds the {SEARCH_BOUND:.0e} enumeration bound",
            gens.len()
        )));
    }
    let perms = all_perms(degree);
    // Relations become checkable once all their generators are assigned.
    let mut check_at: Vec<Vec<&GroupWord>> = vec![Vec::new(); gens.len() + 1];
    for rel in pres.relations() {
        let needed = rel
            .word
            .generators()
            .into_iter()
            .map(|g| gens.iter().position(|x| *x == g).expect("validated"))
            .max()
            .map_or(0, |i| i + 1);
        check_at[needed].push(&rel.word);
    }

    let mut results = Vec::new();
    let mut stack: Vec<&Perm> = Vec::with_capacity(gens.len());
    search(
        &gens,
        &perms,
        &check_at,
        degree,
        &mut stack,
        &mut results,
    );
    Ok(results)
}

fn search<'a>(
    gens: &[String],
    perms: &'a [Perm],
    check_at: &[Vec<&GroupWord>],
    degree: usize,
    stack: &mut Vec<&'a Perm>,
    results: &mut Vec<BTreeMap<String, Perm>>,
) {
    let depth = stack.len();
    let assignment: BTreeMap<&str, &Perm> = gens
        .iter()
        .take(depth)
        .map(|g| g.as_str())
        .zip(stack.iter().copied())
        .collect();
    for word in &check_at[depth] {
        match evaluate_word(word, &assignment, degree) {
            Some(value) if is_identity(&value) => {}
            _ => return,
        }
    }
    if depth == gens.len() {
        results.push(
            gens.iter()
                .cloned()
                .zip(stack.iter().map(|p| (*p).clone()))
                .collect(),
        );
        return;
    }
    for p in perms {
        stack.push(p);
        search(gens, perms, check_at, degree, stack, results);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::k_group;

    #[test]
    fn degree_one_has_exactly_the_trivial_hom() {
        let (k, _) = k_group();
        let pres = k.presentation().unwrap();
        let homs = enumerate_homs(&pres, 1).unwrap();
        assert_eq!(homs.len(), 1);
    }

    #[test]
    fn flagship_source_sends_a_to_identity_up_to_degree_three() {
        let (k, designated) = k_group();
        let pres = k.presentation().unwrap();
        for degree in 1..=3 {
            let homs = enumerate_homs(&pres, degree).unwrap();
            assert!(!homs.is_empty());
            for hom in &homs {
                assert!(
                    is_identity(&hom[&designated]),
                    "degree {degree}: a is not forced to the identity"
                );
            }
        }
    }

    #[test]
    fn z2_free_product_has_all_involutions() {
        // <p : p^2> into S_3: identity plus the three transpositions.
        let pres = crate::presentation::Presentation::plain(
            vec!["p".into()],
            vec!["p".into()],
            vec![],
        )
        .unwrap();
        let homs = enumerate_homs(&pres, 3).unwrap();
        assert_eq!(homs.len(), 4);
    }

    #[test]
    fn guard_trips_on_oversized_search() {
        let gens: Vec<String> = (0..20).map(|i| format!("g{i}")).collect();
        let pres = crate::presentation::Presentation::plain(gens.clone(), gens, vec![]).unwrap();
        assert!(matches!(
            enumerate_homs(&pres, 6),
            Err(crate::error::Error::Feasibility(_))
        ));
    }
}
