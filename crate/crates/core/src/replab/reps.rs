//! Concrete exact representations used as regression anchors: the two-qubit
//! magic-square observables, a 7-dimensional representation of the flagship
//! source group, a transposition representation with a genuinely
//! non-commuting conjugacy, and diagonal-by-permutation representations for
//! the word-internalization machinery.

use num_complex::Complex64;
use rand::Rng;

use crate::cmat::{CMat, ONE, ZERO};
use crate::error::Result;
use crate::gf2::BinaryLinearSystem;
use crate::internalize::Internalization;
use crate::replab::ApproxRep;
use crate::word::J;

fn pauli_x() -> CMat {
    CMat::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
}

fn pauli_z() -> CMat {
    CMat::diag(&[ONE, -ONE])
}

fn pauli_y() -> CMat {
    CMat::from_fn(2, |i, j| match (i, j) {
        (0, 1) => Complex64::new(0.0, -1.0),
        (1, 0) => Complex64::new(0.0, 1.0),
        _ => ZERO,
    })
}

/// The nine two-qubit observables of the magic square, arranged so that all
/// three row products and the first two column products are `+1` while the
/// third column product is `-1`; `J` is `-1`. An exact, 4-dimensional
/// representation of the solution group of
/// [`BinaryLinearSystem::magic_square`] with variables named `x1..x9`.
pub fn pauli_magic_rep() -> ApproxRep {
    let x = pauli_x();
    let y = pauli_y();
    let z = pauli_z();
    let eye = CMat::identity(2);
    let grid = [
        x.kron(&eye), // x1
        eye.kron(&x), // x2
        x.kron(&x),   // x3
        eye.kron(&z), // x4
        z.kron(&eye), // x5
        z.kron(&z),   // x6
        x.kron(&z),   // x7
        z.kron(&x),   // x8
        y.kron(&y),   // x9
    ];
    let mut rep = ApproxRep::new(4);
    for (idx, m) in grid.into_iter().enumerate() {
        rep.assign(format!("x{}", idx + 1), m).expect("Pauli observables are unitary");
    }
    rep.assign(J, CMat::scalar(4, -ONE)).expect("scalar is unitary");
    rep
}

/// A 7-dimensional exact representation of the flagship source group.
///
/// `y` is the cyclic shift `C`, `x` the index-doubling permutation `σ` (so
/// `σ C σ^{-1} = C²`), `a = 1`, and `b = c` is the circulant involution with
/// Fourier symbol `-1` exactly on the doubling-orbit `{1, 2, 4}` (making it
/// commute with both `C` and `σ`-conjugation). Every defining relation holds
/// exactly; `a` is the identity, as it must be in finite dimensions.
pub fn k_group_rep_dim7() -> ApproxRep {
    let d = 7usize;
    let omega = |num: i64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * num as f64 / 7.0);
    // b = sum_k p(k) u_k u_k*, p = -1 on {1, 2, 4}.
    let p = |k: usize| if k == 1 || k == 2 || k == 4 { -1.0 } else { 1.0 };
    let b = CMat::from_fn(d, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..d {
            acc += omega((i as i64 - j as i64) * k as i64) * (p(k) / d as f64);
        }
        acc
    });
    let shift = CMat::from_fn(d, |i, j| if i == (j + 1) % d { ONE } else { ZERO });
    let doubling = CMat::from_fn(d, |i, j| if i == (2 * j) % d { ONE } else { ZERO });
    let mut rep = ApproxRep::new(d);
    rep.assign("a", CMat::identity(d)).expect("unitary");
    rep.assign("b", b.clone()).expect("circulant involution is unitary");
    rep.assign("c", b).expect("circulant involution is unitary");
    rep.assign("y", shift).expect("permutation is unitary");
    rep.assign("x", doubling).expect("permutation is unitary");
    rep
}

/// A 3-dimensional linear-plus-conjugacy instance whose conjugacy triple
/// moves one generator to a different one: transposition matrices with
/// `s1 s2 s1 = s3`, a slack variable pinned to the identity for the single
/// linear row, and `J = 1`.
pub fn transposition_lpc_rep() -> (BinaryLinearSystem, Vec<String>, ApproxRep) {
    let perm = |p: [usize; 3]| CMat::from_fn(3, |i, j| if p[j] == i { ONE } else { ZERO });
    let names = vec![
        "s1".to_string(),
        "s2".to_string(),
        "s3".to_string(),
        "e0".to_string(),
    ];
    let sys = BinaryLinearSystem::from_supports(4, &[vec![3]], &[false])
        .expect("well-formed system");
    let mut rep = ApproxRep::new(3);
    rep.assign("s1", perm([1, 0, 2])).expect("unitary");
    rep.assign("s2", perm([0, 2, 1])).expect("unitary");
    rep.assign("s3", perm([2, 1, 0])).expect("unitary");
    rep.assign("e0", CMat::identity(3)).expect("unitary");
    rep.assign(J, CMat::identity(3)).expect("unitary");
    (sys, names, rep)
}

/// A representation of the free group on `{z1, a, ap}` in which the normal
/// subgroup generated by `z1` lands in the diagonal ±1 matrices: `z1` is a
/// random diagonal involution and `a`, `ap` are random permutations. Every
/// conjugate of `z1` stays diagonal, so the image of `N({z1}, S1)` is
/// abelian and involutary, exactly as the internalization requires.
pub fn internalization_base_rep(rng: &mut impl Rng, d: usize) -> ApproxRep {
    let signs: Vec<Complex64> = (0..d)
        .map(|_| if rng.gen_bool(0.5) { ONE } else { -ONE })
        .collect();
    let mut rep = ApproxRep::new(d);
    rep.assign("z1", CMat::diag(&signs)).expect("unitary");
    rep.assign("a", random_permutation(rng, d)).expect("unitary");
    rep.assign("ap", random_permutation(rng, d)).expect("unitary");
    rep
}

fn random_permutation(rng: &mut impl Rng, d: usize) -> CMat {
    let mut p: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    CMat::from_fn(d, |i, j| if p[j] == i { ONE } else { ZERO })
}

/// Extends a representation to the internalization's ancilla generators by
/// evaluating each defining word in creation order.
pub fn extend_with_ancillas(rep: &ApproxRep, out: &Internalization) -> Result<ApproxRep> {
    let mut extended = rep.clone();
    for anc in &out.ancillas {
        let value = extended.evaluate(&anc.defining)?;
        extended.assign(anc.name.clone(), value)?;
    }
    Ok(extended)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::internalize::{build_w, internalize_word};
    use crate::presentation::{default_names, solution_group};
    use crate::word::GroupWord;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn pauli_images_are_involutions() {
        let rep = pauli_magic_rep();
        for idx in 1..=9 {
            let m = rep.image(&format!("x{idx}")).unwrap();
            assert!(m.mul(m).hs_dist_to_identity() < 1e-12);
        }
    }

    #[test]
    fn pauli_distinguished_column_product_is_minus_identity() {
        let rep = pauli_magic_rep();
        let prod = rep
            .evaluate(&GroupWord::parse_tokens("x3 x6 x9").unwrap())
            .unwrap();
        assert!(prod.hs_dist(&CMat::scalar(4, -ONE)) < 1e-12);
    }

    #[test]
    fn pauli_rep_is_exact_for_the_magic_square_group() {
        let pres = solution_group(&BinaryLinearSystem::magic_square(), &default_names(9)).unwrap();
        let report = pauli_magic_rep().defect(&pres).unwrap();
        assert!(report.epsilon < 1e-9, "epsilon = {}", report.epsilon);
    }

    #[test]
    fn k_rep_satisfies_every_source_relation() {
        let (k, _) = crate::presentation::k_group();
        let pres = k.presentation().unwrap();
        let report = k_group_rep_dim7().defect(&pres).unwrap();
        assert!(report.epsilon < 1e-9, "epsilon = {}", report.epsilon);
        // And it is non-trivial: y has order 7, b is not scalar.
        let rep = k_group_rep_dim7();
        assert!(rep.image("b").unwrap().hs_dist_to_identity() > 0.5);
    }

    #[test]
    fn transposition_instance_is_exact() {
        let (sys, names, rep) = transposition_lpc_rep();
        let lpc = crate::presentation::Lpc::new(sys, vec![[0, 1, 2]], names).unwrap();
        let pres = lpc.presentation().unwrap();
        assert!(rep.defect(&pres).unwrap().epsilon < 1e-12);
    }

    #[test]
    fn internalized_w_m_reduces_to_the_target_image() {
        let s0 = vec!["z1".to_string()];
        let s1 = vec!["z1".to_string(), "a".to_string(), "ap".to_string()];
        let inv: BTreeSet<String> = ["z1".to_string()].into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for m in 1..=3 {
            let w = build_w(m);
            let out = internalize_word(&w, &s0, &s1, &inv, &[]).unwrap();
            let base = internalization_base_rep(&mut rng, 8);
            let ext = extend_with_ancillas(&base, &out).unwrap();
            // All added relations hold exactly.
            for rel in &out.relations {
                let value = ext.evaluate(&rel.word).unwrap();
                assert!(
                    value.hs_dist_to_identity() < 1e-9,
                    "relation {} fails for m={m}",
                    rel.label
                );
            }
            // The word itself equals the designated generator's image.
            let lhs = ext.evaluate(&w).unwrap();
            let rhs = ext.image(&out.target).unwrap();
            assert!(lhs.hs_dist(rhs) < 1e-9, "w({m}) does not reduce to target");
        }
    }
}
