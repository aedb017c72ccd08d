//! Stability roundings: involution rounding of diagonal (and unitary)
//! matrices, rounding an involution to commute with a commuting family,
//! stabilization of approximate representations of Z₂^k, and splitting a
//! representation along the ±1 eigenspaces of `J`.
//!
//! Each operation returns its certified distance bound next to the output,
//! so callers assert `distance <= bound` instead of re-deriving constants.

use num_complex::Complex64;

use crate::cmat::{hermitian_eig, simultaneous_diagonalize, CMat, ONE};
use crate::error::{Error, Result};
use crate::presentation::{Presentation, Relation};
use crate::replab::{ApproxRep, TOL};
use crate::word::{GroupWord, J};

/// Constant of the diagonal involution rounding: `1 + 1/sqrt(2)`.
pub const INVOLUTION_CONSTANT: f64 = 1.0 + std::f64::consts::FRAC_1_SQRT_2;

/// Constant of the commuting-family rounding: `1 + 1/(2 sqrt(2))`.
pub const COMMUTING_CONSTANT: f64 = 1.0 + 0.5 * std::f64::consts::FRAC_1_SQRT_2;

/// Eigenvalue-cluster tolerance for simultaneous diagonalization.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Rounds a diagonal matrix to the nearest diagonal involution:
/// `D_ii = sgn(Re X_ii)` with `sgn(0) = +1`. Returns the involution and the
/// certified bound `(1 + 1/sqrt 2) * ‖X² − 1‖` on `‖D − X‖`.
pub fn round_to_involution(x: &CMat) -> Result<(CMat, f64)> {
    if !x.is_diagonal(1e-12) {
        return Err(Error::validation("round_to_involution expects a diagonal matrix"));
    }
    let signs: Vec<Complex64> = x
        .diagonal()
        .iter()
        .map(|z| if z.re >= 0.0 { ONE } else { -ONE })
        .collect();
    let d = CMat::diag(&signs);
    let defect = x.mul(x).hs_dist_to_identity();
    Ok((d, INVOLUTION_CONSTANT * defect))
}

/// Involution rounding for a unitary matrix: diagonalize (via the Hermitian
/// part, whose eigenbasis is an eigenbasis of any normal matrix) and take
/// eigenvalue signs there. Same certified bound as the diagonal case.
pub fn round_unitary_to_involution(u: &CMat) -> Result<(CMat, f64)> {
    if !u.is_unitary(1e-6) {
        return Err(Error::numeric("involution rounding expects a unitary matrix"));
    }
    let herm = u.add(&u.adjoint()).scale(Complex64::new(0.5, 0.0));
    let (values, basis) = hermitian_eig(&herm)?;
    let signs: Vec<Complex64> = values
        .iter()
        .map(|&v| if v >= 0.0 { ONE } else { -ONE })
        .collect();
    let d = basis.mul(&CMat::diag(&signs)).mul(&basis.adjoint());
    let defect = u.mul(u).hs_dist_to_identity();
    Ok((d, INVOLUTION_CONSTANT * defect))
}

/// Given commuting involutions `X_1..X_n` and an involution `Y` commuting
/// with all but the last, produces an involution `Z` commuting with every
/// `X_i`, with `‖Z − Y‖ ≤ (1 + 1/(2 sqrt 2)) ‖X_n Y − Y X_n‖`.
///
/// Built from `Z_0 = (Y + X_n Y X_n)/2`, which already commutes with the
/// whole family, followed by involution rounding in a joint eigenbasis.
pub fn round_commuting(xs: &[&CMat], y: &CMat, tol: f64) -> Result<(CMat, f64)> {
    let Some((&last, rest)) = xs.split_last() else {
        return Err(Error::validation("round_commuting needs at least one family member"));
    };
    for (i, x) in xs.iter().enumerate() {
        if x.mul(x).hs_dist_to_identity() > tol {
            return Err(Error::numeric(format!("family member {i} is not an involution")));
        }
        for (k, x2) in xs.iter().enumerate().skip(i + 1) {
            if x.commutator_norm(x2) > tol {
                return Err(Error::numeric(format!("family members {i} and {k} do not commute")));
            }
        }
    }
    if y.mul(y).hs_dist_to_identity() > tol {
        return Err(Error::numeric("Y is not an involution"));
    }
    for (i, x) in rest.iter().enumerate() {
        if x.commutator_norm(y) > tol {
            return Err(Error::numeric(format!(
                "Y does not commute with family member {i}"
            )));
        }
    }
    let commutator = last.commutator_norm(y);
    let half = Complex64::new(0.5, 0.0);
    let z0 = y.add(&last.mul(y).mul(last)).scale(half);
    let mut family: Vec<&CMat> = xs.to_vec();
    family.push(&z0);
    let basis = simultaneous_diagonalize(&family, CLUSTER_TOL)?;
    let z0_diag = z0.conjugate_by(&basis);
    let signs: Vec<Complex64> = z0_diag
        .diagonal()
        .iter()
        .map(|z| if z.re >= 0.0 { ONE } else { -ONE })
        .collect();
    let z = basis.mul(&CMat::diag(&signs)).mul(&basis.adjoint());
    Ok((z, COMMUTING_CONSTANT * commutator))
}

/// Certified stabilization constant for Z₂^k, from iterating the
/// commuting-family rounding: the first rounding moves images by at most
/// `C1·ε`; each of the `k−1` subsequent passes moves by `C0·ε_l` where
/// `ε_{l+1} = (4 C0 + 1) ε_l` and `ε_1 = (4 C1 + 1) ε`. Summing gives
/// `C(k) = C1 + ((4 C0 + 1)^{k-1} − 1)(4 C1 + 1)/4`.
pub fn stabilize_abelian_constant(k: usize) -> f64 {
    assert!(k >= 1);
    let c0 = COMMUTING_CONSTANT;
    let c1 = INVOLUTION_CONSTANT;
    c1 + ((4.0 * c0 + 1.0).powi(k as i32 - 1) - 1.0) * (4.0 * c1 + 1.0) / 4.0
}

/// The presentation of Z₂^k on the given generator names: involutions plus
/// all pairwise commutations. Plain (no J).
pub fn z2k_presentation(gens: &[String]) -> Result<Presentation> {
    let mut relations = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            relations.push(Relation::new(
                format!("comm:{}.{}", gens[i], gens[j]),
                GroupWord::commutator(&GroupWord::gen(&gens[i]), &GroupWord::gen(&gens[j])),
            ));
        }
    }
    Presentation::plain(gens.to_vec(), gens.to_vec(), relations)
}

/// Outcome of [`stabilize_abelian`]: an exact representation of Z₂^k, the
/// certified constant, and the largest distance actually moved.
#[derive(Clone, Debug)]
pub struct Stabilized {
    pub rep: ApproxRep,
    pub constant: f64,
    pub max_move: f64,
}

/// Turns an approximate representation of Z₂^k (on the listed generators)
/// into an exact one: round every image to an involution, then one
/// commuting-family pass per generator. The output satisfies all relations
/// to 1e-9 and moves each image by at most `stabilize_abelian_constant(k)`
/// times the input defect.
pub fn stabilize_abelian(rep: &ApproxRep, gens: &[String]) -> Result<Stabilized> {
    let k = gens.len();
    if k == 0 {
        return Ok(Stabilized {
            rep: ApproxRep::new(rep.dim()),
            constant: 0.0,
            max_move: 0.0,
        });
    }
    let mut images: Vec<CMat> = Vec::with_capacity(k);
    for g in gens {
        let img = rep
            .image(g)
            .ok_or_else(|| Error::validation(format!("generator {g:?} has no assigned image")))?;
        if img.dim() != rep.dim() {
            return Err(Error::validation("dimension mismatch among images"));
        }
        let (rounded, _) = round_unitary_to_involution(img)?;
        images.push(rounded);
    }
    for l in 0..k.saturating_sub(1) {
        let (family, tail) = images.split_at_mut(l + 1);
        let family_refs: Vec<&CMat> = family.iter().collect();
        for yimg in tail.iter_mut() {
            let (z, _) = round_commuting(&family_refs, yimg, 1e-6)?;
            *yimg = z;
        }
    }
    let mut out = ApproxRep::new(rep.dim());
    let mut max_move = 0.0f64;
    for (g, img) in gens.iter().zip(images) {
        max_move = max_move.max(img.hs_dist(rep.image(g).unwrap()));
        out.assign(g.clone(), img)?;
    }
    let pres = z2k_presentation(gens)?;
    let residual = out.defect(&pres)?.epsilon;
    if residual > TOL {
        return Err(Error::numeric(format!(
            "stabilization left residual defect {residual:.3e}"
        )));
    }
    Ok(Stabilized {
        rep: out,
        constant: stabilize_abelian_constant(k),
        max_move,
    })
}

/// Outcome of [`split_on_j`]: the `-1` block, its certified defect bound
/// `4 ε̃ / δ`, and its measured defect.
#[derive(Clone, Debug)]
pub struct JSplit {
    pub rep: ApproxRep,
    pub certified: f64,
    pub measured: f64,
}

/// Converts an approximate representation of a presentation over Z₂ (all
/// non-J generators involutary) into one with `φ(J) = -1`.
///
/// Rounds every image to an involution, makes each commute with the rounded
/// `J`, then splits along `J`'s ±1 eigenspaces and keeps the `-1` block.
/// Requires `‖φ(J) − 1‖ > δ` so the block is nonempty; the certified output
/// defect is `4 ε̃ / δ` with `ε̃` the post-rounding defect.
pub fn split_on_j(rep: &ApproxRep, pres: &Presentation, delta: f64) -> Result<JSplit> {
    if !pres.has_j() {
        return Err(Error::validation("split_on_j expects a presentation over Z2"));
    }
    for g in pres.generators_without_j() {
        if !pres.is_involutary(&g) {
            return Err(Error::validation(format!(
                "split_on_j expects involutary generators; {g:?} is not"
            )));
        }
    }
    if delta <= 0.0 {
        return Err(Error::validation("split_on_j needs delta > 0"));
    }
    let d = rep.dim();
    let j_image = rep
        .image(J)
        .cloned()
        .unwrap_or_else(|| CMat::scalar(d, -ONE));
    // Already in split form: nothing to do.
    if j_image.hs_dist(&CMat::scalar(d, -ONE)) <= TOL {
        let measured = rep.defect(pres)?.epsilon;
        let mut out = rep.clone();
        out.assign(J, CMat::scalar(d, -ONE))?;
        return Ok(JSplit {
            rep: out,
            certified: measured,
            measured,
        });
    }
    if j_image.hs_dist_to_identity() <= delta {
        return Err(Error::numeric(format!(
            "‖φ(J) − 1‖ = {:.6} is not above δ = {delta}; the -1 block may be empty",
            j_image.hs_dist_to_identity()
        )));
    }

    // Round everything to involutions and make each generator commute with J.
    let (j_rounded, _) = round_unitary_to_involution(&j_image)?;
    let mut rounded = ApproxRep::new(d);
    rounded.assign(J, j_rounded.clone())?;
    for g in pres.generators_without_j() {
        let img = rep
            .image(&g)
            .ok_or_else(|| Error::validation(format!("generator {g:?} has no assigned image")))?;
        let (inv, _) = round_unitary_to_involution(img)?;
        let (commuting, _) = round_commuting(&[&j_rounded], &inv, 1e-6)?;
        rounded.assign(g, commuting)?;
    }
    let eps_rounded = rounded.defect(pres)?.epsilon;

    // Basis ordering: +1 eigenspace of J first, then the -1 eigenspace.
    let (values, basis) = hermitian_eig(&j_rounded)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    let sorted_basis = CMat::from_fn(d, |i, jc| basis.get(i, order[jc]));
    let d1 = values.iter().filter(|&&v| v < 0.0).count();
    if d1 == 0 {
        return Err(Error::numeric("J has no -1 eigenspace; split is empty"));
    }
    let d0 = d - d1;
    let mut out = ApproxRep::new(d1);
    out.assign(J, CMat::scalar(d1, -ONE))?;
    for g in pres.generators_without_j() {
        let conjugated = rounded.image(&g).unwrap().conjugate_by(&sorted_basis);
        out.assign(g, conjugated.block(d0, d1))?;
    }
    let measured = out.defect(pres)?.epsilon;
    Ok(JSplit {
        rep: out,
        certified: 4.0 * eps_rounded / delta,
        measured,
    })
}
