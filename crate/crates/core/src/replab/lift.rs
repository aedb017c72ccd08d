//! Block-matrix lifts along the compiler passes: every lowering pass comes
//! with an explicit construction turning an approximate representation of
//! the source into one of the target, doubling the dimension per stage,
//! with the source a block summand of the lift composed with the generator
//! map. Exact inputs produce exact outputs.

use crate::cmat::CMat;
use crate::compiler::{gadgetize, lower_one, nice_embed, CompiledSystem};
use crate::error::{Error, Result};
use crate::gf2::BinaryLinearSystem;
use crate::presentation::{Ehlpc, Hlpc, Lpc};
use crate::replab::ApproxRep;
use crate::word::{GeneratorMap, J};

/// Certified defect multiplier of the nice-embedding lift.
pub const NICE_CONSTANT: f64 = 5.0;
/// Certified defect multiplier of the gadget lift.
pub const GADGET_CONSTANT: f64 = 15.0;
/// Certified defect multiplier of the composed lowering.
pub const COMPILE_CONSTANT: f64 = 75.0;

/// Output of [`lift_nice`].
pub struct NiceLift {
    pub target: Lpc,
    pub map: GeneratorMap,
    pub rep: ApproxRep,
    pub constant: f64,
}

/// Output of [`lift_gadget`].
pub struct GadgetLift {
    pub sys: BinaryLinearSystem,
    pub names: Vec<String>,
    pub map: GeneratorMap,
    pub rep: ApproxRep,
    pub constant: f64,
}

/// Output of [`lift_compile`].
pub struct CompileLift {
    pub compiled: CompiledSystem,
    pub rep: ApproxRep,
    pub constant: f64,
}

/// Output of [`lift_ehlpc`].
pub struct EhlpcLift {
    pub target: Hlpc,
    pub map: GeneratorMap,
    pub rep: ApproxRep,
}

fn swap_blocks(d: usize) -> CMat {
    CMat::from_blocks(
        &CMat::zeros(d),
        &CMat::identity(d),
        &CMat::identity(d),
        &CMat::zeros(d),
    )
}

fn antidiag(top: &CMat, bottom: &CMat) -> CMat {
    let d = top.dim();
    CMat::from_blocks(&CMat::zeros(d), top, bottom, &CMat::zeros(d))
}

fn doubled(m: &CMat) -> CMat {
    m.direct_sum(m)
}

fn source_image(phi: &ApproxRep, name: &str) -> Result<CMat> {
    if let Some(m) = phi.image(name) {
        return Ok(m.clone());
    }
    if name == J {
        return Ok(CMat::scalar(phi.dim(), -crate::cmat::ONE));
    }
    Err(Error::validation(format!("lift input misses generator {name:?}")))
}

/// Lift across the nice embedding: `2d`-dimensional, with
/// `γ(x) = φ(x) ⊕ φ(x)` on the sources (so `γ ∘ Ψ = φ ⊕ φ` block-exactly),
/// `γ(y_j) = φ(x_j) ⊕ 1`, `γ(z_j) = 1 ⊕ φ(x_j)`, `γ(w_j)` the antidiagonal
/// pair, `γ(f)` the block swap, and `γ(g) = φ(x_j) ⊕ φ(x_k)` on the
/// commutation-row ancillas.
pub fn lift_nice(phi: &ApproxRep, g: &Lpc) -> Result<NiceLift> {
    let (target, map) = nice_embed(g)?;
    let d = phi.dim();
    let n = g.num_vars();
    let mut rep = ApproxRep::new(2 * d);
    let phi_x: Vec<CMat> = g
        .names
        .iter()
        .map(|name| source_image(phi, name))
        .collect::<Result<_>>()?;
    for (j, name) in g.names.iter().enumerate() {
        rep.assign(name.clone(), doubled(&phi_x[j]))?;
    }
    rep.assign(J, doubled(&source_image(phi, J)?))?;
    for j in 0..n {
        rep.assign(
            target.names[n + j].clone(),
            phi_x[j].direct_sum(&CMat::identity(d)),
        )?;
        rep.assign(
            target.names[2 * n + j].clone(),
            CMat::identity(d).direct_sum(&phi_x[j]),
        )?;
        rep.assign(target.names[3 * n + j].clone(), antidiag(&phi_x[j], &phi_x[j]))?;
    }
    rep.assign(target.names[4 * n].clone(), swap_blocks(d))?;
    for (t, &[_, jv, k]) in g.triples.iter().enumerate() {
        rep.assign(
            target.names[4 * n + 1 + t].clone(),
            phi_x[jv].direct_sum(&phi_x[k]),
        )?;
    }
    Ok(NiceLift {
        target,
        map,
        rep,
        constant: NICE_CONSTANT,
    })
}

/// Lift across the gadget pass (input must be nice): `2d`-dimensional, with
/// the sources doubled and the seven gadget variables per triple assigned
/// the explicit block matrices built from `φ(x_i), φ(x_j), φ(x_k)`.
pub fn lift_gadget(phi: &ApproxRep, g: &Lpc) -> Result<GadgetLift> {
    let (sys, names, map) = gadgetize(g)?;
    let d = phi.dim();
    let n = g.num_vars();
    let mut rep = ApproxRep::new(2 * d);
    for name in &g.names {
        rep.assign(name.clone(), doubled(&source_image(phi, name)?))?;
    }
    rep.assign(J, doubled(&source_image(phi, J)?))?;
    let eye = CMat::identity(d);
    for (t, &[i, jv, k]) in g.triples.iter().enumerate() {
        let (xi, xj, xk) = (
            source_image(phi, &g.names[i])?,
            source_image(phi, &g.names[jv])?,
            source_image(phi, &g.names[k])?,
        );
        let base = n + 7 * t;
        rep.assign(names[base].clone(), antidiag(&xi, &xi))?;
        rep.assign(names[base + 1].clone(), swap_blocks(d))?;
        rep.assign(names[base + 2].clone(), antidiag(&xj, &xj))?;
        rep.assign(
            names[base + 3].clone(),
            antidiag(&xj.mul(&xi), &xi.mul(&xj)),
        )?;
        rep.assign(
            names[base + 4].clone(),
            xj.mul(&xi).mul(&xj).direct_sum(&xi),
        )?;
        rep.assign(names[base + 5].clone(), xj.mul(&xk).direct_sum(&eye))?;
        rep.assign(names[base + 6].clone(), xj.direct_sum(&xk))?;
    }
    Ok(GadgetLift {
        sys,
        names,
        map,
        rep,
        constant: GADGET_CONSTANT,
    })
}

/// Composed lowering lift: `4d`-dimensional with `γ ∘ Ψ = φ^{⊕4}`
/// block-exactly and certified defect at most `75` times the input defect.
pub fn lift_compile(phi: &ApproxRep, g: &Lpc) -> Result<CompileLift> {
    let nice = lift_nice(phi, g)?;
    let gadget = lift_gadget(&nice.rep, &nice.target)?;
    let compiled = crate::compiler::compile_lpc(g)?;
    Ok(CompileLift {
        compiled,
        rep: gadget.rep,
        constant: COMPILE_CONSTANT,
    })
}

/// Lift across the elimination of non-involutary generators: one dimension
/// doubling per peeled generator. Involutary images are padded with the
/// identity (`γ(x) = φ(x) ⊕ 1`), so `φ` is the upper-left block summand of
/// `γ ∘ Ψ`; the peeled generator splits as `z ↦ swap`,
/// `w ↦ [[0, φ(y₁)*], [φ(y₁), 0]]`; ancillas are evaluated from their
/// defining words, keeping their relations exact by construction.
pub fn lift_ehlpc(phi: &ApproxRep, g: &Ehlpc) -> Result<EhlpcLift> {
    let mut current = g.clone();
    let mut rep = phi.clone();
    let mut map = GeneratorMap::identity(&g.x_names);
    for name in &g.y_names {
        map.insert(name.clone(), crate::word::GroupWord::gen(name));
    }
    let mut iteration = 1usize;
    while current.num_y() > 0 {
        let d = rep.dim();
        let (next, step_map, layout) = lower_one(&current, iteration)?;
        let y1 = rep
            .image(&current.y_names[0])
            .ok_or_else(|| {
                Error::validation(format!(
                    "lift input misses generator {:?}",
                    current.y_names[0]
                ))
            })?
            .clone();
        let mut lifted = ApproxRep::new(2 * d);
        for name in &current.x_names {
            let img = rep.image(name).ok_or_else(|| {
                Error::validation(format!("lift input misses generator {name:?}"))
            })?;
            lifted.assign(name.clone(), img.direct_sum(&CMat::identity(d)))?;
        }
        for name in &current.y_names[1..] {
            let img = rep.image(name).ok_or_else(|| {
                Error::validation(format!("lift input misses generator {name:?}"))
            })?;
            lifted.assign(name.clone(), doubled(img))?;
        }
        lifted.assign(layout.z.clone(), swap_blocks(d))?;
        lifted.assign(layout.w.clone(), antidiag(&y1.adjoint(), &y1))?;
        let w_img = lifted.image(&layout.w).unwrap().clone();
        for (xj, _xk, anc) in &layout.c1_processed {
            let xj_img = lifted.image(xj).unwrap().clone();
            lifted.assign(anc.clone(), w_img.mul(&xj_img).mul(&w_img))?;
        }
        for chain in &layout.chains {
            for (anc, word) in chain.ancillas.iter().zip(&chain.words) {
                let value = lifted.evaluate(word)?;
                lifted.assign(anc.clone(), value)?;
            }
        }
        map = map.then(&step_map)?;
        rep = lifted;
        current = next;
        iteration += 1;
    }
    let target = Hlpc::new(current.a, current.c0, current.x_names)?;
    Ok(EhlpcLift { target, map, rep })
}
