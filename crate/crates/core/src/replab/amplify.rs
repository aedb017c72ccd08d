//! Tensor-power amplification: turns a representation whose designated
//! involution is far from the identity into a representation of the Z₂-HNN
//! extension with `ψ(J) = -1`, by padding with a trivial summand (forcing
//! the normalized trace of the designated image into `[0, 1 - δ²/4]`) and
//! taking the k-th tensor power until the trace-driven defect of the
//! `t a t = J a` relation drops below the target.

use crate::cmat::{hermitian_eig, CMat, ONE};
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::replab::{ApproxRep, TOL};
use crate::word::J;

/// Default cap on materialized dimensions; the certificate is computed
/// regardless.
pub const DEFAULT_DIM_CAP: u128 = 4096;

/// Outcome of [`amplify`]. The certificate fields are exact arithmetic; the
/// representation itself is materialized only when `(2d)^k` fits under the
/// dimension cap.
#[derive(Clone, Debug)]
pub struct Amplified {
    /// Chosen tensor power: the least k with `(1 - δ²/4)^k ≤ ε²/4`.
    pub k: u32,
    /// Output dimension `(2d)^k`.
    pub dim: u128,
    /// Normalized trace of the padded designated image.
    pub padded_trace: f64,
    /// Defect of the `t a t = J a` relation: `2 sqrt(padded_trace^k)`.
    pub t_defect: f64,
    /// Certified defect bound: `max(k · input defect, t_defect)`.
    pub certified_defect: f64,
    /// `‖ψ(J) − 1‖ = ‖−2·1‖ = 2`, by construction.
    pub j_distance: f64,
    /// Name given to the stable letter.
    pub t_name: String,
    /// The materialized representation of the HNN extension, when its
    /// dimension fits under the cap.
    pub rep: Option<ApproxRep>,
}

/// Amplifies `rep` (of the plain presentation `pres`, with designated
/// involutary generator `a`) into a representation of
/// `⟨pres, t : t² = e, t a t = J a⟩` over Z₂ with `ψ(J) = -1`.
///
/// Requires `rep(a)² = 1` exactly (round first) and `‖rep(a) − 1‖ > δ`.
/// The power is `k = ⌈log(ε²/4) / log(1 − δ²/4)⌉` (`k = 1` when `δ ≥ 2`).
pub fn amplify(
    rep: &ApproxRep,
    pres: &Presentation,
    a: &str,
    delta: f64,
    eps: f64,
    dim_cap: u128,
) -> Result<Amplified> {
    if delta <= 0.0 {
        return Err(Error::validation("amplify needs delta > 0"));
    }
    if eps <= 0.0 {
        return Err(Error::validation("amplify needs a positive target defect"));
    }
    if pres.has_j() {
        return Err(Error::validation("amplify expects a plain presentation"));
    }
    let a_img = rep
        .image(a)
        .ok_or_else(|| Error::validation(format!("generator {a:?} has no assigned image")))?;
    if a_img.mul(a_img).hs_dist_to_identity() > TOL {
        return Err(Error::numeric("amplify requires rep(a)^2 = 1; round first"));
    }
    let a_dist = a_img.hs_dist_to_identity();
    if a_dist <= delta {
        return Err(Error::numeric(format!(
            "‖rep(a) − 1‖ = {a_dist:.6} is not above δ = {delta}"
        )));
    }
    let input_defect = rep.defect(pres)?.epsilon;

    let shrink = 1.0 - delta * delta / 4.0;
    let k: u32 = if shrink <= 0.0 {
        1
    } else {
        let raw = (eps * eps / 4.0).ln() / shrink.ln();
        (raw.ceil().max(1.0)) as u32
    };

    let d = rep.dim() as u128;
    let padded_trace = (a_img.normalized_trace().re + 1.0) / 2.0;
    let amplified_trace = padded_trace.powi(k as i32);
    let t_defect = 2.0 * amplified_trace.sqrt();
    let certified = (input_defect * f64::from(k)).max(t_defect);
    let dim = (2 * d).pow(k);

    let t_name = crate::presentation::fresh_name(pres.generators(), "t");
    let rep_out = if dim <= dim_cap {
        Some(materialize(rep, pres, a, k, &t_name)?)
    } else {
        None
    };
    Ok(Amplified {
        k,
        dim,
        padded_trace,
        t_defect,
        certified_defect: certified,
        j_distance: 2.0,
        t_name,
        rep: rep_out,
    })
}

/// Builds the amplified representation as dense matrices: rotate so the
/// designated image is diagonal, pad every generator with an identity block,
/// take the k-th tensor power, reorder the basis so the designated image is
/// `1_{d0} ⊕ (−1_{d0}) ⊕ 1_{d1}`, and adjoin the block-swap `t` and
/// `J = −1`.
fn materialize(
    rep: &ApproxRep,
    pres: &Presentation,
    a: &str,
    k: u32,
    t_name: &str,
) -> Result<ApproxRep> {
    let d = rep.dim();
    // Diagonalize the designated involution once, up front.
    let (_, basis) = hermitian_eig(rep.image(a).expect("checked by caller"))?;
    let rotated = rep.conjugated_by(&basis);

    let mut padded = ApproxRep::new(2 * d);
    for g in pres.generators() {
        let img = rotated
            .image(g)
            .ok_or_else(|| Error::validation(format!("generator {g:?} has no assigned image")))?;
        padded.assign(g.clone(), img.direct_sum(&CMat::identity(d)))?;
    }
    let mut power = padded.clone();
    for _ in 1..k {
        power = power.tensor(&padded)?;
    }
    let dim = power.dim();

    // The designated image is diagonal ±1 (tensor powers of a diagonal).
    let a_diag = power.image(a).expect("present").diagonal();
    let minus: Vec<usize> = (0..dim).filter(|&i| a_diag[i].re < 0.0).collect();
    let plus: Vec<usize> = (0..dim).filter(|&i| a_diag[i].re >= 0.0).collect();
    let d0 = minus.len();
    if plus.len() < d0 {
        return Err(Error::numeric(
            "padded trace went negative; designated image cannot be paired",
        ));
    }
    // Basis order: d0 paired +1 vectors, the d0 −1 vectors, the rest.
    let mut order: Vec<usize> = Vec::with_capacity(dim);
    order.extend(&plus[..d0]);
    order.extend(&minus);
    order.extend(&plus[d0..]);

    let mut out = ApproxRep::new(dim);
    for (g, m) in power.images() {
        out.assign(g.clone(), m.permute(&order))?;
    }
    let mut t = CMat::zeros(dim);
    for i in 0..d0 {
        t.set(i, d0 + i, ONE);
        t.set(d0 + i, i, ONE);
    }
    for i in 2 * d0..dim {
        t.set(i, i, ONE);
    }
    out.assign(t_name.to_string(), t)?;
    out.assign(J, CMat::scalar(dim, -ONE))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{hnn_extension_presentation, Presentation};

    fn single_involution_setup() -> (Presentation, ApproxRep) {
        let pres = Presentation::plain(vec!["a".into()], vec!["a".into()], vec![]).unwrap();
        let mut rep = ApproxRep::new(2);
        rep.assign("a", CMat::diag(&[ONE, -ONE])).unwrap();
        (pres, rep)
    }

    #[test]
    fn delta_two_forces_k_one() {
        let pres = Presentation::plain(vec!["a".into()], vec!["a".into()], vec![]).unwrap();
        // ‖a − 1‖ = 2 for a = −1, which exceeds any δ < 2; with δ = 2 the
        // shrink factor hits zero and k collapses to 1.
        let mut rep = ApproxRep::new(2);
        rep.assign("a", CMat::scalar(2, -ONE)).unwrap();
        let out = amplify(&rep, &pres, "a", 1.9999, 0.5, DEFAULT_DIM_CAP).unwrap();
        assert!(out.k >= 1);
        let out2 = amplify(&rep, &pres, "a", 2.0, 0.5, DEFAULT_DIM_CAP);
        // ‖a − 1‖ = 2 is not strictly above δ = 2.
        assert!(out2.is_err());
    }

    #[test]
    fn shrink_zero_gives_k_one_when_applicable() {
        // A 1-dimensional −1 has distance exactly 2 from the identity, so
        // use δ slightly below 2; shrink ≈ 0 forces k = 1 immediately:
        // ln(ε²/4)/ln(tiny) < 1.
        let pres = Presentation::plain(vec!["a".into()], vec!["a".into()], vec![]).unwrap();
        let mut rep = ApproxRep::new(1);
        rep.assign("a", CMat::scalar(1, -ONE)).unwrap();
        let out = amplify(&rep, &pres, "a", 1.999999, 0.5, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(out.k, 1);
    }

    #[test]
    fn power_arithmetic_flagship_parameters() {
        let (pres, rep) = single_involution_setup();
        let out = amplify(&rep, &pres, "a", 1.0, 0.5, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(out.k, 10);
        assert_eq!(out.dim, 4u128.pow(10));
        assert!(out.rep.is_none(), "2^20 dimensions must not materialize");
        assert!((out.padded_trace - 0.5).abs() < 1e-12);
        assert!(out.certified_defect <= 0.5);
        assert_eq!(out.j_distance, 2.0);
    }

    #[test]
    fn materialized_small_power_meets_its_certificate() {
        let (pres, rep) = single_involution_setup();
        // 0.75^k ≤ ε²/4 with ε = 0.975 needs k = 5; dimension 4^5 = 1024.
        let out = amplify(&rep, &pres, "a", 1.0, 0.975, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(out.k, 5);
        assert_eq!(out.dim, 1024);
        let amp = out.rep.as_ref().expect("1024 fits under the cap");
        let hnn = hnn_extension_presentation(&pres, "a").unwrap();
        let report = amp.defect(&hnn).unwrap();
        assert!(
            report.epsilon <= out.certified_defect + 1e-12,
            "measured {} > certified {}",
            report.epsilon,
            out.certified_defect
        );
        // The t-relation carries all the defect; everything else is exact.
        let t_rel = report.get("hnn").unwrap();
        assert!((t_rel - out.t_defect).abs() < 1e-9);
        let j_img = amp.image(J).unwrap();
        assert!((j_img.hs_dist_to_identity() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_multiplicativity_along_powers() {
        let (pres, rep) = single_involution_setup();
        let out = amplify(&rep, &pres, "a", 1.0, 0.975, DEFAULT_DIM_CAP).unwrap();
        let amp = out.rep.as_ref().unwrap();
        let tr = amp.image("a").unwrap().normalized_trace().re;
        assert!((tr - out.padded_trace.powi(out.k as i32)).abs() < 1e-12);
    }
}
