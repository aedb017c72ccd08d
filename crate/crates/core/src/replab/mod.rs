//! Finite-dimensional approximate representations: unitary assignments to
//! generators, per-relation defect measurement in the normalized
//! Hilbert-Schmidt norm, direct sums and tensor products, stability
//! roundings, block-matrix lifts along the compiler passes, tensor-power
//! amplification, and a brute-force finite-homomorphism search.

pub mod amplify;
pub mod homs;
pub mod lift;
pub mod reps;
pub mod stability;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use crate::cmat::{perturb_unitary, CMat, ONE};
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::{GroupWord, J};

/// Unitarity / postcondition tolerance used throughout the lab.
pub const TOL: f64 = 1e-9;

/// A dimension together with a unitary matrix per generator.
///
/// Every assigned matrix must be unitary to `1e-9` in the normalized
/// Hilbert-Schmidt norm; assignment enforces this. The distinguished
/// generator `J` evaluates to its assigned image, or to `-1` by convention
/// when unassigned (the J-split normal form).
#[derive(Clone, Debug)]
pub struct ApproxRep {
    dim: usize,
    images: BTreeMap<String, CMat>,
}

impl ApproxRep {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            dim,
            images: BTreeMap::new(),
        }
    }

    /// Identity assignment (including `J -> 1`) for every generator of a
    /// presentation; exact for any presentation whose relations balance.
    pub fn trivial(pres: &Presentation, dim: usize) -> Self {
        let mut rep = Self::new(dim);
        for g in pres.generators() {
            rep.images.insert(g.clone(), CMat::identity(dim));
        }
        rep
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn assign(&mut self, gen: impl Into<String>, mat: CMat) -> Result<()> {
        if mat.dim() != self.dim {
            return Err(Error::validation(format!(
                "image dimension {} does not match representation dimension {}",
                mat.dim(),
                self.dim
            )));
        }
        if !mat.is_unitary(TOL) {
            return Err(Error::numeric("assigned matrix is not unitary to 1e-9"));
        }
        self.images.insert(gen.into(), mat);
        Ok(())
    }

    pub fn image(&self, gen: &str) -> Option<&CMat> {
        self.images.get(gen)
    }

    pub fn generators(&self) -> impl Iterator<Item = &String> {
        self.images.keys()
    }

    pub fn images(&self) -> impl Iterator<Item = (&String, &CMat)> {
        self.images.iter()
    }

    fn image_or_default(&self, gen: &str) -> Result<CMat> {
        if let Some(m) = self.images.get(gen) {
            return Ok(m.clone());
        }
        if gen == J {
            return Ok(CMat::scalar(self.dim, -ONE));
        }
        Err(Error::validation(format!("generator {gen:?} has no assigned image")))
    }

    /// Word evaluation: the product of images, adjoints standing in for
    /// inverses. The empty word is the identity.
    pub fn evaluate(&self, w: &GroupWord) -> Result<CMat> {
        let mut out = CMat::identity(self.dim);
        for letter in w.letters() {
            let img = self.image_or_default(&letter.gen)?;
            out = if letter.inv {
                out.mul(&img.adjoint())
            } else {
                out.mul(&img)
            };
        }
        Ok(out)
    }

    /// Per-relation defects `‖φ(r) − 1‖` and their maximum.
    pub fn defect(&self, pres: &Presentation) -> Result<DefectReport> {
        let mut per_relation = Vec::with_capacity(pres.relations().len());
        let mut epsilon = 0.0f64;
        for rel in pres.relations() {
            let d = self.evaluate(&rel.word)?.hs_dist_to_identity();
            epsilon = epsilon.max(d);
            per_relation.push((rel.label.clone(), d));
        }
        Ok(DefectReport {
            per_relation,
            epsilon,
        })
    }

    /// Blockwise direct sum; the defect of the sum is the max of the parts.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.check_same_generators(other)?;
        let mut out = Self::new(self.dim + other.dim);
        for (g, m) in &self.images {
            out.images
                .insert(g.clone(), m.direct_sum(&other.images[g]));
        }
        Ok(out)
    }

    /// Kronecker product; the defect of the product is at most the sum of
    /// the parts.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_same_generators(other)?;
        let mut out = Self::new(self.dim * other.dim);
        for (g, m) in &self.images {
            out.images.insert(g.clone(), m.kron(&other.images[g]));
        }
        Ok(out)
    }

    fn check_same_generators(&self, other: &Self) -> Result<()> {
        if self.images.keys().ne(other.images.keys()) {
            return Err(Error::validation(
                "representations assign different generator sets",
            ));
        }
        Ok(())
    }

    /// Multiplies every image (optionally excepting `J`) by an independent
    /// random perturbation `e^{i eps H}`.
    pub fn perturbed(&self, rng: &mut impl Rng, eps: f64, perturb_j: bool) -> Self {
        let mut out = self.clone();
        for (g, m) in &self.images {
            if g == J && !perturb_j {
                continue;
            }
            out.images.insert(g.clone(), perturb_unitary(rng, m, eps));
        }
        out
    }

    /// Conjugates every image by the same unitary.
    pub fn conjugated_by(&self, u: &CMat) -> Self {
        let mut out = Self::new(self.dim);
        for (g, m) in &self.images {
            out.images.insert(g.clone(), m.conjugate_by(u));
        }
        out
    }

    /// JSON form: dimension, generator names, and row-major matrices as
    /// `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<&String> = self.images.keys().collect();
        let mats: serde_json::Map<String, serde_json::Value> = self
            .images
            .iter()
            .map(|(g, m)| {
                let rows: Vec<serde_json::Value> = (0..m.dim())
                    .map(|i| {
                        let row: Vec<serde_json::Value> = (0..m.dim())
                            .map(|j| {
                                let z = m.get(i, j);
                                json!([z.re, z.im])
                            })
                            .collect();
                        json!(row)
                    })
                    .collect();
                (g.clone(), json!(rows))
            })
            .collect();
        json!({
            "dim": self.dim,
            "generators": gens,
            "matrices": mats,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let dim = value["dim"]
            .as_u64()
            .ok_or_else(|| Error::validation("representation JSON: missing dim"))?
            as usize;
        let mats = value["matrices"]
            .as_object()
            .ok_or_else(|| Error::validation("representation JSON: missing matrices"))?;
        let mut rep = Self::new(dim);
        for (g, rows) in mats {
            let rows = rows
                .as_array()
                .ok_or_else(|| Error::validation("matrix must be an array of rows"))?;
            if rows.len() != dim {
                return Err(Error::validation(format!(
                    "matrix {g:?} has {} rows, expected {dim}",
                    rows.len()
                )));
            }
            let mut m = CMat::zeros(dim);
            for (i, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .ok_or_else(|| Error::validation("matrix row must be an array"))?;
                if row.len() != dim {
                    return Err(Error::validation(format!(
                        "matrix {g:?} row {i} has {} entries, expected {dim}",
                        row.len()
                    )));
                }
                for (j, entry) in row.iter().enumerate() {
                    let pair = entry
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::validation("matrix entry must be [re, im]"))?;
                    let re = pair[0]
                        .as_f64()
                        .ok_or_else(|| Error::validation("matrix entry must be numeric"))?;
                    let im = pair[1]
                        .as_f64()
                        .ok_or_else(|| Error::validation("matrix entry must be numeric"))?;
                    m.set(i, j, Complex64::new(re, im));
                }
            }
            rep.assign(g.clone(), m)?;
        }
        Ok(rep)
    }
}

/// Per-relation defects of a representation against a presentation;
/// `epsilon` is the maximum.
#[derive(Clone, Debug)]
pub struct DefectReport {
    pub per_relation: Vec<(String, f64)>,
    pub epsilon: f64,
}

impl DefectReport {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.per_relation
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, d)| d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "epsilon": self.epsilon,
            "per_relation": self.per_relation.iter()
                .map(|(l, d)| json!({"relation": l, "defect": d}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Normalized Hilbert-Schmidt norm `sqrt(tr(M* M) / dim)`.
pub fn hs_norm(m: &CMat) -> f64 {
    m.hs_norm()
}
