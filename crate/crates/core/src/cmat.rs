//! Dense square complex matrices with the normalized Hilbert-Schmidt norm,
//! Kronecker/direct-sum construction, a cyclic Jacobi eigensolver for
//! Hermitian matrices, and simultaneous diagonalization of commuting
//! Hermitian families.
//!
//! Everything here is double precision, row-major, and deterministic; the
//! eigensolver is Jacobi rather than QR because the matrices we round are
//! small, Hermitian, and need reliably orthonormal eigenbases.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

/// A square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    d: usize,
    a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "matrix dimension must be positive");
        Self {
            d,
            a: vec![ZERO; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn scalar(d: usize, z: Complex64) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.set(i, i, z);
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.d + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.a[i * self.d + j] = z;
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        for i in 0..self.d {
            for j in 0..self.d {
                if i != j && self.get(i, j).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.d).map(|i| self.get(i, i)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        Self {
            d: self.d,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        Self {
            d: self.d,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            d: self.d,
            a: self.a.iter().map(|x| x * z).collect(),
        }
    }

    /// Matrix product, cache-friendly ikj order.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "dimension mismatch in matrix product");
        let d = self.d;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = self.a[i * d + k];
                if aik == ZERO {
                    continue;
                }
                let row_b = &other.a[k * d..(k + 1) * d];
                let row_o = &mut out[i * d..(i + 1) * d];
                for (o, &b) in row_o.iter_mut().zip(row_b) {
                    *o += aik * b;
                }
            }
        }
        Self { d, a: out }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.d, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.d, |i, j| self.get(j, i))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.d).map(|i| self.get(i, i)).sum()
    }

    /// tr(M) / dim.
    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / self.d as f64
    }

    /// Normalized Hilbert-Schmidt norm: sqrt(tr(M* M) / dim).
    pub fn hs_norm(&self) -> f64 {
        let sum: f64 = self.a.iter().map(|z| z.norm_sqr()).sum();
        (sum / self.d as f64).sqrt()
    }

    /// ‖A − B‖ in the normalized Hilbert-Schmidt norm.
    pub fn hs_dist(&self, other: &Self) -> f64 {
        assert_eq!(self.d, other.d);
        let sum: f64 = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        (sum / self.d as f64).sqrt()
    }

    /// ‖M − 1‖ in the normalized Hilbert-Schmidt norm.
    pub fn hs_dist_to_identity(&self) -> f64 {
        self.hs_dist(&Self::identity(self.d))
    }

    /// Largest entry-wise absolute difference; used for exact block-copy
    /// equality checks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.d, other.d);
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().mul(self).hs_dist_to_identity() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hs_dist(&self.adjoint()) <= tol
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.d, other.d);
        let d = da * db;
        let mut out = Self::zeros(d);
        for i in 0..da {
            for j in 0..da {
                let aij = self.get(i, j);
                if aij == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out.set(i * db + k, j * db + l, aij * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let d = self.d + other.d;
        let mut out = Self::zeros(d);
        for i in 0..self.d {
            for j in 0..self.d {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.d {
            for j in 0..other.d {
                out.set(self.d + i, self.d + j, other.get(i, j));
            }
        }
        out
    }

    /// Builds a 2x2 block matrix [[a, b], [c, d]] from equal-dimension blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, dd: &Self) -> Self {
        let n = a.d;
        assert!(b.d == n && c.d == n && dd.d == n, "block dimension mismatch");
        let mut out = Self::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, a.get(i, j));
                out.set(i, n + j, b.get(i, j));
                out.set(n + i, j, c.get(i, j));
                out.set(n + i, n + j, dd.get(i, j));
            }
        }
        out
    }

    /// Extracts the square block with rows and columns `range`.
    pub fn block(&self, start: usize, len: usize) -> Self {
        Self::from_fn(len, |i, j| self.get(start + i, start + j))
    }

    /// Conjugation U* A U (change of basis into U's column frame).
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.adjoint().mul(self).mul(u)
    }

    /// Applies a permutation to rows and columns: `out[i][j] = A[p[i]][p[j]]`.
    pub fn permute(&self, p: &[usize]) -> Self {
        assert_eq!(p.len(), self.d);
        Self::from_fn(self.d, |i, j| self.get(p[i], p[j]))
    }

    /// Commutator norm ‖AB − BA‖ (normalized Hilbert-Schmidt).
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        self.mul(other).hs_dist(&other.mul(self))
    }
}

/// Eigendecomposition A = U diag(λ) U* of a Hermitian matrix, eigenvalues
/// ascending. Cyclic Jacobi with complex rotations; deterministic.
pub fn hermitian_eig(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let d = m.dim();
    if !m.is_hermitian(1e-9) {
        return Err(Error::numeric("hermitian_eig: input is not Hermitian"));
    }
    let mut a = m.clone();
    // Symmetrize exactly so rounding noise cannot accumulate.
    for i in 0..d {
        for j in 0..d {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * Complex64::new(0.5, 0.0);
            a.set(i, j, avg);
        }
    }
    let mut u = CMat::identity(d);
    let scale = a.hs_norm().max(1e-300);
    let tol = 1e-15 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in p + 1..d {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let g = a.get(p, q);
                let gn = g.norm();
                if gn <= tol * 1e-2 {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let beta = a.get(q, q).re;
                let phase = g / gn;
                let tau = (beta - alpha) / (2.0 * gn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation V on (p, q): col_p' = c*col_p - s*conj(phase)*col_q
                //                              col_q' = s*phase*col_p + c*col_q
                let (cp, cq) = (Complex64::new(c, 0.0), Complex64::new(c, 0.0));
                let sp = phase * s;
                for r in 0..d {
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    a.set(r, p, arp * cp - arq * sp.conj());
                    a.set(r, q, arp * sp + arq * cq);
                }
                for cidx in 0..d {
                    let apc = a.get(p, cidx);
                    let aqc = a.get(q, cidx);
                    a.set(p, cidx, apc * cp - aqc * sp);
                    a.set(q, cidx, apc * sp.conj() + aqc * cq);
                }
                for r in 0..d {
                    let urp = u.get(r, p);
                    let urq = u.get(r, q);
                    u.set(r, p, urp * cp - urq * sp.conj());
                    u.set(r, q, urp * sp + urq * cq);
                }
            }
        }
    }
    let mut eigs: Vec<(f64, usize)> = (0..d).map(|i| (a.get(i, i).re, i)).collect();
    eigs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
    let values: Vec<f64> = eigs.iter().map(|&(v, _)| v).collect();
    let sorted_u = CMat::from_fn(d, |i, j| u.get(i, eigs[j].1));
    Ok((values, sorted_u))
}

/// Simultaneous diagonalization of a family of pairwise-commuting Hermitian
/// matrices. Returns a unitary `U` with every `U* X U` diagonal.
///
/// First tries a generic real linear combination (fixed pseudo-random
/// coefficients); if any residual exceeds the tolerance, falls back to
/// sequential block refinement with eigenvalue clustering at `cluster_tol`.
pub fn simultaneous_diagonalize(family: &[&CMat], cluster_tol: f64) -> Result<CMat> {
    let Some(first) = family.first() else {
        return Err(Error::numeric("simultaneous_diagonalize: empty family"));
    };
    let d = first.dim();
    for x in family {
        if x.dim() != d {
            return Err(Error::numeric("simultaneous_diagonalize: dimension mismatch"));
        }
        if !x.is_hermitian(1e-8) {
            return Err(Error::numeric("simultaneous_diagonalize: non-Hermitian member"));
        }
    }
    let scale = family.iter().map(|x| x.hs_norm()).fold(1.0, f64::max);
    let residual_tol = 1e-10 * scale;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CAFE);
    let mut combo = CMat::zeros(d);
    for x in family {
        let c = Complex64::new(rng.gen_range(1.0..2.0), 0.0);
        combo = combo.add(&x.scale(c));
    }
    let (_, u) = hermitian_eig(&combo)?;
    if family
        .iter()
        .all(|x| off_diag_max(&x.conjugate_by(&u)) <= residual_tol)
    {
        return Ok(u);
    }
    sequential_block_diagonalize(family, cluster_tol, residual_tol)
}

/// Fallback path: diagonalize each member inside the joint eigenvalue
/// blocks established by the previous members, splitting blocks by
/// eigenvalue clusters.
fn sequential_block_diagonalize(
    family: &[&CMat],
    cluster_tol: f64,
    residual_tol: f64,
) -> Result<CMat> {
    let d = family[0].dim();
    let mut u = CMat::identity(d);
    let mut blocks: Vec<(usize, usize)> = vec![(0, d)];
    for x in family {
        let rotated = x.conjugate_by(&u);
        let mut next_blocks = Vec::new();
        for &(start, len) in &blocks {
            let sub = rotated.block(start, len);
            let (values, v) = hermitian_eig(&sub)?;
            // Fold the block rotation into U.
            let mut unew = u.clone();
            for r in 0..d {
                for c in 0..len {
                    let mut acc = ZERO;
                    for k in 0..len {
                        acc += u.get(r, start + k) * v.get(k, c);
                    }
                    unew.set(r, start + c, acc);
                }
            }
            u = unew;
            // Split the block by clustered eigenvalues.
            let mut cluster_start = 0usize;
            for idx in 1..=len {
                if idx == len || values[idx] - values[idx - 1] > cluster_tol {
                    next_blocks.push((start + cluster_start, idx - cluster_start));
                    cluster_start = idx;
                }
            }
        }
        blocks = next_blocks;
    }
    for x in family {
        if off_diag_max(&x.conjugate_by(&u)) > residual_tol * 10.0 {
            return Err(Error::numeric(
                "simultaneous_diagonalize: family does not commute within tolerance",
            ));
        }
    }
    Ok(u)
}

fn off_diag_max(m: &CMat) -> f64 {
    let d = m.dim();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                worst = worst.max(m.get(i, j).norm());
            }
        }
    }
    worst
}

/// exp(i t H) for Hermitian H, via eigendecomposition.
pub fn exp_i_hermitian(h: &CMat, t: f64) -> Result<CMat> {
    let (values, u) = hermitian_eig(h)?;
    let phases: Vec<Complex64> = values
        .iter()
        .map(|&v| Complex64::from_polar(1.0, t * v))
        .collect();
    Ok(u.mul(&CMat::diag(&phases)).mul(&u.adjoint()))
}

/// Haar-ish random unitary: complex Gaussian matrix orthonormalized by
/// modified Gram-Schmidt (run twice for stability).
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMat {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| Complex64::new(gauss(rng), gauss(rng)))
                .collect()
        })
        .collect();
    for _pass in 0..2 {
        for j in 0..d {
            for k in 0..j {
                let proj: Complex64 = (0..d).map(|r| cols[k][r].conj() * cols[j][r]).sum();
                let prev = cols[k].clone();
                for (entry, base) in cols[j].iter_mut().zip(&prev) {
                    *entry -= proj * base;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for entry in cols[j].iter_mut() {
                *entry /= norm;
            }
        }
    }
    CMat::from_fn(d, |i, j| cols[j][i])
}

/// Random Hermitian matrix with normalized Hilbert-Schmidt norm 1.
pub fn random_hermitian_unit(rng: &mut impl Rng, d: usize) -> CMat {
    let g = CMat::from_fn(d, |_, _| Complex64::new(gauss(rng), gauss(rng)));
    let h = g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
    let norm = h.hs_norm();
    h.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Multiplies `u` by a random small unitary perturbation `e^{i eps H}` with
/// ‖H‖ = 1 in the normalized Hilbert-Schmidt norm.
pub fn perturb_unitary(rng: &mut impl Rng, u: &CMat, eps: f64) -> CMat {
    let h = random_hermitian_unit(rng, u.dim());
    let phase = exp_i_hermitian(&h, eps).expect("random Hermitian is Hermitian");
    u.mul(&phase)
}

fn gauss(rng: &mut impl Rng) -> f64 {
    // Box-Muller; deterministic for a seeded rng.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hs_norm_identity_is_one() {
        assert!((CMat::identity(5).hs_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hs_norm_scalar_matrix() {
        let m = CMat::scalar(3, Complex64::new(-2.0, 0.0));
        assert!((m.hs_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hs_norm_involution_minus_identity() {
        let m = CMat::diag(&[ONE, -ONE]).sub(&CMat::identity(2));
        assert!((m.hs_norm() - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &d in &[2usize, 3, 5, 8, 16] {
            let h = random_hermitian_unit(&mut rng, d);
            let (values, u) = hermitian_eig(&h).unwrap();
            assert!(u.is_unitary(1e-11), "eigenvectors not unitary at d={d}");
            let lam = CMat::diag(&values.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>());
            let rebuilt = u.mul(&lam).mul(&u.adjoint());
            assert!(h.hs_dist(&rebuilt) < 1e-11, "reconstruction failed at d={d}");
            assert!(values.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        }
    }

    #[test]
    fn sim_diag_commuting_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = 8;
        let basis = random_unitary(&mut rng, d);
        let mk = |pattern: &[f64]| {
            let diag = CMat::diag(
                &pattern
                    .iter()
                    .map(|&v| Complex64::new(v, 0.0))
                    .collect::<Vec<_>>(),
            );
            basis.mul(&diag).mul(&basis.adjoint())
        };
        let x1 = mk(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
        let x2 = mk(&[1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]);
        let x3 = mk(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        let u = simultaneous_diagonalize(&[&x1, &x2, &x3], 1e-8).unwrap();
        for x in [&x1, &x2, &x3] {
            assert!(x.conjugate_by(&u).is_diagonal(1e-9));
        }
    }

    #[test]
    fn sequential_fallback_diagonalizes_degenerate_families() {
        // Families with repeated joint eigenvalues exercise the block
        // refinement directly.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = 8;
        let basis = random_unitary(&mut rng, d);
        let mk = |pattern: &[f64]| {
            let diag = CMat::diag(
                &pattern
                    .iter()
                    .map(|&v| Complex64::new(v, 0.0))
                    .collect::<Vec<_>>(),
            );
            basis.mul(&diag).mul(&basis.adjoint())
        };
        let x1 = mk(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
        let x2 = mk(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        let x3 = mk(&[1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0, 1.0]);
        let u = sequential_block_diagonalize(&[&x1, &x2, &x3], 1e-8, 1e-10).unwrap();
        assert!(u.is_unitary(1e-10));
        for x in [&x1, &x2, &x3] {
            assert!(x.conjugate_by(&u).is_diagonal(1e-9));
        }
    }

    #[test]
    fn sequential_fallback_rejects_noncommuting_input() {
        // Two anticommuting involutions cannot be jointly diagonalized; the
        // residual check must catch it.
        let x = CMat::from_fn(2, |i, j| if i != j { ONE } else { ZERO });
        let z = CMat::diag(&[ONE, -ONE]);
        assert!(sequential_block_diagonalize(&[&x, &z], 1e-8, 1e-10).is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let h = CMat::zeros(3);
        let e = exp_i_hermitian(&h, 1.0).unwrap();
        assert!(e.hs_dist_to_identity() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &d in &[2usize, 5, 12] {
            assert!(random_unitary(&mut rng, d).is_unitary(1e-11));
        }
    }

    #[test]
    fn kron_of_identities() {
        let k = CMat::identity(2).kron(&CMat::identity(3));
        assert!(k.hs_dist(&CMat::identity(6)) < 1e-15);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_unitary(&mut rng, 2);
        let b = random_unitary(&mut rng, 3);
        let c = random_unitary(&mut rng, 2);
        let d = random_unitary(&mut rng, 3);
        let lhs = a.kron(&b).mul(&c.kron(&d));
        let rhs = a.mul(&c).kron(&b.mul(&d));
        assert!(lhs.hs_dist(&rhs) < 1e-12);
    }

    #[test]
    fn perturbation_stays_unitary_and_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 4);
        let v = perturb_unitary(&mut rng, &u, 0.05);
        assert!(v.is_unitary(1e-10));
        assert!(u.hs_dist(&v) < 0.06);
    }
}
