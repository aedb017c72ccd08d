//! Exact linear algebra over GF(2): systems, row supports, satisfying
//! assignments, and Gaussian elimination.
//!
//! Rows are bit-packed in `u64` words, so the column count is bounded only by
//! memory. All enumeration orders are deterministic (lexicographic), which
//! keeps serialized output byte-stable.

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn word_count(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// A bit-packed row vector over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Addition in GF(2).
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor_assign: length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit, if any.
    pub fn lowest_set(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                let i = wi * WORD_BITS + w.trailing_zeros() as usize;
                if i < self.len {
                    return Some(i);
                }
            }
        }
        None
    }

    /// Ascending indices of set bits.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// An m×n linear system `Ax = b` over GF(2).
///
/// Invariants enforced at construction: `m, n >= 1` and every row has at
/// least one nonzero entry (a game needs a nonempty variable set per
/// equation, so empty rows are rejected outright).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryLinearSystem {
    m: usize,
    n: usize,
    rows: Vec<BitRow>,
    b: Vec<bool>,
}

impl BinaryLinearSystem {
    /// Builds a system from per-row column supports and the right-hand side.
    ///
    /// Column indices are 0-based. Duplicate indices within a row are an
    /// error (the matrix entry is a single bit).
    pub fn from_supports(n: usize, rows: &[Vec<usize>], b: &[bool]) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("system must have n >= 1 columns"));
        }
        if rows.is_empty() {
            return Err(Error::validation("system must have m >= 1 rows"));
        }
        if rows.len() != b.len() {
            return Err(Error::validation(format!(
                "row count {} does not match rhs length {}",
                rows.len(),
                b.len()
            )));
        }
        let mut packed = Vec::with_capacity(rows.len());
        for (i, support) in rows.iter().enumerate() {
            if support.is_empty() {
                return Err(Error::validation(format!("row {i} has empty support")));
            }
            let mut row = BitRow::zeros(n);
            for &j in support {
                if j >= n {
                    return Err(Error::validation(format!(
                        "row {i}: column index {j} out of range (n={n})"
                    )));
                }
                if row.get(j) {
                    return Err(Error::validation(format!(
                        "row {i}: duplicate column index {j}"
                    )));
                }
                row.set(j, true);
            }
            packed.push(row);
        }
        Ok(Self {
            m: rows.len(),
            n,
            rows: packed,
            b: b.to_vec(),
        })
    }

    /// The Mermin-Peres magic square: 9 variables in a 3×3 grid
    /// (variable `3r + c` sits at row r, column c), three row-parity
    /// equations with rhs 0 and three column-parity equations with
    /// rhs 0, 0, 1. GF(2)-inconsistent, yet operator-solvable.
    pub fn magic_square() -> Self {
        let mut supports = Vec::new();
        let mut b = Vec::new();
        for r in 0..3 {
            supports.push(vec![3 * r, 3 * r + 1, 3 * r + 2]);
            b.push(false);
        }
        for c in 0..3 {
            supports.push(vec![c, c + 3, c + 6]);
            b.push(c == 2);
        }
        Self::from_supports(9, &supports, &b).expect("magic square is well-formed")
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn num_cols(&self) -> usize {
        self.n
    }

    pub fn rhs(&self, i: usize) -> bool {
        self.b[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn row(&self, i: usize) -> &BitRow {
        &self.rows[i]
    }

    /// `V_i`: ascending column indices of the variables in equation `i`.
    pub fn row_support(&self, i: usize) -> Result<Vec<usize>> {
        if i >= self.m {
            return Err(Error::validation(format!(
                "row index {i} out of range (m={})",
                self.m
            )));
        }
        Ok(self.rows[i].support())
    }

    /// All assignments to the variables of `V_i` satisfying equation `i`,
    /// in lexicographic order (first support variable most significant).
    ///
    /// Each assignment is aligned with `row_support(i)`; the list has
    /// exactly `2^(|V_i|-1)` entries.
    pub fn satisfying_assignments(&self, i: usize) -> Result<Vec<Vec<bool>>> {
        let support = self.row_support(i)?;
        let k = support.len();
        let want = self.b[i];
        let mut out = Vec::with_capacity(1 << (k - 1));
        for v in 0..(1u64 << k) {
            let bits: Vec<bool> = (0..k).map(|p| (v >> (k - 1 - p)) & 1 == 1).collect();
            let parity = bits.iter().filter(|&&x| x).count() % 2 == 1;
            if parity == want {
                out.push(bits);
            }
        }
        Ok(out)
    }

    /// Gaussian elimination with deterministic pivoting: for each column in
    /// ascending order, the first unused row with a 1 in that column becomes
    /// the pivot. Free variables are set to 0.
    ///
    /// Returns a solution of `Ax = b`, or `None` when inconsistent.
    pub fn solve(&self) -> Option<Vec<bool>> {
        let mut rows = self.rows.clone();
        let mut rhs = self.b.clone();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; self.n];
        let mut next_row = 0usize;
        for col in 0..self.n {
            let Some(pivot) = (next_row..self.m).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next_row, pivot);
            rhs.swap(next_row, pivot);
            for r in 0..self.m {
                if r != next_row && rows[r].get(col) {
                    let (src, dst) = if r < next_row {
                        let (a, c) = rows.split_at_mut(next_row);
                        (&c[0], &mut a[r])
                    } else {
                        let (a, c) = rows.split_at_mut(r);
                        (&a[next_row], &mut c[0])
                    };
                    dst.xor_assign(src);
                    rhs[r] ^= rhs[next_row];
                }
            }
            pivot_of_col[col] = Some(next_row);
            next_row += 1;
            if next_row == self.m {
                break;
            }
        }
        // Any zero row with rhs 1 means the system is inconsistent.
        for r in 0..self.m {
            if rows[r].is_zero() && rhs[r] {
                return None;
            }
        }
        let mut x = vec![false; self.n];
        for col in 0..self.n {
            if let Some(r) = pivot_of_col[col] {
                x[col] = rhs[r];
            }
        }
        debug_assert!(self.check(&x));
        Some(x)
    }

    /// Whether `x` satisfies `Ax = b` exactly.
    pub fn check(&self, x: &[bool]) -> bool {
        if x.len() != self.n {
            return false;
        }
        (0..self.m).all(|i| {
            let parity = self.rows[i]
                .support()
                .iter()
                .filter(|&&j| x[j])
                .count()
                % 2
                == 1;
            parity == self.b[i]
        })
    }

    /// Serializes to the `.lsys` text format: a `m n` header line, then `m`
    /// lines of `n` characters in {0,1}, then one line of `m` characters
    /// for `b`. Newline-terminated.
    pub fn to_lsys(&self) -> String {
        let mut out = format!("{} {}\n", self.m, self.n);
        for row in &self.rows {
            for j in 0..self.n {
                out.push(if row.get(j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        for &bit in &self.b {
            out.push(if bit { '1' } else { '0' });
        }
        out.push('\n');
        out
    }

    /// Parses the `.lsys` text format.
    pub fn from_lsys(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::validation("empty .lsys input"))?;
        let mut parts = header.split_whitespace();
        let m: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::validation("bad .lsys header"))?;
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::validation("bad .lsys header"))?;
        if parts.next().is_some() {
            return Err(Error::validation("bad .lsys header: trailing tokens"));
        }
        let mut supports = Vec::with_capacity(m);
        for i in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::validation(format!("missing matrix row {i}")))?;
            if line.chars().count() != n {
                return Err(Error::validation(format!(
                    "matrix row {i} has {} characters, expected {n}",
                    line.chars().count()
                )));
            }
            let mut support = Vec::new();
            for (j, c) in line.chars().enumerate() {
                match c {
                    '1' => support.push(j),
                    '0' => {}
                    _ => {
                        return Err(Error::validation(format!(
                            "matrix row {i}: invalid character {c:?}"
                        )))
                    }
                }
            }
            supports.push(support);
        }
        let bline = lines
            .next()
            .ok_or_else(|| Error::validation("missing rhs line"))?;
        if bline.chars().count() != m {
            return Err(Error::validation(format!(
                "rhs line has {} characters, expected {m}",
                bline.chars().count()
            )));
        }
        let b: Vec<bool> = bline
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::validation(format!("rhs: invalid character {c:?}"))),
            })
            .collect::<Result<_>>()?;
        Self::from_supports(n, &supports, &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: try all 2^n assignments.
    fn exhaustive_solve(sys: &BinaryLinearSystem) -> Option<Vec<bool>> {
        let n = sys.num_cols();
        assert!(n <= 20, "oracle only for small n");
        for v in 0..(1u64 << n) {
            let x: Vec<bool> = (0..n).map(|j| (v >> j) & 1 == 1).collect();
            if sys.check(&x) {
                return Some(x);
            }
        }
        None
    }

    #[test]
    fn row_support_single_entry() {
        let sys = BinaryLinearSystem::from_supports(1, &[vec![0]], &[true]).unwrap();
        assert_eq!(sys.row_support(0).unwrap(), vec![0]);
    }

    #[test]
    fn row_support_magic_square_first_row() {
        let sys = BinaryLinearSystem::magic_square();
        assert_eq!(sys.row_support(0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn row_support_full() {
        let sys =
            BinaryLinearSystem::from_supports(4, &[vec![0, 1, 2, 3]], &[false]).unwrap();
        assert_eq!(sys.row_support(0).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn row_support_out_of_range() {
        let sys = BinaryLinearSystem::from_supports(1, &[vec![0]], &[true]).unwrap();
        assert!(sys.row_support(1).is_err());
    }

    #[test]
    fn satisfying_assignments_parity_even_pair() {
        let sys = BinaryLinearSystem::from_supports(2, &[vec![0, 1]], &[false]).unwrap();
        assert_eq!(
            sys.satisfying_assignments(0).unwrap(),
            vec![vec![false, false], vec![true, true]]
        );
    }

    #[test]
    fn satisfying_assignments_odd_triples() {
        // Oracle: enumerate all 8 triples and keep odd parity; the expected
        // list {001, 010, 100, 111} is frozen below.
        let sys =
            BinaryLinearSystem::from_supports(3, &[vec![0, 1, 2]], &[true]).unwrap();
        let mut oracle = Vec::new();
        for v in 0..8u32 {
            let bits = vec![v & 4 != 0, v & 2 != 0, v & 1 != 0];
            if bits.iter().filter(|&&x| x).count() % 2 == 1 {
                oracle.push(bits);
            }
        }
        let got = sys.satisfying_assignments(0).unwrap();
        assert_eq!(got, oracle);
        assert_eq!(
            got,
            vec![
                vec![false, false, true],
                vec![false, true, false],
                vec![true, false, false],
                vec![true, true, true],
            ]
        );
    }

    #[test]
    fn satisfying_assignments_forced() {
        let sys = BinaryLinearSystem::from_supports(1, &[vec![0]], &[true]).unwrap();
        assert_eq!(sys.satisfying_assignments(0).unwrap(), vec![vec![true]]);
    }

    #[test]
    fn solve_identity_zero_rhs() {
        let sys = BinaryLinearSystem::from_supports(
            3,
            &[vec![0], vec![1], vec![2]],
            &[false, false, false],
        )
        .unwrap();
        assert_eq!(sys.solve().unwrap(), vec![false, false, false]);
    }

    #[test]
    fn solve_magic_square_inconsistent() {
        // Summing all six equations hits every variable twice, so the
        // left side vanishes while the rhs sums to 1.
        assert_eq!(BinaryLinearSystem::magic_square().solve(), None);
    }

    #[test]
    fn solve_lowest_index_pivot() {
        let sys = BinaryLinearSystem::from_supports(2, &[vec![0, 1]], &[true]).unwrap();
        assert_eq!(sys.solve().unwrap(), vec![true, false]);
    }

    #[test]
    fn empty_row_rejected() {
        assert!(BinaryLinearSystem::from_supports(2, &[vec![]], &[false]).is_err());
    }

    #[test]
    fn lsys_round_trip_magic_square() {
        let sys = BinaryLinearSystem::magic_square();
        let text = sys.to_lsys();
        assert!(text.starts_with("6 9\n"));
        assert!(text.ends_with('\n'));
        assert_eq!(BinaryLinearSystem::from_lsys(&text).unwrap(), sys);
    }

    #[test]
    fn solve_agrees_with_exhaustive_search_up_to_n_twelve() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2718);
        for n in 8..=12usize {
            for _ in 0..40 {
                let m = rng.gen_range(1..=n);
                let supports: Vec<Vec<usize>> = (0..m)
                    .map(|_| {
                        let size = rng.gen_range(1..=4usize.min(n));
                        let mut all: Vec<usize> = (0..n).collect();
                        for i in (1..all.len()).rev() {
                            let j = rng.gen_range(0..=i);
                            all.swap(i, j);
                        }
                        let mut s: Vec<usize> = all.into_iter().take(size).collect();
                        s.sort();
                        s
                    })
                    .collect();
                let b: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.5)).collect();
                let sys = BinaryLinearSystem::from_supports(n, &supports, &b).unwrap();
                let solved = sys.solve();
                let oracle = exhaustive_solve(&sys);
                assert_eq!(solved.is_some(), oracle.is_some(), "n={n}");
                if let Some(x) = solved {
                    assert!(sys.check(&x));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn assignment_count_is_two_to_support_minus_one(
            support_mask in 1u32..(1 << 6),
            rhs in proptest::bool::ANY,
        ) {
            let support: Vec<usize> = (0..6).filter(|j| support_mask >> j & 1 == 1).collect();
            let sys = BinaryLinearSystem::from_supports(6, &[support.clone()], &[rhs]).unwrap();
            let assignments = sys.satisfying_assignments(0).unwrap();
            prop_assert_eq!(assignments.len(), 1 << (support.len() - 1));
            for a in &assignments {
                let parity = a.iter().filter(|&&x| x).count() % 2 == 1;
                prop_assert_eq!(parity, rhs);
            }
        }

        #[test]
        fn solve_agrees_with_exhaustive_search(
            rows in proptest::collection::vec(1u32..(1 << 5), 1..5),
            bmask in 0u32..(1 << 5),
        ) {
            let supports: Vec<Vec<usize>> = rows
                .iter()
                .map(|&mask| (0..5).filter(|j| mask >> j & 1 == 1).collect())
                .collect();
            let b: Vec<bool> = (0..supports.len()).map(|i| bmask >> i & 1 == 1).collect();
            let sys = BinaryLinearSystem::from_supports(5, &supports, &b).unwrap();
            let solved = sys.solve();
            let oracle = exhaustive_solve(&sys);
            prop_assert_eq!(solved.is_some(), oracle.is_some());
            if let Some(x) = solved {
                prop_assert!(sys.check(&x));
            }
        }
    }
}
