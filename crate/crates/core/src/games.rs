//! Linear system non-local games: game construction, strategies in
//! observable and measurement form, correlation tables under the maximally
//! entangled state, winning probabilities and biases, and the classical
//! baseline.
//!
//! The maximally entangled state is never materialized: correlations come
//! from the trace formula `⟨v| A ⊗ B |v⟩ = tr(Aᵀ B) / d`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use crate::cmat::{random_unitary, CMat, ONE};
use crate::error::{Error, Result};
use crate::gf2::BinaryLinearSystem;
use crate::replab::stability::stabilize_abelian;
use crate::replab::{ApproxRep, TOL};
use crate::word::J;

/// The non-local game of a linear system: Alice receives an equation index
/// and answers a satisfying assignment of its variables; Bob receives a
/// variable index and answers one bit. They win when the answers are
/// consistent (automatically, if Bob's variable is not in Alice's equation).
#[derive(Clone, Debug)]
pub struct Game {
    sys: BinaryLinearSystem,
    supports: Vec<Vec<usize>>,
    alice_outputs: Vec<Vec<Vec<bool>>>,
}

impl Game {
    pub fn from_system(sys: &BinaryLinearSystem) -> Result<Self> {
        let supports: Vec<Vec<usize>> = (0..sys.num_rows())
            .map(|i| sys.row_support(i))
            .collect::<Result<_>>()?;
        let alice_outputs: Vec<Vec<Vec<bool>>> = (0..sys.num_rows())
            .map(|i| sys.satisfying_assignments(i))
            .collect::<Result<_>>()?;
        Ok(Self {
            sys: sys.clone(),
            supports,
            alice_outputs,
        })
    }

    pub fn alice_inputs(&self) -> usize {
        self.sys.num_rows()
    }

    pub fn bob_inputs(&self) -> usize {
        self.sys.num_cols()
    }

    pub fn support(&self, i: usize) -> &[usize] {
        &self.supports[i]
    }

    pub fn alice_outputs(&self, i: usize) -> &[Vec<bool>] {
        &self.alice_outputs[i]
    }

    pub fn rhs(&self, i: usize) -> bool {
        self.sys.rhs(i)
    }

    pub fn system(&self) -> &BinaryLinearSystem {
        &self.sys
    }

    /// The winning predicate `V(a, b | i, j)`.
    pub fn wins(&self, i: usize, j: usize, a_index: usize, b: bool) -> bool {
        match self.supports[i].iter().position(|&v| v == j) {
            None => true,
            Some(pos) => self.alice_outputs[i][a_index][pos] == b,
        }
    }

    /// Input/output structure as JSON (assignments as 0/1 strings, indices
    /// 1-based to match the written form of the game).
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..self.alice_inputs())
            .map(|i| {
                json!({
                    "input": i + 1,
                    "variables": self.supports[i].iter().map(|v| v + 1).collect::<Vec<_>>(),
                    "rhs": u8::from(self.sys.rhs(i)),
                    "outputs": self.alice_outputs[i]
                        .iter()
                        .map(|a| bits_string(a))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "alice_inputs": self.alice_inputs(),
            "bob_inputs": self.bob_inputs(),
            "bob_outputs": [0, 1],
            "predicate": "consistency",
            "rows": rows,
        })
    }
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// A strategy in observable form: involutions `X_j` for Bob and commuting
/// per-row involutions `Y_ij` for Alice with `∏_{j∈V_i} Y_ij = (−1)^{b_i}`,
/// played on the (implicit) maximally entangled state.
#[derive(Clone, Debug)]
pub struct ObservableStrategy {
    pub dim: usize,
    pub x: Vec<CMat>,
    pub y: BTreeMap<(usize, usize), CMat>,
}

impl ObservableStrategy {
    /// Checks all strategy invariants to the given tolerance.
    pub fn validate(&self, game: &Game, tol: f64) -> Result<()> {
        if self.x.len() != game.bob_inputs() {
            return Err(Error::validation("strategy has the wrong number of X observables"));
        }
        for (j, x) in self.x.iter().enumerate() {
            if x.dim() != self.dim {
                return Err(Error::validation("X dimension mismatch"));
            }
            if x.mul(x).hs_dist_to_identity() > tol || !x.is_hermitian(tol) {
                return Err(Error::numeric(format!("X_{j} is not an involution")));
            }
        }
        for i in 0..game.alice_inputs() {
            let support = game.support(i);
            let mut product = CMat::identity(self.dim);
            for &j in support {
                let y = self
                    .y
                    .get(&(i, j))
                    .ok_or_else(|| Error::validation(format!("missing Y_({i},{j})")))?;
                if y.mul(y).hs_dist_to_identity() > tol || !y.is_hermitian(tol) {
                    return Err(Error::numeric(format!("Y_({i},{j}) is not an involution")));
                }
                product = product.mul(y);
            }
            let sign = if game.rhs(i) { -ONE } else { ONE };
            if product.hs_dist(&CMat::scalar(self.dim, sign)) > tol {
                return Err(Error::numeric(format!(
                    "row {i}: product of Y's is not (−1)^b"
                )));
            }
            for (ai, &ja) in support.iter().enumerate() {
                for &jb in support.iter().skip(ai + 1) {
                    let ya = &self.y[&(i, ja)];
                    let yb = &self.y[&(i, jb)];
                    if ya.commutator_norm(yb) > tol {
                        return Err(Error::numeric(format!(
                            "row {i}: Y_({i},{ja}) and Y_({i},{jb}) do not commute"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mat_json = |m: &CMat| {
            let rows: Vec<serde_json::Value> = (0..m.dim())
                .map(|r| {
                    json!((0..m.dim())
                        .map(|c| {
                            let z = m.get(r, c);
                            json!([z.re, z.im])
                        })
                        .collect::<Vec<_>>())
                })
                .collect();
            json!(rows)
        };
        json!({
            "dim": self.dim,
            "x": self.x.iter().map(mat_json).collect::<Vec<_>>(),
            "y": self
                .y
                .iter()
                .map(|(&(i, j), m)| json!({"i": i + 1, "j": j + 1, "matrix": mat_json(m)}))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let dim = value["dim"]
            .as_u64()
            .ok_or_else(|| Error::validation("strategy JSON: missing dim"))? as usize;
        let parse_mat = |v: &serde_json::Value| -> Result<CMat> {
            let rows = v
                .as_array()
                .ok_or_else(|| Error::validation("matrix must be an array"))?;
            if rows.len() != dim {
                return Err(Error::validation("matrix has wrong dimension"));
            }
            let mut m = CMat::zeros(dim);
            for (r, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .filter(|x| x.len() == dim)
                    .ok_or_else(|| Error::validation("bad matrix row"))?;
                for (c, entry) in row.iter().enumerate() {
                    let pair = entry
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::validation("matrix entry must be [re, im]"))?;
                    m.set(
                        r,
                        c,
                        Complex64::new(
                            pair[0].as_f64().unwrap_or(f64::NAN),
                            pair[1].as_f64().unwrap_or(f64::NAN),
                        ),
                    );
                }
            }
            Ok(m)
        };
        let x: Vec<CMat> = value["x"]
            .as_array()
            .ok_or_else(|| Error::validation("strategy JSON: missing x"))?
            .iter()
            .map(&parse_mat)
            .collect::<Result<_>>()?;
        let mut y = BTreeMap::new();
        for item in value["y"]
            .as_array()
            .ok_or_else(|| Error::validation("strategy JSON: missing y"))?
        {
            let i = item["i"]
                .as_u64()
                .ok_or_else(|| Error::validation("y entry missing i"))? as usize;
            let j = item["j"]
                .as_u64()
                .ok_or_else(|| Error::validation("y entry missing j"))? as usize;
            if i == 0 || j == 0 {
                return Err(Error::validation("strategy indices are 1-based"));
            }
            y.insert((i - 1, j - 1), parse_mat(&item["matrix"])?);
        }
        Ok(Self { dim, x, y })
    }
}

/// A strategy in measurement form: projective measurements per input.
#[derive(Clone, Debug)]
pub struct MeasurementStrategy {
    pub dim: usize,
    /// Per Alice input, one projector per satisfying assignment.
    pub alice: Vec<Vec<CMat>>,
    /// Per Bob input, projectors for outputs 0 and 1.
    pub bob: Vec<[CMat; 2]>,
}

impl MeasurementStrategy {
    /// Checks that each family consists of orthogonal projectors summing to
    /// the identity, to tolerance.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let check_family = |family: &[CMat], what: &str| -> Result<()> {
            let mut sum = CMat::zeros(self.dim);
            for (a, p) in family.iter().enumerate() {
                if p.mul(p).hs_dist(p) > tol || !p.is_hermitian(tol) {
                    return Err(Error::numeric(format!("{what}: element {a} is not a projector")));
                }
                for (b, q) in family.iter().enumerate().skip(a + 1) {
                    if p.mul(q).hs_norm() > tol {
                        return Err(Error::numeric(format!(
                            "{what}: projectors {a} and {b} are not orthogonal"
                        )));
                    }
                }
                sum = sum.add(p);
            }
            if sum.hs_dist_to_identity() > tol {
                return Err(Error::numeric(format!("{what}: projectors do not sum to 1")));
            }
            Ok(())
        };
        for (i, family) in self.alice.iter().enumerate() {
            check_family(family, &format!("Alice input {i}"))?;
        }
        for (j, pair) in self.bob.iter().enumerate() {
            check_family(pair, &format!("Bob input {j}"))?;
        }
        Ok(())
    }
}

/// Observable form to measurement form:
/// `N^j_b = (1 + (−1)^b X_j)/2` and
/// `M^i_a = ∏_{j∈V_i} (1 + (−1)^{a_j} Y_ij)/2`.
pub fn observables_to_measurements(
    s: &ObservableStrategy,
    game: &Game,
) -> Result<MeasurementStrategy> {
    let d = s.dim;
    let half = Complex64::new(0.5, 0.0);
    let bob: Vec<[CMat; 2]> = s
        .x
        .iter()
        .map(|x| {
            [
                CMat::identity(d).add(x).scale(half),
                CMat::identity(d).sub(x).scale(half),
            ]
        })
        .collect();
    let mut alice = Vec::with_capacity(game.alice_inputs());
    for i in 0..game.alice_inputs() {
        let support = game.support(i);
        let mut projectors = Vec::new();
        for assignment in game.alice_outputs(i) {
            let mut m = CMat::identity(d);
            for (pos, &j) in support.iter().enumerate() {
                let y = s
                    .y
                    .get(&(i, j))
                    .ok_or_else(|| Error::validation(format!("missing Y_({i},{j})")))?;
                let signed = if assignment[pos] {
                    CMat::identity(d).sub(y)
                } else {
                    CMat::identity(d).add(y)
                };
                m = m.mul(&signed.scale(half));
            }
            projectors.push(m);
        }
        alice.push(projectors);
    }
    Ok(MeasurementStrategy { dim: d, alice, bob })
}

/// Measurement form back to observable form:
/// `X_j = N^j_0 − N^j_1` and `Y_ij = Σ_a (−1)^{a_j} M^i_a`.
pub fn measurements_to_observables(
    m: &MeasurementStrategy,
    game: &Game,
) -> Result<ObservableStrategy> {
    let x: Vec<CMat> = m.bob.iter().map(|pair| pair[0].sub(&pair[1])).collect();
    let mut y = BTreeMap::new();
    for i in 0..game.alice_inputs() {
        let support = game.support(i);
        for (pos, &j) in support.iter().enumerate() {
            let mut obs = CMat::zeros(m.dim);
            for (a_idx, assignment) in game.alice_outputs(i).iter().enumerate() {
                let signed = if assignment[pos] {
                    m.alice[i][a_idx].scale(-ONE)
                } else {
                    m.alice[i][a_idx].clone()
                };
                obs = obs.add(&signed);
            }
            y.insert((i, j), obs);
        }
    }
    Ok(ObservableStrategy { dim: m.dim, x, y })
}

/// Correlation table `p(a, b | i, j)` for all inputs and outputs, raw
/// (unclamped) values.
#[derive(Clone, Debug)]
pub struct CorrelationTable {
    /// `p[i][j][a_index][b]`.
    pub p: Vec<Vec<Vec<[f64; 2]>>>,
}

impl CorrelationTable {
    /// Checks positivity (within −1e−9) and per-input normalization.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (i, per_j) in self.p.iter().enumerate() {
            for (j, outcomes) in per_j.iter().enumerate() {
                let mut total = 0.0;
                for pair in outcomes.iter() {
                    for &v in pair {
                        if v < -tol {
                            return Err(Error::numeric(format!(
                                "p(a,b|{i},{j}) = {v} is negative beyond tolerance"
                            )));
                        }
                        total += v;
                    }
                }
                if (total - 1.0).abs() > tol {
                    return Err(Error::numeric(format!(
                        "correlations at ({i},{j}) sum to {total}, not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    /// CSV dump with columns `i,j,a,b,p` (1-based inputs, assignment as a
    /// bit string, near-zero negatives clamped to 0).
    pub fn to_csv(&self, game: &Game) -> String {
        let mut out = String::from("i,j,a,b,p\n");
        for (i, per_j) in self.p.iter().enumerate() {
            for (j, outcomes) in per_j.iter().enumerate() {
                for (a_idx, pair) in outcomes.iter().enumerate() {
                    for (b, &v) in pair.iter().enumerate() {
                        let clamped = if (-1e-9..0.0).contains(&v) { 0.0 } else { v };
                        out.push_str(&format!(
                            "{},{},{},{},{:.9}\n",
                            i + 1,
                            j + 1,
                            bits_string(&game.alice_outputs(i)[a_idx]),
                            b,
                            clamped
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Computes the correlation of a strategy under the maximally entangled
/// state: `p(a, b | i, j) = tr((M^i_a)ᵀ N^j_b) / d`.
pub fn correlation(m: &MeasurementStrategy, game: &Game) -> CorrelationTable {
    let d = m.dim as f64;
    let p = (0..game.alice_inputs())
        .map(|i| {
            (0..game.bob_inputs())
                .map(|j| {
                    m.alice[i]
                        .iter()
                        .map(|ma| {
                            let mat = ma.transpose();
                            [
                                (mat.mul(&m.bob[j][0]).trace().re / d),
                                (mat.mul(&m.bob[j][1]).trace().re / d),
                            ]
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    CorrelationTable { p }
}

/// Winning probability and bias for one (equation, variable) pair.
#[derive(Clone, Debug)]
pub struct WinStat {
    pub i: usize,
    pub j: usize,
    pub p: f64,
    /// `2 p − 1`, from the correlation table.
    pub bias: f64,
    /// `tr(Y_ijᵀ X_j) / d`, the direct operator form of the same bias.
    pub bias_direct: f64,
}

/// Per-pair winning statistics over all `j ∈ V_i`, computed both through
/// the correlation table and directly from the observables.
pub fn win_stats(s: &ObservableStrategy, game: &Game) -> Result<Vec<WinStat>> {
    let measurements = observables_to_measurements(s, game)?;
    let table = correlation(&measurements, game);
    let d = s.dim as f64;
    let mut out = Vec::new();
    for i in 0..game.alice_inputs() {
        for (pos, &j) in game.support(i).iter().enumerate() {
            let mut win = 0.0;
            for (a_idx, assignment) in game.alice_outputs(i).iter().enumerate() {
                let b = usize::from(assignment[pos]);
                win += table.p[i][j][a_idx][b];
            }
            let y = &s.y[&(i, j)];
            let bias_direct = y.transpose().mul(&s.x[j]).trace().re / d;
            out.push(WinStat {
                i,
                j,
                p: win,
                bias: 2.0 * win - 1.0,
                bias_direct,
            });
        }
    }
    Ok(out)
}

/// CSV dump of [`win_stats`] with columns `i,j,p,bias` (1-based).
pub fn win_stats_csv(stats: &[WinStat]) -> String {
    let mut out = String::from("i,j,p,bias\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{:.9},{:.9}\n",
            s.i + 1,
            s.j + 1,
            s.p,
            s.bias
        ));
    }
    out
}

/// Builds a strategy from a representation of the solution group with
/// `rep(J) = −1` and exact involutions.
///
/// Bob plays `X_j = rep(x_j)`. For each row, the restriction to all but the
/// largest variable is stabilized into an exact abelian representation
/// `ψ_i`; Alice plays the transposes `Y_ij = ψ_i(x_j)ᵀ`, with the largest
/// variable's observable forced to `(−1)^{b_i}` times the product of the
/// others, so every row constraint holds exactly.
pub fn strategy_from_rep(
    rep: &ApproxRep,
    sys: &BinaryLinearSystem,
    names: &[String],
) -> Result<ObservableStrategy> {
    if names.len() != sys.num_cols() {
        return Err(Error::validation("name count does not match system"));
    }
    let d = rep.dim();
    let j_image = rep
        .image(J)
        .cloned()
        .unwrap_or_else(|| CMat::scalar(d, -ONE));
    if j_image.hs_dist(&CMat::scalar(d, -ONE)) > TOL {
        return Err(Error::numeric("strategy_from_rep requires rep(J) = −1; split first"));
    }
    let mut x = Vec::with_capacity(sys.num_cols());
    for name in names {
        let img = rep
            .image(name)
            .ok_or_else(|| Error::validation(format!("generator {name:?} has no image")))?;
        if img.mul(img).hs_dist_to_identity() > TOL {
            return Err(Error::numeric(format!(
                "rep({name})² ≠ 1; round involutions first"
            )));
        }
        x.push(img.clone());
    }
    let mut y = BTreeMap::new();
    for i in 0..sys.num_rows() {
        let support = sys.row_support(i)?;
        let (&last, rest) = support.split_last().expect("rows are nonempty");
        let rest_names: Vec<String> = rest.iter().map(|&j| names[j].clone()).collect();
        let stabilized = stabilize_abelian(rep, &rest_names)?;
        let mut product = CMat::identity(d);
        for (&j, name) in rest.iter().zip(&rest_names) {
            let obs = stabilized.rep.image(name).unwrap().transpose();
            product = product.mul(&obs);
            y.insert((i, j), obs);
        }
        let sign = if sys.rhs(i) { -ONE } else { ONE };
        y.insert((i, last), product.scale(sign));
    }
    Ok(ObservableStrategy { dim: d, x, y })
}

/// Whether the game has a perfect classical strategy: exactly when the
/// system is solvable over GF(2).
pub fn classical_perfect(sys: &BinaryLinearSystem) -> bool {
    sys.solve().is_some()
}

/// Independent oracle for [`classical_perfect`]: enumerate every
/// deterministic Alice strategy (one satisfying assignment per equation)
/// and test whether some Bob assignment is consistent with all of them.
/// For perfect play, shared randomness cannot help, so this decides the
/// classical case. Guarded to at most `bound` Alice strategies.
pub fn exhaustive_classical_search(sys: &BinaryLinearSystem, bound: u64) -> Result<bool> {
    let game = Game::from_system(sys)?;
    let mut total: u64 = 1;
    for i in 0..game.alice_inputs() {
        total = total.saturating_mul(game.alice_outputs(i).len() as u64);
        if total > bound {
            return Err(Error::feasibility(format!(
                "more than {bound} deterministic Alice strategies"
            )));
        }
    }
    let m = game.alice_inputs();
    let mut choice = vec![0usize; m];
    loop {
        // An Alice strategy wins with some Bob strategy iff its rows agree
        // on every shared variable; Bob then answers the common values.
        let mut assignment: BTreeMap<usize, bool> = BTreeMap::new();
        let mut consistent = true;
        'rows: for i in 0..m {
            let support = game.support(i);
            let answer = &game.alice_outputs(i)[choice[i]];
            for (pos, &j) in support.iter().enumerate() {
                match assignment.get(&j) {
                    Some(&b) if b != answer[pos] => {
                        consistent = false;
                        break 'rows;
                    }
                    Some(_) => {}
                    None => {
                        assignment.insert(j, answer[pos]);
                    }
                }
            }
        }
        if consistent {
            return Ok(true);
        }
        // Next choice vector.
        let mut idx = 0;
        loop {
            if idx == m {
                return Ok(false);
            }
            choice[idx] += 1;
            if choice[idx] < game.alice_outputs(idx).len() {
                break;
            }
            choice[idx] = 0;
            idx += 1;
        }
    }
}

/// A random strategy satisfying all invariants exactly: independent random
/// involutions for Bob, and per row a commuting family of random
/// involutions in a shared basis whose product is `(−1)^{b_i}`.
pub fn random_valid_strategy(
    rng: &mut impl Rng,
    game: &Game,
    d: usize,
) -> ObservableStrategy {
    let x: Vec<CMat> = (0..game.bob_inputs())
        .map(|_| {
            let u = random_unitary(rng, d);
            let signs: Vec<Complex64> = (0..d)
                .map(|_| if rng.gen_bool(0.5) { ONE } else { -ONE })
                .collect();
            u.mul(&CMat::diag(&signs)).mul(&u.adjoint())
        })
        .collect();
    let mut y = BTreeMap::new();
    for i in 0..game.alice_inputs() {
        let support = game.support(i);
        let u = random_unitary(rng, d);
        let mut running = vec![ONE; d];
        for (pos, &j) in support.iter().enumerate() {
            let signs: Vec<Complex64> = if pos + 1 == support.len() {
                let target = if game.rhs(i) { -ONE } else { ONE };
                running.iter().map(|&prod| target / prod).collect()
            } else {
                (0..d)
                    .map(|r| {
                        let s = if rng.gen_bool(0.5) { ONE } else { -ONE };
                        running[r] *= s;
                        s
                    })
                    .collect()
            };
            y.insert((i, j), u.mul(&CMat::diag(&signs)).mul(&u.adjoint()));
        }
    }
    ObservableStrategy { dim: d, x, y }
}
