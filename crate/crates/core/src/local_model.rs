//! Local calculus at a cyclic orbifold point `[C/μ_k]`: HH₀ dimensions,
//! characters `A_r` of a bimodule parameter, the action on torsion simples,
//! the jet-module `y` matrix and its splitting, root hyperplanes and the
//! deformed preprojective relations on the cyclic quiver.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::{qi, Q};
use crate::cyclotomic::Cyclo;
use crate::linalg::{q_matrix, Field, Matrix};
use crate::{Error, Result};

/// Orders of cyclic groups acting on an elliptic curve with a fixed point.
pub const CYCLIC_ORDERS: [u32; 5] = [1, 2, 3, 4, 6];

/// `dim HH₀([E/Γ])` for `Γ = Z/k`.
pub fn hh0_dim(k: u32) -> Result<u32> {
    match k {
        1 => Ok(2),
        2 => Ok(6),
        3 => Ok(8),
        4 => Ok(9),
        6 => Ok(10),
        _ => Err(Error::Unsupported(format!("Z/{k} does not act on an elliptic curve with a fixed point"))),
    }
}

/// One twisted summand `H⁰(O_{E^g})^Γ` for `g = ζ^j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistedSummand {
    pub j: u32,
    pub fixed_points: usize,
    pub gamma_orbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hh0Breakdown {
    pub k: u32,
    /// `HH₀(E)^Γ`.
    pub untwisted: usize,
    pub twisted: Vec<TwistedSummand>,
    pub total: usize,
}

/// The generator `ζ` acting on `Λ = Z²`, as the companion matrix of `Φ_k`.
fn lattice_generator(k: u32) -> [[i64; 2]; 2] {
    match k {
        1 => [[1, 0], [0, 1]],
        2 => [[-1, 0], [0, -1]],
        3 => [[0, -1], [1, -1]],
        4 => [[0, -1], [1, 0]],
        6 => [[0, -1], [1, 1]],
        _ => unreachable!("checked by hh0_dim"),
    }
}

fn mat2_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Torsion point of `R²/Z²` as a reduced pair with a common denominator.
type TorsionPoint = (i64, i64, i64);

fn reduce_point(x: i64, y: i64, den: i64) -> TorsionPoint {
    let (x, y) = (x.rem_euclid(den), y.rem_euclid(den));
    let g = num_integer::gcd(num_integer::gcd(x, y), den);
    (x / g, y / g, den / g)
}

/// HKR decomposition `HH₀(E)^Γ ⊕ ⊕_{g≠e} H⁰(O_{E^g})^Γ`, computed by
/// counting Γ-orbits on the fixed points of each `g` on `E = R²/Λ`.
pub fn hh0_breakdown(k: u32) -> Result<Hh0Breakdown> {
    hh0_dim(k)?;
    let zeta = lattice_generator(k);
    let mut twisted = Vec::new();
    let mut g = zeta;
    for j in 1..k {
        // Fixed points of g are (g − I)⁻¹Z² / Z²; |det(g − I)| of them.
        let a = [[g[0][0] - 1, g[0][1]], [g[1][0], g[1][1] - 1]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let adj = [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]];
        let d = det.abs();
        let mut pts = BTreeSet::new();
        for y0 in 0..d {
            for y1 in 0..d {
                let x = adj[0][0] * y0 + adj[0][1] * y1;
                let y = adj[1][0] * y0 + adj[1][1] * y1;
                let (x, y) = if det < 0 { (-x, -y) } else { (x, y) };
                pts.insert(reduce_point(x, y, d));
            }
        }
        // Orbits of ⟨ζ⟩ on the fixed set.
        let mut seen = BTreeSet::new();
        let mut orbits = 0;
        for p in &pts {
            if seen.contains(p) {
                continue;
            }
            orbits += 1;
            let mut cur = *p;
            loop {
                if !seen.insert(cur) {
                    break;
                }
                let (x, y, den) = cur;
                cur = reduce_point(zeta[0][0] * x + zeta[0][1] * y, zeta[1][0] * x + zeta[1][1] * y, den);
            }
        }
        twisted.push(TwistedSummand { j, fixed_points: pts.len(), gamma_orbits: orbits });
        g = mat2_mul(g, zeta);
    }
    let untwisted = 2;
    let total = untwisted + twisted.iter().map(|t| t.gamma_orbits).sum::<usize>();
    Ok(Hh0Breakdown { k, untwisted, twisted, total })
}

/// `(a_g)_{g ∈ μ_k}` with `g = ζ^j` indexed by `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleParam {
    k: usize,
    a: Vec<Cyclo>,
}

impl BimoduleParam {
    pub fn new(k: usize, a: Vec<Cyclo>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if a.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: a.len() });
        }
        if a.iter().any(|x| x.order() != k) {
            return Err(Error::InvalidArgument(format!("coefficients must lie in Q(zeta_{k})")));
        }
        Ok(BimoduleParam { k, a })
    }

    pub fn rational(k: usize, a: &[Q]) -> Result<Self> {
        Self::new(k, a.iter().map(|x| Cyclo::from_q(k, x.clone())).collect())
    }

    pub fn from_ints(k: usize, a: &[i64]) -> Result<Self> {
        Self::new(k, a.iter().map(|x| Cyclo::from_i64(k, *x)).collect())
    }

    /// `a_e = 1`, all others zero.
    pub fn identity(k: usize) -> Self {
        let mut a = vec![Cyclo::zero(k); k];
        a[0] = Cyclo::one(k);
        BimoduleParam { k, a }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[Cyclo] {
        &self.a
    }

    pub fn scale(&self, s: &Cyclo) -> Self {
        BimoduleParam { k: self.k, a: self.a.iter().map(|x| x.mul(s)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        BimoduleParam { k: self.k, a: self.a.iter().zip(&o.a).map(|(x, y)| x.add(y)).collect() }
    }

    /// `A_r = Σ_g a_g χ^r(g)` with `χ(ζ^j) = ζ^j`; any integer `r`.
    pub fn char_value(&self, r: i64) -> Cyclo {
        let mut acc = Cyclo::zero(self.k);
        for (j, a) in self.a.iter().enumerate() {
            if a.vanishes() {
                continue;
            }
            acc = acc.add(&a.mul(&Cyclo::zeta_pow(self.k, r * j as i64)));
        }
        acc
    }

    pub fn char_values(&self) -> Vec<CharacterValue> {
        (0..self.k).map(|r| CharacterValue { r, value: self.char_value(r as i64) }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterValue {
    pub r: usize,
    pub value: Cyclo,
}

impl Serialize for CharacterValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            r: usize,
            value: String,
        }
        Repr { r: self.r, value: self.value.to_string() }.serialize(s)
    }
}

/// `s_i ⊗ E_a`: a direct sum `s_i ⊕ s_{i−1}` or the nonsplit extension
/// `e_{i,i−1}`. Residues are taken mod `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TensorTag {
    Split { i: usize, prev: usize },
    Extension { i: usize, prev: usize },
}

impl TensorTag {
    pub fn is_split(&self) -> bool {
        matches!(self, TensorTag::Split { .. })
    }
}

pub fn tensor_simple(i: i64, p: &BimoduleParam) -> TensorTag {
    let k = p.k as i64;
    let (i_r, prev) = (i.rem_euclid(k) as usize, (i - 1).rem_euclid(k) as usize);
    if p.char_value(i).vanishes() {
        TensorTag::Split { i: i_r, prev }
    } else {
        TensorTag::Extension { i: i_r, prev }
    }
}

/// One row of the tensor table: `(i, A_i, tag)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorRow {
    pub i: usize,
    pub a_i: String,
    pub tag: TensorTag,
}

pub fn tensor_table(p: &BimoduleParam) -> Vec<TensorRow> {
    (0..p.k)
        .map(|i| TensorRow { i, a_i: p.char_value(i as i64).to_string(), tag: tensor_simple(i as i64, p) })
        .collect()
}

/// `y = [[J, A], [0, J]]` on `O/z^{n+1} ⊕ O/z^{n+1}` with `J` the nilpotent
/// Jordan block and `A = diag(A_0, …, A_n)`.
pub fn y_matrix(n: usize, p: &BimoduleParam) -> Matrix<Cyclo> {
    let m = n + 1;
    let unit = Cyclo::one(p.k);
    let mut y = Matrix::zeros(2 * m, 2 * m, &unit);
    for i in 0..n {
        y.set(i, i + 1, unit.clone());
        y.set(m + i, m + i + 1, unit.clone());
    }
    for r in 0..m {
        y.set(r, m + r, p.char_value(r as i64));
    }
    y
}

/// `Tr A = Σ_{r ≤ n} A_r`.
pub fn trace_a(n: usize, p: &BimoduleParam) -> Cyclo {
    (0..=n).fold(Cyclo::zero(p.k), |acc, r| acc.add(&p.char_value(r as i64)))
}

/// The extension of jets splits exactly when `Tr A = 0`.
pub fn splits(n: usize, p: &BimoduleParam) -> bool {
    trace_a(n, p).vanishes()
}

/// Block sizes (descending) of a nilpotent matrix from the ranks of its
/// powers; `None` if the matrix is not nilpotent.
pub fn nilpotent_jordan_type<F: Field>(m: &Matrix<F>, unit: &F) -> Option<Vec<usize>> {
    let n = m.rows();
    let mut ranks = vec![n];
    let mut pw = Matrix::identity(n, unit);
    while *ranks.last().unwrap() > 0 {
        pw = pw.mul_in(m, unit);
        let r = pw.rank();
        if r == *ranks.last().unwrap() {
            return None;
        }
        ranks.push(r);
    }
    // Blocks of size ≥ j: ranks[j−1] − ranks[j].
    let mut sizes = Vec::new();
    for j in 1..ranks.len() {
        let at_least = ranks[j - 1] - ranks[j];
        let at_least_next = if j + 1 < ranks.len() { ranks[j] - ranks[j + 1] } else { 0 };
        sizes.extend(std::iter::repeat_n(j, at_least - at_least_next));
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Some(sizes)
}

/// Root of the cyclic quiver `Q_k` (affine `Ã_{k−1}`) as a dimension vector.
pub fn cyclic_tits_form(c: &[i64]) -> i64 {
    let k = c.len();
    let sq: i64 = c.iter().map(|x| x * x).sum();
    let cross: i64 = (0..k).map(|i| c[i] * c[(i + 1) % k]).sum();
    sq - cross
}

/// Linear functional on `HH₀` coordinates `(a_g)`, `a ↦ Σ_g coeffs[g]·a_g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootFunctional {
    pub k: usize,
    pub coeffs: Vec<Cyclo>,
}

impl RootFunctional {
    pub fn apply(&self, p: &BimoduleParam) -> Result<Cyclo> {
        if p.k != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: p.k });
        }
        Ok(self.coeffs.iter().zip(&p.a).fold(Cyclo::zero(self.k), |acc, (c, a)| acc.add(&c.mul(a))))
    }

    /// `p ∈ S_β`.
    pub fn contains(&self, p: &BimoduleParam) -> Result<bool> {
        Ok(self.apply(p)?.vanishes())
    }
}

/// `S_β` for a root `β = Σ c_i α_i` of `Q_k`: the kernel of
/// `a ↦ Σ_i c_i A_i`, whose coefficient on `a_g` is `Σ_i c_i ζ^{ig}`.
/// Real roots and `±δ` are accepted; `mδ` with `|m| ≥ 2` has no torsion
/// class and is rejected.
pub fn root_hyperplane(beta: &[i64]) -> Result<RootFunctional> {
    let k = beta.len();
    if k == 0 {
        return Err(Error::InvalidArgument("empty dimension vector".into()));
    }
    let q = cyclic_tits_form(beta);
    let all_eq = beta.iter().all(|c| *c == beta[0]);
    match (q, all_eq) {
        (1, _) => {}
        (0, true) if beta[0].abs() == 1 => {}
        (0, true) if beta[0] != 0 => {
            return Err(Error::ImaginaryRoot(format!("{beta:?} is a multiple of delta with no torsion class")));
        }
        _ => return Err(Error::NotARoot(format!("{beta:?}"))),
    }
    let coeffs = (0..k)
        .map(|g| {
            beta.iter().enumerate().fold(Cyclo::zero(k), |acc, (i, c)| {
                acc.add(&Cyclo::zeta_pow(k, (i * g) as i64).scale(&qi(*c)))
            })
        })
        .collect();
    Ok(RootFunctional { k, coeffs })
}

/// Representation of the doubled cyclic quiver: `cw[i] : V_i → V_{i+1}`,
/// `ccw[i] : V_{i+1} → V_i`, and a scalar `λ_i` per node.
#[derive(Clone, Debug)]
pub struct PreprojRep {
    pub k: usize,
    pub dims: Vec<usize>,
    pub cw: Vec<Matrix<Cyclo>>,
    pub ccw: Vec<Matrix<Cyclo>>,
    pub lambda: Vec<Cyclo>,
}

/// Relation imposed at node `i`.
pub const PREPROJ_SIGN_CONVENTION: &str = "ccw[i]*cw[i] - cw[i-1]*ccw[i-1] = lambda_i * id";

impl PreprojRep {
    pub fn zero(k: usize, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: dims.len() });
        }
        let u = Cyclo::one(k);
        let cw = (0..k).map(|i| Matrix::zeros(dims[(i + 1) % k], dims[i], &u)).collect();
        let ccw = (0..k).map(|i| Matrix::zeros(dims[i], dims[(i + 1) % k], &u)).collect();
        Ok(PreprojRep { k, dims, cw, ccw, lambda: vec![Cyclo::zero(k); k] })
    }

    fn validate(&self) -> Result<()> {
        let k = self.k;
        for v in [self.dims.len(), self.cw.len(), self.ccw.len(), self.lambda.len()] {
            if v != k {
                return Err(Error::DimensionMismatch { expected: k, got: v });
            }
        }
        for i in 0..k {
            let (a, b) = (self.dims[i], self.dims[(i + 1) % k]);
            if (self.cw[i].rows(), self.cw[i].cols()) != (b, a) {
                return Err(Error::DimensionMismatch { expected: b * a, got: self.cw[i].rows() * self.cw[i].cols() });
            }
            if (self.ccw[i].rows(), self.ccw[i].cols()) != (a, b) {
                return Err(Error::DimensionMismatch { expected: a * b, got: self.ccw[i].rows() * self.ccw[i].cols() });
            }
        }
        Ok(())
    }

    /// Whether the composite clockwise map around the cycle is nilpotent.
    pub fn cw_nilpotent(&self) -> bool {
        let u = Cyclo::one(self.k);
        let d0 = self.dims[0];
        let mut m = Matrix::identity(d0, &u);
        for i in 0..self.k {
            m = self.cw[i].mul_in(&m, &u);
        }
        let total: usize = self.dims.iter().sum();
        let mut p = Matrix::identity(d0, &u);
        for _ in 0..=total {
            p = p.mul_in(&m, &u);
        }
        p.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct PreprojReport {
    pub residuals: Vec<Matrix<Cyclo>>,
    pub relation_holds: Vec<bool>,
    /// `λ_i = A_i` for each node.
    pub lambda_matches: Vec<bool>,
    pub cw_nilpotent: bool,
    pub passes: bool,
}

impl Serialize for PreprojReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            sign_convention: &'static str,
            residuals: Vec<Vec<Vec<String>>>,
            relation_holds: &'a [bool],
            lambda_matches: &'a [bool],
            cw_nilpotent: bool,
            passes: bool,
        }
        let residuals = self
            .residuals
            .iter()
            .map(|m| m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
            .collect();
        Repr {
            sign_convention: PREPROJ_SIGN_CONVENTION,
            residuals,
            relation_holds: &self.relation_holds,
            lambda_matches: &self.lambda_matches,
            cw_nilpotent: self.cw_nilpotent,
            passes: self.passes,
        }
        .serialize(s)
    }
}

/// Residual `ccw[i]cw[i] − cw[i−1]ccw[i−1] − λ_i·id` at every node, and the
/// check `λ_i = A_i` against `p`.
pub fn preproj_check(rep: &PreprojRep, p: &BimoduleParam) -> Result<PreprojReport> {
    rep.validate()?;
    if p.k != rep.k {
        return Err(Error::DimensionMismatch { expected: rep.k, got: p.k });
    }
    let k = rep.k;
    let u = Cyclo::one(k);
    let mut residuals = Vec::with_capacity(k);
    for i in 0..k {
        let prev = (i + k - 1) % k;
        let a = rep.ccw[i].mul_in(&rep.cw[i], &u);
        let b = rep.cw[prev].mul_in(&rep.ccw[prev], &u);
        let lam = Matrix::identity(rep.dims[i], &u).scale(&rep.lambda[i]);
        residuals.push(a.sub(&b).sub(&lam));
    }
    let relation_holds: Vec<bool> = residuals.iter().map(|m| m.is_zero()).collect();
    let lambda_matches: Vec<bool> = (0..k).map(|i| rep.lambda[i] == p.char_value(i as i64)).collect();
    let cw_nilpotent = rep.cw_nilpotent();
    let passes = relation_holds.iter().all(|x| *x) && lambda_matches.iter().all(|x| *x);
    Ok(PreprojReport { residuals, relation_holds, lambda_matches, cw_nilpotent, passes })
}

/// Module of `(n+1)`-jets: basis `e_0, …, e_n` with `e_j` at node `j mod k`,
/// `cw: e_j ↦ e_{j+1}` and `ccw: e_{j+1} ↦ μ_j e_j` where
/// `μ_j = A_0 + … + A_j`, and `λ_i = A_i`. The relation at `e_n` reads
/// `−μ_{n−1} = A_n`, i.e. `Tr A = 0`.
pub fn jet_module(n: usize, p: &BimoduleParam) -> PreprojRep {
    let k = p.k;
    let u = Cyclo::one(k);
    let mut dims = vec![0usize; k];
    // Position of e_j within its node.
    let mut slot = vec![0usize; n + 1];
    for (j, s) in slot.iter_mut().enumerate() {
        *s = dims[j % k];
        dims[j % k] += 1;
    }
    let mut cw: Vec<Matrix<Cyclo>> = (0..k).map(|i| Matrix::zeros(dims[(i + 1) % k], dims[i], &u)).collect();
    let mut ccw: Vec<Matrix<Cyclo>> = (0..k).map(|i| Matrix::zeros(dims[i], dims[(i + 1) % k], &u)).collect();
    let mut mu = Cyclo::zero(k);
    for j in 0..n {
        mu = mu.add(&p.char_value(j as i64));
        let i = j % k;
        cw[i].set(slot[j + 1], slot[j], u.clone());
        ccw[i].set(slot[j], slot[j + 1], mu.clone());
    }
    let lambda = (0..k).map(|i| p.char_value(i as i64)).collect();
    PreprojRep { k, dims, cw, ccw, lambda }
}

/// Rational companion matrix of `ζ` on `Λ`, for reports.
pub fn lattice_generator_matrix(k: u32) -> Result<Matrix<Q>> {
    hh0_dim(k)?;
    let g = lattice_generator(k);
    Ok(q_matrix(&[g[0].to_vec(), g[1].to_vec()]))
}

/// Split indices `{i : A_i = 0}` and their count per character value.
pub fn split_indices(p: &BimoduleParam) -> BTreeMap<usize, bool> {
    (0..p.k).map(|i| (i, tensor_simple(i as i64, p).is_split())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hh0_table() {
        let want = [(1, 2), (2, 6), (3, 8), (4, 9), (6, 10)];
        for (k, d) in want {
            assert_eq!(hh0_dim(k).unwrap(), d);
        }
        assert!(hh0_dim(5).is_err());
    }

    #[test]
    fn hh0_audit_matches_table_for_every_order() {
        for k in CYCLIC_ORDERS {
            let b = hh0_breakdown(k).unwrap();
            assert_eq!(b.total as u32, hh0_dim(k).unwrap(), "k={k}");
        }
        let z2 = hh0_breakdown(2).unwrap();
        assert_eq!(z2.twisted[0].fixed_points, 4);
        let z4 = hh0_breakdown(4).unwrap();
        let orbits: Vec<usize> = z4.twisted.iter().map(|t| t.gamma_orbits).collect();
        assert_eq!(orbits, vec![2, 3, 2]);
        let fixed: Vec<usize> = z4.twisted.iter().map(|t| t.fixed_points).collect();
        assert_eq!(fixed, vec![2, 4, 2]);
        let z6 = hh0_breakdown(6).unwrap();
        let orbits: Vec<usize> = z6.twisted.iter().map(|t| t.gamma_orbits).collect();
        assert_eq!(orbits, vec![1, 2, 2, 2, 1]);
    }

    #[test]
    fn char_value_examples() {
        let p = BimoduleParam::identity(5);
        assert!(p.char_values().iter().all(|c| c.value == Cyclo::one(5)));
        let p = BimoduleParam::from_ints(2, &[0, 1]).unwrap();
        let v: Vec<Cyclo> = p.char_values().into_iter().map(|c| c.value).collect();
        assert_eq!(v, vec![Cyclo::from_i64(2, 1), Cyclo::from_i64(2, -1)]);
        let p = BimoduleParam::from_ints(3, &[0, 1, 0]).unwrap();
        for r in 0..6 {
            assert_eq!(p.char_value(r), Cyclo::zeta_pow(3, r));
        }
    }

    #[test]
    fn tensor_examples() {
        let p = BimoduleParam::identity(4);
        for i in 0..4 {
            assert!(!tensor_simple(i, &p).is_split());
        }
        let p = BimoduleParam::from_ints(2, &[1, 1]).unwrap();
        assert_eq!(tensor_simple(1, &p), TensorTag::Split { i: 1, prev: 0 });
        assert_eq!(tensor_simple(0, &p), TensorTag::Extension { i: 0, prev: 1 });
    }

    #[test]
    fn y_matrix_examples() {
        let p = BimoduleParam::from_ints(1, &[0]).unwrap();
        assert!(y_matrix(0, &p).is_zero());
        let p = BimoduleParam::identity(3);
        let y = y_matrix(1, &p);
        let u = Cyclo::one(3);
        let z = Cyclo::zero(3);
        let want = Matrix::from_rows(vec![
            vec![z.clone(), u.clone(), u.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), u.clone()],
            vec![z.clone(), z.clone(), z.clone(), u.clone()],
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
        ]);
        assert_eq!(y, want);
        let jt = nilpotent_jordan_type(&y_matrix(2, &p), &u).unwrap();
        assert!(jt[0] >= 4, "{jt:?}");
        assert_eq!(jt, vec![4, 2]);
    }

    #[test]
    fn splitting_examples() {
        assert!(splits(3, &BimoduleParam::from_ints(4, &[0, 0, 0, 0]).unwrap()));
        for n in 0..5 {
            assert!(!splits(n, &BimoduleParam::identity(2)));
            assert_eq!(trace_a(n, &BimoduleParam::identity(2)), Cyclo::from_i64(2, n as i64 + 1));
        }
        assert!(splits(1, &BimoduleParam::from_ints(2, &[0, 1]).unwrap()));
    }

    fn random_param(rng: &mut ChaCha8Rng, k: usize) -> BimoduleParam {
        let a = (0..k)
            .map(|_| {
                let deg = Cyclo::one(k).coeffs().len();
                let c = (0..deg).map(|_| q(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect();
                Cyclo::from_coeffs(k, c)
            })
            .collect();
        BimoduleParam::new(k, a).unwrap()
    }

    /// Adjust `a_e` so that `Tr A = 0` at jet order `n`.
    fn force_split(p: &BimoduleParam, n: usize) -> BimoduleParam {
        let t = trace_a(n, p);
        let fix = t.scale(&q(-1, n as i64 + 1));
        let mut a = p.coeffs().to_vec();
        a[0] = a[0].add(&fix);
        BimoduleParam::new(p.k(), a).unwrap()
    }

    #[test]
    fn splitting_matches_jordan_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..120 {
            let k = [2, 3, 4, 6][trial % 4];
            let n = rng.gen_range(0..=4);
            let mut p = random_param(&mut rng, k);
            if trial % 2 == 0 {
                p = force_split(&p, n);
            }
            let jt = nilpotent_jordan_type(&y_matrix(n, &p), &Cyclo::one(k)).unwrap();
            assert_eq!(splits(n, &p), jt == vec![n + 1, n + 1], "k={k} n={n}");
            if trial % 2 == 0 {
                assert!(splits(n, &p));
            }
        }
    }

    #[test]
    fn split_set_is_character_zero_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 1..=6 {
            for _ in 0..20 {
                // Kill a random character by projecting it out.
                let mut p = random_param(&mut rng, k);
                let r = rng.gen_range(0..k) as i64;
                let ar = p.char_value(r);
                let proj = (0..k).map(|g| Cyclo::zeta_pow(k, -r * g as i64).mul(&ar).scale(&q(-1, k as i64))).collect();
                p = p.add(&BimoduleParam::new(k, proj).unwrap());
                assert!(p.char_value(r).vanishes());
                let split: Vec<usize> = split_indices(&p).into_iter().filter(|(_, s)| *s).map(|(i, _)| i).collect();
                let zeros: Vec<usize> = (0..k).filter(|i| p.char_value(*i as i64).vanishes()).collect();
                assert_eq!(split, zeros);
                assert!(split.contains(&(r as usize)));
            }
        }
    }

    #[test]
    fn root_hyperplanes() {
        // Simple root α_i gives A_i.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [2usize, 3, 4, 6] {
            let p = random_param(&mut rng, k);
            for i in 0..k {
                let mut e = vec![0; k];
                e[i] = 1;
                let f = root_hyperplane(&e).unwrap();
                assert_eq!(f.apply(&p).unwrap(), p.char_value(i as i64));
            }
            // δ gives k·a_e.
            let f = root_hyperplane(&vec![1; k]).unwrap();
            assert_eq!(f.apply(&p).unwrap(), p.coeffs()[0].scale(&qi(k as i64)));
            assert!(matches!(root_hyperplane(&vec![2; k]), Err(Error::ImaginaryRoot(_))));
            // Scaling preserves membership.
            let mut e = vec![0; k];
            e[0] = 1;
            let f = root_hyperplane(&e).unwrap();
            let mut a = p.coeffs().to_vec();
            a[0] = a[0].sub(&p.char_value(0));
            let inside = BimoduleParam::new(k, a).unwrap();
            assert!(f.contains(&inside).unwrap());
            assert!(f.contains(&inside.scale(&Cyclo::from_coeffs(k, vec![q(3, 2), qi(1)]))).unwrap());
        }
        assert!(matches!(root_hyperplane(&[2, 0, 0]), Err(Error::NotARoot(_))));
        assert!(root_hyperplane(&[1, 1, 0]).is_ok());
        assert!(root_hyperplane(&[-1, -1, 0]).is_ok());
    }

    #[test]
    fn simple_functionals_independent() {
        for k in [2usize, 3, 4, 6] {
            let rows: Vec<Vec<Cyclo>> = (0..k)
                .map(|i| {
                    let mut e = vec![0; k];
                    e[i] = 1;
                    root_hyperplane(&e).unwrap().coeffs
                })
                .collect();
            assert_eq!(Matrix::from_rows(rows).rank(), k);
        }
    }

    #[test]
    fn preproj_examples() {
        let rep = PreprojRep::zero(3, vec![1, 2, 0]).unwrap();
        let p = BimoduleParam::from_ints(3, &[0, 0, 0]).unwrap();
        assert!(preproj_check(&rep, &p).unwrap().passes);

        let p = BimoduleParam::from_ints(1, &[5]).unwrap();
        let mut rep = PreprojRep::zero(1, vec![1]).unwrap();
        rep.lambda = vec![p.char_value(0)];
        let rpt = preproj_check(&rep, &p).unwrap();
        assert!(!rpt.passes);
        assert_eq!(*rpt.residuals[0].get(0, 0), Cyclo::from_i64(1, -5));
        assert_eq!(rpt.lambda_matches, vec![true]);
    }

    #[test]
    fn jet_module_passes_iff_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..60 {
            let k = [1, 2, 3, 4, 6][trial % 5];
            let n = rng.gen_range(0..=4);
            let mut p = random_param(&mut rng, k);
            if trial % 2 == 0 {
                p = force_split(&p, n);
            }
            let rep = jet_module(n, &p);
            let rpt = preproj_check(&rep, &p).unwrap();
            assert_eq!(rpt.passes, splits(n, &p), "k={k} n={n}");
            assert!(rpt.cw_nilpotent);
            assert_eq!(rep.dims.iter().sum::<usize>(), n + 1);
        }
    }

    proptest::proptest! {
        #[test]
        fn characters_linear_and_periodic(k in 1usize..7, a in proptest::collection::vec(-5i64..5, 6), b in proptest::collection::vec(-5i64..5, 6), r in -10i64..10, s in -3i64..3) {
            let pa = BimoduleParam::from_ints(k, &a[..k]).unwrap();
            let pb = BimoduleParam::from_ints(k, &b[..k]).unwrap();
            let sc = Cyclo::from_i64(k, s);
            let lhs = pa.scale(&sc).add(&pb).char_value(r);
            let rhs = pa.char_value(r).mul(&sc).add(&pb.char_value(r));
            proptest::prop_assert_eq!(lhs, rhs);
            proptest::prop_assert_eq!(pa.char_value(r), pa.char_value(r + k as i64));
        }
    }
}
