//! Finite root data for the Deligne series, elliptic root systems
//! `R_fin ⊔ {0}` + Zδ₁ + Zδ₂, and star-shaped diagrams of orbifold curves.

use std::collections::HashSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{q, qi, Q};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartanType {
    AMinus1,
    A0,
    A1,
    A2,
    G2,
    D4,
    F4,
    E6,
    E7,
    E8,
}

impl CartanType {
    pub const ALL: [CartanType; 10] = [
        CartanType::AMinus1,
        CartanType::A0,
        CartanType::A1,
        CartanType::A2,
        CartanType::G2,
        CartanType::D4,
        CartanType::F4,
        CartanType::E6,
        CartanType::E7,
        CartanType::E8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CartanType::AMinus1 => "A-1",
            CartanType::A0 => "A0",
            CartanType::A1 => "A1",
            CartanType::A2 => "A2",
            CartanType::G2 => "G2",
            CartanType::D4 => "D4",
            CartanType::F4 => "F4",
            CartanType::E6 => "E6",
            CartanType::E7 => "E7",
            CartanType::E8 => "E8",
        }
    }

    /// Accepts `A-1`, `A_{-1}`, `Am1`, `a1`, `E_8` and similar spellings.
    pub fn parse(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '{' | '}' | ' '))
            .collect::<String>()
            .to_ascii_uppercase();
        let t = match norm.as_str() {
            "A-1" | "AM1" | "A−1" => CartanType::AMinus1,
            "A0" => CartanType::A0,
            "A1" => CartanType::A1,
            "A2" => CartanType::A2,
            "G2" => CartanType::G2,
            "D4" => CartanType::D4,
            "F4" => CartanType::F4,
            "E6" => CartanType::E6,
            "E7" => CartanType::E7,
            "E8" => CartanType::E8,
            _ => return Err(Error::UnknownType(s.to_string())),
        };
        Ok(t)
    }

    pub fn rank(self) -> usize {
        match self {
            CartanType::AMinus1 | CartanType::A0 => 0,
            CartanType::A1 => 1,
            CartanType::A2 | CartanType::G2 => 2,
            CartanType::D4 | CartanType::F4 => 4,
            CartanType::E6 => 6,
            CartanType::E7 => 7,
            CartanType::E8 => 8,
        }
    }

    /// Types whose wall structure has no root-theoretic description.
    pub fn is_wild(self) -> bool {
        matches!(self, CartanType::A0 | CartanType::A1 | CartanType::A2)
    }

    pub fn is_simply_laced(self) -> bool {
        !matches!(self, CartanType::G2 | CartanType::F4)
    }

    /// Squared lengths of the simple roots (long roots have length 2).
    fn simple_lengths(self) -> Vec<Q> {
        match self {
            CartanType::G2 => vec![q(2, 3), qi(2)],
            CartanType::F4 => vec![qi(2), qi(2), qi(1), qi(1)],
            t => vec![qi(2); t.rank()],
        }
    }

    /// Dynkin edges `(i, j, (α_i, α_j))`, Bourbaki numbering from 0.
    fn edges(self) -> Vec<(usize, usize, Q)> {
        let m1 = || qi(-1);
        let chain = |ix: &[usize]| -> Vec<(usize, usize, Q)> {
            ix.windows(2).map(|w| (w[0], w[1], qi(-1))).collect()
        };
        match self {
            CartanType::AMinus1 | CartanType::A0 | CartanType::A1 => vec![],
            CartanType::A2 | CartanType::G2 => vec![(0, 1, m1())],
            CartanType::D4 => vec![(0, 1, m1()), (1, 2, m1()), (1, 3, m1())],
            CartanType::F4 => vec![(0, 1, m1()), (1, 2, m1()), (2, 3, q(-1, 2))],
            CartanType::E6 => {
                let mut e = chain(&[0, 2, 3, 4, 5]);
                e.push((1, 3, m1()));
                e
            }
            CartanType::E7 => {
                let mut e = chain(&[0, 2, 3, 4, 5, 6]);
                e.push((1, 3, m1()));
                e
            }
            CartanType::E8 => {
                let mut e = chain(&[0, 2, 3, 4, 5, 6, 7]);
                e.push((1, 3, m1()));
                e
            }
        }
    }

    /// Symmetrized Gram matrix `(α_i, α_j)` of the simple roots.
    pub fn gram(self) -> Vec<Vec<Q>> {
        let r = self.rank();
        let len = self.simple_lengths();
        let mut g = vec![vec![Q::zero(); r]; r];
        for i in 0..r {
            g[i][i] = len[i].clone();
        }
        for (i, j, v) in self.edges() {
            g[i][j] = v.clone();
            g[j][i] = v;
        }
        g
    }

    /// Cartan matrix `a_ij = 2(α_i, α_j)/(α_j, α_j)`.
    pub fn cartan_matrix(self) -> Vec<Vec<i64>> {
        let g = self.gram();
        let r = self.rank();
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let v = qi(2) * &g[i][j] / &g[j][j];
                        assert!(v.is_integer());
                        crate::arith::q_to_i64(&v).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    /// Complement of `R` inside E8 used for the `I_{1,9}` root part.
    pub fn complement(self) -> Option<CartanType> {
        match self {
            CartanType::A0 => Some(CartanType::E8),
            CartanType::A1 => Some(CartanType::E7),
            CartanType::A2 => Some(CartanType::E6),
            CartanType::D4 => Some(CartanType::D4),
            CartanType::E6 => Some(CartanType::A2),
            CartanType::E7 => Some(CartanType::A1),
            CartanType::E8 => Some(CartanType::A0),
            CartanType::AMinus1 | CartanType::G2 | CartanType::F4 => None,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validity of a (generalized) Cartan matrix in the finite sense:
/// diagonal 2, nonpositive off-diagonal, zero pattern symmetric.
pub fn is_valid_cartan(a: &[Vec<i64>]) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n)
        && (0..n).all(|i| {
            a[i][i] == 2
                && (0..n).all(|j| i == j || (a[i][j] <= 0 && ((a[i][j] == 0) == (a[j][i] == 0))))
        })
}

/// Finite root system in the simple-root basis.
#[derive(Clone, Debug)]
pub struct FiniteRootData {
    pub cartan_type: CartanType,
    pub cartan_matrix: Vec<Vec<i64>>,
    gram: Vec<Vec<Q>>,
    positive: Vec<Vec<i64>>,
}

impl FiniteRootData {
    pub fn new(t: CartanType) -> Self {
        let gram = t.gram();
        let positive = positive_roots(&gram);
        FiniteRootData {
            cartan_type: t,
            cartan_matrix: t.cartan_matrix(),
            gram,
            positive,
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Q>] {
        &self.gram
    }

    /// Simple roots as unit coordinate vectors.
    pub fn simple_roots(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
            .collect()
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive
    }

    /// Positive roots followed by their negatives.
    pub fn roots(&self) -> Vec<Vec<i64>> {
        let mut out = self.positive.clone();
        out.extend(self.positive.iter().map(|r| r.iter().map(|x| -x).collect()));
        out
    }

    pub fn inner(&self, x: &[i64], y: &[i64]) -> Q {
        let mut acc = Q::zero();
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if *yj != 0 {
                    acc += &self.gram[i][j] * qi(xi * yj);
                }
            }
        }
        acc
    }

    pub fn is_root(&self, x: &[i64]) -> bool {
        if x.len() != self.rank() || x.iter().all(|c| *c == 0) {
            return false;
        }
        let pos = x.iter().all(|c| *c >= 0);
        let y: Vec<i64> = if pos { x.to_vec() } else { x.iter().map(|c| -c).collect() };
        self.positive.contains(&y)
    }

    /// Highest root (the unique positive root of maximal height).
    pub fn highest_root(&self) -> Option<&[i64]> {
        self.positive
            .iter()
            .max_by_key(|r| r.iter().sum::<i64>())
            .map(|r| r.as_slice())
    }
}

pub fn height(x: &[i64]) -> i64 {
    x.iter().sum()
}

/// Positive roots by raising height with α-strings: `β + α_i` is a root iff
/// `p − ⟨β, α_i^∨⟩ > 0`, with `p` the length of the downward string.
fn positive_roots(gram: &[Vec<Q>]) -> Vec<Vec<i64>> {
    let r = gram.len();
    let inner = |x: &[i64], i: usize| -> Q {
        x.iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(j, c)| &gram[j][i] * qi(*c))
            .sum()
    };
    let simple: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut all: Vec<Vec<i64>> = simple.clone();
    let mut seen: HashSet<Vec<i64>> = simple.iter().cloned().collect();
    let mut layer = simple;
    while !layer.is_empty() {
        let mut next = Vec::new();
        for beta in &layer {
            for i in 0..r {
                if beta.iter().enumerate().all(|(j, c)| *c == i64::from(i == j)) {
                    continue;
                }
                let mut p = 0i64;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if seen.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pair = qi(2) * inner(beta, i) / &gram[i][i];
                let q_len = qi(p) - pair;
                if q_len.is_positive() {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if seen.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        next.sort();
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Which imaginary line is the marking `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[derive(Default)]
pub enum Marking {
    Delta1,
    #[default]
    Delta2,
}


/// `finite + m·δ₁ + n·δ₂`. For surfaces δ₁ = δ_pt and δ₂ = δ_E.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EllipticRoot {
    pub finite: Vec<i64>,
    pub m: i64,
    pub n: i64,
}

impl EllipticRoot {
    pub fn new(finite: Vec<i64>, m: i64, n: i64) -> Self {
        EllipticRoot { finite, m, n }
    }

    pub fn imaginary(rank: usize, m: i64, n: i64) -> Self {
        EllipticRoot { finite: vec![0; rank], m, n }
    }

    pub fn is_real(&self) -> bool {
        self.finite.iter().any(|c| *c != 0)
    }

    pub fn is_imaginary(&self) -> bool {
        !self.is_real()
    }

    pub fn neg(&self) -> Self {
        EllipticRoot {
            finite: self.finite.iter().map(|c| -c).collect(),
            m: -self.m,
            n: -self.n,
        }
    }

    /// Coordinates on `h ⊕ Qδ₁ ⊕ Qδ₂`.
    pub fn coords(&self) -> Vec<i64> {
        let mut v = self.finite.clone();
        v.push(self.m);
        v.push(self.n);
        v
    }

    pub fn from_coords(v: &[i64]) -> Self {
        let r = v.len() - 2;
        EllipticRoot { finite: v[..r].to_vec(), m: v[r], n: v[r + 1] }
    }

    fn sort_key(&self) -> (i64, i64, &[i64]) {
        (self.m, self.n, &self.finite)
    }
}

impl fmt::Display for EllipticRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}; {}d1 + {}d2)", self.finite, self.m, self.n)
    }
}

impl Serialize for EllipticRoot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            finite: &'a [i64],
            m: i64,
            n: i64,
            real: bool,
        }
        Repr { finite: &self.finite, m: self.m, n: self.n, real: self.is_real() }.serialize(s)
    }
}

/// Image in the affine root system `R^ell / (R^ell ∩ G)`: the δ not in `G`
/// survives as the affine imaginary direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineRoot {
    pub finite: Vec<i64>,
    pub k: i64,
}

/// Elliptic root system over a Deligne-series type.
#[derive(Clone, Debug)]
pub struct EllipticSystem {
    finite: FiniteRootData,
    marking: Marking,
}

impl EllipticSystem {
    pub fn new(t: CartanType) -> Self {
        Self::with_marking(t, Marking::Delta2)
    }

    pub fn with_marking(t: CartanType, marking: Marking) -> Self {
        EllipticSystem { finite: FiniteRootData::new(t), marking }
    }

    pub fn cartan_type(&self) -> CartanType {
        self.finite.cartan_type
    }

    pub fn finite(&self) -> &FiniteRootData {
        &self.finite
    }

    pub fn marking(&self) -> Marking {
        self.marking
    }

    pub fn rank(&self) -> usize {
        self.finite.rank()
    }

    /// Dimension of `F = h ⊕ Qδ₁ ⊕ Qδ₂`.
    pub fn dim(&self) -> usize {
        self.rank() + 2
    }

    /// Gram matrix on `F`; the δ's span the radical.
    pub fn gram_f(&self) -> Vec<Vec<Q>> {
        let r = self.rank();
        let mut g = vec![vec![Q::zero(); r + 2]; r + 2];
        for (i, row) in self.finite.gram().iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                g[i][j] = x.clone();
            }
        }
        g
    }

    pub fn pairing(&self, x: &EllipticRoot, y: &EllipticRoot) -> Q {
        self.finite.inner(&x.finite, &y.finite)
    }

    pub fn check(&self, beta: &EllipticRoot) -> Result<()> {
        if beta.finite.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: beta.finite.len() });
        }
        if self.contains(beta) {
            Ok(())
        } else {
            Err(Error::NotARoot(beta.to_string()))
        }
    }

    pub fn contains(&self, beta: &EllipticRoot) -> bool {
        if beta.finite.len() != self.rank() {
            return false;
        }
        if beta.is_imaginary() {
            (beta.m, beta.n) != (0, 0)
        } else {
            self.finite.is_root(&beta.finite)
        }
    }

    pub fn is_real(&self, beta: &EllipticRoot) -> bool {
        beta.is_real()
    }

    pub fn is_imaginary(&self, beta: &EllipticRoot) -> bool {
        beta.is_imaginary()
    }

    /// All roots with `|m| ≤ m_max`, `|n| ≤ n_max` and finite part of
    /// absolute height at most `height_max` (`None` for no bound), sorted
    /// lexicographically by `(m, n, finite)`.
    pub fn roots_in_box(&self, m_max: u32, n_max: u32, height_max: Option<u32>) -> Vec<EllipticRoot> {
        let (mm, nm) = (i64::from(m_max), i64::from(n_max));
        let mut finite: Vec<Vec<i64>> = self
            .finite
            .roots()
            .into_iter()
            .filter(|r| height_max.is_none_or(|h| height(r).abs() <= i64::from(h)))
            .collect();
        finite.push(vec![0; self.rank()]);
        let mut out = Vec::new();
        for m in -mm..=mm {
            for n in -nm..=nm {
                for f in &finite {
                    let beta = EllipticRoot::new(f.clone(), m, n);
                    if beta.is_imaginary() && (m, n) == (0, 0) {
                        continue;
                    }
                    out.push(beta);
                }
            }
        }
        out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        out
    }

    pub fn to_affine(&self, beta: &EllipticRoot) -> AffineRoot {
        let k = match self.marking {
            Marking::Delta2 => beta.m,
            Marking::Delta1 => beta.n,
        };
        AffineRoot { finite: beta.finite.clone(), k }
    }

    /// Simple roots of the elliptic system: the finite simple roots and
    /// `−θ + δ₁`, `−θ + δ₂` for the highest root θ.
    pub fn simple_elliptic_roots(&self) -> Vec<EllipticRoot> {
        let r = self.rank();
        let mut out: Vec<EllipticRoot> = self
            .finite
            .simple_roots()
            .into_iter()
            .map(|f| EllipticRoot::new(f, 0, 0))
            .collect();
        if let Some(theta) = self.finite.highest_root() {
            let neg: Vec<i64> = theta.iter().map(|c| -c).collect();
            out.push(EllipticRoot::new(neg.clone(), 1, 0));
            out.push(EllipticRoot::new(neg, 0, 1));
        }
        debug_assert!(out.iter().all(|b| b.finite.len() == r));
        out
    }
}

/// Star-shaped diagram of an orbifold curve: a central node carrying
/// `central_multiplicity` loops (the genus of the coarse curve) and one arm
/// of `p − 1` nodes for each orbifold point of weight `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarShapedData {
    pub arm_lengths: Vec<u32>,
    pub central_multiplicity: u32,
}

impl StarShapedData {
    pub fn new(arm_lengths: Vec<u32>, central_multiplicity: u32) -> Result<Self> {
        if arm_lengths.contains(&0) {
            return Err(Error::InvalidArgument("orbifold weights must be positive".into()));
        }
        Ok(StarShapedData { arm_lengths, central_multiplicity })
    }

    /// Diagram of `[E/Γ]` for cyclic Γ of order 1, 2, 3, 4, 6.
    pub fn for_cyclic_quotient(k: u32) -> Result<Self> {
        match k {
            1 => Self::new(vec![], 1),
            2 => Self::new(vec![2, 2, 2, 2], 0),
            3 => Self::new(vec![3, 3, 3], 0),
            4 => Self::new(vec![2, 4, 4], 0),
            6 => Self::new(vec![2, 3, 6], 0),
            _ => Err(Error::Unsupported(format!("no elliptic curve has an automorphism of order {k} fixing a point"))),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.arm_lengths.iter().map(|p| (*p as usize).saturating_sub(1)).sum::<usize>()
    }

    /// Generalized Cartan matrix; node 0 is the centre, arms follow in order
    /// from the centre outwards.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.node_count();
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        a[0][0] = 2 - 2 * i64::from(self.central_multiplicity);
        let mut next = 1;
        for p in &self.arm_lengths {
            let mut prev = 0;
            for _ in 1..*p {
                a[prev][next] = -1;
                a[next][prev] = -1;
                prev = next;
                next += 1;
            }
        }
        a
    }

    /// Tits form `q(x) = ½ xᵀ A x`.
    pub fn tits_form(&self, x: &[i64]) -> i64 {
        let a = self.cartan_matrix();
        let mut s = 0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                s += x[i] * a[i][j] * x[j];
            }
        }
        s / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Independent oracle: close the simple roots under simple reflections.
    fn orbit_roots(t: CartanType) -> BTreeSet<Vec<i64>> {
        let g = t.gram();
        let r = g.len();
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut stack: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
            .collect();
        while let Some(b) = stack.pop() {
            if !seen.insert(b.clone()) {
                continue;
            }
            for i in 0..r {
                let ip: Q = (0..r).map(|j| &g[j][i] * qi(b[j])).sum();
                let c = qi(2) * ip / &g[i][i];
                let c = crate::arith::q_to_i64(&c).unwrap();
                let mut nb = b.clone();
                nb[i] -= c;
                stack.push(nb);
            }
        }
        seen
    }

    #[test]
    fn root_counts_match_orbit_oracle() {
        let expected = [
            (CartanType::AMinus1, 0),
            (CartanType::A0, 0),
            (CartanType::A1, 2),
            (CartanType::A2, 6),
            (CartanType::G2, 12),
            (CartanType::D4, 24),
            (CartanType::F4, 48),
            (CartanType::E6, 72),
            (CartanType::E7, 126),
            (CartanType::E8, 240),
        ];
        for (t, n) in expected {
            let d = FiniteRootData::new(t);
            let ours: BTreeSet<Vec<i64>> = d.roots().into_iter().collect();
            assert_eq!(ours.len(), n, "{t}");
            assert_eq!(ours, orbit_roots(t), "{t}");
        }
    }

    #[test]
    fn cartan_matrices_are_valid() {
        for t in CartanType::ALL {
            assert!(is_valid_cartan(&t.cartan_matrix()), "{t}");
        }
        assert_eq!(CartanType::G2.cartan_matrix(), vec![vec![2, -1], vec![-3, 2]]);
        assert_eq!(CartanType::A2.cartan_matrix(), vec![vec![2, -1], vec![-1, 2]]);
    }

    #[test]
    fn root_lengths() {
        for t in CartanType::ALL {
            let d = FiniteRootData::new(t);
            for r in d.roots() {
                let l = d.inner(&r, &r);
                let ok = l == qi(2)
                    || (t == CartanType::G2 && l == q(2, 3))
                    || (t == CartanType::F4 && l == qi(1));
                assert!(ok, "{t} {r:?} has length {l}");
            }
        }
    }

    #[test]
    fn parse_names() {
        for t in CartanType::ALL {
            assert_eq!(CartanType::parse(t.name()).unwrap(), t);
        }
        assert_eq!(CartanType::parse("A_{-1}").unwrap(), CartanType::AMinus1);
        assert!(CartanType::parse("B3").is_err());
    }

    #[test]
    fn box_examples() {
        let a = EllipticSystem::new(CartanType::AMinus1);
        let b = a.roots_in_box(1, 1, None);
        assert_eq!(b.len(), 8);
        assert!(b.iter().all(|r| r.is_imaginary()));

        let a1 = EllipticSystem::new(CartanType::A1);
        let b = a1.roots_in_box(0, 0, Some(1));
        assert_eq!(b, vec![EllipticRoot::new(vec![-1], 0, 0), EllipticRoot::new(vec![1], 0, 0)]);

        let d4 = EllipticSystem::new(CartanType::D4);
        let b = d4.roots_in_box(1, 0, None);
        assert_eq!(b.len(), 3 * 24 + 2);
        assert_eq!(b.iter().filter(|r| r.is_imaginary()).count(), 2);
    }

    #[test]
    fn real_and_imaginary() {
        let s = EllipticSystem::new(CartanType::A1);
        assert!(s.is_imaginary(&EllipticRoot::imaginary(1, 1, 0)));
        assert!(s.is_real(&EllipticRoot::new(vec![1], 0, 1)));
        assert!(s.is_imaginary(&EllipticRoot::imaginary(1, 2, 3)));
        assert!(!s.contains(&EllipticRoot::imaginary(1, 0, 0)));
        assert!(!s.contains(&EllipticRoot::new(vec![2], 0, 0)));
    }

    #[test]
    fn affine_layers_are_constant() {
        use std::collections::BTreeMap;
        let s = EllipticSystem::new(CartanType::A2);
        let nmax = 3;
        let mut counts: BTreeMap<AffineRoot, usize> = BTreeMap::new();
        for b in s.roots_in_box(2, nmax, None) {
            *counts.entry(s.to_affine(&b)).or_default() += 1;
        }
        for (a, c) in counts {
            let zero = a.finite.iter().all(|x| *x == 0) && a.k == 0;
            let expect = if zero { 2 * nmax as usize } else { 2 * nmax as usize + 1 };
            assert_eq!(c, expect, "{a:?}");
        }
    }

    #[test]
    fn star_shaped_quotients_are_affine() {
        for k in [2u32, 3, 4, 6] {
            let s = StarShapedData::for_cyclic_quotient(k).unwrap();
            let a = s.cartan_matrix();
            let m = crate::linalg::q_matrix(&a);
            assert_eq!(m.rank(), s.node_count() - 1, "k={k}");
            let weights: Q = s.arm_lengths.iter().map(|p| qi(1) - q(1, i64::from(*p))).sum();
            assert_eq!(weights, qi(2));
        }
        let j = StarShapedData::for_cyclic_quotient(1).unwrap();
        assert_eq!(j.cartan_matrix(), vec![vec![0]]);
        assert_eq!(j.tits_form(&[5]), 0);
        assert!(StarShapedData::for_cyclic_quotient(5).is_err());
    }
}
