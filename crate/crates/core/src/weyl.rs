//! Reflections on `F = h ⊕ Qδ₁ ⊕ Qδ₂`, the elliptic Weyl group, its
//! translation parts, and the stabilizer of the marking.
//!
//! Elements are matrices acting on column coordinate vectors
//! `(finite part in the simple-root basis, m, n)`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{qi, Q};
use crate::linalg::{Field, Matrix, QMatrixJson};
use crate::root_system::{EllipticRoot, EllipticSystem, Marking};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct WeylElement {
    pub matrix: Matrix<Q>,
    pub word: Vec<String>,
}

impl WeylElement {
    pub fn identity(dim: usize) -> Self {
        WeylElement { matrix: Matrix::identity(dim, &Q::one()), word: vec![] }
    }

    /// `w_β(x) = x − 2⟨x,β⟩/⟨β,β⟩ β`.
    pub fn reflect(sys: &EllipticSystem, beta: &EllipticRoot) -> Result<Self> {
        sys.check(beta)?;
        if beta.is_imaginary() {
            return Err(Error::ImaginaryRoot(beta.to_string()));
        }
        let g = sys.gram_f();
        let b: Vec<Q> = beta.coords().into_iter().map(qi).collect();
        let d = b.len();
        let gb: Vec<Q> = (0..d).map(|j| (0..d).map(|k| &g[j][k] * &b[k]).sum()).collect();
        let bb: Q = (0..d).map(|j| &b[j] * &gb[j]).sum();
        let mut m = Matrix::identity(d, &Q::one());
        for i in 0..d {
            if b[i].is_zero() {
                continue;
            }
            for j in 0..d {
                let v = m.get(i, j) - qi(2) * &b[i] * &gb[j] / &bb;
                m.set(i, j, v);
            }
        }
        Ok(WeylElement { matrix: m, word: vec![format!("w[{beta}]")] })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        WeylElement { matrix: self.matrix.mul(&other.matrix), word }
    }

    pub fn apply(&self, beta: &EllipticRoot) -> Option<EllipticRoot> {
        apply_int(&self.matrix, beta)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix::identity(self.matrix.rows(), &Q::one())
    }

    pub fn preserves_form(&self, gram: &[Vec<Q>]) -> bool {
        preserves(&self.matrix, gram)
    }

    pub fn to_json(&self) -> WeylElementJson {
        WeylElementJson { matrix: QMatrixJson::from(&self.matrix), word: self.word.clone() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylElementJson {
    pub matrix: QMatrixJson,
    pub word: Vec<String>,
}

fn apply_int(m: &Matrix<Q>, beta: &EllipticRoot) -> Option<EllipticRoot> {
    let v: Vec<Q> = beta.coords().into_iter().map(qi).collect();
    let out = m.apply(&v);
    let ints: Option<Vec<i64>> = out.iter().map(crate::arith::q_to_i64).collect();
    ints.map(|c| EllipticRoot::from_coords(&c))
}

fn preserves(m: &Matrix<Q>, gram: &[Vec<Q>]) -> bool {
    let g = Matrix::from_rows(gram.to_vec());
    if g.rows() == 0 {
        return true;
    }
    m.transpose().mul(&g).mul(m) == g
}

/// Image of `w ∈ W^ell` under the two quotient maps: the finite Weyl part
/// `A`, and translations `t_{λ,μ}(x) = x − (x,λ)δ₁ − (x,μ)δ₂` with
/// `w = t_{λ,μ} ∘ A`.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationPart {
    pub finite_image: Matrix<Q>,
    pub delta1: Vec<Q>,
    pub delta2: Vec<Q>,
    pub marking: Marking,
}

impl TranslationPart {
    /// Translation lying in the marking direction: the kernel of
    /// `W^ell → W_aff`.
    pub fn marking_translation(&self) -> &[Q] {
        match self.marking {
            Marking::Delta2 => &self.delta2,
            Marking::Delta1 => &self.delta1,
        }
    }

    /// Translation surviving in `W_aff`: the kernel of `W_aff → W_fin`.
    pub fn affine_translation(&self) -> &[Q] {
        match self.marking {
            Marking::Delta2 => &self.delta1,
            Marking::Delta1 => &self.delta2,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.delta1.iter().chain(&self.delta2).all(|x| x.is_zero())
    }
}

pub fn translation_part(sys: &EllipticSystem, w: &WeylElement) -> Result<TranslationPart> {
    let g = sys.gram_f();
    if !w.preserves_form(&g) {
        return Err(Error::NotFormPreserving);
    }
    let r = sys.rank();
    let m = &w.matrix;
    let d = r + 2;
    if m.rows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: m.rows() });
    }
    // W^ell fixes δ₁, δ₂ and keeps h-columns inside h ⊕ rad.
    for j in r..d {
        for i in 0..d {
            let want = if i == j { Q::one() } else { Q::zero() };
            if *m.get(i, j) != want {
                return Err(Error::InvalidArgument("element does not fix the radical pointwise".into()));
            }
        }
    }
    let a = Matrix::from_rows((0..r).map(|i| m.row(i)[..r].to_vec()).collect());
    if r == 0 {
        return Ok(TranslationPart { finite_image: a, delta1: vec![], delta2: vec![], marking: sys.marking() });
    }
    let b = Matrix::from_rows(sys.finite().gram().to_vec());
    let binv = b.inverse().expect("finite Gram matrix is definite");
    let lam = |row: usize| -> Vec<Q> {
        let u: Vec<Q> = m.row(row)[..r].to_vec();
        a.mul(&binv).apply(&u).into_iter().map(|x| -x).collect()
    };
    Ok(TranslationPart { delta1: lam(r), delta2: lam(r + 1), finite_image: a, marking: sys.marking() })
}

/// Element of the extended group acting on `F`: a Weyl part and a
/// `GL(2,Z)` part acting on `(m, n)` row vectors by right multiplication.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedElement {
    pub weyl_part: WeylElement,
    pub gl2_part: [[i64; 2]; 2],
}

impl ExtendedElement {
    pub fn from_gl2(dim: usize, g: [[i64; 2]; 2], label: &str) -> Result<Self> {
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if det.abs() != 1 {
            return Err(Error::InvalidArgument(format!("det {det} is not ±1")));
        }
        let mut weyl_part = WeylElement::identity(dim);
        weyl_part.word = vec![label.to_string()];
        Ok(ExtendedElement { weyl_part, gl2_part: g })
    }

    pub fn from_weyl(w: WeylElement) -> Self {
        ExtendedElement { weyl_part: w, gl2_part: [[1, 0], [0, 1]] }
    }

    /// Action on `F`: first the `GL(2,Z)` part on the δ-plane, then the
    /// Weyl part.
    pub fn full_matrix(&self) -> Matrix<Q> {
        let d = self.weyl_part.matrix.rows();
        let mut dm = Matrix::identity(d, &Q::one());
        let g = &self.gl2_part;
        // (m', n') = (m, n)·g  ⇒  column action by gᵀ
        for i in 0..2 {
            for j in 0..2 {
                dm.set(d - 2 + i, d - 2 + j, qi(g[j][i]));
            }
        }
        self.weyl_part.matrix.mul(&dm)
    }

    /// `self ∘ other`, splitting the product back into its two parts.
    pub fn compose(&self, other: &Self) -> Self {
        let full = self.full_matrix().mul(&other.full_matrix());
        let d = full.rows();
        let mut g = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                g[j][i] = crate::arith::q_to_i64(full.get(d - 2 + i, d - 2 + j)).expect("integral");
            }
        }
        let mut w = full.clone();
        for i in d - 2..d {
            for j in d - 2..d {
                w.set(i, j, if i == j { Q::one() } else { Q::zero() });
            }
        }
        // full = [[A,0],[U,gᵀ]] and the Weyl part is [[A,0],[U,1]].
        let mut word = self.weyl_part.word.clone();
        word.extend(other.weyl_part.word.iter().cloned());
        ExtendedElement { weyl_part: WeylElement { matrix: w, word }, gl2_part: g }
    }

    pub fn apply(&self, beta: &EllipticRoot) -> Option<EllipticRoot> {
        apply_int(&self.full_matrix(), beta)
    }

    pub fn preserves_form(&self, gram: &[Vec<Q>]) -> bool {
        preserves(&self.full_matrix(), gram)
    }

    /// `g·G ⊆ G` for the marking line.
    pub fn stabilizes_marking(&self, marking: Marking) -> bool {
        let m = self.full_matrix();
        let d = m.rows();
        let (keep, other) = match marking {
            Marking::Delta1 => (d - 2, d - 1),
            Marking::Delta2 => (d - 1, d - 2),
        };
        (0..d).all(|i| i == keep || m.get(i, keep).is_zero()) && m.get(other, keep).is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.full_matrix() == Matrix::identity(self.weyl_part.matrix.rows(), &Q::one())
    }

    pub fn gl2_matrix(&self) -> Matrix<Q> {
        Matrix::from_rows(self.gl2_part.iter().map(|r| r.iter().map(|x| qi(*x)).collect()).collect())
    }
}

/// Generators of the marking stabilizer: reflections in the simple
/// elliptic roots and the two `GL(2,Z)` elements generating the upper
/// (or lower, for `G = span δ₁`) triangular subgroup with ±1 diagonal.
pub fn marking_stabilizer_generators(sys: &EllipticSystem) -> Result<Vec<ExtendedElement>> {
    let d = sys.dim();
    let mut gens = Vec::new();
    for beta in sys.simple_elliptic_roots() {
        gens.push(ExtendedElement::from_weyl(WeylElement::reflect(sys, &beta)?));
    }
    let (s, f) = match sys.marking() {
        Marking::Delta2 => ([[1, 1], [0, 1]], [[1, 0], [0, -1]]),
        Marking::Delta1 => ([[1, 0], [1, 1]], [[-1, 0], [0, 1]]),
    };
    gens.push(ExtendedElement::from_gl2(d, s, "s")?);
    gens.push(ExtendedElement::from_gl2(d, f, "f")?);
    Ok(gens)
}

/// Certificate of infinite order for a matrix `g`: `g ≠ 1` and
/// `(g − 1)² = 0`, so `g^k = 1 + k(g − 1)` never returns to the identity.
pub fn unipotent_certificate<F: Field>(g: &Matrix<F>) -> bool {
    let one = g.get(0, 0).one_like();
    let n = Matrix::identity(g.rows(), &one);
    let u = g.sub(&n);
    !u.is_zero() && u.mul(&u).is_zero()
}

/// Coxeter exponent `m_ij` from the Cartan product `a_ij a_ji`.
pub fn coxeter_m(aij: i64, aji: i64) -> Option<u32> {
    match aij * aji {
        0 => Some(2),
        1 => Some(3),
        2 => Some(4),
        3 => Some(6),
        _ => None,
    }
}

/// Simple reflections of the finite part.
pub fn simple_reflections(sys: &EllipticSystem) -> Result<Vec<WeylElement>> {
    sys.finite()
        .simple_roots()
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut w = WeylElement::reflect(sys, &EllipticRoot::new(f, 0, 0))?;
            w.word = vec![format!("s{}", i + 1)];
            Ok(w)
        })
        .collect()
}

/// Checks `s_i² = 1` and that `s_i s_j` has order exactly `m_ij`.
/// Returns the list of failing `(i, j)`.
pub fn coxeter_relation_failures(sys: &EllipticSystem) -> Result<Vec<(usize, usize)>> {
    let s = simple_reflections(sys)?;
    let a = &sys.finite().cartan_matrix;
    let mut bad = Vec::new();
    for i in 0..s.len() {
        if !s[i].compose(&s[i]).is_identity() {
            bad.push((i, i));
        }
        for j in i + 1..s.len() {
            let Some(m) = coxeter_m(a[i][j], a[j][i]) else {
                bad.push((i, j));
                continue;
            };
            let p = s[i].compose(&s[j]);
            let mut acc = WeylElement::identity(sys.dim());
            let mut ok = true;
            for k in 1..=m {
                acc = acc.compose(&p);
                if acc.is_identity() != (k == m) {
                    ok = false;
                }
            }
            if !ok {
                bad.push((i, j));
            }
        }
    }
    Ok(bad)
}

/// Number of distinct elements of each length `0..=max_len` reached by
/// words in the simple reflections (breadth-first by word length).
pub fn length_profile(sys: &EllipticSystem, max_len: usize) -> Result<Vec<usize>> {
    use std::collections::HashSet;
    let s = simple_reflections(sys)?;
    let key = |m: &Matrix<Q>| -> Vec<Q> { m.to_rows().into_iter().flatten().collect() };
    let id = WeylElement::identity(sys.dim());
    let mut seen: HashSet<Vec<Q>> = HashSet::new();
    seen.insert(key(&id.matrix));
    let mut frontier = vec![id];
    let mut counts = vec![1usize];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &s {
                let x = w.compose(g);
                if seen.insert(key(&x.matrix)) {
                    next.push(x);
                }
            }
        }
        counts.push(next.len());
        frontier = next;
    }
    Ok(counts)
}
