//! Integer lattices with symmetric forms, Mukai vectors and their pairing,
//! Euler pairings on Koszul data, and the embedding of elliptic roots into
//! numerical K-theory of the surface.

use num_traits::Zero;
use serde::Serialize;

use crate::arith::{fmt_q, qi, Q};
use crate::root_system::{CartanType, EllipticRoot, EllipticSystem};
use crate::{Error, Result};

/// A free Z-module with a symmetric integral form and labelled basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BilinearLattice {
    labels: Vec<String>,
    gram: Vec<Vec<i64>>,
}

impl BilinearLattice {
    pub fn new(labels: Vec<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidArgument("lattice must have positive rank".into()));
        }
        if gram.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: gram.len() });
        }
        for row in &gram {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidArgument(format!("gram not symmetric at ({i},{j})")));
                }
            }
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::InvalidArgument("basis labels must be distinct".into()));
        }
        Ok(BilinearLattice { labels, gram })
    }

    /// The hyperbolic plane with basis `(E, P)`.
    pub fn ii11() -> Self {
        Self::new(vec!["E".into(), "P".into()], vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dot(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        self.check(x)?;
        self.check(y)?;
        let mut s = 0i64;
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                s += xi * self.gram[i][j] * yj;
            }
        }
        Ok(s)
    }

    /// Pairing of rational vectors.
    pub fn dot_q(&self, x: &[Q], y: &[Q]) -> Result<Q> {
        if x.len() != self.rank() || y.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: x.len().min(y.len()) });
        }
        let mut s = Q::zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                if self.gram[i][j] != 0 {
                    s += xi * yj * qi(self.gram[i][j]);
                }
            }
        }
        Ok(s)
    }

    fn check(&self, x: &[i64]) -> Result<()> {
        if x.len() == self.rank() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.rank(), got: x.len() })
        }
    }
}

/// `(rank, c1, ch2)` in numerical K-theory of a surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MukaiVector {
    pub rank: i64,
    pub c1: Vec<i64>,
    pub ch2: Q,
}

impl MukaiVector {
    /// Rejects `ch2` whose denominator does not divide 2.
    pub fn new(rank: i64, c1: Vec<i64>, ch2: Q) -> Result<Self> {
        let d = ch2.denom();
        if *d != 1.into() && *d != 2.into() {
            return Err(Error::InvalidArgument(format!("ch2 = {} is not a half-integer", fmt_q(&ch2))));
        }
        Ok(MukaiVector { rank, c1, ch2 })
    }

    pub fn integral(rank: i64, c1: Vec<i64>, ch2: i64) -> Self {
        MukaiVector { rank, c1, ch2: qi(ch2) }
    }

    /// `(1, 0, −n)`, the class of an ideal sheaf of `n` points.
    pub fn hilbert(ns_rank: usize, n: i64) -> Self {
        Self::integral(1, vec![0; ns_rank], -n)
    }

    pub fn is_hilbert(&self) -> Option<i64> {
        (self.rank == 1 && self.c1.iter().all(|c| *c == 0) && self.ch2.is_integer())
            .then(|| crate::arith::q_to_i64(&-self.ch2.clone()))
            .flatten()
            .filter(|n| *n >= 1)
    }
}

impl Serialize for MukaiVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rank: i64,
            c1: &'a [i64],
            ch2: String,
        }
        Repr { rank: self.rank, c1: &self.c1, ch2: fmt_q(&self.ch2) }.serialize(s)
    }
}

/// `⟨(r,c,s),(r',c',s')⟩ = c·c' − r s' − r' s`.
pub fn mukai_pair(v: &MukaiVector, w: &MukaiVector, ns: &BilinearLattice) -> Result<Q> {
    let cc = ns.dot(&v.c1, &w.c1)?;
    Ok(qi(cc) - qi(v.rank) * &w.ch2 - qi(w.rank) * &v.ch2)
}

/// Class in `K₀(C) ⊕ K₀(C)` given by `(rank, degree)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct KoszulClass {
    pub a: (i64, i64),
    pub b: (i64, i64),
}

/// Euler form on `K₀` of the curve and the action of `− ⊗ T`, both as
/// integer matrices on `(rank, degree)` column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CurveData {
    pub chi: [[i64; 2]; 2],
    pub tensor_t: [[i64; 2]; 2],
}

impl CurveData {
    /// Smooth curve of genus `g` with `T` a line bundle of degree `t`.
    pub fn genus(g: i64, t: i64) -> Self {
        CurveData { chi: [[1 - g, 1], [-1, 0]], tensor_t: [[1, 0], [t, 1]] }
    }

    pub fn chi(&self, x: (i64, i64), y: (i64, i64)) -> i64 {
        let xv = [x.0, x.1];
        let yv = [y.0, y.1];
        let mut s = 0;
        for i in 0..2 {
            for j in 0..2 {
                s += xv[i] * self.chi[i][j] * yv[j];
            }
        }
        s
    }

    pub fn tensor(&self, x: (i64, i64)) -> (i64, i64) {
        let m = &self.tensor_t;
        (m[0][0] * x.0 + m[0][1] * x.1, m[1][0] * x.0 + m[1][1] * x.1)
    }
}

/// `χ(a,c) + χ(b,d) − χ(a,d) − χ(a⊗T, d)` for `x = (a,b)`, `y = (c,d)`.
pub fn euler_pair_koszul(x: &KoszulClass, y: &KoszulClass, curve: &CurveData) -> i64 {
    curve.chi(x.a, y.a) + curve.chi(x.b, y.b) - curve.chi(x.a, y.b) - curve.chi(curve.tensor(x.a), y.b)
}

/// Numerical lattice of the surface attached to a Deligne-series type:
/// `II_{1,1}` on `(E, P)` for `A₋₁`, otherwise `Z⟨Θ, E⟩ ⊕ (root curves of R + R')`
/// with `Θ² = −1`, `Θ·E = 1`, `E² = 0` and the root part negative of the
/// Cartan matrix of `R + R'`.
#[derive(Clone, Debug)]
pub struct SurfaceLattice {
    cartan_type: CartanType,
    ns: BilinearLattice,
    e_index: usize,
    root_offset: usize,
    root_rank: usize,
}

impl SurfaceLattice {
    pub fn for_type(t: CartanType) -> Result<Self> {
        if t == CartanType::AMinus1 {
            return Ok(SurfaceLattice {
                cartan_type: t,
                ns: BilinearLattice::ii11(),
                e_index: 0,
                root_offset: 2,
                root_rank: 0,
            });
        }
        let comp = t.complement().ok_or_else(|| {
            Error::Unsupported(format!("no rational elliptic surface lattice for type {t}"))
        })?;
        let (r, s) = (t.rank(), comp.rank());
        let n = 2 + r + s;
        let mut labels: Vec<String> = vec!["Theta".into(), "E".into()];
        labels.extend((1..=r).map(|i| format!("C{i}")));
        labels.extend((1..=s).map(|i| format!("C'{i}")));
        let mut g = vec![vec![0i64; n]; n];
        g[0][0] = -1;
        g[0][1] = 1;
        g[1][0] = 1;
        for (off, ct) in [(2, t), (2 + r, comp)] {
            for (i, row) in ct.cartan_matrix().iter().enumerate() {
                for (j, a) in row.iter().enumerate() {
                    g[off + i][off + j] = -a;
                }
            }
        }
        Ok(SurfaceLattice {
            cartan_type: t,
            ns: BilinearLattice::new(labels, g)?,
            e_index: 1,
            root_offset: 2,
            root_rank: r,
        })
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn ns(&self) -> &BilinearLattice {
        &self.ns
    }

    pub fn e_class(&self) -> Vec<i64> {
        let mut v = vec![0; self.ns.rank()];
        v[self.e_index] = 1;
        v
    }

    pub fn hilbert_vector(&self, n: i64) -> MukaiVector {
        MukaiVector::hilbert(self.ns.rank(), n)
    }

    /// `α + m·δ_pt + n·δ_E ↦ (0, C_α + n[E], m)`.
    pub fn root_to_kclass(&self, sys: &EllipticSystem, beta: &EllipticRoot) -> Result<MukaiVector> {
        if sys.cartan_type() != self.cartan_type {
            return Err(Error::InvalidArgument(format!(
                "root system {} does not match lattice {}",
                sys.cartan_type(),
                self.cartan_type
            )));
        }
        sys.check(beta)?;
        let mut c1 = vec![0i64; self.ns.rank()];
        c1[self.e_index] = beta.n;
        for i in 0..self.root_rank {
            c1[self.root_offset + i] = beta.finite[i];
        }
        Ok(MukaiVector::integral(0, c1, beta.m))
    }

    pub fn pair(&self, v: &MukaiVector, w: &MukaiVector) -> Result<Q> {
        mukai_pair(v, w, &self.ns)
    }
}
