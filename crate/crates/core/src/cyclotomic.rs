//! The cyclotomic field Q(ζ_k), stored in the power basis modulo Φ_k.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use crate::arith::{fmt_q, qi, Q};
use crate::linalg::Field;

/// Dense polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<Q>);

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly(c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn coeff(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return QPoly(vec![]);
        }
        let mut c = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        let mut qt = vec![Q::zero(); self.0.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let f = &r[top] / &lead;
            if !f.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    let idx = top - dd + j;
                    r[idx] = &r[idx] - &f * dj;
                }
                qt[top - dd] = f;
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (QPoly::new(qt), QPoly::new(r))
    }
}

/// Φ_k by dividing x^k − 1 by Φ_d for every proper divisor d.
pub fn cyclotomic_poly(k: usize) -> QPoly {
    assert!(k >= 1);
    let mut c = vec![Q::zero(); k + 1];
    c[0] = qi(-1);
    c[k] = qi(1);
    let mut p = QPoly::new(c);
    for d in 1..k {
        if k.is_multiple_of(d) {
            let (qt, r) = p.div_rem(&cyclotomic_poly(d));
            debug_assert!(r.is_zero());
            p = qt;
        }
    }
    p
}

/// Element of Q(ζ_k) as coefficients of 1, ζ, …, ζ^{φ(k)−1}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    k: usize,
    c: Vec<Q>,
}

impl Cyclo {
    fn modulus(k: usize) -> Arc<QPoly> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<QPoly>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(p) = cache.read().unwrap().get(&k) {
            return p.clone();
        }
        let p = Arc::new(cyclotomic_poly(k));
        cache.write().unwrap().insert(k, p.clone());
        p
    }

    fn reduce(k: usize, p: QPoly) -> Self {
        let m = Self::modulus(k);
        let deg = m.degree().unwrap();
        let (_, r) = p.div_rem(&m);
        let mut c = r.0;
        c.resize(deg, Q::zero());
        Cyclo { k, c }
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn zero(k: usize) -> Self {
        Self::from_q(k, Q::zero())
    }

    pub fn one(k: usize) -> Self {
        Self::from_q(k, Q::one())
    }

    pub fn from_q(k: usize, x: Q) -> Self {
        let deg = Self::modulus(k).degree().unwrap();
        let mut c = vec![Q::zero(); deg];
        c[0] = x;
        Cyclo { k, c }
    }

    pub fn from_i64(k: usize, x: i64) -> Self {
        Self::from_q(k, qi(x))
    }

    /// ζ_k^j for any integer j.
    pub fn zeta_pow(k: usize, j: i64) -> Self {
        let e = j.rem_euclid(k as i64) as usize;
        let mut c = vec![Q::zero(); e + 1];
        c[e] = Q::one();
        Self::reduce(k, QPoly::new(c))
    }

    /// Builds from power-basis coefficients, reducing if too long.
    pub fn from_coeffs(k: usize, c: Vec<Q>) -> Self {
        Self::reduce(k, QPoly::new(c))
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn scale(&self, s: &Q) -> Self {
        Cyclo {
            k: self.k,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.k, o.k, "mixing cyclotomic fields");
    }

    fn poly(&self) -> QPoly {
        QPoly::new(self.c.clone())
    }

    /// Inverse via the extended Euclidean algorithm against Φ_k.
    fn invert(&self) -> Option<Self> {
        if Field::vanishes(self) {
            return None;
        }
        let m = Self::modulus(self.k);
        let (mut r0, mut r1) = ((*m).clone(), self.poly());
        let (mut t0, mut t1) = (QPoly(vec![]), QPoly(vec![Q::one()]));
        while !r1.is_zero() {
            let (qt, r) = r0.div_rem(&r1);
            let t = t0.sub(&qt.mul(&t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        // r0 is a nonzero constant since Φ_k is irreducible.
        let c = r0.0[0].clone();
        let inv = t0.mul(&QPoly(vec![c.recip()]));
        Some(Self::reduce(self.k, inv))
    }
}

impl Field for Cyclo {
    fn zero_like(&self) -> Self {
        Cyclo::zero(self.k)
    }
    fn one_like(&self) -> Self {
        Cyclo::one(self.k)
    }
    fn add(&self, o: &Self) -> Self {
        self.check(o);
        Cyclo {
            k: self.k,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        self.check(o);
        Cyclo {
            k: self.k,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        self.check(o);
        Self::reduce(self.k, self.poly().mul(&o.poly()))
    }
    fn neg(&self) -> Self {
        Cyclo {
            k: self.k,
            c: self.c.iter().map(|a| -a).collect(),
        }
    }
    fn inv(&self) -> Option<Self> {
        self.invert()
    }
    fn vanishes(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclo {
    /// Power-basis form such as `1/2 + -3*z + z^2`; `0` when zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = match i {
                0 => fmt_q(c),
                _ => {
                    let z = if i == 1 { "z".to_string() } else { format!("z^{i}") };
                    if c.is_one() {
                        z
                    } else {
                        format!("{}*{z}", fmt_q(c))
                    }
                }
            };
            parts.push(term);
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    #[test]
    fn cyclotomic_polynomials() {
        let as_i = |p: QPoly| -> Vec<i64> {
            p.0.iter().map(|x| crate::arith::q_to_i64(x).unwrap()).collect()
        };
        assert_eq!(as_i(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(as_i(cyclotomic_poly(2)), vec![1, 1]);
        assert_eq!(as_i(cyclotomic_poly(3)), vec![1, 1, 1]);
        assert_eq!(as_i(cyclotomic_poly(4)), vec![1, 0, 1]);
        assert_eq!(as_i(cyclotomic_poly(6)), vec![1, -1, 1]);
        assert_eq!(as_i(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for k in [2usize, 3, 4, 5, 6, 8] {
            let mut s = Cyclo::zero(k);
            for j in 0..k as i64 {
                s = s.add(&Cyclo::zeta_pow(k, j));
            }
            assert!(Field::vanishes(&s), "k={k}");
            assert_eq!(Cyclo::zeta_pow(k, k as i64), Cyclo::one(k));
        }
    }

    #[test]
    fn inverses() {
        for k in [1usize, 2, 3, 4, 6, 7] {
            let x = Cyclo::from_coeffs(k, vec![q(3, 2), qi(-1), q(1, 5)]);
            if Field::vanishes(&x) {
                continue;
            }
            let y = x.inv().unwrap();
            assert_eq!(x.mul(&y), Cyclo::one(k), "k={k}");
        }
        assert!(Cyclo::zero(3).inv().is_none());
    }

    #[test]
    fn display() {
        let z = Cyclo::zeta_pow(3, 2);
        assert_eq!(z.to_string(), "-1 + -1*z");
        assert_eq!(Cyclo::zero(4).to_string(), "0");
    }
}
