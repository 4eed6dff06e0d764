//! Fock space over `H*(E)` with lattice-charged vacua `e^{cE}|⟩`:
//! Heisenberg modes, the vertex operator `Y(e^{mE}, z)`, the toroidal
//! generators `w^{a,b}_γ`, bracket verification and the monodromy action.
//!
//! Conventions:
//! - basis `E < σ₊ < σ₋ < pt` of `H*(E)`, `σ±` odd; `⟨E,pt⟩ = ⟨pt,E⟩ = 1`,
//!   `⟨σ₊,σ₋⟩ = 1 = −⟨σ₋,σ₊⟩`;
//! - `[α_m(γ), α_k(η)} = m δ_{m+k,0} ⟨γ,η⟩` (anticommutator for two odd modes);
//! - `α_0(γ) = c⟨γ,E⟩` on charge `c`;
//! - `Y(e^{mE}, z) = e^{mE} exp(Σ_{n>0} α_{−n}(mE) zⁿ/n) exp(−Σ_{n>0} α_n(mE) z^{−n}/n)`,
//!   with no cocycle since `⟨E,E⟩ = 0`; `Γ^{(m)}_p` is its `z^{−p}` mode.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{binomial, factorial, fmt_q, qi, Q};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    #[serde(rename = "E")]
    E,
    #[serde(rename = "sigma+")]
    SigmaPlus,
    #[serde(rename = "sigma-")]
    SigmaMinus,
    #[serde(rename = "pt")]
    Pt,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::E, Label::SigmaPlus, Label::SigmaMinus, Label::Pt];
    /// Labels whose generators exist at every slope without extra conventions.
    pub const MANDATORY: [Label; 3] = [Label::E, Label::SigmaPlus, Label::SigmaMinus];

    pub fn is_odd(self) -> bool {
        matches!(self, Label::SigmaPlus | Label::SigmaMinus)
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::E => "E",
            Label::SigmaPlus => "sigma+",
            Label::SigmaMinus => "sigma-",
            Label::Pt => "pt",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "E" | "e" => Ok(Label::E),
            "sigma+" | "s+" | "σ₊" => Ok(Label::SigmaPlus),
            "sigma-" | "s-" | "σ₋" => Ok(Label::SigmaMinus),
            "pt" | "PT" => Ok(Label::Pt),
            other => Err(Error::Parse(format!("unknown cohomology label {other:?}"))),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `⟨γ, η⟩` on basis labels.
pub fn pairing(a: Label, b: Label) -> i64 {
    use Label::*;
    match (a, b) {
        (E, Pt) | (Pt, E) | (SigmaPlus, SigmaMinus) => 1,
        (SigmaMinus, SigmaPlus) => -1,
        _ => 0,
    }
}

/// Which product `γ ⋆ η` enters the bracket. `Cup` has unit `E` and
/// `σ₊⋆σ₋ = pt`; `Dual` is its Poincaré dual, with unit `pt` and
/// `σ₊⋆σ₋ = E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ProductConvention {
    Cup,
    Dual,
}

/// `γ ⋆ η` as `(coefficient, label)`, or `None` when it vanishes.
pub fn star(a: Label, b: Label, conv: ProductConvention) -> Option<(i64, Label)> {
    use Label::*;
    let (unit, top) = match conv {
        ProductConvention::Cup => (E, Pt),
        ProductConvention::Dual => (Pt, E),
    };
    match (a, b) {
        (x, y) if x == unit => Some((1, y)),
        (x, y) if y == unit => Some((1, x)),
        (SigmaPlus, SigmaMinus) => Some((1, top)),
        (SigmaMinus, SigmaPlus) => Some((-1, top)),
        _ => None,
    }
}

/// Element of `H*(E)` in the basis `E, σ₊, σ₋, pt`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CohClass {
    pub coeffs: [Q; 4],
}

impl CohClass {
    pub fn zero() -> Self {
        CohClass { coeffs: [Q::zero(), Q::zero(), Q::zero(), Q::zero()] }
    }

    pub fn basis(l: Label) -> Self {
        let mut c = Self::zero();
        c.coeffs[l.index()] = Q::one();
        c
    }

    pub fn coeff(&self, l: Label) -> &Q {
        &self.coeffs[l.index()]
    }

    pub fn terms(&self) -> impl Iterator<Item = (Label, &Q)> {
        Label::ALL.into_iter().map(|l| (l, self.coeff(l))).filter(|(_, c)| !c.is_zero())
    }

    pub fn pair(&self, o: &Self) -> Q {
        let mut s = Q::zero();
        for (a, x) in self.terms() {
            for (b, y) in o.terms() {
                let p = pairing(a, b);
                if p != 0 {
                    s += x * y * qi(p);
                }
            }
        }
        s
    }
}

/// `SL(2,Z)` acting on `span(σ₊, σ₋)` through the matrix columns, fixing
/// `E` and `pt`: `σ₊ ↦ g₀₀σ₊ + g₁₀σ₋`, `σ₋ ↦ g₀₁σ₊ + g₁₁σ₋`.
pub fn sl2_label_action(g: [[i64; 2]; 2], c: &CohClass) -> Result<CohClass> {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if det != 1 {
        return Err(Error::InvalidArgument(format!("determinant {det} is not 1")));
    }
    let (p, m) = (c.coeff(Label::SigmaPlus).clone(), c.coeff(Label::SigmaMinus).clone());
    let mut out = c.clone();
    out.coeffs[Label::SigmaPlus.index()] = qi(g[0][0]) * &p + qi(g[0][1]) * &m;
    out.coeffs[Label::SigmaMinus.index()] = qi(g[1][0]) * &p + qi(g[1][1]) * &m;
    Ok(out)
}

/// Creation mode `α_{−k}(label)`, `k ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Mode {
    pub k: u32,
    pub label: Label,
}

impl Ord for Mode {
    /// Canonical order: `k` descending, then label order.
    fn cmp(&self, o: &Self) -> Ordering {
        o.k.cmp(&self.k).then(self.label.cmp(&o.label))
    }
}

impl PartialOrd for Mode {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Canonically ordered product of creation modes; odd modes appear at most
/// once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<Mode>);

impl Monomial {
    pub fn empty() -> Self {
        Monomial(Vec::new())
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }

    pub fn energy(&self) -> u32 {
        self.0.iter().map(|m| m.k).sum()
    }

    /// `α_{−k}(label)` applied on the left: `None` for a repeated odd mode,
    /// otherwise the new monomial and the sign of moving past odd modes.
    pub fn insert(&self, mode: Mode) -> Option<(Monomial, i32)> {
        let pos = self.0.partition_point(|x| *x < mode);
        if mode.label.is_odd() && self.0.get(pos) == Some(&mode) {
            return None;
        }
        let sign = if mode.label.is_odd() && self.0[..pos].iter().filter(|x| x.label.is_odd()).count() % 2 == 1 {
            -1
        } else {
            1
        };
        let mut v = self.0.clone();
        v.insert(pos, mode);
        Some((Monomial(v), sign))
    }

    fn without(&self, i: usize) -> Monomial {
        let mut v = self.0.clone();
        v.remove(i);
        Monomial(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|m| format!("a_-{}({})", m.k, m.label)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `monomial · e^{charge·E}|⟩`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey {
    pub charge: i64,
    pub mono: Monomial,
}

impl BasisKey {
    pub fn vacuum(charge: i64) -> Self {
        BasisKey { charge, mono: Monomial::empty() }
    }
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} e^{}E|>", self.mono, self.charge)
    }
}

/// Exact finite linear combination of basis states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockState {
    terms: BTreeMap<BasisKey, Q>,
}

impl FockState {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum(charge: i64) -> Self {
        Self::basis(BasisKey::vacuum(charge))
    }

    pub fn basis(key: BasisKey) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(key, Q::one());
        FockState { terms }
    }

    /// `α_{−k₁}(γ₁) ⋯ α_{−k_r}(γ_r) e^{cE}|⟩`, modes applied right to left.
    pub fn from_modes(charge: i64, modes: &[(u32, Label)]) -> Self {
        let mut mono = Monomial::empty();
        let mut sign = 1;
        for &(k, label) in modes.iter().rev() {
            assert!(k >= 1, "creation modes need k >= 1");
            match mono.insert(Mode { k, label }) {
                Some((m, s)) => {
                    mono = m;
                    sign *= s;
                }
                None => return Self::zero(),
            }
        }
        let mut st = Self::zero();
        st.add_term(BasisKey { charge, mono }, qi(i64::from(sign)));
        st
    }

    pub fn add_term(&mut self, key: BasisKey, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, o: &FockState, s: &Q) {
        if s.is_zero() {
            return;
        }
        if s.is_one() {
            for (k, c) in &o.terms {
                self.add_term(k.clone(), c.clone());
            }
            return;
        }
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c * s);
        }
    }

    pub fn add(&self, o: &FockState) -> FockState {
        let mut r = self.clone();
        r.add_scaled(o, &Q::one());
        r
    }

    pub fn sub(&self, o: &FockState) -> FockState {
        let mut r = self.clone();
        r.add_scaled(o, &-Q::one());
        r
    }

    pub fn scale(&self, s: &Q) -> FockState {
        let mut r = FockState::zero();
        r.add_scaled(self, s);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisKey, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: &BasisKey) -> Q {
        self.terms.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_energy(&self) -> u32 {
        self.terms.keys().map(|k| k.mono.energy()).max().unwrap_or(0)
    }
}

impl Serialize for FockState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            charge: i64,
            modes: Vec<(u32, Label)>,
            coeff: String,
        }
        #[derive(Serialize)]
        struct Repr {
            charge: Option<i64>,
            terms: Vec<Term>,
        }
        let charges: BTreeSet<i64> = self.terms.keys().map(|k| k.charge).collect();
        let charge = if charges.len() == 1 { charges.first().copied() } else { None };
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| Term {
                charge: k.charge,
                modes: k.mono.0.iter().map(|m| (m.k, m.label)).collect(),
                coeff: fmt_q(c),
            })
            .collect();
        Repr { charge, terms }.serialize(s)
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("({}) {}", fmt_q(c), k)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// All monomials of energy `≤ max_energy` at the given charge, in
/// canonical order.
pub fn basis(max_energy: u32, charge: i64) -> Vec<BasisKey> {
    fn rec(remaining: u32, last: Option<Mode>, cur: &mut Vec<Mode>, out: &mut Vec<Monomial>) {
        out.push(Monomial(cur.clone()));
        for k in (1..=remaining).rev() {
            for label in Label::ALL {
                let m = Mode { k, label };
                if let Some(l) = last {
                    match m.cmp(&l) {
                        Ordering::Less => continue,
                        Ordering::Equal if label.is_odd() => continue,
                        _ => {}
                    }
                }
                cur.push(m);
                rec(remaining - k, Some(m), cur, out);
                cur.pop();
            }
        }
    }
    let mut monos = Vec::new();
    rec(max_energy, None, &mut Vec::new(), &mut monos);
    monos.sort();
    monos.into_iter().map(|mono| BasisKey { charge, mono }).collect()
}

/// `α_n(label)` on one basis state.
pub fn alpha_on_basis(n: i64, label: Label, key: &BasisKey) -> FockState {
    let mut out = FockState::zero();
    match n.cmp(&0) {
        Ordering::Less => {
            if let Some((mono, sign)) = key.mono.insert(Mode { k: n.unsigned_abs() as u32, label }) {
                out.add_term(BasisKey { charge: key.charge, mono }, qi(i64::from(sign)));
            }
        }
        Ordering::Equal => {
            let c = key.charge * pairing(label, Label::E);
            out.add_term(key.clone(), qi(c));
        }
        Ordering::Greater => {
            let mut odd_seen = 0usize;
            for (i, m) in key.mono.0.iter().enumerate() {
                if i64::from(m.k) == n {
                    let p = pairing(label, m.label);
                    if p != 0 {
                        let sign = if label.is_odd() && odd_seen % 2 == 1 { -1 } else { 1 };
                        out.add_term(BasisKey { charge: key.charge, mono: key.mono.without(i) }, qi(n * p * sign));
                    }
                }
                if m.label.is_odd() {
                    odd_seen += 1;
                }
            }
        }
    }
    out
}

/// Partitions of `a` as `(part, multiplicity)` lists with the coefficient
/// `∏ (m/j)^{c_j} / c_j!` of `∏ α_{−j}(E)^{c_j}` in `exp(m Σ α_{−j}(E) z^j / j)`.
fn creation_terms(m: i64, a: u32) -> Vec<(Vec<(u32, u32)>, Q)> {
    fn rec(rem: u32, max_part: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for j in (1..=max_part.min(rem)).rev() {
            for c in (1..=rem / j).rev() {
                cur.push((j, c));
                rec(rem - j * c, j - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut parts = Vec::new();
    rec(a, a, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .map(|p| {
            let mut coef = Q::one();
            for &(j, c) in &p {
                let base = Q::new(m.into(), i64::from(j).into());
                for _ in 0..c {
                    coef *= &base;
                }
                coef /= Q::from_integer(factorial(u64::from(c)));
            }
            (p, coef)
        })
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// `Γ^{(m)}_p`, the `z^{−p}` mode of `Y(e^{mE}, z)`, on one basis state:
/// `e^{mE} Σ_{b ≥ max(0,p)} C_{b−p} A_b` where `A_b` contracts pt-modes of
/// total energy `b` and `C_a` creates E-modes of total energy `a`.
pub fn vertex_on_basis(m: i64, p: i64, key: &BasisKey) -> FockState {
    let mut out = FockState::zero();
    if m == 0 {
        if p == 0 {
            out.add_term(key.clone(), Q::one());
        }
        return out;
    }
    // Multiplicities of pt-modes, by mode index.
    let mut pt_mult: BTreeMap<u32, u32> = BTreeMap::new();
    for md in &key.mono.0 {
        if md.label == Label::Pt {
            *pt_mult.entry(md.k).or_default() += 1;
        }
    }
    let pt_modes: Vec<(u32, u32)> = pt_mult.into_iter().collect();
    let mut creation_cache: HashMap<u32, Vec<(Vec<(u32, u32)>, Q)>> = HashMap::new();
    // Enumerate removal counts c_j ≤ a_j.
    let mut counts = vec![0u32; pt_modes.len()];
    loop {
        let b: i64 = pt_modes.iter().zip(&counts).map(|((j, _), c)| i64::from(j * c)).sum();
        let a = b - p;
        if a >= 0 {
            let mut coef = Q::one();
            for ((_, mult), c) in pt_modes.iter().zip(&counts) {
                coef *= qi(binomial(u64::from(*mult), u64::from(*c)) as i64);
                for _ in 0..*c {
                    coef *= qi(-m);
                }
            }
            // Remove the contracted pt-modes.
            let mut remaining: Vec<Mode> = Vec::with_capacity(key.mono.0.len());
            let mut to_remove: BTreeMap<u32, u32> =
                pt_modes.iter().zip(&counts).map(|((j, _), c)| (*j, *c)).collect();
            for md in &key.mono.0 {
                if md.label == Label::Pt {
                    if let Some(r) = to_remove.get_mut(&md.k) {
                        if *r > 0 {
                            *r -= 1;
                            continue;
                        }
                    }
                }
                remaining.push(*md);
            }
            let base = Monomial(remaining);
            let terms = creation_cache.entry(a as u32).or_insert_with(|| creation_terms(m, a as u32));
            for (part, c2) in terms.iter() {
                let mut v = base.0.clone();
                for &(j, c) in part {
                    for _ in 0..c {
                        v.push(Mode { k: j, label: Label::E });
                    }
                }
                // Only even modes were added, so sorting introduces no sign.
                v.sort();
                out.add_term(BasisKey { charge: key.charge + m, mono: Monomial(v) }, &coef * c2);
            }
        }
        // Next count vector.
        let mut i = 0;
        loop {
            if i == counts.len() {
                return out;
            }
            if counts[i] < pt_modes[i].1 {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

/// `S^a_b(σ) = Σ_{n≠0} α_n(σ) Γ^{(a)}_{b−n}`, the `z^{−b}` mode of
/// `z :α(σ,z) Γ_{aE}(z):`. Only `b − e ≤ n ≤ e` contribute on a state of
/// energy `e`.
pub fn sigma_on_basis(a: i64, b: i64, label: Label, key: &BasisKey) -> FockState {
    let e = i64::from(key.mono.energy());
    let mut out = FockState::zero();
    for n in (b - e)..=e {
        if n == 0 {
            continue;
        }
        let g = vertex_on_basis(a, b - n, key);
        for (k, c) in g.terms() {
            out.add_scaled(&alpha_on_basis(n, label, k), c);
        }
    }
    out
}

/// `L_n` of the Heisenberg conformal vector
/// `ω = :α(E)α(pt): + :α(σ₋)α(σ₊):`, with the usual normal ordering
/// (larger mode index to the right, a sign for reordering odd modes). `L_0`
/// is the energy.
pub fn virasoro_on_basis(n: i64, key: &BasisKey) -> FockState {
    let e = i64::from(key.mono.energy());
    let bound = n.abs() + e + 1;
    let mut out = FockState::zero();
    for (left, right, odd) in [(Label::E, Label::Pt, false), (Label::SigmaMinus, Label::SigmaPlus, true)] {
        for k in -bound..=bound {
            let l = n - k;
            // :α_k(left) α_l(right):
            let (first, second, sign) = if k <= l {
                ((l, right), (k, left), 1)
            } else {
                ((k, left), (l, right), if odd { -1 } else { 1 })
            };
            let mid = alpha_on_basis(first.0, first.1, key);
            for (mk, c) in mid.terms() {
                out.add_scaled(&alpha_on_basis(second.0, second.1, mk), &(c * qi(sign)));
            }
        }
    }
    out
}

/// How `D_z` acts in the pt field at nonzero slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DzConvention {
    /// `∂_z`.
    Derivative,
    /// `z∂_z`.
    Euler,
}

fn apply_then(first: &FockState, f: impl Fn(&BasisKey) -> FockState) -> FockState {
    let mut out = FockState::zero();
    for (k, c) in first.terms() {
        out.add_scaled(&f(k), c);
    }
    out
}

/// `z^{−b}` mode of `z:α(pt,z)Γ^{(m)}(z):`, zero mode on the right.
fn pt_current_mode(m: i64, b: i64, key: &BasisKey) -> FockState {
    let e = i64::from(key.mono.energy());
    let mut out = FockState::zero();
    for n in (b - e)..=-1 {
        let g = vertex_on_basis(m, b - n, key);
        out.add_scaled(&apply_then(&g, |k| alpha_on_basis(n, Label::Pt, k)), &Q::one());
    }
    for n in 0..=e {
        let a = alpha_on_basis(n, Label::Pt, key);
        out.add_scaled(&apply_then(&a, |k| vertex_on_basis(m, b - n, k)), &Q::one());
    }
    out
}

/// `z^{−b}` mode of
/// `d_m(z) = m z² :ω Γ: + m D_zΓ − D_z[z:α(pt)Γ:] − m z² :∂_zα(mE) Γ:`
/// with `Γ = Γ^{(m)}(z) = Σ Γ_p z^{−p}`.
pub fn pt_field_on_basis(m: i64, b: i64, dz: DzConvention, key: &BasisKey) -> FockState {
    let e = i64::from(key.mono.energy());
    let mq = qi(m);
    let mut out = FockState::zero();
    // m z² :ω Γ:, mode b: Σ_{n≤−2} L_n Γ_{b−n} + Σ_{n≥−1} Γ_{b−n} L_n.
    for n in (b - e).min(-1)..=e {
        let t = if n <= -2 {
            apply_then(&vertex_on_basis(m, b - n, key), |k| virasoro_on_basis(n, k))
        } else {
            apply_then(&virasoro_on_basis(n, key), |k| vertex_on_basis(m, b - n, k))
        };
        out.add_scaled(&t, &mq);
    }
    // m D_z Γ − D_z[z:α(pt)Γ:].
    let (shift, factor) = match dz {
        DzConvention::Derivative => (b - 1, qi(1 - b)),
        DzConvention::Euler => (b, qi(-b)),
    };
    if !factor.is_zero() {
        out.add_scaled(&vertex_on_basis(m, shift, key), &(&mq * &factor));
        out.add_scaled(&pt_current_mode(m, shift, key), &-factor);
    }
    // − m z² :∂_zα(mE) Γ: = −m Σ_n (−n−1) m α_n(E) Γ_{b−n}; the factors commute.
    for n in (b - e)..=e {
        let c = qi(-n - 1) * &mq * &mq;
        if c.is_zero() {
            continue;
        }
        let g = vertex_on_basis(m, b - n, key);
        out.add_scaled(&apply_then(&g, |k| alpha_on_basis(n, Label::E, k)), &-c);
    }
    out
}

/// Primitive operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Op {
    /// `α_n(label)`.
    Alpha { n: i64, label: Label },
    /// `Γ^{(m)}_p`.
    Vertex { m: i64, p: i64 },
    /// `S^a_b(label)` for an odd label.
    Sigma { a: i64, b: i64, label: Label },
    /// `L_n`.
    Virasoro { n: i64 },
    /// Mode `z^{−b}` of `d_m(z)`.
    PtField { m: i64, b: i64, dz: DzConvention },
}

impl Op {
    pub fn is_odd(&self) -> bool {
        match self {
            Op::Alpha { label, .. } | Op::Sigma { label, .. } => label.is_odd(),
            Op::Vertex { .. } | Op::Virasoro { .. } | Op::PtField { .. } => false,
        }
    }

    pub fn on_basis(&self, key: &BasisKey) -> FockState {
        match *self {
            Op::Alpha { n, label } => alpha_on_basis(n, label, key),
            Op::Vertex { m, p } => vertex_on_basis(m, p, key),
            Op::Sigma { a, b, label } => sigma_on_basis(a, b, label, key),
            Op::Virasoro { n } => virasoro_on_basis(n, key),
            Op::PtField { m, b, dz } => pt_field_on_basis(m, b, dz, key),
        }
    }

    /// Largest energy increase.
    pub fn raise(&self) -> u32 {
        let r = match *self {
            Op::Alpha { n, .. } => -n,
            Op::Vertex { p, .. } => -p,
            Op::Sigma { b, .. } => -b,
            Op::Virasoro { n } => -n,
            Op::PtField { b, dz, .. } => match dz {
                DzConvention::Derivative => 1 - b,
                DzConvention::Euler => -b,
            },
        };
        r.max(0) as u32
    }
}

/// Finite linear combination of primitive operators of one parity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperatorExpr {
    pub terms: Vec<(String, Op)>,
    #[serde(skip)]
    coeffs: Vec<Q>,
}

impl OperatorExpr {
    pub fn single(c: Q, op: Op) -> Self {
        OperatorExpr { terms: vec![(fmt_q(&c), op)], coeffs: vec![c] }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Q, &Op)> {
        self.coeffs.iter().zip(self.terms.iter().map(|(_, o)| o))
    }

    pub fn is_odd(&self) -> bool {
        self.terms.first().is_some_and(|(_, o)| o.is_odd())
    }

    pub fn raise(&self) -> u32 {
        self.terms.iter().map(|(_, o)| o.raise()).max().unwrap_or(0)
    }
}

/// Conventions for the pt field at nonzero slope: `ω` is always the
/// Heisenberg conformal vector (`virasoro_on_basis`); `D_z` is chosen here.
/// Off by default.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtendedConventions {
    pub dz: DzConvention,
}

/// Truncated Fock model.
#[derive(Clone, Debug)]
pub struct Fock {
    pub truncation: u32,
    pub extended: Option<ExtendedConventions>,
}

impl Fock {
    pub fn new(truncation: u32) -> Self {
        Fock { truncation, extended: None }
    }

    fn check_mode(&self, n: i64) -> Result<()> {
        if n.unsigned_abs() > u64::from(self.truncation) {
            Err(Error::Truncation(n, self.truncation as usize))
        } else {
            Ok(())
        }
    }

    /// `α_n(γ)` on a state, linear in `γ`.
    pub fn alpha_apply(&self, n: i64, gamma: &CohClass, s: &FockState) -> Result<FockState> {
        self.check_mode(n)?;
        let mut out = FockState::zero();
        for (label, c) in gamma.terms() {
            for (k, x) in s.terms() {
                out.add_scaled(&alpha_on_basis(n, label, k), &(c * x));
            }
        }
        Ok(out)
    }

    /// `w^{0,n}_γ = (1/n) α_n([n]^*γ)` with `[n]^*E = E`, `[n]^*σ = nσ`,
    /// `[n]^*pt = n²pt`.
    pub fn w_small(&self, n: i64, label: Label) -> Result<OperatorExpr> {
        if n == 0 {
            return Err(Error::InvalidArgument("zero modes are not generators".into()));
        }
        self.check_mode(n)?;
        let pullback = match label {
            Label::E => qi(1),
            Label::SigmaPlus | Label::SigmaMinus => qi(n),
            Label::Pt => qi(n * n),
        };
        Ok(OperatorExpr::single(pullback / qi(n), Op::Alpha { n, label }))
    }

    /// Mode `z^{−p}` of `Y(e^{mE}, z)`.
    pub fn vertex_gamma(&self, m: i64, p: i64) -> OperatorExpr {
        OperatorExpr::single(Q::one(), Op::Vertex { m, p })
    }

    /// `w^{a,b}_γ`: the `z^{−b}` mode of the slope-`a` field,
    /// `k_a = Γ_{aE}/a` for `E`, `z:α(σ,z)Γ_{aE}(z):` for `σ±`; `w_small`
    /// at `a = 0`.
    pub fn w_general(&self, a: i64, b: i64, label: Label) -> Result<OperatorExpr> {
        if (a, b) == (0, 0) {
            return Err(Error::InvalidArgument("(a, b) = (0, 0) is not a generator".into()));
        }
        if a == 0 {
            return self.w_small(b, label);
        }
        match label {
            Label::E => Ok(OperatorExpr::single(Q::new(1.into(), a.into()), Op::Vertex { m: a, p: b })),
            Label::SigmaPlus | Label::SigmaMinus => Ok(OperatorExpr::single(Q::one(), Op::Sigma { a, b, label })),
            Label::Pt => match self.extended {
                Some(ext) => Ok(OperatorExpr::single(Q::one(), Op::PtField { m: a, b, dz: ext.dz })),
                None => Err(Error::ExtendedModeRequired(format!("label pt at slope {a}"))),
            },
        }
    }

    pub fn apply(&self, op: &OperatorExpr, s: &FockState) -> FockState {
        let mut out = FockState::zero();
        for (c, o) in op.iter() {
            for (k, x) in s.terms() {
                out.add_scaled(&o.on_basis(k), &(c * x));
            }
        }
        out
    }
}

type Image = Arc<FockState>;

/// Memoized operator application, shareable across threads.
#[derive(Default)]
pub struct Evaluator {
    cache: RwLock<HashMap<(Op, BasisKey), Image>>,
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn on_basis(&self, op: &Op, key: &BasisKey) -> Image {
        let k = (*op, key.clone());
        if let Some(v) = self.cache.read().unwrap().get(&k) {
            return v.clone();
        }
        let v = Arc::new(op.on_basis(key));
        self.cache.write().unwrap().insert(k, v.clone());
        v
    }

    pub fn apply(&self, op: &OperatorExpr, s: &FockState) -> FockState {
        let mut out = FockState::zero();
        for (c, o) in op.iter() {
            for (k, x) in s.terms() {
                out.add_scaled(&self.on_basis(o, k), &(c * x));
            }
        }
        out
    }

    /// `[X, Y} s = X(Y s) − (−1)^{|X||Y|} Y(X s)`.
    pub fn supercommutator(&self, x: &OperatorExpr, y: &OperatorExpr, s: &FockState) -> FockState {
        let xy = self.apply(x, &self.apply(y, s));
        let yx = self.apply(y, &self.apply(x, s));
        if x.is_odd() && y.is_odd() {
            xy.add(&yx)
        } else {
            xy.sub(&yx)
        }
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().unwrap().len()
    }
}

/// Incremental exact solver for `u·x + v·y = w` in two unknowns.
#[derive(Clone, Debug, Default)]
struct Solve2 {
    rows: Vec<[Q; 3]>,
    inconsistent: bool,
}

impl Solve2 {
    fn push(&mut self, mut r: [Q; 3]) {
        if self.inconsistent {
            return;
        }
        for p in &self.rows {
            let piv = if !p[0].is_zero() { 0 } else { 1 };
            if !r[piv].is_zero() {
                let f = &r[piv] / &p[piv];
                for i in 0..3 {
                    r[i] = &r[i] - &f * &p[i];
                }
            }
        }
        if r[0].is_zero() && r[1].is_zero() {
            if !r[2].is_zero() {
                self.inconsistent = true;
            }
            return;
        }
        // Keep rows reduced against each other.
        let piv = if !r[0].is_zero() { 0 } else { 1 };
        for p in &mut self.rows {
            if !p[piv].is_zero() {
                let f = &p[piv] / &r[piv];
                for i in 0..3 {
                    p[i] = &p[i] - &f * &r[i];
                }
            }
        }
        self.rows.push(r);
    }

    /// `(x, y)` with `None` for an undetermined unknown.
    fn solution(&self) -> Option<(Option<Q>, Option<Q>)> {
        if self.inconsistent {
            return None;
        }
        let mut x = None;
        let mut y = None;
        for r in &self.rows {
            match (r[0].is_zero(), r[1].is_zero()) {
                (false, true) => x = Some(&r[2] / &r[0]),
                (true, false) => y = Some(&r[2] / &r[1]),
                _ => {}
            }
        }
        Some((x, y))
    }
}

/// One generator `w^{a,b}_γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Gen {
    pub a: i64,
    pub b: i64,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketStatus {
    /// Matches with every rescale equal to 1.
    Exact,
    /// Matches after the recorded rescales.
    Rescaled,
    /// Left side has the predicted shape but the coefficient is not
    /// determined on this truncation.
    Undecided,
    Mismatch { witness: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketReport {
    pub lhs_params: (Gen, Gen),
    /// Target generator `w^{a+c,b+d}_{γ⋆η}` and the structure constant
    /// `−(ad−bc)·κ` where `γ⋆η = κ·label`.
    pub rhs_params: Option<(Gen, i64)>,
    /// `L = x·w_target + y·id` solved on the basis.
    #[serde(serialize_with = "ser_opt_q")]
    pub x: Option<Q>,
    #[serde(serialize_with = "ser_opt_q")]
    pub y: Option<Q>,
    pub status: BracketStatus,
    pub states_checked: usize,
    pub truncation: u32,
}

fn ser_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(q) => s.serialize_some(&fmt_q(q)),
        None => s.serialize_none(),
    }
}

/// Options for `bracket_verify`.
#[derive(Clone, Debug)]
pub struct BracketOptions {
    pub truncation: u32,
    pub charges: Vec<i64>,
    pub product: ProductConvention,
    /// Needed when pt appears at nonzero slope.
    pub extended: Option<ExtendedConventions>,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions { truncation: 6, charges: vec![0], product: ProductConvention::Dual, extended: None }
    }
}

/// Test states for an operator pair: every basis state with energy
/// `≤ N − deg`, `deg` being the total possible energy increase.
fn test_states(opts: &BracketOptions, deg: u32) -> Result<Vec<BasisKey>> {
    if deg > opts.truncation {
        return Err(Error::Truncation(i64::from(deg), opts.truncation as usize));
    }
    let e = opts.truncation - deg;
    Ok(opts.charges.iter().flat_map(|c| basis(e, *c)).collect())
}

/// Checks `[w^{a,b}_γ, w^{c,d}_η] = x·w^{a+c,b+d}_{γ⋆η} + y` on the test
/// basis and reports `x`, `y`. Whether `x` agrees with `−(ad−bc)κ` is
/// decided by `bracket_sweep`, which knows the rescales; here `Exact` means
/// it agrees on the nose.
pub fn bracket_verify(
    fock: &Fock,
    eval: &Evaluator,
    g1: Gen,
    g2: Gen,
    opts: &BracketOptions,
) -> Result<BracketReport> {
    let x1 = fock.w_general(g1.a, g1.b, g1.label)?;
    let x2 = fock.w_general(g2.a, g2.b, g2.label)?;
    let (sa, sb) = (g1.a + g2.a, g1.b + g2.b);
    let det = g1.a * g2.b - g1.b * g2.a;
    let product = star(g1.label, g2.label, opts.product);
    let target = match product {
        Some((kappa, label)) if (sa, sb) != (0, 0) => Some((Gen { a: sa, b: sb, label }, -det * kappa)),
        _ => None,
    };
    let target_op = match target {
        Some((t, _)) => Some(fock.w_general(t.a, t.b, t.label)?),
        None => None,
    };
    let deg = x1.raise() + x2.raise();
    let states = test_states(opts, deg)?;
    let central_possible = (sa, sb) == (0, 0);
    let mut solver = Solve2::default();
    let mut witness = None;
    for s in &states {
        let st = FockState::basis(s.clone());
        let l = eval.supercommutator(&x1, &x2, &st);
        let r = match &target_op {
            Some(t) => eval.apply(t, &st),
            None => FockState::zero(),
        };
        let mut keys: BTreeSet<&BasisKey> = l.terms.keys().collect();
        keys.extend(r.terms.keys());
        if central_possible {
            keys.insert(s);
        }
        for k in keys {
            let id = if central_possible && k == s { Q::one() } else { Q::zero() };
            solver.push([r.coeff(k), id, l.coeff(k)]);
            if solver.inconsistent && witness.is_none() {
                witness = Some(format!("state {s}, component {k}: lhs {}", fmt_q(&l.coeff(k))));
            }
        }
        if solver.inconsistent {
            break;
        }
    }
    let (x, y, status) = match solver.solution() {
        None => (None, None, BracketStatus::Mismatch { witness: witness.unwrap_or_default() }),
        Some((x, y)) => {
            let status = match (&target, &x) {
                (None, _) => BracketStatus::Exact,
                (Some((_, p)), Some(xv)) if *p == 0 && xv.is_zero() => BracketStatus::Exact,
                (Some((_, p)), Some(xv)) if *p == 0 => BracketStatus::Mismatch {
                    witness: format!("predicted no {} term, found coefficient {}", target.unwrap().0.label, fmt_q(xv)),
                },
                (Some((_, p)), Some(xv)) if xv.is_zero() => BracketStatus::Mismatch {
                    witness: format!("predicted coefficient {p}, found 0"),
                },
                (Some((_, p)), Some(xv)) if *xv == qi(*p) => BracketStatus::Exact,
                (Some(_), Some(_)) => BracketStatus::Rescaled,
                (Some((_, p)), None) if *p == 0 => BracketStatus::Exact,
                (Some(_), None) => BracketStatus::Undecided,
            };
            (x, y.or_else(|| central_possible.then(Q::zero)), status)
        }
    };
    Ok(BracketReport {
        lhs_params: (g1, g2),
        rhs_params: target,
        x,
        y,
        status,
        states_checked: states.len(),
        truncation: opts.truncation,
    })
}

/// Central scalars solved for one ordered label pair from
/// `μ₁μ₂·y = a·c_s + b·c_t`.
#[derive(Clone, Debug, Serialize)]
pub struct CentralSolution {
    pub labels: (Label, Label),
    #[serde(serialize_with = "ser_opt_q")]
    pub c_s: Option<Q>,
    #[serde(serialize_with = "ser_opt_q")]
    pub c_t: Option<Q>,
    pub consistent: bool,
    /// `⟨γ, η⟩`, for comparison.
    pub pairing: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RescaleFactor {
    pub slope: i64,
    pub label: Label,
    #[serde(serialize_with = "ser_opt_q")]
    pub mu: Option<Q>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub truncation: u32,
    pub charges: Vec<i64>,
    pub product: ProductConvention,
    pub brackets: usize,
    pub exact: usize,
    pub rescaled: usize,
    pub undecided: usize,
    pub mismatches: Vec<BracketReport>,
    /// `μ_{a,γ}` with `w ↦ μ w`; anchors `μ_{a,σ₊} = 1`, `μ_{0,σ₋} = 1`.
    pub rescale_factors: Vec<RescaleFactor>,
    pub rescale_consistent: bool,
    pub central: Vec<CentralSolution>,
    pub passes: bool,
    #[serde(skip)]
    pub reports: Vec<BracketReport>,
}

/// Every bracket among generators with `|a| ≤ a_max`, `|b| ≤ b_max` and the
/// given labels, evaluated in parallel; then rescales per (slope, label)
/// are propagated from the anchors and every structure constant is checked
/// against them, and central scalars are solved per label pair.
pub fn bracket_sweep(a_max: i64, b_max: i64, labels: &[Label], opts: &BracketOptions) -> Result<SweepReport> {
    let fock = Fock { truncation: opts.truncation, extended: opts.extended };
    let eval = Evaluator::new();
    let mut gens = Vec::new();
    for a in -a_max..=a_max {
        for b in -b_max..=b_max {
            if (a, b) == (0, 0) {
                continue;
            }
            for &label in labels {
                gens.push(Gen { a, b, label });
            }
        }
    }
    let pairs: Vec<(Gen, Gen)> = gens.iter().flat_map(|g| gens.iter().map(move |h| (*g, *h))).collect();
    let reports: Vec<BracketReport> = pairs
        .par_iter()
        .map(|(g, h)| bracket_verify(&fock, &eval, *g, *h, opts))
        .collect::<Result<_>>()?;

    // Rescale propagation: μ_T = μ₁μ₂·x / p for every bracket with a target.
    let mut mu: BTreeMap<(i64, Label), Q> = BTreeMap::new();
    for a in -a_max..=a_max {
        if labels.contains(&Label::SigmaPlus) {
            mu.insert((a, Label::SigmaPlus), Q::one());
        }
    }
    if labels.contains(&Label::SigmaMinus) {
        mu.insert((0, Label::SigmaMinus), Q::one());
    }
    let constraints: Vec<((i64, Label), (i64, Label), (i64, Label), Q)> = reports
        .iter()
        .filter_map(|r| {
            let (t, p) = r.rhs_params?;
            let x = r.x.clone()?;
            (p != 0 && !x.is_zero()).then(|| {
                let (g, h) = r.lhs_params;
                ((g.a, g.label), (h.a, h.label), (t.a, t.label), x / qi(p))
            })
        })
        .collect();
    loop {
        let mut changed = false;
        for (k1, k2, kt, ratio) in &constraints {
            let (m1, m2, mt) = (mu.get(k1).cloned(), mu.get(k2).cloned(), mu.get(kt).cloned());
            let learned = match (m1, m2, mt) {
                (Some(a), Some(b), None) => Some((*kt, a * b * ratio)),
                (Some(a), None, Some(t)) if k1 != k2 => Some((*k2, t / (a * ratio))),
                (None, Some(b), Some(t)) if k1 != k2 => Some((*k1, t / (b * ratio))),
                _ => None,
            };
            if let Some((k, v)) = learned {
                mu.insert(k, v);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut rescale_consistent = true;
    let mut statuses: Vec<BracketStatus> = reports.iter().map(|r| r.status.clone()).collect();
    for (r, st) in reports.iter().zip(statuses.iter_mut()) {
        let (Some((t, p)), Some(x)) = (r.rhs_params, r.x.clone()) else { continue };
        if p == 0 || x.is_zero() || matches!(st, BracketStatus::Mismatch { .. }) {
            continue;
        }
        let (g, h) = r.lhs_params;
        let vals = (mu.get(&(g.a, g.label)), mu.get(&(h.a, h.label)), mu.get(&(t.a, t.label)));
        if let (Some(m1), Some(m2), Some(mt)) = vals {
            if m1 * m2 * &x != mt * qi(p) {
                rescale_consistent = false;
                *st = BracketStatus::Mismatch {
                    witness: format!("no consistent rescale: x = {}, predicted {p}", fmt_q(&x)),
                };
            }
        } else {
            rescale_consistent = false;
        }
    }

    // Central scalars per ordered label pair.
    let mut central_eqs: BTreeMap<(Label, Label), Solve2> = BTreeMap::new();
    for r in &reports {
        let (g, h) = r.lhs_params;
        if (g.a + h.a, g.b + h.b) != (0, 0) {
            continue;
        }
        let Some(y) = r.y.clone() else { continue };
        let m1 = mu.get(&(g.a, g.label)).cloned().unwrap_or_else(Q::one);
        let m2 = mu.get(&(h.a, h.label)).cloned().unwrap_or_else(Q::one);
        central_eqs.entry((g.label, h.label)).or_default().push([qi(g.a), qi(g.b), m1 * m2 * y]);
    }
    let central: Vec<CentralSolution> = central_eqs
        .into_iter()
        .map(|((l1, l2), s)| {
            let sol = s.solution();
            CentralSolution {
                labels: (l1, l2),
                c_s: sol.as_ref().and_then(|x| x.0.clone()),
                c_t: sol.as_ref().and_then(|x| x.1.clone()),
                consistent: sol.is_some(),
                pairing: pairing(l1, l2),
            }
        })
        .collect();

    let mut out_reports = reports;
    for (r, st) in out_reports.iter_mut().zip(statuses) {
        r.status = match st {
            BracketStatus::Exact | BracketStatus::Rescaled => {
                let (g, h) = r.lhs_params;
                let all_one = |k: &(i64, Label)| mu.get(k).is_none_or(|v| v.is_one());
                let target_one = r.rhs_params.is_none_or(|(t, _)| all_one(&(t.a, t.label)));
                if all_one(&(g.a, g.label)) && all_one(&(h.a, h.label)) && target_one && st == BracketStatus::Exact {
                    BracketStatus::Exact
                } else {
                    BracketStatus::Rescaled
                }
            }
            other => other,
        };
    }
    let mismatches: Vec<BracketReport> = out_reports
        .iter()
        .filter(|r| matches!(r.status, BracketStatus::Mismatch { .. }))
        .cloned()
        .collect();
    let count = |f: fn(&BracketStatus) -> bool| out_reports.iter().filter(|r| f(&r.status)).count();
    let exact = count(|s| matches!(s, BracketStatus::Exact));
    let rescaled = count(|s| matches!(s, BracketStatus::Rescaled));
    let undecided = count(|s| matches!(s, BracketStatus::Undecided));
    let mut rescale_factors = Vec::new();
    for a in -2 * a_max..=2 * a_max {
        for &label in labels {
            if (a.abs() <= a_max) || mu.contains_key(&(a, label)) {
                rescale_factors.push(RescaleFactor { slope: a, label, mu: mu.get(&(a, label)).cloned() });
            }
        }
    }
    let passes = mismatches.is_empty()
        && undecided == 0
        && rescale_consistent
        && rescale_factors.iter().all(|r| r.mu.as_ref().is_none_or(|m| !m.is_zero()))
        && central.iter().all(|c| c.consistent);
    Ok(SweepReport {
        truncation: opts.truncation,
        charges: opts.charges.clone(),
        product: opts.product,
        brackets: out_reports.len(),
        exact,
        rescaled,
        undecided,
        mismatches,
        rescale_factors,
        rescale_consistent,
        central,
        passes,
        reports: out_reports,
    })
}

/// Weight `Σ k_i` of a basis state.
pub fn weight(key: &BasisKey) -> u32 {
    key.mono.energy()
}

/// `ρ(f)`: on weight `n`, `(c, ∏α_{−k_i}(γ_i)) ↦ (−n − c, ∏(−1)^{k_i+1} α_{−k_i}(γ_i))`.
/// On charge 0 this is `e^{−nE}∏(−1)^{k_i+1}α_{−k_i}(γ_i)|⟩`; reflecting the
/// charge makes it an involution.
pub fn monodromy_f(s: &FockState, n: u32) -> Result<FockState> {
    let mut out = FockState::zero();
    for (k, c) in s.terms() {
        let w = weight(k);
        if w != n {
            return Err(Error::MixedWeight(n, w));
        }
        let sign: i64 = k.mono.0.iter().map(|m| if m.k % 2 == 0 { -1 } else { 1 }).product();
        let key = BasisKey { charge: -i64::from(n) - k.charge, mono: k.mono.clone() };
        out.add_term(key, c * qi(sign));
    }
    Ok(out)
}

/// `ρ(s)`: `∏α_{−k_i}(γ_i) e^{cE}|⟩ ↦ ∏ w^{1,−k_i}_{γ_i} e^{cE}|⟩`, the
/// rightmost generator applied first.
pub fn monodromy_s(fock: &Fock, s: &FockState) -> Result<FockState> {
    let mut out = FockState::zero();
    for (k, c) in s.terms() {
        let mut st = FockState::vacuum(k.charge);
        for m in k.mono.0.iter().rev() {
            let w = fock.w_general(1, -i64::from(m.k), m.label)?;
            st = fock.apply(&w, &st);
        }
        out.add_scaled(&st, c);
    }
    Ok(out)
}

/// `true` when every coefficient is an integer; used in reports.
pub fn integral(s: &FockState) -> bool {
    s.terms().all(|(_, c)| c.is_integer())
}

/// Largest absolute coefficient, for summaries.
pub fn max_abs_coeff(s: &FockState) -> Q {
    s.terms().map(|(_, c)| c.abs()).max().unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn st(c: i64, modes: &[(u32, Label)]) -> FockState {
        FockState::from_modes(c, modes)
    }

    fn apply_all(f: &Fock, op: &OperatorExpr, s: &FockState) -> FockState {
        f.apply(op, s)
    }

    #[test]
    fn basis_counts() {
        // Coefficients of ∏(1+q^k)²/(1−q^k)².
        let per_energy = [1usize, 4, 12, 32, 76, 168, 352];
        let mut total = 0;
        for (e, want) in per_energy.iter().enumerate() {
            total += want;
            assert_eq!(basis(e as u32, 0).len(), total, "energy {e}");
        }
        let b = basis(3, 0);
        assert!(b.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn alpha_examples() {
        let f = Fock::new(8);
        let e = CohClass::basis(Label::E);
        let s = st(0, &[(1, Label::Pt)]);
        assert_eq!(f.alpha_apply(1, &e, &s).unwrap(), FockState::vacuum(0));
        assert!(f.alpha_apply(1, &e, &FockState::vacuum(0)).unwrap().is_zero());
        assert!(f.alpha_apply(9, &e, &FockState::vacuum(0)).is_err());
        // α_0(pt) reads the charge.
        let pt = CohClass::basis(Label::Pt);
        assert_eq!(f.alpha_apply(0, &pt, &FockState::vacuum(3)).unwrap(), FockState::vacuum(3).scale(&qi(3)));
    }

    #[test]
    fn odd_modes_square_to_zero_and_anticommute() {
        assert!(st(0, &[(2, Label::SigmaPlus), (2, Label::SigmaPlus)]).is_zero());
        let ab = st(0, &[(2, Label::SigmaPlus), (1, Label::SigmaMinus)]);
        let ba = st(0, &[(1, Label::SigmaMinus), (2, Label::SigmaPlus)]);
        assert_eq!(ab, ba.scale(&qi(-1)));
        let ee = st(0, &[(1, Label::E), (2, Label::Pt)]);
        assert_eq!(ee, st(0, &[(2, Label::Pt), (1, Label::E)]));
    }

    /// Direct oracle for `[α_m(γ), α_k(η)}` on a state: contract by hand.
    #[test]
    fn heisenberg_relations_on_basis() {
        let f = Fock::new(6);
        let states = basis(4, 0);
        for m in -3i64..=3 {
            for k in -3i64..=3 {
                for g in Label::ALL {
                    for h in Label::ALL {
                        let x = OperatorExpr::single(Q::one(), Op::Alpha { n: m, label: g });
                        let y = OperatorExpr::single(Q::one(), Op::Alpha { n: k, label: h });
                        let want = if m + k == 0 { m * pairing(g, h) } else { 0 };
                        let eval = Evaluator::new();
                        for s in states.iter().filter(|s| s.mono.energy() + 6 <= 10) {
                            let v = FockState::basis(s.clone());
                            let l = eval.supercommutator(&x, &y, &v);
                            assert_eq!(l, v.scale(&qi(want)), "m={m} k={k} {g} {h} on {s}");
                        }
                        let _ = &f;
                    }
                }
            }
        }
    }

    #[test]
    fn heisenberg_pair_is_n_identity() {
        let f = Fock::new(8);
        let eval = Evaluator::new();
        for n in 1..=4 {
            let x = OperatorExpr::single(Q::one(), Op::Alpha { n, label: Label::E });
            let y = OperatorExpr::single(Q::one(), Op::Alpha { n: -n, label: Label::Pt });
            for s in basis(4, 0) {
                let v = FockState::basis(s);
                assert_eq!(eval.supercommutator(&x, &y, &v), v.scale(&qi(n)));
            }
        }
        let _ = f;
    }

    #[test]
    fn w_small_normalizations() {
        let f = Fock::new(8);
        for n in [-3i64, -1, 1, 2, 5] {
            let s = st(0, &[(n.unsigned_abs() as u32, Label::Pt), (n.unsigned_abs() as u32, Label::E)]);
            let we = f.w_small(n, Label::E).unwrap();
            let ae = OperatorExpr::single(q(1, n), Op::Alpha { n, label: Label::E });
            assert_eq!(apply_all(&f, &we, &s), apply_all(&f, &ae, &s));
            let wp = f.w_small(n, Label::Pt).unwrap();
            let ap = OperatorExpr::single(qi(n), Op::Alpha { n, label: Label::Pt });
            assert_eq!(apply_all(&f, &wp, &s), apply_all(&f, &ap, &s));
        }
        assert!(f.w_small(0, Label::E).is_err());
    }

    /// `[w^{0,n}_γ, w^{0,−n}_{γ'}]` is `−n⟨γ,γ'⟩` for the even pairs and
    /// `n⟨γ,γ'⟩` for the odd ones; the stated normalization asks for `n⟨γ,γ'⟩`
    /// throughout.
    #[test]
    fn w_small_central_pairing() {
        let f = Fock::new(8);
        let eval = Evaluator::new();
        for n in 1..=3i64 {
            for g in Label::ALL {
                for h in Label::ALL {
                    let x = f.w_small(n, g).unwrap();
                    let y = f.w_small(-n, h).unwrap();
                    let want = if g.is_odd() { n * pairing(g, h) } else { -n * pairing(g, h) };
                    for s in basis(3, 0) {
                        let v = FockState::basis(s);
                        assert_eq!(eval.supercommutator(&x, &y, &v), v.scale(&qi(want)), "{g} {h} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn vertex_examples() {
        let f = Fock::new(8);
        // m = 0 is the identity field.
        for s in basis(3, 1) {
            let v = FockState::basis(s);
            assert_eq!(f.apply(&f.vertex_gamma(0, 0), &v), v);
            assert!(f.apply(&f.vertex_gamma(0, 2), &v).is_zero());
        }
        // z⁰ mode of Y(e^E, z) on the vacuum.
        assert_eq!(f.apply(&f.vertex_gamma(1, 0), &FockState::vacuum(0)), FockState::vacuum(1));
        // z¹ mode: e^E α_{−1}(E).
        assert_eq!(f.apply(&f.vertex_gamma(1, -1), &FockState::vacuum(0)), st(1, &[(1, Label::E)]));
        // z² mode with m = 2: e^{2E}(2 α_{−2}/2 + (2α_{−1})²/2) = α_{−2} + 2α_{−1}².
        let want = st(2, &[(2, Label::E)]).add(&st(2, &[(1, Label::E), (1, Label::E)]).scale(&qi(2)));
        assert_eq!(f.apply(&f.vertex_gamma(2, -2), &FockState::vacuum(0)), want);
        // Annihilation contracts pt-modes: Γ^{(1)}_1 α_{−1}(pt)|⟩ = −e^E|⟩.
        assert_eq!(
            f.apply(&f.vertex_gamma(1, 1), &st(0, &[(1, Label::Pt)])),
            FockState::vacuum(1).scale(&qi(-1))
        );
    }

    #[test]
    fn vertex_heisenberg_commutator() {
        let eval = Evaluator::new();
        for m in -2i64..=2 {
            for k in -3i64..=3 {
                for p in -2i64..=2 {
                    for g in Label::ALL {
                        let x = OperatorExpr::single(Q::one(), Op::Alpha { n: k, label: g });
                        let y = OperatorExpr::single(Q::one(), Op::Vertex { m, p });
                        let rhs = OperatorExpr::single(qi(m * pairing(g, Label::E)), Op::Vertex { m, p: p + k });
                        for s in basis(3, 0) {
                            let v = FockState::basis(s.clone());
                            let l = eval.supercommutator(&x, &y, &v);
                            assert_eq!(l, eval.apply(&rhs, &v), "m={m} k={k} p={p} {g} on {s}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn w_general_reductions() {
        let f = Fock::new(6);
        for b in [-2i64, -1, 1, 2] {
            for l in Label::ALL {
                let g = f.w_general(0, b, l).unwrap();
                let s = f.w_small(b, l).unwrap();
                for k in basis(3, 0) {
                    let v = FockState::basis(k);
                    assert_eq!(f.apply(&g, &v), f.apply(&s, &v));
                }
            }
        }
        assert!(matches!(f.w_general(1, 0, Label::Pt), Err(Error::ExtendedModeRequired(_))));
        assert!(f.w_general(0, 0, Label::E).is_err());
        // w^{1,0}_E is the z⁰ mode of Γ_E.
        let w = f.w_general(1, 0, Label::E).unwrap();
        assert_eq!(f.apply(&w, &FockState::vacuum(0)), FockState::vacuum(1));
    }

    #[test]
    fn bracket_examples() {
        let opts = BracketOptions { truncation: 5, ..Default::default() };
        let f = Fock::new(5);
        let eval = Evaluator::new();
        let g = |a, b, label| Gen { a, b, label };
        // Central line: [w^{0,1}_E, w^{0,−1}_pt] acts by a scalar.
        let r = bracket_verify(&f, &eval, g(0, 1, Label::E), g(0, -1, Label::Pt), &opts).unwrap();
        assert_eq!(r.y, Some(qi(-1)));
        // Odd square vanishes.
        let r = bracket_verify(&f, &eval, g(0, 1, Label::SigmaPlus), g(0, 1, Label::SigmaPlus), &opts).unwrap();
        assert_eq!(r.status, BracketStatus::Exact);
        // [w^{1,0}_E, w^{0,1}_E] = 0 = E⋆E term under the dual product.
        let r = bracket_verify(&f, &eval, g(1, 0, Label::E), g(0, 1, Label::E), &opts).unwrap();
        assert_eq!(r.status, BracketStatus::Exact);
        // Under the cup product E⋆E = E is predicted and absent.
        let cup = BracketOptions { product: ProductConvention::Cup, ..opts.clone() };
        let r = bracket_verify(&f, &eval, g(1, 0, Label::E), g(0, 1, Label::E), &cup).unwrap();
        assert!(matches!(r.status, BracketStatus::Mismatch { .. }));
        // σ₊ at slope 1 with σ₋ at slope 0 lands on w^{1,b+d}_E with −(ad−bc).
        let r = bracket_verify(&f, &eval, g(1, 1, Label::SigmaPlus), g(0, -2, Label::SigmaMinus), &opts).unwrap();
        assert_eq!(r.rhs_params, Some((g(1, -1, Label::E), 2)));
        assert_eq!(r.x, Some(qi(2)));
        assert_eq!(r.status, BracketStatus::Exact);
        // Opposite slopes land on α(E) with the opposite sign.
        let r = bracket_verify(&f, &eval, g(1, 1, Label::SigmaPlus), g(-1, 1, Label::SigmaMinus), &opts).unwrap();
        assert_eq!(r.rhs_params, Some((g(0, 2, Label::E), -2)));
        assert_eq!(r.x, Some(qi(2)));
    }

    #[test]
    fn small_sweep_finds_single_rescale() {
        let opts = BracketOptions { truncation: 4, ..Default::default() };
        let rep = bracket_sweep(1, 1, &Label::MANDATORY, &opts).unwrap();
        assert!(rep.passes, "{:?}", rep.mismatches.first());
        for r in &rep.rescale_factors {
            let want = if (r.slope, r.label) == (0, Label::E) { qi(-1) } else { qi(1) };
            if let Some(m) = &r.mu {
                assert_eq!(*m, want, "slope {} {}", r.slope, r.label);
            }
        }
        let sp = rep.central.iter().find(|c| c.labels == (Label::SigmaPlus, Label::SigmaMinus)).unwrap();
        assert_eq!(sp.c_s, Some(qi(0)));
        assert_eq!(sp.c_t, Some(qi(1)));
    }

    #[test]
    fn monodromy_f_examples() {
        let s = st(0, &[(1, Label::Pt), (1, Label::Pt), (1, Label::Pt)]);
        assert_eq!(monodromy_f(&s, 3).unwrap(), st(-3, &[(1, Label::Pt), (1, Label::Pt), (1, Label::Pt)]));
        let s = st(0, &[(2, Label::E)]);
        assert_eq!(monodromy_f(&s, 2).unwrap(), st(-2, &[(2, Label::E)]).scale(&qi(-1)));
        for k in basis(3, 0).into_iter().filter(|k| weight(k) == 3) {
            let v = FockState::basis(k);
            assert_eq!(monodromy_f(&monodromy_f(&v, 3).unwrap(), 3).unwrap(), v);
        }
        let mixed = st(0, &[(1, Label::E)]).add(&st(0, &[(2, Label::E)]));
        assert!(matches!(monodromy_f(&mixed, 1), Err(Error::MixedWeight(1, 2))));
    }

    /// `h_k` in the power sums `p_j = α_{−j}(E)` via `k h_k = Σ_j p_j h_{k−j}`,
    /// as states on charge `c`.
    fn h_state(k: u32, charge: i64) -> FockState {
        let mut h = vec![FockState::vacuum(charge)];
        for n in 1..=k {
            let mut acc = FockState::zero();
            for j in 1..=n {
                let prev = &h[(n - j) as usize];
                for (key, c) in prev.terms() {
                    let (mono, _) = key.mono.insert(Mode { k: j, label: Label::E }).unwrap();
                    acc.add_term(BasisKey { charge, mono }, c.clone());
                }
            }
            h.push(acc.scale(&q(1, i64::from(n))));
        }
        h.pop().unwrap()
    }

    #[test]
    fn monodromy_s_on_e_states() {
        let f = Fock::new(6);
        assert_eq!(monodromy_s(&f, &FockState::vacuum(0)).unwrap(), FockState::vacuum(0));
        let s = st(0, &[(1, Label::E)]);
        assert_eq!(monodromy_s(&f, &s).unwrap(), f.apply(&f.vertex_gamma(1, -1), &FockState::vacuum(0)));
        // α_{−2}(E)α_{−1}(E)|⟩ ↦ e^{2E} h_2 h_1.
        let s = st(0, &[(2, Label::E), (1, Label::E)]);
        let got = monodromy_s(&f, &s).unwrap();
        let h2 = h_state(2, 2);
        let mut want = FockState::zero();
        for (k, c) in h2.terms() {
            let (mono, _) = k.mono.insert(Mode { k: 1, label: Label::E }).unwrap();
            want.add_term(BasisKey { charge: 2, mono }, c.clone());
        }
        assert_eq!(got, want);
        assert!(matches!(monodromy_s(&f, &st(0, &[(1, Label::Pt)])), Err(Error::ExtendedModeRequired(_))));
    }

    #[test]
    fn sl2_labels() {
        let sp = CohClass::basis(Label::SigmaPlus);
        let sm = CohClass::basis(Label::SigmaMinus);
        let s = [[0, -1], [1, 0]];
        assert_eq!(sl2_label_action(s, &sp).unwrap(), sm);
        assert_eq!(sl2_label_action(s, &sm).unwrap(), CohClass { coeffs: [qi(0), qi(-1), qi(0), qi(0)] });
        assert_eq!(sl2_label_action([[1, 0], [0, 1]], &sp).unwrap(), sp);
        assert!(sl2_label_action([[2, 0], [0, 1]], &sp).is_err());
        for g in [[[1, 1], [0, 1]], [[2, 1], [1, 1]], [[0, -1], [1, 0]]] {
            let a = sl2_label_action(g, &sp).unwrap();
            let b = sl2_label_action(g, &sm).unwrap();
            assert_eq!(a.pair(&b), qi(1));
            let e = CohClass::basis(Label::E);
            assert_eq!(sl2_label_action(g, &e).unwrap(), e);
        }
    }

    #[test]
    fn star_tables() {
        use Label::*;
        assert_eq!(star(SigmaPlus, SigmaMinus, ProductConvention::Cup), Some((1, Pt)));
        assert_eq!(star(SigmaMinus, SigmaPlus, ProductConvention::Cup), Some((-1, Pt)));
        assert_eq!(star(Pt, SigmaPlus, ProductConvention::Cup), None);
        assert_eq!(star(E, Pt, ProductConvention::Cup), Some((1, Pt)));
        assert_eq!(star(SigmaPlus, SigmaMinus, ProductConvention::Dual), Some((1, E)));
        assert_eq!(star(E, E, ProductConvention::Dual), None);
        assert_eq!(star(SigmaPlus, SigmaPlus, ProductConvention::Dual), None);
    }

    proptest::proptest! {
        /// Creation operators supercommute: α_{−i}(g)α_{−j}(h) = ±α_{−j}(h)α_{−i}(g).
        #[test]
        fn creation_supercommutes(i in 1u32..4, j in 1u32..4, gi in 0usize..4, hi in 0usize..4, base in 0usize..17) {
            let (g, h) = (Label::ALL[gi], Label::ALL[hi]);
            let b = FockState::basis(basis(2, 0)[base].clone());
            let eval = Evaluator::new();
            let x = OperatorExpr::single(Q::one(), Op::Alpha { n: -i64::from(i), label: g });
            let y = OperatorExpr::single(Q::one(), Op::Alpha { n: -i64::from(j), label: h });
            proptest::prop_assert!(eval.supercommutator(&x, &y, &b).is_zero());
        }
    }
}

#[cfg(test)]
mod extended_tests {
    use super::*;

    fn one(op: Op) -> OperatorExpr {
        OperatorExpr::single(Q::one(), op)
    }

    #[test]
    fn l0_is_energy() {
        for k in basis(4, 1) {
            let e = qi(i64::from(k.mono.energy()));
            assert_eq!(FockState::basis(k.clone()).scale(&e), virasoro_on_basis(0, &k), "{k}");
        }
    }

    #[test]
    fn virasoro_heisenberg_relation() {
        // [L_m, α_n(γ)] = −n α_{m+n}(γ)
        let eval = Evaluator::new();
        for m in -2i64..=2 {
            for n in -2i64..=2 {
                for g in Label::ALL {
                    let l = one(Op::Virasoro { n: m });
                    let a = one(Op::Alpha { n, label: g });
                    let rhs = OperatorExpr::single(qi(-n), Op::Alpha { n: m + n, label: g });
                    for k in basis(3, 0) {
                        let v = FockState::basis(k.clone());
                        assert_eq!(eval.supercommutator(&l, &a, &v), eval.apply(&rhs, &v), "m={m} n={n} {g} on {k}");
                    }
                }
            }
        }
    }

    fn alpha_e_ratio(dz: DzConvention, m: i64, k: i64, b: i64) -> Option<Q> {
        let eval = Evaluator::new();
        let x = one(Op::Alpha { n: k, label: Label::E });
        let y = one(Op::PtField { m, b, dz });
        let g = one(Op::Vertex { m, p: b + k });
        let mut ratio: Option<Q> = None;
        for s in basis(3, 0) {
            let v = FockState::basis(s);
            let l = eval.supercommutator(&x, &y, &v);
            let r = eval.apply(&g, &v);
            let Some((key, c)) = r.terms().next() else {
                if !l.is_zero() {
                    return None;
                }
                continue;
            };
            let t = l.coeff(key) / c;
            if l != r.scale(&t) || ratio.as_ref().is_some_and(|o| *o != t) {
                return None;
            }
            ratio = Some(t);
        }
        ratio
    }

    #[test]
    fn euler_pt_field_commutes_with_e_modes_like_the_bracket() {
        // [α_k(E), d_b] = −k² Γ_{b+k}, i.e. [w^{0,k}_E, w^{m,b}_pt] = −km w^{m,b+k}_E:
        // the bracket up to the same slope-0 E sign found by the sweep.
        for m in [-1i64, 1, 2] {
            for k in [-2i64, -1, 1, 2] {
                for b in -1i64..=1 {
                    assert_eq!(alpha_e_ratio(DzConvention::Euler, m, k, b), Some(qi(-k * k)), "m={m} k={k} b={b}");
                }
            }
        }
        // With D_z = ∂_z the ratio depends on b.
        assert_ne!(alpha_e_ratio(DzConvention::Derivative, 1, 1, 0), alpha_e_ratio(DzConvention::Derivative, 1, 1, 1));
    }

    #[test]
    fn extended_sweep_fails_only_on_pt_pt() {
        let opts = BracketOptions {
            truncation: 4,
            extended: Some(ExtendedConventions { dz: DzConvention::Euler }),
            ..Default::default()
        };
        let rep = bracket_sweep(1, 1, &Label::ALL, &opts).unwrap();
        assert!(rep.rescale_consistent);
        assert!(!rep.mismatches.is_empty());
        assert!(rep.mismatches.iter().all(|m| (m.lhs_params.0.label, m.lhs_params.1.label) == (Label::Pt, Label::Pt)));
        for r in &rep.rescale_factors {
            let want = if (r.slope, r.label) == (0, Label::E) { qi(-1) } else { qi(1) };
            assert_eq!(r.mu, Some(want), "slope {} {}", r.slope, r.label);
        }
        for c in &rep.central {
            if c.consistent {
                if let Some(t) = &c.c_t {
                    assert_eq!(*t, qi(c.pairing), "{:?}", c.labels);
                }
            }
        }
    }

    #[test]
    fn monodromy_s_with_pt_needs_extended_mode() {
        let s = FockState::from_modes(0, &[(1, Label::Pt)]);
        assert!(matches!(monodromy_s(&Fock::new(4), &s), Err(Error::ExtendedModeRequired(_))));
        let f = Fock { truncation: 4, extended: Some(ExtendedConventions { dz: DzConvention::Euler }) };
        let out = monodromy_s(&f, &s).unwrap();
        assert!(!out.is_zero());
        assert!(out.terms().all(|(k, _)| k.charge == 1));
    }
}
