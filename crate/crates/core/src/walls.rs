//! v-walls for Hilbert schemes of points on the surfaces of the Deligne
//! series, wall equations in the `(b, c, d)` chart, the Bayer–Macrì class and
//! the chamber structure on the level-1 line of `N¹(X^[n]/Aⁿ)_{>0}`.
//!
//! Chart: `H = P + bE`, `B = cP + dE` on `II_{1,1}` with basis `(E, P)`.
//! Central charge `Z(r, C, s) = r(B² − H²)/2 − C·B + s + i(C·H − r H·B)`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{fmt_q, gcd_i64, q_sign, qi, Q};
use crate::coh_lattice::{BilinearLattice, MukaiVector, SurfaceLattice};
use crate::root_system::{height, CartanType, EllipticRoot, EllipticSystem};
use crate::{Error, Result};

/// Polynomial in the chart variables `(b, c, d)` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly3 {
    terms: BTreeMap<[u32; 3], Q>,
}

impl Poly3 {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Adds `coef · b^e0 c^e1 d^e2`.
    pub fn add_term(&mut self, exps: [u32; 3], coef: Q) {
        let slot = self.terms.entry(exps).or_insert_with(Q::zero);
        *slot += coef;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn from_terms(terms: &[([u32; 3], Q)]) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(*e, c.clone());
        }
        p
    }

    pub fn coeff(&self, exps: [u32; 3]) -> Q {
        self.terms.get(&exps).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, -c.clone());
        }
        p
    }

    pub fn eval(&self, b: &Q, c: &Q, d: &Q) -> Q {
        let pw = |x: &Q, e: u32| (0..e).fold(Q::one(), |acc, _| acc * x);
        self.terms
            .iter()
            .map(|(e, k)| k * pw(b, e[0]) * pw(c, e[1]) * pw(d, e[2]))
            .sum()
    }

    /// Writes the polynomial as `a·b + β` in the variable `b`, returning
    /// `(a, β)` evaluated at fixed `(c, d)`. `None` if it is not affine in `b`.
    pub fn affine_in_b(&self, c: &Q, d: &Q) -> Option<(Q, Q)> {
        let mut lin = Q::zero();
        let mut cst = Q::zero();
        let pw = |x: &Q, e: u32| (0..e).fold(Q::one(), |acc, _| acc * x);
        for (e, k) in &self.terms {
            let v = k * pw(c, e[1]) * pw(d, e[2]);
            match e[0] {
                0 => cst += v,
                1 => lin += v,
                _ => return None,
            }
        }
        Some((lin, cst))
    }
}

impl fmt::Display for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, k) in self.terms.iter().rev() {
            let mut vars = String::new();
            for (name, p) in ["b", "c", "d"].iter().zip(e) {
                match p {
                    0 => {}
                    1 => vars.push_str(name),
                    _ => {
                        let _ = write!(vars, "{name}^{p}");
                    }
                }
            }
            let neg = k.is_negative();
            let mag = k.abs();
            let body = match (vars.is_empty(), mag.is_one()) {
                (true, _) => fmt_q(&mag),
                (false, true) => vars,
                (false, false) => format!("{}{vars}", fmt_q(&mag)),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for Poly3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `n` for `v = (1, 0, −n)` on `II_{1,1}`, `r` and `s` for `w = (0, rE, s)`.
fn a_minus1_shapes(v: &MukaiVector, w: &MukaiVector) -> Result<(i64, i64, i64)> {
    let n = v
        .is_hilbert()
        .filter(|_| v.c1.len() == 2)
        .ok_or_else(|| Error::Unsupported("v must be normalized to (1, 0, -n) on II11".into()))?;
    let s = crate::arith::q_to_i64(&w.ch2);
    match (w.rank, w.c1.as_slice(), s) {
        (0, [r, 0], Some(s)) => Ok((n, *r, s)),
        _ => Err(Error::Unsupported("w must have the shape (0, rE, s) with s integral".into())),
    }
}

/// The closed-form wall equation `2cdr − br − nr − (sd + bcs − rbc²)`.
///
/// `(r, s) = (1, 0)` is excluded from the wall set and rejected.
pub fn phase_equal_locus(v: &MukaiVector, w: &MukaiVector) -> Result<Poly3> {
    let (n, r, s) = a_minus1_shapes(v, w)?;
    if (r, s) == (1, 0) {
        return Err(Error::InvalidArgument("(r, s) = (1, 0) is not a wall class".into()));
    }
    Ok(Poly3::from_terms(&[
        ([0, 1, 1], qi(2 * r)),
        ([1, 0, 0], qi(-r)),
        ([0, 0, 0], qi(-n * r)),
        ([0, 0, 1], qi(-s)),
        ([1, 1, 0], qi(-s)),
        ([1, 2, 0], qi(r)),
    ]))
}

/// `Re Z_v · Im Z_w − Im Z_v · Re Z_w` expanded in the chart:
/// `−r(bc² + b + n) + s(d + bc)`. Vanishes exactly where the two central
/// charges are real-proportional.
pub fn alignment_locus(v: &MukaiVector, w: &MukaiVector) -> Result<Poly3> {
    let (n, r, s) = a_minus1_shapes(v, w)?;
    Ok(Poly3::from_terms(&[
        ([1, 2, 0], qi(-r)),
        ([1, 0, 0], qi(-r)),
        ([0, 0, 0], qi(-n * r)),
        ([0, 0, 1], qi(s)),
        ([1, 1, 0], qi(s)),
    ]))
}

/// `(Re Z, Im Z)` of `v` for divisors `h`, `b` on `ns`.
pub fn central_charge(v: &MukaiVector, h: &[Q], b: &[Q], ns: &BilinearLattice) -> Result<(Q, Q)> {
    let c: Vec<Q> = v.c1.iter().map(|x| qi(*x)).collect();
    let r = qi(v.rank);
    let half = Q::new(1.into(), 2.into());
    let re = &r * (ns.dot_q(b, b)? - ns.dot_q(h, h)?) * half - ns.dot_q(&c, b)? + &v.ch2;
    let im = ns.dot_q(&c, h)? - r * ns.dot_q(h, b)?;
    Ok((re, im))
}

/// Sign of `Im(Z_v · conj Z_w)`: which of the two phases is larger.
pub fn phase_order(v: &MukaiVector, w: &MukaiVector, h: &[Q], b: &[Q], ns: &BilinearLattice) -> Result<i32> {
    let (vr, vi) = central_charge(v, h, b, ns)?;
    let (wr, wi) = central_charge(w, h, b, ns)?;
    Ok(q_sign(&(vi * wr - vr * wi)))
}

/// `H = P + bE`, `B = cP + dE` as coordinate vectors on `(E, P)`.
pub fn chart_divisors(b: &Q, c: &Q, d: &Q) -> (Vec<Q>, Vec<Q>) {
    (vec![b.clone(), Q::one()], vec![d.clone(), c.clone()])
}

/// Numerical class `(r_σ, s_σ, c_σ)` of the Bayer–Macrì line bundle for
/// `v = (1, 0, −n)`: `r_σ = B·H`, `s_σ = −n B·H`,
/// `c_σ = −(B·H)B + (−n + (B² − H²)/2)H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BmClass {
    #[serde(with = "crate::arith::q_string")]
    pub r: Q,
    #[serde(with = "crate::arith::q_string")]
    pub s: Q,
    #[serde(with = "crate::arith::q_vec_string")]
    pub c: Vec<Q>,
}

pub fn bayer_macri_class(h: &[Q], b: &[Q], n: i64, ns: &BilinearLattice) -> Result<BmClass> {
    let bh = ns.dot_q(b, h)?;
    let half = Q::new(1.into(), 2.into());
    let k = qi(-n) + (ns.dot_q(b, b)? - ns.dot_q(h, h)?) * half;
    let c = b.iter().zip(h).map(|(bi, hi)| -(&bh * bi) + &k * hi).collect();
    Ok(BmClass { s: qi(-n) * &bh, r: bh, c })
}

/// Which `(r, s)` / `(n, m)` pairs are enumerated. Walls are invariant
/// under `r ↦ r + s`, so `Fundamental` (`0 ≤ r < s`) lists one wall per
/// translation class; `Box` lists every primitive class with `|r| ≤ r_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WallWindow {
    Fundamental,
    Box { r_max: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallSpec {
    pub root: EllipticRoot,
    pub kclass: MukaiVector,
    /// The closed-form wall equation (`A₋₁` only).
    pub locus_poly: Option<Poly3>,
    /// Where the central charges actually align (`A₋₁` only).
    pub alignment_poly: Option<Poly3>,
    /// Direction of `C^⊥` in `(D·C_E, D·C_pt)` coordinates; absent for
    /// walls from purely finite roots.
    pub n1_ray: Option<(i64, i64)>,
    #[serde(serialize_with = "ser_opt_q")]
    pub level1_pos: Option<Q>,
}

fn ser_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(q) => s.serialize_some(&fmt_q(q)),
        None => s.serialize_none(),
    }
}

fn check_wall_type(t: CartanType) -> Result<()> {
    if t.is_wild() {
        return Err(Error::WildType(t.name().into()));
    }
    match t {
        CartanType::AMinus1 | CartanType::D4 | CartanType::E6 | CartanType::E7 | CartanType::E8 => Ok(()),
        _ => Err(Error::Unsupported(format!("no wall description for type {t}"))),
    }
}

/// Candidate `(n, m)` coefficients of `n·δ_E + m·δ_pt` with `m ≥ 1`.
fn delta_window(m: i64, window: WallWindow) -> Vec<i64> {
    match window {
        WallWindow::Fundamental => (0..m).collect(),
        WallWindow::Box { r_max } => (-i64::from(r_max)..=i64::from(r_max)).collect(),
    }
}

/// v-walls for `v = (1, 0, −n)`: one per root `β` with
/// `|⟨β, v⟩| ≤ ⟨v, v⟩/2`, up to `β ↦ −β` and up to proportional classes.
/// The kept representative has `m > 0`, or `m = n = 0` and a positive
/// finite part. Classes with `m = 0` and `n ≠ 0` pair to zero with every
/// translate and are not walls in the relative picture.
pub fn enumerate_v_walls(v: &MukaiVector, t: CartanType, window: WallWindow) -> Result<Vec<WallSpec>> {
    check_wall_type(t)?;
    let lat = SurfaceLattice::for_type(t)?;
    let n = v
        .is_hilbert()
        .filter(|_| v.c1.len() == lat.ns().rank())
        .ok_or_else(|| Error::Unsupported("v must be normalized to (1, 0, -n)".into()))?;
    let sys = EllipticSystem::new(t);
    let bound = lat.pair(v, v)? / qi(2);
    let rank = sys.rank();
    let mut finite: Vec<Vec<i64>> = vec![vec![0; rank]];
    finite.extend(sys.finite().roots());

    let mut out = Vec::new();
    let mut push = |beta: EllipticRoot| -> Result<()> {
        let kclass = lat.root_to_kclass(&sys, &beta)?;
        let p = lat.pair(&kclass, v)?;
        if p.abs() > bound {
            return Ok(());
        }
        let (locus_poly, alignment_poly) = if t == CartanType::AMinus1 {
            (Some(phase_equal_locus(v, &kclass)?), Some(alignment_locus(v, &kclass)?))
        } else {
            (None, None)
        };
        let (n1_ray, level1_pos) = if beta.m > 0 {
            (Some((beta.m, -beta.n)), Some(Q::new((-beta.n).into(), beta.m.into())))
        } else {
            (None, None)
        };
        out.push(WallSpec { root: beta, kclass, locus_poly, alignment_poly, n1_ray, level1_pos });
        Ok(())
    };
    for m in 1..=n {
        for k in delta_window(m, window) {
            for f in &finite {
                let beta = EllipticRoot::new(f.clone(), m, k);
                if beta.is_imaginary() && gcd_i64(m, k) != 1 {
                    continue;
                }
                push(beta)?;
            }
        }
    }
    for f in sys.finite().positive_roots() {
        push(EllipticRoot::new(f.clone(), 0, 0))?;
    }
    out.sort_by(|a, b| {
        (a.root.m, a.root.n, height(&a.root.finite), &a.root.finite)
            .cmp(&(b.root.m, b.root.n, height(&b.root.finite), &b.root.finite))
    });
    Ok(out)
}

/// One chamber on the level-1 line: the open interval between two wall
/// positions (unbounded at the ends).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chamber {
    #[serde(serialize_with = "ser_opt_q")]
    pub lower: Option<Q>,
    #[serde(serialize_with = "ser_opt_q")]
    pub upper: Option<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChamberDecomposition {
    pub n: i64,
    pub walls: Vec<WallSpec>,
    /// `C^⊥` rays in `(D·C_E, D·C_pt)` coordinates, sorted by angle.
    pub rays: Vec<(i64, i64)>,
    #[serde(with = "crate::arith::q_vec_string")]
    pub level1_positions: Vec<Q>,
    pub chambers: Vec<Chamber>,
    /// `n = 1`: only the Hilbert–Chow ray, which bounds nothing.
    pub degenerate: bool,
}

/// Walls are `C^⊥` for primitive `C = m C_E + k C_pt` with `0 ≤ m < k ≤ n`;
/// on `D·C_E = 1` they sit at `−m/k`.
pub fn chamber_decomposition(n: i64, t: CartanType) -> Result<ChamberDecomposition> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("n must be at least 1, got {n}")));
    }
    if t != CartanType::AMinus1 {
        check_wall_type(t)?;
        return Err(Error::Unsupported(format!(
            "chamber decomposition is only implemented for A-1, not {t}"
        )));
    }
    let lat = SurfaceLattice::for_type(t)?;
    let mut walls = enumerate_v_walls(&lat.hilbert_vector(n), t, WallWindow::Fundamental)?;
    walls.sort_by(|a, b| a.level1_pos.cmp(&b.level1_pos));
    let rays: Vec<(i64, i64)> = walls.iter().filter_map(|w| w.n1_ray).collect();
    let level1_positions: Vec<Q> = walls.iter().filter_map(|w| w.level1_pos.clone()).collect();
    let mut bounds: Vec<Option<Q>> = vec![None];
    bounds.extend(level1_positions.iter().cloned().map(Some));
    bounds.push(None);
    let chambers = bounds
        .windows(2)
        .map(|p| Chamber { lower: p[0].clone(), upper: p[1].clone() })
        .collect();
    Ok(ChamberDecomposition { n, walls, rays, level1_positions, chambers, degenerate: n == 1 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgStyle {
    pub width: u32,
    pub height: u32,
    pub shade: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { width: 480, height: 480, shade: true }
    }
}

/// Half-plane `x = D·C_E ≥ 0` with the level-1 line `x = 1`, every wall ray
/// drawn from the origin, and alternating chamber shading. Numbers are
/// printed with fixed precision so the bytes depend only on the input.
pub fn emit_chamber_svg(dec: &ChamberDecomposition, style: &SvgStyle) -> String {
    // View window in N¹ coordinates.
    let (x0, x1, y0, y1) = (-0.2f64, 2.0f64, -2.2f64, 1.0f64);
    let (w, h) = (f64::from(style.width), f64::from(style.height));
    let px = |x: f64| (x - x0) / (x1 - x0) * w;
    let py = |y: f64| (y1 - y) / (y1 - y0) * h;
    let pt = |x: f64, y: f64| format!("{:.2},{:.2}", px(x), py(y));
    let ray_end = |(a, b): (i64, i64)| {
        let t = x1 / a as f64;
        (x1, b as f64 * t)
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(s, r#"<title>walls for n = {}</title>"#, dec.n);
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, style.width, style.height);

    if style.shade && !dec.rays.is_empty() {
        // Ray ends on the right edge, top to bottom; the first and last
        // chambers wrap around the corners of the view.
        let mut ys: Vec<f64> = dec.rays.iter().map(|r| ray_end(*r).1).collect();
        ys.reverse();
        let mut polys: Vec<Vec<(f64, f64)>> = vec![vec![(0.0, y1), (x1, y1), (x1, ys[0])]];
        for p in ys.windows(2) {
            polys.push(vec![(x1, p[0]), (x1, p[1])]);
        }
        polys.push(vec![(x1, ys[ys.len() - 1]), (x1, y0), (0.0, y0)]);
        for (i, poly) in polys.iter().enumerate() {
            let fill = if i % 2 == 0 { "#dde6f2" } else { "#f2e6dd" };
            let pts: Vec<String> =
                std::iter::once(pt(0.0, 0.0)).chain(poly.iter().map(|&(x, y)| pt(x, y))).collect();
            let _ = writeln!(s, r#"<polygon points="{}" fill="{fill}" stroke="none"/>"#, pts.join(" "));
        }
    }

    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
        px(x0),
        py(0.0),
        px(x1),
        py(0.0)
    );
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
        px(0.0),
        py(y0),
        px(0.0),
        py(y1)
    );
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888888" stroke-dasharray="4 3"/>"##,
        px(1.0),
        py(y0),
        px(1.0),
        py(y1)
    );
    for (ray, pos) in dec.rays.iter().zip(&dec.level1_positions) {
        let (ex, ey) = ray_end(*ray);
        let _ = writeln!(
            s,
            r##"<line class="wall" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#b22222" stroke-width="1.5"><title>{}</title></line>"##,
            px(0.0),
            py(0.0),
            px(ex),
            py(ey),
            fmt_q(pos)
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}
