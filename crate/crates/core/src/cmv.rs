//! CMV ordering, truncated moment matrices, Gauss–Borel factorization and
//! the four biorthogonal families.
//!
//! Scalar index `i` of an `r`-blocked CMV vector decodes as block
//! `k = i / r` and component `i % r` (zero-based); block `k` carries the
//! monomial `z^{e(k)}` with `e = 0, -1, 1, -2, 2, ...`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::measures::MatrixFunctional;

pub type CMat = DMatrix<C64>;

/// Largest entry magnitude.
pub fn amax(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `e(0) = 0`, `e(2j-1) = -j`, `e(2j) = j`.
pub fn cmv_exponent(k: usize) -> i32 {
    let j = k.div_ceil(2) as i32;
    if k % 2 == 1 {
        -j
    } else {
        j
    }
}

/// Inverse of [`cmv_exponent`].
pub fn cmv_index(e: i32) -> usize {
    if e > 0 {
        2 * e as usize
    } else {
        (2 * (-e) as usize).saturating_sub(1)
    }
}

/// `Z_[r](z)` truncated to `n` rows, as an `n × r` matrix.
pub fn cmv_vector(r: usize, n: usize, z: C64) -> CMat {
    let mut m = CMat::zeros(n, r);
    for i in 0..n {
        m[(i, i % r)] = z.powi(cmv_exponent(i / r));
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct CmvTruncation {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub side: Side,
    pub m: CMat,
}

/// Left: `M(i,j) = c_{b,a,e(k)-e(l)}`; right: `c_{b,a,e(l)-e(k)}`.
pub fn build_moment_matrix(mu: &MatrixFunctional, n: usize, side: Side) -> CmvTruncation {
    let (q, p) = (mu.q(), mu.p());
    let m = CMat::from_fn(n, n, |i, j| {
        let (k, b) = (i / q, i % q);
        let (l, a) = (j / p, j % p);
        let d = cmv_exponent(k) - cmv_exponent(l);
        let e = if side == Side::Left { d } else { -d };
        mu.get(b, a).moment(e)
    });
    CmvTruncation { n, q, p, side, m }
}

/// `lower · M · upper = I` with `diag(lower) = 1`.
///
/// For the left matrix `lower = L`, `upper = Ū`; for the right matrix
/// `lower = conj(𝓛)`, `upper = 𝓤`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub side: Side,
    pub lower: CMat,
    pub upper: CMat,
    pub pivots: Vec<C64>,
    pub residual: f64,
}

impl Factorization {
    pub fn min_pivot(&self) -> f64 {
        self.pivots.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min)
    }

    /// `(M^{[k]})^{-1} = upper^{[k]} · lower^{[k]}`.
    pub fn inverse_leading(&self, k: usize) -> CMat {
        self.upper.view((0, 0), (k, k)) * self.lower.view((0, 0), (k, k))
    }
}

/// Elimination without pivoting.
pub fn gauss_borel(t: &CmvTruncation) -> Result<Factorization> {
    let n = t.n;
    let mut a = t.m.clone();
    let scale: Vec<f64> = (0..n)
        .map(|i| t.m.row(i).iter().map(|c| c.norm()).fold(0.0, f64::max))
        .collect();
    let mut pivots = Vec::with_capacity(n);
    // Doolittle: a becomes L' (strict lower) and U' (upper) with M = L'U'.
    for k in 0..n {
        let piv = a[(k, k)];
        if !(piv.norm() > 1e-13 * scale[k].max(f64::MIN_POSITIVE)) {
            return Err(Error::SingularMinor(k));
        }
        pivots.push(piv);
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            a[(i, k)] = f;
            for j in k + 1..n {
                let u = a[(k, j)];
                a[(i, j)] -= f * u;
            }
        }
    }
    let one = C64::new(1.0, 0.0);
    let mut lp = CMat::identity(n, n);
    let mut up = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j < i {
                lp[(i, j)] = a[(i, j)];
            } else {
                up[(i, j)] = a[(i, j)];
            }
        }
    }
    let id = CMat::identity(n, n);
    let lower = lp
        .solve_lower_triangular(&id)
        .ok_or(Error::SingularMinor(0))?;
    let mut upper = up
        .solve_upper_triangular(&id)
        .ok_or(Error::SingularMinor(0))?;
    let mut lower = lower;
    for i in 0..n {
        lower[(i, i)] = one;
        for j in i + 1..n {
            lower[(i, j)] = C64::default();
            upper[(j, i)] = C64::default();
        }
    }
    let residual = amax(&(&lower * &t.m * &upper - id));
    Ok(Factorization {
        n,
        q: t.q,
        p: t.p,
        side: t.side,
        lower,
        upper,
        pivots,
        residual,
    })
}

/// Left and right factorizations of the same functional at the same size.
#[derive(Clone, Debug)]
pub struct FactorPair {
    pub left: Factorization,
    pub right: Factorization,
}

impl FactorPair {
    pub fn new(mu: &MatrixFunctional, n: usize) -> Result<Self> {
        Ok(Self {
            left: gauss_borel(&build_moment_matrix(mu, n, Side::Left))?,
            right: gauss_borel(&build_moment_matrix(mu, n, Side::Right))?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    B,
    A,
    #[serde(rename = "Bscr")]
    BScr,
    #[serde(rename = "Ascr")]
    AScr,
    /// `conj(A_n)(1/z)`, the partner of `B` in the pairing.
    #[serde(rename = "Abar_inv")]
    ADual,
    /// `conj(𝓐_n)(1/z)`.
    #[serde(rename = "Ascr_bar_inv")]
    AScrDual,
}

/// `polys[n][component]`.
#[derive(Clone, Debug)]
pub struct PolynomialFamily {
    pub kind: FamilyKind,
    pub components: usize,
    pub polys: Vec<Vec<LaurentPolynomial>>,
}

impl PolynomialFamily {
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn get(&self, n: usize, c: usize) -> &LaurentPolynomial {
        &self.polys[n][c]
    }

    pub fn eval(&self, n: usize, c: usize, z: C64) -> C64 {
        self.polys[n][c].eval_unchecked(z)
    }

    /// First `count` members evaluated at `z`, as a `count × components` matrix.
    pub fn eval_matrix(&self, count: usize, z: C64) -> CMat {
        CMat::from_fn(count, self.components, |n, c| self.eval(n, c, z))
    }

    /// Family of `conj(P)(1/z)`.
    pub fn conj_reflected(&self) -> Self {
        let kind = match self.kind {
            FamilyKind::A => FamilyKind::ADual,
            FamilyKind::AScr => FamilyKind::AScrDual,
            FamilyKind::ADual => FamilyKind::A,
            FamilyKind::AScrDual => FamilyKind::AScr,
            k => k,
        };
        Self {
            kind,
            components: self.components,
            polys: self
                .polys
                .iter()
                .map(|row| row.iter().map(|p| p.conj_reflect()).collect())
                .collect(),
        }
    }
}

fn family_from_rows(kind: FamilyKind, r: usize, m: &CMat, conj: bool) -> PolynomialFamily {
    let n = m.nrows();
    let polys = (0..n)
        .map(|row| {
            (0..r)
                .map(|c| {
                    LaurentPolynomial::from_coeffs((0..=row).filter(|j| j % r == c).map(|j| {
                        let v = m[(row, j)];
                        (cmv_exponent(j / r), if conj { v.conj() } else { v })
                    }))
                })
                .collect()
        })
        .collect();
    PolynomialFamily { kind, components: r, polys }
}

fn family_from_cols(kind: FamilyKind, r: usize, m: &CMat, conj: bool) -> PolynomialFamily {
    family_from_rows(kind, r, &m.transpose(), conj)
}

/// `B = L Z_[q](z)`.
pub fn family_b(left: &Factorization) -> PolynomialFamily {
    family_from_rows(FamilyKind::B, left.q, &left.lower, false)
}

/// `A = Z_[p]ᵀ(z) U` with `U = conj(Ū)`.
pub fn family_a(left: &Factorization) -> PolynomialFamily {
    family_from_cols(FamilyKind::A, left.p, &left.upper, true)
}

/// `conj(A)(1/z) = Z_[p]ᵀ(1/z) Ū`, the polynomials entering kernels and
/// Cauchy transforms.
pub fn family_a_dual(left: &Factorization) -> PolynomialFamily {
    family_a(left).conj_reflected()
}

/// `𝓐 = 𝓛 Z_[q](z)`.
pub fn family_ascr(right: &Factorization) -> PolynomialFamily {
    family_from_rows(FamilyKind::AScr, right.q, &right.lower, true)
}

/// `𝓑 = Z_[p]ᵀ(z) 𝓤`.
pub fn family_bscr(right: &Factorization) -> PolynomialFamily {
    family_from_cols(FamilyKind::BScr, right.p, &right.upper, false)
}

/// Ceilings on the positive and negative degree of the `n`-th member,
/// component `b` (one-based) of an `r`-blocked family.
pub fn degree_bounds(n: usize, b: usize, r: usize) -> (i64, i64) {
    let (n, b, r) = (n as i64, b as i64, r as i64);
    let ceil = |x: i64, d: i64| x.div_euclid(d) + i64::from(x.rem_euclid(d) != 0);
    (ceil(n + 2 - b, 2 * r) - 1, ceil(n + 2 - b - r, 2 * r))
}

/// Index where the positive-degree ceiling is attained.
pub fn attains_plus(n: usize, b: usize, r: usize) -> bool {
    n % (2 * r) == b - 1
}

/// Index where the negative-degree ceiling is attained.
pub fn attains_minus(n: usize, b: usize, r: usize) -> bool {
    n % (2 * r) == r + b - 1
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DegreeReport {
    pub checked: usize,
    pub violations: usize,
    pub attain_sites: usize,
    pub attained: usize,
}

/// Checks every member against the ceilings and counts attainment.
pub fn check_degrees(f: &PolynomialFamily) -> DegreeReport {
    let mut rep = DegreeReport::default();
    let r = f.components;
    for n in 0..f.len() {
        for c in 0..r {
            let p = f.get(n, c);
            let (bp, bm) = degree_bounds(n, c + 1, r);
            rep.checked += 1;
            if !p.is_zero() && (i64::from(p.deg_plus()) > bp || i64::from(-p.deg_minus()) > bm) {
                rep.violations += 1;
            }
            if attains_plus(n, c + 1, r) {
                rep.attain_sites += 1;
                if !p.is_zero() && i64::from(p.deg_plus()) == bp {
                    rep.attained += 1;
                }
            }
            if attains_minus(n, c + 1, r) {
                rep.attain_sites += 1;
                if !p.is_zero() && i64::from(-p.deg_minus()) == bm {
                    rep.attained += 1;
                }
            }
        }
    }
    rep
}

/// `max |Σ_{b,a} ∮ B_i^{(b)} dμ_{b,a} conj(A_j^{(a)}) - δ_ij|` over `i, j < n`.
pub fn biorthogonality_residual(
    b: &PolynomialFamily,
    a: &PolynomialFamily,
    mu: &MatrixFunctional,
    n: usize,
) -> f64 {
    let ad: Vec<Vec<LaurentPolynomial>> = (0..n)
        .map(|j| (0..mu.p()).map(|c| a.get(j, c).conj_reflect()).collect())
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for (j, adj) in ad.iter().enumerate() {
            let mut s = C64::default();
            for bb in 0..mu.q() {
                let bi = b.get(i, bb);
                if bi.is_zero() {
                    continue;
                }
                for (aa, aj) in adj.iter().enumerate() {
                    if aj.is_zero() {
                        continue;
                    }
                    s += mu.get(bb, aa).apply(&(bi * aj));
                }
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}
