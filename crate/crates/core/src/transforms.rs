//! Christoffel (`μ̂ = W μ`) and Geronimus (`μ = W μ̌`) perturbations by a
//! diagonal matrix of balanced Laurent polynomials.
//!
//! Both connectors are upper triangular with `2dq` superdiagonals and
//! satisfy `N B_base = B_pert W` and `Ā_pert N = Ā_base`. Their outermost
//! entries are known in closed form (`ω_{b,d}` on even blocks, `ω_{b,-d}` on
//! odd ones), so row and column solves use the exact value instead of an
//! arbitrary normalization; [`Connector::normalized`] gives the `Ñ = 1` form.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::cmv::{amax, cmv_exponent, cmv_index, family_a_dual, family_b, CMat, FactorPair, Factorization, PolynomialFamily};
use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::measures::{Atom, MatrixFunctional, ScalarFunctional};
use crate::secondkind::{cauchy_c, CIRCLE_GAP};
use crate::spectral::{lower_form, BandedOperator};

/// `W(z) = c (z - z_1) ⋯ (z - z_{2d}) z^{-d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BalancedLaurent {
    leading: C64,
    roots: Vec<C64>,
    d: usize,
    expanded: LaurentPolynomial,
}

impl BalancedLaurent {
    pub fn new(leading: C64, roots: Vec<C64>) -> Result<Self> {
        if leading == C64::default() {
            return Err(Error::InvalidPerturbation("zero leading coefficient".into()));
        }
        if roots.is_empty() || roots.len() % 2 != 0 {
            return Err(Error::InvalidPerturbation(format!("{} roots; need a positive even count", roots.len())));
        }
        for (i, z) in roots.iter().enumerate() {
            if *z == C64::default() {
                return Err(Error::InvalidPerturbation("root at the origin".into()));
            }
            if (z.norm() - 1.0).abs() < CIRCLE_GAP {
                return Err(Error::OnCircleRoot);
            }
            if roots[..i].iter().any(|w| (w - z).norm() < 1e-12) {
                return Err(Error::InvalidPerturbation(format!("repeated root {z}")));
            }
        }
        let d = roots.len() / 2;
        let mut expanded = LaurentPolynomial::constant(leading);
        for z in &roots {
            expanded = &expanded * &LaurentPolynomial::from_coeffs([(0, -z), (1, C64::new(1.0, 0.0))]);
        }
        let expanded = expanded.shift(-(d as i32));
        Ok(Self { leading, roots, d, expanded })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn leading(&self) -> C64 {
        self.leading
    }

    pub fn roots(&self) -> &[C64] {
        &self.roots
    }

    pub fn poly(&self) -> &LaurentPolynomial {
        &self.expanded
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.expanded.eval_unchecked(z)
    }

    /// `ω_k`, the coefficient of `z^k`.
    pub fn coeff(&self, k: i32) -> C64 {
        self.expanded.coeff(k)
    }

    /// `W'(z_j) = c Π_{s≠j}(z_j - z_s) z_j^{-d}`.
    pub fn derivative_at_root(&self, j: usize) -> C64 {
        let zj = self.roots[j];
        let prod: C64 = self
            .roots
            .iter()
            .enumerate()
            .filter(|(s, _)| *s != j)
            .map(|(_, zs)| zj - zs)
            .product();
        self.leading * prod * zj.powi(-(self.d as i32))
    }

    /// `δW(z0, y) = (W(z0) - W(y))/(z0 - y)` as a polynomial in `y`.
    pub fn delta(&self, z0: C64) -> LaurentPolynomial {
        self.expanded.divided_difference(z0)
    }
}

/// `diag(W_1, …, W_q)` with a common `d` and `2dq` distinct roots.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationMatrix {
    entries: Vec<BalancedLaurent>,
}

impl PerturbationMatrix {
    pub fn new(entries: Vec<BalancedLaurent>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::InvalidPerturbation("no entries".into()))?;
        if entries.iter().any(|w| w.d != first.d) {
            return Err(Error::InvalidPerturbation("entries have different degrees".into()));
        }
        let all: Vec<C64> = entries.iter().flat_map(|w| w.roots.iter().copied()).collect();
        for (i, z) in all.iter().enumerate() {
            if all[..i].iter().any(|w| (w - z).norm() < 1e-12) {
                return Err(Error::InvalidPerturbation(format!("root {z} shared between entries")));
            }
        }
        Ok(Self { entries })
    }

    pub fn q(&self) -> usize {
        self.entries.len()
    }

    pub fn d(&self) -> usize {
        self.entries[0].d
    }

    /// `2dq`, the connector bandwidth.
    pub fn width(&self) -> usize {
        2 * self.d() * self.q()
    }

    pub fn entry(&self, b: usize) -> &BalancedLaurent {
        &self.entries[b]
    }

    pub fn polys(&self) -> Vec<LaurentPolynomial> {
        self.entries.iter().map(|w| w.expanded.clone()).collect()
    }

    /// `(b, j, z_{b,j})` in row-major order; this is the column order of
    /// every evaluation matrix.
    pub fn roots(&self) -> Vec<(usize, usize, C64)> {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(b, w)| w.roots.iter().enumerate().map(move |(j, z)| (b, j, *z)))
            .collect()
    }

    /// Outermost connector entry of row `i`: `ω_{b,d}` for even blocks,
    /// `ω_{b,-d}` for odd ones.
    pub fn outer(&self, i: usize) -> C64 {
        let (k, b) = (i / self.q(), i % self.q());
        let d = self.d() as i32;
        self.entries[b].coeff(if k % 2 == 0 { d } else { -d })
    }
}

/// `𝓦` with `𝓦 Z_[q](z) = Z_[q](z) W_[q](z)`: entry `((k,b),(k',b))` is
/// `ω_{b, e(k') - e(k)}`. Built directly, not as a product of shifts.
pub fn w_matrix(w: &PerturbationMatrix, n: usize) -> BandedOperator {
    let (q, d) = (w.q(), w.d() as i32);
    let band = w.width() + q;
    let mut op = BandedOperator::zeros(n, band, band);
    for i in 0..n {
        let (k, b) = (i / q, i % q);
        let e = cmv_exponent(k);
        for m in -d..=d {
            let j = cmv_index(e + m) * q + b;
            if j < n {
                op.set(i, j, w.entries[b].coeff(m));
            }
        }
    }
    op
}

/// `d - c A⁻¹ b` by an LU solve.
pub fn quasi_determinant(a: &CMat, b: &CMat, c: &CMat, d: C64) -> Result<C64> {
    let k = a.nrows();
    if a.ncols() != k || b.shape() != (k, 1) || c.shape() != (1, k) {
        return Err(Error::ShapeMismatch("quasi-determinant blocks".into()));
    }
    if k == 0 {
        return Ok(d);
    }
    let x = solve(a, b).ok_or(Error::SingularBlock)?;
    Ok(d - (c * x)[(0, 0)])
}

/// `A x = b`, refusing numerically singular `A`.
fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    let lu = a.clone().lu();
    let u = lu.u();
    let scale = amax(a);
    if (0..u.nrows()).any(|i| u[(i, i)].norm() <= 1e-14 * scale) {
        return None;
    }
    lu.solve(b)
}

/// 2-norm condition number.
pub fn condition_number(a: &CMat) -> f64 {
    let s = a.clone().singular_values();
    let (hi, lo) = (s.max(), s.min());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConnectorKind {
    Christoffel,
    Geronimus,
}

/// Upper-triangular banded connector; `rows[i][t] = N_{i, i+t}`, `t ≤ 2dq`.
/// Rows reach past the square truncation, as the kernel connections need.
#[derive(Clone, Debug, Serialize)]
pub struct Connector {
    pub kind: ConnectorKind,
    pub n: usize,
    pub width: usize,
    #[serde(serialize_with = "crate::report::ser_complex_rows")]
    pub rows: Vec<Vec<C64>>,
    /// Exact outermost entries `Ñ_i`.
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub outer: Vec<C64>,
    /// Condition number of each row (or column) solve; empty for connectors
    /// read off factorizations.
    pub cond: Vec<f64>,
    /// Columns before this index were not determined (F-value solves only
    /// reach columns `≥ 2dq`).
    pub first_col: usize,
}

impl Connector {
    pub fn get(&self, i: usize, j: usize) -> C64 {
        if j < i || j > i + self.width || i >= self.rows.len() {
            return C64::default();
        }
        self.rows[i][j - i]
    }

    /// Square `n × n` truncation.
    pub fn truncated(&self) -> BandedOperator {
        let mut op = BandedOperator::zeros(self.n, 0, self.width);
        for i in 0..self.n {
            for j in i..(i + self.width + 1).min(self.n) {
                op.set(i, j, self.get(i, j));
            }
        }
        op
    }

    /// Rows scaled so every outermost entry is 1.
    pub fn normalized(&self) -> Vec<Vec<C64>> {
        self.rows
            .iter()
            .zip(&self.outer)
            .map(|(r, o)| r.iter().map(|v| v / o).collect())
            .collect()
    }

    /// Max entrywise deviation from another connector, relative to the
    /// largest entry, over rows `< n` and columns `≥ first_col`.
    pub fn deviation(&self, other: &Connector) -> f64 {
        let first = self.first_col.max(other.first_col);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for i in 0..self.n.min(other.n) {
            for j in i.max(first)..=i + self.width {
                let (a, b) = (self.get(i, j), other.get(i, j));
                scale = scale.max(a.norm());
                worst = worst.max((a - b).norm());
            }
        }
        worst / scale
    }
}

/// `E[j, r] = B_j^{(b_r)}(z_r)` for `j < count`.
fn root_evaluations(b_fam: &PolynomialFamily, w: &PerturbationMatrix, count: usize) -> CMat {
    let roots = w.roots();
    CMat::from_fn(count, roots.len(), |j, r| b_fam.eval(j, roots[r].0, roots[r].2))
}

fn check_family(b_fam: &PolynomialFamily, w: &PerturbationMatrix, needed: usize) -> Result<()> {
    if b_fam.components != w.q() {
        return Err(Error::ShapeMismatch(format!("family has {} components, W has {}", b_fam.components, w.q())));
    }
    if b_fam.len() < needed {
        return Err(Error::MarginTooSmall { needed, have: b_fam.len() });
    }
    Ok(())
}

/// Rows of `N_C` from `Σ_j N_ij B_j^{(b)}(z_{b,ℓ}) = 0`; `B` must reach `n + 2dq`.
pub fn christoffel_connector(b_fam: &PolynomialFamily, w: &PerturbationMatrix, n: usize) -> Result<Connector> {
    let width = w.width();
    check_family(b_fam, w, n + width)?;
    let e = root_evaluations(b_fam, w, n + width);
    let mut rows = Vec::with_capacity(n);
    let mut cond = Vec::with_capacity(n);
    let outer: Vec<C64> = (0..n).map(|i| w.outer(i)).collect();
    for i in 0..n {
        // x 𝔅_i = -Ñ_i E[i+2dq, ·]
        let frak = e.rows(i, width).into_owned();
        let rhs = CMat::from_iterator(width, 1, e.row(i + width).iter().map(|v| -v * outer[i]));
        let x = solve(&frak.transpose(), &rhs).ok_or(Error::SingularEvaluationMatrix(i))?;
        cond.push(condition_number(&frak));
        let mut row: Vec<C64> = x.iter().copied().collect();
        row.push(outer[i]);
        rows.push(row);
    }
    Ok(Connector { kind: ConnectorKind::Christoffel, n, width, rows, outer, cond, first_col: 0 })
}

/// `N = L_pert 𝓦 L_base⁻¹` read off both factorizations (`N_C` with
/// `pert = μ̂, base = μ`; `N_G` with `pert = μ, base = μ̌`). Also returns the
/// largest magnitude below the diagonal or beyond the band, relative.
pub fn connector_from_factors(
    kind: ConnectorKind,
    pert: &Factorization,
    base: &Factorization,
    w: &PerturbationMatrix,
    n: usize,
) -> Result<(Connector, f64)> {
    let width = w.width();
    let size = pert.n.min(base.n);
    if n + width > size {
        return Err(Error::MarginTooSmall { needed: n + width, have: size });
    }
    let wm = w_matrix(w, size).to_dense();
    let full = lower_form(&pert.lower, &wm, &base.lower);
    let scale = amax(&full).max(1.0);
    let mut leak: f64 = 0.0;
    let inner = size - width;
    for i in 0..inner {
        for j in 0..inner {
            if j < i || j > i + width {
                leak = leak.max(full[(i, j)].norm());
            }
        }
    }
    let rows = (0..n).map(|i| (0..=width).map(|t| full[(i, i + t)]).collect()).collect();
    let outer = (0..n).map(|i| w.outer(i)).collect();
    Ok((Connector { kind, n, width, rows, outer, cond: vec![], first_col: 0 }, leak / scale))
}

/// `max_{i,r} |Σ_j N_ij B_j(z_r)| / Σ_j |N_ij B_j(z_r)|`.
pub fn root_condition_residual(conn: &Connector, b_fam: &PolynomialFamily, w: &PerturbationMatrix) -> f64 {
    let e = root_evaluations(b_fam, w, conn.n + conn.width);
    let mut worst: f64 = 0.0;
    for i in 0..conn.n {
        for r in 0..e.ncols() {
            let (mut s, mut mag) = (C64::default(), 0.0);
            for t in 0..=conn.width {
                let v = conn.rows[i][t] * e[(i + t, r)];
                s += v;
                mag += v.norm();
            }
            worst = worst.max(s.norm() / mag.max(f64::MIN_POSITIVE));
        }
    }
    worst
}

fn not_root(w: &PerturbationMatrix, b: usize, z: C64) -> Result<()> {
    if w.entries[b].roots.iter().any(|r| (r - z).norm() < 1e-12 * r.norm().max(1.0)) {
        return Err(Error::RootOfW);
    }
    Ok(())
}

/// `B̂_n^{(b)}(z) = Ñ_n Θ / W_b(z)`, with `Θ` the quasi-determinant of the
/// evaluation matrix bordered by `B_{n+2dq}` and the column `B_{n..n+2dq}(z)`.
pub fn christoffel_b_hat(
    conn: &Connector,
    b_fam: &PolynomialFamily,
    w: &PerturbationMatrix,
    n: usize,
    b: usize,
    z: C64,
) -> Result<C64> {
    not_root(w, b, z)?;
    let width = w.width();
    check_family(b_fam, w, n + width + 1)?;
    let e = root_evaluations(b_fam, w, n + width + 1);
    let frak = e.rows(n, width).into_owned();
    let border_row = CMat::from_iterator(1, width, e.row(n + width).iter().copied());
    let col = CMat::from_fn(width, 1, |t, _| b_fam.eval(n + t, b, z));
    let theta = quasi_determinant(&frak, &col, &border_row, b_fam.eval(n + width, b, z))
        .map_err(|_| Error::SingularEvaluationMatrix(n))?;
    let outer = conn.outer.get(n).copied().unwrap_or_else(|| w.outer(n));
    Ok(outer * theta / w.entries[b].eval(z))
}

/// `B̂_n = (N B)_n / W` as polynomials, with the relative division remainder.
pub fn christoffel_b_hat_poly(
    conn: &Connector,
    b_fam: &PolynomialFamily,
    w: &PerturbationMatrix,
    n: usize,
) -> Result<(Vec<LaurentPolynomial>, f64)> {
    if n >= conn.n {
        return Err(Error::WindowOutOfRange { index: n, lo: 0, hi: conn.n });
    }
    let mut out = Vec::with_capacity(w.q());
    let mut rem: f64 = 0.0;
    for b in 0..w.q() {
        let mut acc = LaurentPolynomial::zero();
        for t in 0..=conn.width {
            acc = &acc + &b_fam.get(n + t, b).scale(conn.rows[n][t]);
        }
        let (quo, r) = acc.div_exact(w.entries[b].poly());
        rem = rem.max(r);
        out.push(quo);
    }
    Ok((out, rem))
}

/// `Â_{n-1}^{(a)}(1/x) = -(κ_a 𝔅_n⁻¹)_last / Ñ_{n-1}` for every `a`, where
/// `κ_{a,(b,ℓ)} = K_{ab}^{[n]}(x, z_{b,ℓ})` and `𝔅_n` has rows `n..n+2dq`.
pub fn christoffel_a_hat(
    conn: &Connector,
    a_dual: &PolynomialFamily,
    b_fam: &PolynomialFamily,
    w: &PerturbationMatrix,
    n: usize,
    x: C64,
) -> Result<Vec<C64>> {
    if n == 0 || n > conn.n {
        return Err(Error::WindowOutOfRange { index: n, lo: 1, hi: conn.n + 1 });
    }
    let width = w.width();
    check_family(b_fam, w, n + width)?;
    let roots = w.roots();
    let e = root_evaluations(b_fam, w, n + width);
    let frak_t = e.rows(n, width).transpose();
    let av = a_dual.eval_matrix(n, x);
    let outer = conn.outer[n - 1];
    let mut out = Vec::with_capacity(a_dual.components);
    for a in 0..a_dual.components {
        let kappa = CMat::from_fn(width, 1, |r, _| (0..n).map(|k| av[(k, a)] * e[(k, r)]).sum::<C64>());
        let y = solve(&frak_t, &kappa).ok_or(Error::SingularEvaluationMatrix(n))?;
        out.push(-y[(width - 1, 0)] / outer);
    }
    let _ = roots;
    Ok(out)
}

/// Relative residual of
/// `W_b(y) K̂_{ab}(x,y) = K_{ab}(x,y) + Σ_{i∈[n-2dq,n)} Σ_{j∈[n,i+2dq]} Â_i^{(a)}(1/x) N_ij B_j^{(b)}(y)`.
#[allow(clippy::too_many_arguments)]
pub fn kernel_connection_residual(
    conn: &Connector,
    hat_a_dual: &PolynomialFamily,
    hat_b: &PolynomialFamily,
    a_dual: &PolynomialFamily,
    b_fam: &PolynomialFamily,
    w: &PerturbationMatrix,
    n: usize,
    x: C64,
    y: C64,
) -> Result<f64> {
    let width = w.width();
    if n > conn.n {
        return Err(Error::WindowOutOfRange { index: n, lo: 0, hi: conn.n + 1 });
    }
    check_family(b_fam, w, n + width)?;
    let k_hat = crate::kernels::kernel_direct(hat_a_dual, hat_b, n, x, y)?.value;
    let k = crate::kernels::kernel_direct(a_dual, b_fam, n, x, y)?.value;
    let ah = hat_a_dual.eval_matrix(n, x);
    let bv = b_fam.eval_matrix(n + width, y);
    let mut worst: f64 = 0.0;
    for a in 0..a_dual.components {
        for b in 0..w.q() {
            let mut corr = C64::default();
            for i in n.saturating_sub(width)..n {
                for j in n..=i + width {
                    corr += ah[(i, a)] * conn.get(i, j) * bv[(j, b)];
                }
            }
            let lhs = w.entries[b].eval(y) * k_hat[(a, b)];
            let rhs = k[(a, b)] + corr;
            let scale = lhs.norm().max(k[(a, b)].norm()).max(corr.norm()).max(1.0);
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    Ok(worst)
}

/// Relative residual of `Â^[n](1/x) N^[n] = A^[n](1/x)` (conjugate-reflected families).
pub fn truncation_residual(conn: &Connector, hat_a_dual: &PolynomialFamily, a_dual: &PolynomialFamily, n: usize, x: C64) -> f64 {
    let ah = hat_a_dual.eval_matrix(n, x);
    let av = a_dual.eval_matrix(n, x);
    let mut worst: f64 = 0.0;
    for a in 0..av.ncols() {
        for j in 0..n {
            let (mut s, mut mag) = (C64::default(), 0.0);
            for i in j.saturating_sub(conn.width)..=j {
                let v = ah[(i, a)] * conn.get(i, j);
                s += v;
                mag += v.norm();
            }
            worst = worst.max((s - av[(j, a)]).norm() / mag.max(av[(j, a)].norm()).max(1.0));
        }
    }
    worst
}

/// Relative residual of the polynomial identity `N B = B̂ W` on rows `< n`.
pub fn connection_b_residual(conn: &Connector, b_fam: &PolynomialFamily, hat_b: &PolynomialFamily, w: &PerturbationMatrix, z: C64) -> f64 {
    let bv = b_fam.eval_matrix(conn.n + conn.width, z);
    let hv = hat_b.eval_matrix(conn.n, z);
    let mut worst: f64 = 0.0;
    for i in 0..conn.n {
        for b in 0..w.q() {
            let (mut s, mut mag) = (C64::default(), 0.0);
            for t in 0..=conn.width {
                let v = conn.rows[i][t] * bv[(i + t, b)];
                s += v;
                mag += v.norm();
            }
            let rhs = hv[(i, b)] * w.entries[b].eval(z);
            worst = worst.max((s - rhs).norm() / mag.max(rhs.norm()).max(1.0));
        }
    }
    worst
}

/// A Geronimus pair: `μ̌` (weights plus atoms at the roots of `W_b` in row
/// `b`) and the induced `μ = W μ̌`, whose atoms are annihilated.
#[derive(Clone, Debug)]
pub struct GeronimusData {
    pub w: PerturbationMatrix,
    pub base_check: MatrixFunctional,
    pub induced: MatrixFunctional,
    /// `masses[b][a][j]` at `z_{b,j}` in entry `(b, a)`.
    pub masses: Vec<Vec<Vec<C64>>>,
}

/// Validates the atoms of `μ̌` and builds `μ = W μ̌`.
pub fn geronimus_setup(base_check: &MatrixFunctional, w: &PerturbationMatrix) -> Result<GeronimusData> {
    let (q, p) = (base_check.q(), base_check.p());
    if q != w.q() {
        return Err(Error::ShapeMismatch(format!("measure has {q} rows, W has {}", w.q())));
    }
    let mut masses = vec![vec![vec![C64::default(); 2 * w.d()]; p]; q];
    let mut grid = Vec::with_capacity(q * p);
    for b in 0..q {
        let wb = &w.entries[b];
        for a in 0..p {
            let f = base_check.get(b, a);
            for at in &f.atoms {
                let j = wb
                    .roots
                    .iter()
                    .position(|r| (r - at.location).norm() < 1e-12 * r.norm().max(1.0))
                    .ok_or_else(|| Error::AtomNotAtRoot(format!("{} in entry ({b}, {a})", at.location)))?;
                masses[b][a][j] += at.mass;
            }
            grid.push(ScalarFunctional::weight(wb.poly() * &f.ac));
        }
    }
    let induced = MatrixFunctional::new(q, p, grid)?;
    Ok(GeronimusData { w: w.clone(), base_check: base_check.clone(), induced, masses })
}

/// Inverse of [`geronimus_setup`]: `μ̌ = W⁻¹ μ + Σ masses`. The weights of
/// `μ` must be divisible by `W_b` row by row.
pub fn geronimus_base(induced: &MatrixFunctional, w: &PerturbationMatrix, masses: &[Vec<Vec<C64>>]) -> Result<MatrixFunctional> {
    let (q, p) = (induced.q(), induced.p());
    let mut grid = Vec::with_capacity(q * p);
    for b in 0..q {
        let wb = &w.entries[b];
        for a in 0..p {
            let f = induced.get(b, a);
            if !f.atoms.is_empty() {
                return Err(Error::InvalidPerturbation("induced measure carries atoms".into()));
            }
            let (quo, rem) = f.ac.div_exact(wb.poly());
            if rem > 1e-10 {
                return Err(Error::InvalidPerturbation(format!("weight ({b}, {a}) not divisible by W (remainder {rem:e})")));
            }
            let atoms = wb
                .roots
                .iter()
                .enumerate()
                .filter(|(j, _)| masses[b][a][*j] != C64::default())
                .map(|(j, z)| Atom { location: *z, mass: masses[b][a][j] })
                .collect();
            grid.push(ScalarFunctional::new(quo, atoms)?);
        }
    }
    MatrixFunctional::new(q, p, grid)
}

/// `F_{m,(b,j)} = C_m^{(b)}(z_{b,j}) - W_b'(z_{b,j}) Σ_a m_{b,a,j} Ā_m^{(a)}(1/z_{b,j})`
/// for `m < rows`, columns ordered as [`PerturbationMatrix::roots`].
/// `C` and `Ā` belong to the induced measure `μ`.
pub fn f_values(g: &GeronimusData, a_dual: &PolynomialFamily, rows: usize) -> Result<CMat> {
    let roots = g.w.roots();
    let mut f = CMat::zeros(rows, roots.len());
    for (r, &(b, j, z)) in roots.iter().enumerate() {
        let c = cauchy_c(&g.induced, a_dual, rows, z).map_err(|e| match e {
            Error::OnCircle => Error::OnCircleRoot,
            e => e,
        })?;
        let dw = g.w.entries[b].derivative_at_root(j);
        for m in 0..rows {
            let atom: C64 = (0..g.induced.p()).map(|a| g.masses[b][a][j] * a_dual.eval(m, a, z)).sum();
            f[(m, r)] = c[(b, m)] - dw * atom;
        }
    }
    Ok(f)
}

/// `max |Σ_m F_{m,(b,j)} N_{m,ℓ}| / Σ_m |F N|` over columns `ℓ` in
/// `[q(2d-1) + b + 1, n)` (zero-based `b`), where the identity must hold.
pub fn f_vanishing_residual(f: &CMat, conn: &Connector, w: &PerturbationMatrix) -> f64 {
    let roots = w.roots();
    let (q, d) = (w.q(), w.d());
    let mut worst: f64 = 0.0;
    for (r, &(b, _, _)) in roots.iter().enumerate() {
        for l in q * (2 * d - 1) + b + 1..conn.n {
            let (mut s, mut mag) = (C64::default(), 0.0);
            for m in l.saturating_sub(conn.width)..=l {
                let v = f[(m, r)] * conn.get(m, l);
                s += v;
                mag += v.norm();
            }
            worst = worst.max(s.norm() / mag.max(f64::MIN_POSITIVE));
        }
    }
    worst
}

/// `N_G` from F-values alone: each column `ℓ ≥ 2dq` solves
/// `Σ_{m=ℓ-2dq}^{ℓ} F_{m,·} N_{m,ℓ} = 0` with the exact outer entry.
/// Needs F rows up to `n + 2dq`.
pub fn geronimus_connector_from_f(f: &CMat, w: &PerturbationMatrix, n: usize) -> Result<Connector> {
    let width = w.width();
    if f.nrows() < n + width {
        return Err(Error::MarginTooSmall { needed: n + width, have: f.nrows() });
    }
    let mut rows = vec![vec![C64::default(); width + 1]; n];
    let outer: Vec<C64> = (0..n).map(|i| w.outer(i)).collect();
    let mut cond = Vec::new();
    for l in width..n + width {
        let r0 = l - width;
        let frak = f.rows(r0 + 1, width).into_owned();
        let rhs = CMat::from_iterator(width, 1, f.row(r0).iter().map(|v| -v * w.outer(r0)));
        let x = solve(&frak.transpose(), &rhs).ok_or(Error::SingularFWindow(l))?;
        cond.push(condition_number(&frak));
        if r0 < n {
            rows[r0][width] = w.outer(r0);
        }
        for t in 0..width {
            let m = r0 + 1 + t;
            if m < n {
                rows[m][l - m] = x[(t, 0)];
            }
        }
    }
    Ok(Connector { kind: ConnectorKind::Geronimus, n, width, rows, outer, cond, first_col: width })
}

/// `Ǎ_ℓ^{(a)}(1/z) = Ñ_{ℓ-2dq} Θ` with `Θ` the quasi-determinant of the F-window
/// `𝓕` (rows `ℓ-2dq+1..=ℓ`) bordered by row `ℓ-2dq` and `Ā_{ℓ-2dq..=ℓ}(1/z)`.
pub fn geronimus_a_check(f: &CMat, a_dual: &PolynomialFamily, w: &PerturbationMatrix, l: usize, z: C64) -> Result<Vec<C64>> {
    let width = w.width();
    if l < width || l >= f.nrows() || l >= a_dual.len() {
        return Err(Error::WindowOutOfRange { index: l, lo: width, hi: f.nrows().min(a_dual.len()) });
    }
    let r0 = l - width;
    let frak = f.rows(r0 + 1, width).into_owned();
    let border = CMat::from_iterator(1, width, f.row(r0).iter().copied());
    let av = a_dual.eval_matrix(l + 1, z);
    (0..a_dual.components)
        .map(|a| {
            let col = CMat::from_fn(width, 1, |t, _| av[(r0 + 1 + t, a)]);
            quasi_determinant(&frak, &col, &border, av[(r0, a)])
                .map(|theta| w.outer(r0) * theta)
                .map_err(|_| Error::SingularFWindow(l))
        })
        .collect()
}

/// `B̌_n^{(b')}(y) = e_1ᵀ (Φᵀ)⁻¹ 𝒦_{·,b'}(y) / Ñ_{n-2dq}` with `Φ` the F rows
/// `[n-2dq, n)` and
/// `𝒦_{(b,j),b'} = Σ_{m<n} F_{m,(b,j)} B_m^{(b')}(y) W_{b'}(y) + δ_{bb'} δW_b(z_{b,j}, y)`.
/// `B` belongs to the induced measure.
pub fn geronimus_b_check(f: &CMat, b_fam: &PolynomialFamily, w: &PerturbationMatrix, n: usize, y: C64) -> Result<Vec<C64>> {
    let width = w.width();
    if n < width || n > f.nrows() || n > b_fam.len() {
        return Err(Error::WindowOutOfRange { index: n, lo: width, hi: f.nrows().min(b_fam.len()) + 1 });
    }
    let roots = w.roots();
    let phi_t = f.rows(n - width, width).transpose();
    let bv = b_fam.eval_matrix(n, y);
    let fb = f.rows(0, n).transpose() * &bv;
    (0..w.q())
        .map(|bp| {
            let wy = w.entries[bp].eval(y);
            let k = CMat::from_fn(width, 1, |r, _| {
                let (b, _, z) = roots[r];
                let delta = if b == bp { w.entries[b].delta(z).eval_unchecked(y) } else { C64::default() };
                fb[(r, bp)] * wy + delta
            });
            let s = solve(&phi_t, &k).ok_or(Error::SingularFWindow(n))?;
            Ok(s[(0, 0)] / w.outer(n - width))
        })
        .collect()
}

/// Residuals of the second-kind and Cauchy-kernel connections.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GeronimusConnectionResiduals {
    /// `N_G Ď(z) = D(z)` on rows `< n`.
    pub skf_d: f64,
    /// `W_b(z) Ǩ_C(z,y) = K_C(z,y) W(y) - Σ C_m N_mℓ B̌_ℓ(y) + δW_b(z,y)`.
    pub conn_c: f64,
    /// `Ǩ_D(x,z) = K_D(x,z) - Σ Ā_m(1/x) N_mj Ď_j(z)`.
    pub conn_d: f64,
}

impl GeronimusConnectionResiduals {
    pub fn max(&self) -> f64 {
        self.skf_d.max(self.conn_c).max(self.conn_d)
    }
}

/// Families of `μ` and of `μ̌`, each reaching at least `n + 2dq`.
pub struct GeronimusFamilies<'a> {
    pub a_dual: &'a PolynomialFamily,
    pub b: &'a PolynomialFamily,
    pub a_dual_check: &'a PolynomialFamily,
    pub b_check: &'a PolynomialFamily,
}

#[allow(clippy::too_many_arguments)]
pub fn geronimus_connection_residuals(
    g: &GeronimusData,
    fam: &GeronimusFamilies<'_>,
    conn: &Connector,
    n: usize,
    x: C64,
    y: C64,
    z: C64,
) -> Result<GeronimusConnectionResiduals> {
    use crate::secondkind::cauchy_d;
    let width = g.w.width();
    let (q, p) = (g.w.q(), g.induced.p());
    let ext = n + width;
    if conn.n < n || fam.b_check.len() < ext {
        return Err(Error::MarginTooSmall { needed: ext, have: fam.b_check.len().min(conn.n + width) });
    }
    let rel = |lhs: C64, rhs: C64, mag: f64| (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(mag).max(1.0);
    let mut out = GeronimusConnectionResiduals::default();

    let d = cauchy_d(&g.induced, fam.b, n, z)?;
    let d_check = cauchy_d(&g.base_check, fam.b_check, ext, z)?;
    for i in 0..n {
        for a in 0..p {
            let (mut s, mut mag) = (C64::default(), 0.0);
            for j in i..=i + width {
                let v = conn.get(i, j) * d_check[(j, a)];
                s += v;
                mag += v.norm();
            }
            out.skf_d = out.skf_d.max(rel(s, d[(i, a)], mag));
        }
    }

    let c = cauchy_c(&g.induced, fam.a_dual, n, z)?;
    let c_check = cauchy_c(&g.base_check, fam.a_dual_check, n, z)?;
    let bv = fam.b.eval_matrix(n, y);
    let bcv = fam.b_check.eval_matrix(ext, y);
    let kc = &c * &bv;
    let kc_check = &c_check * bcv.rows(0, n);
    for b in 0..q {
        let wz = g.w.entries[b].eval(z);
        let dw = g.w.entries[b].delta(z).eval_unchecked(y);
        for bp in 0..q {
            let mut tail = C64::default();
            for m in n.saturating_sub(width)..n {
                for l in n..=m + width {
                    tail += c[(b, m)] * conn.get(m, l) * bcv[(l, bp)];
                }
            }
            let lhs = wz * kc_check[(b, bp)];
            let mut rhs = kc[(b, bp)] * g.w.entries[bp].eval(y) - tail;
            if b == bp {
                rhs += dw;
            }
            out.conn_c = out.conn_c.max(rel(lhs, rhs, tail.norm()));
        }
    }

    let av = fam.a_dual.eval_matrix(n, x);
    let acv = fam.a_dual_check.eval_matrix(n, x);
    let kd = av.transpose() * d.rows(0, n);
    let kd_check = acv.transpose() * d_check.rows(0, n);
    for a in 0..p {
        for ap in 0..p {
            let mut tail = C64::default();
            for m in n.saturating_sub(width)..n {
                for j in n..=m + width {
                    tail += av[(m, a)] * conn.get(m, j) * d_check[(j, ap)];
                }
            }
            out.conn_d = out.conn_d.max(rel(kd_check[(a, ap)], kd[(a, ap)] - tail, tail.norm()));
        }
    }
    Ok(out)
}

/// Relative deviation of two value lists.
pub fn relative_gap(a: &[C64], b: &[C64]) -> f64 {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(1.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

/// Dense `2dq × 2dq` evaluation matrix `𝔅_n`, exposed for diagnostics.
pub fn evaluation_matrix(b_fam: &PolynomialFamily, w: &PerturbationMatrix, n: usize) -> Result<DMatrix<C64>> {
    check_family(b_fam, w, n + w.width())?;
    Ok(root_evaluations(b_fam, w, n + w.width()).rows(n, w.width()).into_owned())
}

/// Christoffel formulas against a direct factorization of `W μ`.
#[derive(Clone, Debug, Serialize)]
pub struct ChristoffelOracle {
    pub n: usize,
    pub connector: Connector,
    /// Root-condition connector against `L̂ 𝓦 L⁻¹`.
    pub connector_vs_factors: f64,
    pub band_leak: f64,
    pub root_conditions: f64,
    pub b_hat: f64,
    pub a_hat: f64,
    pub connection_b: f64,
    pub division_remainder: f64,
    pub kernel_connection: f64,
    pub truncation: f64,
}

/// `points` are used for `B̂`, `Â` and the truncated connection; `pairs` for
/// the kernel connection.
pub fn christoffel_oracle(
    mu: &MatrixFunctional,
    w: &PerturbationMatrix,
    n: usize,
    points: &[C64],
    pairs: &[(C64, C64)],
) -> Result<ChristoffelOracle> {
    if mu.q() != w.q() {
        return Err(Error::ShapeMismatch(format!("measure has {} rows, W has {}", mu.q(), w.q())));
    }
    let size = n + 2 * w.width() + 4;
    let base = FactorPair::new(mu, size)?.left;
    let hat_mu = mu.scale_rows(&w.polys())?;
    let pert = FactorPair::new(&hat_mu, size)?.left;
    let (b, ad) = (family_b(&base), family_a_dual(&base));
    let (bh, adh) = (family_b(&pert), family_a_dual(&pert));
    let conn = christoffel_connector(&b, w, n)?;
    let (direct, band_leak) = connector_from_factors(ConnectorKind::Christoffel, &pert, &base, w, n)?;
    let (mut b_hat, mut a_hat, mut connection_b, mut truncation) = (0f64, 0f64, 0f64, 0f64);
    for &z in points {
        for k in 0..n {
            for c in 0..w.q() {
                let v = christoffel_b_hat(&conn, &b, w, k, c, z)?;
                let want = bh.eval(k, c, z);
                b_hat = b_hat.max((v - want).norm() / want.norm().max(1.0));
            }
        }
        for k in 1..=n {
            let v = christoffel_a_hat(&conn, &ad, &b, w, k, z)?;
            let want: Vec<C64> = (0..mu.p()).map(|a| adh.eval(k - 1, a, z)).collect();
            a_hat = a_hat.max(relative_gap(&v, &want));
        }
        connection_b = connection_b.max(connection_b_residual(&conn, &b, &bh, w, z));
        truncation = truncation.max(truncation_residual(&conn, &adh, &ad, n, z));
    }
    let mut kernel_connection: f64 = 0.0;
    for &(x, y) in pairs {
        kernel_connection = kernel_connection.max(kernel_connection_residual(&conn, &adh, &bh, &ad, &b, w, n, x, y)?);
    }
    let (_, division_remainder) = christoffel_b_hat_poly(&conn, &b, w, n - 1)?;
    Ok(ChristoffelOracle {
        n,
        connector_vs_factors: conn.deviation(&direct),
        root_conditions: root_condition_residual(&conn, &b, w),
        connector: conn,
        band_leak,
        b_hat,
        a_hat,
        connection_b,
        division_remainder,
        kernel_connection,
        truncation,
    })
}

/// Geronimus formulas against a direct factorization of `μ̌`.
#[derive(Clone, Debug, Serialize)]
pub struct GeronimusOracle {
    pub n: usize,
    /// Connector solved from F-values alone.
    pub connector: Connector,
    /// F-value connector against `L 𝓦 Ľ⁻¹`, columns `≥ 2dq`.
    pub connector_vs_factors: f64,
    pub band_leak: f64,
    pub f_vanishing: f64,
    pub a_check: f64,
    pub b_check: f64,
    pub connections: GeronimusConnectionResiduals,
}

/// `base_check` is `μ̌`; its atoms must sit at roots of `W`. `points` are used
/// for `Ǎ`, `B̌`; each triple `(x, y, z)` for the connection identities, with
/// `z` off the circle.
pub fn geronimus_oracle(
    base_check: &MatrixFunctional,
    w: &PerturbationMatrix,
    n: usize,
    points: &[C64],
    triples: &[(C64, C64, C64)],
) -> Result<GeronimusOracle> {
    let g = geronimus_setup(base_check, w)?;
    let width = w.width();
    if n <= width {
        return Err(Error::WindowOutOfRange { index: n, lo: width + 1, hi: usize::MAX });
    }
    let size = n + 2 * width + 8;
    let fm = FactorPair::new(&g.induced, size)?.left;
    let fc = FactorPair::new(&g.base_check, size)?.left;
    let (b, ad) = (family_b(&fm), family_a_dual(&fm));
    let (bc, adc) = (family_b(&fc), family_a_dual(&fc));
    let (direct, band_leak) = connector_from_factors(ConnectorKind::Geronimus, &fm, &fc, w, n + width)?;
    let f = f_values(&g, &ad, n + 2 * width)?;
    let f_vanishing = f_vanishing_residual(&f, &direct, w);
    let conn = geronimus_connector_from_f(&f, w, n)?;
    let (mut a_check, mut b_check) = (0f64, 0f64);
    for &z in points {
        for l in width..n {
            let v = geronimus_a_check(&f, &ad, w, l, z)?;
            let want: Vec<C64> = (0..base_check.p()).map(|a| adc.eval(l, a, z)).collect();
            a_check = a_check.max(relative_gap(&v, &want));
            let v = geronimus_b_check(&f, &b, w, l, z)?;
            let want: Vec<C64> = (0..base_check.q()).map(|c| bc.eval(l, c, z)).collect();
            b_check = b_check.max(relative_gap(&v, &want));
        }
    }
    let fam = GeronimusFamilies { a_dual: &ad, b: &b, a_dual_check: &adc, b_check: &bc };
    let mut connections = GeronimusConnectionResiduals::default();
    for &(x, y, z) in triples {
        let r = geronimus_connection_residuals(&g, &fam, &direct, n, x, y, z)?;
        connections.skf_d = connections.skf_d.max(r.skf_d);
        connections.conn_c = connections.conn_c.max(r.conn_c);
        connections.conn_d = connections.conn_d.max(r.conn_d);
    }
    Ok(GeronimusOracle {
        n,
        connector_vs_factors: conn.deviation(&direct),
        connector: conn,
        band_leak,
        f_vanishing,
        a_check,
        b_check,
        connections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn w1() -> BalancedLaurent {
        BalancedLaurent::new(c(1.0), vec![c(2.0), c(0.5)]).unwrap()
    }

    #[test]
    fn balanced_expansion() {
        let w = w1();
        assert_eq!(w.poly(), &LaurentPolynomial::from_real_slice(-1, &[1.0, -2.5, 1.0]));
        assert!(w.eval(c(2.0)).norm() < 1e-15);
        assert!((w.derivative_at_root(0) - c(0.75)).norm() < 1e-15);
        let dd = w.delta(c(3.0));
        assert_eq!((dd.deg_minus(), dd.deg_plus()), (-1, 0));
    }

    #[test]
    fn validation() {
        assert_eq!(BalancedLaurent::new(c(1.0), vec![c(1.0), c(3.0)]).unwrap_err(), Error::OnCircleRoot);
        assert!(matches!(BalancedLaurent::new(c(1.0), vec![c(2.0)]), Err(Error::InvalidPerturbation(_))));
        assert!(matches!(BalancedLaurent::new(c(0.0), vec![c(2.0), c(3.0)]), Err(Error::InvalidPerturbation(_))));
        let shared = PerturbationMatrix::new(vec![w1(), BalancedLaurent::new(c(1.0), vec![c(2.0), c(3.0)]).unwrap()]);
        assert!(matches!(shared, Err(Error::InvalidPerturbation(_))));
    }

    #[test]
    fn w_matrix_acts_on_monomials() {
        let w = PerturbationMatrix::new(vec![w1(), BalancedLaurent::new(C64::new(0.5, 0.2), vec![c(3.0), C64::new(0.0, -0.4)]).unwrap()]).unwrap();
        let n = 20;
        let wm = w_matrix(&w, n);
        let z = C64::new(0.7, 0.4);
        let zv = crate::cmv::cmv_vector(2, n, z);
        let lhs = wm.to_dense() * &zv;
        for i in 0..n - w.width() - 2 {
            let b = i % 2;
            assert!((lhs[(i, b)] - zv[(i, b)] * w.entry(b).eval(z)).norm() < 1e-13);
        }
        for i in 0..n - w.width() {
            assert_eq!(wm.get(i, i + w.width()), w.outer(i));
        }
    }

    #[test]
    fn quasi_determinant_small() {
        let one = CMat::from_element(1, 1, c(1.0));
        let a = CMat::from_element(1, 1, c(2.0));
        assert_eq!(quasi_determinant(&a, &one, &one, c(1.0)).unwrap(), c(0.5));
        let id = CMat::identity(3, 3);
        let z = CMat::zeros(3, 1);
        assert_eq!(quasi_determinant(&id, &z, &z.transpose(), c(4.0)).unwrap(), c(4.0));
        assert_eq!(quasi_determinant(&CMat::zeros(2, 2), &CMat::zeros(2, 1), &CMat::zeros(1, 2), c(1.0)).unwrap_err(), Error::SingularBlock);
    }

    #[test]
    fn setup_rejects_stray_atom() {
        let w = PerturbationMatrix::new(vec![w1()]).unwrap();
        let f = ScalarFunctional::new(LaurentPolynomial::one(), vec![Atom { location: c(3.0), mass: c(0.1) }]).unwrap();
        let err = geronimus_setup(&MatrixFunctional::scalar(f), &w).unwrap_err();
        assert!(matches!(err, Error::AtomNotAtRoot(_)));
    }

    #[test]
    fn setup_and_base_round_trip() {
        let w = PerturbationMatrix::new(vec![w1()]).unwrap();
        let f = ScalarFunctional::new(
            LaurentPolynomial::from_real_slice(-1, &[0.2, 1.0, 0.2]),
            vec![Atom { location: c(2.0), mass: c(0.1) }],
        )
        .unwrap();
        let base = MatrixFunctional::scalar(f);
        let g = geronimus_setup(&base, &w).unwrap();
        assert!(!g.induced.has_atoms());
        assert_eq!(g.masses[0][0], vec![c(0.1), c(0.0)]);
        let back = geronimus_base(&g.induced, &w, &g.masses).unwrap();
        for k in -4..=4 {
            assert!((back.moment(k) - base.moment(k)).norm() < 1e-14);
        }
    }
}
