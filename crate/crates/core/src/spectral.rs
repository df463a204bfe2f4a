//! Shift-type operators, recurrence matrices and the block ladder.
//!
//! Every operator is built from factorizations of size `N = n + margin`
//! and cut to `n × n`; with `margin ≥ 2(p+q)` the cut is exact.
//! Identities between truncated products are checked on interior rows,
//! i.e. rows whose band reach stays inside the truncation.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::cmv::{
    amax, cmv_exponent, family_a_dual, family_ascr, family_b, family_bscr, CMat, FactorPair,
    Factorization, PolynomialFamily,
};
use crate::error::{Error, Result};
use crate::laurent::{LaurentPolyMatrix, LaurentPolynomial};
use crate::measures::MatrixFunctional;

/// Square matrix stored by diagonals `-lower..=upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedOperator {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<C64>,
}

impl BandedOperator {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![C64::default(); n * (lower + upper + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.lower < i || j > i + self.upper {
            return None;
        }
        Some(i * (self.lower + self.upper + 1) + (j + self.lower - i))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.slot(i, j).map(|s| self.data[s]).unwrap_or_default()
    }

    /// Panics when `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] = v;
    }

    /// Band part of `m` and the largest magnitude left outside it.
    pub fn from_dense(m: &CMat, lower: usize, upper: usize) -> (Self, f64) {
        let n = m.nrows();
        let mut op = Self::zeros(n, lower, upper);
        let mut leak: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                match op.slot(i, j) {
                    Some(s) => op.data[s] = m[(i, j)],
                    None => leak = leak.max(m[(i, j)].norm()),
                }
            }
        }
        (op, leak)
    }

    pub fn to_dense(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n, self.upper, self.lower);
        for i in 0..self.n {
            for j in self.row_range(i) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.n)
    }

    /// Rows whose band reach stays inside the truncation.
    pub fn interior_rows(&self) -> std::ops::Range<usize> {
        0..self.n.saturating_sub(self.upper)
    }

    /// Columns whose band reach stays inside the truncation.
    pub fn interior_cols(&self) -> std::ops::Range<usize> {
        0..self.n.saturating_sub(self.lower)
    }
}

impl Serialize for BandedOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Rows<'a>(&'a BandedOperator);
        impl Serialize for Rows<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let op = self.0;
                let mut seq = s.serialize_seq(Some(op.n))?;
                for i in 0..op.n {
                    let r = op.row_range(i);
                    let mut row: Vec<serde_json::Value> = vec![r.start.into()];
                    row.extend(r.map(|j| {
                        let v = op.get(i, j);
                        serde_json::json!([v.re, v.im])
                    }));
                    seq.serialize_element(&row)?;
                }
                seq.end()
            }
        }
        let mut st = s.serialize_struct("BandedOperator", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("lower", &self.lower)?;
        st.serialize_field("upper", &self.upper)?;
        st.serialize_field("rows", &Rows(self))?;
        st.end()
    }
}

fn block_permutation(r: usize, n: usize, band: usize, target: impl Fn(i32) -> i32) -> BandedOperator {
    let mut op = BandedOperator::zeros(n, band, band);
    let one = C64::new(1.0, 0.0);
    for i in 0..n {
        let (k, c) = (i / r, i % r);
        let kk = crate::cmv::cmv_index(target(cmv_exponent(k)));
        let j = kk * r + c;
        if j < n {
            op.set(i, j, one);
        }
    }
    op
}

/// Block `(k, k')` is `I_r` iff `e(k') = e(k) + 1`.
pub fn upsilon(r: usize, n: usize) -> BandedOperator {
    block_permutation(r, n, 2 * r, |e| e + 1)
}

/// Block `(k, k')` is `I_r` iff `e(k') = -e(k)`.
pub fn eta(r: usize, n: usize) -> BandedOperator {
    block_permutation(r, n, r, |e| -e)
}

/// Block `(k, k')` is `I_r` iff `e(k') = -e(k) - 1`.
pub fn nu(r: usize, n: usize) -> BandedOperator {
    block_permutation(r, n, r, |e| -e - 1)
}

/// Max entry deviation of two matrices over a row/column window.
pub fn window_deviation(a: &CMat, b: &CMat, rows: usize, cols: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..rows.min(a.nrows()) {
        for j in 0..cols.min(a.ncols()) {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct UpsilonFactorCheck {
    pub nu_eta: f64,
    pub eta_nu_transpose: f64,
    pub transpose_inverse: f64,
    pub eta_squared: f64,
    pub nu_squared: f64,
}

/// Residuals of `Υ = νη`, `Υᵀ = ην`, `ΥᵀΥ = I`, `η² = ν² = I` on interior rows.
pub fn factor_check_upsilon(r: usize, n: usize) -> UpsilonFactorCheck {
    let (u, e, v) = (upsilon(r, n).to_dense(), eta(r, n).to_dense(), nu(r, n).to_dense());
    let id = CMat::identity(n, n);
    let inner = n.saturating_sub(2 * r);
    UpsilonFactorCheck {
        nu_eta: window_deviation(&(&v * &e), &u, inner, n),
        eta_nu_transpose: window_deviation(&(&e * &v), &u.transpose(), inner, n),
        transpose_inverse: window_deviation(&(u.transpose() * &u), &id, inner, inner),
        eta_squared: window_deviation(&(&e * &e), &id, n - r, n),
        nu_squared: window_deviation(&(&v * &v), &id, n - r, n),
    }
}

/// `X · op · Y⁻¹` with `Y` unit lower triangular.
pub(crate) fn lower_form(x: &CMat, op: &CMat, y: &CMat) -> CMat {
    let xo = x * op;
    y.transpose()
        .solve_upper_triangular(&xo.transpose())
        .expect("unit diagonal")
        .transpose()
}

/// `P⁻¹ · op · Q` with `P` upper triangular.
fn upper_form(p: &CMat, op: &CMat, q: &CMat) -> CMat {
    p.solve_upper_triangular(&(op * q)).expect("nonzero pivots")
}

fn check_margin(f: &Factorization, n: usize, need: usize) -> Result<()> {
    if f.n < n + need {
        return Err(Error::MarginTooSmall { needed: n + need, have: f.n });
    }
    Ok(())
}

/// An operator computed in two ways, cut to the declared band.
#[derive(Clone, Debug, Serialize)]
pub struct TwoFormOperator {
    pub op: BandedOperator,
    /// Max entry difference between the lower-factor and upper-factor forms,
    /// relative to the largest entry.
    pub form_agreement: f64,
    /// Largest magnitude outside the band, relative to the largest entry.
    pub band_leak: f64,
}

#[allow(clippy::too_many_arguments)]
fn two_form(
    x: &CMat,
    op_q: &CMat,
    y: &CMat,
    p_: &CMat,
    op_p: &CMat,
    q_: &CMat,
    n: usize,
    lower: usize,
    upper: usize,
) -> TwoFormOperator {
    let a = lower_form(x, op_q, y).view((0, 0), (n, n)).into_owned();
    let b = upper_form(p_, op_p, q_).view((0, 0), (n, n)).into_owned();
    let scale = amax(&a).max(1.0);
    let (op, leak) = BandedOperator::from_dense(&a, lower, upper);
    TwoFormOperator {
        op,
        form_agreement: amax(&(&a - &b)) / scale,
        band_leak: leak / scale,
    }
}

/// `T = L Υ_[q] L⁻¹ = Ū⁻¹ Υ_[p] Ū`: `2p` sub-, `2q` superdiagonals.
pub fn recurrence_t(left: &Factorization, n: usize) -> Result<TwoFormOperator> {
    let (q, p, nn) = (left.q, left.p, left.n);
    check_margin(left, n, 2 * (p + q))?;
    Ok(two_form(
        &left.lower,
        &upsilon(q, nn).to_dense(),
        &left.lower,
        &left.upper,
        &upsilon(p, nn).to_dense(),
        &left.upper,
        n,
        2 * p,
        2 * q,
    ))
}

/// `𝓣 = 𝓛̄ Υ_[q]ᵀ 𝓛̄⁻¹ = 𝓤⁻¹ Υ_[p]ᵀ 𝓤`: `2p` sub-, `2q` superdiagonals.
pub fn recurrence_tscr(right: &Factorization, n: usize) -> Result<TwoFormOperator> {
    let (q, p, nn) = (right.q, right.p, right.n);
    check_margin(right, n, 2 * (p + q))?;
    Ok(two_form(
        &right.lower,
        &upsilon(q, nn).to_dense().transpose(),
        &right.lower,
        &right.upper,
        &upsilon(p, nn).to_dense().transpose(),
        &right.upper,
        n,
        2 * p,
        2 * q,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct SzegoMatrices {
    pub r: TwoFormOperator,
    pub s: TwoFormOperator,
    pub r_scr: TwoFormOperator,
    pub s_scr: TwoFormOperator,
}

/// `R = 𝓛̄ η L⁻¹`, `S = L ν 𝓛̄⁻¹`, `𝓡 = L η 𝓛̄⁻¹`, `𝓢 = 𝓛̄ ν L⁻¹`,
/// each cross-checked against its upper-factor form.
pub fn szego_matrices(pair: &FactorPair, n: usize) -> Result<SzegoMatrices> {
    let (l, r) = (&pair.left, &pair.right);
    if (l.q, l.p, l.n) != (r.q, r.p, r.n) {
        return Err(Error::ShapeMismatch("left/right factorizations differ".into()));
    }
    let (q, p, nn) = (l.q, l.p, l.n);
    check_margin(l, n, p + q)?;
    let (eq, ep) = (eta(q, nn).to_dense(), eta(p, nn).to_dense());
    let (vq, vp) = (nu(q, nn).to_dense(), nu(p, nn).to_dense());
    Ok(SzegoMatrices {
        r: two_form(&r.lower, &eq, &l.lower, &r.upper, &ep, &l.upper, n, p, q),
        s: two_form(&l.lower, &vq, &r.lower, &l.upper, &vp, &r.upper, n, p, q),
        r_scr: two_form(&l.lower, &eq, &r.lower, &l.upper, &ep, &r.upper, n, p, q),
        s_scr: two_form(&r.lower, &vq, &l.lower, &r.upper, &vp, &l.upper, n, p, q),
    })
}

/// Everything the recurrence checks need, built once at size `n + margin`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub pair: FactorPair,
    pub b: PolynomialFamily,
    /// `Ā(1/z)`.
    pub a_dual: PolynomialFamily,
    /// `𝓐̄(1/z)`.
    pub ascr_dual: PolynomialFamily,
    pub bscr: PolynomialFamily,
    pub t: TwoFormOperator,
    pub t_scr: TwoFormOperator,
    pub szego: SzegoMatrices,
}

impl SpectralData {
    pub fn new(mu: &MatrixFunctional, n: usize, margin: usize) -> Result<Self> {
        let (q, p) = (mu.q(), mu.p());
        if margin < 2 * (p + q) {
            return Err(Error::MarginTooSmall { needed: 2 * (p + q), have: margin });
        }
        Self::from_pair(FactorPair::new(mu, n + margin)?, n)
    }

    /// From factorizations of size at least `n + 2(p + q)`.
    pub fn from_pair(pair: FactorPair, n: usize) -> Result<Self> {
        let (q, p) = (pair.left.q, pair.left.p);
        Ok(Self {
            n,
            q,
            p,
            b: family_b(&pair.left),
            a_dual: family_a_dual(&pair.left),
            ascr_dual: family_ascr(&pair.right).conj_reflected(),
            bscr: family_bscr(&pair.right),
            t: recurrence_t(&pair.left, n)?,
            t_scr: recurrence_tscr(&pair.right, n)?,
            szego: szego_matrices(&pair, n)?,
            pair,
        })
    }
}

/// `op · V = rhs` on interior rows, relative to `Σ_j |op_ij||V_j|`.
pub fn row_action_residual(op: &BandedOperator, v: &CMat, rhs: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in op.interior_rows() {
        for c in 0..v.ncols() {
            let mut s = C64::default();
            let mut mag: f64 = 0.0;
            for j in op.row_range(i) {
                let t = op.get(i, j) * v[(j, c)];
                s += t;
                mag += t.norm();
            }
            let scale = mag.max(rhs[(i, c)].norm()).max(1.0);
            worst = worst.max((s - rhs[(i, c)]).norm() / scale);
        }
    }
    worst
}

/// `Vᵀ · op = rhsᵀ` on interior columns; `V` is stored as `n × components`.
pub fn col_action_residual(op: &BandedOperator, v: &CMat, rhs: &CMat) -> f64 {
    row_action_residual(&op.transpose(), v, rhs)
}

/// `X · Y = Z` on the interior rows of `X`, relative to `max(1, |X||Y|)`.
pub fn product_residual(x: &BandedOperator, y: &BandedOperator, z: &CMat) -> f64 {
    let (xd, yd) = (x.to_dense(), y.to_dense());
    let prod = &xd * &yd;
    let scale = (amax(&xd) * amax(&yd)).max(1.0);
    window_deviation(&prod, z, x.interior_rows().end, x.n()) / scale
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RecurrenceResiduals {
    pub t_b: f64,
    pub abar_t: f64,
    pub tscr_ascrbar: f64,
    pub bscr_tscr: f64,
    pub r_b: f64,
    pub s_ascrbar: f64,
    pub bscr_r: f64,
    pub abar_s: f64,
    pub t_eq_sr: f64,
    pub tscr_eq_rs: f64,
    pub s_sscr: f64,
    pub sscr_s: f64,
    pub r_rscr: f64,
    pub rscr_r: f64,
    pub t_forms: f64,
    pub band_leak: f64,
}

impl RecurrenceResiduals {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("TB=zB", self.t_b),
            ("AbarT=zAbar", self.abar_t),
            ("TscrAscrbar=zAscrbar", self.tscr_ascrbar),
            ("BscrTscr=zBscr", self.bscr_tscr),
            ("RB=Ascrbar", self.r_b),
            ("SAscrbar=zB", self.s_ascrbar),
            ("BscrR=Abar", self.bscr_r),
            ("AbarS=zBscr", self.abar_s),
            ("T=SR", self.t_eq_sr),
            ("Tscr=RS", self.tscr_eq_rs),
            ("SSscr=I", self.s_sscr),
            ("SscrS=I", self.sscr_s),
            ("RRscr=I", self.r_rscr),
            ("RscrR=I", self.rscr_r),
            ("two-form agreement", self.t_forms),
            ("band leak", self.band_leak),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().into_iter().map(|(_, v)| v).fold(0.0, f64::max)
    }
}

/// All recurrence identities at the given points.
pub fn recurrence_residuals(d: &SpectralData, zs: &[C64]) -> RecurrenceResiduals {
    let n = d.n;
    let sz = &d.szego;
    let mut out = RecurrenceResiduals::default();
    let upd = |slot: &mut f64, v: f64| *slot = slot.max(v);
    for &z in zs {
        let b = d.b.eval_matrix(n, z);
        let ad = d.a_dual.eval_matrix(n, z);
        let asd = d.ascr_dual.eval_matrix(n, z);
        let bs = d.bscr.eval_matrix(n, z);
        upd(&mut out.t_b, row_action_residual(&d.t.op, &b, &(&b * z)));
        upd(&mut out.abar_t, col_action_residual(&d.t.op, &ad, &(&ad * z)));
        upd(&mut out.tscr_ascrbar, row_action_residual(&d.t_scr.op, &asd, &(&asd * z)));
        upd(&mut out.bscr_tscr, col_action_residual(&d.t_scr.op, &bs, &(&bs * z)));
        upd(&mut out.r_b, row_action_residual(&sz.r.op, &b, &asd));
        upd(&mut out.s_ascrbar, row_action_residual(&sz.s.op, &asd, &(&b * z)));
        upd(&mut out.bscr_r, col_action_residual(&sz.r.op, &bs, &ad));
        upd(&mut out.abar_s, col_action_residual(&sz.s.op, &ad, &(&bs * z)));
    }
    let id = CMat::identity(n, n);
    out.t_eq_sr = product_residual(&sz.s.op, &sz.r.op, &d.t.op.to_dense());
    out.tscr_eq_rs = product_residual(&sz.r.op, &sz.s.op, &d.t_scr.op.to_dense());
    out.s_sscr = product_residual(&sz.s.op, &sz.s_scr.op, &id);
    out.sscr_s = product_residual(&sz.s_scr.op, &sz.s.op, &id);
    out.r_rscr = product_residual(&sz.r.op, &sz.r_scr.op, &id);
    out.rscr_r = product_residual(&sz.r_scr.op, &sz.r.op, &id);
    out.t_forms = [&d.t, &d.t_scr, &sz.r, &sz.s, &sz.r_scr, &sz.s_scr]
        .iter()
        .map(|o| o.form_agreement)
        .fold(0.0, f64::max);
    out.band_leak = [&d.t, &d.t_scr, &sz.r, &sz.s, &sz.r_scr, &sz.s_scr]
        .iter()
        .map(|o| o.band_leak)
        .fold(0.0, f64::max);
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EigenActionResiduals {
    pub upsilon: f64,
    pub eta: f64,
    pub nu: f64,
}

/// `ΥZ = zZ`, `ηZ(z) = Z(1/z)`, `νZ(z) = z⁻¹Z(1/z)` on interior rows.
pub fn eigen_action_residuals(r: usize, n: usize, zs: &[C64]) -> EigenActionResiduals {
    let mut out = EigenActionResiduals::default();
    let (u, e, v) = (upsilon(r, n), eta(r, n), nu(r, n));
    for &z in zs {
        let zz = crate::cmv::cmv_vector(r, n, z);
        let zi = crate::cmv::cmv_vector(r, n, z.inv());
        out.upsilon = out.upsilon.max(row_action_residual(&u, &zz, &(&zz * z)));
        out.eta = out.eta.max(row_action_residual(&e, &zz, &zi));
        out.nu = out.nu.max(row_action_residual(&v, &zz, &(&zi * z.inv())));
    }
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IntertwiningResiduals {
    pub upsilon: f64,
    pub upsilon_transpose: f64,
    pub eta: f64,
    pub nu: f64,
}

/// `Υ_[q]M = MΥ_[p]`, `Υ_[q]ᵀ𝓜 = 𝓜Υ_[p]ᵀ`, `η_[q]M = 𝓜η_[p]`, `ν_[q]M = 𝓜ν_[p]`,
/// relative to the largest moment.
pub fn intertwining_residuals(mu: &MatrixFunctional, n: usize) -> IntertwiningResiduals {
    use crate::cmv::{build_moment_matrix, Side};
    let (q, p) = (mu.q(), mu.p());
    let m = build_moment_matrix(mu, n, Side::Left).m;
    let ms = build_moment_matrix(mu, n, Side::Right).m;
    let scale = amax(&m).max(1.0);
    let (uq, up) = (upsilon(q, n).to_dense(), upsilon(p, n).to_dense());
    let (eq, ep) = (eta(q, n).to_dense(), eta(p, n).to_dense());
    let (vq, vp) = (nu(q, n).to_dense(), nu(p, n).to_dense());
    let (ri, ci) = (n - 2 * q, n - 2 * p);
    IntertwiningResiduals {
        upsilon: window_deviation(&(&uq * &m), &(&m * &up), ri, ci) / scale,
        upsilon_transpose: window_deviation(
            &(uq.transpose() * &ms),
            &(&ms * up.transpose()),
            ri,
            ci,
        ) / scale,
        eta: window_deviation(&(&eq * &m), &(&ms * &ep), n - q, n - p) / scale,
        nu: window_deviation(&(&vq * &m), &(&ms * &vp), n - q, n - p) / scale,
    }
}

fn block(m: &CMat, r0: usize, c0: usize, rows: usize, cols: usize) -> CMat {
    m.view((r0, c0), (rows, cols)).into_owned()
}

fn inv(m: &CMat) -> CMat {
    m.clone().try_inverse().expect("nonsingular block")
}

fn assemble(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let (r, s) = (a.nrows(), a.ncols());
    let mut m = CMat::zeros(r + c.nrows(), s + b.ncols());
    m.view_mut((0, 0), (r, s)).copy_from(a);
    m.view_mut((0, s), (r, b.ncols())).copy_from(b);
    m.view_mut((r, 0), (c.nrows(), s)).copy_from(c);
    m.view_mut((r, s), (d.nrows(), d.ncols())).copy_from(d);
    m
}

/// Block data of the four triangular factors and the derived 2-block
/// matrices `𝕃_n` (from the lower factors) and `𝕌_n` (from the upper ones).
#[derive(Clone, Debug)]
pub struct BlockLadder {
    pub q: usize,
    pub p: usize,
    /// Diagonal `q×q` blocks `L_n` of `L`.
    pub l_diag: Vec<CMat>,
    /// `l_n = L_{n+1}⁻¹ L_{[n+1, n]}`.
    pub l_sub: Vec<CMat>,
    /// Diagonal blocks of `𝓛̄`.
    pub lscr_bar_diag: Vec<CMat>,
    /// `𝓵̄_n`.
    pub lscr_bar_sub: Vec<CMat>,
    /// Diagonal `p×p` blocks `Ū_n` of `Ū`.
    pub ubar_diag: Vec<CMat>,
    /// `ū_n = Ū_{[n, n+1]} Ū_{n+1}⁻¹`.
    pub ubar_sup: Vec<CMat>,
    pub uscr_diag: Vec<CMat>,
    pub uscr_sup: Vec<CMat>,
}

impl BlockLadder {
    pub fn new(pair: &FactorPair) -> Result<Self> {
        let (l, r) = (&pair.left, &pair.right);
        if (l.q, l.p, l.n) != (r.q, r.p, r.n) {
            return Err(Error::ShapeMismatch("left/right factorizations differ".into()));
        }
        let (q, p, n) = (l.q, l.p, l.n);
        let lower_blocks = |m: &CMat| {
            let nb = n / q;
            let diag: Vec<CMat> = (0..nb).map(|k| block(m, k * q, k * q, q, q)).collect();
            let sub: Vec<CMat> = (0..nb.saturating_sub(1))
                .map(|k| inv(&diag[k + 1]) * block(m, (k + 1) * q, k * q, q, q))
                .collect();
            (diag, sub)
        };
        let upper_blocks = |m: &CMat| {
            let nb = n / p;
            let diag: Vec<CMat> = (0..nb).map(|k| block(m, k * p, k * p, p, p)).collect();
            let sup: Vec<CMat> = (0..nb.saturating_sub(1))
                .map(|k| block(m, k * p, (k + 1) * p, p, p) * inv(&diag[k + 1]))
                .collect();
            (diag, sup)
        };
        let (l_diag, l_sub) = lower_blocks(&l.lower);
        let (lscr_bar_diag, lscr_bar_sub) = lower_blocks(&r.lower);
        let (ubar_diag, ubar_sup) = upper_blocks(&l.upper);
        let (uscr_diag, uscr_sup) = upper_blocks(&r.upper);
        Ok(Self {
            q,
            p,
            l_diag,
            l_sub,
            lscr_bar_diag,
            lscr_bar_sub,
            ubar_diag,
            ubar_sup,
            uscr_diag,
            uscr_sup,
        })
    }

    /// Number of `𝕃_n` available (`n ≥ 0`).
    pub fn len_l(&self) -> usize {
        self.l_sub.len()
    }

    pub fn len_u(&self) -> usize {
        self.ubar_sup.len()
    }

    /// `𝕃_n` for `n ≥ 0`; `n = -1` gives the `q×q` corner `𝓛̄_0 L_0⁻¹`.
    pub fn ll(&self, n: isize) -> CMat {
        if n < 0 {
            return &self.lscr_bar_diag[0] * inv(&self.l_diag[0]);
        }
        let n = n as usize;
        let (a, bb) = (&self.lscr_bar_diag[n], &self.l_diag[n]);
        let (c, d) = (&self.l_diag[n + 1], &self.lscr_bar_diag[n + 1]);
        let (l, m) = (&self.l_sub[n], &self.lscr_bar_sub[n]);
        let id = CMat::identity(self.q, self.q);
        assemble(
            &(-(a * l * inv(bb))),
            &(a * inv(c)),
            &(d * (&id - m * l) * inv(bb)),
            &(d * m * inv(c)),
        )
    }

    /// The explicit inverse of `𝕃_n`.
    pub fn ll_inv(&self, n: isize) -> CMat {
        if n < 0 {
            return &self.l_diag[0] * inv(&self.lscr_bar_diag[0]);
        }
        let n = n as usize;
        let (a, bb) = (&self.lscr_bar_diag[n], &self.l_diag[n]);
        let (c, d) = (&self.l_diag[n + 1], &self.lscr_bar_diag[n + 1]);
        let (l, m) = (&self.l_sub[n], &self.lscr_bar_sub[n]);
        let id = CMat::identity(self.q, self.q);
        assemble(
            &(-(bb * m * inv(a))),
            &(bb * inv(d)),
            &(c * (&id - l * m) * inv(a)),
            &(c * l * inv(d)),
        )
    }

    /// `𝕌_n`; `n = -1` gives the `p×p` corner `𝓤_0⁻¹ Ū_0`.
    pub fn uu(&self, n: isize) -> CMat {
        if n < 0 {
            return inv(&self.uscr_diag[0]) * &self.ubar_diag[0];
        }
        let n = n as usize;
        let (ub0, ub1) = (&self.ubar_diag[n], &self.ubar_diag[n + 1]);
        let (us0, us1) = (&self.uscr_diag[n], &self.uscr_diag[n + 1]);
        let (ubs, uss) = (&self.ubar_sup[n], &self.uscr_sup[n]);
        let id = CMat::identity(self.p, self.p);
        assemble(
            &(-(inv(us0) * uss * ub0)),
            &(inv(us0) * (&id - uss * ubs) * ub1),
            &(inv(us1) * ub0),
            &(inv(us1) * ubs * ub1),
        )
    }

    pub fn uu_inv(&self, n: isize) -> CMat {
        if n < 0 {
            return inv(&self.ubar_diag[0]) * &self.uscr_diag[0];
        }
        let n = n as usize;
        let (ub0, ub1) = (&self.ubar_diag[n], &self.ubar_diag[n + 1]);
        let (us0, us1) = (&self.uscr_diag[n], &self.uscr_diag[n + 1]);
        let (ubs, uss) = (&self.ubar_sup[n], &self.uscr_sup[n]);
        let id = CMat::identity(self.p, self.p);
        assemble(
            &(-(inv(ub0) * ubs * us0)),
            &(inv(ub0) * (&id - ubs * uss) * us1),
            &(inv(ub1) * us0),
            &(inv(ub1) * uss * us1),
        )
    }

    /// Max deviation of `𝕃_n · 𝕃_n⁻¹` and `𝕌_n · 𝕌_n⁻¹` from the identity.
    pub fn inverse_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in -1..self.len_l() as isize {
            let m = self.ll(n) * self.ll_inv(n);
            worst = worst.max(amax(&(&m - CMat::identity(m.nrows(), m.nrows()))));
        }
        for n in -1..self.len_u() as isize {
            let m = self.uu(n) * self.uu_inv(n);
            worst = worst.max(amax(&(&m - CMat::identity(m.nrows(), m.nrows()))));
        }
        worst
    }
}

/// Block-staircase check: `op` cut into blocks of sizes `first, 2r, 2r, …`
/// must have the given diagonal blocks and vanish strictly above
/// (`lower_tri`) or below the block diagonal.
fn stairs_deviation(op: &CMat, r: usize, first: usize, diag: &dyn Fn(usize) -> CMat, lower_tri: bool) -> f64 {
    let n = op.nrows();
    let mut starts = vec![];
    if first > 0 {
        starts.push(0);
    }
    let mut s = first;
    while s + 2 * r <= n {
        starts.push(s);
        s += 2 * r;
    }
    let mut worst: f64 = 0.0;
    for (bi, &s0) in starts.iter().enumerate() {
        let size = if bi == 0 && first > 0 { first } else { 2 * r };
        let d = diag(bi);
        worst = worst.max(amax(&(block(op, s0, s0, size, size) - d)));
        // forbidden strip beside the diagonal block, inside the truncation
        for i in s0..s0 + size {
            let range = if lower_tri { s0 + size..n } else { 0..s0 };
            for j in range {
                worst = worst.max(op[(i, j)].norm());
            }
        }
    }
    worst
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StairsResiduals {
    pub r: f64,
    pub s: f64,
    pub r_scr: f64,
    pub s_scr: f64,
}

impl StairsResiduals {
    pub fn max(&self) -> f64 {
        self.r.max(self.s).max(self.r_scr).max(self.s_scr)
    }
}

/// Diagonal blocks of `R, S, 𝓡, 𝓢` in both the `q`- and the `p`-blocking.
pub fn stairs_residuals(ladder: &BlockLadder, sz: &SzegoMatrices) -> StairsResiduals {
    let (q, p) = (ladder.q, ladder.p);
    let lim_l = ladder.len_l() as isize;
    let lim_u = ladder.len_u() as isize;
    let pick = |f: &dyn Fn(isize) -> CMat, k: isize, lim: isize, size: usize| {
        if k < lim {
            f(k)
        } else {
            CMat::zeros(size, size)
        }
    };
    let check = |op: &BandedOperator, odd: bool, l_f: &dyn Fn(isize) -> CMat, u_f: &dyn Fn(isize) -> CMat| {
        let m = op.to_dense();
        let n = m.nrows();
        // cut to whole blocks on both sides so every diagonal block exists
        let nl = if odd { q + ((n - q) / (2 * q)) * 2 * q } else { (n / (2 * q)) * 2 * q };
        let nu_ = if odd { p + ((n - p) / (2 * p)) * 2 * p } else { (n / (2 * p)) * 2 * p };
        let cut = nl.min(nu_).min(n - 2 * q.max(p));
        let m = block(&m, 0, 0, cut, cut);
        let (fq, fp) = if odd { (q, p) } else { (0, 0) };
        let dl = |bi: usize| {
            let k = if odd { 2 * bi as isize - 1 } else { 2 * bi as isize };
            let size = if odd && bi == 0 { q } else { 2 * q };
            pick(l_f, k, lim_l, size)
        };
        let du = |bi: usize| {
            let k = if odd { 2 * bi as isize - 1 } else { 2 * bi as isize };
            let size = if odd && bi == 0 { p } else { 2 * p };
            pick(u_f, k, lim_u, size)
        };
        stairs_deviation(&m, q, fq, &dl, true).max(stairs_deviation(&m, p, fp, &du, false))
    };
    StairsResiduals {
        r: check(&sz.r.op, true, &|k| ladder.ll(k), &|k| ladder.uu(k)),
        r_scr: check(&sz.r_scr.op, true, &|k| ladder.ll_inv(k), &|k| ladder.uu_inv(k)),
        s: check(&sz.s.op, false, &|k| ladder.ll_inv(k), &|k| ladder.uu_inv(k)),
        s_scr: check(&sz.s_scr.op, false, &|k| ladder.ll(k), &|k| ladder.uu(k)),
    }
}

fn require_real_scalar(mu: &MatrixFunctional, range: i32) -> Result<()> {
    if mu.q() != 1 || mu.p() != 1 {
        return Err(Error::NotScalar);
    }
    let defect = mu.reality_defect(range);
    if defect >= 1e-12 {
        return Err(Error::NotReal(defect));
    }
    Ok(())
}

/// Recurrence coefficients `a_k` with `Φ_{k+1} = zΦ_k + a_k Φ*_k`.
///
/// `a_k = conj(l_k)` for even `k` and `l_k` for odd `k`, where `l_k` is the
/// first subdiagonal of `L`.
pub fn verblunsky(mu: &MatrixFunctional, ladder: &BlockLadder, count: usize) -> Result<Vec<C64>> {
    require_real_scalar(mu, 2 * ladder.l_diag.len() as i32 + mu.ac_degree())?;
    if count > ladder.l_sub.len() {
        return Err(Error::WindowOutOfRange { index: count, lo: 0, hi: ladder.l_sub.len() });
    }
    Ok((0..count)
        .map(|k| {
            let l = ladder.l_sub[k][(0, 0)];
            if k % 2 == 0 {
                l.conj()
            } else {
                l
            }
        })
        .collect())
}

/// Monic `Φ_k` and reversed `Φ*_k = z^k conj(Φ_k)(1/z)` for `k < count`,
/// read off the scalar `B` family.
pub fn szego_phi(b: &PolynomialFamily, ladder: &BlockLadder, count: usize) -> Result<(Vec<LaurentPolynomial>, Vec<LaurentPolynomial>)> {
    if b.components != 1 || ladder.q != 1 {
        return Err(Error::NotScalar);
    }
    let mut phi = Vec::with_capacity(count);
    let mut star = Vec::with_capacity(count);
    for k in 0..count {
        let h = (k / 2) as i32;
        let lk = ladder.l_diag[k][(0, 0)];
        let p = if k % 2 == 0 {
            b.get(k, 0).scale(lk.inv()).shift(h)
        } else {
            b.get(k, 0).conj_reflect().scale(lk.conj().inv()).shift(h)
        };
        star.push(p.conj_reflect().shift(k as i32));
        phi.push(p);
    }
    Ok((phi, star))
}

/// Max coefficient residual of both Szegő recurrences.
pub fn szego_recurrence_residual(phi: &[LaurentPolynomial], star: &[LaurentPolynomial], alpha: &[C64]) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..alpha.len().min(phi.len().saturating_sub(1)) {
        let a = alpha[k];
        let lhs = &phi[k].shift(1) + &star[k].scale(a);
        let lhs_s = &phi[k].shift(1).scale(a.conj()) + &star[k];
        worst = worst.max(lhs.distance(&phi[k + 1])).max(lhs_s.distance(&star[k + 1]));
    }
    worst
}

/// `r×r` block `m` of a row-type (`B`, `𝓐`) family: entry `(i, c)` is
/// member `m r + i`, component `c`.
fn row_block(f: &PolynomialFamily, m: usize, r: usize) -> LaurentPolyMatrix {
    let mut out = LaurentPolyMatrix::zeros(r, r);
    for i in 0..r {
        for c in 0..r {
            out.set(i, c, f.get(m * r + i, c).clone());
        }
    }
    out
}

/// Column-type (`A`, `𝓑`) block: entry `(c, i)` is member `m r + i`.
fn col_block(f: &PolynomialFamily, m: usize, r: usize) -> LaurentPolyMatrix {
    let mut out = LaurentPolyMatrix::zeros(r, r);
    for i in 0..r {
        for c in 0..r {
            out.set(c, i, f.get(m * r + i, c).clone());
        }
    }
    out
}

fn const_times(c: &CMat, pm: &LaurentPolyMatrix, left: bool, shift: i32) -> LaurentPolyMatrix {
    let r = pm.rows();
    let mut out = LaurentPolyMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            let mut acc = LaurentPolynomial::zero();
            for k in 0..r {
                let term = if left {
                    pm.get(k, j).scale(c[(i, k)])
                } else {
                    pm.get(i, k).scale(c[(k, j)])
                };
                acc = &acc + &term;
            }
            out.set(i, j, acc.shift(shift));
        }
    }
    out
}

/// Matrix Szegő polynomials. Even entries hold `Q_{2n}`, odd entries the
/// reversed `Q*_{2n+1}`; likewise for the other three sequences.
#[derive(Clone, Debug)]
pub struct SzegoBlockPolynomials {
    pub q: Vec<LaurentPolyMatrix>,
    pub p: Vec<LaurentPolyMatrix>,
    pub q_scr: Vec<LaurentPolyMatrix>,
    pub p_scr: Vec<LaurentPolyMatrix>,
}

/// `Q_{2n} = zⁿ L_{2n}⁻¹ B_{2n}`, `Q*_{2n+1} = z^{n+1} 𝓛_{2n+1}⁻¹ 𝓐_{2n+1}`,
/// `P_{2n} = zⁿ A_{2n} U_{2n}⁻¹`, `P*_{2n+1} = z^{n+1} 𝓑_{2n+1} 𝓤_{2n+1}⁻¹`,
/// `𝓠_{2n} = zⁿ 𝓑_{2n} 𝓤_{2n}⁻¹`, `𝓠*_{2n+1} = z^{n+1} A_{2n+1} U_{2n+1}⁻¹`,
/// `𝓟_{2n} = zⁿ 𝓛_{2n}⁻¹ 𝓐_{2n}`, `𝓟*_{2n+1} = z^{n+1} L_{2n+1}⁻¹ B_{2n+1}`.
pub fn szego_block_polynomials(pair: &FactorPair, ladder: &BlockLadder, count: usize) -> SzegoBlockPolynomials {
    let (q, p) = (ladder.q, ladder.p);
    let b = family_b(&pair.left);
    let a = crate::cmv::family_a(&pair.left);
    let as_ = family_ascr(&pair.right);
    let bs = family_bscr(&pair.right);
    let conj = |m: &CMat| m.map(|c| c.conj());
    let mut out = SzegoBlockPolynomials { q: vec![], p: vec![], q_scr: vec![], p_scr: vec![] };
    for k in 0..count {
        let h = (k / 2) as i32;
        let sh = if k % 2 == 0 { h } else { h + 1 };
        let l_k = &ladder.l_diag[k];
        let lscr_k = conj(&ladder.lscr_bar_diag[k]);
        let u_k = conj(&ladder.ubar_diag[k]);
        let uscr_k = &ladder.uscr_diag[k];
        if k % 2 == 0 {
            out.q.push(const_times(&inv(l_k), &row_block(&b, k, q), true, sh));
            out.p.push(const_times(&inv(&u_k), &col_block(&a, k, p), false, sh));
            out.q_scr.push(const_times(&inv(uscr_k), &col_block(&bs, k, p), false, sh));
            out.p_scr.push(const_times(&inv(&lscr_k), &row_block(&as_, k, q), true, sh));
        } else {
            out.q.push(const_times(&inv(&lscr_k), &row_block(&as_, k, q), true, sh));
            out.p.push(const_times(&inv(uscr_k), &col_block(&bs, k, p), false, sh));
            out.q_scr.push(const_times(&inv(&u_k), &col_block(&a, k, p), false, sh));
            out.p_scr.push(const_times(&inv(l_k), &row_block(&b, k, q), true, sh));
        }
    }
    out
}

/// Deviation from monicity: for even `k` the `z^k` coefficient must be `I`
/// and no negative powers appear; for odd `k` the constant term is `I` and
/// the degree is at most `k`.
pub fn monic_defect(seq: &[LaurentPolyMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, m) in seq.iter().enumerate() {
        let r = m.rows();
        let id = CMat::identity(r, r);
        let lead = if k % 2 == 0 { m.coeff(k as i32) } else { m.coeff(0) };
        worst = worst.max(amax(&(lead - id)));
        for e in m.deg_minus()..=m.deg_plus() {
            if e < 0 || e > k as i32 {
                worst = worst.max(amax(&m.coeff(e)));
            }
        }
    }
    worst
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TwoMeasureResiduals {
    pub b_even: f64,
    pub b_odd: f64,
    pub a_even: f64,
    pub a_odd: f64,
    pub u_consistency: f64,
    pub u_involution: f64,
    pub quad_structure: f64,
}

impl TwoMeasureResiduals {
    pub fn max(&self) -> f64 {
        [
            self.b_even,
            self.b_odd,
            self.a_even,
            self.a_odd,
            self.u_consistency,
            self.u_involution,
            self.quad_structure,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Real `q = 1, p = 2` case. With `𝔹_{2m} = [B_{2m}; B_{2m+1}]`,
/// `𝔸_{2m} = [A_{2m}, A_{2m+1}]` and `X_n = Ū_{2n+1}⁻¹ U_{2n}`:
///
/// `𝕃̄_{4n} 𝔹̄_{4n}(1/z) = z 𝔹_{4n}(z)`,
/// `X_n 𝔹̄_{4n}(1/z) + 𝕃̄_{4n+2} 𝔹̄_{4n+2}(1/z) = z 𝔹_{4n+2}(z)`,
/// `𝔸̄_{4n}(1/z) 𝕃̄_{4n} + 𝔸̄_{4n+2}(1/z) X_n = z 𝔸_{4n}(z)`,
/// `𝔸̄_{4n+2}(1/z) 𝕃̄_{4n+2} = z 𝔸_{4n+2}(z)`,
/// and `u_{2n} = -U_{2n} 𝕃_{4n} Ū_{2n}⁻¹ = Ū_{2n+1} 𝕃̄_{4n+2} U_{2n+1}⁻¹`
/// with `ū_{2n} u_{2n} = I`.
pub fn two_measure_recurrence_check(d: &SpectralData, mu: &MatrixFunctional, zs: &[C64]) -> Result<TwoMeasureResiduals> {
    if (d.q, d.p) != (1, 2) {
        return Err(Error::ShapeMismatch(format!("need q=1, p=2; have q={}, p={}", d.q, d.p)));
    }
    let defect = mu.reality_defect(d.pair.left.n as i32 + mu.ac_degree());
    if defect >= 1e-12 {
        return Err(Error::NotReal(defect));
    }
    let ladder = BlockLadder::new(&d.pair)?;
    let conj = |m: &CMat| m.map(|c| c.conj());
    let b = &d.b;
    let a = crate::cmv::family_a(&d.pair.left);
    let quads = d.n.saturating_sub(8) / 4;
    let mut out = TwoMeasureResiduals::default();
    let s = d.szego.s.op.to_dense();
    for nq in 0..quads {
        let (i0, i2) = (4 * nq, 4 * nq + 2);
        let l0b = conj(&ladder.ll(i0 as isize));
        let l2b = conj(&ladder.ll(i2 as isize));
        let u_k = conj(&ladder.ubar_diag[2 * nq]);
        let u_k1 = conj(&ladder.ubar_diag[2 * nq + 1]);
        let x = inv(&ladder.ubar_diag[2 * nq + 1]) * &u_k;
        // S restricted to the quad is block lower with these blocks
        let quad = block(&s, i0, i0, 4, 4);
        let want = assemble(&l0b, &CMat::zeros(2, 2), &x, &l2b);
        let mut qs = amax(&(quad - want));
        for i in i0..i0 + 4 {
            for j in (0..i0).chain(i0 + 4..s.ncols()) {
                qs = qs.max(s[(i, j)].norm());
            }
        }
        out.quad_structure = out.quad_structure.max(qs);
        let u_from_l0 = -(&u_k * ladder.ll(i0 as isize) * inv(&ladder.ubar_diag[2 * nq]));
        let u_from_l2 = &ladder.ubar_diag[2 * nq + 1] * &l2b * inv(&u_k1);
        let u_direct = conj(&ladder.ubar_sup[2 * nq]);
        out.u_consistency = out
            .u_consistency
            .max(amax(&(&u_from_l0 - &u_from_l2)))
            .max(amax(&(&u_from_l0 - &u_direct)));
        out.u_involution = out
            .u_involution
            .max(amax(&(&ladder.ubar_sup[2 * nq] * &u_direct - CMat::identity(2, 2))));
        for &z in zs {
            let bb = |m: usize| DMatrix::from_fn(2, 1, |i, _| b.get(m + i, 0).eval_unchecked(z));
            let bbar = |m: usize| DMatrix::from_fn(2, 1, |i, _| b.get(m + i, 0).conj_reflect().eval_unchecked(z));
            let aa = |m: usize| DMatrix::from_fn(2, 2, |r, c| a.get(m + c, r).eval_unchecked(z));
            let abar = |m: usize| DMatrix::from_fn(2, 2, |r, c| a.get(m + c, r).conj_reflect().eval_unchecked(z));
            let rel = |lhs: CMat, rhs: CMat| amax(&(&lhs - &rhs)) / amax(&rhs).max(1.0);
            out.b_even = out.b_even.max(rel(&l0b * bbar(i0), bb(i0) * z));
            out.b_odd = out.b_odd.max(rel(&x * bbar(i0) + &l2b * bbar(i2), bb(i2) * z));
            out.a_even = out.a_even.max(rel(abar(i0) * &l0b + abar(i2) * &x, aa(i0) * z));
            out.a_odd = out.a_odd.max(rel(abar(i2) * &l2b, aa(i2) * z));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::ScalarFunctional;

    fn cosine() -> MatrixFunctional {
        MatrixFunctional::scalar(ScalarFunctional::weight(LaurentPolynomial::from_real_slice(
            -1,
            &[0.5, 1.0, 0.5],
        )))
    }

    #[test]
    fn upsilon_pattern_scalar() {
        let u = upsilon(1, 8);
        assert_eq!(u.get(0, 2), C64::new(1.0, 0.0));
        assert_eq!(u.get(1, 0), C64::new(1.0, 0.0));
        assert_eq!(u.get(2, 4), C64::new(1.0, 0.0));
        assert_eq!(u.get(3, 1), C64::new(1.0, 0.0));
        assert_eq!(u.get(0, 1), C64::default());
    }

    #[test]
    fn permutation_factorization_is_exact() {
        for (r, n) in [(1, 12), (2, 16), (3, 18)] {
            let c = factor_check_upsilon(r, n);
            assert_eq!(c.nu_eta, 0.0);
            assert_eq!(c.eta_nu_transpose, 0.0);
            assert_eq!(c.transpose_inverse, 0.0);
            assert_eq!(c.eta_squared, 0.0);
            assert_eq!(c.nu_squared, 0.0);
        }
    }

    #[test]
    fn lebesgue_t_is_upsilon() {
        let d = SpectralData::new(&MatrixFunctional::lebesgue(), 12, 4).unwrap();
        assert_eq!(d.t.op.to_dense(), upsilon(1, 12).to_dense());
        assert_eq!(d.szego.r.op.to_dense(), eta(1, 12).to_dense());
        assert_eq!(d.szego.s.op.to_dense(), nu(1, 12).to_dense());
    }

    #[test]
    fn margin_is_enforced() {
        assert!(matches!(
            SpectralData::new(&MatrixFunctional::lebesgue(), 12, 3),
            Err(Error::MarginTooSmall { .. })
        ));
    }

    #[test]
    fn cosine_ladder() {
        let pair = FactorPair::new(&cosine(), 10).unwrap();
        let ladder = BlockLadder::new(&pair).unwrap();
        assert!((ladder.l_sub[0][(0, 0)] + 0.5).norm() < 1e-15);
        assert!(ladder.inverse_residual() < 1e-12);
        let alpha = verblunsky(&cosine(), &ladder, 3).unwrap();
        assert!((alpha[0] + 0.5).norm() < 1e-15);
        let (phi, _) = szego_phi(&family_b(&pair.left), &ladder, 3).unwrap();
        assert!(phi[1].distance(&LaurentPolynomial::from_real_slice(0, &[-0.5, 1.0])) < 1e-15);
    }

    #[test]
    fn cosine_coefficients_frozen() {
        // independent Toeplitz solve gives a_k = (-1)^{k+1}/(k+2)
        let pair = FactorPair::new(&cosine(), 20).unwrap();
        let ladder = BlockLadder::new(&pair).unwrap();
        let alpha = verblunsky(&cosine(), &ladder, 8).unwrap();
        let frozen = [-1.0 / 2.0, 1.0 / 3.0, -1.0 / 4.0, 1.0 / 5.0, -1.0 / 6.0, 1.0 / 7.0, -1.0 / 8.0, 1.0 / 9.0];
        for (a, f) in alpha.iter().zip(frozen) {
            assert!((a - C64::new(f, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn lebesgue_ladder_is_antidiagonal() {
        let pair = FactorPair::new(&MatrixFunctional::lebesgue(), 8).unwrap();
        let ladder = BlockLadder::new(&pair).unwrap();
        let swap = CMat::from_row_slice(2, 2, &[C64::default(), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::default()]);
        for n in 0..ladder.len_l() as isize {
            assert_eq!(ladder.ll(n), swap);
        }
    }

    #[test]
    fn banded_json_shape() {
        let v = serde_json::to_value(upsilon(1, 3)).unwrap();
        assert_eq!(v["lower"], 2);
        assert_eq!(v["rows"][0][0], 0);
        assert_eq!(v["rows"][2][0], 0);
    }
}
