//! One function per subcommand. Each returns serializable data plus the
//! residual checks it ran; `verify` concatenates the checks of the others.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;

use super::config::{c64, ConfigError, RunConfig, Tolerances};
use crate::cmv::{
    build_moment_matrix, check_degrees, family_a, family_a_dual, family_ascr, family_b, family_bscr, gauss_borel,
    biorthogonality_residual, FactorPair, Factorization, PolynomialFamily, Side,
};
use crate::error::Error;
use crate::kernels::{abc_kernel, kernel_cd_formula, kernel_direct, relative_deviation, reproducing_check, KernelEvaluation};
use crate::measures::MatrixFunctional;
use crate::random::{rng, unit_point};
use crate::secondkind::{second_kind, SecondKindEvaluation};
use crate::spectral::{
    intertwining_residuals, recurrence_residuals, recurrence_t, stairs_residuals, szego_block_polynomials, szego_phi,
    szego_recurrence_residual, two_measure_recurrence_check, verblunsky, monic_defect, BlockLadder, SpectralData,
};
use crate::transforms::{christoffel_oracle, geronimus_oracle, ChristoffelOracle, GeronimusOracle, PerturbationMatrix};

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Numeric(Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Numeric(e) => write!(f, "{e}"),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

#[derive(Default)]
pub struct Checks {
    pub list: Vec<Check>,
    pub skipped: Vec<Skipped>,
}

impl Checks {
    fn push(&mut self, tol: &Tolerances, class: &str, name: impl Into<String>, residual: f64) {
        let tolerance = tol.get(class);
        // NaN fails
        let pass = residual <= tolerance;
        self.list.push(Check { name: name.into(), residual, tolerance, pass });
    }

    fn skip(&mut self, name: &str, reason: impl std::fmt::Display) {
        self.skipped.push(Skipped { name: name.into(), reason: reason.to_string() });
    }

    fn extend(&mut self, other: Checks) {
        self.list.extend(other.list);
        self.skipped.extend(other.skipped);
    }
}

/// Everything resolved from flags and config.
pub struct Context {
    pub cfg: RunConfig,
    pub mu: MatrixFunctional,
    pub n: usize,
    pub margin: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Context {
    pub fn new(
        cfg: RunConfig,
        n: Option<usize>,
        margin: Option<usize>,
        seed: Option<u64>,
        overrides: &[String],
    ) -> Result<Self, ConfigError> {
        let seed = seed.or(cfg.seed).unwrap_or(0);
        let mu = cfg.build_measure(seed)?;
        let (q, p) = (mu.q(), mu.p());
        let n = n.or(cfg.n).unwrap_or(20);
        if n == 0 {
            return Err(ConfigError("n must be at least 1".into()));
        }
        let margin = margin.or(cfg.margin).unwrap_or(2 * (p + q) + 4);
        if margin < 2 * (p + q) {
            return Err(ConfigError(format!("margin {margin} below 2(p+q) = {}", 2 * (p + q))));
        }
        let mut tol = Tolerances::default();
        for (k, v) in &cfg.tolerances {
            tol.set(k, *v)?;
        }
        for o in overrides {
            tol.apply_override(o)?;
        }
        Ok(Self { cfg, mu, n, margin, seed, tol })
    }

    fn point_rng(&self) -> rand_chacha::ChaCha8Rng {
        rng(self.seed ^ 0x9e37_79b9_7f4a_7c15)
    }

    /// Configured points, else `count` seeded unit points scaled by `radius`.
    fn points(&self, count: usize, radius: f64) -> Vec<C64> {
        if !self.cfg.points.is_empty() {
            return self.cfg.points.iter().copied().map(c64).collect();
        }
        let mut r = self.point_rng();
        (0..count).map(|_| unit_point(&mut r) * radius).collect()
    }

    fn pairs(&self, count: usize) -> Vec<(C64, C64)> {
        if !self.cfg.pairs.is_empty() {
            return self.cfg.pairs.iter().map(|[x, y]| (c64(*x), c64(*y))).collect();
        }
        let mut r = self.point_rng();
        (0..count).map(|_| (unit_point(&mut r), unit_point(&mut r))).collect()
    }

    /// Off-circle points for Cauchy transforms: alternating radius 2 and 1/2.
    fn cauchy_points(&self, count: usize) -> Vec<C64> {
        if !self.cfg.points.is_empty() {
            return self.cfg.points.iter().copied().map(c64).collect();
        }
        let mut r = self.point_rng();
        (0..count)
            .map(|k| {
                let rad = if k % 2 == 0 { 2.0 } else { 0.5 };
                C64::from_polar(rad, r.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect()
    }

    /// Factor pair of size `size`, with the configured injection applied to
    /// the left moment matrix.
    pub fn factor_pair(&self, size: usize) -> Outcome<FactorPair> {
        let Some(inj) = self.cfg.inject else {
            return Ok(FactorPair::new(&self.mu, size)?);
        };
        let mut t = build_moment_matrix(&self.mu, size, Side::Left);
        if inj.row >= size || inj.col >= size {
            return Err(ConfigError(format!("inject: ({}, {}) outside the {size}x{size} truncation", inj.row, inj.col)).into());
        }
        t.m[(inj.row, inj.col)] += c64(inj.delta);
        Ok(FactorPair {
            left: gauss_borel(&t)?,
            right: gauss_borel(&build_moment_matrix(&self.mu, size, Side::Right))?,
        })
    }

    pub fn perturbation(&self) -> Outcome<(PerturbationMatrix, &super::config::PerturbationSpec)> {
        let spec = self
            .cfg
            .perturbation
            .as_ref()
            .ok_or_else(|| ConfigError("config has no `perturbation`".into()))?;
        if spec.entries.len() != self.mu.q() {
            return Err(ConfigError(format!(
                "perturbation has {} entries, the measure has {} rows",
                spec.entries.len(),
                self.mu.q()
            ))
            .into());
        }
        Ok((spec.build()?, spec))
    }
}

// ---- moments

#[derive(Serialize)]
pub struct MomentStream {
    pub row: usize,
    pub col: usize,
    /// `[k, re, im]` for nonzero `c_k`.
    pub moments: Vec<(i32, f64, f64)>,
}

#[derive(Serialize)]
pub struct MomentTable {
    pub q: usize,
    pub p: usize,
    pub bound: i32,
    pub streams: Vec<MomentStream>,
}

pub fn moments(ctx: &Context) -> Outcome<MomentTable> {
    let bound = ctx.cfg.moment_bound.unwrap_or(ctx.n as i32);
    if bound < 0 {
        return Err(ConfigError("moment_bound must be non-negative".into()).into());
    }
    let mu = &ctx.mu;
    let mut streams = Vec::new();
    for row in 0..mu.q() {
        for col in 0..mu.p() {
            let f = mu.get(row, col);
            let moments = (-bound..=bound)
                .map(|k| (k, f.moment(k)))
                .filter(|(_, c)| *c != C64::default())
                .map(|(k, c)| (k, c.re, c.im))
                .collect();
            streams.push(MomentStream { row, col, moments });
        }
    }
    Ok(MomentTable { q: mu.q(), p: mu.p(), bound, streams })
}

// ---- factorize

#[derive(Serialize)]
pub struct FactorExport {
    pub side: Side,
    pub n: usize,
    pub min_pivot: f64,
    pub residual: f64,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub pivots: Vec<C64>,
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub lower: crate::cmv::CMat,
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub upper: crate::cmv::CMat,
}

impl From<&Factorization> for FactorExport {
    fn from(f: &Factorization) -> Self {
        Self {
            side: f.side,
            n: f.n,
            min_pivot: f.min_pivot(),
            residual: f.residual,
            pivots: f.pivots.clone(),
            lower: f.lower.clone(),
            upper: f.upper.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct FactorizeData {
    pub left: FactorExport,
    pub right: FactorExport,
}

pub fn factorize(ctx: &Context) -> Outcome<(FactorizeData, Checks)> {
    let pair = ctx.factor_pair(ctx.n)?;
    let mut ch = Checks::default();
    ch.push(&ctx.tol, "factorization", "factorization left", pair.left.residual);
    ch.push(&ctx.tol, "factorization", "factorization right", pair.right.residual);
    Ok((FactorizeData { left: (&pair.left).into(), right: (&pair.right).into() }, ch))
}

// ---- families

#[derive(Serialize)]
pub struct FamilyEntry<'a> {
    pub index: usize,
    pub component: usize,
    #[serde(flatten)]
    pub coeffs: &'a crate::laurent::LaurentPolynomial,
}

#[derive(Serialize)]
pub struct FamilyExport<'a> {
    pub kind: crate::cmv::FamilyKind,
    pub n: usize,
    pub entries: Vec<FamilyEntry<'a>>,
}

impl<'a> FamilyExport<'a> {
    pub fn new(f: &'a PolynomialFamily) -> Self {
        let entries = (0..f.len())
            .flat_map(|index| (0..f.components).map(move |component| (index, component)))
            .map(|(index, component)| FamilyEntry { index, component, coeffs: f.get(index, component) })
            .collect();
        Self { kind: f.kind, n: f.len(), entries }
    }
}

pub fn family_set(ctx: &Context) -> Outcome<(Vec<PolynomialFamily>, Checks)> {
    let pair = ctx.factor_pair(ctx.n)?;
    let fams = vec![
        family_b(&pair.left),
        family_a(&pair.left),
        family_bscr(&pair.right),
        family_ascr(&pair.right),
    ];
    let mut ch = Checks::default();
    ch.push(&ctx.tol, "biorthogonality", "biorthogonality", biorthogonality_residual(&fams[0], &fams[1], &ctx.mu, ctx.n));
    for f in &fams {
        let rep = check_degrees(f);
        ch.push(&ctx.tol, "degrees", format!("degree ceilings {:?}", f.kind), rep.violations as f64);
    }
    Ok((fams, ch))
}

/// `kind,index,component,k,re,im`.
pub fn family_rows(fams: &[PolynomialFamily]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for f in fams {
        let kind = serde_json::to_value(f.kind).expect("unit enum").as_str().unwrap_or_default().to_string();
        for i in 0..f.len() {
            for c in 0..f.components {
                for (k, v) in f.get(i, c).iter() {
                    rows.push(vec![kind.clone(), i.to_string(), c.to_string(), k.to_string(), fmt(v.re), fmt(v.im)]);
                }
            }
        }
    }
    rows
}

pub fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "nan".into()
    }
}

// ---- kernels

#[derive(Serialize)]
pub struct KernelRow {
    pub direct: KernelEvaluation,
    pub cd: Option<KernelEvaluation>,
    pub abc: KernelEvaluation,
}

pub fn kernels(ctx: &Context) -> Outcome<(Vec<KernelRow>, Checks)> {
    let (q, p, n) = (ctx.mu.q(), ctx.mu.p(), ctx.n);
    let reach = n + 2 * p.max(q);
    let pair = ctx.factor_pair(reach + 2 * (p + q))?;
    let left = &pair.left;
    let (a, b) = (family_a_dual(left), family_b(left));
    let t = recurrence_t(left, reach)?;
    let mut rows = Vec::new();
    let (mut cd_dev, mut abc_dev) = (0f64, 0f64);
    for (x, y) in ctx.pairs(10) {
        let direct = kernel_direct(&a, &b, n, x, y)?;
        let cd = match kernel_cd_formula(&a, &b, &t.op, n, x, y) {
            Ok(k) => {
                cd_dev = cd_dev.max(relative_deviation(&direct, &k));
                Some(k)
            }
            Err(Error::PoleAtDiagonal) => None,
            Err(e) => return Err(e.into()),
        };
        let abc = abc_kernel(left, n, x, y)?;
        abc_dev = abc_dev.max(relative_deviation(&direct, &abc));
        rows.push(KernelRow { direct, cd, abc });
    }
    let pts: Vec<(C64, C64)> = rows.iter().take(3).map(|r| (r.direct.x, r.direct.y)).collect();
    let mut ch = Checks::default();
    ch.push(&ctx.tol, "kernel", "kernel CD vs direct", cd_dev);
    ch.push(&ctx.tol, "kernel", "kernel ABC vs direct", abc_dev);
    ch.push(&ctx.tol, "reproducing", "kernel reproducing", reproducing_check(&a, &b, &ctx.mu, n, &pts)?);
    Ok((rows, ch))
}

/// `x_re,x_im,y_re,y_im,a,b,K_re,K_im` from the direct sum.
pub fn kernel_rows(rows: &[KernelRow]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for r in rows {
        let k = &r.direct;
        for a in 0..k.value.nrows() {
            for b in 0..k.value.ncols() {
                let v = k.value[(a, b)];
                out.push(vec![
                    fmt(k.x.re), fmt(k.x.im), fmt(k.y.re), fmt(k.y.im),
                    a.to_string(), b.to_string(), fmt(v.re), fmt(v.im),
                ]);
            }
        }
    }
    out
}

// ---- second kind

pub fn secondkind(ctx: &Context) -> Outcome<Vec<SecondKindEvaluation>> {
    let pair = ctx.factor_pair(ctx.n)?;
    let (a, b) = (family_a_dual(&pair.left), family_b(&pair.left));
    ctx.cauchy_points(8)
        .into_iter()
        .map(|z| second_kind(&ctx.mu, &a, &b, ctx.n, z).map_err(Failure::from))
        .collect()
}

/// `z_re,z_im,which,i,j,re,im`.
pub fn secondkind_rows(evals: &[SecondKindEvaluation]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for e in evals {
        for (which, m) in [("C", &e.c_row), ("D", &e.d_col)] {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let v = m[(i, j)];
                    out.push(vec![fmt(e.z.re), fmt(e.z.im), which.into(), i.to_string(), j.to_string(), fmt(v.re), fmt(v.im)]);
                }
            }
        }
    }
    out
}

// ---- transforms

pub fn christoffel(ctx: &Context) -> Outcome<(ChristoffelOracle, Checks)> {
    let (w, _) = ctx.perturbation()?;
    let pts = ctx.points(5, 1.0);
    let pairs = ctx.pairs(5);
    let o = christoffel_oracle(&ctx.mu, &w, ctx.n, &pts, &pairs)?;
    let mut ch = Checks::default();
    let t = &ctx.tol;
    ch.push(t, "christoffel", "christoffel connector vs factors", o.connector_vs_factors);
    ch.push(t, "christoffel", "christoffel root conditions", o.root_conditions);
    ch.push(t, "christoffel", "christoffel B-hat vs oracle", o.b_hat);
    ch.push(t, "christoffel", "christoffel A-hat vs oracle", o.a_hat);
    ch.push(t, "christoffel", "christoffel N B = B-hat W", o.connection_b);
    ch.push(t, "christoffel_kernel", "christoffel kernel connection", o.kernel_connection);
    ch.push(t, "christoffel_kernel", "christoffel truncated A-hat N = A", o.truncation);
    Ok((o, ch))
}

pub fn geronimus(ctx: &Context) -> Outcome<(GeronimusOracle, Checks)> {
    let (w, spec) = ctx.perturbation()?;
    let check = spec.geronimus_base(&ctx.mu, &w)?;
    let pts = ctx.points(5, 1.0);
    let mut r = ctx.point_rng();
    let triples: Vec<(C64, C64, C64)> = (0..3)
        .map(|_| (unit_point(&mut r), unit_point(&mut r), unit_point(&mut r) * 2.0))
        .collect();
    let o = geronimus_oracle(&check, &w, ctx.n, &pts, &triples)?;
    let mut ch = Checks::default();
    let t = &ctx.tol;
    ch.push(t, "geronimus", "geronimus F-value connector vs factors", o.connector_vs_factors);
    ch.push(t, "geronimus", "geronimus F vanishing", o.f_vanishing);
    ch.push(t, "geronimus", "geronimus A-check vs oracle", o.a_check);
    ch.push(t, "geronimus", "geronimus B-check vs oracle", o.b_check);
    ch.push(t, "geronimus_connection", "geronimus N D-check = D", o.connections.skf_d);
    ch.push(t, "geronimus_connection", "geronimus Cauchy kernel C connection", o.connections.conn_c);
    ch.push(t, "geronimus_connection", "geronimus Cauchy kernel D connection", o.connections.conn_d);
    Ok((o, ch))
}

// ---- verify

#[derive(Serialize)]
pub struct DegreeAttainment {
    pub family: String,
    pub sites: usize,
    pub attained: usize,
}

#[derive(Serialize)]
pub struct VerifyNotes {
    pub attainment: Vec<DegreeAttainment>,
    pub skipped: Vec<Skipped>,
}

/// Core checks always; kernels, ladder, Szegő and transforms with `all`.
pub fn verify(ctx: &Context, all: bool) -> Outcome<(VerifyNotes, Checks)> {
    let (q, p, n) = (ctx.mu.q(), ctx.mu.p(), ctx.n);
    let t = &ctx.tol;
    let mut ch = Checks::default();
    let pair = ctx.factor_pair(n + ctx.margin)?;
    ch.push(t, "factorization", "factorization left", pair.left.residual);
    ch.push(t, "factorization", "factorization right", pair.right.residual);
    let d = SpectralData::from_pair(pair, n)?;
    let a = family_a(&d.pair.left);
    ch.push(t, "biorthogonality", "biorthogonality", biorthogonality_residual(&d.b, &a, &ctx.mu, n));
    let mut attainment = Vec::new();
    for f in [&d.b, &a, &d.bscr, &family_ascr(&d.pair.right)] {
        let rep = check_degrees(f);
        ch.push(t, "degrees", format!("degree ceilings {:?}", f.kind), rep.violations as f64);
        attainment.push(DegreeAttainment { family: format!("{:?}", f.kind), sites: rep.attain_sites, attained: rep.attained });
    }
    let zs = ctx.points(10, 1.0);
    for (name, r) in recurrence_residuals(&d, &zs).entries() {
        ch.push(t, "recurrence", name, r);
    }
    let iw = intertwining_residuals(&ctx.mu, n);
    ch.push(t, "recurrence", "moment shift Upsilon", iw.upsilon);
    ch.push(t, "recurrence", "moment shift Upsilon transpose", iw.upsilon_transpose);
    ch.push(t, "recurrence", "moment shift eta", iw.eta);
    ch.push(t, "recurrence", "moment shift nu", iw.nu);
    if all {
        let ladder = BlockLadder::new(&d.pair)?;
        ch.push(t, "ladder", "block ladder inverses", ladder.inverse_residual());
        ch.push(t, "ladder", "Szego matrix diagonal blocks", stairs_residuals(&ladder, &d.szego).max());
        let blocks = szego_block_polynomials(&d.pair, &ladder, n / 2);
        let monic = [&blocks.q, &blocks.p, &blocks.q_scr, &blocks.p_scr]
            .into_iter()
            .map(|s| monic_defect(s))
            .fold(0.0, f64::max);
        ch.push(t, "ladder", "Szego block polynomials monic", monic);
        let count = n.saturating_sub(1);
        match verblunsky(&ctx.mu, &ladder, count) {
            Ok(alpha) => {
                let (phi, star) = szego_phi(&d.b, &ladder, count)?;
                ch.push(t, "szego", "scalar Szego recurrence", szego_recurrence_residual(&phi, &star, &alpha));
            }
            Err(e @ (Error::NotScalar | Error::NotReal(_))) => ch.skip("scalar Szego recurrence", e),
            Err(e) => return Err(e.into()),
        }
        if (q, p) == (1, 2) {
            match two_measure_recurrence_check(&d, &ctx.mu, &zs) {
                Ok(r) => ch.push(t, "recurrence", "two-measure recurrences", r.max()),
                Err(e) => ch.skip("two-measure recurrences", e),
            }
        } else {
            ch.skip("two-measure recurrences", "requires (q, p) = (1, 2)");
        }
        let kctx = Context { cfg: ctx.cfg.clone(), mu: ctx.mu.clone(), n, margin: ctx.margin, seed: ctx.seed, tol: ctx.tol.clone() };
        let (_, kc) = kernels(&kctx)?;
        ch.extend(kc);
        if ctx.cfg.perturbation.is_some() {
            let nt = n.min(20);
            let tctx = Context { n: nt, ..kctx };
            ch.extend(christoffel(&tctx)?.1);
            ch.extend(geronimus(&tctx)?.1);
        } else {
            ch.skip("christoffel", "config has no perturbation");
            ch.skip("geronimus", "config has no perturbation");
        }
    }
    let notes = VerifyNotes { attainment, skipped: std::mem::take(&mut ch.skipped) };
    Ok((notes, ch))
}
