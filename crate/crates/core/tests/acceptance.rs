//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are printed under plain `cargo test`.

use std::time::Instant;

use cmv_mop::cmv::{
    amax, biorthogonality_residual, build_moment_matrix, check_degrees, cmv_exponent, family_a, family_a_dual,
    family_ascr, family_b, family_bscr, gauss_borel, CMat, CmvTruncation, FactorPair, Side,
};
use cmv_mop::kernels::{abc_kernel, kernel_cd_formula, kernel_direct, relative_deviation, reproducing_check};
use cmv_mop::laurent::LaurentPolynomial;
use cmv_mop::measures::{Atom, MatrixFunctional};
use cmv_mop::random::{random_measure, random_positive_weight, rng, unit_point, RandomSpec};
use cmv_mop::spectral::{
    recurrence_residuals, recurrence_t, szego_phi, szego_recurrence_residual, upsilon, verblunsky, BlockLadder,
    SpectralData,
};
use cmv_mop::transforms::{christoffel_oracle, geronimus_oracle, BalancedLaurent, PerturbationMatrix};
use cmv_mop::{Error, C64};
use nalgebra::{DMatrix, DVector};

const SHAPES: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 3)];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square shapes are made factorizable by a dominant diagonal; mixed ones
/// by a weight degree comparable to the truncation.
fn seeded_measure(q: usize, p: usize, n: usize, seed: u64) -> MatrixFunctional {
    if p == q {
        random_measure(RandomSpec::new(q, p, 6).dominance(3.0), seed)
    } else {
        random_measure(RandomSpec::new(q, p, n as i32 + 4), seed)
    }
}

fn unit_points(seed: u64, count: usize) -> Vec<C64> {
    let mut r = rng(seed);
    (0..count).map(|_| unit_point(&mut r)).collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn identity_measure() -> Outcome {
    let n = 64;
    let mu = MatrixFunctional::lebesgue();
    let id = CMat::identity(n, n);
    let mut worst = amax(&(build_moment_matrix(&mu, n, Side::Left).m - &id));
    let d = SpectralData::new(&mu, n, 4).unwrap();
    let left = &d.pair.left;
    worst = worst.max(amax(&(left.lower.view((0, 0), (n, n)) - &id)));
    worst = worst.max(amax(&(left.upper.view((0, 0), (n, n)) - &id)));
    for k in 0..n {
        let mono = LaurentPolynomial::monomial(cmv_exponent(k), c(1.0, 0.0));
        worst = worst.max(d.b.get(k, 0).distance(&mono));
    }
    worst = worst.max(amax(&(d.t.op.to_dense() - upsilon(1, n).to_dense())));
    let ladder = BlockLadder::new(&d.pair).unwrap();
    let alpha = verblunsky(&mu, &ladder, n - 1).unwrap();
    worst = worst.max(alpha.iter().map(|a| a.norm()).fold(0.0, f64::max));
    outcome(worst < 1e-12, format!("n = {n}, max residual {worst:.1e}"))
}

fn biorthogonality() -> Outcome {
    let n = 40;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for &(q, p) in &SHAPES {
        for seed in 0..10 {
            let mu = seeded_measure(q, p, n, seed);
            match FactorPair::new(&mu, n) {
                Ok(pair) => {
                    let r = biorthogonality_residual(&family_b(&pair.left), &family_a(&pair.left), &mu, n);
                    worst = worst.max(r);
                }
                Err(e) => failures.push(format!("({q},{p}) seed {seed}: {e}")),
            }
        }
    }
    outcome(
        worst < 1e-9 && failures.is_empty(),
        format!("40 measures, n = {n}, max residual {worst:.1e}{}", failures.join("; ")),
    )
}

fn degree_ceilings() -> Outcome {
    let n = 40;
    let (mut violations, mut measures, mut generic) = (0, 0, 0);
    for &(q, p) in &SHAPES {
        for seed in 0..10 {
            let mu = seeded_measure(q, p, n, seed);
            let pair = FactorPair::new(&mu, n).unwrap();
            let mut all_attained = true;
            for f in [family_b(&pair.left), family_a(&pair.left), family_bscr(&pair.right), family_ascr(&pair.right)] {
                let r = check_degrees(&f);
                violations += r.violations;
                all_attained &= r.attained == r.attain_sites;
            }
            measures += 1;
            generic += usize::from(all_attained);
        }
    }
    let frac = generic as f64 / measures as f64;
    outcome(
        violations == 0 && frac >= 0.9,
        format!("{violations} ceiling violations, ceilings attained for {generic}/{measures} measures"),
    )
}

fn recurrences() -> Outcome {
    let n = 48;
    let zs = unit_points(40, 10);
    let mut worst = (0.0, "");
    for (i, &(q, p)) in SHAPES.iter().enumerate() {
        let margin = 2 * (p + q) + 2;
        let mu = seeded_measure(q, p, n + margin, 100 + i as u64);
        let d = SpectralData::new(&mu, n, margin).unwrap();
        for (name, v) in recurrence_residuals(&d, &zs).entries() {
            if v > worst.0 {
                worst = (v, name);
            }
        }
    }
    outcome(worst.0 < 1e-9, format!("n = {n}, 10 points, max residual {:.1e} ({})", worst.0, worst.1))
}

/// Monic OPUC by solving `Σ_j x_j c_{j-k} = -c_{n-k}`, `k < n`.
fn gram_schmidt_monic(mu: &MatrixFunctional, n: usize) -> Vec<C64> {
    if n == 0 {
        return vec![c(1.0, 0.0)];
    }
    let m = |k: i32| mu.moment(k)[(0, 0)];
    let a = DMatrix::from_fn(n, n, |k, j| m(j as i32 - k as i32));
    let rhs = DVector::from_fn(n, |k, _| -m(n as i32 - k as i32));
    let x = a.lu().solve(&rhs).expect("positive measure has nonsingular Toeplitz minors");
    let mut out: Vec<C64> = x.iter().copied().collect();
    out.push(c(1.0, 0.0));
    out
}

fn szego_scalar() -> Outcome {
    let count = 31;
    let (mut oracle_gap, mut rec): (f64, f64) = (0.0, 0.0);
    for seed in 0..5 {
        let mu = random_positive_weight(4, seed);
        let pair = FactorPair::new(&mu, 2 * count + 4).unwrap();
        let ladder = BlockLadder::new(&pair).unwrap();
        let alpha = verblunsky(&mu, &ladder, count).unwrap();
        let (phi, star) = szego_phi(&family_b(&pair.left), &ladder, count).unwrap();
        for (k, ph) in phi.iter().enumerate() {
            let want = gram_schmidt_monic(&mu, k);
            let gap = want.iter().enumerate().map(|(j, w)| (ph.coeff(j as i32) - w).norm()).fold(0.0, f64::max);
            let scale = want.iter().map(|w| w.norm()).fold(1.0, f64::max);
            oracle_gap = oracle_gap.max(gap / scale);
        }
        rec = rec.max(szego_recurrence_residual(&phi, &star, &alpha));
    }
    outcome(
        oracle_gap < 1e-8 && rec < 1e-9,
        format!("5 measures, n <= 30: oracle gap {oracle_gap:.1e}, recursion {rec:.1e}"),
    )
}

fn kernels() -> Outcome {
    let n = 60;
    let (mut cd, mut abc, mut repro): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (i, &(q, p)) in SHAPES.iter().enumerate() {
        let reach = n + 2 * p.max(q);
        let size = reach + 2 * (p + q);
        let mu = seeded_measure(q, p, size, 200 + i as u64);
        let pair = FactorPair::new(&mu, size).unwrap();
        let (a, b) = (family_a_dual(&pair.left), family_b(&pair.left));
        let t = recurrence_t(&pair.left, reach).unwrap();
        let pts = unit_points(300 + i as u64, 20);
        let pairs: Vec<(C64, C64)> = pts.chunks(2).map(|w| (w[0], w[1])).collect();
        for &(x, y) in &pairs {
            let k = kernel_direct(&a, &b, n, x, y).unwrap();
            cd = cd.max(relative_deviation(&k, &kernel_cd_formula(&a, &b, &t.op, n, x, y).unwrap()));
            abc = abc.max(relative_deviation(&k, &abc_kernel(&pair.left, n, x, y).unwrap()));
        }
        repro = repro.max(reproducing_check(&a, &b, &mu, n, &pairs[..2]).unwrap());
    }
    outcome(
        cd < 1e-9 && abc < 1e-9 && repro < 1e-9,
        format!("n = {n}: CD {cd:.1e}, ABC {abc:.1e}, reproducing {repro:.1e}"),
    )
}

fn perturbation(q: usize) -> PerturbationMatrix {
    let mut e = vec![BalancedLaurent::new(c(1.0, 0.0), vec![c(2.0, 0.0), c(0.5, 0.0)]).unwrap()];
    if q == 2 {
        e.push(BalancedLaurent::new(c(0.7, 0.2), vec![c(-1.5, 0.3), c(0.2, -0.4)]).unwrap());
    }
    PerturbationMatrix::new(e).unwrap()
}

fn christoffel() -> Outcome {
    let n = 20;
    let (mut fam, mut conn, mut kern): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for &(q, p) in &[(1, 1), (1, 2), (2, 1), (2, 2), (2, 3)] {
        for seed in 0..3 {
            let w = perturbation(q);
            let mu = seeded_measure(q, p, n + 2 * w.width() + 4, seed);
            let pts = unit_points(seed, 5);
            let pairs: Vec<(C64, C64)> = unit_points(seed + 50, 10).chunks(2).map(|v| (v[0], v[1])).collect();
            let o = christoffel_oracle(&mu, &w, n, &pts, &pairs).unwrap();
            fam = fam.max(o.b_hat).max(o.a_hat);
            conn = conn.max(o.connector_vs_factors);
            kern = kern.max(o.kernel_connection);
        }
    }
    outcome(
        fam < 1e-8 && conn < 1e-8 && kern < 1e-9,
        format!("n = {n}: families {fam:.1e}, connector {conn:.1e}, kernel connection {kern:.1e}"),
    )
}

fn geronimus() -> Outcome {
    let n = 20;
    let (mut fam, mut connections): (f64, f64) = (0.0, 0.0);
    for &(q, p) in &[(1, 1), (1, 2), (2, 1), (2, 2)] {
        for seed in 0..3 {
            for atoms in [false, true] {
                let w = perturbation(q);
                let mut check = seeded_measure(q, p, n + 2 * w.width() + 8, seed);
                if atoms {
                    let mut r = rng(seed + 100);
                    for b in 0..q {
                        for a in 0..p {
                            for (j, &z) in w.entry(b).roots().iter().enumerate() {
                                if (j + a) % 2 == 0 {
                                    check.get_mut(b, a).atoms.push(Atom { location: z, mass: unit_point(&mut r) * 0.2 });
                                }
                            }
                        }
                    }
                }
                let pts = unit_points(seed, 5);
                let zs = unit_points(seed + 7, 9);
                let triples: Vec<_> = zs.chunks(3).map(|v| (v[0], v[1], v[2] * 2.0)).collect();
                let o = geronimus_oracle(&check, &w, n, &pts, &triples).unwrap();
                fam = fam.max(o.a_check).max(o.b_check);
                connections = connections.max(o.connections.max());
            }
        }
    }
    outcome(
        fam < 1e-7 && connections < 1e-8,
        format!("n = {n}, with and without atoms: families {fam:.1e}, connections at |z| = 2 {connections:.1e}"),
    )
}

fn negative_controls() -> Outcome {
    let n = 12;
    let mu1 = seeded_measure(1, 1, n, 1);
    let mu2 = seeded_measure(1, 1, n, 2);
    let p1 = FactorPair::new(&mu1, n).unwrap();
    let p2 = FactorPair::new(&mu2, n).unwrap();
    let mismatch = biorthogonality_residual(&family_b(&p1.left), &family_a(&p2.left), &mu1, n);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("circle.json");
    std::fs::write(
        &cfg,
        r#"{"perturbation": {"entries": [{"leading": [1, 0], "roots": [[0.6, 0.8], [2, 0]]}]}}"#,
    )
    .unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cmv_mop::cli::run(
        ["cmvmop", "transform", "christoffel", "--config", cfg.to_str().unwrap()],
        &mut out,
        &mut err,
    );

    // leading block of row 6 is a combination of rows 0..5
    let size = 10;
    let mut r = rng(77);
    let mut m = CMat::from_fn(size, size, |i, j| {
        let v = unit_point(&mut r) * 0.3;
        if i == j { v + c(2.0, 0.0) } else { v }
    });
    for j in 0..=6 {
        m[(6, j)] = (0..6).map(|i| m[(i, j)] * c(0.5, i as f64 * 0.1)).sum();
    }
    let t = CmvTruncation { n: size, q: 1, p: 1, side: Side::Left, m };
    let minor = gauss_borel(&t).err();

    let pass = mismatch > 0.1 && code == cmv_mop::cli::EXIT_PERTURBATION && minor == Some(Error::SingularMinor(6));
    outcome(
        pass,
        format!("mismatched residual {mismatch:.2}, on-circle root exit {code}, rank-deficient minor {minor:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("identity measure", identity_measure),
        ("biorthogonality", biorthogonality),
        ("degree ceilings", degree_ceilings),
        ("recurrences", recurrences),
        ("scalar Szego", szego_scalar),
        ("kernel agreement", kernels),
        ("Christoffel oracle", christoffel),
        ("Geronimus oracle", geronimus),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("{tag} criterion {} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
