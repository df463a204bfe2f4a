//! Invariants over randomly drawn inputs.

use cmv_mop::cmv::{amax, biorthogonality_residual, check_degrees, family_a, family_a_dual, family_b, CMat, FactorPair};
use cmv_mop::kernels::{kernel_cd_formula, kernel_direct, relative_deviation};
use cmv_mop::laurent::LaurentPolynomial;
use cmv_mop::measures::{Atom, MatrixFunctional, ScalarFunctional};
use cmv_mop::random::{random_measure, RandomSpec};
use cmv_mop::spectral::{recurrence_residuals, recurrence_t, SpectralData};
use cmv_mop::transforms::{christoffel_oracle, quasi_determinant, BalancedLaurent, PerturbationMatrix};
use cmv_mop::C64;
use proptest::prelude::*;

fn cplx() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn laurent() -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::vec((-6i32..=6, cplx()), 0..8).prop_map(LaurentPolynomial::from_coeffs)
}

fn unit() -> impl Strategy<Value = C64> {
    (0.0..std::f64::consts::TAU).prop_map(|t| C64::from_polar(1.0, t))
}

/// Off-circle root: modulus in [1.5, 3] or [0.2, 0.6].
fn root() -> impl Strategy<Value = C64> {
    (prop_oneof![1.5..3.0f64, 0.2..0.6f64], 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn mixed_shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((1, 1)), Just((1, 2)), Just((2, 1)), Just((2, 2)), Just((2, 3))]
}

/// Mixed shapes need weight degree comparable to the truncation to stay
/// factorizable; square ones get a dominant diagonal.
fn measure(q: usize, p: usize, n: usize, seed: u64) -> MatrixFunctional {
    if p == q {
        random_measure(RandomSpec::new(q, p, 4).dominance(3.0), seed)
    } else {
        random_measure(RandomSpec::new(q, p, n as i32 + 4), seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_evaluates_to_product(a in laurent(), b in laurent(), z in unit()) {
        let lhs = (&a * &b).eval_unchecked(z);
        let rhs = a.eval_unchecked(z) * b.eval_unchecked(z);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn divided_difference_identity(p in laurent(), x in root()) {
        let z_minus_x = LaurentPolynomial::from_coeffs([(1, C64::new(1.0, 0.0)), (0, -x)]);
        let r = &(&p - &LaurentPolynomial::constant(p.eval_unchecked(x))) - &(&z_minus_x * &p.divided_difference(x));
        prop_assert!(r.max_abs() <= 1e-12 * p.max_abs().max(1.0) * (1.0 + x.norm()).powi(12));
    }

    #[test]
    fn conjugate_and_adjoint_moments(w in laurent(), loc in unit(), mass in cplx(), k in -8i32..=8) {
        let f = ScalarFunctional::new(w.clone(), vec![Atom { location: loc, mass }]).unwrap();
        let g = ScalarFunctional::weight(&w * &w);
        let mu = MatrixFunctional::new(1, 2, vec![f, g]).unwrap();
        let conj = mu.conjugate().moment(k) - mu.moment(-k).map(|c| c.conj());
        prop_assert!(amax(&conj) < 1e-14);
        let adj = mu.adjoint().moment(k) - mu.moment(-k).adjoint();
        prop_assert!(amax(&adj) < 1e-14);
    }

    #[test]
    fn quasi_determinant_is_determinant_ratio(vals in prop::collection::vec(cplx(), 16)) {
        let full = CMat::from_fn(4, 4, |i, j| vals[4 * i + j] + if i == j { C64::new(2.0, 0.0) } else { C64::default() });
        let a = full.view((0, 0), (3, 3)).into_owned();
        let b = full.view((0, 3), (3, 1)).into_owned();
        let c = full.view((3, 0), (1, 3)).into_owned();
        let qd = quasi_determinant(&a, &b, &c, full[(3, 3)]).unwrap();
        let ratio = full.determinant() / a.determinant();
        prop_assert!((qd - ratio).norm() < 1e-11 * ratio.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn factors_are_biorthogonal((q, p) in mixed_shape(), seed in 0u64..1000) {
        let n = 20;
        let mu = measure(q, p, n, seed);
        let pair = FactorPair::new(&mu, n).unwrap();
        prop_assert!(pair.left.residual < 1e-9);
        let (b, a) = (family_b(&pair.left), family_a(&pair.left));
        prop_assert!(biorthogonality_residual(&b, &a, &mu, n) < 1e-9);
        prop_assert_eq!(check_degrees(&b).violations, 0);
        prop_assert_eq!(check_degrees(&a).violations, 0);
    }

    #[test]
    fn recurrences_hold((q, p) in mixed_shape(), seed in 0u64..1000, z in unit()) {
        let n = 16;
        let mu = measure(q, p, n + 12, seed);
        let d = SpectralData::new(&mu, n, 2 * (p + q) + 2).unwrap();
        let r = recurrence_residuals(&d, &[z]);
        for (name, v) in r.entries() {
            prop_assert!(v < 1e-9, "{} = {:e}", name, v);
        }
        prop_assert_eq!((d.t.op.lower(), d.t.op.upper()), (2 * p, 2 * q));
    }

    #[test]
    fn cd_kernel_matches_direct((q, p) in mixed_shape(), seed in 0u64..1000, x in unit(), y in unit()) {
        prop_assume!((x - y).norm() > 1e-3);
        let n = 14;
        let reach = n + 2 * p.max(q);
        let mu = measure(q, p, reach + 2 * (p + q), seed);
        let pair = FactorPair::new(&mu, reach + 2 * (p + q)).unwrap();
        let (a, b) = (family_a_dual(&pair.left), family_b(&pair.left));
        let t = recurrence_t(&pair.left, reach).unwrap();
        let direct = kernel_direct(&a, &b, n, x, y).unwrap();
        let cd = kernel_cd_formula(&a, &b, &t.op, n, x, y).unwrap();
        // the CD form divides by x - y
        prop_assert!(relative_deviation(&direct, &cd) < 1e-10 / (x - y).norm());
    }

    #[test]
    fn christoffel_matches_refactorization(r1 in root(), r2 in root(), lead in cplx(), seed in 0u64..1000, z in unit()) {
        prop_assume!((r1 - r2).norm() > 0.1 && lead.norm() > 0.1);
        let w = PerturbationMatrix::new(vec![BalancedLaurent::new(lead, vec![r1, r2]).unwrap()]).unwrap();
        let mu = random_measure(RandomSpec::new(1, 1, 3).dominance(3.0), seed);
        let o = christoffel_oracle(&mu, &w, 12, &[z], &[]).unwrap();
        prop_assert!(o.b_hat < 1e-8, "{:e}", o.b_hat);
        prop_assert!(o.a_hat < 1e-8, "{:e}", o.a_hat);
        prop_assert!(o.connector_vs_factors < 1e-8);
    }

    #[test]
    fn json_export_is_deterministic(vals in prop::collection::vec(-1e6..1e6f64, 1..20)) {
        let a = cmv_mop::report::to_json(&vals).unwrap();
        prop_assert_eq!(&a, &cmv_mop::report::to_json(&vals).unwrap());
        let back: Vec<f64> = serde_json::from_str(&a).unwrap();
        prop_assert_eq!(back, vals);
    }
}
