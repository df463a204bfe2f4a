//! Cauchy transforms `∮ (·)/(z - x) dμ(x)` of the families and kernels.
//!
//! Laurent-polynomial weights have finite Fourier support, so the geometric
//! expansion of `1/(z - x)` truncates and the result is exact.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::cmv::{CMat, PolynomialFamily};
use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::measures::{MatrixFunctional, ScalarFunctional};

pub const CIRCLE_GAP: f64 = 1e-6;
const ATOM_GAP: f64 = 1e-12;

fn admissible(f: &ScalarFunctional, z: C64) -> Result<()> {
    if (z.norm() - 1.0).abs() < CIRCLE_GAP {
        return Err(Error::OnCircle);
    }
    if f.atoms.iter().any(|a| (a.location - z).norm() < ATOM_GAP) {
        return Err(Error::AtAtom);
    }
    Ok(())
}

/// `∮ P(x)/(z - x) dμ(x)` for one scalar functional.
pub fn cauchy_scalar(f: &ScalarFunctional, p: &LaurentPolynomial, z: C64) -> Result<C64> {
    admissible(f, z)?;
    let g = p * &f.ac;
    let mut s = C64::default();
    // the a.c. pairing is ∮ x^k w = w_{-k}; keep only the convergent side
    if z.norm() > 1.0 {
        let zi = z.inv();
        for (k, c) in g.iter().filter(|(k, _)| *k <= 0) {
            s += c * zi.powi(1 - k);
        }
    } else {
        for (k, c) in g.iter().filter(|(k, _)| *k >= 1) {
            s -= c * z.powi(k - 1);
        }
    }
    for a in &f.atoms {
        s += a.mass * p.eval_unchecked(a.location) / (z - a.location);
    }
    Ok(s)
}

fn check_point(mu: &MatrixFunctional, z: C64) -> Result<()> {
    for b in 0..mu.q() {
        for a in 0..mu.p() {
            admissible(mu.get(b, a), z)?;
        }
    }
    Ok(())
}

/// `C_k^{(b)}(z) = Σ_a ∮ Ā_k^{(a)}(1/x) dμ_{b,a}(x)/(z - x)`; `q × n`.
pub fn cauchy_c(mu: &MatrixFunctional, a_dual: &PolynomialFamily, n: usize, z: C64) -> Result<CMat> {
    check_point(mu, z)?;
    let mut out = CMat::zeros(mu.q(), n);
    for k in 0..n {
        for b in 0..mu.q() {
            let mut s = C64::default();
            for a in 0..mu.p() {
                let f = mu.get(b, a);
                if !f.is_zero() {
                    s += cauchy_scalar(f, a_dual.get(k, a), z)?;
                }
            }
            out[(b, k)] = s;
        }
    }
    Ok(out)
}

/// `D_k^{(a)}(z) = Σ_b ∮ B_k^{(b)}(x)/(z - x) dμ_{b,a}(x)`; `n × p`.
pub fn cauchy_d(mu: &MatrixFunctional, b_fam: &PolynomialFamily, n: usize, z: C64) -> Result<CMat> {
    check_point(mu, z)?;
    let mut out = CMat::zeros(n, mu.p());
    for k in 0..n {
        for a in 0..mu.p() {
            let mut s = C64::default();
            for b in 0..mu.q() {
                let f = mu.get(b, a);
                if !f.is_zero() {
                    s += cauchy_scalar(f, b_fam.get(k, b), z)?;
                }
            }
            out[(k, a)] = s;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondKindEvaluation {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub z: C64,
    /// `q × n`.
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub c_row: CMat,
    /// `n × p`.
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub d_col: CMat,
}

pub fn second_kind(
    mu: &MatrixFunctional,
    a_dual: &PolynomialFamily,
    b_fam: &PolynomialFamily,
    n: usize,
    z: C64,
) -> Result<SecondKindEvaluation> {
    Ok(SecondKindEvaluation {
        z,
        c_row: cauchy_c(mu, a_dual, n, z)?,
        d_col: cauchy_d(mu, b_fam, n, z)?,
    })
}

/// `K_C(z, y) = C^[n](z) B^[n](y)`; `q × q`.
pub fn kernel_cauchy_c(mu: &MatrixFunctional, a_dual: &PolynomialFamily, b_fam: &PolynomialFamily, n: usize, z: C64, y: C64) -> Result<CMat> {
    Ok(cauchy_c(mu, a_dual, n, z)? * b_fam.eval_matrix(n, y))
}

/// `K_D(x, z) = Ā^[n](1/x) D^[n](z)`; `p × p`.
pub fn kernel_cauchy_d(mu: &MatrixFunctional, a_dual: &PolynomialFamily, b_fam: &PolynomialFamily, n: usize, x: C64, z: C64) -> Result<CMat> {
    Ok(a_dual.eval_matrix(n, x).transpose() * cauchy_d(mu, b_fam, n, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmv::{family_a_dual, family_b, FactorPair};
    use crate::measures::Atom;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Trapezoid rule on the circle; the integrand is analytic in an annulus,
    /// so the error decays like `max(|z|, 1/|z|)^{-m}`.
    fn quadrature(w: &LaurentPolynomial, p: &LaurentPolynomial, z: C64, m: usize) -> C64 {
        let mut s = C64::default();
        for j in 0..m {
            let x = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
            s += w.eval_unchecked(x) * p.eval_unchecked(x) / (z - x);
        }
        s / m as f64
    }

    #[test]
    fn lebesgue_constant() {
        let f = ScalarFunctional::lebesgue();
        let one = LaurentPolynomial::one();
        let z = c(2.0, 1.0);
        assert!((cauchy_scalar(&f, &one, z).unwrap() - z.inv()).norm() < 1e-16);
        assert_eq!(cauchy_scalar(&f, &one, c(0.3, 0.2)).unwrap(), C64::default());
    }

    #[test]
    fn matches_quadrature_both_sides() {
        let w = LaurentPolynomial::from_coeffs([(-2, c(0.2, 0.1)), (0, c(1.5, 0.0)), (1, c(-0.3, 0.4)), (3, c(0.1, -0.2))]);
        let p = LaurentPolynomial::from_coeffs([(-1, c(0.5, 0.5)), (2, c(1.0, -1.0))]);
        let f = ScalarFunctional::weight(w.clone());
        for z in [c(2.0, 0.0), c(-1.3, 0.7), c(0.4, -0.2), c(0.0, 0.5)] {
            let exact = cauchy_scalar(&f, &p, z).unwrap();
            let quad = quadrature(&w, &p, z, 512);
            assert!((exact - quad).norm() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn atom_term() {
        let f = ScalarFunctional::new(LaurentPolynomial::zero(), vec![Atom { location: c(2.0, 0.0), mass: c(0.3, 0.0) }]).unwrap();
        let p = LaurentPolynomial::from_real_slice(0, &[1.0, 1.0]);
        let v = cauchy_scalar(&f, &p, c(0.5, 0.0)).unwrap();
        assert!((v - c(0.3 * 3.0 / -1.5, 0.0)).norm() < 1e-15);
        assert_eq!(cauchy_scalar(&f, &p, c(2.0, 0.0)).unwrap_err(), Error::AtAtom);
        assert_eq!(cauchy_scalar(&f, &p, c(0.0, 1.0)).unwrap_err(), Error::OnCircle);
    }

    #[test]
    fn kernel_transforms_are_consistent() {
        let mu = MatrixFunctional::lebesgue();
        let pair = FactorPair::new(&mu, 4).unwrap();
        let (a, b) = (family_a_dual(&pair.left), family_b(&pair.left));
        let kc = kernel_cauchy_c(&mu, &a, &b, 1, c(3.0, 0.0), c(0.2, 0.7)).unwrap();
        assert!((kc[(0, 0)] - c(1.0 / 3.0, 0.0)).norm() < 1e-16);
        let kd = kernel_cauchy_d(&mu, &a, &b, 3, c(0.5, 0.5), c(2.0, 0.0)).unwrap();
        let d = cauchy_d(&mu, &b, 3, c(2.0, 0.0)).unwrap();
        let want: C64 = (0..3).map(|k| a.eval(k, 0, c(0.5, 0.5)) * d[(k, 0)]).sum();
        assert!((kd[(0, 0)] - want).norm() < 1e-15);
    }
}
