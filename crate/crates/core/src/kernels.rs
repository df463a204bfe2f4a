//! Christoffel–Darboux kernels `K(x, y) = Ā(1/x) B(y)` summed over the
//! first `n` members, in three independent forms.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::cmv::{amax, cmv_vector, CMat, Factorization, PolynomialFamily};
use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::measures::MatrixFunctional;
use crate::spectral::BandedOperator;

#[derive(Clone, Debug, Serialize)]
pub struct KernelEvaluation {
    pub n: usize,
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub x: C64,
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub y: C64,
    /// `p × q`.
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub value: CMat,
}

fn nonzero(z: C64) -> Result<()> {
    if z == C64::default() {
        Err(Error::ZeroArgument)
    } else {
        Ok(())
    }
}

/// `Σ_{k<n} Ā_k^{(a)}(1/x) B_k^{(b)}(y)`; `a_dual` holds `Ā(1/z)`.
pub fn kernel_direct(a_dual: &PolynomialFamily, b: &PolynomialFamily, n: usize, x: C64, y: C64) -> Result<KernelEvaluation> {
    nonzero(x)?;
    nonzero(y)?;
    if n > a_dual.len() || n > b.len() {
        return Err(Error::WindowOutOfRange { index: n, lo: 0, hi: a_dual.len().min(b.len()) });
    }
    let av = a_dual.eval_matrix(n, x);
    let bv = b.eval_matrix(n, y);
    Ok(KernelEvaluation { n, x, y, value: av.transpose() * bv })
}

/// Sum of `Ā_i T_ij B_j` over a rectangular index window.
fn band_sum(av: &CMat, t: &BandedOperator, bv: &CMat, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> CMat {
    let mut out = CMat::zeros(av.ncols(), bv.ncols());
    for i in rows {
        for j in cols.clone() {
            let tij = t.get(i, j);
            if tij != C64::default() {
                out += av.row(i).transpose() * bv.row(j) * tij;
            }
        }
    }
    out
}

/// Christoffel–Darboux form
/// `(x - y) K = Σ_{i∈[n,n+2p), j∈[n-2p,n)} Ā_i T_ij B_j - Σ_{i∈[n-2q,n), j∈[n,n+2q)} Ā_i T_ij B_j`.
///
/// `T` and both families must reach `n + 2·max(p, q)`.
pub fn kernel_cd_formula(
    a_dual: &PolynomialFamily,
    b: &PolynomialFamily,
    t: &BandedOperator,
    n: usize,
    x: C64,
    y: C64,
) -> Result<KernelEvaluation> {
    nonzero(x)?;
    nonzero(y)?;
    if (x - y).norm() < 1e-12 {
        return Err(Error::PoleAtDiagonal);
    }
    let (p, q) = (a_dual.components, b.components);
    let reach = n + 2 * p.max(q);
    let have = t.n().min(a_dual.len()).min(b.len());
    if reach > have {
        return Err(Error::MarginTooSmall { needed: reach, have });
    }
    let av = a_dual.eval_matrix(reach, x);
    let bv = b.eval_matrix(reach, y);
    let first = band_sum(&av, t, &bv, n..n + 2 * p, n.saturating_sub(2 * p)..n);
    let second = band_sum(&av, t, &bv, n.saturating_sub(2 * q)..n, n..n + 2 * q);
    Ok(KernelEvaluation { n, x, y, value: (first - second) / (x - y) })
}

/// `Z_[p]ᵀ(1/x) (M^[n])⁻¹ Z_[q](y)` with `(M^[n])⁻¹ = Ū^[n] L^[n]`.
pub fn abc_kernel(left: &Factorization, n: usize, x: C64, y: C64) -> Result<KernelEvaluation> {
    nonzero(x)?;
    nonzero(y)?;
    if n > left.n {
        return Err(Error::WindowOutOfRange { index: n, lo: 0, hi: left.n });
    }
    let l = left.lower.view((0, 0), (n, n));
    let u = left.upper.view((0, 0), (n, n));
    let zx = cmv_vector(left.p, n, x.inv());
    let zy = cmv_vector(left.q, n, y);
    let value = zx.transpose() * (u * (l * zy));
    Ok(KernelEvaluation { n, x, y, value })
}

/// Kernel as a `p × q` grid of Laurent polynomials in `y` for fixed `x`.
fn kernel_in_y(a_dual: &PolynomialFamily, b: &PolynomialFamily, n: usize, x: C64) -> Vec<Vec<LaurentPolynomial>> {
    let (p, q) = (a_dual.components, b.components);
    let mut out = vec![vec![LaurentPolynomial::zero(); q]; p];
    for k in 0..n {
        for (a, row) in out.iter_mut().enumerate() {
            let s = a_dual.eval(k, a, x);
            for (bb, cell) in row.iter_mut().enumerate() {
                *cell = &*cell + &b.get(k, bb).scale(s);
            }
        }
    }
    out
}

/// Kernel as a `p × q` grid of Laurent polynomials in `y` for fixed `z`
/// in the second slot: `K(y, z)`.
fn kernel_in_first(a_dual: &PolynomialFamily, b: &PolynomialFamily, n: usize, z: C64) -> Vec<Vec<LaurentPolynomial>> {
    let (p, q) = (a_dual.components, b.components);
    let mut out = vec![vec![LaurentPolynomial::zero(); q]; p];
    for k in 0..n {
        for (a, row) in out.iter_mut().enumerate() {
            for (bb, cell) in row.iter_mut().enumerate() {
                *cell = &*cell + &a_dual.get(k, a).scale(b.eval(k, bb, z));
            }
        }
    }
    out
}

/// `max |∮ K(x,y) dμ(y) K(y,z) - K(x,z)| / max(1, |K(x,z)|)` over the
/// given pairs; the middle integral is exact coefficient pairing.
pub fn reproducing_check(
    a_dual: &PolynomialFamily,
    b: &PolynomialFamily,
    mu: &MatrixFunctional,
    n: usize,
    pairs: &[(C64, C64)],
) -> Result<f64> {
    let (p, q) = (mu.p(), mu.q());
    let mut worst: f64 = 0.0;
    for &(x, z) in pairs {
        let left = kernel_in_y(a_dual, b, n, x);
        let right = kernel_in_first(a_dual, b, n, z);
        let mut lhs = CMat::zeros(p, q);
        for a in 0..p {
            for b2 in 0..q {
                let mut s = C64::default();
                for (bb, lpoly) in left[a].iter().enumerate() {
                    for (a2, rrow) in right.iter().enumerate() {
                        let f = mu.get(bb, a2);
                        if !f.is_zero() {
                            s += f.apply(&(lpoly * &rrow[b2]));
                        }
                    }
                }
                lhs[(a, b2)] = s;
            }
        }
        let k = kernel_direct(a_dual, b, n, x, z)?.value;
        worst = worst.max(amax(&(&lhs - &k)) / amax(&k).max(1.0));
    }
    Ok(worst)
}

/// Relative deviation `|K1 - K2| / max(1, |K1|)`.
pub fn relative_deviation(k1: &KernelEvaluation, k2: &KernelEvaluation) -> f64 {
    amax(&(&k1.value - &k2.value)) / amax(&k1.value).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmv::{family_a_dual, family_b, FactorPair};
    use crate::measures::ScalarFunctional;
    use crate::spectral::recurrence_t;

    fn setup(mu: &MatrixFunctional, n: usize) -> (Factorization, PolynomialFamily, PolynomialFamily) {
        let f = FactorPair::new(mu, n).unwrap().left;
        let (a, b) = (family_a_dual(&f), family_b(&f));
        (f, a, b)
    }

    #[test]
    fn lebesgue_closed_form() {
        let (_, a, b) = setup(&MatrixFunctional::lebesgue(), 6);
        let (x, y) = (C64::new(2.0, 0.0), C64::new(0.0, 1.0));
        let k = kernel_direct(&a, &b, 3, x, y).unwrap().value[(0, 0)];
        let want = C64::new(1.0, 0.0) + x / y + y / x;
        assert!((k - want).norm() < 1e-15);
    }

    #[test]
    fn cosine_abc_matches_hand_inverse() {
        let mu = MatrixFunctional::scalar(ScalarFunctional::weight(LaurentPolynomial::from_real_slice(-1, &[0.5, 1.0, 0.5])));
        let (f, a, b) = setup(&mu, 4);
        let one = C64::new(1.0, 0.0);
        // M = [[1, 1/2], [1/2, 1]], Z(1) = (1, 1): K = 1ᵀ M⁻¹ 1 = 4/3
        let k = abc_kernel(&f, 2, one, one).unwrap().value[(0, 0)];
        assert!((k - C64::new(4.0 / 3.0, 0.0)).norm() < 1e-14);
        let kd = kernel_direct(&a, &b, 2, one, one).unwrap().value[(0, 0)];
        assert!((kd - k).norm() < 1e-14);
    }

    #[test]
    fn cd_matches_direct_for_lebesgue() {
        let (f, a, b) = setup(&MatrixFunctional::lebesgue(), 12);
        let t = recurrence_t(&f, 8).unwrap();
        let (x, y) = (C64::new(2.0, 0.0), C64::new(0.0, 1.0));
        let cd = kernel_cd_formula(&a, &b, &t.op, 3, x, y).unwrap();
        let d = kernel_direct(&a, &b, 3, x, y).unwrap();
        assert!(relative_deviation(&d, &cd) < 1e-14);
        assert_eq!(
            kernel_cd_formula(&a, &b, &t.op, 3, x, x).unwrap_err(),
            Error::PoleAtDiagonal
        );
    }

    #[test]
    fn reproducing_for_lebesgue() {
        let (_, a, b) = setup(&MatrixFunctional::lebesgue(), 6);
        let pairs = [(C64::new(0.3, 0.9), C64::new(-1.2, 0.4)), (C64::new(2.0, 0.0), C64::new(0.5, 0.5))];
        let r = reproducing_check(&a, &b, &MatrixFunctional::lebesgue(), 4, &pairs).unwrap();
        assert!(r < 1e-13);
    }
}
