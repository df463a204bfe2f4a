//! Moments of a 1x2 matrix of weights, the CMV moment matrix and its
//! Gauss-Borel factors.
use cmv_mop::cmv::{build_moment_matrix, gauss_borel, Side};
use cmv_mop::laurent::LaurentPolynomial;
use cmv_mop::measures::{Atom, MatrixFunctional, ScalarFunctional};
use cmv_mop::C64;

fn main() -> cmv_mop::Result<()> {
    let w1 = LaurentPolynomial::from_real_slice(-1, &[0.5, 2.0, 0.5]);
    let w2 = LaurentPolynomial::from_coeffs([(-2, C64::new(0.1, 0.3)), (0, C64::new(1.0, 0.0)), (3, C64::new(-0.4, 0.2))]);
    let atom = Atom { location: C64::new(0.0, 1.0), mass: C64::new(0.25, 0.0) };
    let mu = MatrixFunctional::new(
        1,
        2,
        vec![ScalarFunctional::weight(w1), ScalarFunctional::new(w2, vec![atom])?],
    )?;
    for k in -3..=3 {
        let c = mu.moment(k);
        println!("c_{k:<2} = [{:.3}, {:.3}]", c[(0, 0)], c[(0, 1)]);
    }

    let n = 12;
    let t = build_moment_matrix(&mu, n, Side::Left);
    let f = gauss_borel(&t)?;
    println!("n = {n}: |L M U - I| = {:.2e}, smallest pivot {:.3e}", f.residual, f.min_pivot());

    let singular = MatrixFunctional::lebesgue_diagonal(1);
    let twice = MatrixFunctional::new(1, 2, vec![singular.get(0, 0).clone(), singular.get(0, 0).clone()])?;
    match gauss_borel(&build_moment_matrix(&twice, 4, Side::Left)) {
        Err(e) => println!("two equal weights: {e}"),
        Ok(_) => println!("two equal weights factorized"),
    }
    Ok(())
}
