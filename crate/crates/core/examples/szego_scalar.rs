//! Scalar reduction: Verblunsky coefficients from the lower factor and
//! Szego's recursion for the cosine weight 1 + (z + 1/z)/2.
use cmv_mop::cmv::{family_b, FactorPair};
use cmv_mop::laurent::LaurentPolynomial;
use cmv_mop::measures::{MatrixFunctional, ScalarFunctional};
use cmv_mop::spectral::{szego_phi, szego_recurrence_residual, verblunsky, BlockLadder};

fn main() -> cmv_mop::Result<()> {
    let w = LaurentPolynomial::from_real_slice(-1, &[0.5, 1.0, 0.5]);
    let mu = MatrixFunctional::scalar(ScalarFunctional::weight(w));
    let pair = FactorPair::new(&mu, 24)?;
    let ladder = BlockLadder::new(&pair)?;
    let count = 8;
    let alpha = verblunsky(&mu, &ladder, count)?;
    let (phi, star) = szego_phi(&family_b(&pair.left), &ladder, count + 1)?;
    for (k, a) in alpha.iter().enumerate() {
        println!("a_{k} = {:+.6}   Phi_{} = {}", a.re, k + 1, phi[k + 1]);
    }
    println!("recursion residual {:.2e}", szego_recurrence_residual(&phi, &star, &alpha));
    Ok(())
}
