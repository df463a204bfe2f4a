//! Sparse Laurent polynomials and balanced perturbation multipliers.
use cmv_mop::laurent::LaurentPolynomial;
use cmv_mop::transforms::BalancedLaurent;
use cmv_mop::C64;

fn main() -> cmv_mop::Result<()> {
    let p = LaurentPolynomial::from_real_slice(-2, &[1.0, 0.0, 3.0, -1.0]);
    let q = LaurentPolynomial::from_coeffs([(-1, C64::new(0.0, 1.0)), (2, C64::new(2.0, 0.0))]);
    let pq = &p * &q;
    println!("p     = {p}");
    println!("q     = {q}");
    println!("p q   = {pq}  degrees ({}, {})", pq.deg_minus(), pq.deg_plus());

    let z = C64::from_polar(1.0, 0.7);
    let gap = pq.evaluate(z)? - p.evaluate(z)? * q.evaluate(z)?;
    println!("|pq(z) - p(z)q(z)| = {:.2e}", gap.norm());

    // W(z) = (z - 2)(z - 1/2)/z
    let w = BalancedLaurent::new(C64::new(1.0, 0.0), vec![C64::new(2.0, 0.0), C64::new(0.5, 0.0)])?;
    println!("W     = {}", w.poly());
    let x = C64::new(3.0, 0.0);
    let dw = w.delta(x);
    println!("dW(x) = {dw}  (W(z) - W(x))/(z - x)");
    println!("W'(2) = {}", w.derivative_at_root(0));
    println!("json  = {}", cmv_mop::report::to_json(w.poly()).unwrap());
    Ok(())
}
