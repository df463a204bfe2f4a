//! Christoffel perturbation of a 2x2 measure by diag(W_1, W_2): connector
//! from root conditions, perturbed families, and the direct refactorization
//! of W mu as the oracle.
use cmv_mop::random::{random_measure, rng, unit_point, RandomSpec};
use cmv_mop::transforms::{christoffel_oracle, BalancedLaurent, PerturbationMatrix};
use cmv_mop::C64;

fn main() -> cmv_mop::Result<()> {
    let c = C64::new;
    let w = PerturbationMatrix::new(vec![
        BalancedLaurent::new(c(1.0, 0.0), vec![c(2.0, 0.0), c(0.5, 0.0)])?,
        BalancedLaurent::new(c(0.7, 0.2), vec![c(-1.5, 0.3), c(0.2, -0.4)])?,
    ])?;
    let mu = random_measure(RandomSpec::new(2, 2, 6).dominance(3.0), 1);
    let mut r = rng(3);
    let pts: Vec<C64> = (0..5).map(|_| unit_point(&mut r)).collect();
    let pairs: Vec<(C64, C64)> = (0..5).map(|_| (unit_point(&mut r), unit_point(&mut r))).collect();
    let o = christoffel_oracle(&mu, &w, 16, &pts, &pairs)?;
    println!("connector rows 0..3 (outer entry last):");
    for row in o.connector.rows.iter().take(3) {
        let s: Vec<String> = row.iter().map(|v| format!("{v:.3}")).collect();
        println!("  {}", s.join("  "));
    }
    println!("worst row condition   {:.1e}", o.connector.cond.iter().cloned().fold(0.0, f64::max));
    println!("connector vs factors  {:.1e}", o.connector_vs_factors);
    println!("B-hat vs oracle       {:.1e}", o.b_hat);
    println!("A-hat vs oracle       {:.1e}", o.a_hat);
    println!("kernel connection     {:.1e}", o.kernel_connection);

    match BalancedLaurent::new(c(1.0, 0.0), vec![C64::from_polar(1.0, 0.4), c(3.0, 0.0)]) {
        Err(e) => println!("root on the circle: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
