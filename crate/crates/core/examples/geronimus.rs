//! Geronimus perturbation: a 1x2 measure with masses at the roots of W,
//! recovered from second-kind values of W times it.
use cmv_mop::measures::Atom;
use cmv_mop::random::{random_measure, rng, unit_point, RandomSpec};
use cmv_mop::transforms::{geronimus_oracle, BalancedLaurent, PerturbationMatrix};
use cmv_mop::C64;

fn main() -> cmv_mop::Result<()> {
    let c = C64::new;
    let w = PerturbationMatrix::new(vec![BalancedLaurent::new(c(1.0, 0.0), vec![c(2.0, 0.0), c(0.5, 0.0)])?])?;
    let mut check = random_measure(RandomSpec::new(1, 2, 30), 0);
    check.get_mut(0, 0).atoms.push(Atom { location: c(2.0, 0.0), mass: c(0.1, 0.05) });
    check.get_mut(0, 1).atoms.push(Atom { location: c(0.5, 0.0), mass: c(-0.05, 0.1) });

    let mut r = rng(8);
    let pts: Vec<C64> = (0..5).map(|_| unit_point(&mut r)).collect();
    let triples = [(unit_point(&mut r), unit_point(&mut r), unit_point(&mut r) * 2.0)];
    let o = geronimus_oracle(&check, &w, 20, &pts, &triples)?;
    println!("connector determined from column {}", o.connector.first_col);
    println!("F-value connector vs factors  {:.1e}", o.connector_vs_factors);
    println!("F vanishing                   {:.1e}", o.f_vanishing);
    println!("A-check vs oracle             {:.1e}", o.a_check);
    println!("B-check vs oracle             {:.1e}", o.b_check);
    println!("second-kind connections       {:.1e}", o.connections.max());

    let mut stray = check.clone();
    stray.get_mut(0, 1).atoms.push(Atom { location: c(3.0, 0.0), mass: c(1.0, 0.0) });
    if let Err(e) = geronimus_oracle(&stray, &w, 20, &pts, &triples) {
        println!("atom off the roots: {e}");
    }
    Ok(())
}
