//! Cauchy transforms of the families inside and outside the circle.
use cmv_mop::cmv::{family_a_dual, family_b, FactorPair};
use cmv_mop::random::{random_measure, RandomSpec};
use cmv_mop::secondkind::{cauchy_c, cauchy_d, kernel_cauchy_c};
use cmv_mop::C64;

fn main() -> cmv_mop::Result<()> {
    let mu = random_measure(RandomSpec::new(1, 2, 10).dominance(2.0), 4);
    let n = 8;
    let pair = FactorPair::new(&mu, n + 4)?;
    let (a, b) = (family_a_dual(&pair.left), family_b(&pair.left));
    for z in [C64::new(2.0, 0.5), C64::new(0.1, -0.4)] {
        let c = cauchy_c(&mu, &a, n, z)?;
        let d = cauchy_d(&mu, &b, n, z)?;
        println!("z = {z:.2}");
        println!("  C_0..3 = {:.3} {:.3} {:.3} {:.3}", c[(0, 0)], c[(0, 1)], c[(0, 2)], c[(0, 3)]);
        println!("  D_3    = {:.3} {:.3}", d[(3, 0)], d[(3, 1)]);
        println!("  K_C(z, 1) = {:.4}", kernel_cauchy_c(&mu, &a, &b, n, z, C64::new(1.0, 0.0))?[(0, 0)]);
    }
    match cauchy_c(&mu, &a, n, C64::from_polar(1.0, 0.3)) {
        Err(e) => println!("on the circle: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
