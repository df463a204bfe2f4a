//! Kernel of a 2x1 measure evaluated as a direct sum, by the
//! Christoffel-Darboux formula and through the inverse moment matrix.
use cmv_mop::cmv::{family_a_dual, family_b, FactorPair};
use cmv_mop::kernels::{abc_kernel, kernel_cd_formula, kernel_direct, relative_deviation, reproducing_check};
use cmv_mop::random::{random_measure, rng, unit_point, RandomSpec};
use cmv_mop::spectral::recurrence_t;

fn main() -> cmv_mop::Result<()> {
    let mu = random_measure(RandomSpec::new(2, 1, 50), 2);
    let n = 40;
    let reach = n + 4;
    let pair = FactorPair::new(&mu, reach + 6)?;
    let (a, b) = (family_a_dual(&pair.left), family_b(&pair.left));
    let t = recurrence_t(&pair.left, reach)?;
    let mut r = rng(9);
    for _ in 0..4 {
        let (x, y) = (unit_point(&mut r), unit_point(&mut r));
        let k = kernel_direct(&a, &b, n, x, y)?;
        let cd = kernel_cd_formula(&a, &b, &t.op, n, x, y)?;
        let abc = abc_kernel(&pair.left, n, x, y)?;
        println!(
            "K = [{:.4}, {:.4}]  CD gap {:.1e}  ABC gap {:.1e}",
            k.value[(0, 0)],
            k.value[(0, 1)],
            relative_deviation(&k, &cd),
            relative_deviation(&k, &abc)
        );
    }
    let pts = [(unit_point(&mut r), unit_point(&mut r))];
    println!("reproducing residual {:.2e}", reproducing_check(&a, &b, &mu, n, &pts)?);
    Ok(())
}
