//! The four polynomial families of a random 2x3 measure: degree ceilings and
//! biorthogonality.
use cmv_mop::cmv::{biorthogonality_residual, check_degrees, family_a, family_ascr, family_b, family_bscr, FactorPair};
use cmv_mop::random::{random_measure, RandomSpec};

fn main() -> cmv_mop::Result<()> {
    let mu = random_measure(RandomSpec::new(2, 3, 30).dominance(3.0), 11);
    let n = 30;
    let pair = FactorPair::new(&mu, n)?;
    let (b, a) = (family_b(&pair.left), family_a(&pair.left));
    println!("B_4 = ({}, {})", b.get(4, 0), b.get(4, 1));
    println!("biorthogonality residual: {:.2e}", biorthogonality_residual(&b, &a, &mu, n));
    for f in [&b, &a, &family_bscr(&pair.right), &family_ascr(&pair.right)] {
        let r = check_degrees(f);
        println!("{:?}: {} ceiling violations, {}/{} ceilings attained", f.kind, r.violations, r.attained, r.attain_sites);
    }
    Ok(())
}
