//! Banded recurrence matrices T, R, S of a mixed measure and the
//! residuals of their eigen-relations.
use cmv_mop::random::{random_measure, rng, unit_point, RandomSpec};
use cmv_mop::spectral::{recurrence_residuals, SpectralData};

fn main() -> cmv_mop::Result<()> {
    let mu = random_measure(RandomSpec::new(1, 2, 40), 5);
    let (n, margin) = (24, 10);
    let d = SpectralData::new(&mu, n, margin)?;
    println!(
        "T: {} sub-, {} superdiagonals; lower/upper forms agree to {:.1e}",
        d.t.op.lower(),
        d.t.op.upper(),
        d.t.form_agreement
    );
    let mut r = rng(1);
    let zs: Vec<_> = (0..5).map(|_| unit_point(&mut r)).collect();
    for (name, v) in recurrence_residuals(&d, &zs).entries() {
        println!("{name:<22} {v:.2e}");
    }
    let json = cmv_mop::report::to_json(&d.szego.r).unwrap();
    println!("R as banded JSON: {}...", &json[..120]);
    Ok(())
}
