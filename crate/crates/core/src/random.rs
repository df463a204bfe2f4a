//! Seeded random functionals.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::laurent::LaurentPolynomial;
use crate::measures::{MatrixFunctional, ScalarFunctional};

#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub q: usize,
    pub p: usize,
    /// Weights carry exponents in `-degree..=degree`.
    pub degree: i32,
    /// Added to the constant coefficient of each diagonal entry `(b, b)`.
    pub dominance: f64,
    /// Force `c_{-n} = conj(c_n)` entrywise.
    pub real: bool,
}

impl RandomSpec {
    pub fn new(q: usize, p: usize, degree: i32) -> Self {
        Self { q, p, degree, dominance: 0.0, real: false }
    }

    pub fn dominance(mut self, d: f64) -> Self {
        self.dominance = d;
        self
    }

    pub fn real(mut self) -> Self {
        self.real = true;
        self
    }
}

fn unit_box(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

pub fn random_weight(rng: &mut ChaCha8Rng, degree: i32, real: bool) -> LaurentPolynomial {
    if real {
        let mut terms = vec![(0, C64::new(rng.gen_range(-1.0..=1.0), 0.0))];
        for k in 1..=degree {
            let c = unit_box(rng);
            terms.push((k, c));
            terms.push((-k, c.conj()));
        }
        LaurentPolynomial::from_coeffs(terms)
    } else {
        LaurentPolynomial::from_coeffs((-degree..=degree).map(|k| (k, unit_box(rng))))
    }
}

/// Coefficients uniform in `[-1,1]²`, plus the diagonal shift.
pub fn random_measure(spec: RandomSpec, seed: u64) -> MatrixFunctional {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Vec::with_capacity(spec.q * spec.p);
    for b in 0..spec.q {
        for a in 0..spec.p {
            let mut w = random_weight(&mut rng, spec.degree, spec.real);
            if b == a && spec.dominance != 0.0 {
                w = &w + &LaurentPolynomial::constant(C64::new(spec.dominance, 0.0));
            }
            grid.push(ScalarFunctional::weight(w));
        }
    }
    MatrixFunctional::new(spec.q, spec.p, grid).expect("shape fixed by spec")
}

/// Real scalar weight that is strictly positive on the circle.
pub fn random_positive_weight(degree: i32, seed: u64) -> MatrixFunctional {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = random_weight(&mut rng, degree, true);
    let bound: f64 = w.iter().map(|(_, c)| c.norm()).sum();
    let w = &w + &LaurentPolynomial::constant(C64::new(bound + 0.5, 0.0));
    MatrixFunctional::scalar(ScalarFunctional::weight(w))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Point on the unit circle with uniform angle.
pub fn unit_point(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}
