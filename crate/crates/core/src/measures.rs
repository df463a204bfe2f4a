//! Matrices of functionals on the unit circle and their moments.
//!
//! Each entry is a Laurent-polynomial weight `w` integrated against
//! `dz/(2πiz)` plus finitely many point masses, which may sit off the circle.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: C64,
    pub mass: C64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarFunctional {
    pub ac: LaurentPolynomial,
    pub atoms: Vec<Atom>,
}

impl ScalarFunctional {
    pub fn new(ac: LaurentPolynomial, atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if a.location == C64::new(0.0, 0.0) {
                return Err(Error::ShapeMismatch("atom at the origin".into()));
            }
            if atoms[..i].iter().any(|b| b.location == a.location) {
                return Err(Error::ShapeMismatch("repeated atom location".into()));
            }
        }
        Ok(Self { ac, atoms })
    }

    pub fn weight(ac: LaurentPolynomial) -> Self {
        Self { ac, atoms: Vec::new() }
    }

    pub fn lebesgue() -> Self {
        Self::weight(LaurentPolynomial::one())
    }

    /// `∮ z^n dμ`.
    pub fn moment(&self, n: i32) -> C64 {
        self.ac.coeff(-n)
            + self
                .atoms
                .iter()
                .map(|a| a.mass * a.location.powi(n))
                .sum::<C64>()
    }

    /// `∮ P dμ` for a Laurent polynomial `P`, i.e. `Σ_k P_k c_k`.
    pub fn apply(&self, p: &LaurentPolynomial) -> C64 {
        let ac: C64 = p.iter().map(|(k, c)| c * self.ac.coeff(-k)).sum();
        let at: C64 = self
            .atoms
            .iter()
            .map(|a| a.mass * p.eval_unchecked(a.location))
            .sum();
        ac + at
    }

    pub fn is_zero(&self) -> bool {
        self.ac.is_zero() && self.atoms.is_empty()
    }
}

/// q×p grid of scalar functionals, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFunctional {
    q: usize,
    p: usize,
    grid: Vec<ScalarFunctional>,
}

impl MatrixFunctional {
    pub fn new(q: usize, p: usize, grid: Vec<ScalarFunctional>) -> Result<Self> {
        if q == 0 || p == 0 || grid.len() != q * p {
            return Err(Error::ShapeMismatch(format!(
                "{} functionals for a {q}x{p} grid",
                grid.len()
            )));
        }
        Ok(Self { q, p, grid })
    }

    pub fn scalar(f: ScalarFunctional) -> Self {
        Self { q: 1, p: 1, grid: vec![f] }
    }

    pub fn lebesgue() -> Self {
        Self::scalar(ScalarFunctional::lebesgue())
    }

    /// Normalized Lebesgue measure on the diagonal of an r×r grid.
    pub fn lebesgue_diagonal(r: usize) -> Self {
        let grid = (0..r * r)
            .map(|i| {
                if i / r == i % r {
                    ScalarFunctional::lebesgue()
                } else {
                    ScalarFunctional::default()
                }
            })
            .collect();
        Self { q: r, p: r, grid }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Entry `(b, a)`, zero-based.
    pub fn get(&self, b: usize, a: usize) -> &ScalarFunctional {
        &self.grid[b * self.p + a]
    }

    pub fn get_mut(&mut self, b: usize, a: usize) -> &mut ScalarFunctional {
        &mut self.grid[b * self.p + a]
    }

    pub fn moment(&self, n: i32) -> DMatrix<C64> {
        DMatrix::from_fn(self.q, self.p, |b, a| self.get(b, a).moment(n))
    }

    /// Row `b` multiplied by `w[b]`; atoms annihilated by the factor are dropped.
    pub fn scale_rows(&self, w: &[LaurentPolynomial]) -> Result<Self> {
        if w.len() != self.q {
            return Err(Error::ShapeMismatch(format!(
                "{} row factors for q = {}",
                w.len(),
                self.q
            )));
        }
        let mut grid = Vec::with_capacity(self.grid.len());
        for b in 0..self.q {
            for a in 0..self.p {
                let f = self.get(b, a);
                let atoms = f
                    .atoms
                    .iter()
                    .filter_map(|at| {
                        let m = at.mass * w[b].eval_unchecked(at.location);
                        (m.norm() >= 1e-14 * at.mass.norm()).then_some(Atom {
                            location: at.location,
                            mass: m,
                        })
                    })
                    .collect();
                grid.push(ScalarFunctional {
                    ac: &w[b] * &f.ac,
                    atoms,
                });
            }
        }
        Ok(Self { q: self.q, p: self.p, grid })
    }

    /// The conjugate functional, with moments `conj(c_{-n})`.
    ///
    /// Atom locations are reflected through the circle (`x -> 1/conj(x)`),
    /// which leaves atoms on the circle in place.
    pub fn conjugate(&self) -> Self {
        let grid = self
            .grid
            .iter()
            .map(|f| ScalarFunctional {
                ac: f.ac.conj_reflect(),
                atoms: f
                    .atoms
                    .iter()
                    .map(|a| Atom {
                        location: a.location.conj().inv(),
                        mass: a.mass.conj(),
                    })
                    .collect(),
            })
            .collect();
        Self { q: self.q, p: self.p, grid }
    }

    pub fn transpose(&self) -> Self {
        let mut grid = Vec::with_capacity(self.grid.len());
        for a in 0..self.p {
            for b in 0..self.q {
                grid.push(self.get(b, a).clone());
            }
        }
        Self { q: self.p, p: self.q, grid }
    }

    pub fn adjoint(&self) -> Self {
        self.conjugate().transpose()
    }

    /// Max |c_n - conj(c_{-n})| over |n| ≤ `range`, entrywise.
    pub fn reality_defect(&self, range: i32) -> f64 {
        let mut worst: f64 = 0.0;
        for f in &self.grid {
            for n in 0..=range {
                worst = worst.max((f.moment(n) - f.moment(-n).conj()).norm());
            }
        }
        worst
    }

    /// Largest exponent magnitude of any weight.
    pub fn ac_degree(&self) -> i32 {
        self.grid
            .iter()
            .filter(|f| !f.ac.is_zero())
            .map(|f| f.ac.deg_plus().abs().max(f.ac.deg_minus().abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn has_atoms(&self) -> bool {
        self.grid.iter().any(|f| !f.atoms.is_empty())
    }
}
