//! Run configuration: measure, perturbation, evaluation points, tolerances.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::laurent::LaurentPolynomial;
use crate::measures::{Atom, MatrixFunctional, ScalarFunctional};
use crate::random::{random_measure, RandomSpec};
use crate::transforms::{BalancedLaurent, PerturbationMatrix};

/// Raised for anything the user can fix in the config or the flags.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn cfg_err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub measure: Option<MeasureSpec>,
    pub random: Option<RandomMeasureSpec>,
    pub n: Option<usize>,
    pub margin: Option<usize>,
    pub seed: Option<u64>,
    /// Largest `|k|` exported by `moments`; defaults to `n`.
    pub moment_bound: Option<i32>,
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub pairs: Vec<[[f64; 2]; 2]>,
    pub perturbation: Option<PerturbationSpec>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Added to one entry of the left moment matrix before factorizing.
    pub inject: Option<Injection>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub q: usize,
    pub p: usize,
    pub entries: Vec<EntrySpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub row: usize,
    pub col: usize,
    #[serde(default)]
    pub ac_coeffs: Vec<(i32, f64, f64)>,
    #[serde(default)]
    pub atoms: Vec<[f64; 4]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMeasureSpec {
    pub q: usize,
    pub p: usize,
    pub degree: i32,
    #[serde(default)]
    pub dominance: f64,
    #[serde(default)]
    pub real: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    /// One balanced Laurent polynomial per row of the measure.
    pub entries: Vec<BalancedSpec>,
    /// Geronimus masses at the roots; ignored by Christoffel.
    #[serde(default)]
    pub masses: Vec<MassSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalancedSpec {
    pub leading: [f64; 2],
    pub roots: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassSpec {
    pub row: usize,
    pub col: usize,
    pub root: usize,
    pub mass: [f64; 2],
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Injection {
    pub row: usize,
    pub col: usize,
    pub delta: [f64; 2],
}

pub fn c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| cfg_err(format!("{}: {}", path.display(), e.0)))
    }

    /// serde_json reports the line, column and offending field.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))
    }

    /// Explicit measure, seeded random measure, or Lebesgue when neither is given.
    pub fn build_measure(&self, seed: u64) -> Result<MatrixFunctional, ConfigError> {
        match (&self.measure, &self.random) {
            (Some(_), Some(_)) => Err(cfg_err("give either `measure` or `random`, not both")),
            (Some(m), None) => m.build(),
            (None, Some(r)) => {
                if r.q == 0 || r.p == 0 || r.degree < 0 {
                    return Err(cfg_err("random: q, p must be positive and degree non-negative"));
                }
                let mut spec = RandomSpec::new(r.q, r.p, r.degree).dominance(r.dominance);
                if r.real {
                    spec = spec.real();
                }
                Ok(random_measure(spec, seed))
            }
            (None, None) => Ok(MatrixFunctional::lebesgue()),
        }
    }
}

impl MeasureSpec {
    pub fn build(&self) -> Result<MatrixFunctional, ConfigError> {
        let (q, p) = (self.q, self.p);
        if q == 0 || p == 0 {
            return Err(cfg_err("measure: q and p must be positive"));
        }
        let mut grid = vec![None; q * p];
        for (idx, e) in self.entries.iter().enumerate() {
            if e.row >= q || e.col >= p {
                return Err(cfg_err(format!("measure.entries[{idx}]: ({}, {}) outside {q}x{p}", e.row, e.col)));
            }
            let slot = &mut grid[e.row * p + e.col];
            if slot.is_some() {
                return Err(cfg_err(format!("measure.entries[{idx}]: duplicate entry ({}, {})", e.row, e.col)));
            }
            let ac = LaurentPolynomial::from_coeffs(e.ac_coeffs.iter().map(|&(k, re, im)| (k, C64::new(re, im))));
            let atoms = e
                .atoms
                .iter()
                .map(|a| Atom { location: C64::new(a[0], a[1]), mass: C64::new(a[2], a[3]) })
                .collect();
            let f = ScalarFunctional::new(ac, atoms).map_err(|err| cfg_err(format!("measure.entries[{idx}]: {err}")))?;
            *slot = Some(f);
        }
        let grid = grid.into_iter().map(Option::unwrap_or_default).collect();
        MatrixFunctional::new(q, p, grid).map_err(|e| cfg_err(e.to_string()))
    }
}

impl PerturbationSpec {
    /// Numerical admissibility errors (roots on the circle, repeated roots)
    /// are returned as library errors, not config errors.
    pub fn build(&self) -> crate::Result<PerturbationMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| BalancedLaurent::new(c64(e.leading), e.roots.iter().copied().map(c64).collect()))
            .collect::<crate::Result<Vec<_>>>()?;
        PerturbationMatrix::new(entries)
    }

    /// `μ̌` from the a.c. part of `mu` plus the configured masses at the roots.
    pub fn geronimus_base(&self, mu: &MatrixFunctional, w: &PerturbationMatrix) -> Result<MatrixFunctional, ConfigError> {
        let mut out = mu.clone();
        for (idx, m) in self.masses.iter().enumerate() {
            if m.row >= mu.q() || m.col >= mu.p() || m.root >= 2 * w.d() {
                return Err(cfg_err(format!("perturbation.masses[{idx}]: index out of range")));
            }
            let location = w.entry(m.row).roots()[m.root];
            out.get_mut(m.row, m.col).atoms.push(Atom { location, mass: c64(m.mass) });
        }
        Ok(out)
    }
}

pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("factorization", 1e-8),
    ("biorthogonality", 1e-9),
    ("degrees", 0.0),
    ("recurrence", 1e-9),
    ("ladder", 1e-9),
    ("szego", 1e-9),
    ("kernel", 1e-9),
    ("reproducing", 1e-9),
    ("christoffel", 1e-8),
    ("christoffel_kernel", 1e-9),
    ("geronimus", 1e-7),
    ("geronimus_connection", 1e-8),
];

#[derive(Clone, Debug)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(DEFAULT_TOLERANCES.iter().copied().collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        let key = DEFAULT_TOLERANCES
            .iter()
            .map(|(k, _)| *k)
            .find(|k| *k == name)
            .ok_or_else(|| cfg_err(format!("unknown tolerance `{name}`")))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(cfg_err(format!("tolerance `{name}` must be a non-negative number")));
        }
        self.0.insert(key, value);
        Ok(())
    }

    /// `NAME=VAL`.
    pub fn apply_override(&mut self, arg: &str) -> Result<(), ConfigError> {
        let (name, val) = arg
            .split_once('=')
            .ok_or_else(|| cfg_err(format!("--tol-override expects NAME=VAL, got `{arg}`")))?;
        let v: f64 = val.trim().parse().map_err(|_| cfg_err(format!("--tol-override: `{val}` is not a number")))?;
        self.set(name.trim(), v)
    }
}
