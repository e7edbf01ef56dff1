use std::fmt;

use super::{closest_vector, shortest_vector, DyadicVector, Lattice};
use crate::error::{Error, Result};

/// Ground-truth label of a coGapCVP′ instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    Yes,
    No,
    Unpromised,
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::Yes => "YES",
            Truth::No => "NO",
            Truth::Unpromised => "UNPROMISED",
        })
    }
}

/// Gap thresholds in the lattice's Euclidean units.
///
/// YES: `lambda_1 >= yes_min` and `d(v, L) > yes_min`. NO: `d(v, L) <= no_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapThresholds {
    pub yes_min: f64,
    pub no_max: f64,
}

impl GapThresholds {
    /// `4 sqrt(n) + 1` and `1/3`.
    pub fn desk(n: usize) -> Self {
        Self {
            yes_min: 4.0 * (n as f64).sqrt() + 1.0,
            no_max: 1.0 / 3.0,
        }
    }

    pub fn classify(&self, lambda1: f64, dist: f64) -> Truth {
        if dist <= self.no_max {
            Truth::No
        } else if dist > self.yes_min && lambda1 >= self.yes_min {
            Truth::Yes
        } else {
            Truth::Unpromised
        }
    }
}

/// A lattice with a target `v = sum a_i v_i`, `a_i = num_i / 2^ell` in `[0, 1)`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub lattice: Lattice,
    pub target: DyadicVector,
    /// Factor the generator applied to reach the gap's length unit.
    pub scale: f64,
    pub truth: Truth,
    pub lambda1: f64,
    pub distance: f64,
}

impl Instance {
    /// Builds the instance and labels it with the brute-force oracles.
    pub fn new(
        lattice: Lattice,
        target: DyadicVector,
        scale: f64,
        thresholds: GapThresholds,
    ) -> Result<Self> {
        if target.num.len() != lattice.n() {
            return Err(Error::DimensionMismatch {
                expected: lattice.n(),
                got: target.num.len(),
            });
        }
        if !target.in_unit_cube() {
            return Err(Error::InvalidParameter(
                "target coefficients must lie in [0, 1)".into(),
            ));
        }
        let lambda1 = shortest_vector(&lattice)?.length;
        let v = lattice.combine(&target.coefficients());
        let distance = closest_vector(&v, &lattice)?.distance;
        Ok(Self {
            truth: thresholds.classify(lambda1, distance),
            lattice,
            target,
            scale,
            lambda1,
            distance,
        })
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn ell(&self) -> u32 {
        self.target.log_den
    }

    pub fn target_vector(&self) -> Vec<f64> {
        self.lattice.combine(&self.target.coefficients())
    }

    pub fn relabel(&mut self, thresholds: GapThresholds) {
        self.truth = thresholds.classify(self.lambda1, self.distance);
    }
}
