//! Exhaustive SVP/CVP by box enumeration.
//!
//! For a lattice point `p = sum c_i v_i` at distance at most `R` from `x`,
//! `|c_i - coeff_i(x)| <= |row_i(B^{-T})| * R`, so scanning that integer box
//! is complete. `R` comes from any known lattice point (Babai rounding for
//! CVP, the shortest basis row for SVP).

use super::{norm, Lattice};
use crate::error::{Error, Result};

/// Largest dimension the enumeration oracles accept.
pub const ENUMERATION_LIMIT: usize = 5;

const BOX_SLACK: f64 = 1e-9;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosestVector {
    /// Integer coefficients of the closest lattice point.
    pub coeffs: Vec<i64>,
    pub point: Vec<f64>,
    pub distance: f64,
    /// `x - point`, the Voronoi representative of `x`.
    pub tau: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestVector {
    pub coeffs: Vec<i64>,
    pub vector: Vec<f64>,
    pub length: f64,
}

fn check_dim(l: &Lattice, x_len: Option<usize>) -> Result<()> {
    if l.n() > ENUMERATION_LIMIT {
        return Err(Error::DimensionLimit {
            n: l.n(),
            limit: ENUMERATION_LIMIT,
        });
    }
    if let Some(len) = x_len {
        if len != l.n() {
            return Err(Error::DimensionMismatch {
                expected: l.n(),
                got: len,
            });
        }
    }
    Ok(())
}

/// Visits every integer vector in `lo..=hi` in lexicographic order.
fn for_each_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let n = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut c = lo.to_vec();
    loop {
        f(&c);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] < hi[i] {
                c[i] += 1;
                break;
            }
            c[i] = lo[i];
        }
    }
}

fn dist_sq_to(l: &Lattice, x: &[f64], c: &[i64], scratch: &mut [f64]) -> f64 {
    scratch.copy_from_slice(x);
    for (i, &ci) in c.iter().enumerate() {
        if ci != 0 {
            let f = ci as f64;
            for (s, &v) in scratch.iter_mut().zip(l.row(i)) {
                *s -= f * v;
            }
        }
    }
    scratch.iter().map(|v| v * v).sum()
}

/// Closest lattice point to `x`, ties broken by lexicographically smallest coefficients.
pub fn closest_vector(x: &[f64], lattice: &Lattice) -> Result<ClosestVector> {
    check_dim(lattice, Some(x.len()))?;
    let n = lattice.n();
    let center = lattice.coefficients_of(x);
    let babai: Vec<i64> = center.iter().map(|c| c.round() as i64).collect();
    let mut scratch = vec![0.0; n];
    let r = dist_sq_to(lattice, x, &babai, &mut scratch).sqrt() * (1.0 + 1e-12) + BOX_SLACK;

    let lo: Vec<i64> = (0..n)
        .map(|i| (center[i] - lattice.dual_norm(i) * r - BOX_SLACK).ceil() as i64)
        .collect();
    let hi: Vec<i64> = (0..n)
        .map(|i| (center[i] + lattice.dual_norm(i) * r + BOX_SLACK).floor() as i64)
        .collect();

    let mut best = babai.clone();
    let mut best_d2 = f64::INFINITY;
    for_each_in_box(&lo, &hi, |c| {
        let d2 = dist_sq_to(lattice, x, c, &mut scratch);
        if d2 < best_d2 - TIE_EPS * (1.0 + best_d2) || best_d2.is_infinite() {
            best_d2 = d2;
            best.copy_from_slice(c);
        }
    });
    let point = lattice.combine_int(&best);
    let tau: Vec<f64> = x.iter().zip(&point).map(|(a, b)| a - b).collect();
    Ok(ClosestVector {
        coeffs: best,
        distance: norm(&tau),
        point,
        tau,
    })
}

/// Distance from `x` to the lattice.
pub fn distance_to_lattice(x: &[f64], lattice: &Lattice) -> Result<f64> {
    closest_vector(x, lattice).map(|c| c.distance)
}

/// A shortest nonzero lattice vector, ties broken lexicographically.
pub fn shortest_vector(lattice: &Lattice) -> Result<ShortestVector> {
    check_dim(lattice, None)?;
    let n = lattice.n();
    let r = (0..n)
        .map(|i| norm(lattice.row(i)))
        .fold(f64::INFINITY, f64::min)
        * (1.0 + 1e-12)
        + BOX_SLACK;
    let hi: Vec<i64> = (0..n)
        .map(|i| (lattice.dual_norm(i) * r + BOX_SLACK).floor() as i64)
        .collect();
    let lo: Vec<i64> = hi.iter().map(|v| -v).collect();
    let zero = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut best: Option<(Vec<i64>, f64)> = None;
    for_each_in_box(&lo, &hi, |c| {
        if c.iter().all(|&v| v == 0) {
            return;
        }
        let d2 = dist_sq_to(lattice, &zero, c, &mut scratch);
        let better = match &best {
            None => true,
            Some((_, b)) => d2 < b - TIE_EPS * (1.0 + b),
        };
        if better {
            best = Some((c.to_vec(), d2));
        }
    });
    let (coeffs, _) = best.expect("basis rows lie inside the search box");
    let vector = lattice.combine_int(&coeffs);
    Ok(ShortestVector {
        length: norm(&vector),
        coeffs,
        vector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn zn(n: usize, s: i64) -> Lattice {
        Lattice::scaled_identity(n, BigRational::from_integer(BigInt::from(s))).unwrap()
    }

    #[test]
    fn cvp_on_z2() {
        let l = zn(2, 1);
        let c = closest_vector(&[0.75, 0.0], &l).unwrap();
        assert_eq!(c.coeffs, vec![1, 0]);
        assert!((c.distance - 0.25).abs() < 1e-15);
        assert!((c.tau[0] + 0.25).abs() < 1e-15 && c.tau[1] == 0.0);
        let c = closest_vector(&[3.0, -2.0], &l).unwrap();
        assert_eq!(c.distance, 0.0);
    }

    #[test]
    fn cvp_tie_is_lexicographic() {
        let l = zn(2, 1);
        let c = closest_vector(&[0.5, 0.5], &l).unwrap();
        assert_eq!(c.coeffs, vec![0, 0]);
        let c = closest_vector(&[-0.5, 0.5], &l).unwrap();
        assert_eq!(c.coeffs, vec![-1, 0]);
    }

    #[test]
    fn svp_examples() {
        for n in 1..=4 {
            assert!((shortest_vector(&zn(n, 1)).unwrap().length - 1.0).abs() < 1e-15);
        }
        assert_eq!(shortest_vector(&zn(2, 15)).unwrap().length, 15.0);
        // ((1,0),(0.5,0.5)): enumeration over [-3,3]^2 gives sqrt(1/2)
        let l = Lattice::from_integer_rows(&[vec![2, 0], vec![1, 1]], 2).unwrap();
        let mut brute = f64::INFINITY;
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                if (a, b) != (0, 0) {
                    let v = [a as f64 + 0.5 * b as f64, 0.5 * b as f64];
                    brute = brute.min(norm(&v));
                }
            }
        }
        let sv = shortest_vector(&l).unwrap();
        assert!((sv.length - brute).abs() < 1e-15);
        assert!((sv.length - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dimension_limit() {
        let l = zn(6, 1);
        assert!(matches!(
            shortest_vector(&l),
            Err(Error::DimensionLimit { n: 6, limit: 5 })
        ));
        assert!(closest_vector(&[0.0; 6], &l).is_err());
        assert!(matches!(
            closest_vector(&[0.0; 3], &zn(2, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn skewed_basis_cvp() {
        // a badly reduced basis of Z^2; Babai rounding is wrong here
        let l = Lattice::from_integer_rows(&[vec![1, 0], vec![7, 1]], 1).unwrap();
        let c = closest_vector(&[0.4, 0.45], &l).unwrap();
        assert!((c.distance - (0.4f64.powi(2) + 0.45f64.powi(2)).sqrt()).abs() < 1e-12);
        assert!((shortest_vector(&l).unwrap().length - 1.0).abs() < 1e-12);
    }
}
