//! The Gaussian weight `mu(x) = exp(-pi |x|^2)` and numeric mass checks.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

/// Lipschitz constant of `mu` as a function of the norm: `sup |mu'| = sqrt(2 pi / e)`.
pub fn mu_lipschitz() -> f64 {
    (2.0 * PI / E).sqrt()
}

/// `exp(-pi a^2)` for a scalar.
#[inline]
pub fn mu(a: f64) -> f64 {
    (-PI * a * a).exp()
}

/// `exp(-pi |x|^2)` for a vector.
#[inline]
pub fn mu_vec(x: &[f64]) -> f64 {
    mu_sq(norm_sq(x))
}

/// `mu` evaluated from an already-squared norm.
#[inline]
pub fn mu_sq(r2: f64) -> f64 {
    (-PI * r2).exp()
}

#[inline]
pub fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

/// Riemann sums of `mu` on a product grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassCheck {
    /// Sum over the whole box `[-range, range]^n`.
    pub total: f64,
    /// Sum restricted to the ball of radius `sqrt(n)`.
    pub ball_mass: f64,
}

/// Midpoint Riemann sums of `mu` over `[-range, range]^n` with cell width `step`.
///
/// Only `n <= 3` is supported since the grid is a full product.
pub fn gaussian_mass_check(n: usize, step: f64, range: f64) -> Result<MassCheck> {
    if n == 0 || n > 3 {
        return Err(Error::InvalidParameter(format!(
            "mass check supports 1 <= n <= 3, got {n}"
        )));
    }
    if !(step > 0.0 && range > 0.0) {
        return Err(Error::InvalidParameter(
            "step and range must be positive".into(),
        ));
    }
    let cells = (2.0 * range / step).round() as usize;
    let axis: Vec<f64> = (0..cells)
        .map(|i| -range + (i as f64 + 0.5) * step)
        .collect();
    let radius_sq = n as f64;
    let vol = step.powi(n as i32);

    let per_slab = |i: usize| -> (f64, f64) {
        let mut total = 0.0;
        let mut ball = 0.0;
        let x0 = axis[i];
        let mut visit = |r2: f64| {
            let w = mu_sq(r2);
            total += w;
            if r2 <= radius_sq {
                ball += w;
            }
        };
        match n {
            1 => visit(x0 * x0),
            2 => {
                for &x1 in &axis {
                    visit(x0 * x0 + x1 * x1);
                }
            }
            _ => {
                for &x1 in &axis {
                    for &x2 in &axis {
                        visit(x0 * x0 + x1 * x1 + x2 * x2);
                    }
                }
            }
        }
        (total, ball)
    };
    let slabs = crate::par::map_range(cells, per_slab);
    let (total, ball) = slabs
        .iter()
        .fold((0.0, 0.0), |(t, b), &(st, sb)| (t + st, b + sb));
    Ok(MassCheck {
        total: total * vol,
        ball_mass: ball * vol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_values() {
        assert_eq!(mu(0.0), 1.0);
        assert!((mu(1.0) - 0.043_213_918_263_772_25).abs() < 1e-15);
        assert!((mu(1.0 / 6.0) - (-PI / 36.0).exp()).abs() < 1e-15);
        assert!((mu(1.0 / 6.0) - 0.9164).abs() < 1e-4);
        assert!(mu(0.3) > mu(0.31));
        assert_eq!(mu_vec(&[0.6, 0.8]), mu(1.0));
    }

    #[test]
    fn one_dimensional_total() {
        let m = gaussian_mass_check(1, 0.01, 6.0).unwrap();
        assert!((m.total - 1.0).abs() < 1e-3, "{}", m.total);
    }

    #[test]
    fn product_structure() {
        let one = gaussian_mass_check(1, 0.01, 6.0).unwrap();
        let two = gaussian_mass_check(2, 0.01, 6.0).unwrap();
        assert!((two.total - one.total * one.total).abs() < 1e-6);
    }

    #[test]
    fn ball_mass_in_two_dims() {
        let two = gaussian_mass_check(2, 0.01, 6.0).unwrap();
        assert!(two.ball_mass >= 0.99 * two.total);
        // Exact value in 2-D: 1 - exp(-pi * 2).
        assert!((two.ball_mass - (1.0 - (-2.0 * PI).exp())).abs() < 1e-3);
    }

    #[test]
    fn rejects_large_dimension() {
        assert!(gaussian_mass_check(4, 0.1, 3.0).is_err());
        assert!(gaussian_mass_check(1, 0.0, 3.0).is_err());
    }
}
