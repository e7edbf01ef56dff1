//! Exact lattice and grid arithmetic.
//!
//! A [`Lattice`] keeps its basis as exact rationals (rows are the basis
//! vectors) together with floating-point copies used for norms. The grid
//! `G = L / 2^m` is addressed through [`GridPoint`]s: `n` integer coefficients
//! in `[0, 2^m)`, each standing for `j_i / 2^m` in the basis. Arithmetic on
//! grid points is integer arithmetic mod `2^m`, so shifts stay exact
//! bijections of the parallelepiped.

mod enumerate;
pub mod format;
mod gaussian;
mod instance;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use enumerate::{
    closest_vector, distance_to_lattice, shortest_vector, ClosestVector, ShortestVector,
    ENUMERATION_LIMIT,
};
pub use gaussian::{
    gaussian_mass_check, mu, mu_lipschitz, mu_sq, mu_vec, norm, norm_sq, MassCheck,
};
pub use instance::{GapThresholds, Instance, Truth};

/// Default cap on the number of grid points a dense state may have.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 22;

/// A full-rank lattice in `R^n` given by `n` rational basis rows.
#[derive(Debug, Clone)]
pub struct Lattice {
    n: usize,
    basis: Vec<Vec<BigRational>>,
    det_abs: BigRational,
    rows: Vec<f64>,
    // coeffs = to_coeffs * x, i.e. the transpose of the inverse basis
    to_coeffs: Vec<f64>,
    dual_norms: Vec<f64>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl Lattice {
    pub fn new(basis: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty basis".into()));
        }
        for row in &basis {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        let (det, inverse) = invert(&basis).ok_or(Error::SingularBasis)?;
        let rows = basis
            .iter()
            .flat_map(|r| r.iter().map(rat_to_f64))
            .collect();
        // x = sum_i c_i v_i  =>  c = (B^T)^{-1} x = (B^{-1})^T x
        let mut to_coeffs = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                to_coeffs[i * n + j] = rat_to_f64(&inverse[j][i]);
            }
        }
        let dual_norms = (0..n)
            .map(|i| {
                to_coeffs[i * n..(i + 1) * n]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        Ok(Self {
            n,
            basis,
            det_abs: det.abs(),
            rows,
            to_coeffs,
            dual_norms,
        })
    }

    /// Builds a lattice from integer rows divided by a common positive denominator.
    pub fn from_integer_rows(rows: &[Vec<i64>], denom: i64) -> Result<Self> {
        if denom <= 0 {
            return Err(Error::InvalidParameter(
                "denominator must be positive".into(),
            ));
        }
        let d = BigInt::from(denom);
        let basis = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| BigRational::new(BigInt::from(v), d.clone()))
                    .collect()
            })
            .collect();
        Self::new(basis)
    }

    /// `scale * Z^n`.
    pub fn scaled_identity(n: usize, scale: BigRational) -> Result<Self> {
        let basis = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            scale.clone()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(basis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    pub fn det_abs(&self) -> &BigRational {
        &self.det_abs
    }

    pub fn det_abs_f64(&self) -> f64 {
        rat_to_f64(&self.det_abs)
    }

    /// Basis row `i` in floating point.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    /// Norm of the `i`-th row of the inverse basis; `|c_i| <= dual_norm(i) * |x|`.
    pub fn dual_norm(&self, i: usize) -> f64 {
        self.dual_norms[i]
    }

    /// Coefficients of `x` in the basis.
    pub fn coefficients_of(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.to_coeffs[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `sum_i c_i v_i` for real coefficients.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                for (o, &v) in out.iter_mut().zip(self.row(i)) {
                    *o += c * v;
                }
            }
        }
        out
    }

    /// `sum_i c_i v_i` for integer coefficients.
    pub fn combine_int(&self, coeffs: &[i64]) -> Vec<f64> {
        let c: Vec<f64> = coeffs.iter().map(|&v| v as f64).collect();
        self.combine(&c)
    }

    /// Exact `sum_i c_i v_i`.
    pub fn combine_exact(&self, coeffs: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.n];
        for (c, row) in coeffs.iter().zip(&self.basis) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += c * v;
            }
        }
        out
    }

    /// The lattice with basis row `i` multiplied by two.
    pub fn with_row_doubled(&self, i: usize) -> Result<Self> {
        let mut basis = self.basis.clone();
        let two = BigRational::from_integer(BigInt::from(2));
        for v in basis[i].iter_mut() {
            *v = &*v * &two;
        }
        Self::new(basis)
    }

    /// The lattice scaled by `factor`.
    pub fn scaled(&self, factor: &BigRational) -> Result<Self> {
        let basis = self
            .basis
            .iter()
            .map(|r| r.iter().map(|v| v * factor).collect())
            .collect();
        Self::new(basis)
    }

    /// Applies an integer change of basis `U * B`.
    pub fn transformed(&self, unimodular: &[Vec<i64>]) -> Result<Self> {
        let n = self.n;
        let basis = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = BigRational::zero();
                        for k in 0..n {
                            acc += BigRational::from_integer(BigInt::from(unimodular[i][k]))
                                * &self.basis[k][j];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Self::new(basis)
    }

    /// Sum of basis row norms; bounds the diameter of the parallelepiped.
    pub fn parallelepiped_diameter_bound(&self) -> f64 {
        (0..self.n).map(|i| norm(self.row(i))).sum()
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact determinant and inverse by Gauss-Jordan elimination over the rationals.
fn invert(a: &[Vec<BigRational>]) -> Option<(BigRational, Vec<Vec<BigRational>>)> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        if pivot != col {
            m.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    let a = &m[col][j] * &f;
                    m[r][j] -= a;
                    let b = &inv[col][j] * &f;
                    inv[r][j] -= b;
                }
            }
        }
    }
    Some((det, inv))
}

/// Grid exponent and target precision: `G = L / 2^m`, target coefficients carry `ell` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub m: u32,
    pub ell: u32,
}

impl GridSpec {
    pub fn new(m: u32, ell: u32) -> Self {
        Self { m, ell }
    }

    /// Checks `m >= ell + 1` and that `(2^m)^n` fits in `budget` points.
    pub fn validate(&self, n: usize, budget: usize) -> Result<()> {
        if self.m < self.ell + 1 {
            return Err(Error::InvalidGrid(format!(
                "m = {} must be at least ell + 1 = {}",
                self.m,
                self.ell + 1
            )));
        }
        if self.m > 31 {
            return Err(Error::InvalidGrid(format!("m = {} is above 31", self.m)));
        }
        let bits = self.m as u128 * n as u128;
        if bits >= 63 {
            return Err(Error::GridTooLarge {
                points: u128::MAX,
                budget,
            });
        }
        let points = 1u128 << bits;
        if points > budget as u128 {
            return Err(Error::GridTooLarge { points, budget });
        }
        Ok(())
    }
}

/// A point of `P(L) ∩ G`: coefficients `j_i` standing for `sum_i (j_i / 2^m) v_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub coeffs: Vec<u32>,
}

impl GridPoint {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Self { coeffs }
    }

    pub fn origin(n: usize) -> Self {
        Self { coeffs: vec![0; n] }
    }

    pub fn is_origin(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// A vector with dyadic coefficients `num_i / 2^log_den` in the lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicVector {
    pub num: Vec<i64>,
    pub log_den: u32,
}

impl DyadicVector {
    pub fn new(num: Vec<i64>, log_den: u32) -> Self {
        Self { num, log_den }
    }

    pub fn coefficients(&self) -> Vec<f64> {
        let d = (1u64 << self.log_den) as f64;
        self.num.iter().map(|&v| v as f64 / d).collect()
    }

    pub fn exact_coefficients(&self) -> Vec<BigRational> {
        let d = BigInt::from(1u64) << self.log_den;
        self.num
            .iter()
            .map(|&v| BigRational::new(BigInt::from(v), d.clone()))
            .collect()
    }

    /// True when every coefficient lies in `[0, 1)`.
    pub fn in_unit_cube(&self) -> bool {
        let d = 1i64 << self.log_den;
        self.num.iter().all(|&v| (0..d).contains(&v))
    }
}

/// Reduces a dyadic coefficient vector into `P(L) ∩ G`.
///
/// The result differs from `x` by an integer combination of basis vectors.
pub fn mod_parallelepiped(x: &DyadicVector, m: u32) -> Result<GridPoint> {
    if x.log_den > m {
        return Err(Error::DenominatorTooLarge {
            log_den: x.log_den,
            m,
        });
    }
    let shift = m - x.log_den;
    let modulus = 1i128 << m;
    let coeffs = x
        .num
        .iter()
        .map(|&v| ((v as i128) << shift).rem_euclid(modulus) as u32)
        .collect();
    Ok(GridPoint { coeffs })
}

/// Euclidean image `sum_i (j_i / 2^m) v_i` of a grid point.
pub fn embed(p: &GridPoint, lattice: &Lattice, grid: &GridSpec) -> Vec<f64> {
    let d = (1u64 << grid.m) as f64;
    let c: Vec<f64> = p.coeffs.iter().map(|&j| j as f64 / d).collect();
    lattice.combine(&c)
}

/// Splits `x` into its component along `y` and the orthogonal remainder.
pub fn project(x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: x.len(),
        });
    }
    let yy = norm_sq(y);
    if yy == 0.0 {
        return Err(Error::ZeroVector);
    }
    let t = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / yy;
    let along: Vec<f64> = y.iter().map(|v| t * v).collect();
    let perp = x.iter().zip(&along).map(|(a, b)| a - b).collect();
    Ok((along, perp))
}

/// A lattice together with its grid: the state space of every witness.
///
/// Points are indexed by the mixed-radix encoding `sum_i j_i 2^{m i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid {
    lattice: Lattice,
    spec: GridSpec,
    mask: u32,
}

impl LatticeGrid {
    pub fn new(lattice: Lattice, spec: GridSpec) -> Result<Self> {
        Self::with_budget(lattice, spec, DEFAULT_POINT_BUDGET)
    }

    pub fn with_budget(lattice: Lattice, spec: GridSpec, budget: usize) -> Result<Self> {
        spec.validate(lattice.n(), budget)?;
        let mask = ((1u64 << spec.m) - 1) as u32;
        Ok(Self {
            lattice,
            spec,
            mask,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn m(&self) -> u32 {
        self.spec.m
    }

    /// Grid points per axis.
    pub fn side(&self) -> u64 {
        1u64 << self.spec.m
    }

    /// Total number of grid points in the parallelepiped.
    pub fn len(&self) -> usize {
        1usize << (self.spec.m as usize * self.n())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same lattice, different resolution.
    pub fn with_m(&self, m: u32) -> Result<Self> {
        Self::new(self.lattice.clone(), GridSpec::new(m, self.spec.ell))
    }

    pub fn contains(&self, p: &GridPoint) -> bool {
        p.coeffs.len() == self.n() && p.coeffs.iter().all(|&c| c <= self.mask)
    }

    pub fn index(&self, p: &GridPoint) -> usize {
        let m = self.spec.m as usize;
        p.coeffs
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &c)| acc | ((c as usize) << (m * i)))
    }

    pub fn point(&self, index: usize) -> GridPoint {
        let m = self.spec.m as usize;
        let coeffs = (0..self.n())
            .map(|i| ((index >> (m * i)) as u32) & self.mask)
            .collect();
        GridPoint { coeffs }
    }

    /// Index of `point(index) + shift`, coefficient-wise mod `2^m`.
    #[inline]
    pub fn shifted_index(&self, index: usize, shift: &GridPoint) -> usize {
        let m = self.spec.m as usize;
        let mask = self.mask as usize;
        let mut out = 0usize;
        for (i, &s) in shift.coeffs.iter().enumerate() {
            let c = (index >> (m * i)) & mask;
            out |= ((c + s as usize) & mask) << (m * i);
        }
        out
    }

    pub fn add(&self, p: &GridPoint, q: &GridPoint) -> GridPoint {
        let coeffs = p
            .coeffs
            .iter()
            .zip(&q.coeffs)
            .map(|(&a, &b)| a.wrapping_add(b) & self.mask)
            .collect();
        GridPoint { coeffs }
    }

    pub fn neg(&self, p: &GridPoint) -> GridPoint {
        let coeffs = p
            .coeffs
            .iter()
            .map(|&a| a.wrapping_neg() & self.mask)
            .collect();
        GridPoint { coeffs }
    }

    pub fn sub(&self, p: &GridPoint, q: &GridPoint) -> GridPoint {
        self.add(p, &self.neg(q))
    }

    pub fn double(&self, p: &GridPoint) -> GridPoint {
        self.add(p, p)
    }

    /// Reduces signed grid coefficients (units of `v_i / 2^m`) into the parallelepiped.
    pub fn from_signed(&self, coeffs: &[i64]) -> GridPoint {
        let modulus = 1i64 << self.spec.m;
        GridPoint {
            coeffs: coeffs
                .iter()
                .map(|&c| c.rem_euclid(modulus) as u32)
                .collect(),
        }
    }

    /// Euclidean image of a grid point inside `P(L)`.
    pub fn embed(&self, p: &GridPoint) -> Vec<f64> {
        embed(p, &self.lattice, &self.spec)
    }

    /// Euclidean vector for signed grid coefficients.
    pub fn embed_signed(&self, coeffs: &[i64]) -> Vec<f64> {
        let d = self.side() as f64;
        let c: Vec<f64> = coeffs.iter().map(|&j| j as f64 / d).collect();
        self.lattice.combine(&c)
    }

    /// Closest lattice vector to the embedded point.
    pub fn tau(&self, p: &GridPoint) -> Result<ClosestVector> {
        closest_vector(&self.embed(p), &self.lattice)
    }

    /// Signed grid coefficients of `tau_L(p)`: the short representative of `p` mod `L`.
    pub fn short_coeffs(&self, p: &GridPoint) -> Result<Vec<i64>> {
        let cv = self.tau(p)?;
        let side = self.side() as i64;
        Ok(p.coeffs
            .iter()
            .zip(&cv.coeffs)
            .map(|(&j, &c)| j as i64 - c * side)
            .collect())
    }

    /// The point `p` expressed on a finer (or equal) grid `2^{m_new}`.
    pub fn lift(&self, p: &GridPoint, m_new: u32) -> Result<GridPoint> {
        if m_new < self.spec.m {
            return Err(Error::InvalidGrid(format!(
                "cannot lift from m = {} to coarser m = {m_new}",
                self.spec.m
            )));
        }
        let s = m_new - self.spec.m;
        Ok(GridPoint {
            coeffs: p.coeffs.iter().map(|&c| c << s).collect(),
        })
    }

    /// Grid point for a dyadic coefficient vector.
    pub fn reduce(&self, x: &DyadicVector) -> Result<GridPoint> {
        mod_parallelepiped(x, self.spec.m)
    }

    /// Length of the longest single-coefficient grid step.
    pub fn max_step(&self) -> f64 {
        let d = self.side() as f64;
        (0..self.n())
            .map(|i| norm(self.lattice.row(i)) / d)
            .fold(0.0, f64::max)
    }

    /// Upper bound on the diameter of one grid cell `P(G)`.
    pub fn cell_diameter_bound(&self) -> f64 {
        self.lattice.parallelepiped_diameter_bound() / self.side() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2(scale: i64) -> Lattice {
        Lattice::from_integer_rows(&[vec![scale, 0], vec![0, scale]], 1).unwrap()
    }

    #[test]
    fn determinant_and_inverse() {
        let l = Lattice::from_integer_rows(&[vec![2, 1], vec![1, 3]], 1).unwrap();
        assert_eq!(l.det_abs(), &BigRational::from_integer(5.into()));
        let x = l.combine(&[0.25, -1.5]);
        let c = l.coefficients_of(&x);
        assert!((c[0] - 0.25).abs() < 1e-12 && (c[1] + 1.5).abs() < 1e-12);
    }

    #[test]
    fn singular_basis_rejected() {
        let r = Lattice::from_integer_rows(&[vec![1, 2], vec![2, 4]], 1);
        assert!(matches!(r, Err(Error::SingularBasis)));
    }

    #[test]
    fn doubling_a_row_doubles_det() {
        let l =
            Lattice::from_integer_rows(&[vec![3, 1, 0], vec![1, 4, 1], vec![0, 2, 5]], 2).unwrap();
        for i in 0..3 {
            let li = l.with_row_doubled(i).unwrap();
            assert_eq!(
                li.det_abs(),
                &(l.det_abs() * BigRational::from_integer(2.into()))
            );
        }
    }

    #[test]
    fn embed_examples() {
        let g = GridSpec::new(2, 1);
        let l = z2(1);
        assert_eq!(embed(&GridPoint::origin(2), &l, &g), vec![0.0, 0.0]);
        assert_eq!(embed(&GridPoint::new(vec![1, 2]), &l, &g), vec![0.25, 0.5]);
    }

    #[test]
    fn embed_is_linear_mod_lattice() {
        let l = Lattice::from_integer_rows(&[vec![3, 1], vec![-1, 2]], 1).unwrap();
        let grid = LatticeGrid::new(l.clone(), GridSpec::new(3, 1)).unwrap();
        let p = GridPoint::new(vec![5, 7]);
        let q = GridPoint::new(vec![6, 2]);
        let s = grid.add(&p, &q);
        let lhs: Vec<f64> = grid
            .embed(&p)
            .iter()
            .zip(grid.embed(&q))
            .map(|(a, b)| a + b)
            .collect();
        let diff: Vec<f64> = lhs.iter().zip(grid.embed(&s)).map(|(a, b)| a - b).collect();
        let c = l.coefficients_of(&diff);
        assert!(c.iter().all(|v| (v - v.round()).abs() < 1e-12));
    }

    #[test]
    fn mod_parallelepiped_examples() {
        // (1.25, -0.5) -> (0.25, 0.5) on m = 2
        let x = DyadicVector::new(vec![5, -2], 2);
        let p = mod_parallelepiped(&x, 2).unwrap();
        assert_eq!(p.coeffs, vec![1, 2]);
        // lattice vectors go to the origin
        let v = DyadicVector::new(vec![3, -7], 0);
        assert!(mod_parallelepiped(&v, 4).unwrap().is_origin());
        // already reduced points are fixed
        let y = DyadicVector::new(vec![3, 1], 2);
        assert_eq!(mod_parallelepiped(&y, 2).unwrap().coeffs, vec![3, 1]);
        // coarser denominators are rescaled
        assert_eq!(
            mod_parallelepiped(&DyadicVector::new(vec![1], 1), 3)
                .unwrap()
                .coeffs,
            vec![4]
        );
    }

    #[test]
    fn mod_parallelepiped_rejects_fine_denominators() {
        let x = DyadicVector::new(vec![1, 1], 5);
        assert!(matches!(
            mod_parallelepiped(&x, 4),
            Err(Error::DenominatorTooLarge { log_den: 5, m: 4 })
        ));
    }

    #[test]
    fn project_examples() {
        let (a, b) = project(&[2.0, 4.0], &[1.0, 2.0]).unwrap();
        assert_eq!(a, vec![2.0, 4.0]);
        assert!(b.iter().all(|v| v.abs() < 1e-15));
        let (a, b) = project(&[0.0, 3.0], &[1.0, 0.0]).unwrap();
        assert_eq!(a, vec![0.0, 0.0]);
        assert_eq!(b, vec![0.0, 3.0]);
        let (a, b) = project(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert_eq!((a, b), (vec![1.0, 0.0], vec![0.0, 1.0]));
        assert!(matches!(
            project(&[1.0, 1.0], &[0.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(3, 3).validate(2, 1 << 20).is_err());
        assert!(GridSpec::new(4, 3).validate(2, 1 << 20).is_ok());
        assert!(matches!(
            GridSpec::new(12, 1).validate(2, 1 << 20),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn index_roundtrip_and_shift() {
        let grid = LatticeGrid::new(z2(1), GridSpec::new(3, 1)).unwrap();
        for idx in 0..grid.len() {
            assert_eq!(grid.index(&grid.point(idx)), idx);
        }
        let s = GridPoint::new(vec![7, 3]);
        for idx in [0usize, 5, 17, 63] {
            let expect = grid.add(&grid.point(idx), &s);
            assert_eq!(grid.shifted_index(idx, &s), grid.index(&expect));
        }
    }

    #[test]
    fn short_coefficients() {
        let grid = LatticeGrid::new(z2(15), GridSpec::new(4, 1)).unwrap();
        // coefficient 15/16 of 15 is 14.06, closest lattice point 15 -> short coeff -1
        let p = GridPoint::new(vec![15, 2]);
        assert_eq!(grid.short_coeffs(&p).unwrap(), vec![-1, 2]);
    }
}
