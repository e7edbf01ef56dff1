//! Positive-definite-function machinery.
//!
//! `h` is queried through [`PdFunction`]; a [`PdFunctionView`] pairs it with
//! the grid whose group law (coefficient-wise addition mod `2^m`) defines
//! `x_i - x_j` in Gram matrices.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::autocorr::{coeff_string, overlap_re, ShiftVector, NORM_TOL};
use crate::error::{Error, Result};
use crate::lattice::{closest_vector, mu_vec, norm, project, LatticeGrid};
use crate::par;
use crate::protocol::sample_ball_grid;
use crate::witness::QuantumWitness;

/// Largest Gram matrix the eigen-solver accepts.
pub const MAX_GRAM: usize = 16;

/// Minimum eigenvalue above which a Gram matrix counts as PSD.
pub const PSD_TOL: f64 = -1e-8;

pub trait PdFunction: Sync {
    fn eval(&self, x: &ShiftVector) -> f64;
}

/// `h(x) = sum_i w_i Re <alpha_i| T_x |alpha_i>` of a witness.
pub struct WitnessFunction<'a> {
    witness: &'a QuantumWitness,
}

impl<'a> WitnessFunction<'a> {
    pub fn new(witness: &'a QuantumWitness) -> Result<Self> {
        for (_, s) in witness.components() {
            if s.len() != witness.grid().len() {
                return Err(Error::GridMismatch);
            }
            let ns = s.norm_sq();
            if (ns - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized(ns));
            }
        }
        Ok(Self { witness })
    }
}

impl PdFunction for WitnessFunction<'_> {
    fn eval(&self, x: &ShiftVector) -> f64 {
        let grid = self.witness.grid();
        self.witness
            .components()
            .iter()
            .map(|(w, s)| w * overlap_re(grid, s, x))
            .sum()
    }
}

/// A synthetic function given by a closure.
pub struct TableFunction<F> {
    f: F,
}

impl<F: Fn(&ShiftVector) -> f64 + Sync> TableFunction<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F: Fn(&ShiftVector) -> f64 + Sync> PdFunction for TableFunction<F> {
    fn eval(&self, x: &ShiftVector) -> f64 {
        (self.f)(x)
    }
}

/// The exact Gaussian profile `h(x) = mu(tau_L(x) / 2)`.
pub fn gaussian_table(
    grid: &LatticeGrid,
) -> TableFunction<impl Fn(&ShiftVector) -> f64 + Sync + '_> {
    TableFunction::new(move |x: &ShiftVector| gaussian_half(grid, x))
}

/// Another function with some values replaced.
pub struct OverrideFunction<'a> {
    inner: &'a dyn PdFunction,
    values: Vec<(ShiftVector, f64)>,
}

impl<'a> OverrideFunction<'a> {
    pub fn new(inner: &'a dyn PdFunction, values: Vec<(ShiftVector, f64)>) -> Self {
        Self { inner, values }
    }
}

impl PdFunction for OverrideFunction<'_> {
    fn eval(&self, x: &ShiftVector) -> f64 {
        self.values
            .iter()
            .find(|(p, _)| p == x)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| self.inner.eval(x))
    }
}

/// A function on grid shifts with `h(0) = 1`.
#[derive(Clone, Copy)]
pub struct PdFunctionView<'a> {
    grid: &'a LatticeGrid,
    f: &'a dyn PdFunction,
}

impl<'a> PdFunctionView<'a> {
    pub fn new(grid: &'a LatticeGrid, f: &'a dyn PdFunction) -> Result<Self> {
        let origin = f.eval(&ShiftVector::origin(grid.n()));
        if (origin - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!("h(0) = {origin}, expected 1")));
        }
        Ok(Self { grid, f })
    }

    pub fn eval(&self, x: &ShiftVector) -> f64 {
        self.f.eval(x)
    }

    pub fn grid(&self) -> &'a LatticeGrid {
        self.grid
    }
}

fn tau_vec(grid: &LatticeGrid, x: &ShiftVector) -> Vec<f64> {
    closest_vector(&grid.embed(x), grid.lattice())
        .map(|c| c.tau)
        .unwrap_or_else(|_| vec![f64::NAN; grid.n()])
}

fn gaussian_half(grid: &LatticeGrid, x: &ShiftVector) -> f64 {
    let t: Vec<f64> = tau_vec(grid, x).iter().map(|v| v / 2.0).collect();
    mu_vec(&t)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = m.len();
    if k > MAX_GRAM {
        return Err(Error::InvalidParameter(format!(
            "matrix size {k} above {MAX_GRAM}"
        )));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: row.len(),
            });
        }
        for j in 0..i {
            let delta = (m[i][j] - m[j][i]).abs();
            if delta > 1e-12 {
                return Err(Error::Asymmetric { i, j, delta });
            }
        }
    }
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| 0.5 * (m[i][j] + m[j][i])).collect())
        .collect();
    let scale = a
        .iter()
        .flatten()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    for _sweep in 0..100 {
        let off: f64 = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-12 * scale * 1e-3 {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let arp = a[r][p];
                    let arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p][r];
                    let aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..k).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Smallest eigenvalue; the matrix is PSD iff this is `>= PSD_TOL`.
pub fn min_eigenvalue(m: &[Vec<f64>]) -> Result<f64> {
    Ok(symmetric_eigenvalues(m)?
        .first()
        .copied()
        .unwrap_or(f64::INFINITY))
}

/// Determinant by LU with partial pivoting.
pub fn determinant(m: &[Vec<f64>]) -> f64 {
    let k = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("non-empty range");
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// `M[i][j] = h(x_i - x_j)` with the grid group law.
pub fn gram_matrix(h: &PdFunctionView<'_>, points: &[ShiftVector]) -> Vec<Vec<f64>> {
    let k = points.len();
    let grid = h.grid();
    let entries = par::map_range(k * k, |ij| {
        let (i, j) = (ij / k, ij % k);
        h.eval(&grid.sub(&points[i], &points[j]))
    });
    entries.chunks(k).map(<[f64]>::to_vec).collect()
}

/// `sqrt((1 + b) / 2)`, the bound on `h(x/2)` given `h(x) = b`.
pub fn halving_bound(b: f64) -> Result<f64> {
    if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&b) {
        return Err(Error::InvalidParameter(format!("{b} is outside [-1, 1]")));
    }
    Ok(((1.0 + b.clamp(-1.0, 1.0)) / 2.0).sqrt())
}

/// The linear relaxation `(b + 3) / 4 >= sqrt((1 + b) / 2)`.
pub fn halving_relaxation(b: f64) -> f64 {
    (b + 3.0) / 4.0
}

/// `k` applications of the relaxation starting from `h0`.
pub fn halving_cascade(h0: f64, k: u32) -> f64 {
    (0..k).fold(h0, |b, _| halving_relaxation(b))
}

/// `1 - (1 - h0) / 4^k`.
pub fn halving_cascade_closed_form(h0: f64, k: u32) -> f64 {
    1.0 - (1.0 - h0) / 4f64.powi(k as i32)
}

/// The cascade in exact rational arithmetic.
pub fn halving_cascade_exact(h0: &BigRational, k: u32) -> BigRational {
    let three = BigRational::from_integer(3.into());
    let four = BigRational::from_integer(4.into());
    (0..k).fold(h0.clone(), |b, _| (b + &three) / &four)
}

/// `1 - (1 - h0) / 4^k` exactly.
pub fn halving_cascade_exact_closed_form(h0: &BigRational, k: u32) -> BigRational {
    let four_k = BigRational::from_integer(num_bigint::BigInt::from(4).pow(k));
    BigRational::one() - (BigRational::one() - h0) / four_k
}

/// Goodness of one shift.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodBadVerdict {
    pub point: ShiftVector,
    pub is_good: bool,
    /// `|h(x) - mu(x/2)|`
    pub dev_half: f64,
    /// `|h(2x) - mu(x)|`
    pub dev_full: f64,
    pub threshold: f64,
    /// `tau(2x) != 2 tau(x)`: doubling left the ball around the origin.
    pub wrapped: bool,
}

pub fn classify_good(h: &PdFunctionView<'_>, x: &ShiftVector, t: f64) -> GoodBadVerdict {
    let grid = h.grid();
    let tau = tau_vec(grid, x);
    let x2 = grid.double(x);
    let tau2 = tau_vec(grid, &x2);
    let wrapped = tau
        .iter()
        .zip(&tau2)
        .any(|(a, b)| (2.0 * a - b).abs() > 1e-9 * (1.0 + b.abs()));
    let half: Vec<f64> = tau.iter().map(|v| v / 2.0).collect();
    let dev_half = (h.eval(x) - mu_vec(&half)).abs();
    let dev_full = (h.eval(&x2) - mu_vec(&tau)).abs();
    GoodBadVerdict {
        point: x.clone(),
        is_good: dev_half <= t && dev_full <= t,
        dev_half,
        dev_full,
        threshold: t,
        wrapped,
    }
}

/// Fraction of `points` that are bad for `h`.
pub fn gaussian_approx_fraction(
    h: &PdFunctionView<'_>,
    points: &[ShiftVector],
    t: f64,
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty point set".into()));
    }
    let bad = par::map_slice(points, |x| !classify_good(h, x, t).is_good)
        .into_iter()
        .filter(|&b| b)
        .count();
    Ok(bad as f64 / points.len() as f64)
}

/// Desk-scale thresholds for the soundness machinery, in Euclidean units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestParams {
    /// Goodness threshold `t`.
    pub good_threshold: f64,
    /// `y = w / 2^k` is halved until `|y| <= short_radius`.
    pub short_radius: f64,
    /// Target `|P_{y⊥} z|` of the set `A_1`.
    pub shell_radius: f64,
    /// Allowed deviation of `|P_{y⊥} z|` from `shell_radius`.
    pub shell_thickness: f64,
    /// Bound on `|P_y z|` in `A_1`.
    pub parallel_tol: f64,
    /// Determinants below `-det_tol` count as PD violations.
    pub det_tol: f64,
    /// `A_1` samples drawn by the certificate.
    pub triples: usize,
}

impl Default for TestParams {
    fn default() -> Self {
        Self {
            good_threshold: 0.01,
            short_radius: 0.25,
            shell_radius: 0.35,
            shell_thickness: 0.1,
            parallel_tol: 0.1,
            det_tol: 1e-8,
            triples: 32,
        }
    }
}

impl TestParams {
    /// Radius of a ball containing `A_1`.
    pub fn shell_outer_radius(&self) -> f64 {
        ((self.shell_radius + self.shell_thickness).powi(2) + self.parallel_tol.powi(2)).sqrt()
    }
}

/// `(1 - a^4)((a^2 - 1)^2 (1 - h^2) - 2 (b - a h)^2)`.
pub fn quadruple_det_expansion(alpha: f64, beta: f64, hy: f64) -> f64 {
    let a2 = alpha * alpha;
    (1.0 - a2 * a2) * ((a2 - 1.0).powi(2) * (1.0 - hy * hy) - 2.0 * (beta - alpha * hy).powi(2))
}

/// The Gram matrix on `{0, -z, z, y}` with Gaussian entries expressed in `(alpha, beta, h(y))`.
pub fn quadruple_gram(alpha: f64, beta: f64, hy: f64) -> Vec<Vec<f64>> {
    let a4 = alpha.powi(4);
    vec![
        vec![1.0, alpha, alpha, hy],
        vec![alpha, 1.0, a4, beta],
        vec![alpha, a4, 1.0, beta],
        vec![hy, beta, beta, 1.0],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypotheses {
    pub parallel_norm: f64,
    pub perp_norm: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone)]
pub struct TripleTest {
    pub z: ShiftVector,
    pub y: ShiftVector,
    /// Gram matrix on `{0, -z, z, y}`.
    pub gram: Vec<Vec<f64>>,
    pub det4: f64,
    pub min_eigenvalue: f64,
    /// Verdicts for `z`, `z + y`, `z - y`.
    pub verdicts: [GoodBadVerdict; 3],
    pub any_bad: bool,
    pub alpha: f64,
    pub beta: f64,
    pub h_y: f64,
    /// Closed-form expansion at `(alpha, beta, h(y))`.
    pub expansion: f64,
    /// Direct determinant of [`quadruple_gram`] at the same parameters.
    pub ideal_det: f64,
    pub hypotheses: Hypotheses,
}

impl TripleTest {
    /// PD is contradicted by this quadruple.
    pub fn violates_pd(&self, tol: f64) -> bool {
        self.det4 < -tol
    }
}

fn short_vec(grid: &LatticeGrid, x: &ShiftVector) -> Result<Vec<f64>> {
    Ok(grid.embed_signed(&grid.short_coeffs(x)?))
}

/// Checks the `A_1` membership conditions for `z` relative to `y`.
pub fn triple_hypotheses(
    grid: &LatticeGrid,
    z: &ShiftVector,
    y: &ShiftVector,
    params: &TestParams,
) -> Result<Hypotheses> {
    let zv = short_vec(grid, z)?;
    let yv = short_vec(grid, y)?;
    let (along, perp) = project(&zv, &yv)?;
    let parallel_norm = norm(&along);
    let perp_norm = norm(&perp);
    Ok(Hypotheses {
        parallel_norm,
        perp_norm,
        satisfied: parallel_norm <= params.parallel_tol
            && (perp_norm - params.shell_radius).abs() <= params.shell_thickness,
    })
}

/// The 4x4 PD test on `{0, -z, z, y}` together with goodness of `z, z ± y`.
pub fn triple_test(
    h: &PdFunctionView<'_>,
    z: &ShiftVector,
    y: &ShiftVector,
    params: &TestParams,
) -> Result<TripleTest> {
    let grid = h.grid();
    let hypotheses = triple_hypotheses(grid, z, y, params)?;
    let points = [
        ShiftVector::origin(grid.n()),
        grid.neg(z),
        z.clone(),
        y.clone(),
    ];
    let gram = gram_matrix(h, &points);
    let sym: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| 0.5 * (gram[i][j] + gram[j][i])).collect())
        .collect();
    let det4 = determinant(&sym);
    let min_eigenvalue = min_eigenvalue(&sym)?;
    let t = params.good_threshold;
    let verdicts = [
        classify_good(h, z, t),
        classify_good(h, &grid.add(z, y), t),
        classify_good(h, &grid.sub(z, y), t),
    ];
    let any_bad = verdicts.iter().any(|v| !v.is_good);

    let zv = short_vec(grid, z)?;
    let yv = short_vec(grid, y)?;
    let (_, zp) = project(&zv, &yv)?;
    let half_zp: Vec<f64> = zp.iter().map(|v| v / 2.0).collect();
    let half_y: Vec<f64> = yv.iter().map(|v| v / 2.0).collect();
    let alpha = mu_vec(&half_zp);
    let beta = alpha * mu_vec(&half_y);
    let h_y = h.eval(y);
    Ok(TripleTest {
        z: z.clone(),
        y: y.clone(),
        gram,
        det4,
        min_eigenvalue,
        verdicts,
        any_bad,
        alpha,
        beta,
        h_y,
        expansion: quadruple_det_expansion(alpha, beta, h_y),
        ideal_det: determinant(&quadruple_gram(alpha, beta, h_y)),
        hypotheses,
    })
}

/// Outcome of running the no-PD-function argument against `h`.
#[derive(Debug, Clone)]
pub struct NoPdCertificate {
    pub w: ShiftVector,
    pub w_norm: f64,
    pub h_w: f64,
    pub k: u32,
    pub y: ShiftVector,
    /// `(w / 2^i, h(w / 2^i))` for `i = 0..=k`.
    pub chain: Vec<(ShiftVector, f64)>,
    /// Steps `i` where `h(w / 2^{i+1}) > sqrt((1 + h(w / 2^i)) / 2)`.
    pub chain_violations: Vec<u32>,
    /// Min eigenvalue of the Gram matrix on `{0} ∪ chain`.
    pub chain_min_eigenvalue: f64,
    /// Upper bound on `h(y)` forced on any PD function.
    pub cascade_bound: f64,
    pub h_y: f64,
    /// `mu(y / 2)`.
    pub gaussian_at_y: f64,
    /// `cascade_bound < mu(y/2) - t`.
    pub cascade_contradiction: bool,
    /// Triple tests run with `h(y)` capped at the cascade bound.
    pub triples: Vec<TripleTest>,
    pub flagged_triples: usize,
    /// Lower bound on the bad fraction among sampled `A_1 ∪ A_2 ∪ A_3` points.
    pub bad_fraction: f64,
    pub shell_hits: usize,
    pub shell_draws: usize,
    pub det_tol: f64,
}

impl NoPdCertificate {
    pub fn violation_found(&self, tol: f64) -> bool {
        self.cascade_contradiction
            || !self.chain_violations.is_empty()
            || self.chain_min_eigenvalue < -tol
            || self.flagged_triples > 0
    }

    pub const CSV_HEADER: &'static str = "point_coeffs,role,h,mu_target,verdict,det4";

    /// pd-audit CSV rows. Triple points are `bad` when they miss the Gaussian
    /// profile, `pd-violation` when they match it but their quadruple has a
    /// negative determinant, and `good` otherwise.
    pub fn to_csv(&self, grid: &LatticeGrid) -> Result<String> {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        let wv = short_vec(grid, &self.w)?;
        let half: Vec<f64> = wv.iter().map(|v| v / 2.0).collect();
        let _ = writeln!(
            s,
            "{},w,{:.12e},{:.12e},{},",
            coeff_string(&self.w),
            self.h_w,
            mu_vec(&half),
            if (self.h_w - mu_vec(&half)).abs() <= 1e-12 {
                "gaussian"
            } else {
                "anomalous"
            }
        );
        let _ = writeln!(
            s,
            "{},y,{:.12e},{:.12e},{},",
            coeff_string(&self.y),
            self.h_y,
            self.gaussian_at_y,
            if self.cascade_contradiction {
                "contradiction"
            } else {
                "consistent"
            }
        );
        for tr in &self.triples {
            for (role, v) in ["z", "z+y", "z-y"].iter().zip(&tr.verdicts) {
                let tv = short_vec(grid, &v.point)?;
                let half: Vec<f64> = tv.iter().map(|x| x / 2.0).collect();
                let hv = if *role == "z" {
                    tr.gram[0][2]
                } else if *role == "z+y" {
                    tr.gram[3][1]
                } else {
                    tr.gram[3][2]
                };
                let _ = writeln!(
                    s,
                    "{},{},{:.12e},{:.12e},{},{:.12e}",
                    coeff_string(&v.point),
                    role,
                    hv,
                    mu_vec(&half),
                    if !v.is_good {
                        "bad"
                    } else if tr.violates_pd(self.det_tol) {
                        "pd-violation"
                    } else {
                        "good"
                    },
                    tr.det4
                );
            }
        }
        Ok(s)
    }
}

/// Runs the cascade and triple tests for an anomaly at `w`.
///
/// `y = w / 2^k` for the least `k` with `|y| <= short_radius`; the cascade
/// bounds `h(y)` for any PD `h`. Points `z ∈ A_1` are drawn with the ball
/// sampler and each quadruple `{0, -z, z, y}` is tested with `h(y)` capped
/// at that bound.
pub fn no_pd_certificate<R: Rng + ?Sized>(
    h: &PdFunctionView<'_>,
    w: &ShiftVector,
    params: &TestParams,
    rng: &mut R,
) -> Result<NoPdCertificate> {
    let grid = h.grid();
    if w.is_origin() {
        return Err(Error::InvalidParameter("w = 0 has no direction".into()));
    }
    let wc = grid.short_coeffs(w)?;
    let w_norm = norm(&grid.embed_signed(&wc));
    let mut k = 0u32;
    while w_norm / f64::from(1u32 << k) > params.short_radius {
        k += 1;
        if k > 30 {
            return Err(Error::Precondition("short radius unreachable".into()));
        }
    }
    let div = 1i64 << k;
    if wc.iter().any(|c| c % div != 0) {
        return Err(Error::Precondition(format!(
            "w / 2^{k} is not on the grid (coefficients {wc:?})"
        )));
    }
    let chain: Vec<(ShiftVector, f64)> = (0..=k)
        .map(|i| {
            let c: Vec<i64> = wc.iter().map(|v| v / (1i64 << i)).collect();
            let p = grid.from_signed(&c);
            let v = h.eval(&p);
            (p, v)
        })
        .collect();
    let chain_violations = (0..k)
        .filter(|&i| {
            let b = chain[i as usize].1.clamp(-1.0, 1.0);
            let a = chain[i as usize + 1].1;
            a > ((1.0 + b) / 2.0).sqrt() + params.det_tol
        })
        .collect();
    let mut pts = vec![ShiftVector::origin(grid.n())];
    pts.extend(chain.iter().map(|(p, _)| p.clone()));
    let chain_min_eigenvalue = min_eigenvalue(&symmetrize(&gram_matrix(h, &pts)))?;

    let h_w = chain[0].1;
    let (y, h_y) = chain[k as usize].clone();
    let cascade_bound = halving_cascade(h_w.clamp(-1.0, 1.0), k);
    let yv = grid.embed_signed(&grid.short_coeffs(&y)?);
    let half_y: Vec<f64> = yv.iter().map(|v| v / 2.0).collect();
    let gaussian_at_y = mu_vec(&half_y);
    let cascade_contradiction = cascade_bound < gaussian_at_y - params.good_threshold;

    let capped = h_y.min(cascade_bound);
    let inner = ViewFn(*h);
    let over = OverrideFunction::new(&inner, vec![(y.clone(), capped), (grid.neg(&y), capped)]);
    let hv = PdFunctionView::new(grid, &over)?;

    let outer = params.shell_outer_radius();
    let mut triples = Vec::new();
    let mut draws = 0usize;
    let budget = params.triples * 200;
    while triples.len() < params.triples && draws < budget {
        draws += 1;
        let (z, _) = sample_ball_grid(outer, grid, rng)?;
        if z.is_origin() {
            continue;
        }
        if triple_hypotheses(grid, &z, &y, params)?.satisfied {
            triples.push(triple_test(&hv, &z, &y, params)?);
        }
    }
    let flagged_triples = triples
        .iter()
        .filter(|t| t.violates_pd(params.det_tol) || t.any_bad)
        .count();
    let bad_fraction = if triples.is_empty() {
        0.0
    } else {
        flagged_triples as f64 / (3 * triples.len()) as f64
    };
    Ok(NoPdCertificate {
        w: w.clone(),
        w_norm,
        h_w,
        k,
        y,
        chain,
        chain_violations,
        chain_min_eigenvalue,
        cascade_bound,
        h_y,
        gaussian_at_y,
        cascade_contradiction,
        shell_hits: triples.len(),
        triples,
        flagged_triples,
        bad_fraction,
        shell_draws: draws,
        det_tol: params.det_tol,
    })
}

struct ViewFn<'a>(PdFunctionView<'a>);

impl PdFunction for ViewFn<'_> {
    fn eval(&self, x: &ShiftVector) -> f64 {
        self.0.eval(x)
    }
}

fn symmetrize(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = m.len();
    (0..k)
        .map(|i| (0..k).map(|j| 0.5 * (m[i][j] + m[j][i])).collect())
        .collect()
}

/// Summary of randomized checks of the PD properties of one function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdPropertyAudit {
    /// Smallest min-eigenvalue over the random Gram matrices.
    pub min_gram_eigenvalue: f64,
    /// `max |h(x)|` over the random shifts.
    pub max_abs_h: f64,
    /// `max |h(x) - h(-x)|`.
    pub max_asymmetry: f64,
    /// `min sqrt((1 + h(2x)) / 2) - h(x)`.
    pub min_halving_slack: f64,
}

/// Random Gram matrices of size `2..=max_k` and random shifts for the 2x2
/// and 3x3 determinant bounds. Each point is uniform on the grid or, with probability
/// 1/2, uniform in the ball of radius `near_radius` where `h` is large.
pub fn pd_property_audit<R: Rng + ?Sized>(
    h: &PdFunctionView<'_>,
    gram_sets: usize,
    max_k: usize,
    shifts: usize,
    near_radius: f64,
    rng: &mut R,
) -> Result<PdPropertyAudit> {
    let grid = h.grid();
    let side = grid.side() as u32;
    let n = grid.n();
    let random_point = |rng: &mut R| -> Result<ShiftVector> {
        if rng.gen_bool(0.5) {
            Ok(sample_ball_grid(near_radius, grid, rng)?.0)
        } else {
            Ok(ShiftVector::new(
                (0..n).map(|_| rng.gen_range(0..side)).collect(),
            ))
        }
    };

    let mut sets = Vec::with_capacity(gram_sets);
    for _ in 0..gram_sets {
        let k = rng.gen_range(2..=max_k.max(2));
        sets.push(
            (0..k)
                .map(|_| random_point(rng))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut min_gram_eigenvalue = f64::INFINITY;
    for s in &sets {
        min_gram_eigenvalue =
            min_gram_eigenvalue.min(min_eigenvalue(&symmetrize(&gram_matrix(h, s)))?);
    }

    let xs: Vec<ShiftVector> = (0..shifts)
        .map(|_| random_point(rng))
        .collect::<Result<_>>()?;
    let rows = par::map_slice(&xs, |x| {
        let hx = h.eval(x);
        let hm = h.eval(&grid.neg(x));
        let h2 = h.eval(&grid.double(x));
        (
            hx.abs(),
            (hx - hm).abs(),
            ((1.0 + h2).max(0.0) / 2.0).sqrt() - hx,
        )
    });
    let (mut max_abs_h, mut max_asymmetry, mut min_halving_slack) = (0.0f64, 0.0f64, f64::INFINITY);
    for (a, b, c) in rows {
        max_abs_h = max_abs_h.max(a);
        max_asymmetry = max_asymmetry.max(b);
        min_halving_slack = min_halving_slack.min(c);
    }
    Ok(PdPropertyAudit {
        min_gram_eigenvalue,
        max_abs_h,
        max_asymmetry,
        min_halving_slack,
    })
}
