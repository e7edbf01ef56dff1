//! Shift operators, autocorrelation functions and the controlled-shift circuit.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{closest_vector, mu_vec, norm, GridPoint, LatticeGrid};
use crate::par;
use crate::witness::{PureState, QuantumWitness};

/// Shift `x ∈ G` reduced into the parallelepiped; same encoding as a grid point.
pub type ShiftVector = GridPoint;

/// Tolerance on `|norm - 1|` accepted by the autocorrelation functions.
pub const NORM_TOL: f64 = 1e-9;

fn check_state(grid: &LatticeGrid, state: &PureState, x: &ShiftVector) -> Result<()> {
    if state.len() != grid.len() || !grid.contains(x) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `T_x`: `new[p] = old[p + x]`, coefficient-wise mod `2^m`.
pub fn apply_shift(grid: &LatticeGrid, state: &PureState, x: &ShiftVector) -> Result<PureState> {
    check_state(grid, state, x)?;
    let amps = par::map_range(state.len(), |i| state.amps[grid.shifted_index(i, x)]);
    Ok(PureState::new(amps))
}

/// `<state| T_x |state>` without normalization checks.
pub fn overlap(grid: &LatticeGrid, state: &PureState, x: &ShiftVector) -> Complex64 {
    let a = &state.amps;
    let re = shifted_sum(grid, x, |i, j| a[i].re * a[j].re + a[i].im * a[j].im);
    let im = shifted_sum(grid, x, |i, j| a[i].re * a[j].im - a[i].im * a[j].re);
    Complex64::new(re, im)
}

/// `Re <state| T_x |state>` without normalization checks.
pub fn overlap_re(grid: &LatticeGrid, state: &PureState, x: &ShiftVector) -> f64 {
    let a = &state.amps;
    shifted_sum(grid, x, |i, j| a[i].re * a[j].re + a[i].im * a[j].im)
}

/// `sum_i f(i, index(i + x))` in index order; along the lowest coefficient
/// the shift is a rotation, so each row needs one full index computation.
fn shifted_sum<F>(grid: &LatticeGrid, x: &ShiftVector, f: F) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync + Send,
{
    let mask = grid.side() as usize - 1;
    par::sum_chunks(grid.len(), |lo, hi| {
        let mut acc = 0.0;
        let mut i = lo;
        while i < hi {
            let row_end = hi.min((i | mask) + 1);
            let start = grid.shifted_index(i, x);
            let high = start & !mask;
            let mut low = start & mask;
            for k in i..row_end {
                acc += f(k, high | low);
                low = (low + 1) & mask;
            }
            i = row_end;
        }
        acc
    })
}

/// `g(x) = Re <state| T_x |state>`.
pub fn autocorr_g(grid: &LatticeGrid, state: &PureState, x: &ShiftVector) -> Result<f64> {
    check_state(grid, state, x)?;
    let ns = state.norm_sq();
    if (ns - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(ns));
    }
    Ok(overlap_re(grid, state, x))
}

/// `h(x) = sum_i w_i Re <alpha_i| T_x |alpha_i>`.
pub fn autocorr_h(witness: &QuantumWitness, x: &ShiftVector) -> Result<f64> {
    let grid = witness.grid();
    witness
        .components()
        .iter()
        .map(|(w, s)| autocorr_g(grid, s, x).map(|g| w * g))
        .sum()
}

/// Probability of reading 1 on the control qubit of `C_x`.
///
/// Simulated on the joint (control ⊗ register) vector: prepare
/// `(|0> + |1>)/sqrt2 ⊗ |eta>`, apply `T_x` on the `|1>` half, then a
/// Hadamard on the control.
pub fn circuit_probability(witness: &QuantumWitness, x: &ShiftVector) -> Result<f64> {
    let grid = witness.grid();
    let mut total = 0.0;
    for (w, state) in witness.components() {
        check_state(grid, state, x)?;
        let ns = state.norm_sq();
        if (ns - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(ns));
        }
        total += w * control_one_probability(grid, state, x);
    }
    Ok(total)
}

fn control_one_probability(grid: &LatticeGrid, state: &PureState, x: &ShiftVector) -> f64 {
    let n = state.len();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // joint index = control * n + register
    let mut joint = vec![Complex64::new(0.0, 0.0); 2 * n];
    par::fill_indexed(&mut joint, |k| state.amps[k % n] * h);
    // controlled T_x on the control = 1 block
    let upper = joint.split_off(n);
    let shifted = par::map_range(n, |i| upper[grid.shifted_index(i, x)]);
    joint.extend(shifted);
    // Hadamard on the control qubit
    let (zero, one) = joint.split_at(n);
    par::sum_range(n, |i| ((zero[i] - one[i]) * h).norm_sqr())
}

/// One row of the Gaussian autocorrelation audit.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub x: ShiftVector,
    pub dist: f64,
    pub g: f64,
    pub mu_half_tau: f64,
    pub abs_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub max_dev: f64,
}

impl AuditReport {
    pub const CSV_HEADER: &'static str = "x_coeffs,dist,g,mu_half_tau,abs_dev";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.12e},{:.12e},{:.12e},{:.12e}",
                coeff_string(&r.x),
                r.dist,
                r.g,
                r.mu_half_tau,
                r.abs_dev
            );
        }
        s
    }
}

/// Space-separated coefficients, used in CSV cells.
pub fn coeff_string(p: &GridPoint) -> String {
    p.coeffs
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Compares `g(x)` with `mu(tau_L(x) / 2)` on each sample.
pub fn gaussian_autocorr_audit(
    grid: &LatticeGrid,
    state: &PureState,
    samples: &[ShiftVector],
) -> Result<AuditReport> {
    let ns = state.norm_sq();
    if (ns - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(ns));
    }
    let rows: Vec<Result<AuditRow>> = samples
        .iter()
        .map(|x| {
            check_state(grid, state, x)?;
            let cv = closest_vector(&grid.embed(x), grid.lattice())?;
            let half: Vec<f64> = cv.tau.iter().map(|t| t / 2.0).collect();
            let g = overlap_re(grid, state, x);
            let target = mu_vec(&half);
            Ok(AuditRow {
                x: x.clone(),
                dist: cv.distance,
                g,
                mu_half_tau: target,
                abs_dev: (g - target).abs(),
            })
        })
        .collect();
    let rows: Vec<AuditRow> = rows.into_iter().collect::<Result<_>>()?;
    let max_dev = rows.iter().map(|r| r.abs_dev).fold(0.0, f64::max);
    Ok(AuditReport { rows, max_dev })
}

/// All grid points with `d(x, L) <= radius`, for `radius` below `lambda_1 / 2`.
///
/// Enumerates signed coefficient vectors around the origin; the order is
/// lexicographic in the signed coefficients.
pub fn grid_ball(grid: &LatticeGrid, radius: f64) -> Vec<ShiftVector> {
    let n = grid.n();
    let side = grid.side() as f64;
    let bound: Vec<i64> = (0..n)
        .map(|i| (grid.lattice().dual_norm(i) * radius * side + 1e-9).floor() as i64)
        .collect();
    let mut out = Vec::new();
    let mut c: Vec<i64> = bound.iter().map(|b| -b).collect();
    loop {
        let v = grid.embed_signed(&c);
        if norm(&v) <= radius + 1e-12 {
            out.push(grid.from_signed(&c));
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < bound[i] {
                c[i] += 1;
                break;
            }
            c[i] = -bound[i];
        }
    }
}

/// Audit sample set: every point within `near_radius`, topped up with
/// uniformly random grid points until `total` distinct samples are reached.
pub fn audit_samples<R: Rng + ?Sized>(
    grid: &LatticeGrid,
    near_radius: f64,
    total: usize,
    rng: &mut R,
) -> Vec<ShiftVector> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(total);
    for p in grid_ball(grid, near_radius) {
        if out.len() >= total {
            break;
        }
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    let side = grid.side() as u32;
    let mut attempts = 0usize;
    while out.len() < total.min(grid.len()) && attempts < 100 * total.max(1) {
        attempts += 1;
        let p = GridPoint::new((0..grid.n()).map(|_| rng.gen_range(0..side)).collect());
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

/// Max audit deviation of the honest witness at several resolutions.
///
/// Samples are given on the coarsest grid and lifted to each finer one, so
/// every resolution is probed at the same Euclidean points.
pub fn autocorr_convergence(
    base: &LatticeGrid,
    ms: &[u32],
    cutoff: f64,
    samples: &[ShiftVector],
) -> Result<Vec<(u32, f64)>> {
    ms.iter()
        .map(|&m| {
            let grid = std::sync::Arc::new(base.with_m(m)?);
            let w = crate::witness::build_honest_witness(&grid, cutoff)?;
            let lifted: Vec<ShiftVector> = samples
                .iter()
                .map(|p| base.lift(p, m))
                .collect::<Result<_>>()?;
            let rep = gaussian_autocorr_audit(&grid, w.state().expect("pure"), &lifted)?;
            Ok((m, rep.max_dev))
        })
        .collect()
}
