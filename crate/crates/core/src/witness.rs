//! Witness states over `P(L) ∩ G`.
//!
//! A [`QuantumWitness`] is a convex mixture of pure states, each a dense
//! amplitude vector indexed by [`LatticeGrid::index`]. A pure witness is a
//! mixture with a single component of weight one.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{closest_vector, mu_sq, shortest_vector, GridPoint, LatticeGrid};
use crate::par;

/// Slack required between `lambda_1` and twice the support radius.
pub const HONEST_MARGIN: f64 = 1.0;

/// Norm and weight tolerance used by [`validate`].
pub const VALIDATION_TOL: f64 = 1e-12;

/// Support radius `2 sqrt(n)`.
pub fn default_cutoff(n: usize) -> f64 {
    2.0 * (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        par::sum_range(self.amps.len(), |i| self.amps[i].norm_sqr())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn nonzero_count(&self) -> usize {
        self.amps.iter().filter(|a| a.norm_sqr() > 0.0).count()
    }
}

#[derive(Debug, Clone)]
pub struct QuantumWitness {
    grid: Arc<LatticeGrid>,
    components: Vec<(f64, PureState)>,
}

impl QuantumWitness {
    pub fn pure(grid: Arc<LatticeGrid>, state: PureState) -> Self {
        Self {
            grid,
            components: vec![(1.0, state)],
        }
    }

    /// Mixture of states on one grid. Weights are taken as given; see [`validate`].
    pub fn ensemble(grid: Arc<LatticeGrid>, components: Vec<(f64, PureState)>) -> Self {
        Self { grid, components }
    }

    /// Mixture of existing witnesses, flattening nested ensembles.
    pub fn mixture(parts: &[(f64, &QuantumWitness)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let grid = first.1.grid.clone();
        let mut components = Vec::new();
        for (w, part) in parts {
            if !part.same_grid(&grid) {
                return Err(Error::GridMismatch);
            }
            for (v, s) in &part.components {
                components.push((w * v, s.clone()));
            }
        }
        Ok(Self { grid, components })
    }

    pub fn grid(&self) -> &Arc<LatticeGrid> {
        &self.grid
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn is_pure(&self) -> bool {
        self.components.len() == 1
    }

    /// The single state of a pure witness.
    pub fn state(&self) -> Option<&PureState> {
        match self.components.as_slice() {
            [(_, s)] => Some(s),
            _ => None,
        }
    }

    pub fn same_grid(&self, grid: &Arc<LatticeGrid>) -> bool {
        Arc::ptr_eq(&self.grid, grid) || *self.grid == **grid
    }

    /// Amplitude of the first component at `p`.
    pub fn amplitude(&self, p: &GridPoint) -> Complex64 {
        self.components[0].1.amps[self.grid.index(p)]
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.grid.n(), self.grid.m());
        let ensemble = !self.is_pure() || self.components[0].0 != 1.0;
        for (w, state) in &self.components {
            if ensemble {
                let _ = writeln!(s, "state {w:?}");
            }
            for (idx, a) in state.amps.iter().enumerate() {
                if a.re != 0.0 || a.im != 0.0 {
                    let p = self.grid.point(idx);
                    for c in &p.coeffs {
                        let _ = write!(s, "{c} ");
                    }
                    let _ = writeln!(s, "{:?} {:?}", a.re, a.im);
                }
            }
        }
        s
    }

    /// Parses the text format against a known grid.
    pub fn parse(text: &str, grid: Arc<LatticeGrid>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, head) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header `n m`"))?;
        let hv: Vec<usize> = head
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(hl, "header must be `n m`"))?;
        let [n, m] = hv[..] else {
            return Err(Error::parse(hl, "header must be `n m`"));
        };
        if n != grid.n() || m != grid.m() as usize {
            return Err(Error::GridMismatch);
        }
        let len = grid.len();
        let mut components: Vec<(f64, PureState)> = Vec::new();
        for (ln, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] == "state" {
                let w: f64 = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .filter(|_| toks.len() == 2)
                    .ok_or_else(|| Error::parse(ln, "expected `state w`"))?;
                components.push((w, PureState::new(vec![Complex64::new(0.0, 0.0); len])));
                continue;
            }
            if toks.len() != n + 2 {
                return Err(Error::parse(
                    ln,
                    format!("expected {n} coefficients and re im"),
                ));
            }
            let coeffs: Vec<u32> = toks[..n]
                .iter()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(ln, "bad coefficient"))?;
            let p = GridPoint::new(coeffs);
            if !grid.contains(&p) {
                return Err(Error::parse(ln, "coefficient out of range"));
            }
            let re: f64 = toks[n]
                .parse()
                .map_err(|_| Error::parse(ln, "bad real part"))?;
            let im: f64 = toks[n + 1]
                .parse()
                .map_err(|_| Error::parse(ln, "bad imaginary part"))?;
            if components.is_empty() {
                components.push((1.0, PureState::new(vec![Complex64::new(0.0, 0.0); len])));
            }
            let idx = grid.index(&p);
            components.last_mut().expect("pushed above").1.amps[idx] = Complex64::new(re, im);
        }
        if components.is_empty() {
            return Err(Error::parse(hl, "witness has no amplitudes"));
        }
        Ok(Self { grid, components })
    }

    pub fn read(path: impl AsRef<std::path::Path>, grid: Arc<LatticeGrid>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, grid)
    }

    pub fn write(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Squared distance `|tau_L(p)|^2` for every grid point, or infinity beyond `radius`.
fn voronoi_dist_sq(grid: &LatticeGrid, radius: f64) -> Result<Vec<f64>> {
    let r2 = radius * radius;
    let out = par::map_range(grid.len(), |idx| {
        let x = grid.embed(&grid.point(idx));
        closest_vector(&x, grid.lattice()).map(|c| {
            let d2 = c.distance * c.distance;
            if d2 <= r2 {
                d2
            } else {
                f64::INFINITY
            }
        })
    });
    out.into_iter().collect()
}

/// `sqrt(mu(tau / width))` on `d <= cutoff`, normalized.
fn gaussian_profile(grid: &Arc<LatticeGrid>, cutoff: f64, width: f64) -> Result<PureState> {
    let d2 = voronoi_dist_sq(grid, cutoff)?;
    let inv_w2 = 1.0 / (width * width);
    let raw: Vec<f64> = par::map_range(d2.len(), |i| {
        if d2[i].is_finite() {
            mu_sq(d2[i] * inv_w2).sqrt()
        } else {
            0.0
        }
    });
    let norm_sq = par::sum_range(raw.len(), |i| raw[i] * raw[i]);
    if norm_sq == 0.0 {
        return Err(Error::Precondition("Gaussian support is empty".into()));
    }
    let inv_d = 1.0 / norm_sq.sqrt();
    Ok(PureState::new(
        raw.into_iter()
            .map(|v| Complex64::new(v * inv_d, 0.0))
            .collect(),
    ))
}

/// The honest witness `f(x) = sqrt(mu(tau_L(x))) / D` on `d(x, L) <= cutoff`.
///
/// Requires `lambda_1 >= 2 cutoff + HONEST_MARGIN` so every support point has
/// an unambiguous nearest lattice vector.
pub fn build_honest_witness(grid: &Arc<LatticeGrid>, cutoff: f64) -> Result<QuantumWitness> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidParameter("cutoff must be positive".into()));
    }
    let lambda1 = shortest_vector(grid.lattice())?.length;
    let need = 2.0 * cutoff + HONEST_MARGIN;
    if lambda1 < need {
        return Err(Error::Precondition(format!(
            "shortest vector {lambda1:.4} is below 2 * cutoff + margin = {need:.4}"
        )));
    }
    Ok(QuantumWitness::pure(
        grid.clone(),
        gaussian_profile(grid, cutoff, 1.0)?,
    ))
}

/// Families of cheating witnesses used in soundness experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum AdversarialKind {
    /// The Gaussian state sent regardless of the target.
    HonestForNoInstance,
    /// Uniform over the lattice points of the grid (only the origin inside `P(L)`).
    LatticeDelta,
    /// Gaussian of width `gamma` instead of one.
    WrongWidth { gamma: f64 },
    /// Honest state shifted by a grid vector.
    Shifted { shift: GridPoint },
    /// Honest amplitudes with seeded uniform random phases.
    RandomPhase { seed: u64 },
}

impl FromStr for AdversarialKind {
    type Err = Error;

    /// Parses the parameter-free part of a kind name; parameters take defaults.
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "honest_for_no_instance" | "honest" => Ok(Self::HonestForNoInstance),
            "lattice_delta" => Ok(Self::LatticeDelta),
            "wrong_width" => Ok(Self::WrongWidth { gamma: 1.5 }),
            "shifted" => Ok(Self::Shifted {
                shift: GridPoint::new(Vec::new()),
            }),
            "random_phase" => Ok(Self::RandomPhase { seed: 0 }),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

pub fn build_adversarial_witness(
    kind: &AdversarialKind,
    grid: &Arc<LatticeGrid>,
    cutoff: f64,
) -> Result<QuantumWitness> {
    let state = match kind {
        AdversarialKind::HonestForNoInstance => gaussian_profile(grid, cutoff, 1.0)?,
        AdversarialKind::LatticeDelta => {
            let mut amps = vec![Complex64::new(0.0, 0.0); grid.len()];
            amps[0] = Complex64::new(1.0, 0.0);
            PureState::new(amps)
        }
        AdversarialKind::WrongWidth { gamma } => {
            if !(*gamma > 0.0) {
                return Err(Error::InvalidParameter(
                    "width factor must be positive".into(),
                ));
            }
            gaussian_profile(grid, cutoff, *gamma)?
        }
        AdversarialKind::Shifted { shift } => {
            if !grid.contains(shift) {
                return Err(Error::GridMismatch);
            }
            let base = gaussian_profile(grid, cutoff, 1.0)?;
            let amps = par::map_range(base.len(), |i| base.amps[grid.shifted_index(i, shift)]);
            PureState::new(amps)
        }
        AdversarialKind::RandomPhase { seed } => {
            let base = gaussian_profile(grid, cutoff, 1.0)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let amps = base
                .amps
                .iter()
                .map(|a| {
                    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    a * Complex64::from_polar(1.0, theta)
                })
                .collect();
            PureState::new(amps)
        }
    };
    Ok(QuantumWitness::pure(grid.clone(), state))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Length {
        component: usize,
        len: usize,
        expected: usize,
    },
    NonFinite {
        component: usize,
    },
    Norm {
        component: usize,
        norm_sq: f64,
    },
    NegativeWeight {
        component: usize,
        weight: f64,
    },
    WeightSum {
        sum: f64,
    },
    Empty,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks lengths, unit norms and mixture weights.
pub fn validate(witness: &QuantumWitness) -> ValidationReport {
    let mut violations = Vec::new();
    let expected = witness.grid.len();
    if witness.components.is_empty() {
        violations.push(Violation::Empty);
    }
    let mut sum = 0.0;
    for (k, (w, state)) in witness.components.iter().enumerate() {
        sum += w;
        if *w < 0.0 {
            violations.push(Violation::NegativeWeight {
                component: k,
                weight: *w,
            });
        }
        if state.len() != expected {
            violations.push(Violation::Length {
                component: k,
                len: state.len(),
                expected,
            });
            continue;
        }
        if state
            .amps
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            violations.push(Violation::NonFinite { component: k });
            continue;
        }
        let ns = state.norm_sq();
        if (ns.sqrt() - 1.0).abs() > VALIDATION_TOL {
            violations.push(Violation::Norm {
                component: k,
                norm_sq: ns,
            });
        }
    }
    if !witness.components.is_empty() && (sum - 1.0).abs() > VALIDATION_TOL {
        violations.push(Violation::WeightSum { sum });
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GridSpec, Lattice};

    fn grid(scale: i64, m: u32) -> Arc<LatticeGrid> {
        let l = Lattice::from_integer_rows(&[vec![scale, 0], vec![0, scale]], 1).unwrap();
        Arc::new(LatticeGrid::new(l, GridSpec::new(m, 1)).unwrap())
    }

    #[test]
    fn honest_is_normalized_and_peaked_at_origin() {
        let g = grid(15, 6);
        let w = build_honest_witness(&g, default_cutoff(2)).unwrap();
        assert!(validate(&w).is_valid());
        let s = w.state().unwrap();
        let max = s.amps.iter().map(|a| a.re).fold(0.0, f64::max);
        assert_eq!(s.amps[0].re, max);
        assert!(s.amps.iter().all(|a| a.im == 0.0 && a.re >= 0.0));
    }

    #[test]
    fn honest_requires_spacing() {
        let g = grid(5, 5);
        assert!(matches!(
            build_honest_witness(&g, default_cutoff(2)),
            Err(Error::Precondition(_))
        ));
        // adversaries are not held to it
        assert!(build_adversarial_witness(&AdversarialKind::HonestForNoInstance, &g, 2.0).is_ok());
    }

    #[test]
    fn lattice_delta_is_origin_only() {
        let g = grid(1, 3);
        let w = build_adversarial_witness(&AdversarialKind::LatticeDelta, &g, 1.0).unwrap();
        let s = w.state().unwrap();
        assert_eq!(s.amps[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.nonzero_count(), 1);
    }

    #[test]
    fn unit_width_matches_honest() {
        let g = grid(15, 6);
        let c = default_cutoff(2);
        let h = build_honest_witness(&g, c).unwrap();
        let w =
            build_adversarial_witness(&AdversarialKind::WrongWidth { gamma: 1.0 }, &g, c).unwrap();
        assert!(h.state().unwrap().distance(w.state().unwrap()) <= 1e-12);
    }

    #[test]
    fn random_phase_is_reproducible() {
        let g = grid(15, 5);
        let k = AdversarialKind::RandomPhase { seed: 99 };
        let a = build_adversarial_witness(&k, &g, 2.0).unwrap();
        let b = build_adversarial_witness(&k, &g, 2.0).unwrap();
        assert_eq!(a.state().unwrap(), b.state().unwrap());
        let c = build_adversarial_witness(&AdversarialKind::RandomPhase { seed: 100 }, &g, 2.0)
            .unwrap();
        assert_ne!(a.state().unwrap(), c.state().unwrap());
        assert!(validate(&a).is_valid());
    }

    #[test]
    fn kind_names() {
        assert_eq!(
            "lattice-delta".parse::<AdversarialKind>().unwrap(),
            AdversarialKind::LatticeDelta
        );
        assert!(matches!(
            "bogus".parse::<AdversarialKind>(),
            Err(Error::UnknownKind(_))
        ));
    }

    #[test]
    fn validation_flags_problems() {
        let g = grid(15, 4);
        let h = build_honest_witness(&g, 2.0).unwrap();
        let scaled = QuantumWitness::pure(g.clone(), h.state().unwrap().scaled(2.0));
        assert!(matches!(
            validate(&scaled).violations[..],
            [Violation::Norm { .. }]
        ));
        let s = h.state().unwrap().clone();
        let bad = QuantumWitness::ensemble(g.clone(), vec![(0.5, s.clone()), (0.6, s)]);
        assert_eq!(
            validate(&bad).violations,
            vec![Violation::WeightSum { sum: 1.1 }]
        );
        let short = QuantumWitness::pure(g, PureState::new(vec![Complex64::new(1.0, 0.0)]));
        assert!(matches!(
            validate(&short).violations[..],
            [Violation::Length { .. }]
        ));
    }

    #[test]
    fn text_roundtrip() {
        let g = grid(15, 4);
        let a =
            build_adversarial_witness(&AdversarialKind::RandomPhase { seed: 3 }, &g, 2.5).unwrap();
        let b = build_adversarial_witness(&AdversarialKind::WrongWidth { gamma: 0.7 }, &g, 2.5)
            .unwrap();
        let mix = QuantumWitness::mixture(&[(0.25, &a), (0.75, &b)]).unwrap();
        for w in [&a, &mix] {
            let back = QuantumWitness::parse(&w.to_text(), g.clone()).unwrap();
            assert_eq!(back.components().len(), w.components().len());
            for ((wa, sa), (wb, sb)) in w.components().iter().zip(back.components()) {
                assert_eq!(wa, wb);
                for (x, y) in sa.amps.iter().zip(&sb.amps) {
                    assert!((x - y).norm() <= 1e-15 * x.norm().max(f64::MIN_POSITIVE));
                }
            }
        }
        let other = grid(15, 5);
        assert!(matches!(
            QuantumWitness::parse(&a.to_text(), other),
            Err(Error::GridMismatch)
        ));
    }
}
