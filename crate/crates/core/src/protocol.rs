//! Super-verifier, grid-ball sampler, amplified verifier, the SVP to CVP′
//! reduction and the experiment drivers built on them.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::autocorr::{circuit_probability, coeff_string, ShiftVector};
use crate::error::{Error, Result};
use crate::lattice::{
    closest_vector, mu_vec, norm, shortest_vector, DyadicVector, GapThresholds, Instance, Lattice,
    LatticeGrid, Truth,
};
use crate::par;
use crate::pd::{self, PdFunctionView, TestParams, WitnessFunction};
use crate::witness::{
    build_adversarial_witness, build_honest_witness, AdversarialKind, QuantumWitness,
};

/// Rejection attempts before [`sample_ball_grid`] gives up.
pub const SAMPLER_RETRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Target,
    Short,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Target => "TARGET",
            TestKind::Short => "SHORT",
        })
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "target" => Ok(TestKind::Target),
            "short" => Ok(TestKind::Short),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

/// A circuit `C_shift` with the probability `r` it should produce and accuracy `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestDescriptor {
    pub shift: ShiftVector,
    pub r: f64,
    pub s: f64,
    pub kind: TestKind,
}

impl TestDescriptor {
    pub fn new(shift: ShiftVector, r: f64, s: f64, kind: TestKind) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!("r = {r} outside [0, 1]")));
        }
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("s = {s} must be positive")));
        }
        if kind == TestKind::Target && r != 0.5 {
            return Err(Error::InvalidParameter("target tests have r = 1/2".into()));
        }
        Ok(Self { shift, r, s, kind })
    }

    /// The amplified accept rule `|r' - r| <= s + p3 / 2`.
    pub fn accepts(&self, r_prime: f64, p3: f64) -> bool {
        (r_prime - self.r).abs() <= self.s + p3 / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Registers report their exact acceptance probability.
    Exact,
    /// Registers report independent Bernoulli outcomes.
    Sampled,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" | "exact_prob" | "exact-prob" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub k: usize,
    pub p2: f64,
    pub p3: f64,
    pub s_desk: f64,
    pub ball_radius: f64,
    pub seed: u64,
    pub mode: Mode,
}

impl ProtocolConfig {
    /// `k = 2000`, `p3 = 0.1`, `s = 0.05`, ball radius of 4 grid steps.
    pub fn desk(grid: &LatticeGrid, seed: u64) -> Self {
        Self {
            k: 2000,
            p2: 0.5,
            p3: 0.1,
            s_desk: 0.05,
            ball_radius: 4.0 * grid.max_step(),
            seed,
            mode: Mode::Sampled,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p3 > 0.0 && self.p3 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p3 = {} outside (0, 1)",
                self.p3
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.ball_radius > 0.0) {
            return Err(Error::InvalidParameter(
                "ball radius must be positive".into(),
            ));
        }
        if !(self.s_desk > 0.0) {
            return Err(Error::InvalidParameter("s must be positive".into()));
        }
        Ok(())
    }
}

/// One super-test applied to all registers.
#[derive(Debug, Clone, PartialEq)]
pub struct TestRecord {
    pub descriptor: TestDescriptor,
    /// Exact probability (EXACT) or fraction of ones `r'` (SAMPLED).
    pub value: f64,
    /// Expected `r'`: the probability on the register-averaged state.
    pub expected: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub records: Vec<TestRecord>,
    pub accept: bool,
    pub diagnostics: Vec<String>,
}

/// Uniform grid point in the ball of radius `radius` around the origin.
///
/// Draws `z` uniformly from the ball of radius `radius + diam P(G)`, rounds
/// its grid coefficients down and keeps the result if it lies in the ball.
/// Returns the point and the number of rejected draws.
pub fn sample_ball_grid<R: Rng + ?Sized>(
    radius: f64,
    grid: &LatticeGrid,
    rng: &mut R,
) -> Result<(ShiftVector, usize)> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "no grid point in a ball of radius {radius}"
        )));
    }
    let n = grid.n();
    let outer = radius + grid.cell_diameter_bound();
    let side = grid.side() as f64;
    for attempt in 0..SAMPLER_RETRIES {
        let dir: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let len = norm(&dir);
        if len == 0.0 {
            continue;
        }
        let u: f64 = rng.gen();
        let rad = outer * u.powf(1.0 / n as f64);
        let z: Vec<f64> = dir.iter().map(|d| d * rad / len).collect();
        let j: Vec<i64> = grid
            .lattice()
            .coefficients_of(&z)
            .iter()
            .map(|c| (c * side).floor() as i64)
            .collect();
        if norm(&grid.embed_signed(&j)) <= radius {
            return Ok((grid.from_signed(&j), attempt));
        }
    }
    Err(Error::SamplerExhausted(SAMPLER_RETRIES))
}

/// Draws one super-test: the target test or a short-vector test, each with
/// probability 1/2 unless `force` fixes the branch.
pub fn super_verifier_sample<R: Rng + ?Sized>(
    instance: &Instance,
    grid: &LatticeGrid,
    config: &ProtocolConfig,
    force: Option<TestKind>,
    rng: &mut R,
) -> Result<TestDescriptor> {
    if instance.n() != grid.n() {
        return Err(Error::DimensionMismatch {
            expected: grid.n(),
            got: instance.n(),
        });
    }
    let kind = match force {
        Some(k) => k,
        None if rng.gen_bool(0.5) => TestKind::Target,
        None => TestKind::Short,
    };
    match kind {
        TestKind::Target => {
            TestDescriptor::new(grid.reduce(&instance.target)?, 0.5, config.s_desk, kind)
        }
        TestKind::Short => {
            let (x, _) = sample_ball_grid(config.ball_radius, grid, rng)?;
            let mut c = grid.short_coeffs(&x)?;
            if rng.gen_bool(0.5) {
                c.iter_mut().for_each(|v| *v *= 2);
            }
            let half: Vec<f64> = grid.embed_signed(&c).iter().map(|v| v / 2.0).collect();
            let r = (1.0 - mu_vec(&half)) / 2.0;
            TestDescriptor::new(grid.from_signed(&c), r, config.s_desk, kind)
        }
    }
}

/// Measured outcome of one register: `p` exactly or a 0/1 draw.
pub fn run_super_test<R: Rng + ?Sized>(
    descriptor: &TestDescriptor,
    witness: &QuantumWitness,
    mode: Mode,
    rng: &mut R,
) -> Result<f64> {
    let p = circuit_probability(witness, &descriptor.shift)?;
    Ok(match mode {
        Mode::Exact => p,
        Mode::Sampled => f64::from(u8::from(rng.gen::<f64>() < p)),
    })
}

/// State of `k` witness registers.
#[derive(Debug, Clone)]
pub enum MultiWitness {
    /// Independent registers.
    Product(Vec<Arc<QuantumWitness>>),
    /// A classical mixture over `k`-tuples of register states.
    Correlated(Vec<(f64, Vec<Arc<QuantumWitness>>)>),
}

impl MultiWitness {
    /// `k` copies of one witness.
    pub fn power(witness: Arc<QuantumWitness>, k: usize) -> Self {
        MultiWitness::Product(vec![witness; k])
    }

    pub fn registers(&self) -> Result<usize> {
        match self {
            MultiWitness::Product(v) => Ok(v.len()),
            MultiWitness::Correlated(parts) => {
                let k = parts.first().map_or(0, |(_, t)| t.len());
                if let Some((_, t)) = parts.iter().find(|(_, t)| t.len() != k) {
                    return Err(Error::RegisterMismatch {
                        expected: k,
                        got: t.len(),
                    });
                }
                Ok(k)
            }
        }
    }
}

struct ProbCache<'a> {
    shift: &'a ShiftVector,
    seen: Vec<(*const QuantumWitness, f64)>,
}

impl<'a> ProbCache<'a> {
    fn get(&mut self, w: &Arc<QuantumWitness>) -> Result<f64> {
        let key = Arc::as_ptr(w);
        if let Some((_, p)) = self.seen.iter().find(|(k, _)| *k == key) {
            return Ok(*p);
        }
        let p = circuit_probability(w, self.shift)?;
        self.seen.push((key, p));
        Ok(p)
    }
}

fn register_fraction<R: Rng + ?Sized>(
    regs: &[Arc<QuantumWitness>],
    cache: &mut ProbCache<'_>,
    mode: Mode,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let k = regs.len() as f64;
    let mut exact = 0.0;
    let mut ones = 0usize;
    for w in regs {
        let p = cache.get(w)?;
        exact += p;
        if mode == Mode::Sampled && rng.gen::<f64>() < p {
            ones += 1;
        }
    }
    let value = match mode {
        Mode::Exact => exact / k,
        Mode::Sampled => ones as f64 / k,
    };
    Ok((value, exact / k))
}

/// Draws one super-test, applies it to every register and compares `r'` with `r`.
pub fn qma_amplified_verify<R: Rng + ?Sized>(
    instance: &Instance,
    grid: &LatticeGrid,
    multi: &MultiWitness,
    config: &ProtocolConfig,
    force: Option<TestKind>,
    rng: &mut R,
) -> Result<ProtocolReport> {
    config.validate()?;
    let k = multi.registers()?;
    if k != config.k {
        return Err(Error::RegisterMismatch {
            expected: config.k,
            got: k,
        });
    }
    let descriptor = super_verifier_sample(instance, grid, config, force, rng)?;
    let mut cache = ProbCache {
        shift: &descriptor.shift,
        seen: Vec::new(),
    };
    let (value, expected) = match multi {
        MultiWitness::Product(regs) => register_fraction(regs, &mut cache, config.mode, rng)?,
        MultiWitness::Correlated(parts) => {
            let mut expected = 0.0;
            for (w, regs) in parts {
                expected += w * register_fraction(regs, &mut cache, Mode::Exact, rng)?.0;
            }
            let value = match config.mode {
                Mode::Exact => expected,
                Mode::Sampled => {
                    let total: f64 = parts.iter().map(|(w, _)| w).sum();
                    let mut u = rng.gen::<f64>() * total;
                    let idx = parts
                        .iter()
                        .position(|(w, _)| {
                            u -= w;
                            u < 0.0
                        })
                        .unwrap_or(parts.len() - 1);
                    register_fraction(&parts[idx].1, &mut cache, Mode::Sampled, rng)?.0
                }
            };
            (value, expected)
        }
    };
    let pass = descriptor.accepts(value, config.p3);
    Ok(ProtocolReport {
        records: vec![TestRecord {
            descriptor,
            value,
            expected,
            pass,
        }],
        accept: pass,
        diagnostics: Vec::new(),
    })
}

/// A CVP′ instance produced from an SVP instance.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub index: usize,
    /// `L` with basis vector `index` doubled.
    pub lattice: Lattice,
    /// `v_index`, which has coefficient 1/2 on the doubled vector.
    pub target: DyadicVector,
}

impl ReducedInstance {
    pub fn to_instance(&self, thresholds: GapThresholds) -> Result<Instance> {
        Instance::new(self.lattice.clone(), self.target.clone(), 1.0, thresholds)
    }
}

pub fn reduce_svp_to_cvp(lattice: &Lattice) -> Result<Vec<ReducedInstance>> {
    let n = lattice.n();
    (0..n)
        .map(|i| {
            let mut num = vec![0; n];
            num[i] = 1;
            Ok(ReducedInstance {
                index: i,
                lattice: lattice.with_row_doubled(i)?,
                target: DyadicVector::new(num, 1),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionRow {
    pub index: usize,
    pub distance: f64,
    pub lambda1: f64,
}

/// Oracle check of the reduction's promise claims.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCheck {
    pub lambda1: f64,
    /// SVP label: YES when `lambda_1 >= beta`, NO when `lambda_1 <= 1`.
    pub truth: Truth,
    pub rows: Vec<ReductionRow>,
    /// Coefficient indices of the shortest vector that are odd.
    pub odd_indices: Vec<usize>,
    pub holds: bool,
}

pub fn check_reduction(lattice: &Lattice, beta: f64) -> Result<ReductionCheck> {
    const EPS: f64 = 1e-9;
    let sv = shortest_vector(lattice)?;
    let truth = if sv.length <= 1.0 {
        Truth::No
    } else if sv.length >= beta {
        Truth::Yes
    } else {
        Truth::Unpromised
    };
    let rows = reduce_svp_to_cvp(lattice)?
        .into_iter()
        .map(|ri| {
            let v = ri.lattice.combine(&ri.target.coefficients());
            Ok(ReductionRow {
                index: ri.index,
                distance: closest_vector(&v, &ri.lattice)?.distance,
                lambda1: shortest_vector(&ri.lattice)?.length,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let odd_indices: Vec<usize> = (0..lattice.n())
        .filter(|&j| sv.coeffs[j] % 2 != 0)
        .collect();
    let holds = match truth {
        Truth::Yes => rows
            .iter()
            .all(|r| r.distance >= beta - EPS && r.lambda1 >= beta - EPS),
        Truth::No => odd_indices
            .iter()
            .any(|&j| rows[j].distance <= sv.length + EPS),
        Truth::Unpromised => true,
    };
    Ok(ReductionCheck {
        lambda1: sv.length,
        truth,
        rows,
        odd_indices,
        holds,
    })
}

/// Recomputes the instance label with the brute-force oracles.
pub fn classify_instance(instance: &Instance, thresholds: GapThresholds) -> Result<Truth> {
    let lambda1 = shortest_vector(&instance.lattice)?.length;
    let d = closest_vector(&instance.target_vector(), &instance.lattice)?.distance;
    Ok(thresholds.classify(lambda1, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Completeness,
    Soundness,
    Reduction,
    PdAudit,
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "completeness" => Ok(Self::Completeness),
            "soundness" => Ok(Self::Soundness),
            "reduction" => Ok(Self::Reduction),
            "pd-audit" => Ok(Self::PdAudit),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Completeness => "completeness",
            Self::Soundness => "soundness",
            Self::Reduction => "reduction",
            Self::PdAudit => "pd-audit",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentParams {
    pub instance: Instance,
    pub grid: Arc<LatticeGrid>,
    pub config: ProtocolConfig,
    pub trials: usize,
    /// Register state; defaults to the honest witness (completeness, pd-audit)
    /// or the honest-for-NO witness (soundness).
    pub witness: Option<Arc<QuantumWitness>>,
    pub force: Option<TestKind>,
    pub cutoff: f64,
    pub instance_id: String,
    pub pd: TestParams,
    /// Shift `w` examined by the pd-audit certificate.
    pub anomaly: Option<ShiftVector>,
    /// `beta` of the SVP promise for the reduction experiment.
    pub beta: f64,
    /// Function examined by the pd-audit experiment.
    pub pd_source: PdSource,
    /// Replaces `h(±anomaly)` by this value in the pd-audit experiment.
    pub suppress: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdSource {
    /// Autocorrelation of the register witness.
    Witness,
    /// The exact profile `mu(tau(x) / 2)`.
    GaussianTable,
}

impl FromStr for PdSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "witness" => Ok(Self::Witness),
            "gaussian" | "gaussian-table" => Ok(Self::GaussianTable),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

impl ExperimentParams {
    pub fn new(instance: Instance, grid: Arc<LatticeGrid>, seed: u64) -> Self {
        let n = grid.n();
        let config = ProtocolConfig::desk(&grid, seed);
        Self {
            instance,
            config,
            trials: 1000,
            witness: None,
            force: None,
            cutoff: crate::witness::default_cutoff(n),
            instance_id: "instance".into(),
            pd: TestParams::default(),
            anomaly: None,
            beta: GapThresholds::desk(n).yes_min,
            pd_source: PdSource::Witness,
            suppress: None,
            grid,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub kind: ExperimentKind,
    pub runs: usize,
    pub accepted: usize,
    /// Headline number: acceptance rate, rejection rate, fraction of reduction
    /// claims holding, or the smallest Gram eigenvalue.
    pub metric: f64,
    pub metric_name: &'static str,
    pub accept: bool,
    pub diagnostics: Vec<String>,
    pub csv: String,
}

pub const PROTOCOL_CSV_HEADER: &str =
    "seed,instance_id,test_kind,shift_coeffs,r,s,p_or_rprime,pass";

/// Seed of run `i` derived from the experiment seed.
pub fn run_seed(base: u64, i: usize) -> u64 {
    let mut z = base ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn protocol_runs(
    params: &ExperimentParams,
    multi: &MultiWitness,
) -> Result<Vec<(u64, ProtocolReport)>> {
    params.config.validate()?;
    let out = par::map_range(params.trials, |i| {
        let seed = run_seed(params.config.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        qma_amplified_verify(
            &params.instance,
            &params.grid,
            multi,
            &params.config,
            params.force,
            &mut rng,
        )
        .map(|r| (seed, r))
    });
    out.into_iter().collect()
}

fn protocol_csv(id: &str, runs: &[(u64, ProtocolReport)]) -> String {
    let mut s = String::from(PROTOCOL_CSV_HEADER);
    s.push('\n');
    for (seed, rep) in runs {
        for rec in &rep.records {
            let _ = writeln!(
                s,
                "{seed},{id},{},{},{:.12e},{:.12e},{:.12e},{}",
                rec.descriptor.kind,
                coeff_string(&rec.descriptor.shift),
                rec.descriptor.r,
                rec.descriptor.s,
                rec.value,
                u8::from(rec.pass)
            );
        }
    }
    s
}

pub fn run_experiment(
    kind: ExperimentKind,
    params: &ExperimentParams,
) -> Result<ExperimentOutcome> {
    match kind {
        ExperimentKind::Completeness | ExperimentKind::Soundness => {
            let witness = match &params.witness {
                Some(w) => w.clone(),
                None if kind == ExperimentKind::Completeness => {
                    Arc::new(build_honest_witness(&params.grid, params.cutoff)?)
                }
                None => Arc::new(build_adversarial_witness(
                    &AdversarialKind::HonestForNoInstance,
                    &params.grid,
                    params.cutoff,
                )?),
            };
            let multi = MultiWitness::power(witness, params.config.k);
            let runs = protocol_runs(params, &multi)?;
            let accepted = runs.iter().filter(|(_, r)| r.accept).count();
            let n = runs.len().max(1) as f64;
            let rate = accepted as f64 / n;
            let targets: Vec<&TestRecord> = runs
                .iter()
                .flat_map(|(_, r)| &r.records)
                .filter(|r| r.descriptor.kind == TestKind::Target)
                .collect();
            let mut diagnostics = vec![
                format!("truth={}", params.instance.truth),
                format!("distance={:.6}", params.instance.distance),
                format!("lambda1={:.6}", params.instance.lambda1),
                format!("target_tests={}", targets.len()),
            ];
            if let Some(t) = targets.first() {
                diagnostics.push(format!("target_probability={:.6}", t.expected));
            }
            let (metric, metric_name, accept) = if kind == ExperimentKind::Completeness {
                (rate, "acceptance_rate", rate >= 0.5)
            } else {
                let rej = 1.0 - rate;
                let p2 = runs
                    .iter()
                    .flat_map(|(_, r)| &r.records)
                    .filter(|r| {
                        (r.expected - r.descriptor.r).abs() > r.descriptor.s + params.config.p3
                    })
                    .count() as f64
                    / n;
                diagnostics.push(format!("distinguishing_test_rate={p2:.6}"));
                (rej, "rejection_rate", rate >= 0.5)
            };
            Ok(ExperimentOutcome {
                kind,
                runs: runs.len(),
                accepted,
                metric,
                metric_name,
                accept,
                diagnostics,
                csv: protocol_csv(&params.instance_id, &runs),
            })
        }
        ExperimentKind::Reduction => {
            let check = check_reduction(&params.instance.lattice, params.beta)?;
            let mut csv = String::from("instance_id,index,lambda1,distance,beta,svp_truth,holds\n");
            for r in &check.rows {
                let _ = writeln!(
                    csv,
                    "{},{},{:.12e},{:.12e},{:.12e},{},{}",
                    params.instance_id,
                    r.index,
                    r.lambda1,
                    r.distance,
                    params.beta,
                    check.truth,
                    u8::from(check.holds)
                );
            }
            Ok(ExperimentOutcome {
                kind,
                runs: check.rows.len(),
                accepted: usize::from(check.holds),
                metric: f64::from(u8::from(check.holds)),
                metric_name: "claims_hold",
                accept: check.holds,
                diagnostics: vec![
                    format!("svp_truth={}", check.truth),
                    format!("lambda1={:.6}", check.lambda1),
                ],
                csv,
            })
        }
        ExperimentKind::PdAudit => {
            let w = match &params.anomaly {
                Some(w) => w.clone(),
                None => {
                    let mut c = vec![0i64; params.grid.n()];
                    c[0] = 4;
                    params.grid.from_signed(&c)
                }
            };
            let witness = match (&params.witness, params.pd_source) {
                (_, PdSource::GaussianTable) => None,
                (Some(w), PdSource::Witness) => Some(w.clone()),
                (None, PdSource::Witness) => {
                    Some(Arc::new(build_honest_witness(&params.grid, params.cutoff)?))
                }
            };
            let wf = witness.as_deref().map(WitnessFunction::new).transpose()?;
            let table = pd::gaussian_table(&params.grid);
            let base: &dyn pd::PdFunction = match &wf {
                Some(f) => f,
                None => &table,
            };
            let values = params
                .suppress
                .map(|v| vec![(w.clone(), v), (params.grid.neg(&w), v)])
                .unwrap_or_default();
            let f = pd::OverrideFunction::new(base, values);
            let view = PdFunctionView::new(&params.grid, &f)?;
            let mut rng = ChaCha8Rng::seed_from_u64(params.config.seed);
            let audit =
                pd::pd_property_audit(&view, 200, 6, params.trials, params.cutoff, &mut rng)?;
            let cert = pd::no_pd_certificate(&view, &w, &params.pd, &mut rng)?;
            let found = cert.violation_found(params.pd.det_tol);
            Ok(ExperimentOutcome {
                kind,
                runs: cert.triples.len(),
                accepted: cert.triples.len() - cert.flagged_triples,
                metric: audit.min_gram_eigenvalue,
                metric_name: "min_gram_eigenvalue",
                accept: audit.min_gram_eigenvalue >= pd::PSD_TOL && !found,
                diagnostics: vec![
                    format!("max_abs_h={:.6e}", audit.max_abs_h),
                    format!("max_asymmetry={:.6e}", audit.max_asymmetry),
                    format!("min_halving_slack={:.6e}", audit.min_halving_slack),
                    format!("cascade_bound={:.6}", cert.cascade_bound),
                    format!("gaussian_at_y={:.6}", cert.gaussian_at_y),
                    format!("chain_min_eigenvalue={:.6e}", cert.chain_min_eigenvalue),
                    format!("bad_fraction={:.6}", cert.bad_fraction),
                    format!("violation_found={found}"),
                ],
                csv: cert.to_csv(&params.grid)?,
            })
        }
    }
}
