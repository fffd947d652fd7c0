//! Requests, the task pipeline and the report it produces.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use holint_core::distribution::{build_one_form, integrability_residual, normalize, solve_pde_jet, CauchyData, DistributionSpec, JetSolveReport};
use holint_core::holonomy::{periodicity_test, OrbitVerdict};
use holint_core::holonomy::{holonomy_map, linear_holonomy_oracle, HolonomyError, LiftOptions, LoopSpec, Point, DEFAULT_Z0};
use holint_core::resolution::{scan_parameters, ResolutionError, ResolutionTree};
use holint_core::resonance::{
    check_star, enumerate_resonances, first_jet_test, meromorphic_invariant, monomial_first_integral, normal_shape, span_rank,
    verify_first_integral, ExponentPair, IntegerDirection, MeromorphicInvariant, StarReport,
};
use holint_core::series_core::MultiIndex3;
use holint_core::{GaussianRational, VectorFieldGerm};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::input::{parse_field, print_field, InputError};

pub const DEFAULT_MAX_PERIOD: u32 = 24;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 16;
pub const DEFAULT_MAX_BLOWUPS: usize = 32;
/// Default slice parameters are `1/q^j` for `j = 1..=DEFAULT_GRID_DEPTH`.
pub const DEFAULT_GRID_DEPTH: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Star,
    Resonances,
    FirstIntegral,
    MeromorphicInvariant,
    Distribution,
    Resolution,
    Holonomy,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Star,
        Task::Resonances,
        Task::FirstIntegral,
        Task::MeromorphicInvariant,
        Task::Distribution,
        Task::Resolution,
        Task::Holonomy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Star => "star",
            Task::Resonances => "resonances",
            Task::FirstIntegral => "first_integral",
            Task::MeromorphicInvariant => "meromorphic_invariant",
            Task::Distribution => "distribution",
            Task::Resolution => "resolution",
            Task::Holonomy => "holonomy",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Task::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| format!("unknown task `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisRequest {
    /// Germ description in the input grammar.
    pub source: String,
    /// Replaces the `order` statement of the source.
    pub order: Option<u32>,
    pub tasks: BTreeSet<Task>,
    /// Slice parameters; empty selects the default grid.
    pub z0: Vec<GaussianRational>,
    /// Degree bound for the resonance enumeration; defaults to the order.
    pub degree_bound: Option<u32>,
    pub tol: f64,
    pub max_period: u32,
    pub samples: usize,
    pub max_blowups: usize,
    pub seed: u64,
    /// Base the holonomy loop at the first slice parameter whose resolution
    /// is dicritical.
    pub prefer_dicritical_z0: bool,
}

impl AnalysisRequest {
    pub fn new(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            order: None,
            tasks: Task::ALL.into_iter().collect(),
            z0: Vec::new(),
            degree_bound: None,
            tol: DEFAULT_TOL,
            max_period: DEFAULT_MAX_PERIOD,
            samples: DEFAULT_SAMPLES,
            max_blowups: DEFAULT_MAX_BLOWUPS,
            seed: 0,
            prefer_dicritical_z0: false,
        }
    }

    pub fn with_tasks(mut self, tasks: impl IntoIterator<Item = Task>) -> Self {
        self.tasks = tasks.into_iter().collect();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RequestError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("invalid request: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok { result: T },
    Skipped { reason: String },
    Failed { error: String, budget_exceeded: bool },
}

impl<T> Outcome<T> {
    pub fn result(&self) -> Option<&T> {
        match self {
            Outcome::Ok { result } => Some(result),
            _ => None,
        }
    }

    fn skipped(reason: impl Into<String>) -> Self {
        Outcome::Skipped { reason: reason.into() }
    }

    fn failed(error: impl fmt::Display, budget_exceeded: bool) -> Self {
        Outcome::Failed { error: error.to_string(), budget_exceeded }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
    pub seed: u64,
    pub order: u32,
    pub tasks: Vec<Task>,
    pub z0: Vec<String>,
    pub degree_bound: u32,
    pub tol: f64,
    pub max_period: u32,
    pub samples: usize,
    pub max_blowups: usize,
    pub prefer_dicritical_z0: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceResult {
    pub degree_bound: u32,
    pub indices: Vec<MultiIndex3>,
    /// Rank of the span of `indices`.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstIntegralResult {
    pub direction: IntegerDirection,
    pub exponents: ExponentPair,
    pub components: [String; 2],
    /// `(i_X dF₁, i_X dF₂)` for the linear part of the field.
    pub linear_residuals: [String; 2],
    pub transversal: bool,
    /// The same residuals for the field itself, at its own order, when that
    /// order covers both components of `F`.
    pub field_residuals: Option<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantResult {
    pub invariant: MeromorphicInvariant,
    /// Quotient-rule residual against the linear part.
    pub linear_residual: String,
    pub field_residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionResult {
    /// Solved through this degree, in normal-shape coordinates.
    pub solve_order: u32,
    pub jet: JetSolveReport,
    /// `ω ∧ dω` vanishes through `solve_order` for the solved `p̄`.
    pub integrable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceResolution {
    pub z0: String,
    pub tree: Option<ResolutionTree>,
    pub dicritical: bool,
    pub error: Option<String>,
    pub budget_exceeded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSummary {
    pub angles: [String; 2],
    pub period: u64,
    /// Largest distance between a computed image and the rotation's image.
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyResult {
    pub z0: String,
    pub samples: usize,
    pub error_bound: f64,
    pub verdict: OrbitVerdict,
    pub linear_oracle: Option<OracleSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    /// The parsed field in canonical form.
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<Outcome<StarReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonances: Option<Outcome<ResonanceResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_integral: Option<Outcome<FirstIntegralResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meromorphic_invariant: Option<Outcome<InvariantResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Outcome<DistributionResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Outcome<Vec<SliceResolution>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<Outcome<HolonomyResult>>,
    /// Checks that must hold by construction but did not.
    pub invariant_violations: Vec<String>,
}

impl AnalysisReport {
    pub fn budget_exceeded(&self) -> bool {
        let failed = |o: Option<bool>| o.unwrap_or(false);
        let slices = self.resolution.as_ref().and_then(|o| o.result()).is_some_and(|v| v.iter().any(|s| s.budget_exceeded));
        slices
            || [
                self.star.as_ref().map(is_budget),
                self.resonances.as_ref().map(is_budget),
                self.first_integral.as_ref().map(is_budget),
                self.meromorphic_invariant.as_ref().map(is_budget),
                self.distribution.as_ref().map(is_budget),
                self.resolution.as_ref().map(is_budget),
                self.holonomy.as_ref().map(is_budget),
            ]
            .into_iter()
            .any(failed)
    }

    /// 0 on success, 3 when a task ran out of budget, 4 on an invariant
    /// violation.
    pub fn exit_code(&self) -> u8 {
        if !self.invariant_violations.is_empty() {
            4
        } else if self.budget_exceeded() {
            3
        } else {
            0
        }
    }
}

fn is_budget<T>(o: &Outcome<T>) -> bool {
    matches!(o, Outcome::Failed { budget_exceeded: true, .. })
}

const NECESSARY_CONDITION: &str =
    "necessary condition violated: the eigenvalues are not a complex multiple of (m, n, -k) with m, n, k positive integers (first-jet test)";

fn series_text<const N: usize>(s: &holint_core::TruncatedSeries<N>) -> String {
    s.to_string()
}

fn default_grid(dir: &IntegerDirection) -> Vec<GaussianRational> {
    let g = num_integer::gcd(dir.m, dir.n);
    let q = (dir.n / g).max(2);
    (1..=DEFAULT_GRID_DEPTH).map(|j| GaussianRational::from_ratio(1, q.pow(j))).collect()
}

fn star_task(x: &VectorFieldGerm) -> Outcome<StarReport> {
    match check_star(x.lambda()) {
        Ok(r) => Outcome::Ok { result: r },
        Err(e) => Outcome::failed(e, false),
    }
}

fn resonance_task(x: &VectorFieldGerm, bound: u32) -> Outcome<ResonanceResult> {
    let indices = enumerate_resonances(x.lambda(), bound);
    let rank = span_rank(&indices);
    Outcome::Ok { result: ResonanceResult { degree_bound: bound, indices, rank } }
}

fn first_integral_task(x: &VectorFieldGerm, dir: Option<&IntegerDirection>, violations: &mut Vec<String>) -> Outcome<FirstIntegralResult> {
    let Some(dir) = dir else {
        return Outcome::skipped(NECESSARY_CONDITION);
    };
    let pair = monomial_first_integral(dir);
    let order = pair.natural_order();
    let f = pair.as_series(order);
    let lin = VectorFieldGerm::linear(x.lambda().clone(), order).expect("nonzero eigenvalues");
    let check = verify_first_integral(&lin, &f);
    if !check.is_first_integral() {
        violations.push("first_integral: monomial pair is not a first integral of the linear part".into());
    }
    let field_residuals = (pair.n.degree().max(pair.m.degree()) <= x.order()).then(|| {
        let c = verify_first_integral(x, &pair.as_series(x.order()));
        c.residuals.map(|r| series_text(&r))
    });
    Outcome::Ok {
        result: FirstIntegralResult {
            direction: dir.clone(),
            components: f.clone().map(|s| series_text(&s)),
            exponents: pair,
            linear_residuals: check.residuals.map(|r| series_text(&r)),
            transversal: check.transversal,
            field_residuals,
        },
    }
}

fn invariant_task(x: &VectorFieldGerm, dir: Option<&IntegerDirection>, violations: &mut Vec<String>) -> Outcome<InvariantResult> {
    let Some(dir) = dir else {
        return Outcome::skipped(NECESSARY_CONDITION);
    };
    let pair = monomial_first_integral(dir);
    let inv = match meromorphic_invariant(&pair.n, &pair.m, dir) {
        Ok(inv) => inv,
        Err(e) => {
            violations.push(format!("meromorphic_invariant: {e}"));
            return Outcome::failed(e, false);
        }
    };
    let lin = VectorFieldGerm::linear(x.lambda().clone(), 2).expect("nonzero eigenvalues");
    let linear_residual = inv.quotient_rule_residual(&lin);
    if !linear_residual.is_zero() || !inv.adapted {
        violations.push("meromorphic_invariant: invariant of the linear part fails its checks".into());
    }
    let field_residual = inv.quotient_rule_residual(x);
    Outcome::Ok {
        result: InvariantResult { linear_residual: series_text(&linear_residual), field_residual: series_text(&field_residual), invariant: inv },
    }
}

fn distribution_task(shape: Option<&VectorFieldGerm>, violations: &mut Vec<String>) -> Outcome<DistributionResult> {
    let Some(y) = shape else {
        return Outcome::skipped("eigenvalues have no normal shape (m, n, -k)");
    };
    let y = normalize(y);
    let solve_order = y.order() - 1;
    let jet = match solve_pde_jet(&y, &CauchyData::zero(solve_order), solve_order) {
        Ok(j) => j,
        Err(e) => return Outcome::failed(e, false),
    };
    let integrable = jet.succeeded() && {
        let w = build_one_form(&y, &DistributionSpec::normalized(jet.p_bar.clone())).expect("normalized field");
        let ok = integrability_residual(&w).truncated(solve_order).is_zero();
        if !ok {
            violations.push("distribution: solved jet leaves an integrability residual".into());
        }
        ok
    };
    Outcome::Ok { result: DistributionResult { solve_order, jet, integrable } }
}

fn resolution_task(shape: Option<&VectorFieldGerm>, candidates: &[GaussianRational], max_blowups: usize) -> Outcome<Vec<SliceResolution>> {
    let Some(y) = shape else {
        return Outcome::skipped("eigenvalues have no normal shape (m, n, -k)");
    };
    let slices = scan_parameters(y, candidates, max_blowups)
        .into_iter()
        .map(|(z0, r)| {
            let z0 = z0.to_string();
            match r {
                Ok(tree) => SliceResolution { z0, dicritical: tree.has_dicritical(), tree: Some(tree), error: None, budget_exceeded: false },
                Err(ResolutionError::Budget { kind, blowups, partial }) => SliceResolution {
                    z0,
                    dicritical: partial.has_dicritical(),
                    error: Some(ResolutionError::Budget { kind, blowups, partial: partial.clone() }.to_string()),
                    tree: Some(*partial),
                    budget_exceeded: true,
                },
                Err(e) => SliceResolution { z0, tree: None, dicritical: false, error: Some(e.to_string()), budget_exceeded: false },
            }
        })
        .collect();
    Outcome::Ok { result: slices }
}

fn sample_points(seed: u64, count: usize, radius: f64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || Complex64::from_polar(radius * rng.gen_range(0.1..0.5), rng.gen_range(0.0..std::f64::consts::TAU));
    (0..count).map(|_| [point(), point()]).collect()
}

fn holonomy_task(
    x: &VectorFieldGerm,
    shape: Option<(&VectorFieldGerm, &IntegerDirection)>,
    z0: Option<&GaussianRational>,
    req: &AnalysisRequest,
) -> Outcome<HolonomyResult> {
    let field = shape.map_or(x, |(y, _)| y);
    let z0_text = z0.map_or_else(|| DEFAULT_Z0.to_string(), |z| z.to_string());
    let base = match LoopSpec::one_turn(z0.map_or(Complex64::new(DEFAULT_Z0, 0.0), |z| z.to_complex64())) {
        Ok(b) => b,
        Err(e) => return Outcome::failed(e, false),
    };
    let options = LiftOptions::default();
    let grid = sample_points(req.seed, req.samples, options.radius);
    let h = match holonomy_map(field, base, &grid, options) {
        Ok(h) => h,
        Err(e) => {
            let budget = matches!(e, HolonomyError::Precision { .. });
            return Outcome::failed(e, budget);
        }
    };
    let verdict = periodicity_test(&h, req.max_period, req.tol);
    let linear_oracle = shape.map(|(_, dir)| {
        let oracle = linear_holonomy_oracle(dir.m as u64, dir.n as u64, dir.k as u64);
        let max_deviation = h
            .samples
            .iter()
            .map(|s| {
                let e = oracle.apply(s.input);
                (s.output[0] - e[0]).norm().max((s.output[1] - e[1]).norm())
            })
            .fold(0.0, f64::max);
        OracleSummary { angles: oracle.angles.map(|a| a.to_string()), period: oracle.period, max_deviation }
    });
    Outcome::Ok { result: HolonomyResult { z0: z0_text, samples: h.samples.len(), error_bound: h.error_bound, verdict, linear_oracle } }
}

/// Parses the field and runs the requested tasks. Task failures are recorded
/// in the report; only an invalid request is an error.
pub fn run(req: &AnalysisRequest) -> Result<AnalysisReport, RequestError> {
    if req.tasks.is_empty() {
        return Err(RequestError::Invalid("no tasks requested".into()));
    }
    if req.samples == 0 || req.max_period == 0 || req.tol.is_nan() || req.tol <= 0.0 {
        return Err(RequestError::Invalid("samples, max period and tolerance must be positive".into()));
    }
    let x = parse_field(&req.source, req.order)?;
    let degree_bound = req.degree_bound.unwrap_or(x.order());
    let wants = |t: Task| req.tasks.contains(&t);

    let dir = first_jet_test(x.lambda());
    let shape = normal_shape(&x);
    let candidates = match (&shape, req.z0.is_empty()) {
        (_, false) => req.z0.clone(),
        (Some((_, d)), true) => default_grid(d),
        (None, true) => Vec::new(),
    };
    let shape_field = shape.as_ref().map(|(y, _)| y);

    let ((star, resonances, first_integral, invariant, mut violations), ((distribution, dist_violations), (resolution, holonomy))) = rayon::join(
        || {
            let mut v = Vec::new();
            let star = wants(Task::Star).then(|| star_task(&x));
            let res = wants(Task::Resonances).then(|| resonance_task(&x, degree_bound));
            let fi = wants(Task::FirstIntegral).then(|| first_integral_task(&x, dir.as_ref(), &mut v));
            let inv = wants(Task::MeromorphicInvariant).then(|| invariant_task(&x, dir.as_ref(), &mut v));
            (star, res, fi, inv, v)
        },
        || {
            rayon::join(
                || {
                    let mut v = Vec::new();
                    (wants(Task::Distribution).then(|| distribution_task(shape_field, &mut v)), v)
                },
                || {
                    let resolution = (wants(Task::Resolution) || (wants(Task::Holonomy) && req.prefer_dicritical_z0))
                        .then(|| resolution_task(shape_field, &candidates, req.max_blowups));
                    let base = if req.prefer_dicritical_z0 {
                        let dicritical = resolution.as_ref().and_then(|o| o.result()).and_then(|v| v.iter().position(|s| s.dicritical));
                        dicritical.map(|i| &candidates[i]).or(req.z0.first())
                    } else {
                        req.z0.first()
                    };
                    let holonomy = wants(Task::Holonomy).then(|| holonomy_task(&x, shape.as_ref().map(|(y, d)| (y, d)), base, req));
                    (resolution.filter(|_| wants(Task::Resolution)), holonomy)
                },
            )
        },
    );
    violations.extend(dist_violations);

    let provenance = Provenance {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        input_sha256: hex::encode(Sha256::digest(req.source.as_bytes())),
        seed: req.seed,
        order: x.order(),
        tasks: req.tasks.iter().copied().collect(),
        z0: candidates.iter().map(|z| z.to_string()).collect(),
        degree_bound,
        tol: req.tol,
        max_period: req.max_period,
        samples: req.samples,
        max_blowups: req.max_blowups,
        prefer_dicritical_z0: req.prefer_dicritical_z0,
    };
    Ok(AnalysisReport {
        provenance,
        field: print_field(&x),
        star,
        resonances,
        first_integral,
        meromorphic_invariant: invariant,
        distribution,
        resolution,
        holonomy,
        invariant_violations: violations,
    })
}
