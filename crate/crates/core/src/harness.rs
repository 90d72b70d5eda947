//! Named, seeded, parallel check suites over the whole library.
//!
//! A [`RunConfig`] picks a [`Suite`], a parameter grid (truncation ranks or
//! mode cutoffs), a circle circumference, a seed, and a tolerance;
//! [`run`] executes every check of the suite on a local thread pool and
//! returns a [`SuiteReport`] of uniform [`CheckRecord`]s — one named,
//! machine-readable pass/fail row per check. Sweep suites additionally
//! return the underlying residual-decay data as [`SweepData`].
//!
//! Reproducibility rules:
//!
//! - every check draws randomness from its own stream, seeded by the run
//!   seed mixed with a hash of the check's label, so reports are identical
//!   across runs and thread counts (timings aside);
//! - checks run under `catch_unwind`: a panicking check becomes a failed
//!   record (with `panicked: true` and an infinite value, which serializes
//!   to JSON `null`) instead of tearing down the run;
//! - the pool honors the `STARHILB_THREADS` environment variable when set
//!   (a positive integer), otherwise uses one thread per core.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    operator_norm, sweep_residual, truncate_standard, vector_equiv, StandardMapGenerator,
    SweepReport, Verdict,
};
use crate::category::{
    braiding, compose, tensor, tensor_obj, varsigma, varsigma_inv, Morphism, TruncObject,
};
use crate::circle::{theta, theta_inv, CircleSpace, ModInt};
use crate::error::{Error, Result};
use crate::frobenius::{check_axioms, chosen_basis, hs_inner, quasi_speciality, trace};
use crate::random;

type Obj = TruncObject<f64>;
type Morph = Morphism<f64>;

/// The available check suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Category, dagger, tensor, and braiding laws on random morphisms at
    /// each truncation rank.
    Core,
    /// Classical-structure axiom residuals of the chosen basis at each rank.
    Frobenius,
    /// The circle model: both classical structures, projectors,
    /// translations, Dirac pairings, complementarity, and mixing at each
    /// mode cutoff.
    Circle,
    /// Residual sweep: composition of truncations of two fixed
    /// infinite-rank maps against the truncation of their composite.
    SweepWeakFunctor,
    /// Residual sweep: Dirac pairing of a Poisson kernel against its
    /// closed-form limit as the cutoff grows.
    SweepDirac,
    /// The three verify suites back to back, each at its default
    /// parameters.
    All,
}

impl Suite {
    /// The stable lowercase name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Frobenius => "frobenius",
            Suite::Circle => "circle",
            Suite::SweepWeakFunctor => "sweep-weakfunctor",
            Suite::SweepDirac => "sweep-dirac",
            Suite::All => "all",
        }
    }

    /// Whether the suite is a residual sweep (produces [`SweepData`]).
    pub fn is_sweep(self) -> bool {
        matches!(self, Suite::SweepWeakFunctor | Suite::SweepDirac)
    }

    /// Which axis the suite's parameter grid runs along.
    pub fn param_kind(self) -> ParamKind {
        match self {
            Suite::Core | Suite::Frobenius | Suite::SweepWeakFunctor => ParamKind::Ranks,
            Suite::Circle | Suite::SweepDirac => ParamKind::Cutoffs,
            Suite::All => ParamKind::PerSuite,
        }
    }

    /// The parameter grid used when the configuration does not supply one.
    /// Core, frobenius, and the weak-functor sweep are parameterized by
    /// truncation rank; circle and the Dirac sweep by mode cutoff.
    pub fn default_params(self) -> Vec<u64> {
        match self {
            Suite::Core => vec![8, 16, 32, 64],
            Suite::Frobenius => vec![8, 32],
            Suite::Circle => vec![4, 8, 16, 32],
            Suite::SweepWeakFunctor => vec![8, 16, 32, 64],
            Suite::SweepDirac => vec![4, 8, 16, 32],
            Suite::All => Vec::new(),
        }
    }

    fn max_param(self) -> u64 {
        match self {
            // Ranks above these build matrices too large to be useful
            // interactively; reject early instead of thrashing memory.
            Suite::Core => 1024,
            Suite::Frobenius => 256,
            Suite::Circle | Suite::SweepDirac => 128,
            Suite::SweepWeakFunctor => 2048,
            Suite::All => 0,
        }
    }
}

/// The axis a suite's parameter grid runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Truncation ranks (`kappa`).
    Ranks,
    /// Mode cutoffs (`omega`; the rank is `2*omega + 1`).
    Cutoffs,
    /// No external grid: each sub-suite uses its own default.
    PerSuite,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Suite::Core),
            "frobenius" => Ok(Suite::Frobenius),
            "circle" => Ok(Suite::Circle),
            "sweep-weakfunctor" => Ok(Suite::SweepWeakFunctor),
            "sweep-dirac" => Ok(Suite::SweepDirac),
            "all" => Ok(Suite::All),
            other => Err(Error::ConfigInvalid(format!(
                "unknown suite {other:?}; expected one of core, frobenius, circle, \
                 sweep-weakfunctor, sweep-dirac, all"
            ))),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a run needs. `params` is interpreted per suite (ranks or mode
/// cutoffs); `None` means the suite default. `out` is carried for report
/// writers; [`run`] itself never touches the filesystem.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suite: Suite,
    pub params: Option<Vec<u64>>,
    pub length: f64,
    pub seed: u64,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults: suite parameters, unit circumference, seed 42, tolerance
    /// `1e-12`.
    pub fn new(suite: Suite) -> Self {
        RunConfig {
            suite,
            params: None,
            length: 1.0,
            seed: 42,
            tolerance: 1e-12,
            out: None,
        }
    }
}

/// One named check: a measured value, the bound it was held against, the
/// comparison direction, and the outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    /// Stable slash-separated check name.
    pub name: String,
    /// The suite parameter (rank or cutoff) this instance ran at, when the
    /// check is per-parameter.
    pub parameter: Option<u64>,
    /// The measured value. Infinite when the check panicked (JSON `null`).
    pub value: f64,
    /// The bound the value is compared against.
    pub bound: f64,
    /// One of `"<="`, `"<"`, `">="`.
    pub cmp: &'static str,
    /// Whether `value cmp bound` held.
    pub pass: bool,
    /// Whether the check body panicked (always a failure).
    pub panicked: bool,
    /// Wall-clock duration of this check.
    pub millis: u64,
}

/// A full run: configuration echo, per-check records sorted by
/// `(name, parameter)`, and the aggregate verdict (`"pass"` iff every
/// record passed).
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: Vec<u64>,
    pub length: f64,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: usize,
    pub failed: usize,
    pub verdict: String,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    /// Pretty JSON rendering of the whole report.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// The residual-decay data behind a sweep suite, for CSV/sidecar writers.
#[derive(Debug, Clone, Serialize)]
pub struct SweepData {
    /// The name CSV rows are tagged with.
    pub check_name: String,
    pub report: SweepReport<f64>,
}

/// What [`run`] produces: the report, plus sweep data for sweep suites.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: SuiteReport,
    pub sweep: Option<SweepData>,
}

impl RunOutput {
    /// `Ok` iff every check passed; otherwise [`Error::CheckFailed`] with
    /// the counts.
    pub fn as_result(&self) -> Result<()> {
        if self.report.failed > 0 {
            Err(Error::CheckFailed {
                failed: self.report.failed,
                total: self.report.checks.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// 64-bit FNV-1a. Hand-rolled so check seeding never shifts under
/// dependency upgrades; the constants are the standard offset basis and
/// prime.
fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

type CheckFn = Box<dyn Fn(&mut ChaCha12Rng) -> (f64, f64, &'static str) + Send + Sync>;

struct CheckSpec {
    name: String,
    parameter: Option<u64>,
    run: CheckFn,
}

fn spec(
    name: impl Into<String>,
    parameter: Option<u64>,
    run: impl Fn(&mut ChaCha12Rng) -> (f64, f64, &'static str) + Send + Sync + 'static,
) -> CheckSpec {
    CheckSpec {
        name: name.into(),
        parameter,
        run: Box::new(run),
    }
}

fn execute(spec: &CheckSpec, seed: u64) -> CheckRecord {
    let label = match spec.parameter {
        Some(p) => format!("{}@{}", spec.name, p),
        None => spec.name.clone(),
    };
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ fnv1a64(&label));
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| (spec.run)(&mut rng)));
    let millis = start.elapsed().as_millis() as u64;
    match outcome {
        Ok((value, bound, cmp)) => {
            let pass = match cmp {
                "<=" => value <= bound,
                "<" => value < bound,
                ">=" => value >= bound,
                other => unreachable!("unknown comparator {other:?}"),
            };
            CheckRecord {
                name: spec.name.clone(),
                parameter: spec.parameter,
                value,
                bound,
                cmp,
                pass,
                panicked: false,
                millis,
            }
        }
        Err(_) => CheckRecord {
            name: spec.name.clone(),
            parameter: spec.parameter,
            value: f64::INFINITY,
            bound: 0.0,
            cmp: "<=",
            pass: false,
            panicked: true,
            millis,
        },
    }
}

fn record(name: &str, value: f64, bound: f64, cmp: &'static str, millis: u64) -> CheckRecord {
    let pass = match cmp {
        "<=" => value <= bound,
        "<" => value < bound,
        ">=" => value >= bound,
        other => unreachable!("unknown comparator {other:?}"),
    };
    CheckRecord {
        name: name.into(),
        parameter: None,
        value,
        bound,
        cmp,
        pass,
        panicked: false,
        millis,
    }
}

/// Random instances drawn per structural check.
const CORE_INSTANCES: usize = 25;

fn std_obj(dim: usize) -> Obj {
    TruncObject::standard(dim, "h").expect("positive dimension")
}

fn core_specs(kappa: u64, tol: f64) -> Vec<CheckSpec> {
    let k = kappa as usize;
    let mut out = Vec::new();

    out.push(spec("category/associativity", Some(kappa), move |rng| {
        let mut worst = 0.0f64;
        for _ in 0..CORE_INSTANCES {
            let dims: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=k)).collect();
            let objs: Vec<Obj> = dims.iter().map(|&d| std_obj(d)).collect();
            let f = random::morphism(&objs[0], &objs[1], rng);
            let g = random::morphism(&objs[1], &objs[2], rng);
            let h = random::morphism(&objs[2], &objs[3], rng);
            let lhs = compose(&compose(&h, &g).unwrap(), &f).unwrap();
            let rhs = compose(&h, &compose(&g, &f).unwrap()).unwrap();
            worst = worst.max(operator_norm(&lhs.sub(&rhs).unwrap()));
        }
        (worst, tol, "<=")
    }));

    out.push(spec("category/unit_laws", Some(kappa), move |rng| {
        let mut worst = 0.0f64;
        for _ in 0..CORE_INSTANCES {
            let a = std_obj(rng.gen_range(1..=k));
            let b = std_obj(rng.gen_range(1..=k));
            let f = random::morphism(&a, &b, rng);
            let left = compose(&Morph::identity(&b), &f).unwrap();
            let right = compose(&f, &Morph::identity(&a)).unwrap();
            worst = worst.max(left.sub(&f).unwrap().frobenius_norm());
            worst = worst.max(right.sub(&f).unwrap().frobenius_norm());
        }
        (worst, 0.0, "<=")
    }));

    out.push(spec("category/interchange", Some(kappa), move |rng| {
        let cap = k.min(6);
        let mut worst = 0.0f64;
        for _ in 0..CORE_INSTANCES {
            let dims: Vec<usize> = (0..6).map(|_| rng.gen_range(1..=cap)).collect();
            let objs: Vec<Obj> = dims.iter().map(|&d| std_obj(d)).collect();
            let f = random::morphism(&objs[0], &objs[1], rng);
            let g = random::morphism(&objs[1], &objs[2], rng);
            let h = random::morphism(&objs[3], &objs[4], rng);
            let k2 = random::morphism(&objs[4], &objs[5], rng);
            let lhs = compose(&tensor(&g, &k2), &tensor(&f, &h)).unwrap();
            let rhs = tensor(&compose(&g, &f).unwrap(), &compose(&k2, &h).unwrap());
            worst = worst.max(operator_norm(&lhs.sub(&rhs).unwrap()));
        }
        (worst, tol, "<=")
    }));

    out.push(spec("category/dagger_involution", Some(kappa), move |rng| {
        let mut worst = 0.0f64;
        for _ in 0..CORE_INSTANCES {
            let a = std_obj(rng.gen_range(1..=k));
            let b = std_obj(rng.gen_range(1..=k));
            let f = random::morphism(&a, &b, rng);
            worst = worst.max(f.dagger().dagger().sub(&f).unwrap().frobenius_norm());
        }
        (worst, 0.0, "<=")
    }));

    out.push(spec(
        "category/dagger_antihomomorphism",
        Some(kappa),
        move |rng| {
            let mut worst = 0.0f64;
            for _ in 0..CORE_INSTANCES {
                let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=k)).collect();
                let objs: Vec<Obj> = dims.iter().map(|&d| std_obj(d)).collect();
                let f = random::morphism(&objs[0], &objs[1], rng);
                let g = random::morphism(&objs[1], &objs[2], rng);
                let lhs = compose(&g, &f).unwrap().dagger();
                let rhs = compose(&f.dagger(), &g.dagger()).unwrap();
                worst = worst.max(operator_norm(&lhs.sub(&rhs).unwrap()));
            }
            (worst, tol, "<=")
        },
    ));

    out.push(spec("category/braiding_involution", Some(kappa), move |_| {
        let a = std_obj(k.min(8));
        let b = std_obj(3);
        let there = braiding(&a, &b);
        let back = braiding(&b, &a);
        let round = compose(&back, &there).unwrap();
        let id = Morph::identity(&tensor_obj(&a, &b));
        (round.sub(&id).unwrap().frobenius_norm(), 0.0, "<=")
    }));

    out.push(spec("category/braiding_naturality", Some(kappa), move |rng| {
        let cap = k.min(6);
        let mut worst = 0.0f64;
        for _ in 0..CORE_INSTANCES {
            let dims: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=cap)).collect();
            let (a, b, c, d) = (
                std_obj(dims[0]),
                std_obj(dims[1]),
                std_obj(dims[2]),
                std_obj(dims[3]),
            );
            let f = random::morphism(&a, &c, rng);
            let g = random::morphism(&b, &d, rng);
            let lhs = compose(&braiding(&c, &d), &tensor(&f, &g)).unwrap();
            let rhs = compose(&tensor(&g, &f), &braiding(&a, &b)).unwrap();
            worst = worst.max(operator_norm(&lhs.sub(&rhs).unwrap()));
        }
        (worst, tol, "<=")
    }));

    out.push(spec("category/varsigma_roundtrip", Some(kappa), move |_| {
        let cap = k.min(30);
        let mut failures = 0u64;
        for n_dim in 1..=cap {
            for m_dim in 1..=cap {
                for ni in 1..=n_dim {
                    for mi in 1..=m_dim {
                        let round = varsigma(ni, mi, m_dim)
                            .and_then(|nu| varsigma_inv(nu, m_dim).map(|p| (nu, p)));
                        match round {
                            Ok((nu, p)) if p.n == ni && p.m == mi && nu <= n_dim * m_dim => {}
                            _ => failures += 1,
                        }
                    }
                }
            }
        }
        (failures as f64, 0.0, "<=")
    }));

    out.push(spec("category/tensor_identity", Some(kappa), move |rng| {
        let mut failures = 0u64;
        for _ in 0..CORE_INSTANCES {
            let a = std_obj(rng.gen_range(1..=k));
            let b = std_obj(rng.gen_range(1..=k));
            let unit = Obj::unit();
            if tensor_obj(&a, &unit) != a || tensor_obj(&unit, &a) != a {
                failures += 1;
            }
            let f = random::morphism(&a, &b, rng);
            let padded = tensor(&f, &Morph::identity(&unit));
            if padded.dom() != &a
                || padded.cod() != &b
                || padded.sub(&f).unwrap().frobenius_norm() != 0.0
            {
                failures += 1;
            }
        }
        (failures as f64, 0.0, "<=")
    }));

    out
}

const AXIOM_NAMES: [&str; 7] = [
    "associativity",
    "commutativity",
    "unit_left",
    "unit_right",
    "frobenius_left",
    "frobenius_right",
    "speciality",
];

fn axiom_value(residuals: &crate::frobenius::AxiomResiduals<f64>, axis: &str) -> f64 {
    residuals
        .entries()
        .iter()
        .find(|(n, _)| *n == axis)
        .expect("axiom name is one of the seven")
        .1
}

fn frobenius_specs(kappa: u64, tol: f64) -> Vec<CheckSpec> {
    let obj = std_obj(kappa as usize);
    AXIOM_NAMES
        .iter()
        .map(|&axis| {
            let obj = obj.clone();
            spec(format!("frobenius/{axis}"), Some(kappa), move |_| {
                let r = check_axioms(&chosen_basis(&obj));
                (axiom_value(&r, axis), tol, "<=")
            })
        })
        .collect()
}

fn circle_specs(omega: u64, length: f64, tol: f64) -> Result<Vec<CheckSpec>> {
    let space = Arc::new(CircleSpace::<f64>::new(length, omega as usize)?);
    let white = Arc::new(space.momentum_structure());
    let black = Arc::new(space.group_algebra());
    let kappa = space.kappa();
    let w = omega as i64;
    let mut out = Vec::new();

    for &axis in AXIOM_NAMES.iter() {
        let white = Arc::clone(&white);
        out.push(spec(format!("circle/momentum/{axis}"), Some(omega), move |_| {
            (axiom_value(&check_axioms(&white), axis), tol, "<=")
        }));
    }

    for &axis in AXIOM_NAMES.iter().filter(|&&a| a != "speciality") {
        let black = Arc::clone(&black);
        out.push(spec(format!("circle/group/{axis}"), Some(omega), move |_| {
            (axiom_value(&check_axioms(&black), axis), tol, "<=")
        }));
    }

    {
        let black = Arc::clone(&black);
        out.push(spec(
            "circle/group/quasi_speciality_factor",
            Some(omega),
            move |_| {
                let (factor, _) = quasi_speciality(&black);
                let expected = kappa as f64;
                (
                    (factor - Complex64::new(expected, 0.0)).norm() / expected,
                    tol,
                    "<=",
                )
            },
        ));
    }
    {
        let black = Arc::clone(&black);
        out.push(spec(
            "circle/group/quasi_speciality_residual",
            Some(omega),
            move |_| {
                let (_, residual) = quasi_speciality(&black);
                (residual, tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        let black = Arc::clone(&black);
        out.push(spec("circle/group/delta_copy", Some(omega), move |_| {
            let sqrt_l = Complex64::new(space.length().sqrt(), 0.0);
            let mut worst = 0.0f64;
            for j in 0..space.kappa() {
                let d = space.grid_delta(j).unwrap().scaled(sqrt_l);
                let copied = compose(black.comult(), &d).unwrap();
                let pair = tensor(&d, &d);
                worst = worst.max(copied.sub(&pair).unwrap().frobenius_norm());
            }
            (worst, tol, "<=")
        }));
    }

    {
        let space = Arc::clone(&space);
        let white = Arc::clone(&white);
        out.push(spec(
            "circle/translation/delta_closure",
            Some(omega),
            move |rng| {
                let sqrt_l = Complex64::new(space.length().sqrt(), 0.0);
                let mut worst = 0.0f64;
                for _ in 0..20 {
                    let x = rng.gen_range(0.0..space.length());
                    let y = rng.gen_range(0.0..space.length());
                    let sx = space.position_eigenstate(x).scaled(sqrt_l);
                    let sy = space.position_eigenstate(y).scaled(sqrt_l);
                    let prod = compose(white.mult(), &tensor(&sx, &sy)).unwrap();
                    let target = space.position_eigenstate(x + y).scaled(sqrt_l);
                    worst = worst.max(vector_equiv(&prod, &target).unwrap());
                }
                (worst, tol.max(1e-10), "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/translation/unitarity", Some(omega), move |rng| {
            let id = Morph::identity(space.object());
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let x = rng.gen_range(0.0..space.length());
                let t = space.translation_by(x);
                let round = compose(&t.dagger(), &t).unwrap();
                worst = worst.max(operator_norm(&round.sub(&id).unwrap()));
            }
            (worst, tol, "<=")
        }));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec(
            "circle/momentum_projector/route_agreement",
            Some(omega),
            move |_| {
                let mut worst = 0.0f64;
                for n in -w..=w {
                    let direct = space.momentum_projector(n).unwrap();
                    let diagram = space.momentum_projector_via_comult(n).unwrap();
                    worst = worst.max(operator_norm(&direct.sub(&diagram).unwrap()));
                }
                (worst, tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec(
            "circle/momentum_projector/laws",
            Some(omega),
            move |_| {
                let mut worst = 0.0f64;
                for n in -w..=w {
                    let p = space.momentum_projector(n).unwrap();
                    let idem = compose(&p, &p).unwrap().sub(&p).unwrap();
                    let herm = p.dagger().sub(&p).unwrap();
                    worst = worst.max(operator_norm(&idem)).max(operator_norm(&herm));
                }
                (worst, tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec(
            "circle/momentum_projector/completeness",
            Some(omega),
            move |_| {
                let mut sum = Morph::zero(space.object(), space.object());
                for n in -w..=w {
                    sum = sum.add(&space.momentum_projector(n).unwrap()).unwrap();
                }
                let id = Morph::identity(space.object());
                (operator_norm(&sum.sub(&id).unwrap()), tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec(
            "circle/position_projector/route_agreement",
            Some(omega),
            move |_| {
                let mut worst = 0.0f64;
                for j in 0..space.kappa() {
                    let direct = space.grid_position_projector(j).unwrap();
                    let diagram = space.grid_position_projector_via_comult(j).unwrap();
                    worst = worst.max(operator_norm(&direct.sub(&diagram).unwrap()));
                }
                (worst, tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec(
            "circle/position_projector/laws",
            Some(omega),
            move |_| {
                let mut worst = 0.0f64;
                for j in 0..space.kappa() {
                    let q = space.grid_position_projector(j).unwrap();
                    let idem = compose(&q, &q).unwrap().sub(&q).unwrap();
                    let herm = q.dagger().sub(&q).unwrap();
                    worst = worst.max(operator_norm(&idem)).max(operator_norm(&herm));
                }
                (worst, tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec(
            "circle/position_projector/completeness",
            Some(omega),
            move |_| {
                let mut sum = Morph::zero(space.object(), space.object());
                for j in 0..space.kappa() {
                    sum = sum.add(&space.grid_position_projector(j).unwrap()).unwrap();
                }
                let id = Morph::identity(space.object());
                (operator_norm(&sum.sub(&id).unwrap()), tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec(
            "circle/position_projector/trace",
            Some(omega),
            move |_| {
                let mut worst = 0.0f64;
                for j in 0..space.kappa() {
                    let q = space.grid_position_projector(j).unwrap();
                    let tr = trace(&q).unwrap();
                    worst = worst.max((tr - Complex64::new(1.0, 0.0)).norm());
                }
                (worst, tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/delta/unbias", Some(omega), move |_| {
            let k = space.kappa() as f64;
            let mut worst = 0.0f64;
            for j in 0..space.kappa() {
                let d = space.normalized_grid_delta(j).unwrap();
                for n in -w..=w {
                    let e = space.momentum_eigenstate(n).unwrap();
                    let overlap = hs_inner(&d, &e).unwrap().norm_sqr();
                    worst = worst.max((overlap - 1.0 / k).abs());
                }
            }
            (worst, tol, "<=")
        }));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/delta/grid_orthonormal", Some(omega), move |_| {
            let mut worst = 0.0f64;
            for i in 0..space.kappa() {
                let di = space.normalized_grid_delta(i).unwrap();
                for j in 0..space.kappa() {
                    let dj = space.normalized_grid_delta(j).unwrap();
                    let inner = hs_inner(&di, &dj).unwrap();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((inner - Complex64::new(expect, 0.0)).norm());
                }
            }
            (worst, tol, "<=")
        }));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/delta/pairing_trig", Some(omega), move |rng| {
            let k = space.kappa();
            let coeffs: Vec<Complex64> = (0..k)
                .map(|_| random::complex_normal::<f64, _>(rng).scale(1.0 / k as f64))
                .collect();
            let coeff = |n: i64| coeffs[(n + w) as usize];
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let x0 = rng.gen_range(0.0..space.length());
                let mut direct = Complex64::new(0.0, 0.0);
                for n in -w..=w {
                    let angle = -2.0 * std::f64::consts::PI * (n as f64) * x0 / space.length();
                    direct += coeff(n) * Complex64::from_polar(1.0, angle);
                }
                let paired = space.delta_pairing(x0, coeff);
                worst = worst.max((paired - direct).norm());
            }
            (worst, tol, "<=")
        }));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/delta/pairing_poisson", Some(omega), move |_| {
            let r = 0.5f64;
            let x0 = 0.3 * space.length();
            let pairing = space.delta_pairing(x0, |n| {
                Complex64::new(r.powi(n.unsigned_abs() as i32), 0.0)
            });
            let t = 2.0 * std::f64::consts::PI * 0.3;
            let closed = (1.0 - r * r) / (1.0 - 2.0 * r * t.cos() + r * r);
            let tail_bound = 4.0 * r.powi(w as i32 + 1) / (1.0 - r);
            (
                (pairing - Complex64::new(closed, 0.0)).norm(),
                tail_bound + tol,
                "<=",
            )
        }));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/integrate/constant", Some(omega), move |_| {
            let one = |n: i64| {
                if n == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            };
            let integral = space.integrate(one);
            (
                (integral - Complex64::new(space.length(), 0.0)).norm(),
                tol * space.length().max(1.0),
                "<=",
            )
        }));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/integrate/plane_wave", Some(omega), move |_| {
            let mut worst = 0.0f64;
            for m in 1..=w {
                for sign in [1i64, -1] {
                    let mode = sign * m;
                    let i = space.integrate(|n| {
                        if n == mode {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    });
                    worst = worst.max(i.norm());
                }
            }
            (worst, tol, "<=")
        }));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/integrate/riemann", Some(omega), move |rng| {
            let k = space.kappa();
            let coeffs: Vec<Complex64> = (0..k)
                .map(|_| random::complex_normal::<f64, _>(rng).scale(1.0 / k as f64))
                .collect();
            let coeff = |n: i64| coeffs[(n + w) as usize];
            let samples = 8 * k;
            let mut quad = Complex64::new(0.0, 0.0);
            for i in 0..samples {
                let x = space.length() * (i as f64) / (samples as f64);
                let mut fx = Complex64::new(0.0, 0.0);
                for n in -w..=w {
                    let angle = -2.0 * std::f64::consts::PI * (n as f64) * x / space.length();
                    fx += coeff(n) * Complex64::from_polar(1.0, angle);
                }
                quad += fx;
            }
            quad *= Complex64::new(space.length() / samples as f64, 0.0);
            let integral = space.integrate(coeff);
            ((integral - quad).norm(), tol.max(1e-9), "<=")
        }));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec(
            "circle/momentum_translation/exact",
            Some(omega),
            move |rng| {
                let mut worst = 0.0f64;
                if space.kappa() <= 35 {
                    for n in -w..=w {
                        for m in -w..=w {
                            worst = worst.max(space.momentum_translation(n, m).unwrap());
                        }
                    }
                } else {
                    for _ in 0..300 {
                        let n = rng.gen_range(-w..=w);
                        let m = rng.gen_range(-w..=w);
                        worst = worst.max(space.momentum_translation(n, m).unwrap());
                    }
                }
                (worst, 0.0, "<=")
            },
        ));
    }

    for (idx, law) in [
        "comult_over_mult",
        "unit_compatibility",
        "counit_compatibility",
        "weyl_ccr",
    ]
    .into_iter()
    .enumerate()
    {
        let space = Arc::clone(&space);
        out.push(spec(
            format!("circle/complementarity/{law}"),
            Some(omega),
            move |_| {
                let r = space.check_strong_complementarity();
                (r.entries()[idx].1, tol, "<=")
            },
        ));
    }

    {
        let space = Arc::clone(&space);
        out.push(spec("circle/mixing/uniform", Some(omega), move |rng| {
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let psi = random::unit_state(space.object(), rng);
                let (_, residual) = space.mixing_experiment(&psi).unwrap();
                worst = worst.max(residual);
            }
            (worst, tol, "<=")
        }));
    }

    out.push(spec("circle/mod/theta_roundtrip", Some(omega), move |_| {
        let mut failures = 0u64;
        for n in -3 * w..=3 * w {
            if theta_inv(theta(n)).unwrap() != n {
                failures += 1;
            }
        }
        for l in 1..=(6 * w + 1) as usize {
            if theta(theta_inv(l).unwrap()) != l {
                failures += 1;
            }
        }
        (failures as f64, 0.0, "<=")
    }));

    {
        let omega_usize = omega as usize;
        out.push(spec("circle/mod/oplus_laws", Some(omega), move |rng| {
            let modulus = 2 * w + 1;
            let zero = ModInt::new(0, omega_usize);
            let mut failures = 0u64;
            for _ in 0..200 {
                let (a, b, c) = (
                    ModInt::new(rng.gen_range(-5 * modulus..=5 * modulus), omega_usize),
                    ModInt::new(rng.gen_range(-5 * modulus..=5 * modulus), omega_usize),
                    ModInt::new(rng.gen_range(-5 * modulus..=5 * modulus), omega_usize),
                );
                if a.oplus(b).oplus(c) != a.oplus(b.oplus(c)) {
                    failures += 1;
                }
                if a.oplus(b) != b.oplus(a) {
                    failures += 1;
                }
                if a.oplus(zero) != a {
                    failures += 1;
                }
                if a.oplus(a.inverse()) != zero {
                    failures += 1;
                }
                if a.value().unsigned_abs() > w as u64 {
                    failures += 1;
                }
            }
            (failures as f64, 0.0, "<=")
        }));
    }

    Ok(out)
}

/// The two fixed rapidly decaying infinite-rank maps whose truncated
/// composition is compared against the truncation of the exact composite:
/// entries `2^(-m-n)`, with exact composite entries `2^(-l-n) / 3`.
fn weakfunctor_output(params: &[u64]) -> Result<(Vec<CheckRecord>, SweepData)> {
    let start = Instant::now();
    let residual = |kappa: u64| -> f64 {
        let obj = std_obj(kappa as usize);
        let gen = StandardMapGenerator::new(|m, n| {
            Complex64::new(2.0f64.powi(-((m + n) as i32)), 0.0)
        });
        let f = truncate_standard(&gen, &obj, &obj);
        let truncated_composite = compose(&f, &f).expect("endomorphism composes");
        let exact_composite = Morphism::from_fn(obj.clone(), obj.clone(), |l, n| {
            Complex64::new(2.0f64.powi(-((l + n) as i32)) / 3.0, 0.0)
        });
        operator_norm(&truncated_composite.sub(&exact_composite).expect("same hom-set"))
    };
    let report = sweep_residual(residual, params)?;
    let millis = start.elapsed().as_millis() as u64;
    let name = "weakfunctor/hs_truncation";
    let infinitesimal = if report.verdict == Verdict::Infinitesimal {
        1.0
    } else {
        0.0
    };
    let final_residual = *report.residuals.last().expect("grid is non-empty");
    let records = vec![
        record(&format!("{name}/verdict"), infinitesimal, 1.0, ">=", millis),
        record(&format!("{name}/fitted_rate"), report.fitted_rate, -0.5, "<", 0),
        record(&format!("{name}/final_residual"), final_residual, 1e-6, "<", 0),
    ];
    Ok((
        records,
        SweepData {
            check_name: name.into(),
            report,
        },
    ))
}

/// Dirac pairing of the Poisson kernel (`coeff(n) = r^|n|`, `r = 1/2`)
/// at `x0 = 0.3 L` against the closed form of the full series.
fn dirac_output(params: &[u64], length: f64) -> Result<(Vec<CheckRecord>, SweepData)> {
    let start = Instant::now();
    let r = 0.5f64;
    let t = 2.0 * std::f64::consts::PI * 0.3;
    let closed = (1.0 - r * r) / (1.0 - 2.0 * r * t.cos() + r * r);
    let residual = |omega: u64| -> f64 {
        let space = CircleSpace::<f64>::new(length, omega as usize)
            .expect("validated parameters");
        let x0 = 0.3 * length;
        let pairing =
            space.delta_pairing(x0, |n| Complex64::new(r.powi(n.unsigned_abs() as i32), 0.0));
        (pairing - Complex64::new(closed, 0.0)).norm()
    };
    let report = sweep_residual(residual, params)?;
    let millis = start.elapsed().as_millis() as u64;
    let name = "dirac/poisson_pairing";
    let infinitesimal = if report.verdict == Verdict::Infinitesimal {
        1.0
    } else {
        0.0
    };
    let mut max_ratio = 0.0f64;
    for pair in report.residuals.windows(2) {
        let ratio = if pair[0] > 0.0 {
            pair[1] / pair[0]
        } else if pair[1] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_ratio = max_ratio.max(ratio);
    }
    let records = vec![
        record(&format!("{name}/verdict"), infinitesimal, 1.0, ">=", millis),
        record(&format!("{name}/fitted_rate"), report.fitted_rate, 0.0, "<", 0),
        record(&format!("{name}/max_step_ratio"), max_ratio, 0.6, "<=", 0),
    ];
    Ok((
        records,
        SweepData {
            check_name: name.into(),
            report,
        },
    ))
}

/// Parses a thread-count override; `None` input means "no override".
fn parse_thread_count(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::ConfigInvalid(format!(
                "STARHILB_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let override_var = std::env::var("STARHILB_THREADS").ok();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = parse_thread_count(override_var.as_deref())? {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::ConfigInvalid(format!("cannot build thread pool: {e}")))
}

fn validate_params(suite: Suite, params: &[u64]) -> Result<()> {
    if params.is_empty() {
        return Err(Error::ConfigInvalid(
            "parameter list must not be empty".into(),
        ));
    }
    for window in params.windows(2) {
        if window[1] <= window[0] {
            return Err(Error::ConfigInvalid(format!(
                "parameters must be strictly ascending, got {} then {}",
                window[0], window[1]
            )));
        }
    }
    let cap = suite.max_param();
    for &p in params {
        if p == 0 {
            return Err(Error::ConfigInvalid("parameters must be positive".into()));
        }
        if p > cap {
            return Err(Error::ConfigInvalid(format!(
                "parameter {p} exceeds the {cap} supported by the {suite} suite \
                 (larger ranks exhaust memory)"
            )));
        }
    }
    Ok(())
}

fn validate(config: &RunConfig) -> Result<()> {
    if !(config.length > 0.0) || !config.length.is_finite() {
        return Err(Error::ConfigInvalid(format!(
            "circle circumference must be positive and finite, got {}",
            config.length
        )));
    }
    if !(config.tolerance > 0.0) || !config.tolerance.is_finite() {
        return Err(Error::ConfigInvalid(format!(
            "tolerance must be positive and finite, got {}",
            config.tolerance
        )));
    }
    match (&config.params, config.suite) {
        (Some(_), Suite::All) => Err(Error::ConfigInvalid(
            "the all suite runs each sub-suite at its default parameters; \
             pick a single suite to control the grid"
                .into(),
        )),
        (Some(p), suite) => validate_params(suite, p),
        (None, _) => Ok(()),
    }
}

/// Runs a suite and collects its report (plus sweep data for sweeps).
/// Fails only on invalid configuration; failing *checks* are reported in
/// the records, and [`RunOutput::as_result`] converts them into an error
/// when callers want one.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    validate(config)?;
    let params = config
        .params
        .clone()
        .unwrap_or_else(|| config.suite.default_params());

    let mut specs: Vec<CheckSpec> = Vec::new();
    let mut derived: Vec<CheckRecord> = Vec::new();
    let mut sweep = None;

    match config.suite {
        Suite::Core => {
            for &k in &params {
                specs.extend(core_specs(k, config.tolerance));
            }
        }
        Suite::Frobenius => {
            for &k in &params {
                specs.extend(frobenius_specs(k, config.tolerance));
            }
        }
        Suite::Circle => {
            for &omega in &params {
                specs.extend(circle_specs(omega, config.length, config.tolerance)?);
            }
        }
        Suite::All => {
            for &k in &Suite::Core.default_params() {
                specs.extend(core_specs(k, config.tolerance));
            }
            for &k in &Suite::Frobenius.default_params() {
                specs.extend(frobenius_specs(k, config.tolerance));
            }
            for &omega in &Suite::Circle.default_params() {
                specs.extend(circle_specs(omega, config.length, config.tolerance)?);
            }
        }
        Suite::SweepWeakFunctor => {
            let (records, data) = weakfunctor_output(&params)?;
            derived = records;
            sweep = Some(data);
        }
        Suite::SweepDirac => {
            let (records, data) = dirac_output(&params, config.length)?;
            derived = records;
            sweep = Some(data);
        }
    }

    let pool = thread_pool()?;
    let seed = config.seed;
    let mut checks: Vec<CheckRecord> =
        pool.install(|| specs.par_iter().map(|s| execute(s, seed)).collect());
    checks.extend(derived);
    checks.sort_by(|a, b| a.name.cmp(&b.name).then(a.parameter.cmp(&b.parameter)));

    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    let report = SuiteReport {
        suite: config.suite.name().into(),
        params,
        length: config.length,
        seed: config.seed,
        tolerance: config.tolerance,
        passed,
        failed,
        verdict: if failed == 0 { "pass" } else { "fail" }.into(),
        checks,
    };
    Ok(RunOutput { report, sweep })
}
