//! End-to-end synthesis: table in, verified and lowered circuit out.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{lower_polarity, metrics, Circuit, MetricsReport, QubitRole, RolePair, Status};
use crate::embed::{
    complete_onto_hamming, resolve_dontcares, rtt_embed_with_limit, EmbedError, EmbeddingReport, ResolvePolicy,
    ReversibleSpec,
};
use crate::esop::{esop_to_circuit, minimize_esop_until, sop_to_esop, DEFAULT_PASSES};
use crate::pla::{
    expand_with, Cube, ExpandOptions, Literal, PlaError, PlaKind, PlaTable, SpecTable, DEFAULT_EXPANSION_LIMIT,
};
use crate::sim::{verify_oracle, SimError, VerificationReport, VerifyMode};
use crate::tbs::{tbs_synthesize, Direction, TbsError, TbsOptions, DEFAULT_GATE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "esop")]
    Esop,
    #[serde(rename = "esop-rtt")]
    EsopRtt,
    #[serde(rename = "tbs")]
    Tbs,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Esop, Method::EsopRtt, Method::Tbs];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Esop => "esop",
            Method::EsopRtt => "esop-rtt",
            Method::Tbs => "tbs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "esop" => Ok(Method::Esop),
            "esop-rtt" => Ok(Method::EsopRtt),
            "tbs" => Ok(Method::Tbs),
            other => Err(format!("unknown method {other} (expected esop, esop-rtt or tbs)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    pub method: Method,
    pub minimize: bool,
    pub passes: usize,
    pub partial: bool,
    pub dc_minimize: bool,
    pub direction: Direction,
    pub gate_limit: usize,
    pub expansion_limit: usize,
    pub timeout: Option<Duration>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            method: Method::Esop,
            minimize: true,
            passes: DEFAULT_PASSES,
            partial: false,
            dc_minimize: false,
            direction: Direction::Unidirectional,
            gate_limit: DEFAULT_GATE_LIMIT,
            expansion_limit: DEFAULT_EXPANSION_LIMIT,
            timeout: Some(Duration::from_secs(600)),
        }
    }
}

impl SynthOptions {
    pub fn for_method(method: Method) -> Self {
        SynthOptions { method, ..SynthOptions::default() }
    }

    fn policy(&self) -> ResolvePolicy {
        if self.dc_minimize {
            ResolvePolicy::MinimizeDuplication
        } else {
            ResolvePolicy::Zeros
        }
    }

    fn expand_options(&self) -> ExpandOptions {
        ExpandOptions { partial: self.partial, limit: self.expansion_limit }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Pla(#[from] PlaError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Tbs(#[from] TbsError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("synthesis exceeded {0:?}")]
    Timeout(Duration),
    #[error("verification failed on {} of {} minterms", .0.mismatches.len(), .0.checked)]
    VerificationFailed(VerificationReport),
}

impl PipelineError {
    /// Benchmark status for failures that the harness records as rows.
    pub fn status(&self) -> Option<Status> {
        match self {
            PipelineError::Timeout(_) | PipelineError::Tbs(TbsError::Timeout(_)) => Some(Status::Timeout),
            PipelineError::Pla(PlaError::TooWide { .. })
            | PipelineError::Embed(EmbedError::TooWide { .. })
            | PipelineError::Tbs(TbsError::GateLimitExceeded { .. }) => Some(Status::TooLarge),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    /// Lowered circuit: positive controls only.
    pub circuit: Circuit,
    pub metrics: MetricsReport,
    /// `None` when the table was too wide to expand for checking.
    pub verification: Option<VerificationReport>,
    pub embedding: Option<EmbeddingReport>,
}

struct Clock {
    start: Instant,
    timeout: Option<Duration>,
}

impl Clock {
    fn deadline(&self) -> Option<Instant> {
        self.timeout.map(|t| self.start + t)
    }

    fn remaining(&self) -> Option<Duration> {
        self.timeout.map(|t| t.saturating_sub(self.start.elapsed()))
    }

    fn check(&self) -> Result<(), PipelineError> {
        match self.timeout {
            Some(t) if self.start.elapsed() > t => Err(PipelineError::Timeout(t)),
            _ => Ok(()),
        }
    }

    fn micros(&self) -> u64 {
        self.start.elapsed().as_micros() as u64
    }
}

/// Runs the chosen method, verifies the result and reports metrics.
pub fn synthesize(table: &PlaTable, name: &str, opts: &SynthOptions) -> Result<Synthesis, PipelineError> {
    let clock = Clock { start: Instant::now(), timeout: opts.timeout };
    let (circuit, spec, embedding) = match opts.method {
        Method::Esop => {
            let (circuit, spec) = esop_path(table, opts, &clock)?;
            (circuit, spec, None)
        }
        Method::EsopRtt => {
            let (circuit, spec, report) = esop_rtt_path(table, opts, &clock)?;
            (circuit, Some(spec), Some(report))
        }
        Method::Tbs => {
            let (circuit, spec, report) = tbs_path(table, opts, &clock)?;
            (circuit, Some(spec), Some(report))
        }
    };
    let elapsed = clock.micros();
    clock.check()?;
    let circuit = circuit.with_provenance(name, opts.method.as_str());

    let mode = match opts.method {
        Method::Tbs => VerifyMode::MinimalQubit,
        Method::Esop | Method::EsopRtt => VerifyMode::DomainPreserving,
    };
    let verification = match &spec {
        Some(spec) => {
            let report = verify_oracle(&circuit, spec, mode)?;
            if !report.passed {
                return Err(PipelineError::VerificationFailed(report));
            }
            Some(report)
        }
        None => None,
    };
    Ok(Synthesis { metrics: metrics(&circuit, elapsed), circuit, verification, embedding })
}

fn esop_from(table: &PlaTable, opts: &SynthOptions, clock: &Clock) -> Circuit {
    let seed = sop_to_esop(table);
    let list = if opts.minimize { minimize_esop_until(&seed, opts.passes, clock.deadline()) } else { seed };
    lower_polarity(&esop_to_circuit(&list))
}

/// ESOP on the cube list itself; the expanded table (when small enough) is
/// only needed for checking.
fn esop_path(
    table: &PlaTable,
    opts: &SynthOptions,
    clock: &Clock,
) -> Result<(Circuit, Option<SpecTable>), PipelineError> {
    let spec = match expand_with(table, &opts.expand_options()) {
        Ok(spec) => Some(spec),
        Err(PlaError::TooWide { .. }) if !opts.dc_minimize => None,
        Err(e) => return Err(e.into()),
    };
    let source = match (&spec, opts.dc_minimize) {
        (Some(spec), true) => resolve_dontcares(spec, ResolvePolicy::MinimizeDuplication).to_pla(),
        _ => table.clone(),
    };
    clock.check()?;
    Ok((esop_from(&source, opts, clock), spec))
}

fn embed(table: &PlaTable, opts: &SynthOptions) -> Result<(SpecTable, ReversibleSpec, EmbeddingReport), PipelineError> {
    let spec = expand_with(table, &opts.expand_options())?;
    let resolved = resolve_dontcares(&spec, opts.policy());
    let (partial, mut report) = rtt_embed_with_limit(&resolved, opts.expansion_limit)?;
    let reversible = complete_onto_hamming(&partial);
    report.record_completion(reversible.completion);
    Ok((spec, reversible, report))
}

/// Fully specified `N`-in, `N`-out table of a permutation.
pub fn permutation_table(spec: &ReversibleSpec) -> PlaTable {
    let w = spec.width;
    let mut t = PlaTable::new(w, w);
    t.kind = PlaKind::F;
    t.cubes = spec
        .perm
        .iter()
        .enumerate()
        .map(|(x, &y)| {
            let outputs =
                (0..w).map(|k| if (y >> (w - 1 - k)) & 1 == 1 { Literal::One } else { Literal::Zero }).collect();
            Cube::from_minterm(x as u64, w, outputs)
        })
        .collect();
    t
}

/// Embeds first, then builds a domain-preserving ESOP oracle of the
/// permutation on `2N` qubits.
fn esop_rtt_path(
    table: &PlaTable,
    opts: &SynthOptions,
    clock: &Clock,
) -> Result<(Circuit, SpecTable, EmbeddingReport), PipelineError> {
    let (spec, reversible, report) = embed(table, opts)?;
    clock.check()?;
    let mut circuit = esop_from(&permutation_table(&reversible), opts, clock);
    let w = reversible.width;
    let mut roles = Vec::with_capacity(2 * w);
    roles.extend(reversible.roles_in.iter().map(|&r| match r {
        QubitRole::FunctionInput => RolePair::new(r, QubitRole::FunctionInput),
        _ => RolePair::new(QubitRole::Ancilla, QubitRole::Ancilla),
    }));
    roles.extend(reversible.roles_out.iter().map(|&r| RolePair::new(QubitRole::Ancilla, r)));
    circuit.roles = Some(roles);
    Ok((circuit, spec, report))
}

fn tbs_path(
    table: &PlaTable,
    opts: &SynthOptions,
    clock: &Clock,
) -> Result<(Circuit, SpecTable, EmbeddingReport), PipelineError> {
    let (spec, reversible, report) = embed(table, opts)?;
    clock.check()?;
    let tbs_opts = TbsOptions { direction: opts.direction, gate_limit: opts.gate_limit, timeout: clock.remaining() };
    let circuit = tbs_synthesize(&reversible, &tbs_opts).map_err(|e| match e {
        TbsError::Timeout(_) => PipelineError::Timeout(opts.timeout.unwrap_or_default()),
        other => other.into(),
    })?;
    Ok((circuit, spec, report))
}
