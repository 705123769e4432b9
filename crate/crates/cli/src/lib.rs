//! Command implementations behind the `symlift` binary: model file I/O,
//! benchmark generation, exact inference, sampling, and TV evaluation.
//!
//! Everything lives in the library so integration tests can drive commands
//! in-process; `main.rs` only parses flags and maps errors to exit codes.

pub mod format;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use num_traits::ToPrimitive;
use serde_json::json;
use thiserror::Error;

use symlift::eval::{self, EvalCaps, Proposal};
use symlift::exact::{self, CensusConfig, Engine};
use symlift::group::GroupError;
use symlift::model::{gen_pairwise, gen_pigeonhole, Assignment, Model, ModelError};
use symlift::sampler::{self, ChainConfig, ChainKind};

use format::ParseError;

/// Exit codes: 0 ok, 1 I/O, 2 parse error, 3 infeasible or invariant
/// violation, 4 resource cap exceeded.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(ParseError),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    ResourceCap(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::ResourceCap(_) => 4,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::TooManyVariables { .. } => CliError::ResourceCap(e.to_string()),
            _ => CliError::Parse(ParseError::Model(e)),
        }
    }
}

impl From<exact::ExactError> for CliError {
    fn from(e: exact::ExactError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

impl From<sampler::SamplerError> for CliError {
    fn from(e: sampler::SamplerError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

impl From<eval::EvalError> for CliError {
    fn from(e: eval::EvalError) -> Self {
        CliError::ResourceCap(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError::ResourceCap(e.to_string())
    }
}

/// Model families the generator and benchmark commands understand.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    Pigeonhole {
        pigeons: usize,
        holes: usize,
        soft_weight: f64,
        quantum: bool,
    },
    Pairwise {
        n: usize,
        pair_table: [f64; 3],
        ev_table: [f64; 2],
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<Model, CliError> {
        Ok(match *self {
            FamilySpec::Pigeonhole {
                pigeons,
                holes,
                soft_weight,
                quantum,
            } => gen_pigeonhole(pigeons, holes, soft_weight, !quantum)?,
            FamilySpec::Pairwise {
                n,
                pair_table,
                ev_table,
            } => gen_pairwise(n, pair_table, ev_table)?,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            FamilySpec::Pigeonhole {
                pigeons,
                holes,
                soft_weight,
                quantum,
            } => format!(
                "{}pigeonhole(pigeons={pigeons}, holes={holes}, soft_weight={soft_weight})",
                if *quantum { "quantum-" } else { "" }
            ),
            FamilySpec::Pairwise { n, .. } => format!("pairwise(n={n})"),
        }
    }

    /// Same family with the scaling parameter replaced.
    pub fn with_size(&self, size: usize) -> FamilySpec {
        let mut spec = self.clone();
        match &mut spec {
            FamilySpec::Pigeonhole { pigeons, .. } => *pigeons = size,
            FamilySpec::Pairwise { n, .. } => *n = size,
        }
        spec
    }
}

fn read_model(path: &Path) -> Result<Model, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(format::parse_model(&text)?)
}

fn write_report(path: &Path, report: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// `generate`: build a benchmark model and write it in the text format.
pub fn cmd_generate(family: &FamilySpec, out: &Path) -> Result<(), CliError> {
    let model = family.build()?;
    fs::write(out, format::serialize_model(&model))?;
    Ok(())
}

/// `exact`: full lifted inference. Writes a JSON run report and the orbit
/// census as JSON lines.
pub fn cmd_exact(
    model_path: &Path,
    report_path: &Path,
    census_path: &Path,
    threads: usize,
    timings: bool,
) -> Result<(), CliError> {
    let model = read_model(model_path)?;
    let t_build = Instant::now();
    let engine = Engine::new(model);
    let build_seconds = t_build.elapsed().as_secs_f64();
    let t_census = Instant::now();
    let census = engine.census(&CensusConfig {
        orbit_prune: true,
        threads,
    });
    let census_seconds = t_census.elapsed().as_secs_f64();

    let log_z = exact::partition_function(&census)?;
    let prob_evidence = engine.prob_evidence(&census)?;
    let (mpe, mpe_log_score) = engine.mpe(&census)?;

    fs::write(census_path, exact::census_to_jsonl(&census))?;
    let mut report = json!({
        "inputs": {
            "command": "exact",
            "model": model_path.display().to_string(),
            "threads": threads,
        },
        "results": {
            "log_z": format!("{log_z}"),
            "prob_evidence": prob_evidence,
            "mpe_bits": mpe.bit_string(),
            "mpe_log_score": format!("{mpe_log_score}"),
            "orbit_count": census.records.len(),
            "aut_order": census.aut_order.to_string(),
            "state_count": census.total_states().to_string(),
            "certificate_computations": census.stats.certificate_computations,
        },
    });
    if timings {
        report["timings"] = json!({
            "engine_build_seconds": build_seconds,
            "census_seconds": census_seconds,
        });
    }
    write_report(report_path, &report)
}

fn chain_kind_name(kind: &ChainKind) -> &'static str {
    match kind {
        ChainKind::OrbitJump { .. } => "orbit-jump",
        ChainKind::Lifted { .. } => "lifted",
        ChainKind::Gibbs => "gibbs",
    }
}

/// `sample`: run one MCMC chain, writing the retained samples as CSV and a
/// JSON report with the Monte-Carlo estimate of the model's evidence.
pub fn cmd_sample(
    model_path: &Path,
    cfg: &ChainConfig,
    samples_path: &Path,
    report_path: &Path,
    timings: bool,
) -> Result<(), CliError> {
    let model = read_model(model_path)?;
    let estimand = model.evidence.clone();
    let t0 = Instant::now();
    let engine = Engine::new(model);
    let run = sampler::run_chain(&engine, cfg, &estimand, None)?;
    let wall = t0.elapsed().as_secs_f64();

    let mut csv = String::from("iteration,bits,log_score,accepted\n");
    for row in &run.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            row.iteration,
            row.assignment.bit_string(),
            row.log_score,
            row.accepted as u8
        );
    }
    fs::write(samples_path, csv)?;

    let mut report = json!({
        "inputs": {
            "command": "sample",
            "model": model_path.display().to_string(),
            "kind": chain_kind_name(&cfg.kind),
            "iterations": cfg.iterations,
            "burn_in": cfg.burn_in,
            "thinning": cfg.thinning,
        },
        "seed": cfg.seed,
        "results": {
            "estimate": run.estimate,
            "accepted": run.accepted,
            "kept_samples": run.rows.len(),
        },
    });
    if let ChainKind::OrbitJump { burnside_steps } = cfg.kind {
        report["inputs"]["burnside_steps"] = json!(burnside_steps);
    }
    if let ChainKind::Lifted {
        gibbs_updates_per_orbital_move,
    } = cfg.kind
    {
        report["inputs"]["gibbs_updates_per_orbital_move"] = json!(gibbs_updates_per_orbital_move);
    }
    if timings {
        report["timings"] = json!({ "wall_seconds": wall });
    }
    write_report(report_path, &report)
}

/// `tveval`: build the exact transition kernels and write the
/// total-variation curves against the model posterior, together with the
/// closed-form mixing bound.
pub fn cmd_tveval(
    model_path: &Path,
    t_max: usize,
    burnside_steps: u32,
    start_bits: Option<&str>,
    out: &Path,
) -> Result<(), CliError> {
    let model = read_model(model_path)?;
    let caps = EvalCaps::default();
    let num_vars = model.num_vars;
    let start_state = match start_bits {
        None => 0usize,
        Some(bits) => {
            let a = Assignment::from_bit_str(bits).ok_or_else(|| {
                CliError::Infeasible(format!("start state '{bits}' is not a bit string"))
            })?;
            if a.len() != num_vars {
                return Err(CliError::Infeasible(format!(
                    "start state has {} bits, model has {num_vars} variables",
                    a.len()
                )));
            }
            a.to_index() as usize
        }
    };

    let engine = Engine::new(model.clone());
    let brute = eval::brute_force(&model, &caps)?;
    let partition = eval::brute_orbit_partition(num_vars, engine.aut_generators(), &caps)?;
    let n_orbits = partition.num_classes() as u64;

    let oj = eval::kernel_orbit_jump(&engine, Proposal::Burnside(burnside_steps), &caps)?;
    let lifted = eval::kernel_lifted(&engine, &caps)?;
    let gibbs = eval::kernel_gibbs(&model, &caps)?;

    let oj_curve = eval::tv_curve(&oj, start_state, &brute.posterior, t_max);
    let lifted_curve = eval::tv_curve(&lifted, start_state, &brute.posterior, t_max);
    let gibbs_curve = eval::tv_curve(&gibbs, start_state, &brute.posterior, t_max);

    let mut csv = String::new();
    let _ = writeln!(csv, "# model: {}", model_path.display());
    let _ = writeln!(
        csv,
        "# orbit_jump: Metropolized independence sampler; proposal = {burnside_steps}-step collapsed Burnside kernel"
    );
    let _ = writeln!(
        csv,
        "# lifted: one random-scan Gibbs site update composed with orbital averaging over all automorphisms"
    );
    let _ = writeln!(csv, "# gibbs: one random-scan Gibbs site update per step");
    let _ = writeln!(
        csv,
        "# upper_bound: ((N-1)/N)^t with N = {n_orbits} orbits; start state index {start_state}"
    );
    csv.push_str("t,tv_orbit_jump,tv_lifted,tv_gibbs,upper_bound\n");
    for t in 0..=t_max {
        let _ = writeln!(
            csv,
            "{t},{},{},{},{}",
            oj_curve[t].1,
            lifted_curve[t].1,
            gibbs_curve[t].1,
            eval::mixing_upper_bound(n_orbits, t as u32)
        );
    }
    fs::write(out, csv)?;
    Ok(())
}

/// `bench`: exact lifted inference across a family size range, with the
/// brute-force oracle run (and compared) below the state-space cap.
pub fn cmd_bench(
    family: &FamilySpec,
    sizes: impl IntoIterator<Item = usize>,
    out: &Path,
) -> Result<(), CliError> {
    let caps = EvalCaps::default();
    let mut csv = String::from("size,vars,orbits,certificate_calls,lifted_seconds,brute_seconds,logz_rel_err\n");
    for size in sizes {
        let model = family.with_size(size).build()?;
        let vars = model.num_vars;
        let t0 = Instant::now();
        let engine = Engine::new(model.clone());
        let census = engine.census(&CensusConfig::default());
        let lifted_seconds = t0.elapsed().as_secs_f64();
        let log_z = exact::partition_function(&census)?;

        let (brute_seconds, rel_err) = if vars <= caps.brute_vars {
            let t1 = Instant::now();
            let brute = eval::brute_force(&model, &caps)?;
            let secs = t1.elapsed().as_secs_f64();
            let err = (log_z - brute.log_z).abs() / brute.log_z.abs().max(f64::MIN_POSITIVE);
            (format!("{secs}"), format!("{err:e}"))
        } else {
            (String::new(), String::new())
        };
        let _ = writeln!(
            csv,
            "{size},{vars},{},{},{lifted_seconds},{brute_seconds},{rel_err}",
            census.records.len(),
            census.stats.certificate_computations,
        );
    }
    fs::write(out, csv)?;
    Ok(())
}

/// Parses `a,b,c` style float lists for table-valued flags.
pub fn parse_f64_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated values"));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .parse::<f64>()
            .map_err(|_| format!("'{part}' is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("'{part}' is not finite"));
        }
    }
    Ok(out)
}

/// Orbit count of a model small enough for the closure oracle; used by
/// tests and kept here so the binary and tests share one definition.
pub fn closure_orbit_count(model: &Model) -> Result<usize, CliError> {
    let engine = Engine::new(model.clone());
    let partition = eval::brute_orbit_partition(
        model.num_vars,
        engine.aut_generators(),
        &EvalCaps::default(),
    )?;
    Ok(partition.num_classes())
}

/// Group order as u64 when it fits; handy for report assertions.
pub fn aut_order_u64(engine: &Engine) -> Option<u64> {
    engine.aut_order().to_u64()
}
