//! MCMC kernels: the Burnside process on factor graphs, orbit-jump MCMC,
//! and the lifted-MCMC / Gibbs baselines.
//!
//! One Burnside step from `x` draws a near-uniform element `s` of the
//! stabilizer of `x` (the automorphism group of its encoded graph, sampled
//! by product replacement) and then a uniform element of `fix(s)` by
//! flipping one fair coin per variable cycle of `s`. Orbit-jump MCMC uses
//! `k` such steps as an independence proposal and corrects with a
//! Metropolis ratio weighted by exact orbit sizes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::exact::{ln_biguint, Engine};
use crate::group::{Perm, PrConfig, ProductReplacement};
use crate::model::{Assignment, EvidencePredicate};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamplerError {
    #[error("initial state violates a hard clause; Gibbs conditionals are undefined there")]
    InitViolatesHard,
}

/// Which chain to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// Metropolized independence sampler with a k-step Burnside proposal.
    OrbitJump { burnside_steps: usize },
    /// Random-scan Gibbs interleaved with orbital moves (random
    /// automorphisms applied to the state).
    Lifted { gibbs_updates_per_orbital_move: usize },
    /// Plain random-scan single-site Gibbs.
    Gibbs,
}

#[derive(Clone, Debug)]
pub struct ChainConfig {
    pub kind: ChainKind,
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    /// Product-replacement parameters for the per-step stabilizer samplers
    /// (fresh group every Burnside step, so a lighter burn-in than the
    /// long-lived samplers).
    pub stab_pr: PrConfig,
    /// Product-replacement parameters for the long-lived sampler over the
    /// full automorphism group used by orbital moves.
    pub aut_pr: PrConfig,
}

impl ChainConfig {
    pub fn new(kind: ChainKind, seed: u64, iterations: usize) -> Self {
        ChainConfig {
            kind,
            seed,
            iterations,
            burn_in: 0,
            thinning: 1,
            stab_pr: PrConfig {
                burn_in: 30,
                ..PrConfig::default()
            },
            aut_pr: PrConfig::default(),
        }
    }
}

/// Current chain position with the cached quantities the kernels need.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub current: Assignment,
    pub log_score: f64,
    /// `ln |orb(current)|`; maintained only by the orbit-jump kernel.
    pub log_orbit: f64,
}

impl ChainState {
    fn for_orbit_jump(engine: &Engine, x: Assignment) -> ChainState {
        let log_score = engine.model().log_score(&x);
        let log_orbit = ln_biguint(&engine.orbit_size(&x));
        ChainState {
            current: x,
            log_score,
            log_orbit,
        }
    }

    fn for_gibbs(engine: &Engine, x: Assignment) -> ChainState {
        let log_score = engine.model().log_score(&x);
        ChainState {
            current: x,
            log_score,
            log_orbit: 0.0,
        }
    }
}

/// Uniform sample from `fix(s)` restricted to assignments: every variable
/// cycle of `s` receives a single fair-coin value.
pub fn sample_fixer<R: Rng>(s: &Perm, num_vars: usize, rng: &mut R) -> Assignment {
    let mut x = Assignment::all_false(num_vars);
    let mut seen = vec![false; num_vars];
    for start in 0..num_vars {
        if seen[start] {
            continue;
        }
        let value = rng.gen::<bool>();
        let mut p = start;
        loop {
            assert!(
                p < num_vars,
                "stabilizer element maps a variable vertex outside the variable block"
            );
            seen[p] = true;
            x.set(p, value);
            p = s.apply(p);
            if p == start {
                break;
            }
        }
    }
    x
}

/// One Burnside-process step: sample a stabilizer element of `x`, then a
/// uniform fixer of that element.
pub fn burnside_step<R: Rng>(
    engine: &Engine,
    x: &Assignment,
    pr: &PrConfig,
    rng: &mut R,
) -> Assignment {
    let result = engine.canonize(x);
    let mut sampler =
        ProductReplacement::new(&result.generators, engine.graph().len(), pr, rng);
    let s = sampler.next(rng);
    sample_fixer(&s, engine.model().num_vars, rng)
}

/// One orbit-jump transition: propose with `k` Burnside steps, accept with
/// the orbit-weighted Metropolis ratio. Returns whether the proposal was
/// accepted.
pub fn orbit_jump_step<R: Rng>(
    engine: &Engine,
    state: &mut ChainState,
    k: usize,
    pr: &PrConfig,
    rng: &mut R,
) -> bool {
    let mut proposal = state.current.clone();
    for _ in 0..k {
        proposal = burnside_step(engine, &proposal, pr, rng);
    }
    let log_score = engine.model().log_score(&proposal);
    if log_score == f64::NEG_INFINITY {
        return false;
    }
    let log_orbit = ln_biguint(&engine.orbit_size(&proposal));
    let accept = if state.log_score == f64::NEG_INFINITY {
        true
    } else {
        let log_ratio = (log_score + log_orbit) - (state.log_score + state.log_orbit);
        log_ratio >= 0.0 || rng.gen::<f64>().ln() < log_ratio
    };
    if accept {
        state.current = proposal;
        state.log_score = log_score;
        state.log_orbit = log_orbit;
    }
    accept
}

/// One random-scan single-site Gibbs update. The caller guarantees the
/// current state has finite score, so at least one value of the chosen
/// variable does too.
fn gibbs_update<R: Rng>(engine: &Engine, state: &mut ChainState, rng: &mut R) {
    let nv = engine.model().num_vars;
    let v = rng.gen_range(0..nv);
    let mut flipped = state.current.clone();
    flipped.set(v, !state.current.get(v));
    let flipped_score = engine.model().log_score(&flipped);
    let (s_false, s_true) = if state.current.get(v) {
        (flipped_score, state.log_score)
    } else {
        (state.log_score, flipped_score)
    };
    let p_true = if s_true == f64::NEG_INFINITY {
        0.0
    } else if s_false == f64::NEG_INFINITY {
        1.0
    } else {
        1.0 / (1.0 + (s_false - s_true).exp())
    };
    let value = rng.gen::<f64>() < p_true;
    if value != state.current.get(v) {
        state.current = flipped;
        state.log_score = flipped_score;
    }
}

/// One lifted-MCMC transition: a batch of Gibbs updates followed by an
/// orbital move (apply a random automorphism; always accepted because the
/// target is invariant).
pub fn lifted_mcmc_step<R: Rng>(
    engine: &Engine,
    aut_sampler: &mut ProductReplacement,
    state: &mut ChainState,
    gibbs_updates: usize,
    rng: &mut R,
) {
    for _ in 0..gibbs_updates {
        gibbs_update(engine, state, rng);
    }
    let g = aut_sampler.next(rng);
    state.current = state.current.permuted(|v| g.apply(v));
    debug_assert_eq!(engine.model().log_score(&state.current), state.log_score);
}

/// One retained sample of a chain run.
#[derive(Clone, Debug)]
pub struct SampleRow {
    pub iteration: usize,
    pub assignment: Assignment,
    pub log_score: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct ChainRun {
    pub rows: Vec<SampleRow>,
    /// Monte-Carlo estimate of P(estimand) over the retained samples.
    pub estimate: f64,
    pub accepted: usize,
    pub iterations: usize,
}

/// Runs the configured chain from `init` (default all-false), applying
/// burn-in and thinning, and estimates the probability of `estimand`.
/// Fully reproducible from the config seed.
pub fn run_chain(
    engine: &Engine,
    cfg: &ChainConfig,
    estimand: &EvidencePredicate,
    init: Option<Assignment>,
) -> Result<ChainRun, SamplerError> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let init = init.unwrap_or_else(|| Assignment::all_false(engine.model().num_vars));
    let mut state = match cfg.kind {
        ChainKind::OrbitJump { .. } => ChainState::for_orbit_jump(engine, init),
        ChainKind::Lifted { .. } | ChainKind::Gibbs => {
            let state = ChainState::for_gibbs(engine, init);
            if state.log_score == f64::NEG_INFINITY {
                return Err(SamplerError::InitViolatesHard);
            }
            state
        }
    };
    let mut aut_sampler = match cfg.kind {
        ChainKind::Lifted { .. } => Some(ProductReplacement::new(
            engine.aut_generators(),
            engine.graph().len(),
            &cfg.aut_pr,
            &mut rng,
        )),
        _ => None,
    };

    let thinning = cfg.thinning.max(1);
    let mut rows = Vec::new();
    let mut accepted_total = 0usize;
    let mut hits = 0usize;
    for iteration in 0..cfg.iterations {
        let accepted = match cfg.kind {
            ChainKind::OrbitJump { burnside_steps } => {
                orbit_jump_step(engine, &mut state, burnside_steps, &cfg.stab_pr, &mut rng)
            }
            ChainKind::Lifted {
                gibbs_updates_per_orbital_move,
            } => {
                lifted_mcmc_step(
                    engine,
                    aut_sampler.as_mut().unwrap(),
                    &mut state,
                    gibbs_updates_per_orbital_move,
                    &mut rng,
                );
                true
            }
            ChainKind::Gibbs => {
                gibbs_update(engine, &mut state, &mut rng);
                true
            }
        };
        accepted_total += accepted as usize;
        if iteration >= cfg.burn_in && (iteration - cfg.burn_in).is_multiple_of(thinning) {
            if estimand.holds(&state.current) {
                hits += 1;
            }
            rows.push(SampleRow {
                iteration,
                assignment: state.current.clone(),
                log_score: state.log_score,
                accepted,
            });
        }
    }
    let estimate = if rows.is_empty() {
        0.0
    } else {
        hits as f64 / rows.len() as f64
    };
    Ok(ChainRun {
        rows,
        estimate,
        accepted: accepted_total,
        iterations: cfg.iterations,
    })
}
