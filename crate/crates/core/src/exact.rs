//! Exact lifted inference: a breadth-first search over assignment orbits
//! that canonizes every frontier node, records one representative per orbit
//! together with its exact orbit size, and assembles the partition function,
//! evidence probability, and MPE from the resulting census.
//!
//! Orbit sizes come from the orbit-stabilizer identity: the stabilizer of an
//! assignment is the automorphism group of its encoded colored graph, so
//! `|orbit| = |Aut(G)| / |Aut(G(x))|` with both orders computed exactly via
//! Schreier-Sims chains.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::canon::{self, AutResult, Certificate};
use crate::group::{self, Perm, PermGroup};
use crate::model::{log_sum_exp, Assignment, EvidencePredicate, Model};
use crate::symgraph::{self, ColoredGraph, VertexMap};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("every orbit carries zero mass; the partition function is zero")]
    AllZeroMass,
    #[error("cardinality evidence subset is not closed under the model's symmetries")]
    EvidenceNotInvariant,
    #[error("no evidence-satisfying state has positive probability")]
    NoSatisfyingState,
}

/// One orbit of assignments: its canonical representative, exact size, and
/// the (shared) log-score of its members.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub representative: Assignment,
    pub orbit_size: BigUint,
    pub log_score: f64,
}

#[derive(Clone, Debug)]
pub struct CensusStats {
    pub expansions: usize,
    pub certificate_computations: usize,
    pub wall: Duration,
}

/// The complete orbit partition of the assignment space.
#[derive(Clone, Debug)]
pub struct OrbitCensus {
    pub records: Vec<OrbitRecord>,
    pub aut_order: BigUint,
    pub stats: CensusStats,
}

impl OrbitCensus {
    /// Sum of orbit sizes; must equal `2^num_vars`.
    pub fn total_states(&self) -> BigUint {
        self.records.iter().map(|r| &r.orbit_size).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CensusConfig {
    /// Expansion pruning: push one augmentation per variable orbit of the
    /// stabilizer instead of one per false variable. Disabling it must not
    /// change the census.
    pub orbit_prune: bool,
    /// Worker threads for frontier canonization; 1 keeps everything on the
    /// calling thread. The census content and order are identical either
    /// way.
    pub threads: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            orbit_prune: true,
            threads: 1,
        }
    }
}

/// Restriction of a vertex permutation to the variable vertices, which it
/// must map among themselves.
pub fn variable_action(p: &Perm, num_vars: usize) -> Perm {
    let images: Vec<u32> = p.images()[..num_vars].to_vec();
    assert!(
        images.iter().all(|&v| (v as usize) < num_vars),
        "permutation does not preserve variable vertices"
    );
    Perm::from_images(images).expect("restriction of a bijection")
}

/// Precomputed context for lifted inference on one model.
pub struct Engine {
    model: Model,
    graph: ColoredGraph,
    map: VertexMap,
    induced_labeling: Perm,
    aut_generators: Vec<Perm>,
    aut: PermGroup,
    aut_order: BigUint,
}

impl Engine {
    pub fn new(model: Model) -> Engine {
        let (graph, map) = symgraph::induce(&model);
        let result = canon::canonical_form(&graph);
        let aut = group::schreier_sims(graph.len(), &result.generators);
        let aut_order = aut.order();
        Engine {
            model,
            graph,
            map,
            induced_labeling: result.canonical_labeling,
            aut_generators: result.generators,
            aut,
            aut_order,
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn vertex_map(&self) -> &VertexMap {
        &self.map
    }

    /// Generators of the automorphism group of the induced graph.
    pub fn aut_generators(&self) -> &[Perm] {
        &self.aut_generators
    }

    pub fn aut(&self) -> &PermGroup {
        &self.aut
    }

    pub fn aut_order(&self) -> &BigUint {
        &self.aut_order
    }

    /// Canonizes the assignment-encoded graph of `x`.
    pub fn canonize(&self, x: &Assignment) -> AutResult {
        let encoded = symgraph::encode_assignment(&self.graph, x);
        canon::canonical_form(&encoded)
    }

    /// Stabilizer chain of `x` (the automorphism group of its encoding).
    pub fn stabilizer(&self, x: &Assignment) -> PermGroup {
        group::schreier_sims(self.graph.len(), &self.canonize(x).generators)
    }

    fn orbit_size_of_stab_order(&self, stab_order: &BigUint) -> BigUint {
        let (quot, rem) = self.aut_order.div_rem(stab_order);
        assert!(
            rem == BigUint::from(0u32),
            "stabilizer order does not divide the group order; canonization or chain is broken"
        );
        quot
    }

    /// Exact orbit size of `x` via the orbit-stabilizer identity.
    pub fn orbit_size(&self, x: &Assignment) -> BigUint {
        let stab = self.stabilizer(x);
        self.orbit_size_of_stab_order(&stab.order())
    }

    pub fn canonical_assignment(&self, x: &Assignment) -> Assignment {
        self.canonical_assignment_with_witness(x).0
    }

    /// Canonical representative of `x`'s orbit together with the witnessing
    /// automorphism mapping `x` onto it.
    pub fn canonical_assignment_with_witness(&self, x: &Assignment) -> (Assignment, Perm) {
        let result = self.canonize(x);
        canon::induced_representative(&self.graph, &self.induced_labeling, x, &result)
    }

    /// Generates the full orbit census by breadth-first augmentation from
    /// the all-false assignment, skipping frontier nodes whose certificate
    /// was already expanded.
    pub fn census(&self, cfg: &CensusConfig) -> OrbitCensus {
        let start = Instant::now();
        let nv = self.model.num_vars;
        let var_points: Vec<u32> = (0..nv as u32).collect();
        let mut visited: HashSet<Certificate> = HashSet::new();
        let mut records: Vec<OrbitRecord> = Vec::new();
        let mut certificate_computations = 0usize;
        let mut level: Vec<Assignment> = vec![Assignment::all_false(nv)];

        while !level.is_empty() {
            certificate_computations += level.len();
            let canonized: Vec<AutResult> = if cfg.threads > 1 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.threads)
                    .build()
                    .expect("thread pool");
                pool.install(|| level.par_iter().map(|x| self.canonize(x)).collect())
            } else {
                level.iter().map(|x| self.canonize(x)).collect()
            };

            let mut next: Vec<Assignment> = Vec::new();
            let mut next_seen: HashSet<Vec<bool>> = HashSet::new();
            for (x, result) in level.iter().zip(canonized) {
                if !visited.insert(result.certificate.clone()) {
                    continue;
                }
                let (rep, _) =
                    canon::induced_representative(&self.graph, &self.induced_labeling, x, &result);
                let stab = group::schreier_sims(self.graph.len(), &result.generators);
                let orbit_size = self.orbit_size_of_stab_order(&stab.order());
                let log_score = self.model.log_score(&rep);
                // Expand from the member we actually canonized: the pruning
                // orbits belong to its stabilizer, not the representative's.
                let var_orbits = if cfg.orbit_prune {
                    group::point_orbits(&result.generators, &var_points)
                } else {
                    var_points.iter().map(|&v| vec![v]).collect()
                };
                for aug in augmentations(x, &var_orbits) {
                    if next_seen.insert(aug.bits().to_vec()) {
                        next.push(aug);
                    }
                }
                records.push(OrbitRecord {
                    representative: rep,
                    orbit_size,
                    log_score,
                });
            }
            level = next;
        }

        OrbitCensus {
            aut_order: self.aut_order.clone(),
            stats: CensusStats {
                expansions: records.len(),
                certificate_computations,
                wall: start.elapsed(),
            },
            records,
        }
    }

    fn check_evidence_invariant(&self, evidence: &EvidencePredicate) -> Result<(), ExactError> {
        let EvidencePredicate::Cardinality { subset, .. } = evidence else {
            return Ok(());
        };
        let in_subset: HashSet<u32> = subset.iter().map(|v| v.0).collect();
        for gen in &self.aut_generators {
            for &v in &in_subset {
                if !in_subset.contains(&(gen.apply(v as usize) as u32)) {
                    return Err(ExactError::EvidenceNotInvariant);
                }
            }
        }
        Ok(())
    }

    /// Probability of the model's evidence, computed entirely on orbit
    /// representatives.
    pub fn prob_evidence(&self, census: &OrbitCensus) -> Result<f64, ExactError> {
        self.check_evidence_invariant(&self.model.evidence)?;
        let log_z = partition_function(census)?;
        let log_p = log_sum_exp(
            census
                .records
                .iter()
                .filter(|r| self.model.evidence_holds(&r.representative))
                .map(|r| ln_biguint(&r.orbit_size) + r.log_score),
        );
        if log_p == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        Ok((log_p - log_z).exp())
    }

    /// Most probable explanation among evidence-satisfying representatives;
    /// ties break toward the lexicographically smallest bit-string.
    pub fn mpe(&self, census: &OrbitCensus) -> Result<(Assignment, f64), ExactError> {
        self.check_evidence_invariant(&self.model.evidence)?;
        let mut best: Option<(&Assignment, f64)> = None;
        for record in &census.records {
            if record.log_score == f64::NEG_INFINITY
                || !self.model.evidence_holds(&record.representative)
            {
                continue;
            }
            let better = match best {
                None => true,
                Some((bx, bs)) => {
                    record.log_score > bs
                        || (record.log_score == bs && record.representative.bits() < bx.bits())
                }
            };
            if better {
                best = Some((&record.representative, record.log_score));
            }
        }
        best.map(|(x, s)| (x.clone(), s))
            .ok_or(ExactError::NoSatisfyingState)
    }
}

/// One augmentation per variable orbit that still contains a false variable,
/// flipping the smallest-index false variable of that orbit.
pub fn augmentations(x: &Assignment, var_orbits: &[Vec<u32>]) -> Vec<Assignment> {
    let mut out = Vec::new();
    for orbit in var_orbits {
        if let Some(&v) = orbit.iter().find(|&&v| !x.get(v as usize)) {
            let mut aug = x.clone();
            aug.set(v as usize, true);
            out.push(aug);
        }
    }
    out
}

/// Natural log of an arbitrary-precision integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    debug_assert!(*x > BigUint::from(0u32));
    if let Some(f) = x.to_f64() {
        if f.is_finite() {
            return f.ln();
        }
    }
    let bits = x.bits();
    let top = (x >> (bits - 64)).to_f64().unwrap();
    top.ln() + (bits - 64) as f64 * std::f64::consts::LN_2
}

/// Log partition function from a complete census.
pub fn partition_function(census: &OrbitCensus) -> Result<f64, ExactError> {
    let log_z = log_sum_exp(
        census
            .records
            .iter()
            .filter(|r| r.log_score > f64::NEG_INFINITY)
            .map(|r| ln_biguint(&r.orbit_size) + r.log_score),
    );
    if log_z == f64::NEG_INFINITY {
        return Err(ExactError::AllZeroMass);
    }
    Ok(log_z)
}

/// Convenience entry point: build the engine and generate the census with
/// default settings.
pub fn generate_orbits(model: &Model) -> (Engine, OrbitCensus) {
    let engine = Engine::new(model.clone());
    let census = engine.census(&CensusConfig::default());
    (engine, census)
}

/// Census export as JSON lines. Orbit sizes are decimal strings (they can
/// exceed any fixed-width integer); a `-inf` log-score is the string
/// `"-inf"`.
pub fn census_to_jsonl(census: &OrbitCensus) -> String {
    let mut out = String::new();
    for record in &census.records {
        let score = if record.log_score == f64::NEG_INFINITY {
            serde_json::json!("-inf")
        } else {
            serde_json::json!(record.log_score)
        };
        let line = serde_json::json!({
            "representative_bits": record.representative.bit_string(),
            "orbit_size": record.orbit_size.to_string(),
            "log_score": score,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}
