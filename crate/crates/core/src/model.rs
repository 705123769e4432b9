//! Discrete probability models over binary variables: weighted clause sets
//! and symmetric count-table factors, plus the benchmark model generators.
//!
//! A model assigns every full assignment `x` an unnormalized log-score
//!
//! ```text
//! score(x) = sum of w over satisfied finite-weight clauses
//!          + sum over factors of count_table[#true in scope]
//! ```
//!
//! and `-inf` exactly when some hard clause is violated. All scoring stays in
//! log-space; orbit sizes and partition functions are combined downstream via
//! log-sum-exp.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a binary variable, dense and zero-based within its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A full truth assignment to the variables of a model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn all_false(num_vars: usize) -> Self {
        Assignment {
            bits: vec![false; num_vars],
        }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    /// Parses a string of `0`/`1` characters; whitespace and `_` are ignored.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        let mut bits = Vec::new();
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() || c == '_' => {}
                _ => return None,
            }
        }
        Some(Assignment { bits })
    }

    /// Decodes the `num_vars` low bits of `index`, variable 0 at bit 0.
    pub fn from_index(num_vars: usize, index: u64) -> Self {
        let bits = (0..num_vars).map(|i| index >> i & 1 == 1).collect();
        Assignment { bits }
    }

    /// Packs the assignment into an integer, variable 0 at bit 0.
    pub fn to_index(&self) -> u64 {
        debug_assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (b as u64) << i)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, v: usize) -> bool {
        self.bits[v]
    }

    #[inline]
    pub fn set(&mut self, v: usize, value: bool) {
        self.bits[v] = value;
    }

    pub fn count_true(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Applies a variable permutation: the result has `x[v]` at position
    /// `perm(v)`.
    pub fn permuted(&self, perm: impl Fn(usize) -> usize) -> Assignment {
        let mut out = vec![false; self.bits.len()];
        for (v, &b) in self.bits.iter().enumerate() {
            out[perm(v)] = b;
        }
        Assignment { bits: out }
    }

    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Clause weight: a finite log-weight, or a hard constraint marker.
///
/// `Hard` is deliberately not a float infinity: a satisfied hard clause
/// contributes 0 to the log-score and a violated one forces the whole score
/// to `-inf`, so no `inf - inf` arithmetic can arise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClauseWeight {
    Soft(f64),
    Hard,
}

/// A signed occurrence of a variable in a clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: VarId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal {
            var: VarId(var),
            positive: true,
        }
    }

    pub fn neg(var: u32) -> Self {
        Literal {
            var: VarId(var),
            positive: false,
        }
    }
}

/// A weighted disjunction of literals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedClause {
    pub weight: ClauseWeight,
    pub literals: Vec<Literal>,
}

impl WeightedClause {
    /// True iff at least one literal agrees with `x`.
    pub fn satisfied_by(&self, x: &Assignment) -> bool {
        self.literals
            .iter()
            .any(|lit| x.get(lit.var.index()) == lit.positive)
    }

    /// True when every literal has the same sign; such clauses are fully
    /// symmetric in their scope.
    pub fn uniform_sign(&self) -> bool {
        self.literals.iter().all(|l| l.positive) || self.literals.iter().all(|l| !l.positive)
    }
}

/// A fully symmetric factor: the log-weight depends only on how many scope
/// variables are true.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymFactor {
    pub scope: Vec<VarId>,
    /// `count_table[k]` is the log-weight when exactly `k` scope variables
    /// are true; length is `scope.len() + 1`.
    pub count_table: Vec<f64>,
}

impl SymFactor {
    pub fn log_value(&self, x: &Assignment) -> f64 {
        let k = self
            .scope
            .iter()
            .filter(|v| x.get(v.index()))
            .count();
        self.count_table[k]
    }
}

/// Comparison operator for cardinality evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Le,
    Ge,
}

/// Evidence predicate; must be invariant under the model's symmetries for
/// lifted evidence queries to be sound (validated in `exact`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EvidencePredicate {
    True,
    Cardinality {
        subset: Vec<VarId>,
        cmp: CmpOp,
        bound: usize,
    },
}

impl EvidencePredicate {
    pub fn holds(&self, x: &Assignment) -> bool {
        match self {
            EvidencePredicate::True => true,
            EvidencePredicate::Cardinality { subset, cmp, bound } => {
                let count = subset.iter().filter(|v| x.get(v.index())).count();
                match cmp {
                    CmpOp::Eq => count == *bound,
                    CmpOp::Le => count <= *bound,
                    CmpOp::Ge => count >= *bound,
                }
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("model must have at least one variable")]
    NoVariables,
    #[error("variable {var} out of range (model has {num_vars} variables)")]
    VarOutOfRange { var: u32, num_vars: usize },
    #[error("duplicate variable {var} in one clause or scope")]
    DuplicateVar { var: u32 },
    #[error("clause has no literals")]
    EmptyClause,
    #[error("clause weight must be finite or hard")]
    NonFiniteWeight,
    #[error("count table has length {got}, expected scope length + 1 = {expected}")]
    BadCountTable { got: usize, expected: usize },
    #[error("count table entries must be finite")]
    NonFiniteTable,
    #[error("cardinality bound {bound} exceeds subset size {subset}")]
    BadBound { bound: usize, subset: usize },
    #[error("requested model size {vars} exceeds the variable budget {budget}")]
    TooManyVariables { vars: u64, budget: u64 },
}

/// Largest number of variables a generator will produce.
pub const VAR_BUDGET: u64 = 1 << 24;

/// A discrete factor-graph model over binary variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub num_vars: usize,
    pub clauses: Vec<WeightedClause>,
    pub factors: Vec<SymFactor>,
    pub evidence: EvidencePredicate,
}

impl Model {
    /// Validates structural invariants and returns the model.
    pub fn new(
        num_vars: usize,
        clauses: Vec<WeightedClause>,
        factors: Vec<SymFactor>,
        evidence: EvidencePredicate,
    ) -> Result<Self, ModelError> {
        if num_vars == 0 {
            return Err(ModelError::NoVariables);
        }
        let check_distinct_in_range = |vars: &[VarId]| -> Result<(), ModelError> {
            let mut seen = vec![false; num_vars];
            for v in vars {
                if v.index() >= num_vars {
                    return Err(ModelError::VarOutOfRange {
                        var: v.0,
                        num_vars,
                    });
                }
                if seen[v.index()] {
                    return Err(ModelError::DuplicateVar { var: v.0 });
                }
                seen[v.index()] = true;
            }
            Ok(())
        };
        for clause in &clauses {
            if clause.literals.is_empty() {
                return Err(ModelError::EmptyClause);
            }
            if let ClauseWeight::Soft(w) = clause.weight {
                if !w.is_finite() {
                    return Err(ModelError::NonFiniteWeight);
                }
            }
            let vars: Vec<VarId> = clause.literals.iter().map(|l| l.var).collect();
            check_distinct_in_range(&vars)?;
        }
        for factor in &factors {
            check_distinct_in_range(&factor.scope)?;
            if factor.count_table.len() != factor.scope.len() + 1 {
                return Err(ModelError::BadCountTable {
                    got: factor.count_table.len(),
                    expected: factor.scope.len() + 1,
                });
            }
            if factor.count_table.iter().any(|w| !w.is_finite()) {
                return Err(ModelError::NonFiniteTable);
            }
        }
        if let EvidencePredicate::Cardinality { subset, bound, .. } = &evidence {
            check_distinct_in_range(subset)?;
            if *bound > subset.len() {
                return Err(ModelError::BadBound {
                    bound: *bound,
                    subset: subset.len(),
                });
            }
        }
        Ok(Model {
            num_vars,
            clauses,
            factors,
            evidence,
        })
    }

    /// Unnormalized log-score of `x`; `-inf` iff a hard clause is violated.
    pub fn log_score(&self, x: &Assignment) -> f64 {
        assert_eq!(x.len(), self.num_vars, "assignment length mismatch");
        let mut total = 0.0;
        for clause in &self.clauses {
            match (clause.weight, clause.satisfied_by(x)) {
                (ClauseWeight::Hard, false) => return f64::NEG_INFINITY,
                (ClauseWeight::Hard, true) => {}
                (ClauseWeight::Soft(w), true) => total += w,
                (ClauseWeight::Soft(_), false) => {}
            }
        }
        for factor in &self.factors {
            total += factor.log_value(x);
        }
        total
    }

    pub fn evidence_holds(&self, x: &Assignment) -> bool {
        assert_eq!(x.len(), self.num_vars, "assignment length mismatch");
        self.evidence.holds(x)
    }
}

/// Log of a sum of exponentials, tolerating `-inf` entries.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().filter(|v| *v > f64::NEG_INFINITY).collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Pigeonhole model with `n` pigeons and `m` holes.
///
/// Variables are laid out hole-major: the variable for pigeon `i` in hole `j`
/// has index `j * n + i`, so an assignment prints as the hole-A block
/// followed by the hole-B block and so on.
///
/// With `hard = true` every pigeon is restricted to at most one hole by a
/// hard clause per hole pair; with `hard = false` those clauses are omitted
/// (the "quantum" variant where pigeons may occupy several holes). Each hole
/// always discourages sharing with one soft clause of weight `soft_w` per
/// pigeon pair.
pub fn gen_pigeonhole(n: usize, m: usize, soft_w: f64, hard: bool) -> Result<Model, ModelError> {
    assert!(n >= 1 && m >= 1, "need at least one pigeon and one hole");
    let vars = (n as u64).saturating_mul(m as u64);
    if vars > VAR_BUDGET {
        return Err(ModelError::TooManyVariables {
            vars,
            budget: VAR_BUDGET,
        });
    }
    let var = |pigeon: usize, hole: usize| VarId((hole * n + pigeon) as u32);
    let mut clauses = Vec::new();
    if hard {
        for pigeon in 0..n {
            for k in 0..m {
                for l in k + 1..m {
                    clauses.push(WeightedClause {
                        weight: ClauseWeight::Hard,
                        literals: vec![
                            Literal {
                                var: var(pigeon, k),
                                positive: false,
                            },
                            Literal {
                                var: var(pigeon, l),
                                positive: false,
                            },
                        ],
                    });
                }
            }
        }
    }
    for hole in 0..m {
        for k in 0..n {
            for l in k + 1..n {
                clauses.push(WeightedClause {
                    weight: ClauseWeight::Soft(soft_w),
                    literals: vec![
                        Literal {
                            var: var(k, hole),
                            positive: false,
                        },
                        Literal {
                            var: var(l, hole),
                            positive: false,
                        },
                    ],
                });
            }
        }
    }
    Model::new(n * m, clauses, Vec::new(), EvidencePredicate::True)
}

/// Fully connected pairwise model: `n` variables, an identical symmetric
/// potential on every pair, and one unary factor on variable 0 playing the
/// role of an evidence factor.
pub fn gen_pairwise(n: usize, pair_table: [f64; 3], ev_table: [f64; 2]) -> Result<Model, ModelError> {
    assert!(n >= 2, "pairwise model needs at least two variables");
    let mut factors = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            factors.push(SymFactor {
                scope: vec![VarId(a as u32), VarId(b as u32)],
                count_table: pair_table.to_vec(),
            });
        }
    }
    factors.push(SymFactor {
        scope: vec![VarId(0)],
        count_table: ev_table.to_vec(),
    });
    Model::new(n, Vec::new(), factors, EvidencePredicate::True)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(weight: ClauseWeight, lits: Vec<Literal>) -> WeightedClause {
        WeightedClause {
            weight,
            literals: lits,
        }
    }

    #[test]
    fn satisfies_negative_clause() {
        let c = clause(ClauseWeight::Soft(1.0), vec![Literal::neg(0), Literal::neg(1)]);
        assert!(c.satisfied_by(&Assignment::from_bit_str("00").unwrap()));
        assert!(!c.satisfied_by(&Assignment::from_bit_str("11").unwrap()));
        assert!(c.satisfied_by(&Assignment::from_bit_str("01").unwrap()));
    }

    #[test]
    fn satisfies_unit_clause() {
        let c = clause(ClauseWeight::Soft(1.0), vec![Literal::pos(0)]);
        assert!(c.satisfied_by(&Assignment::from_bit_str("1").unwrap()));
        assert!(!c.satisfied_by(&Assignment::from_bit_str("0").unwrap()));
    }

    #[test]
    fn log_score_single_clause() {
        let m = Model::new(
            1,
            vec![clause(ClauseWeight::Soft(2f64.ln()), vec![Literal::pos(0)])],
            vec![],
            EvidencePredicate::True,
        )
        .unwrap();
        let t = m.log_score(&Assignment::from_bit_str("1").unwrap());
        let f = m.log_score(&Assignment::from_bit_str("0").unwrap());
        assert!((t - 2f64.ln()).abs() < 1e-15);
        assert_eq!(f, 0.0);
        // Two worlds: Z = 1 + 2, so P(x0 = T) = 2/3.
        let z = log_sum_exp([t, f]);
        assert!(((t - z).exp() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn log_score_pigeonhole() {
        let m = gen_pigeonhole(3, 2, 2.0, true).unwrap();
        assert_eq!(m.num_vars, 6);
        // All six soft clauses satisfied at weight 2, hard clauses contribute 0.
        let all_false = Assignment::all_false(6);
        assert_eq!(m.log_score(&all_false), 12.0);
        // Pigeon 1 in both holes violates a hard clause (hole-major layout:
        // x_{1A} is index 0, x_{1B} is index 3).
        let both = Assignment::from_bit_str("100 100").unwrap();
        assert_eq!(m.log_score(&both), f64::NEG_INFINITY);
    }

    #[test]
    fn evidence_predicates() {
        let m = gen_pigeonhole(1, 3, 2.0, true).unwrap();
        assert!(m.evidence_holds(&Assignment::all_false(3)));
        let card = EvidencePredicate::Cardinality {
            subset: vec![VarId(0), VarId(1), VarId(2)],
            cmp: CmpOp::Ge,
            bound: 2,
        };
        assert!(card.holds(&Assignment::from_bit_str("110").unwrap()));
        assert!(!card.holds(&Assignment::from_bit_str("100").unwrap()));
        let zero = EvidencePredicate::Cardinality {
            subset: vec![VarId(0), VarId(1), VarId(2)],
            cmp: CmpOp::Eq,
            bound: 0,
        };
        assert!(!zero.holds(&Assignment::from_bit_str("010").unwrap()));
        assert!(zero.holds(&Assignment::from_bit_str("000").unwrap()));
    }

    #[test]
    fn pigeonhole_shapes() {
        let m = gen_pigeonhole(3, 2, 2.0, true).unwrap();
        let hard = m
            .clauses
            .iter()
            .filter(|c| c.weight == ClauseWeight::Hard)
            .count();
        assert_eq!((m.num_vars, hard, m.clauses.len() - hard), (6, 3, 6));

        let m = gen_pigeonhole(1, 1, 2.0, true).unwrap();
        assert_eq!((m.num_vars, m.clauses.len()), (1, 0));

        let m = gen_pigeonhole(5, 2, 2.0, false).unwrap();
        let hard = m
            .clauses
            .iter()
            .filter(|c| c.weight == ClauseWeight::Hard)
            .count();
        assert_eq!((m.num_vars, hard, m.clauses.len()), (10, 0, 20));
    }

    #[test]
    fn pairwise_shapes() {
        let m = gen_pairwise(4, [0.1, 0.2, 0.3], [0.0, 0.5]).unwrap();
        assert_eq!(m.num_vars, 4);
        assert_eq!(m.factors.len(), 6 + 1);

        let m = gen_pairwise(2, [0.0; 3], [0.0; 2]).unwrap();
        assert_eq!(m.factors.len(), 2);

        // All-zero tables score every assignment 0.
        let m = gen_pairwise(4, [0.0; 3], [0.0; 2]).unwrap();
        for idx in 0..16u64 {
            assert_eq!(m.log_score(&Assignment::from_index(4, idx)), 0.0);
        }
    }

    #[test]
    fn model_validation_errors() {
        let err = Model::new(
            2,
            vec![clause(
                ClauseWeight::Hard,
                vec![Literal::pos(0), Literal::neg(0)],
            )],
            vec![],
            EvidencePredicate::True,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::DuplicateVar { var: 0 });

        let err = Model::new(
            2,
            vec![clause(ClauseWeight::Soft(1.0), vec![Literal::pos(7)])],
            vec![],
            EvidencePredicate::True,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::VarOutOfRange { var: 7, num_vars: 2 });

        let err = Model::new(
            2,
            vec![],
            vec![SymFactor {
                scope: vec![VarId(0), VarId(1)],
                count_table: vec![0.0, 0.0],
            }],
            EvidencePredicate::True,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::BadCountTable { got: 2, expected: 3 });
    }

    #[test]
    fn assignment_round_trip() {
        for idx in 0..32u64 {
            let a = Assignment::from_index(5, idx);
            assert_eq!(a.to_index(), idx);
        }
        let a = Assignment::from_bit_str("010 11").unwrap();
        assert_eq!(a.bit_string(), "01011");
        assert_eq!(a.count_true(), 3);
    }
}
