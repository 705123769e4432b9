//! Ground-truth machinery: brute-force inference, brute-force orbit
//! partitions, exact dense transition kernels for every sampler, stationary
//! distributions, total-variation curves, and the closed-form mixing bound.
//!
//! Everything here enumerates the full state space, so it is gated behind
//! explicit caps. The orbit partition is computed by closure under generator
//! actions, deliberately independent of the certificate/orbit-stabilizer
//! route used by `exact`, which makes the two usable as cross-checks.

use thiserror::Error;

use crate::exact::{variable_action, Engine};
use crate::group::{GroupError, Perm};
use crate::model::{log_sum_exp, Assignment, Model};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("state space 2^{vars} exceeds the cap 2^{cap}")]
    StateSpaceTooLarge { vars: usize, cap: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug)]
pub struct EvalCaps {
    /// Max variables for full-enumeration oracles.
    pub brute_vars: usize,
    /// Max variables for dense kernel construction.
    pub kernel_vars: usize,
    /// Max group order for element enumeration.
    pub enum_cap: u64,
}

impl Default for EvalCaps {
    fn default() -> Self {
        EvalCaps {
            brute_vars: 20,
            kernel_vars: 12,
            enum_cap: 200_000,
        }
    }
}

fn check_cap(vars: usize, cap: usize) -> Result<(), EvalError> {
    if vars > cap {
        return Err(EvalError::StateSpaceTooLarge { vars, cap });
    }
    Ok(())
}

/// A probability vector over bit-packed assignments (variable 0 is bit 0).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseDistribution {
    pub probs: Vec<f64>,
}

impl DenseDistribution {
    pub fn point_mass(len: usize, state: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[state] = 1.0;
        DenseDistribution { probs }
    }

    pub fn uniform(len: usize) -> Self {
        DenseDistribution {
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// A row-stochastic transition matrix over bit-packed assignments.
#[derive(Clone, Debug)]
pub struct DenseKernel {
    n: usize,
    rows: Vec<f64>,
}

impl DenseKernel {
    fn zero(n: usize) -> Self {
        DenseKernel {
            n,
            rows: vec![0.0; n * n],
        }
    }

    fn identity(n: usize) -> Self {
        let mut k = DenseKernel::zero(n);
        for i in 0..n {
            k.rows[i * n + i] = 1.0;
        }
        k
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x * self.n..(x + 1) * self.n]
    }

    #[inline]
    fn at_mut(&mut self, x: usize, y: usize) -> &mut f64 {
        &mut self.rows[x * self.n + y]
    }

    /// Largest deviation of any row sum from 1.
    pub fn row_stochastic_error(&self) -> f64 {
        (0..self.n)
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// One step of the distribution: `out = dist * K`.
    pub fn step(&self, dist: &DenseDistribution) -> DenseDistribution {
        assert_eq!(dist.len(), self.n);
        let mut out = vec![0.0; self.n];
        for (i, &d) in dist.probs.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            for (o, &k) in out.iter_mut().zip(self.row(i)) {
                *o += d * k;
            }
        }
        DenseDistribution { probs: out }
    }

    pub fn matmul(&self, other: &DenseKernel) -> DenseKernel {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = DenseKernel::zero(n);
        for i in 0..n {
            let a_row = self.row(i);
            let o_row = &mut out.rows[i * n..(i + 1) * n];
            for (k, &aik) in a_row.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                let b_row = other.row(k);
                for (o, &b) in o_row.iter_mut().zip(b_row) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    pub fn pow(&self, mut exp: u32) -> DenseKernel {
        let mut result = DenseKernel::identity(self.n);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.matmul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    /// `||pi * K - pi||_1`, the stationarity violation of `pi`.
    pub fn stationarity_violation(&self, pi: &DenseDistribution) -> f64 {
        let next = self.step(pi);
        next.probs
            .iter()
            .zip(&pi.probs)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Fixed point by power iteration from the uniform distribution.
    pub fn stationary_distribution(&self, tol: f64, max_iters: usize) -> DenseDistribution {
        let mut dist = DenseDistribution::uniform(self.n);
        for _ in 0..max_iters {
            let next = self.step(&dist);
            let delta: f64 = next
                .probs
                .iter()
                .zip(&dist.probs)
                .map(|(a, b)| (a - b).abs())
                .sum();
            dist = next;
            if delta < tol {
                break;
            }
        }
        dist
    }
}

/// Brute-force inference result.
#[derive(Clone, Debug)]
pub struct BruteForce {
    pub log_z: f64,
    pub posterior: DenseDistribution,
    pub argmax: Assignment,
}

/// Exhaustive enumeration of all `2^num_vars` states.
pub fn brute_force(m: &Model, caps: &EvalCaps) -> Result<BruteForce, EvalError> {
    check_cap(m.num_vars, caps.brute_vars)?;
    let n = m.num_vars;
    let size = 1usize << n;
    let mut scores = vec![0.0f64; size];
    let mut buf = Assignment::all_false(n);
    let mut best: Option<(f64, u64)> = None;
    for idx in 0..size as u64 {
        for v in 0..n {
            buf.set(v, idx >> v & 1 == 1);
        }
        let s = m.log_score(&buf);
        scores[idx as usize] = s;
        let better = match best {
            None => s > f64::NEG_INFINITY,
            Some((bs, bidx)) => {
                s > bs
                    || (s == bs
                        && Assignment::from_index(n, idx).bits()
                            < Assignment::from_index(n, bidx).bits())
            }
        };
        if better {
            best = Some((s, idx));
        }
    }
    let log_z = log_sum_exp(scores.iter().cloned());
    let probs = scores
        .iter()
        .map(|&s| {
            if s == f64::NEG_INFINITY {
                0.0
            } else {
                (s - log_z).exp()
            }
        })
        .collect();
    let argmax_idx = best.map(|(_, idx)| idx).unwrap_or(0);
    Ok(BruteForce {
        log_z,
        posterior: DenseDistribution { probs },
        argmax: Assignment::from_index(n, argmax_idx),
    })
}

/// Orbit partition of the full state space under the variable action of the
/// given vertex permutations, computed by closure.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    /// Class id per state, classes numbered by smallest member.
    pub class_of: Vec<u32>,
    pub class_sizes: Vec<u64>,
}

impl OrbitPartition {
    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    /// States grouped by class, ascending within each class.
    pub fn classes(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (state, &class) in self.class_of.iter().enumerate() {
            out[class as usize].push(state as u64);
        }
        out
    }
}

fn permute_state(state: u64, var_images: &[u32]) -> u64 {
    let mut out = 0u64;
    for (v, &img) in var_images.iter().enumerate() {
        out |= (state >> v & 1) << img;
    }
    out
}

pub fn brute_orbit_partition(
    num_vars: usize,
    vertex_gens: &[Perm],
    caps: &EvalCaps,
) -> Result<OrbitPartition, EvalError> {
    check_cap(num_vars, caps.brute_vars)?;
    let size = 1usize << num_vars;
    let var_actions: Vec<Vec<u32>> = vertex_gens
        .iter()
        .map(|g| variable_action(g, num_vars).images().to_vec())
        .collect();
    let mut parent: Vec<u32> = (0..size as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    for action in &var_actions {
        for state in 0..size as u64 {
            let image = permute_state(state, action);
            let (a, b) = (find(&mut parent, state as u32), find(&mut parent, image as u32));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut class_of = vec![0u32; size];
    let mut class_sizes = Vec::new();
    let mut class_of_root: std::collections::HashMap<u32, u32> = Default::default();
    for state in 0..size as u32 {
        let root = find(&mut parent, state);
        let class = *class_of_root.entry(root).or_insert_with(|| {
            class_sizes.push(0);
            (class_sizes.len() - 1) as u32
        });
        class_of[state as usize] = class;
        class_sizes[class as usize] += 1;
    }
    Ok(OrbitPartition {
        class_of,
        class_sizes,
    })
}

/// The uniform orbit distribution: pick an orbit uniformly, then a member
/// uniformly, so `Pr(x) = 1 / (#orbits * |orb(x)|)`.
pub fn uniform_orbit_distribution(partition: &OrbitPartition) -> DenseDistribution {
    let k = partition.num_classes() as f64;
    let probs = partition
        .class_of
        .iter()
        .map(|&c| 1.0 / (k * partition.class_sizes[c as usize] as f64))
        .collect();
    DenseDistribution { probs }
}

/// Enumerated automorphism group restricted to its action on variables.
fn variable_elements(engine: &Engine, caps: &EvalCaps) -> Result<Vec<Vec<u32>>, EvalError> {
    let elements = engine.aut().enumerate_elements(caps.enum_cap)?;
    let nv = engine.model().num_vars;
    Ok(elements
        .iter()
        .map(|g| variable_action(g, nv).images().to_vec())
        .collect())
}

/// Cycle bitmasks of a variable permutation: one mask per cycle.
fn cycle_masks(action: &[u32]) -> Vec<u64> {
    let n = action.len();
    let mut seen = vec![false; n];
    let mut masks = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut mask = 0u64;
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            mask |= 1 << p;
            p = action[p] as usize;
        }
        masks.push(mask);
    }
    masks
}

/// Exact one-step Burnside kernel raised to the k-th power.
///
/// `B(x, y) = sum over g in stab(x) of [y in fix(g)] / (|stab(x)| |fix(g)|)`
/// where `|fix(g)| = 2^(#variable cycles of g)`; membership `g in stab(x)`
/// is the same thing as `x in fix(g)`, so the kernel is assembled by
/// enumerating fixers per group element.
pub fn kernel_burnside(engine: &Engine, k: u32, caps: &EvalCaps) -> Result<DenseKernel, EvalError> {
    let nv = engine.model().num_vars;
    check_cap(nv, caps.kernel_vars)?;
    let size = 1usize << nv;
    let actions = variable_elements(engine, caps)?;

    // fix(g) as explicit state lists, reused by both passes.
    let fixes: Vec<Vec<u64>> = actions
        .iter()
        .map(|action| {
            let masks = cycle_masks(action);
            let mut states = Vec::with_capacity(1 << masks.len());
            for choice in 0..1u64 << masks.len() {
                let mut state = 0u64;
                for (ci, mask) in masks.iter().enumerate() {
                    if choice >> ci & 1 == 1 {
                        state |= mask;
                    }
                }
                states.push(state);
            }
            states
        })
        .collect();

    let mut stab_count = vec![0u64; size];
    for fix in &fixes {
        for &x in fix {
            stab_count[x as usize] += 1;
        }
    }

    let mut kernel = DenseKernel::zero(size);
    for fix in &fixes {
        let fix_size = fix.len() as f64;
        for &x in fix {
            let w = 1.0 / (stab_count[x as usize] as f64 * fix_size);
            let row = &mut kernel.rows[x as usize * size..(x as usize + 1) * size];
            for &y in fix {
                row[y as usize] += w;
            }
        }
    }
    Ok(kernel.pow(k))
}

/// Proposal used by the exact orbit-jump kernel.
#[derive(Clone, Copy, Debug)]
pub enum Proposal {
    /// The exact uniform orbit distribution.
    Exact,
    /// `k` steps of the collapsed Burnside kernel.
    Burnside(u32),
}

/// Exact orbit-jump (Metropolized independence sampler) kernel.
pub fn kernel_orbit_jump(
    engine: &Engine,
    proposal: Proposal,
    caps: &EvalCaps,
) -> Result<DenseKernel, EvalError> {
    let m = engine.model();
    let nv = m.num_vars;
    check_cap(nv, caps.kernel_vars)?;
    let size = 1usize << nv;
    let partition = brute_orbit_partition(nv, engine.aut_generators(), caps)?;

    // log of score(x) * |orb(x)|, the quantity the acceptance ratio compares
    let mut log_w = vec![0.0f64; size];
    let mut buf = Assignment::all_false(nv);
    for state in 0..size as u64 {
        for v in 0..nv {
            buf.set(v, state >> v & 1 == 1);
        }
        let score = m.log_score(&buf);
        let orb = partition.class_sizes[partition.class_of[state as usize] as usize] as f64;
        log_w[state as usize] = score + orb.ln();
    }

    let proposal_rows: DenseKernel = match proposal {
        Proposal::Exact => {
            let q = uniform_orbit_distribution(&partition);
            let mut k = DenseKernel::zero(size);
            for x in 0..size {
                k.rows[x * size..(x + 1) * size].copy_from_slice(&q.probs);
            }
            k
        }
        Proposal::Burnside(k) => kernel_burnside(engine, k, caps)?,
    };

    let mut kernel = DenseKernel::zero(size);
    for x in 0..size {
        let q_row = proposal_rows.row(x);
        let mut stay = 0.0;
        for (y, &q) in q_row.iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            let accept = if log_w[x] == f64::NEG_INFINITY {
                1.0
            } else if log_w[y] == f64::NEG_INFINITY {
                0.0
            } else {
                (log_w[y] - log_w[x]).exp().min(1.0)
            };
            if y != x {
                *kernel.at_mut(x, y) += q * accept;
                stay += q * (1.0 - accept);
            } else {
                stay += q;
            }
        }
        *kernel.at_mut(x, x) += stay;
    }
    Ok(kernel)
}

/// Random-scan single-site Gibbs kernel. Rows at zero-probability states are
/// self-loops; they are unreachable from feasible starts.
pub fn kernel_gibbs(m: &Model, caps: &EvalCaps) -> Result<DenseKernel, EvalError> {
    let nv = m.num_vars;
    check_cap(nv, caps.kernel_vars)?;
    let size = 1usize << nv;
    let mut scores = vec![0.0f64; size];
    let mut buf = Assignment::all_false(nv);
    for state in 0..size as u64 {
        for v in 0..nv {
            buf.set(v, state >> v & 1 == 1);
        }
        scores[state as usize] = m.log_score(&buf);
    }
    let mut kernel = DenseKernel::zero(size);
    let site_prob = 1.0 / nv as f64;
    for x in 0..size {
        if scores[x] == f64::NEG_INFINITY {
            *kernel.at_mut(x, x) = 1.0;
            continue;
        }
        for v in 0..nv {
            let x_true = x | 1 << v;
            let x_false = x & !(1 << v);
            let (s_t, s_f) = (scores[x_true], scores[x_false]);
            let p_true = if s_t == f64::NEG_INFINITY {
                0.0
            } else if s_f == f64::NEG_INFINITY {
                1.0
            } else {
                1.0 / (1.0 + (s_f - s_t).exp())
            };
            *kernel.at_mut(x, x_true) += site_prob * p_true;
            *kernel.at_mut(x, x_false) += site_prob * (1.0 - p_true);
        }
    }
    Ok(kernel)
}

/// Lifted-MCMC kernel: one random-scan Gibbs step composed with one orbital
/// step that averages over every automorphism.
pub fn kernel_lifted(engine: &Engine, caps: &EvalCaps) -> Result<DenseKernel, EvalError> {
    let m = engine.model();
    let nv = m.num_vars;
    check_cap(nv, caps.kernel_vars)?;
    let size = 1usize << nv;
    let gibbs = kernel_gibbs(m, caps)?;
    let actions = variable_elements(engine, caps)?;
    let mut orbital = DenseKernel::zero(size);
    let weight = 1.0 / actions.len() as f64;
    for action in &actions {
        for x in 0..size as u64 {
            *orbital.at_mut(x as usize, permute_state(x, action) as usize) += weight;
        }
    }
    Ok(gibbs.matmul(&orbital))
}

/// Total variation distance: half the L1 distance.
pub fn tv(a: &DenseDistribution, b: &DenseDistribution) -> f64 {
    assert_eq!(a.len(), b.len());
    0.5 * a
        .probs
        .iter()
        .zip(&b.probs)
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

/// `d_TV(delta_start * K^t, target)` for `t = 0..=t_max`.
pub fn tv_curve(
    kernel: &DenseKernel,
    start: usize,
    target: &DenseDistribution,
    t_max: usize,
) -> Vec<(usize, f64)> {
    let mut dist = DenseDistribution::point_mass(kernel.len(), start);
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        out.push((t, tv(&dist, target)));
        if t < t_max {
            dist = kernel.step(&dist);
        }
    }
    out
}

/// Closed-form mixing bound `((N-1)/N)^t` for an N-orbit target.
pub fn mixing_upper_bound(n_orbits: u64, t: u32) -> f64 {
    assert!(n_orbits >= 1);
    if n_orbits == 1 {
        return 0.0;
    }
    ((n_orbits - 1) as f64 / n_orbits as f64).powi(t as i32)
}

/// Steps after which the bound drops below `eps`: `ceil(ln(1/eps) * N)`.
pub fn steps_for_epsilon(n_orbits: u64, eps: f64) -> u64 {
    assert!(eps > 0.0 && eps < 1.0);
    ((1.0 / eps).ln() * n_orbits as f64).ceil() as u64
}
