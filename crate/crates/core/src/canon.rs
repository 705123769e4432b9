//! Canonical labeling and automorphism discovery for colored graphs.
//!
//! The search is a textbook individualization-refinement tree: refine the
//! ordered partition to its coarsest equitable refinement, pick the first
//! smallest non-singleton cell, branch on individualizing each of its
//! members, and recurse. Discrete leaves yield candidate labelings; the
//! certificate is the lexicographic minimum of the relabeled byte encodings
//! over all leaves. Two leaves with equal bytes witness an automorphism, and
//! discovered automorphisms prune sibling branches (and trigger a jump back
//! to the common ancestor of the two leaf paths). Pruning never changes the
//! certificate, only how much of the tree is walked; it can be disabled for
//! differential testing.
//!
//! Worst-case behavior is exponential, as for any canonizer of this family;
//! the graphs built by this crate stay small and highly structured.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::group::Perm;
use crate::model::{Assignment, Model};
use crate::symgraph::{self, ColoredGraph};

/// Canonical byte-string form of a colored graph.
///
/// Layout: vertex count as 8 big-endian bytes, then one 4-byte big-endian
/// color per canonical position, then the upper-triangular adjacency bits
/// under the canonical labeling, packed row-major MSB-first. Equality of
/// certificates is color-isomorphism of the underlying graphs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Certificate(Vec<u8>);

impl Certificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn num_vertices(&self) -> usize {
        u64::from_be_bytes(self.0[..8].try_into().unwrap()) as usize
    }
}

impl std::fmt::Debug for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Certificate({} vertices, {} bytes)", self.num_vertices(), self.0.len())
    }
}

/// An ordered partition of the vertex set; cell order is significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub cells: Vec<Vec<u32>>,
}

impl Partition {
    /// The unit partition grouped by vertex color, cells in ascending color
    /// order.
    pub fn from_colors(g: &ColoredGraph) -> Partition {
        let mut by_color: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
        for v in 0..g.len() {
            by_color.entry(g.colors[v]).or_default().push(v as u32);
        }
        Partition {
            cells: by_color.into_values().collect(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 1)
    }
}

/// Result of canonizing a colored graph.
pub struct AutResult {
    /// Generators of the color automorphism group (possibly redundant, never
    /// including the identity; empty for rigid graphs).
    pub generators: Vec<Perm>,
    pub certificate: Certificate,
    /// Maps each vertex to its position in the canonical labeling.
    pub canonical_labeling: Perm,
}

#[derive(Clone, Copy, Debug)]
pub struct CanonConfig {
    /// Disable only for differential testing; the certificate must not
    /// change.
    pub prune_automorphisms: bool,
}

impl Default for CanonConfig {
    fn default() -> Self {
        CanonConfig {
            prune_automorphisms: true,
        }
    }
}

// ---------------------------------------------------------------------------
// Ordered partition with contiguous-range cells, nauty style.
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct IrState {
    /// Vertices in partition order.
    lab: Vec<u32>,
    /// Inverse of `lab`.
    pos: Vec<u32>,
    /// Start offset of the cell containing each vertex.
    cell_start: Vec<u32>,
    /// Cell length indexed by start offset (0 where no cell starts).
    cell_len: Vec<u32>,
    num_cells: usize,
}

impl IrState {
    fn from_partition(n: usize, partition: &Partition) -> IrState {
        let mut lab = Vec::with_capacity(n);
        let mut cell_start = vec![0u32; n];
        let mut cell_len = vec![0u32; n];
        for cell in &partition.cells {
            let start = lab.len() as u32;
            cell_len[start as usize] = cell.len() as u32;
            for &v in cell {
                cell_start[v as usize] = start;
                lab.push(v);
            }
        }
        assert_eq!(lab.len(), n, "partition must cover every vertex exactly once");
        let mut pos = vec![0u32; n];
        for (i, &v) in lab.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        IrState {
            lab,
            pos,
            cell_start,
            cell_len,
            num_cells: partition.cells.len(),
        }
    }

    fn to_partition(&self) -> Partition {
        let mut cells = Vec::with_capacity(self.num_cells);
        let n = self.lab.len();
        let mut s = 0usize;
        while s < n {
            let len = self.cell_len[s] as usize;
            cells.push(self.lab[s..s + len].to_vec());
            s += len;
        }
        Partition { cells }
    }

    fn is_discrete(&self) -> bool {
        self.num_cells == self.lab.len()
    }

    /// First smallest non-singleton cell, as (start, len).
    fn target_cell(&self) -> Option<(usize, usize)> {
        let n = self.lab.len();
        let mut best: Option<(usize, usize)> = None;
        let mut s = 0usize;
        while s < n {
            let len = self.cell_len[s] as usize;
            if len > 1 && best.is_none_or(|(_, blen)| len < blen) {
                best = Some((s, len));
                if len == 2 {
                    break;
                }
            }
            s += len;
        }
        best
    }

    /// Moves `v` to the front of its cell as a new singleton cell.
    fn individualize(&mut self, v: u32) {
        let start = self.cell_start[v as usize] as usize;
        let len = self.cell_len[start] as usize;
        debug_assert!(len > 1);
        let vp = self.pos[v as usize] as usize;
        let first = self.lab[start];
        self.lab.swap(start, vp);
        self.pos[first as usize] = vp as u32;
        self.pos[v as usize] = start as u32;
        self.cell_len[start] = 1;
        self.cell_len[start + 1] = (len - 1) as u32;
        for i in start + 1..start + len {
            self.cell_start[self.lab[i] as usize] = (start + 1) as u32;
        }
        self.num_cells += 1;
    }
}

/// Scratch buffers shared across refinement calls within one search.
struct RefineScratch {
    cnt: Vec<u32>,
    cnt_stamp: Vec<u32>,
    cell_stamp: Vec<u32>,
    stamp: u32,
}

impl RefineScratch {
    fn new(n: usize) -> Self {
        RefineScratch {
            cnt: vec![0; n],
            cnt_stamp: vec![0; n],
            cell_stamp: vec![0; n],
            stamp: 0,
        }
    }
}

/// Refines `state` to the coarsest equitable partition, driven by a queue of
/// splitter vertex sets. Fragments of every split are ordered by ascending
/// neighbor count, which keeps the output independent of vertex labels.
fn refine_with_queue(
    g: &ColoredGraph,
    state: &mut IrState,
    queue: &mut VecDeque<Vec<u32>>,
    scratch: &mut RefineScratch,
) {
    let mut touched: Vec<u32> = Vec::new();
    let mut members: Vec<(u32, u32)> = Vec::new();
    while let Some(splitter) = queue.pop_front() {
        if state.is_discrete() {
            queue.clear();
            return;
        }
        scratch.stamp += 1;
        let stamp = scratch.stamp;
        touched.clear();
        for &s in &splitter {
            for &u in g.neighbors(s as usize) {
                let u = u as usize;
                if scratch.cnt_stamp[u] != stamp {
                    scratch.cnt_stamp[u] = stamp;
                    scratch.cnt[u] = 0;
                }
                scratch.cnt[u] += 1;
                let cs = state.cell_start[u];
                if scratch.cell_stamp[cs as usize] != stamp {
                    scratch.cell_stamp[cs as usize] = stamp;
                    touched.push(cs);
                }
            }
        }
        touched.sort_unstable();
        for &cs in &touched {
            let start = cs as usize;
            let len = state.cell_len[start] as usize;
            if len <= 1 {
                continue;
            }
            members.clear();
            let mut uniform = true;
            let mut first_cnt = None;
            for i in start..start + len {
                let v = state.lab[i];
                let c = if scratch.cnt_stamp[v as usize] == stamp {
                    scratch.cnt[v as usize]
                } else {
                    0
                };
                match first_cnt {
                    None => first_cnt = Some(c),
                    Some(fc) if fc != c => uniform = false,
                    _ => {}
                }
                members.push((c, v));
            }
            if uniform {
                continue;
            }
            members.sort_unstable();
            // Write fragments back in count order and enqueue each. Interior
            // offsets of the old cell carry cell_len 0 already, so only the
            // fragment starts need new lengths.
            let mut i = start;
            let mut frag_begin = start;
            let mut frag_cnt = members[0].0;
            for (mi, &(c, v)) in members.iter().enumerate() {
                if c != frag_cnt {
                    state.cell_len[frag_begin] = (i - frag_begin) as u32;
                    queue.push_back(state.lab[frag_begin..i].to_vec());
                    state.num_cells += 1;
                    frag_begin = i;
                    frag_cnt = c;
                }
                state.lab[i] = v;
                state.pos[v as usize] = i as u32;
                state.cell_start[v as usize] = frag_begin as u32;
                i += 1;
                if mi + 1 == members.len() {
                    state.cell_len[frag_begin] = (i - frag_begin) as u32;
                    queue.push_back(state.lab[frag_begin..i].to_vec());
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Leaf encoding
// ---------------------------------------------------------------------------

/// Byte encoding of the graph relabeled by `images` (vertex -> position).
fn relabeled_bytes(g: &ColoredGraph, images: &[u32], inv: &mut [u32]) -> Vec<u8> {
    let n = g.len();
    for (v, &p) in images.iter().enumerate() {
        inv[p as usize] = v as u32;
    }
    let adj_bits = n * n.saturating_sub(1) / 2;
    let mut bytes = vec![0u8; 8 + 4 * n + adj_bits.div_ceil(8)];
    bytes[..8].copy_from_slice(&(n as u64).to_be_bytes());
    for i in 0..n {
        let color = g.colors[inv[i] as usize];
        bytes[8 + 4 * i..8 + 4 * i + 4].copy_from_slice(&color.to_be_bytes());
    }
    let base = 8 + 4 * n;
    // bit index of pair (i, j), i < j: i*(2n-i-1)/2 + (j-i-1)
    for v in 0..n {
        let i = images[v] as usize;
        let row_off = i * (2 * n - i - 1) / 2;
        for &u in g.neighbors(v) {
            let j = images[u as usize] as usize;
            if j > i {
                let bit = row_off + (j - i - 1);
                bytes[base + bit / 8] |= 0x80 >> (bit % 8);
            }
        }
    }
    bytes
}

// ---------------------------------------------------------------------------
// The search
// ---------------------------------------------------------------------------

struct Searcher<'g> {
    g: &'g ColoredGraph,
    prune: bool,
    generators: Vec<Perm>,
    /// Leaf bytes -> (labeling, individualization path).
    leaves: HashMap<Vec<u8>, (Vec<u32>, Vec<u32>)>,
    best: Option<(Vec<u8>, Vec<u32>)>,
    path: Vec<u32>,
    scratch: RefineScratch,
    inv_buf: Vec<u32>,
}

/// Sentinel return meaning "no backjump requested".
const NO_JUMP: usize = usize::MAX;

impl<'g> Searcher<'g> {
    fn run(mut self, root: IrState) -> AutResult {
        let n = self.g.len();
        self.search(root, 0);
        let (bytes, labeling) = self.best.expect("search produced no leaf");
        debug_assert!({
            let mut inv = vec![0u32; n];
            relabeled_bytes(self.g, &labeling, &mut inv) == bytes
        });
        AutResult {
            generators: self.generators,
            certificate: Certificate(bytes),
            canonical_labeling: Perm::from_images(labeling).expect("labeling is a bijection"),
        }
    }

    fn search(&mut self, state: IrState, depth: usize) -> usize {
        if state.is_discrete() {
            return self.handle_leaf(&state);
        }
        let (tstart, tlen) = state.target_cell().expect("non-discrete state has a target");
        let mut branch: Vec<u32> = state.lab[tstart..tstart + tlen].to_vec();
        branch.sort_unstable();

        let mut explored: Vec<u32> = Vec::new();
        let mut orbit_of: Vec<u32> = Vec::new();
        let mut orbit_gen_count = usize::MAX;
        for &v in &branch {
            if self.prune && !explored.is_empty() {
                if orbit_gen_count != self.generators.len() {
                    orbit_of = self.path_fixing_orbits();
                    orbit_gen_count = self.generators.len();
                }
                if explored
                    .iter()
                    .any(|&u| orbit_of[u as usize] == orbit_of[v as usize])
                {
                    continue;
                }
            }
            explored.push(v);
            let mut child = state.clone();
            child.individualize(v);
            let mut queue = VecDeque::from([vec![v]]);
            refine_with_queue(self.g, &mut child, &mut queue, &mut self.scratch);
            self.path.push(v);
            let jump = self.search(child, depth + 1);
            self.path.pop();
            if jump < depth {
                return jump;
            }
        }
        NO_JUMP
    }

    fn handle_leaf(&mut self, state: &IrState) -> usize {
        let n = self.g.len();
        let mut labeling = vec![0u32; n];
        for (i, &v) in state.lab.iter().enumerate() {
            labeling[v as usize] = i as u32;
        }
        let bytes = relabeled_bytes(self.g, &labeling, &mut self.inv_buf);
        match self.leaves.entry(bytes) {
            Entry::Occupied(entry) => {
                let (prev_labeling, prev_path) = entry.get();
                // Equal bytes mean both labelings send the graph to the same
                // labeled form; their difference is an automorphism.
                let prev_inv = Perm::from_images(prev_labeling.clone()).unwrap().inverse();
                let auto: Vec<u32> = labeling
                    .iter()
                    .map(|&p| prev_inv.apply(p as usize) as u32)
                    .collect();
                let cpl = self
                    .path
                    .iter()
                    .zip(prev_path)
                    .take_while(|(a, b)| a == b)
                    .count();
                let auto = Perm::from_images(auto).unwrap();
                if !auto.is_identity() {
                    debug_assert!(self.g.is_automorphism(auto.images()));
                    self.generators.push(auto);
                }
                if self.prune {
                    cpl
                } else {
                    NO_JUMP
                }
            }
            Entry::Vacant(entry) => {
                let bytes = entry.key().clone();
                entry.insert((labeling.clone(), self.path.clone()));
                if self.best.as_ref().is_none_or(|(b, _)| bytes < *b) {
                    self.best = Some((bytes, labeling));
                }
                NO_JUMP
            }
        }
    }

    /// Orbit representative per vertex under the discovered automorphisms
    /// that fix every vertex on the current path.
    fn path_fixing_orbits(&self) -> Vec<u32> {
        let n = self.g.len();
        let mut parent: Vec<u32> = (0..n as u32).collect();
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
        for gen in &self.generators {
            if self.path.iter().any(|&p| gen.apply(p as usize) != p as usize) {
                continue;
            }
            for v in 0..n {
                let u = gen.apply(v) as u32;
                let (rv, ru) = (find(&mut parent, v as u32), find(&mut parent, u));
                if rv != ru {
                    parent[rv.max(ru) as usize] = rv.min(ru);
                }
            }
        }
        (0..n as u32).map(|v| find(&mut parent, v)).collect()
    }
}

/// Coarsest equitable refinement of `p`: every vertex in a cell has the same
/// number of neighbors in every cell. Cell order of the result is a
/// deterministic function of the input.
pub fn refine(g: &ColoredGraph, p: &Partition) -> Partition {
    let mut state = IrState::from_partition(g.len(), p);
    let mut queue: VecDeque<Vec<u32>> = p.cells.iter().cloned().collect();
    let mut scratch = RefineScratch::new(g.len());
    refine_with_queue(g, &mut state, &mut queue, &mut scratch);
    state.to_partition()
}

pub fn canonical_form(g: &ColoredGraph) -> AutResult {
    canonical_form_with(g, &CanonConfig::default())
}

pub fn canonical_form_with(g: &ColoredGraph, cfg: &CanonConfig) -> AutResult {
    let n = g.len();
    if n == 0 {
        return AutResult {
            generators: Vec::new(),
            certificate: Certificate(0u64.to_be_bytes().to_vec()),
            canonical_labeling: Perm::identity(0),
        };
    }
    let initial = Partition::from_colors(g);
    let mut root = IrState::from_partition(n, &initial);
    let mut queue: VecDeque<Vec<u32>> = initial.cells.iter().cloned().collect();
    let mut scratch = RefineScratch::new(n);
    refine_with_queue(g, &mut root, &mut queue, &mut scratch);
    let searcher = Searcher {
        g,
        prune: cfg.prune_automorphisms,
        generators: Vec::new(),
        leaves: HashMap::new(),
        best: None,
        path: Vec::new(),
        scratch,
        inv_buf: vec![0u32; n],
    };
    searcher.run(root)
}

/// Pulls the canonical labeling of an assignment encoding back to a
/// representative orbit member, returning it with the witnessing
/// automorphism `rho` of the induced graph (so `rho . x` is the
/// representative).
///
/// The canonical form of the encoded graph is constant across the orbit;
/// coarsening its colors back to the induced palette gives a relabeled copy
/// of the induced graph, and canonizing that copy yields a deterministic
/// isomorphism onto the induced graph itself. Chaining the three labelings
/// (`encoded`, the coarsened copy's, and the inverse of the induced
/// graph's) produces an automorphism of the induced graph that maps `x`
/// onto the same representative for every member of the orbit.
pub fn induced_representative(
    induced: &ColoredGraph,
    induced_labeling: &Perm,
    x: &Assignment,
    encoded: &AutResult,
) -> (Assignment, Perm) {
    let coarse = induced.relabeled(encoded.canonical_labeling.images());
    let coarse_labeling = canonical_form(&coarse).canonical_labeling;
    let rho = induced_labeling
        .inverse()
        .compose(&coarse_labeling)
        .compose(&encoded.canonical_labeling);
    debug_assert!(induced.is_automorphism(rho.images()));
    let representative = x.permuted(|v| rho.apply(v));
    (representative, rho)
}

/// Canonical representative of the orbit of `x` under the model's
/// symmetries. Idempotent, constant exactly on orbits, and the output is
/// itself a member of the orbit of `x`.
pub fn canonical_assignment(model: &Model, x: &Assignment) -> Assignment {
    let (graph, _map) = symgraph::induce(model);
    let induced_labeling = canonical_form(&graph).canonical_labeling;
    let encoded = canonical_form(&symgraph::encode_assignment(&graph, x));
    induced_representative(&graph, &induced_labeling, x, &encoded).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::gen_pigeonhole;
    use crate::symgraph::{encode_assignment, induce};
    use num_bigint::BigUint;

    /// Brute-force count of color automorphisms by backtracking over
    /// color-preserving bijections. Test oracle only.
    pub(crate) fn brute_force_aut_count(g: &ColoredGraph) -> u64 {
        fn extend(g: &ColoredGraph, images: &mut Vec<Option<u32>>, used: &mut Vec<bool>, v: usize) -> u64 {
            let n = g.len();
            if v == n {
                return 1;
            }
            let mut total = 0;
            for w in 0..n {
                if used[w] || g.colors[v] != g.colors[w] || g.degree(v) != g.degree(w) {
                    continue;
                }
                let ok = (0..v).all(|u| {
                    g.adjacent(u, v) == g.adjacent(images[u].unwrap() as usize, w)
                });
                if ok {
                    images[v] = Some(w as u32);
                    used[w] = true;
                    total += extend(g, images, used, v + 1);
                    used[w] = false;
                    images[v] = None;
                }
            }
            total
        }
        let n = g.len();
        extend(g, &mut vec![None; n], &mut vec![false; n], 0)
    }

    #[test]
    fn refine_path_graph() {
        let g = ColoredGraph::from_edges(3, vec![0, 0, 0], &[(0, 1), (1, 2)]);
        let p = refine(&g, &Partition::from_colors(&g));
        assert_eq!(p.cells, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn refine_complete_graph_is_stable() {
        let edges: Vec<(usize, usize)> = (0..4)
            .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
            .collect();
        let g = ColoredGraph::from_edges(4, vec![0; 4], &edges);
        let p = refine(&g, &Partition::from_colors(&g));
        assert_eq!(p.cells, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn refine_keeps_pigeonhole_variables_together() {
        let m = gen_pigeonhole(3, 2, 2.0, true).unwrap();
        let (g, _) = induce(&m);
        let p = refine(&g, &Partition::from_colors(&g));
        assert_eq!(p.cells[0], vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn canonical_form_edge_monochrome() {
        let g = ColoredGraph::from_edges(2, vec![0, 0], &[(0, 1)]);
        let result = canonical_form(&g);
        let group = crate::group::schreier_sims(2, &result.generators);
        assert_eq!(group.order(), BigUint::from(2u32));
        assert!(result
            .generators
            .iter()
            .any(|g| g.images() == [1, 0]));
    }

    #[test]
    fn canonical_form_edge_two_colors_is_rigid() {
        let g = ColoredGraph::from_edges(2, vec![0, 1], &[(0, 1)]);
        let result = canonical_form(&g);
        assert!(result.generators.is_empty());
    }

    #[test]
    fn pigeonhole_automorphism_group_order() {
        let m = gen_pigeonhole(3, 2, 2.0, true).unwrap();
        let (g, _) = induce(&m);
        let result = canonical_form(&g);
        let group = crate::group::schreier_sims(g.len(), &result.generators);
        assert_eq!(group.order(), BigUint::from(12u32));
        assert_eq!(brute_force_aut_count(&g), 12);
        for gen in &result.generators {
            assert!(g.is_automorphism(gen.images()));
        }
    }

    #[test]
    fn canonical_assignment_merges_orbit_members() {
        let m = gen_pigeonhole(3, 2, 2.0, true).unwrap();
        let a = Assignment::from_bit_str("000 111").unwrap();
        let b = Assignment::from_bit_str("111 000").unwrap();
        assert_eq!(canonical_assignment(&m, &a), canonical_assignment(&m, &b));

        let zero = Assignment::all_false(6);
        assert_eq!(canonical_assignment(&m, &zero), zero);

        let singles: Vec<Assignment> = (0..6)
            .map(|i| {
                let mut x = Assignment::all_false(6);
                x.set(i, true);
                x
            })
            .collect();
        let reps: std::collections::HashSet<String> = singles
            .iter()
            .map(|x| canonical_assignment(&m, x).bit_string())
            .collect();
        assert_eq!(reps.len(), 1);
        assert_eq!(
            canonical_assignment(&m, &singles[0]).count_true(),
            1
        );
    }

    #[test]
    fn canonical_assignment_idempotent() {
        let m = gen_pigeonhole(3, 2, 2.0, true).unwrap();
        for idx in 0..64u64 {
            let x = Assignment::from_index(6, idx);
            let rep = canonical_assignment(&m, &x);
            assert_eq!(canonical_assignment(&m, &rep), rep);
            assert_eq!(rep.count_true(), x.count_true());
        }
    }

    #[test]
    fn certificates_invariant_under_relabeling() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m = gen_pigeonhole(3, 2, 2.0, true).unwrap();
        let (g, _) = induce(&m);
        for idx in [0u64, 1, 9, 27, 63] {
            let enc = encode_assignment(&g, &Assignment::from_index(6, idx));
            let base = canonical_form(&enc);
            for _ in 0..5 {
                let mut images: Vec<u32> = (0..enc.len() as u32).collect();
                images.shuffle(&mut rng);
                let permuted = enc.relabeled(&images);
                assert_eq!(canonical_form(&permuted).certificate, base.certificate);
            }
        }
    }

    #[test]
    fn pruning_does_not_change_certificates() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=7);
            let mut g = ColoredGraph::from_edges(
                n,
                (0..n).map(|_| rng.gen_range(0..3u32)).collect(),
                &[],
            );
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen::<f64>() < 0.4 {
                        g.add_edge(a, b);
                    }
                }
            }
            let pruned = canonical_form_with(&g, &CanonConfig { prune_automorphisms: true });
            let full = canonical_form_with(&g, &CanonConfig { prune_automorphisms: false });
            assert_eq!(pruned.certificate, full.certificate);
            let order_pruned =
                crate::group::schreier_sims(n, &pruned.generators).order();
            let order_full = crate::group::schreier_sims(n, &full.generators).order();
            assert_eq!(order_pruned, order_full);
            assert_eq!(order_pruned, BigUint::from(brute_force_aut_count(&g)));
        }
    }

    #[test]
    fn certificate_total_order_is_consistent() {
        let a = Certificate(vec![0, 0, 0, 0, 0, 0, 0, 1, 9]);
        let b = Certificate(vec![0, 0, 0, 0, 0, 0, 0, 1, 10]);
        assert!(a < b);
        assert_eq!(a.num_vertices(), 1);
    }
}
