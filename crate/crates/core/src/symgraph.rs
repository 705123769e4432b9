//! Colored-graph encodings of models and assignments.
//!
//! The induced colored graph has one vertex per variable (all sharing one
//! color) and one vertex per clause/factor, where two factor vertices share a
//! color iff they are identical factors. Color automorphisms of this graph
//! are exactly the variable symmetries of the distribution, which is what
//! lets graph canonization drive lifted inference.
//!
//! An assignment is encoded on top of the induced graph by recoloring the
//! variable vertices according to their truth value: two assignments lie in
//! the same orbit iff their encoded graphs are color-isomorphic.

use std::collections::HashMap;

use crate::bitset::BitMatrix;
use crate::model::{Assignment, ClauseWeight, Model};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Variable,
    Factor,
    Port,
}

/// An undirected vertex-colored graph without self-loops.
///
/// Color ids are small integers; for induced graphs they are dense starting
/// at 0, and assignment encodings may additionally use the one fresh
/// true-color id `num_colors - 1` (leaving it unused when no variable is
/// true). Downstream code treats color ids as labels and never assumes every
/// id is occupied.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredGraph {
    n: usize,
    adj: BitMatrix,
    neighbors: Vec<Vec<u32>>,
    pub colors: Vec<u32>,
    pub kind: Vec<VertexKind>,
    pub num_colors: u32,
    edge_count: usize,
}

impl ColoredGraph {
    pub fn new(n: usize, colors: Vec<u32>, kind: Vec<VertexKind>) -> Self {
        assert_eq!(colors.len(), n);
        assert_eq!(kind.len(), n);
        let num_colors = colors.iter().max().map_or(0, |&c| c + 1);
        ColoredGraph {
            n,
            adj: BitMatrix::new(n),
            neighbors: vec![Vec::new(); n],
            colors,
            kind,
            num_colors,
            edge_count: 0,
        }
    }

    /// Convenience constructor for tests and small graphs.
    pub fn from_edges(n: usize, colors: Vec<u32>, edges: &[(usize, usize)]) -> Self {
        let kind = vec![VertexKind::Variable; n];
        let mut g = ColoredGraph::new(n, colors, kind);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loops are not allowed");
        if self.adj.get(u, v) {
            return;
        }
        self.adj.set(u, v);
        self.adj.set(v, u);
        self.neighbors[u].push(v as u32);
        self.neighbors[v].push(u as u32);
        self.edge_count += 1;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj.get(u, v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Checks that `images` is a color- and adjacency-preserving bijection.
    pub fn is_automorphism(&self, images: &[u32]) -> bool {
        if images.len() != self.n {
            return false;
        }
        let mut seen = vec![false; self.n];
        for &img in images {
            if img as usize >= self.n || seen[img as usize] {
                return false;
            }
            seen[img as usize] = true;
        }
        for v in 0..self.n {
            if self.colors[v] != self.colors[images[v] as usize] {
                return false;
            }
            for &u in &self.neighbors[v] {
                if !self.adjacent(images[v] as usize, images[u as usize] as usize) {
                    return false;
                }
            }
        }
        true
    }

    /// Relabels vertices: vertex `v` of the result is `perm_inv[v]` of self,
    /// i.e. `images[v]` gives the new name of old vertex `v`.
    pub fn relabeled(&self, images: &[u32]) -> ColoredGraph {
        assert_eq!(images.len(), self.n);
        let mut colors = vec![0; self.n];
        let mut kind = vec![VertexKind::Variable; self.n];
        for v in 0..self.n {
            colors[images[v] as usize] = self.colors[v];
            kind[images[v] as usize] = self.kind[v];
        }
        let mut g = ColoredGraph::new(self.n, colors, kind);
        g.num_colors = self.num_colors;
        for v in 0..self.n {
            for &u in &self.neighbors[v] {
                if (u as usize) < v {
                    continue;
                }
                g.add_edge(images[v] as usize, images[u as usize] as usize);
            }
        }
        g
    }

    /// DOT dump with one fill color per color class, for debugging.
    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 10] = [
            "white", "gray70", "red", "lightblue", "palegreen", "orange", "plum", "yellow",
            "cyan", "pink",
        ];
        let mut out = String::from("graph g {\n  node [style=filled];\n");
        for v in 0..self.n {
            let shape = match self.kind[v] {
                VertexKind::Variable => "circle",
                VertexKind::Factor => "box",
                VertexKind::Port => "diamond",
            };
            let fill = PALETTE[self.colors[v] as usize % PALETTE.len()];
            out.push_str(&format!(
                "  v{v} [shape={shape}, fillcolor={fill}, label=\"{v}:{}\"];\n",
                self.colors[v]
            ));
        }
        for v in 0..self.n {
            for &u in &self.neighbors[v] {
                if (u as usize) > v {
                    out.push_str(&format!("  v{v} -- v{u};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Maps model entities to vertices of the induced graph.
#[derive(Clone, Debug)]
pub struct VertexMap {
    pub num_vars: usize,
    /// Vertex index of factor `i` (clauses first, then symmetric factors).
    pub factor_vertices: Vec<usize>,
}

impl VertexMap {
    #[inline]
    pub fn var_vertex(&self, var: usize) -> usize {
        debug_assert!(var < self.num_vars);
        var
    }
}

/// Color key that makes two factor vertices identical.
#[derive(Clone, PartialEq, Eq, Hash)]
enum FactorKey {
    Clause {
        weight: Option<u64>, // None marks hard, Some holds the weight's bits
        pos: usize,
        neg: usize,
    },
    Table {
        arity: usize,
        bits: Vec<u64>,
    },
}

/// Builds the colored graph induced by a model.
///
/// Vertices are laid out variables first (by id), then one vertex per clause
/// and per symmetric factor in declaration order, then port vertices for
/// mixed-sign clauses. Clause colors compare weights bit-exactly; callers
/// that want weight-tying must emit identical numerals.
pub fn induce(model: &Model) -> (ColoredGraph, VertexMap) {
    let nv = model.num_vars;
    let n_factors = model.clauses.len() + model.factors.len();
    let ports: usize = model
        .clauses
        .iter()
        .filter(|c| !c.uniform_sign())
        .map(|c| c.literals.len())
        .sum();
    let n = nv + n_factors + ports;

    let mut colors = vec![0u32; n];
    let mut kind = vec![VertexKind::Variable; n];
    let mut next_color = 1u32;
    let mut color_of_key: HashMap<FactorKey, u32> = HashMap::new();

    let mut factor_vertices = Vec::with_capacity(n_factors);
    for (i, clause) in model.clauses.iter().enumerate() {
        let v = nv + i;
        factor_vertices.push(v);
        kind[v] = VertexKind::Factor;
        let key = FactorKey::Clause {
            weight: match clause.weight {
                ClauseWeight::Hard => None,
                ClauseWeight::Soft(w) => Some(w.to_bits()),
            },
            pos: clause.literals.iter().filter(|l| l.positive).count(),
            neg: clause.literals.iter().filter(|l| !l.positive).count(),
        };
        colors[v] = *color_of_key.entry(key).or_insert_with(|| {
            let c = next_color;
            next_color += 1;
            c
        });
    }
    for (i, factor) in model.factors.iter().enumerate() {
        let v = nv + model.clauses.len() + i;
        factor_vertices.push(v);
        kind[v] = VertexKind::Factor;
        let key = FactorKey::Table {
            arity: factor.scope.len(),
            bits: factor.count_table.iter().map(|w| w.to_bits()).collect(),
        };
        colors[v] = *color_of_key.entry(key).or_insert_with(|| {
            let c = next_color;
            next_color += 1;
            c
        });
    }

    // Port colors are shared across the whole graph, one per literal sign.
    let mixed = model.clauses.iter().any(|c| !c.uniform_sign());
    let (pos_port_color, neg_port_color) = if mixed {
        let c = next_color;
        next_color += 2;
        (c, c + 1)
    } else {
        (0, 0)
    };

    let mut g = {
        let mut port_cursor = nv + n_factors;
        for clause in model.clauses.iter().filter(|c| !c.uniform_sign()) {
            for lit in &clause.literals {
                colors[port_cursor] = if lit.positive {
                    pos_port_color
                } else {
                    neg_port_color
                };
                kind[port_cursor] = VertexKind::Port;
                port_cursor += 1;
            }
        }
        let mut g = ColoredGraph::new(n, colors, kind);
        g.num_colors = next_color;
        g
    };

    let mut port_cursor = nv + n_factors;
    for (i, clause) in model.clauses.iter().enumerate() {
        let fv = nv + i;
        if clause.uniform_sign() {
            for lit in &clause.literals {
                g.add_edge(fv, lit.var.index());
            }
        } else {
            for lit in &clause.literals {
                g.add_edge(fv, port_cursor);
                g.add_edge(port_cursor, lit.var.index());
                port_cursor += 1;
            }
        }
    }
    for (i, factor) in model.factors.iter().enumerate() {
        let fv = nv + model.clauses.len() + i;
        for var in &factor.scope {
            g.add_edge(fv, var.index());
        }
    }

    (
        g,
        VertexMap {
            num_vars: nv,
            factor_vertices,
        },
    )
}

/// Recolors the variable vertices of an induced graph by truth value.
///
/// False variables keep the shared variable color 0; true variables receive
/// the fresh color `num_colors` of the base graph. Everything else is
/// unchanged, so the all-false encoding coincides with the induced graph.
pub fn encode_assignment(induced: &ColoredGraph, x: &Assignment) -> ColoredGraph {
    let nv = induced
        .kind
        .iter()
        .take_while(|k| **k == VertexKind::Variable)
        .count();
    assert_eq!(x.len(), nv, "assignment length mismatch");
    let mut g = induced.clone();
    let true_color = induced.num_colors;
    for v in 0..nv {
        g.colors[v] = if x.get(v) { true_color } else { 0 };
    }
    g.num_colors = true_color + 1;
    g
}

/// The color id given to true variable vertices by [`encode_assignment`].
pub fn true_color_of(induced: &ColoredGraph) -> u32 {
    induced.num_colors
}
