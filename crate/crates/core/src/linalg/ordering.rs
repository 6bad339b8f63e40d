//! Fill-reducing orderings for the sparse Cholesky factorization.
//!
//! Nested dissection with level-structure separators: a breadth-first search
//! from a pseudo-peripheral vertex splits the graph into levels, a small
//! level near the middle becomes the separator, and both sides are ordered
//! recursively before it. On the grid-like graphs produced by finite-element
//! assembly this gives the usual `O(n log n)` fill in 2D.

use super::CsrMatrix;

/// Subgraphs at or below this size are ordered by reverse Cuthill-McKee.
const LEAF_SIZE: usize = 64;

/// Symmetric adjacency structure without self loops.
struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    fn from_pattern(a: &CsrMatrix) -> Self {
        let n = a.nrows();
        let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * a.nnz());
        for i in 0..n {
            for (j, _) in a.row(i) {
                if i != j {
                    t.push((i, j, 0.0));
                    t.push((j, i, 0.0));
                }
            }
        }
        let sym = CsrMatrix::from_triplets(n, n, &t);
        Self { ptr: sym.row_ptr().to_vec(), adj: sym.col_idx().to_vec() }
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }

    fn n(&self) -> usize {
        self.ptr.len() - 1
    }
}

/// Returns `perm` with `perm[new] = old`.
pub fn nested_dissection(a: &CsrMatrix) -> Vec<usize> {
    let g = Graph::from_pattern(a);
    let n = g.n();
    let mut state = Dissection {
        g: &g,
        region: vec![0; n],
        level: vec![usize::MAX; n],
        next_label: 1,
        order: Vec::with_capacity(n),
    };
    // label 0 marks the whole graph
    let all: Vec<usize> = (0..n).collect();
    state.dissect(all, 0);
    debug_assert_eq!(state.order.len(), n);
    state.order
}

pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

struct Dissection<'g> {
    g: &'g Graph,
    region: Vec<usize>,
    level: Vec<usize>,
    next_label: usize,
    order: Vec<usize>,
}

impl Dissection<'_> {
    fn fresh_label(&mut self) -> usize {
        let l = self.next_label;
        self.next_label += 1;
        l
    }

    fn relabel(&mut self, nodes: &[usize]) -> usize {
        let l = self.fresh_label();
        for &v in nodes {
            self.region[v] = l;
        }
        l
    }

    /// BFS restricted to `label`; returns the level sets.
    fn levels_from(&mut self, root: usize, label: usize) -> Vec<Vec<usize>> {
        let mut levels = vec![vec![root]];
        self.level[root] = 0;
        let mut touched = vec![root];
        loop {
            let mut next = Vec::new();
            let d = levels.len();
            for &v in levels.last().unwrap() {
                for &w in self.g.neighbors(v) {
                    if self.region[w] == label && self.level[w] == usize::MAX {
                        self.level[w] = d;
                        touched.push(w);
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        for v in touched {
            self.level[v] = usize::MAX;
        }
        levels
    }

    fn restricted_degree(&self, v: usize, label: usize) -> usize {
        self.g.neighbors(v).iter().filter(|&&w| self.region[w] == label).count()
    }

    fn pseudo_peripheral(&mut self, start: usize, label: usize) -> (usize, Vec<Vec<usize>>) {
        let mut root = start;
        let mut levels = self.levels_from(root, label);
        loop {
            let last = levels.last().unwrap();
            let candidate = *last.iter().min_by_key(|&&v| (self.restricted_degree(v, label), v)).unwrap();
            let trial = self.levels_from(candidate, label);
            if trial.len() > levels.len() {
                root = candidate;
                levels = trial;
            } else {
                return (root, levels);
            }
        }
    }

    fn dissect(&mut self, nodes: Vec<usize>, label: usize) {
        if nodes.is_empty() {
            return;
        }
        let start = *nodes.iter().min().unwrap();
        let (_, levels) = self.pseudo_peripheral(start, label);
        let reached: usize = levels.iter().map(Vec::len).sum();

        if reached < nodes.len() {
            // disconnected: split off the component just found
            let comp: Vec<usize> = levels.concat();
            let rest: Vec<usize> = {
                let l = self.relabel(&comp);
                nodes.iter().copied().filter(|&v| self.region[v] != l).collect()
            };
            let comp_label = self.region[comp[0]];
            let rest_label = self.relabel(&rest);
            self.dissect(comp, comp_label);
            self.dissect(rest, rest_label);
            return;
        }

        if nodes.len() <= LEAF_SIZE || levels.len() < 3 {
            self.cuthill_mckee(levels);
            return;
        }

        // separator: the smallest level in the middle half, weighted towards balance
        let total = nodes.len();
        let mut cum = 0usize;
        let mut best: Option<(usize, f64)> = None;
        for (k, lv) in levels.iter().enumerate() {
            let below = cum;
            cum += lv.len();
            if k == 0 || k + 1 == levels.len() {
                continue;
            }
            let above = total - cum;
            let lo = below.min(above) as f64;
            if lo < 0.25 * total as f64 {
                continue;
            }
            let score = lv.len() as f64 * (1.0 + (below as f64 - above as f64).abs() / total as f64);
            if best.is_none_or(|(_, s)| score < s) {
                best = Some((k, score));
            }
        }
        let sep_level = match best {
            Some((k, _)) => k,
            None => {
                // fall back to the level splitting the vertex count in half
                let mut cum = 0;
                let mut pick = levels.len() / 2;
                for (k, lv) in levels.iter().enumerate() {
                    cum += lv.len();
                    if 2 * cum >= total {
                        pick = k.clamp(1, levels.len() - 2);
                        break;
                    }
                }
                pick
            }
        };

        // Trim the level: a node that touches only one side can join it.
        let mut first: Vec<usize> = levels[..sep_level].concat();
        let mut second: Vec<usize> = levels[sep_level + 1..].concat();
        let l2 = self.relabel(&second);
        let (sep, loose): (Vec<usize>, Vec<usize>) =
            levels[sep_level].iter().partition(|&&v| self.g.neighbors(v).iter().any(|&w| self.region[w] == l2));
        first.extend(loose);
        let l1 = self.relabel(&first);
        let (sep, loose): (Vec<usize>, Vec<usize>) =
            sep.into_iter().partition(|&v| self.g.neighbors(v).iter().any(|&w| self.region[w] == l1));
        for &v in &loose {
            self.region[v] = l2;
        }
        second.extend(loose);
        self.relabel(&sep);
        self.dissect(first, l1);
        self.dissect(second, l2);
        self.order.extend(sep);
    }

    fn cuthill_mckee(&mut self, levels: Vec<Vec<usize>>) {
        let mut seq: Vec<usize> = Vec::new();
        for lv in levels {
            seq.extend(lv);
        }
        seq.reverse();
        self.order.extend(seq);
    }
}
