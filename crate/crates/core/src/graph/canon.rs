//! Canonical labeling by colour refinement and individualization.
//!
//! Every leaf of the search tree gives a relabeled graph; the least edge
//! list wins. Automorphisms found along the way prune sibling branches.

use super::{Edge, Multigraph};

/// A graph in canonical labeling together with the labeling used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub graph: Multigraph,
    /// `labeling[v]` is the canonical label of input vertex `v`.
    pub labeling: Vec<usize>,
}

/// Two graphs are isomorphic iff their canonical graphs are equal.
pub fn canonical_form(g: &Multigraph) -> CanonicalForm {
    let n = g.vertex_count();
    if n == 0 {
        return CanonicalForm {
            graph: g.clone(),
            labeling: Vec::new(),
        };
    }
    let adj = g.adjacency();
    let mut search = Search {
        g,
        adj: &adj,
        best: None,
        automorphisms: Vec::new(),
    };
    let colours = refine(&adj, vec![0; n]);
    search.descend(colours, &mut Vec::new());
    let (edges, labeling) = search.best.expect("at least one leaf");
    let graph = Multigraph::from_edges(n, edges.iter().map(|e| (e.u, e.v, e.mult)))
        .expect("relabeling is valid");
    CanonicalForm { graph, labeling }
}

struct Search<'a> {
    g: &'a Multigraph,
    adj: &'a [Vec<(usize, u64)>],
    best: Option<(Vec<Edge>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn descend(&mut self, colours: Vec<usize>, path: &mut Vec<usize>) {
        let n = colours.len();
        let mut sizes = vec![0usize; n];
        for &c in &colours {
            sizes[c] += 1;
        }
        let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
            self.leaf(&colours);
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for v in (0..n).filter(|&v| colours[v] == target) {
            if !tried.is_empty() && self.same_orbit(path, &tried, v) {
                continue;
            }
            tried.push(v);
            // Split the target cell into {v} and the rest, keeping the
            // relative order of all other cells.
            let split: Vec<usize> = colours
                .iter()
                .enumerate()
                .map(|(w, &c)| 2 * c + usize::from(c == target && w != v))
                .collect();
            path.push(v);
            self.descend(refine(self.adj, split), path);
            path.pop();
        }
    }

    fn leaf(&mut self, labeling: &[usize]) {
        let mut edges: Vec<Edge> = self
            .g
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = (labeling[e.u], labeling[e.v]);
                Edge {
                    u: a.min(b),
                    v: a.max(b),
                    mult: e.mult,
                }
            })
            .collect();
        edges.sort_unstable();
        match &self.best {
            Some((best, best_lab)) if *best == edges => {
                // best_lab^-1 ∘ labeling is an automorphism.
                let mut inv = vec![0; labeling.len()];
                for (v, &l) in best_lab.iter().enumerate() {
                    inv[l] = v;
                }
                let gamma: Vec<usize> = labeling.iter().map(|&l| inv[l]).collect();
                if gamma.iter().enumerate().any(|(i, &x)| i != x) {
                    self.automorphisms.push(gamma);
                }
            }
            Some((best, _)) if *best <= edges => {}
            _ => self.best = Some((edges, labeling.to_vec())),
        }
    }

    /// Whether `v` lies in the orbit of an already tried vertex under the
    /// known automorphisms that fix `path` pointwise.
    fn same_orbit(&self, path: &[usize], tried: &[usize], v: usize) -> bool {
        let n = self.g.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for gamma in &self.automorphisms {
            if path.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            any = true;
            for (x, &y) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == rv)
    }
}

/// Equitable refinement of an ordered colouring. Output colours are dense
/// `0..k` and depend only on the isomorphism type of (graph, colouring).
fn refine(adj: &[Vec<(usize, u64)>], mut colours: Vec<usize>) -> Vec<usize> {
    let n = colours.len();
    colours = densify(&colours);
    let mut cells = count_cells(&colours);
    loop {
        let keys: Vec<(usize, Vec<(usize, u64)>)> = (0..n)
            .map(|v| {
                let mut sig: Vec<(usize, u64)> =
                    adj[v].iter().map(|&(w, m)| (colours[w], m)).collect();
                sig.sort_unstable();
                (colours[v], sig)
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut next = vec![0; n];
        let mut c = 0;
        for i in 0..n {
            if i > 0 && keys[order[i]] != keys[order[i - 1]] {
                c += 1;
            }
            next[order[i]] = c;
        }
        let new_cells = c + 1;
        colours = next;
        if new_cells == cells {
            return colours;
        }
        cells = new_cells;
    }
}

fn densify(colours: &[usize]) -> Vec<usize> {
    let mut values = colours.to_vec();
    values.sort_unstable();
    values.dedup();
    colours
        .iter()
        .map(|c| values.binary_search(c).expect("present"))
        .collect()
}

fn count_cells(colours: &[usize]) -> usize {
    colours.iter().max().map_or(0, |&m| m + 1)
}
