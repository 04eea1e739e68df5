//! Tree counts, connectivity statistics and block decomposition.

use num_bigint::BigInt;

use super::{GraphError, Multigraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    /// First Betti number `e - n + 1`, edges counted with multiplicity.
    pub genus: u64,
    /// Largest valence, counted with multiplicity.
    pub max_valence: u64,
    /// No cut vertex.
    pub biconnected: bool,
    /// No bridge.
    pub two_edge_connected: bool,
}

/// Number of spanning trees, as the determinant of a reduced Laplacian.
pub fn spanning_tree_count(g: &Multigraph) -> Result<BigInt, GraphError> {
    g.require_connected()?;
    Ok(g.reduced_laplacian(0).determinant())
}

pub fn stats(g: &Multigraph) -> Result<GraphStats, GraphError> {
    g.require_connected()?;
    let dfs = Lowpoint::run(g);
    Ok(GraphStats {
        genus: g.total_multiplicity() + 1 - g.vertex_count() as u64,
        max_valence: g.valences().into_iter().max().unwrap_or(0),
        biconnected: !dfs.has_cut_vertex,
        two_edge_connected: !dfs.has_bridge,
    })
}

/// A biconnected component, with its own local labeling.
#[derive(Debug, Clone)]
pub struct Block {
    /// `vertices[i]` is the vertex of the parent graph labeled `i` here.
    pub vertices: Vec<usize>,
    pub graph: Multigraph,
}

impl Multigraph {
    /// Biconnected components. A bridge is its own (tree) block; parallel
    /// edges always share a block. Isolated vertices yield no block.
    pub fn blocks(&self) -> Vec<Block> {
        Lowpoint::run(self)
            .blocks
            .into_iter()
            .map(|edge_ids| {
                let mut vertices: Vec<usize> = edge_ids
                    .iter()
                    .flat_map(|&i| [self.edges[i].u, self.edges[i].v])
                    .collect();
                vertices.sort_unstable();
                vertices.dedup();
                let mut local = std::collections::HashMap::with_capacity(vertices.len());
                for (i, &v) in vertices.iter().enumerate() {
                    local.insert(v, i);
                }
                let graph = Multigraph::from_edges(
                    vertices.len(),
                    edge_ids.iter().map(|&i| {
                        let e = self.edges[i];
                        (local[&e.u], local[&e.v], e.mult)
                    }),
                )
                .expect("block of a valid graph is valid");
                Block { vertices, graph }
            })
            .collect()
    }

    /// Vertices whose removal disconnects their component.
    pub fn cut_vertices(&self) -> Vec<usize> {
        let dfs = Lowpoint::run(self);
        (0..self.vertex_count).filter(|&v| dfs.is_cut[v]).collect()
    }
}

/// Iterative Hopcroft-Tarjan lowpoint search over the simple underlying
/// graph (edge records, not individual parallel edges).
struct Lowpoint {
    has_cut_vertex: bool,
    has_bridge: bool,
    is_cut: Vec<bool>,
    blocks: Vec<Vec<usize>>,
}

impl Lowpoint {
    fn run(g: &Multigraph) -> Self {
        let n = g.vertex_count;
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, e) in g.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        const UNSEEN: usize = usize::MAX;
        let mut disc = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut is_cut = vec![false; n];
        let mut has_bridge = false;
        let mut blocks = Vec::new();
        let mut edge_stack: Vec<usize> = Vec::new();
        let mut time = 0;

        struct Frame {
            v: usize,
            parent_edge: Option<usize>,
            next: usize,
        }

        for root in 0..n {
            if disc[root] != UNSEEN {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            let mut stack = vec![Frame {
                v: root,
                parent_edge: None,
                next: 0,
            }];
            while let Some(frame) = stack.last_mut() {
                let v = frame.v;
                if frame.next < adj[v].len() {
                    let (w, eid) = adj[v][frame.next];
                    frame.next += 1;
                    if Some(eid) == frame.parent_edge {
                        continue;
                    }
                    if disc[w] == UNSEEN {
                        edge_stack.push(eid);
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        if v == root {
                            root_children += 1;
                        }
                        stack.push(Frame {
                            v: w,
                            parent_edge: Some(eid),
                            next: 0,
                        });
                    } else if disc[w] < disc[v] {
                        edge_stack.push(eid);
                        low[v] = low[v].min(disc[w]);
                    }
                    continue;
                }
                let done = stack.pop().expect("frame exists");
                let Some(parent) = stack.last() else {
                    continue;
                };
                let p = parent.v;
                low[p] = low[p].min(low[v]);
                if low[v] >= disc[p] {
                    if p != root {
                        is_cut[p] = true;
                    }
                    let pe = done.parent_edge.expect("non-root frame has a parent edge");
                    let mut comp = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        comp.push(e);
                        if e == pe {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    blocks.push(comp);
                }
                if low[v] > disc[p] && g.edges[done.parent_edge.unwrap()].mult == 1 {
                    has_bridge = true;
                }
            }
            if root_children > 1 {
                is_cut[root] = true;
            }
        }
        Lowpoint {
            has_cut_vertex: is_cut.iter().any(|&c| c),
            has_bridge,
            is_cut,
            blocks,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::construct::*;
    use super::*;

    fn brute_force_tree_count(g: &Multigraph) -> u64 {
        // Expand parallel edges and try every (n-1)-subset.
        let mut edges = Vec::new();
        for e in g.edges() {
            for _ in 0..e.mult {
                edges.push((e.u, e.v));
            }
        }
        let n = g.vertex_count();
        let mut count = 0;
        for mask in 0u32..(1 << edges.len()) {
            if mask.count_ones() as usize != n - 1 {
                continue;
            }
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                p[x] = r;
                r
            }
            let mut ok = true;
            for (i, &(u, v)) in edges.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                    if a == b {
                        ok = false;
                        break;
                    }
                    parent[a] = b;
                }
            }
            count += ok as u64;
        }
        count
    }

    #[test]
    fn tree_counts() {
        assert_eq!(spanning_tree_count(&cycle(4).unwrap()).unwrap(), 4.into());
        let b = subdivided_banana(&STuple::new(vec![4, 2, 3]).unwrap()).unwrap();
        assert_eq!(spanning_tree_count(&b).unwrap(), 26.into());
        assert_eq!(brute_force_tree_count(&b), 26);
        let k4 = complete(4).unwrap();
        assert_eq!(spanning_tree_count(&k4).unwrap(), 16.into());
        assert_eq!(brute_force_tree_count(&k4), 16);
        let m = multicycle(&STuple::new(vec![1, 3, 4, 2]).unwrap()).unwrap();
        assert_eq!(
            spanning_tree_count(&m).unwrap(),
            BigInt::from(brute_force_tree_count(&m))
        );
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = Multigraph::from_edges(3, [(0, 1, 1)]).unwrap();
        assert_eq!(spanning_tree_count(&g), Err(GraphError::Disconnected));
        assert_eq!(stats(&g), Err(GraphError::Disconnected));
    }

    #[test]
    fn stats_examples() {
        let s = stats(&banana(5).unwrap()).unwrap();
        assert_eq!((s.genus, s.max_valence, s.biconnected), (4, 5, true));
        let s = stats(&cycle(6).unwrap()).unwrap();
        assert_eq!((s.genus, s.max_valence, s.biconnected), (1, 2, true));
        let c3 = cycle(3).unwrap();
        let w = wedge(&c3, &c3, 0, 0).unwrap();
        let s = stats(&w).unwrap();
        assert!(!s.biconnected);
        assert!(s.two_edge_connected);
        let path = Multigraph::from_edges(3, [(0, 1, 1), (1, 2, 2)]).unwrap();
        let s = stats(&path).unwrap();
        assert!(!s.two_edge_connected);
        assert!(!s.biconnected);
    }

    #[test]
    fn blocks_of_a_wedge_with_pendant() {
        let c3 = cycle(3).unwrap();
        let c4 = cycle(4).unwrap();
        let w = wedge(&c3, &c4, 1, 0).unwrap();
        let g = wedge(&w, &banana(1).unwrap(), 5, 0).unwrap();
        let mut sizes: Vec<usize> = g.blocks().iter().map(|b| b.graph.vertex_count()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3, 4]);
        assert_eq!(g.cut_vertices(), vec![1, 5]);
    }

    #[test]
    fn deep_paths_do_not_overflow_the_stack() {
        let s = STuple::new(vec![1, 300_000]).unwrap();
        let g = subdivided_banana(&s).unwrap();
        let st = stats(&g).unwrap();
        assert!(st.biconnected);
        assert_eq!(g.blocks().len(), 1);
    }
}
