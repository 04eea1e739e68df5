//! Exhaustive census of small simple 2-edge-connected graphs.
//!
//! Every 2-edge-connected graph has an ear decomposition starting from a
//! cycle, and adding an ear of length `l` multiplies the spanning tree
//! count by at least `l`. So growing cycles ear by ear while discarding
//! anything over the bound reaches every graph with at most `max_trees`
//! spanning trees, each through intermediates that are also under it.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::classify::{classify, PairingDecomposition};
use crate::graph::{canonical_form, cycle, emit_graph, spanning_tree_count, wedge, Multigraph};
use crate::jacobian::jacobian_form;
use crate::number_theory::factor_u64;

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("group of order {order} needs max_trees >= {order}, got {max_trees}")]
    BoundTooSmall { order: u128, max_trees: u64 },
    #[error("census only covers {census} spanning trees, {requested} requested")]
    CensusTooSmall { census: u64, requested: u64 },
    #[error("invariant factors must be positive")]
    ZeroFactor,
    #[error("group order overflows")]
    Overflow,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRecord {
    /// In canonical labeling.
    pub graph: Multigraph,
    pub tree_count: u64,
    pub invariant_factors: Vec<BigInt>,
    pub pairing_class: PairingDecomposition,
}

impl CensusRecord {
    /// `trees n factors class edges`, tab separated.
    pub fn tsv_line(&self) -> String {
        let factors: Vec<String> = self.invariant_factors.iter().map(ToString::to_string).collect();
        let edges = emit_graph(&self.graph).trim_end().replace('\n', ";");
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.tree_count,
            self.graph.vertex_count(),
            factors.join(","),
            self.pairing_class,
            edges
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub max_trees: u64,
    pub records: Vec<CensusRecord>,
}

impl Census {
    pub const HEADER: &'static str = "trees\tn\tfactors\tclass\tedges";

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.tsv_line());
            out.push('\n');
        }
        out
    }

    /// Writes the TSV through a temporary file in the same directory.
    pub fn write_atomic(&self, path: &Path) -> Result<(), AtlasError> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(self.to_tsv().as_bytes())?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

fn tree_count(g: &Multigraph) -> u64 {
    spanning_tree_count(g)
        .expect("ears keep the graph connected")
        .to_u64()
        .unwrap_or(u64::MAX)
}

/// All ways to attach one ear to `g` that stay simple and under the bound.
fn ears(g: &Multigraph, trees: u64, max_trees: u64) -> Vec<Multigraph> {
    let n = g.vertex_count();
    let max_len = max_trees / trees;
    let mut out = Vec::new();
    for u in 0..n {
        for v in u..n {
            let min_len = if u == v {
                3
            } else if g.multiplicity(u, v) > 0 {
                2
            } else {
                1
            };
            for len in min_len..=max_len {
                let fresh = len as usize - 1;
                let mut path = vec![u];
                path.extend(n..n + fresh);
                path.push(v);
                let edges = g
                    .edges()
                    .iter()
                    .map(|e| (e.u, e.v, 1))
                    .chain(path.windows(2).map(|w| (w[0], w[1], 1)));
                let h = Multigraph::from_edges(n + fresh, edges).expect("valid ear");
                if tree_count(&h) > max_trees {
                    break;
                }
                out.push(canonical_form(&h).graph);
            }
        }
    }
    out
}

/// One canonical representative per isomorphism class of simple
/// 2-edge-connected graphs with at most `max_trees` spanning trees, ordered
/// by tree count, vertex count, then edge list.
pub fn enumerate_2ec(max_trees: u64, jobs: usize) -> Vec<Multigraph> {
    let run = || {
        let mut seen: HashSet<Multigraph> = HashSet::new();
        let mut frontier: Vec<Multigraph> = (3..=max_trees.min(usize::MAX as u64) as usize)
            .map(|n| canonical_form(&cycle(n).expect("n >= 3")).graph)
            .collect();
        seen.extend(frontier.iter().cloned());
        while !frontier.is_empty() {
            let grown: BTreeSet<(usize, Multigraph)> = frontier
                .par_iter()
                .flat_map_iter(|g| ears(g, tree_count(g), max_trees))
                .map(|g| (g.edges().len(), g))
                .collect();
            frontier = grown
                .into_iter()
                .map(|(_, g)| g)
                .filter(|g| seen.insert(g.clone()))
                .collect();
        }
        let mut all: Vec<(u64, Multigraph)> = seen.into_iter().map(|g| (tree_count(&g), g)).collect();
        all.sort_by(|a, b| (a.0, a.1.vertex_count(), a.1.edges()).cmp(&(b.0, b.1.vertex_count(), b.1.edges())));
        all.into_iter().map(|(_, g)| g).collect()
    };
    with_jobs(jobs, run)
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}

/// Jacobians and pairing classes of everything [`enumerate_2ec`] finds.
pub fn census(max_trees: u64, jobs: usize) -> Census {
    let graphs = enumerate_2ec(max_trees, jobs);
    let records = with_jobs(jobs, || {
        graphs
            .into_par_iter()
            .map(|graph| {
                let form = jacobian_form(&graph).expect("connected");
                let pairing_class = classify(&form).expect("small orders factor");
                CensusRecord {
                    tree_count: tree_count(&graph),
                    invariant_factors: form.invariant_factors(),
                    pairing_class,
                    graph,
                }
            })
            .collect()
    });
    Census { max_trees, records }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Absent,
    /// `witness` is the wedge of census graphs whose Jacobians are `parts`.
    Present {
        witness: Multigraph,
        parts: Vec<Vec<u64>>,
    },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Absent => write!(f, "ABSENT"),
            Verdict::Present { .. } => write!(f, "PRESENT"),
        }
    }
}

/// Prime-power elementary divisors, sorted.
fn elementary_divisors(factors: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = factors
        .iter()
        .flat_map(|&d| factor_u64(d).into_iter().map(|(p, e)| p.pow(e)))
        .collect();
    out.sort_unstable();
    out
}

/// Whether a simple graph has Jacobian `⊕ Z/d_i`. Bridges contribute
/// nothing to the Jacobian and wedges add Jacobians, so it suffices to split
/// the elementary divisors into parts that each occur in the census.
pub fn check_absence(factors: &[u64], max_trees: u64, census: &Census) -> Result<Verdict, AtlasError> {
    if factors.contains(&0) {
        return Err(AtlasError::ZeroFactor);
    }
    let order = factors
        .iter()
        .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
        .ok_or(AtlasError::Overflow)?;
    if order > max_trees as u128 {
        return Err(AtlasError::BoundTooSmall { order, max_trees });
    }
    if census.max_trees < max_trees {
        return Err(AtlasError::CensusTooSmall {
            census: census.max_trees,
            requested: max_trees,
        });
    }
    let mut by_group: HashMap<Vec<u64>, &Multigraph> = HashMap::new();
    for r in &census.records {
        let fs: Vec<u64> = r.invariant_factors.iter().filter_map(ToPrimitive::to_u64).collect();
        by_group.entry(elementary_divisors(&fs)).or_insert(&r.graph);
    }
    let Some(parts) = cover(&elementary_divisors(factors), &by_group) else {
        return Ok(Verdict::Absent);
    };
    let mut witness = Multigraph::empty(1);
    for p in &parts {
        witness = wedge(&witness, by_group[p], 0, 0).expect("vertex 0 exists");
    }
    Ok(Verdict::Present { witness, parts })
}

/// Splits the multiset `rest` into parts present in `groups`.
fn cover(rest: &[u64], groups: &HashMap<Vec<u64>, &Multigraph>) -> Option<Vec<Vec<u64>>> {
    let Some((&first, others)) = rest.split_first() else {
        return Some(Vec::new());
    };
    let mut tried = HashSet::new();
    for mask in 0u64..1 << others.len() {
        let mut part = vec![first];
        let mut left = Vec::new();
        for (i, &x) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                part.push(x);
            } else {
                left.push(x);
            }
        }
        if !groups.contains_key(&part) || !tried.insert(part.clone()) {
            continue;
        }
        if let Some(mut tail) = cover(&left, groups) {
            tail.insert(0, part);
            return Some(tail);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_bounds() {
        assert_eq!(enumerate_2ec(3, 1), vec![canonical_form(&cycle(3).unwrap()).graph]);
        let five: Vec<usize> = enumerate_2ec(5, 1).iter().map(Multigraph::vertex_count).collect();
        assert_eq!(five, vec![3, 4, 5]);
    }

    #[test]
    fn census_at_four() {
        let c = census(4, 1);
        let factors: Vec<Vec<BigInt>> = c.records.iter().map(|r| r.invariant_factors.clone()).collect();
        assert_eq!(factors, vec![vec![BigInt::from(3)], vec![BigInt::from(4)]]);
        assert_eq!(
            c.to_tsv(),
            "trees\tn\tfactors\tclass\tedges\n3\t3\t3\t3^1:nonres\t3 3;0 1 1;0 2 1;1 2 1\n4\t4\t4\t2^2:B\t4 4;0 1 1;0 2 1;1 3 1;2 3 1\n"
        );
    }

    #[test]
    fn absence_examples() {
        let c = census(8, 2);
        assert!(c.records.iter().all(|r| r.invariant_factors != [BigInt::from(2), BigInt::from(4)]));
        for f in [&[2][..], &[2, 2], &[2, 4]] {
            assert_eq!(check_absence(f, 8, &c).unwrap(), Verdict::Absent, "{f:?}");
        }
        let Verdict::Present { witness, .. } = check_absence(&[8], 8, &c).unwrap() else {
            panic!("C8 has Jacobian Z/8");
        };
        assert_eq!(jacobian_form(&witness).unwrap().invariant_factors(), vec![BigInt::from(8)]);
        assert!(witness.is_simple());
        assert!(matches!(
            check_absence(&[2, 8], 8, &c),
            Err(AtlasError::BoundTooSmall { order: 16, .. })
        ));
    }

    #[test]
    fn parallel_census_matches_sequential() {
        assert_eq!(census(9, 1), census(9, 4));
    }
}
