//! Building a graph whose Jacobian is a prescribed group with pairing.
//!
//! Each block of the target is realized on its own and the pieces are
//! wedged together at vertex 0. The finished graph is always classified
//! again before it is returned.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::classify::{classify, Block, Letter, ParseDecompositionError, PairingDecomposition};
use crate::graph::{banana, complete, cycle, multicycle, subdivided_banana, wedge, GraphError, Multigraph, STuple};
use crate::jacobian::jacobian_form;
use crate::number_theory::{nonresidue_tuple, two_group_tuple, NumberTheoryError};

/// Largest graph the engine will build for a single block.
pub const MAX_BLOCK_VERTICES: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationSpec {
    pub decomposition: PairingDecomposition,
    /// Widens the prime search bound `q^2 < 4 k^2 p^r` to multiplier `k`.
    pub q_bound_multiplier: u64,
}

impl RealizationSpec {
    pub fn new(decomposition: PairingDecomposition) -> Self {
        RealizationSpec {
            decomposition,
            q_bound_multiplier: 1,
        }
    }

    pub fn with_q_bound_multiplier(mut self, k: u64) -> Self {
        self.q_bound_multiplier = k.max(1);
        self
    }
}

impl fmt::Display for RealizationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.decomposition.fmt(f)
    }
}

impl FromStr for RealizationSpec {
    type Err = ParseDecompositionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_spec(s)
    }
}

pub fn parse_spec(text: &str) -> Result<RealizationSpec, ParseDecompositionError> {
    Ok(RealizationSpec::new(text.parse()?))
}

/// Outcome of [`verify_realization`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub expected: PairingDecomposition,
    /// `None` if the graph could not be classified.
    pub found: Option<PairingDecomposition>,
}

impl Verification {
    pub fn is_match(&self) -> bool {
        self.found.as_ref() == Some(&self.expected)
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.found {
            Some(d) => write!(f, "expected {}, found {}", self.expected, d),
            None => write!(f, "expected {}, graph could not be classified", self.expected),
        }
    }
}

#[derive(Debug, Error)]
pub enum RealizeError {
    #[error(transparent)]
    NoWitness(#[from] NumberTheoryError),
    #[error("{block} is not realizable by any known construction: {reason}")]
    Unrealizable { block: Block, reason: &'static str },
    #[error("{block} would need a graph on {vertices} vertices")]
    TooLarge { block: Block, vertices: u64 },
    #[error("realized graph does not match: {0}")]
    Mismatch(Verification),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The graph together with the construction used for each block.
#[derive(Debug, Clone)]
pub struct Realization {
    pub spec: RealizationSpec,
    pub graph: Multigraph,
    pub constructions: Vec<(Block, String)>,
}

impl Realization {
    /// One `#` line naming the spec and the per-block constructions.
    pub fn comment(&self) -> String {
        let parts: Vec<String> = self
            .constructions
            .iter()
            .map(|(b, c)| format!("{b} <- {c}"))
            .collect();
        format!("# realizes {}; {}", self.spec, parts.join("; "))
    }
}

/// Classifies `Jac(g)` and compares with the target normal form.
pub fn verify_realization(g: &Multigraph, spec: &RealizationSpec) -> Verification {
    let found = jacobian_form(g).ok().and_then(|f| classify(&f).ok());
    Verification {
        expected: spec.decomposition.normalized(),
        found,
    }
}

/// Builds and verifies a realizing graph.
pub fn realize(spec: &RealizationSpec) -> Result<Realization, RealizeError> {
    let mut graph = Multigraph::empty(1);
    let mut constructions = Vec::new();
    for &block in spec.decomposition.blocks() {
        let (piece, how) = realize_block(block, spec.q_bound_multiplier)?;
        graph = wedge(&graph, &piece, 0, 0)?;
        constructions.push((block, how));
    }
    let check = verify_realization(&graph, spec);
    if !check.is_match() {
        return Err(RealizeError::Mismatch(check));
    }
    Ok(Realization {
        spec: spec.clone(),
        graph,
        constructions,
    })
}

fn guard(block: Block, vertices: u64) -> Result<(), RealizeError> {
    if vertices > MAX_BLOCK_VERTICES {
        return Err(RealizeError::TooLarge { block, vertices });
    }
    Ok(())
}

fn banana_vertices(s: &STuple) -> u64 {
    s.parts().iter().map(|&x| x - 1).sum::<u64>() + 2
}

fn prime_power(block: Block) -> Result<u64, RealizeError> {
    let (p, r) = (block.prime(), block.exponent());
    p.checked_pow(r)
        .ok_or_else(|| NumberTheoryError::Overflow(format!("{p}^{r}")).into())
}

fn realize_block(block: Block, multiplier: u64) -> Result<(Multigraph, String), RealizeError> {
    match block {
        Block::Odd { residue: true, .. } | Block::Two { letter: Letter::A, .. } => {
            let m = prime_power(block)?;
            Ok((banana(m)?, format!("banana({m})")))
        }
        Block::Two { letter: Letter::B, .. } => {
            let m = prime_power(block)?;
            guard(block, m)?;
            Ok((cycle(m as usize)?, format!("cycle({m})")))
        }
        Block::Odd { p, r, residue: false } => {
            let s = nonresidue_tuple(p, r, multiplier)?;
            guard(block, banana_vertices(&s))?;
            Ok((subdivided_banana(&s)?, format!("subdivided_banana{s}")))
        }
        Block::Two { r, letter } => {
            let s = two_group_tuple(r)?;
            let multi = multicycle(&s)?;
            if cached_letter((r, true), &multi)? == letter {
                return Ok((multi, format!("multicycle{s}")));
            }
            guard(block, banana_vertices(&s))?;
            let sub = subdivided_banana(&s)?;
            if cached_letter((r, false), &sub)? == letter {
                return Ok((sub, format!("subdivided_banana{s}")));
            }
            Err(RealizeError::Unrealizable {
                block,
                reason: "neither the multicycle nor the subdivided banana carries this class",
            })
        }
        Block::F { r: 2 } => Ok((complete(4)?, "complete(4)".into())),
        Block::E { .. } => Err(RealizeError::Unrealizable {
            block,
            reason: "no graph is known to carry an E block, and powers of E:2^1 provably do not occur",
        }),
        Block::F { .. } => Err(RealizeError::Unrealizable {
            block,
            reason: "the only known graph with an F block is K4, which carries F:2^2",
        }),
    }
}

/// Letter carried by a graph whose Jacobian is cyclic of order `2^r`,
/// remembered per `(r, is_multicycle)` so each candidate is classified once.
fn cached_letter(key: (u32, bool), g: &Multigraph) -> Result<Letter, RealizeError> {
    type LetterCache = Mutex<HashMap<(u32, bool), Option<Letter>>>;
    static CACHE: OnceLock<LetterCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&hit) = cache.lock().unwrap().get(&key) {
        return hit.ok_or(GraphError::InvalidParameter("candidate is not cyclic".into()).into());
    }
    let letter = jacobian_form(g)
        .ok()
        .and_then(|f| classify(&f).ok())
        .and_then(|d| match d.blocks() {
            [Block::Two { letter, .. }] => Some(*letter),
            _ => None,
        });
    cache.lock().unwrap().insert(key, letter);
    letter.ok_or(GraphError::InvalidParameter("candidate is not cyclic".into()).into())
}
