use itertools::Itertools;
use rand::Rng;

use crate::complex::{PartiteStructure, SimplicialComplex};
use crate::error::{Error, Result};
use crate::rng::SeedSplitter;

pub const DEFAULT_MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Complete { vertices: usize, n: usize },
    CompletePartite { sides: Vec<usize> },
    SingleSimplex { n: usize },
    /// Boundary of the (n+1)-simplex.
    SimplexBoundary { n: usize },
    RandomPure { vertices: usize, n: usize, p: f64, seed: u64, max_retries: usize },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<SimplicialComplex> {
        match self {
            GeneratorSpec::Complete { vertices, n } => complete_complex(*vertices, *n),
            GeneratorSpec::CompletePartite { sides } => complete_partite(sides).map(|(x, _)| x),
            GeneratorSpec::SingleSimplex { n } => single_simplex(*n),
            GeneratorSpec::SimplexBoundary { n } => simplex_boundary(*n),
            GeneratorSpec::RandomPure { vertices, n, p, seed, max_retries } => {
                random_pure_complex(*vertices, *n, *p, *seed, *max_retries)
            }
        }
    }
}

/// All (n+1)-subsets of {0..N-1}.
pub fn complete_complex(vertices: usize, n: usize) -> Result<SimplicialComplex> {
    if vertices < n + 1 {
        return Err(Error::InvalidArgument(format!("complete complex needs N >= {}, got {vertices}", n + 1)));
    }
    SimplicialComplex::from_top_simplices((0..vertices).combinations(n + 1))
}

pub fn single_simplex(n: usize) -> Result<SimplicialComplex> {
    complete_complex(n + 1, n)
}

/// n-dimensional boundary of the (n+1)-simplex; n = 2 is the tetrahedron boundary.
pub fn simplex_boundary(n: usize) -> Result<SimplicialComplex> {
    complete_complex(n + 2, n)
}

/// All transversals of consecutive vertex blocks of the given sizes.
pub fn complete_partite(side_sizes: &[usize]) -> Result<(SimplicialComplex, PartiteStructure)> {
    if side_sizes.is_empty() || side_sizes.contains(&0) {
        return Err(Error::InvalidArgument("every side needs at least one vertex".into()));
    }
    let mut next = 0;
    let sides: Vec<Vec<usize>> = side_sizes
        .iter()
        .map(|m| {
            let side = (next..next + m).collect();
            next += m;
            side
        })
        .collect();
    let x = SimplicialComplex::from_top_simplices(sides.iter().map(|s| s.iter().copied()).multi_cartesian_product())?;
    let p = PartiteStructure::new(&x, sides)?;
    Ok((x, p))
}

/// Keeps each (n+1)-subset with probability p, retrying until the complex is
/// connected with connected links.
pub fn random_pure_complex(vertices: usize, n: usize, p: f64, seed: u64, max_retries: usize) -> Result<SimplicialComplex> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("density must lie in (0, 1], got {p}")));
    }
    if vertices < n + 1 {
        return Err(Error::InvalidArgument(format!("random complex needs N >= {}, got {vertices}", n + 1)));
    }
    let seeds = SeedSplitter::new(seed);
    for attempt in 0..max_retries.max(1) {
        let mut rng = seeds.stream(attempt as u64);
        let tops: Vec<Vec<usize>> = (0..vertices).combinations(n + 1).filter(|_| rng.random::<f64>() < p).collect();
        if tops.is_empty() {
            continue;
        }
        let x = SimplicialComplex::from_top_simplices(tops)?;
        if x.is_one_skeleton_connected() && x.first_disconnected_link().is_none() {
            return Ok(x);
        }
    }
    Err(Error::RetriesExhausted(max_retries))
}
