use std::collections::{BTreeSet, HashMap};

use super::Simplex;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
struct Level {
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    /// ids of (k-1)-faces
    faces: Vec<Vec<usize>>,
    /// ids of (k+1)-cofaces
    cofaces: Vec<Vec<usize>>,
}

/// Finite pure simplicial complex with every face indexed.
///
/// Level `k` (for `-1 <= k <= n`) holds the k-simplices in lexicographic
/// order, so a cochain on level `k` is a plain vector indexed the same way.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    dim: usize,
    levels: Vec<Level>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.tops() == other.tops()
    }
}

impl Eq for SimplicialComplex {}

fn slot(k: isize) -> usize {
    (k + 1) as usize
}

impl SimplicialComplex {
    /// Downward closure of the given top simplices.
    ///
    /// All sets must have the same size `n + 1`; duplicates are rejected.
    pub fn from_top_simplices<I, S>(tops: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        let mut top_set = BTreeSet::new();
        let mut size = None;
        for (index, raw) in tops.into_iter().enumerate() {
            let s = Simplex::new(raw.as_ref().to_vec())?;
            match size {
                None => size = Some(s.len()),
                Some(expected) if expected != s.len() => {
                    return Err(Error::InconsistentSimplexSize { index, expected, found: s.len() })
                }
                _ => {}
            }
            if s.is_empty() {
                return Err(Error::EmptyComplex);
            }
            if !top_set.insert(s.clone()) {
                return Err(Error::DuplicateSimplex(s));
            }
        }
        let size = size.ok_or(Error::EmptyComplex)?;
        let dim = size - 1;

        let mut per_level: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); size + 1];
        for top in &top_set {
            for face in top.all_faces() {
                per_level[face.len()].insert(face);
            }
        }

        let mut levels: Vec<Level> = per_level
            .into_iter()
            .map(|set| {
                let simplices: Vec<Simplex> = set.into_iter().collect();
                let index = simplices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
                let count = simplices.len();
                Level { simplices, index, faces: vec![Vec::new(); count], cofaces: vec![Vec::new(); count] }
            })
            .collect();

        for l in 1..levels.len() {
            let (lower, upper) = levels.split_at_mut(l);
            let lower = &mut lower[l - 1];
            let upper = &mut upper[0];
            for (i, s) in upper.simplices.iter().enumerate() {
                for facet in s.facets() {
                    let j = lower.index[&facet];
                    upper.faces[i].push(j);
                    lower.cofaces[j].push(i);
                }
            }
        }
        for level in &mut levels {
            for c in &mut level.cofaces {
                c.sort_unstable();
            }
            for f in &mut level.faces {
                f.sort_unstable();
            }
        }

        Ok(SimplicialComplex { dim, levels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn check_level(&self, k: isize) -> Result<()> {
        if k < -1 || k > self.dim as isize {
            return Err(Error::LevelOutOfRange { k, min: -1, max: self.dim as isize });
        }
        Ok(())
    }

    /// The k-simplices in index order. Panics if `k` is out of `-1..=n`.
    pub fn simplices(&self, k: isize) -> &[Simplex] {
        &self.levels[slot(k)].simplices
    }

    pub fn count(&self, k: isize) -> usize {
        self.levels.get(slot(k).min(self.levels.len())).map_or(0, |l| l.simplices.len())
    }

    /// Top simplices.
    pub fn tops(&self) -> &[Simplex] {
        self.simplices(self.dim as isize)
    }

    pub fn simplex(&self, k: isize, i: usize) -> &Simplex {
        &self.levels[slot(k)].simplices[i]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.levels.get(slot(s.dim()))?.index.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Indices (in level k+1) of the cofaces of the i-th k-simplex.
    pub fn cofaces(&self, k: isize, i: usize) -> &[usize] {
        &self.levels[slot(k)].cofaces[i]
    }

    /// Indices (in level k-1) of the facets of the i-th k-simplex.
    pub fn faces(&self, k: isize, i: usize) -> &[usize] {
        &self.levels[slot(k)].faces[i]
    }

    /// Vertex ids in index order.
    pub fn vertices(&self) -> Vec<usize> {
        self.simplices(0).iter().map(|s| s.vertices()[0]).collect()
    }

    /// Number of top simplices containing each simplex of level `k`.
    pub fn top_degree(&self, k: isize) -> Vec<usize> {
        let mut counts = vec![0usize; self.count(k)];
        for top in self.tops() {
            for face in top.all_faces().filter(|f| f.dim() == k) {
                counts[self.index_of(&face).expect("face of a top simplex")] += 1;
            }
        }
        counts
    }

    /// Whether every link of dimension >= 1 (including the complex itself)
    /// has a connected one-skeleton. Returns the first offender otherwise.
    pub fn first_disconnected_link(&self) -> Option<Simplex> {
        for k in -1..=(self.dim as isize - 2) {
            for tau in self.simplices(k) {
                let (link, _) = self.link_with_map(tau).expect("tau is in the complex");
                if !link.is_one_skeleton_connected() {
                    return Some(tau.clone());
                }
            }
        }
        None
    }

    /// Union-find over edges.
    pub fn is_one_skeleton_connected(&self) -> bool {
        let nv = self.count(0);
        if nv <= 1 {
            return true;
        }
        if self.dim == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.count(1) {
            let f = self.faces(1, e);
            let (a, b) = (find(&mut parent, f[0]), find(&mut parent, f[1]));
            if a != b {
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (1..nv).all(|v| find(&mut parent, v) == root)
    }

    /// Link of `tau` together with, for each link level `l`, the index in
    /// level `l + |tau|` of `tau ∪ η` for every η of the link.
    pub(crate) fn link_with_map(&self, tau: &Simplex) -> Result<(SimplicialComplex, Vec<Vec<usize>>)> {
        let k = tau.dim();
        let t = self.index_of(tau).ok_or_else(|| Error::UnknownSimplex(tau.clone()))?;
        if k >= self.dim as isize {
            return Err(Error::LevelOutOfRange { k, min: -1, max: self.dim as isize - 1 });
        }
        let link = if tau.is_empty() {
            self.clone()
        } else {
            let tops: Vec<Vec<usize>> = self
                .tops_containing(k, t)
                .into_iter()
                .map(|top| self.tops()[top].difference(tau).into())
                .collect();
            SimplicialComplex::from_top_simplices(tops)?
        };
        let map = (-1..=link.dim as isize)
            .map(|l| {
                link.simplices(l)
                    .iter()
                    .map(|eta| self.index_of(&tau.union(eta)).expect("link simplex lifts"))
                    .collect()
            })
            .collect();
        Ok((link, map))
    }

    /// Link of `tau`: simplices η disjoint from τ with τ ∪ η in the complex.
    pub fn link(&self, tau: &Simplex) -> Result<SimplicialComplex> {
        self.link_with_map(tau).map(|(l, _)| l)
    }

    /// Indices of top simplices containing the i-th k-simplex.
    pub fn tops_containing(&self, k: isize, i: usize) -> Vec<usize> {
        let mut current: BTreeSet<usize> = BTreeSet::from([i]);
        let mut l = k;
        while l < self.dim as isize {
            current = current.iter().flat_map(|&j| self.cofaces(l, j).iter().copied()).collect();
            l += 1;
        }
        current.into_iter().collect()
    }
}
