use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{SimplicialComplex, WeightFunction};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Partition of the vertices into sides S_0..S_n such that every top simplex
/// has exactly one vertex in each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartiteStructure {
    sides: Vec<Vec<usize>>,
    side_of: HashMap<usize, usize>,
}

impl PartiteStructure {
    /// Validates an explicit partition against the complex.
    pub fn new(x: &SimplicialComplex, sides: Vec<Vec<usize>>) -> Result<Self> {
        if sides.len() != x.dim() + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} sides, got {}",
                x.dim() + 1,
                sides.len()
            )));
        }
        let mut side_of = HashMap::new();
        for (i, side) in sides.iter().enumerate() {
            for &v in side {
                if side_of.insert(v, i).is_some() {
                    return Err(Error::OverlappingSets(v));
                }
            }
        }
        if x.vertices().iter().any(|v| !side_of.contains_key(v)) || side_of.len() != x.count(0) {
            return Err(Error::InvalidArgument("sides must partition the vertex set".into()));
        }
        let p = PartiteStructure { sides: sides.into_iter().map(sorted).collect(), side_of };
        if !p.is_valid_for(x) {
            return Err(Error::NotPartite);
        }
        Ok(p)
    }

    pub fn sides(&self) -> &[Vec<usize>] {
        &self.sides
    }

    pub fn side(&self, i: usize) -> &[usize] {
        &self.sides[i]
    }

    pub fn side_of(&self, v: usize) -> Option<usize> {
        self.side_of.get(&v).copied()
    }

    pub fn num_sides(&self) -> usize {
        self.sides.len()
    }

    /// Sorted side labels met by a simplex.
    pub fn type_of(&self, vertices: &[usize]) -> Vec<usize> {
        let mut t: Vec<usize> = vertices.iter().filter_map(|v| self.side_of(*v)).collect();
        t.sort_unstable();
        t
    }

    fn is_valid_for(&self, x: &SimplicialComplex) -> bool {
        x.tops().iter().all(|s| {
            let t = self.type_of(s.vertices());
            t.len() == self.sides.len() && t.iter().enumerate().all(|(i, &v)| i == v)
        })
    }

    /// Restriction to a link: the nonempty sides among the link's vertices,
    /// in increasing side order.
    pub fn restrict(&self, link: &SimplicialComplex) -> Option<PartiteStructure> {
        let mut by_side: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in link.vertices() {
            by_side.entry(self.side_of(v)?).or_default().push(v);
        }
        PartiteStructure::new(link, by_side.into_values().collect()).ok()
    }

    /// Relabels sides so that set `i` lies in side `i` whenever possible.
    /// Empty sets take the remaining sides in order. Fails if some set meets
    /// two sides or two sets need the same side.
    pub fn aligned_to(&self, sets: &[Vec<usize>]) -> Result<PartiteStructure> {
        if sets.len() != self.sides.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} sets, got {}",
                self.sides.len(),
                sets.len()
            )));
        }
        let mut perm: Vec<Option<usize>> = vec![None; sets.len()];
        let mut used = vec![false; sets.len()];
        for (i, set) in sets.iter().enumerate() {
            let mut sides = set.iter().map(|v| self.side_of(*v));
            if let Some(first) = sides.next() {
                let first = first.ok_or(Error::SetOutsideSide { set: i })?;
                if sides.any(|s| s != Some(first)) || used[first] {
                    return Err(Error::SetOutsideSide { set: i });
                }
                used[first] = true;
                perm[i] = Some(first);
            }
        }
        let mut free = (0..sets.len()).filter(|s| !used[*s]);
        let order: Vec<usize> = perm.into_iter().map(|p| p.unwrap_or_else(|| free.next().unwrap())).collect();
        let sides: Vec<Vec<usize>> = order.iter().map(|&s| self.sides[s].clone()).collect();
        let side_of = sides.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |&v| (v, i))).collect();
        Ok(PartiteStructure { sides, side_of })
    }

    /// Indicator vector (over level 0) of side `i`.
    pub fn side_indicator<T: Real>(&self, x: &SimplicialComplex, i: usize) -> Vec<T> {
        x.vertices()
            .iter()
            .map(|&v| if self.side_of(v) == Some(i) { T::one() } else { T::zero() })
            .collect()
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Recovers the sides by propagating labels across shared codimension-one
/// faces, starting from the first top simplex. Returns `Ok(None)` if the
/// forced labelling is inconsistent and an error if the top simplices are
/// not connected through codimension-one faces (the labelling would not be
/// determined).
pub fn detect_partite(x: &SimplicialComplex) -> Result<Option<PartiteStructure>> {
    let n = x.dim() as isize;
    let tops = x.tops();
    let mut label: HashMap<usize, usize> = HashMap::new();
    let mut seen = vec![false; tops.len()];
    for (i, &v) in tops[0].vertices().iter().enumerate() {
        label.insert(v, i);
    }
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        for &facet in x.faces(n, t) {
            for &nb in x.cofaces(n - 1, facet) {
                if seen[nb] {
                    continue;
                }
                seen[nb] = true;
                let shared = x.simplex(n - 1, facet);
                let mut missing = vec![true; x.dim() + 1];
                for v in shared.vertices() {
                    missing[label[v]] = false;
                }
                let side = missing.iter().position(|m| *m).expect("one side is free");
                let new_vertex = tops[nb].difference(shared).vertices()[0];
                match label.get(&new_vertex) {
                    Some(&s) if s != side => return Ok(None),
                    Some(_) => {}
                    None => {
                        label.insert(new_vertex, side);
                    }
                }
                queue.push_back(nb);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::AmbiguousPartition);
    }
    let mut sides = vec![Vec::new(); x.dim() + 1];
    for v in x.vertices() {
        sides[label[&v]].push(v);
    }
    Ok(PartiteStructure::new(x, sides).ok())
}

/// X(U_0,...,U_k): indices of the k-simplices (k = sets.len() - 1) with exactly
/// one vertex in each set. The sets must be pairwise disjoint.
pub fn simplices_spanning(x: &SimplicialComplex, sets: &[Vec<usize>]) -> Result<Vec<usize>> {
    let owner = set_membership(sets)?;
    let k = sets.len() as isize - 1;
    if k > x.dim() as isize {
        return Err(Error::LevelOutOfRange { k, min: -1, max: x.dim() as isize });
    }
    Ok(x.simplices(k)
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let mut hit = vec![false; sets.len()];
            s.vertices().iter().all(|v| match owner.get(v) {
                Some(&i) if !hit[i] => {
                    hit[i] = true;
                    true
                }
                _ => false,
            })
        })
        .map(|(i, _)| i)
        .collect())
}

/// Vertex → index of the set containing it; errors on overlap.
pub fn set_membership(sets: &[Vec<usize>]) -> Result<HashMap<usize, usize>> {
    let mut owner = HashMap::new();
    for (i, set) in sets.iter().enumerate() {
        for &v in set {
            if let Some(prev) = owner.insert(v, i) {
                if prev != i {
                    return Err(Error::OverlappingSets(v));
                }
            }
        }
    }
    Ok(owner)
}

/// Vertex regularity of a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularity {
    /// K with every vertex in exactly K top simplices.
    pub degree: Option<usize>,
    /// K_i per side when a partite structure is supplied and each side is regular.
    pub side_degrees: Option<Vec<usize>>,
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        self.degree.is_some()
    }
}

/// Top-simplex degree of every vertex, summarized. `None` if neither the
/// complex nor (when given) each side is regular.
pub fn check_regularity(x: &SimplicialComplex, partite: Option<&PartiteStructure>) -> Option<Regularity> {
    let deg = x.top_degree(0);
    let verts = x.vertices();
    let degree = deg.first().copied().filter(|d| deg.iter().all(|e| e == d));
    let side_degrees = partite.and_then(|p| {
        p.sides()
            .iter()
            .map(|side| {
                let ds: Vec<usize> = side.iter().map(|v| deg[verts.binary_search(v).unwrap()]).collect();
                ds.first().copied().filter(|d| ds.iter().all(|e| e == d))
            })
            .collect::<Option<Vec<usize>>>()
    });
    if degree.is_none() && side_degrees.is_none() {
        return None;
    }
    Some(Regularity { degree, side_degrees })
}

/// Worst relative residuals of the partite weight identities: side-restricted
/// coface sums equal m(τ) or m(τ)/(n-k), and m(S_i) = m(X(0))/(n+1).
pub fn partite_weight_residuals<T: Real>(
    x: &SimplicialComplex,
    m: &WeightFunction<T>,
    p: &PartiteStructure,
) -> (f64, f64) {
    let n = x.dim() as isize;
    let mut coface = 0.0f64;
    for k in -1..n {
        for (t, tau) in x.simplices(k).iter().enumerate() {
            let tau_type = p.type_of(tau.vertices());
            for side in 0..p.num_sides() {
                let sum = x
                    .cofaces(k, t)
                    .iter()
                    .filter(|&&j| x.simplex(k + 1, j).vertices().iter().any(|v| p.side_of(*v) == Some(side)))
                    .fold(T::zero(), |a, &j| a + m.get(k + 1, j));
                let expected = if tau_type.contains(&side) {
                    m.get(k, t)
                } else {
                    m.get(k, t) / T::from_count((n - k) as usize)
                };
                coface = coface.max(((sum - expected).abs() / expected).as_f64());
            }
        }
    }
    let verts = x.vertices();
    let total = m.total(0);
    let mut side = 0.0f64;
    for s in p.sides() {
        let ms = s.iter().fold(T::zero(), |a, v| a + m.get(0, verts.binary_search(v).unwrap()));
        let expected = total / T::from_count(p.num_sides());
        side = side.max(((ms - expected).abs() / expected).as_f64());
    }
    (coface, side)
}
