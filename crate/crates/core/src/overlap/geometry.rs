use nalgebra::{DMatrix, DVector};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Barycentric tolerance of the closed-hull test.
pub const HULL_TOL: f64 = 1e-9;

/// One point of ℝ^n per vertex, aligned with `SimplicialComplex::vertices()`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMap {
    dim: usize,
    ids: Vec<usize>,
    points: Vec<Vec<f64>>,
}

impl PointMap {
    /// Every vertex of `x` needs a point of dimension `x.dim()`; extra ids are ignored.
    pub fn new(x: &SimplicialComplex, pairs: &[(usize, Vec<f64>)]) -> Result<Self> {
        let ids = x.vertices();
        let mut points: Vec<Option<Vec<f64>>> = vec![None; ids.len()];
        for (id, p) in pairs {
            if p.len() != x.dim() {
                return Err(Error::InvalidArgument(format!(
                    "point for vertex {id} has dimension {}, expected {}",
                    p.len(),
                    x.dim()
                )));
            }
            if let Ok(i) = ids.binary_search(id) {
                points[i] = Some(p.clone());
            }
        }
        let points = points
            .into_iter()
            .zip(&ids)
            .map(|(p, id)| p.ok_or_else(|| Error::InvalidArgument(format!("no point for vertex {id}"))))
            .collect::<Result<_>>()?;
        Ok(PointMap { dim: x.dim(), ids, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, vertex: usize) -> Option<&[f64]> {
        self.ids.binary_search(&vertex).ok().map(|i| self.points[i].as_slice())
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.ids.iter().copied().zip(self.points.iter().map(|p| p.as_slice()))
    }

    /// Image points of a simplex.
    pub fn image(&self, vertices: &[usize]) -> Vec<&[f64]> {
        vertices.iter().map(|v| self.point(*v).expect("vertex has a point")).collect()
    }

    /// Applies x ↦ A x + b to every point.
    pub fn affine(&self, a: &DMatrix<f64>, b: &[f64]) -> Result<Self> {
        if a.shape() != (self.dim, self.dim) || b.len() != self.dim {
            return Err(Error::Shape("affine map does not match point dimension".into()));
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                let y = a * DVector::from_column_slice(p);
                y.iter().zip(b).map(|(u, v)| u + v).collect()
            })
            .collect();
        Ok(PointMap { dim: self.dim, ids: self.ids.clone(), points })
    }

    pub(crate) fn map_points(&self, f: impl Fn(usize, &[f64]) -> Vec<f64>) -> Self {
        let points = self.ids.iter().zip(&self.points).map(|(id, p)| f(*id, p)).collect();
        PointMap { dim: self.dim, ids: self.ids.clone(), points }
    }

    /// Axis-aligned bounding box (min, max).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in &self.points {
            for (i, c) in p.iter().enumerate() {
                lo[i] = lo[i].min(*c);
                hi[i] = hi[i].max(*c);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }
}

/// Whether `x` lies in the closed convex hull of `pts` (n+1 points in ℝ^n).
/// Affinely dependent point sets are handled through their affinely
/// independent subsets.
pub fn point_in_image(pts: &[&[f64]], x: &[f64]) -> bool {
    if pts.len() == 3 && x.len() == 2 {
        if let Some(inside) = in_triangle_2d(pts[0], pts[1], pts[2], x) {
            return inside;
        }
    }
    if let Some(inside) = in_full_simplex(pts, x) {
        return inside;
    }
    // degenerate: some affinely independent subset must contain x
    let k = pts.len();
    (1u32..(1 << k)).filter(|m| (m.count_ones() as usize) < k).any(|mask| {
        let sub: Vec<&[f64]> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| pts[i]).collect();
        in_subsimplex(&sub, x).unwrap_or(false)
    })
}

fn orient(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn in_triangle_2d(a: &[f64], b: &[f64], c: &[f64], x: &[f64]) -> Option<bool> {
    let det = orient(a, b, c);
    let scale = ((b[0] - a[0]).abs() + (b[1] - a[1]).abs()) * ((c[0] - a[0]).abs() + (c[1] - a[1]).abs());
    if det.abs() <= 1e-12 * scale || det == 0.0 {
        return None;
    }
    let l1 = orient(x, b, c) / det;
    let l2 = orient(a, x, c) / det;
    let l3 = 1.0 - l1 - l2;
    Some(l1 >= -HULL_TOL && l2 >= -HULL_TOL && l3 >= -HULL_TOL)
}

fn in_full_simplex(pts: &[&[f64]], x: &[f64]) -> Option<bool> {
    let n = x.len();
    if pts.len() != n + 1 {
        return None;
    }
    let m = DMatrix::from_fn(n, n, |r, c| pts[c + 1][r] - pts[0][r]);
    let rhs = DVector::from_fn(n, |r, _| x[r] - pts[0][r]);
    let col_scale: f64 = (0..n).map(|c| m.column(c).norm()).product();
    let det = m.determinant();
    if col_scale == 0.0 || det.abs() <= 1e-12 * col_scale {
        return None;
    }
    let lam = m.lu().solve(&rhs)?;
    let rest = 1.0 - lam.sum();
    Some(lam.iter().all(|l| *l >= -HULL_TOL) && rest >= -HULL_TOL)
}

/// Containment in the hull of affinely independent points of lower dimension;
/// `None` if they are dependent.
fn in_subsimplex(pts: &[&[f64]], x: &[f64]) -> Option<bool> {
    let d = x.len();
    let k = pts.len() - 1;
    if k == 0 {
        let dist: f64 = pts[0].iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let scale = 1.0 + pts[0].iter().map(|v| v.abs()).fold(0.0, f64::max);
        return Some(dist <= HULL_TOL * scale);
    }
    let m = DMatrix::from_fn(d, k, |r, c| pts[c + 1][r] - pts[0][r]);
    let rhs = DVector::from_fn(d, |r, _| x[r] - pts[0][r]);
    let gram = m.transpose() * &m;
    let col_scale: f64 = (0..k).map(|c| m.column(c).norm_squared()).product();
    if col_scale == 0.0 || gram.determinant().abs() <= 1e-12 * col_scale {
        return None;
    }
    let lam = gram.lu().solve(&(m.transpose() * &rhs))?;
    let resid = (&m * &lam - &rhs).norm();
    let scale = 1.0 + (0..k).map(|c| m.column(c).norm()).fold(0.0, f64::max);
    let rest = 1.0 - lam.sum();
    Some(resid <= HULL_TOL * scale && lam.iter().all(|l| *l >= -HULL_TOL) && rest >= -HULL_TOL)
}

/// |{σ ∈ X(n) : x ∈ f̃(σ)}|.
pub fn depth(x: &SimplicialComplex, f: &PointMap, point: &[f64]) -> usize {
    x.tops().iter().filter(|s| point_in_image(&f.image(s.vertices()), point)).count()
}

/// Whether the image of some top simplex is affinely dependent.
pub fn has_degenerate_image(x: &SimplicialComplex, f: &PointMap) -> bool {
    let n = x.dim();
    x.tops().iter().any(|s| {
        let pts = f.image(s.vertices());
        let m = DMatrix::from_fn(n, n, |r, c| pts[c + 1][r] - pts[0][r]);
        let col_scale: f64 = (0..n).map(|c| m.column(c).norm()).product();
        col_scale == 0.0 || m.determinant().abs() <= 1e-12 * col_scale
    })
}
