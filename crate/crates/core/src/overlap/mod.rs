mod exact;
mod geometry;

use rand::Rng;
use rayon::prelude::*;

pub use exact::{overlap_exact_2d, violates_general_position};
pub use geometry::{depth, has_degenerate_image, point_in_image, PointMap, HULL_TOL};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::mixing::{constant_c, constant_c_partite};
use crate::rng::SeedSplitter;
use crate::scalar::factorial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMethod {
    Exact2d,
    Sampled,
}

impl OverlapMethod {
    pub fn name(self) -> &'static str {
        match self {
            OverlapMethod::Exact2d => "exact2d",
            OverlapMethod::Sampled => "sample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapVariant {
    NonPartite,
    Partite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    pub method: OverlapMethod,
    pub witness: Vec<f64>,
    pub depth: usize,
    pub tops: usize,
    /// depth / |X(n)|
    pub overlap: f64,
    /// Closed-hull maximum over unperturbed candidates (exact method only).
    pub boundary_depth: Option<usize>,
    pub evaluated: usize,
    pub degenerate: bool,
    pub perturbed: bool,
    pub bound: Option<f64>,
}

impl OverlapReport {
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    /// `None` without a bound; a non-positive bound holds trivially.
    pub fn bound_holds(&self) -> Option<bool> {
        self.bound.map(|b| b <= 0.0 || self.overlap >= b - 1e-12)
    }
}

/// Max depth over uniform samples of the image bounding box and all image centroids.
pub fn overlap_sampled(x: &SimplicialComplex, f: &PointMap, num_points: usize, seed: u64) -> Result<OverlapReport> {
    if f.dim() != x.dim() {
        return Err(Error::Shape("point dimension does not match complex".into()));
    }
    let n = x.dim();
    let (lo, hi) = f.bounding_box();
    let mut rng = SeedSplitter::new(seed).stream(0);
    let mut points: Vec<Vec<f64>> = x
        .tops()
        .iter()
        .map(|s| {
            let im = f.image(s.vertices());
            (0..n).map(|r| im.iter().map(|p| p[r]).sum::<f64>() / (n + 1) as f64).collect()
        })
        .collect();
    points.extend((0..num_points).map(|_| {
        lo.iter().zip(&hi).map(|(a, b)| if b > a { rng.random_range(*a..=*b) } else { *a }).collect()
    }));
    let depths: Vec<usize> = points.par_iter().map(|p| depth(x, f, p)).collect();
    let (best, &d) = depths.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).expect("nonempty");
    Ok(OverlapReport {
        method: OverlapMethod::Sampled,
        witness: points[best].clone(),
        depth: d,
        tops: x.count(n as isize),
        overlap: d as f64 / x.count(n as isize) as f64,
        boundary_depth: None,
        evaluated: points.len(),
        degenerate: has_degenerate_image(x, f),
        perturbed: false,
        bound: None,
    })
}

/// Lower bound on the overlap given λ and the selection constant P.
pub fn overlap_bound(lambda: f64, n: usize, pach: f64, variant: OverlapVariant) -> Result<f64> {
    if !(pach > 0.0 && pach <= 1.0) {
        return Err(Error::InvalidArgument(format!("pach constant must lie in (0, 1], got {pach}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(match variant {
        OverlapVariant::NonPartite => {
            let c = constant_c(n)? as f64;
            let nf = factorial(n) as f64;
            nf * pach * ((pach / (n + 1) as f64).powi(n as i32) - (n + 1) as f64 * c * lambda)
        }
        OverlapVariant::Partite => {
            let c = constant_c_partite(n)? as f64;
            pach * (pach.powi(n as i32) - c * lambda)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn pts(list: &[(usize, [f64; 2])]) -> Vec<(usize, Vec<f64>)> {
        list.iter().map(|(i, p)| (*i, p.to_vec())).collect()
    }

    fn k4() -> SimplicialComplex {
        SimplicialComplex::from_top_simplices([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
    }

    fn quad() -> Vec<(usize, Vec<f64>)> {
        pts(&[(0, [0.0, 0.0]), (1, [4.0, 0.0]), (2, [5.0, 3.0]), (3, [1.0, 4.0])])
    }

    #[test]
    fn single_triangle() {
        let x = SimplicialComplex::from_top_simplices([[0, 1, 2]]).unwrap();
        let f = PointMap::new(&x, &pts(&[(0, [0.0, 0.0]), (1, [1.0, 0.0]), (2, [0.0, 1.0])])).unwrap();
        let r = overlap_exact_2d(&x, &f).unwrap();
        assert_eq!(r.depth, 1);
        assert_eq!(r.overlap, 1.0);
        assert_eq!(overlap_sampled(&x, &f, 0, 1).unwrap().depth, 1);
    }

    #[test]
    fn convex_quadrilateral() {
        let x = k4();
        let f = PointMap::new(&x, &quad()).unwrap();
        assert_eq!(depth(&x, &f, &[2.5, 1.75]), 2);
        let r = overlap_exact_2d(&x, &f).unwrap();
        assert_eq!(r.depth, 2);
        assert_eq!(r.overlap, 0.5);
        assert_eq!(r.boundary_depth, Some(4));
        assert!(!r.perturbed);
        let s = overlap_sampled(&x, &f, 2000, 3).unwrap();
        assert!(s.depth <= r.depth);
    }

    #[test]
    fn affine_image_same_depth() {
        let x = k4();
        let f = PointMap::new(&x, &quad()).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, -0.5, 3.0]);
        let g = f.affine(&a, &[7.0, -2.0]).unwrap();
        assert_eq!(overlap_exact_2d(&x, &f).unwrap().depth, overlap_exact_2d(&x, &g).unwrap().depth);
    }

    #[test]
    fn collinear_points_are_perturbed() {
        let x = SimplicialComplex::from_top_simplices([[0, 1, 2], [1, 2, 3]]).unwrap();
        let f = PointMap::new(&x, &pts(&[(0, [0.0, 0.0]), (1, [1.0, 0.0]), (2, [2.0, 0.0]), (3, [1.0, 1.0])])).unwrap();
        let r = overlap_exact_2d(&x, &f).unwrap();
        assert!(r.perturbed);
        assert!(r.degenerate);
        assert!(r.depth >= 1);
    }

    #[test]
    fn exact_needs_plane() {
        let x = SimplicialComplex::from_top_simplices([[0, 1]]).unwrap();
        let f = PointMap::new(&x, &[(0, vec![0.0]), (1, vec![1.0])]).unwrap();
        assert!(overlap_exact_2d(&x, &f).is_err());
        assert_eq!(overlap_sampled(&x, &f, 10, 0).unwrap().depth, 1);
    }

    #[test]
    fn missing_point() {
        let x = k4();
        assert!(PointMap::new(&x, &quad()[..3]).is_err());
    }

    #[test]
    fn bound_formulas() {
        let p = 0.3f64;
        assert!((overlap_bound(0.0, 2, p, OverlapVariant::Partite).unwrap() - p.powi(3)).abs() < 1e-15);
        assert!((overlap_bound(0.01, 1, p, OverlapVariant::Partite).unwrap() - p * (p - 0.02)).abs() < 1e-15);
        let np = overlap_bound(0.0, 2, p, OverlapVariant::NonPartite).unwrap();
        assert!((np - 2.0 * p * (p / 3.0).powi(2)).abs() < 1e-15);
        let with_l = overlap_bound(0.001, 2, p, OverlapVariant::NonPartite).unwrap();
        assert!((with_l - 2.0 * p * ((p / 3.0).powi(2) - 3.0 * 5.0 * 0.001)).abs() < 1e-15);
        assert!(overlap_bound(0.0, 2, 0.0, OverlapVariant::Partite).is_err());
        assert!(overlap_bound(0.0, 2, 1.5, OverlapVariant::Partite).is_err());
    }
}
