use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::geometry::{depth, has_degenerate_image, point_in_image, PointMap};
use super::{OverlapMethod, OverlapReport};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::rng::SeedSplitter;

const COLLINEAR_TOL: f64 = 1e-12;
const PERTURBATION: f64 = 1e-9;
const NUDGE: f64 = 1e-7;

fn orient(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// True if some three image points are (nearly) collinear or two coincide.
pub fn violates_general_position(f: &PointMap) -> bool {
    let pts: Vec<&[f64]> = f.points().map(|(_, p)| p).collect();
    let scale = f.diameter().max(1.0).powi(2);
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            if pts[i] == pts[j] {
                return true;
            }
            for k in j + 1..n {
                if orient(pts[i], pts[j], pts[k]).abs() <= COLLINEAR_TOL * scale {
                    return true;
                }
            }
        }
    }
    false
}

/// Moves every point by at most 1e-9·max(1, diameter), deterministically per vertex id.
fn perturb(f: &PointMap, round: u64) -> PointMap {
    let amount = PERTURBATION * f.diameter().max(1.0);
    let seeds = SeedSplitter::new(0x9e37_79b9).child(round);
    f.map_points(|id, p| {
        let mut rng = seeds.stream(id as u64);
        p.iter().map(|c| c + amount * rng.random_range(-1.0..=1.0)).collect()
    })
}

fn segment_intersection(p: &[f64], p2: &[f64], q: &[f64], q2: &[f64]) -> Option<[f64; 2]> {
    let r = [p2[0] - p[0], p2[1] - p[1]];
    let s = [q2[0] - q[0], q2[1] - q[1]];
    let cross = r[0] * s[1] - r[1] * s[0];
    let scale = (r[0].hypot(r[1])) * (s[0].hypot(s[1]));
    if scale == 0.0 || cross.abs() <= 1e-14 * scale {
        return None;
    }
    let qp = [q[0] - p[0], q[1] - p[1]];
    let t = (qp[0] * s[1] - qp[1] * s[0]) / cross;
    let u = (qp[0] * r[1] - qp[1] * r[0]) / cross;
    let tol = 1e-12;
    if (-tol..=1.0 + tol).contains(&t) && (-tol..=1.0 + tol).contains(&u) {
        Some([p[0] + t * r[0], p[1] + t * r[1]])
    } else {
        None
    }
}

/// Directions (as angles) of the edge rays leaving `c`.
fn incident_angles(c: &[f64; 2], segments: &[([f64; 2], [f64; 2])], tol: f64) -> Vec<f64> {
    let mut angles = Vec::new();
    for (a, b) in segments {
        let d = [b[0] - a[0], b[1] - a[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        if len2 == 0.0 {
            continue;
        }
        let t = ((c[0] - a[0]) * d[0] + (c[1] - a[1]) * d[1]) / len2;
        let foot = [a[0] + t * d[0], a[1] + t * d[1]];
        if (foot[0] - c[0]).hypot(foot[1] - c[1]) > tol {
            continue;
        }
        let len = len2.sqrt();
        let t_tol = tol / len;
        if t < -t_tol || t > 1.0 + t_tol {
            continue;
        }
        let fwd = d[1].atan2(d[0]);
        if t < 1.0 - t_tol {
            angles.push(fwd);
        }
        if t > t_tol {
            angles.push(if fwd > 0.0 { fwd - PI } else { fwd + PI });
        }
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    angles
}

/// Points just inside every open sector around `c`.
fn nudged(c: &[f64; 2], angles: &[f64], eps: f64) -> Vec<Vec<f64>> {
    if angles.is_empty() {
        return vec![c.to_vec()];
    }
    (0..angles.len())
        .map(|i| {
            let a = angles[i];
            let b = if i + 1 < angles.len() { angles[i + 1] } else { angles[0] + 2.0 * PI };
            let mid = 0.5 * (a + b);
            vec![c[0] + eps * mid.cos(), c[1] + eps * mid.sin()]
        })
        .collect()
}

/// Maximum depth over the open cells of the planar arrangement of image edges.
///
/// `boundary_depth` reports the closed maximum over the raw candidate points,
/// which can exceed the open-cell value where edges cross.
pub fn overlap_exact_2d(x: &SimplicialComplex, f: &PointMap) -> Result<OverlapReport> {
    if x.dim() != 2 || f.dim() != 2 {
        return Err(Error::InvalidArgument(format!("exact overlap needs n = 2, got n = {}", x.dim())));
    }
    let degenerate = has_degenerate_image(x, f);
    let mut g = f.clone();
    let mut perturbed = false;
    let mut round = 0;
    while violates_general_position(&g) && round < 8 {
        g = perturb(f, round);
        perturbed = true;
        round += 1;
    }

    let segments: Vec<([f64; 2], [f64; 2])> = x
        .simplices(1)
        .iter()
        .map(|e| {
            let im = g.image(e.vertices());
            ([im[0][0], im[0][1]], [im[1][0], im[1][1]])
        })
        .collect();

    let mut candidates: Vec<[f64; 2]> = g.points().map(|(_, p)| [p[0], p[1]]).collect();
    for i in 0..segments.len() {
        for j in i + 1..segments.len() {
            let (a, b) = segments[i];
            let (c, d) = segments[j];
            if let Some(p) = segment_intersection(&a, &b, &c, &d) {
                candidates.push(p);
            }
        }
    }

    let diam = g.diameter().max(1.0);
    let eps = NUDGE * diam;
    let on_tol = 1e-11 * diam;
    let mut open_points: Vec<Vec<f64>> = candidates
        .par_iter()
        .flat_map_iter(|c| nudged(c, &incident_angles(c, &segments, on_tol), eps))
        .collect();
    for s in x.tops() {
        let im = g.image(s.vertices());
        open_points.push((0..2).map(|r| im.iter().map(|p| p[r]).sum::<f64>() / 3.0).collect());
    }

    let depths: Vec<usize> = open_points.par_iter().map(|p| depth(x, &g, p)).collect();
    let (best, &d) = depths.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).expect("candidates");
    let boundary = candidates
        .par_iter()
        .map(|c| x.tops().iter().filter(|s| point_in_image(&g.image(s.vertices()), c)).count())
        .max()
        .unwrap_or(0)
        .max(d);

    Ok(OverlapReport {
        method: OverlapMethod::Exact2d,
        witness: open_points[best].clone(),
        depth: d,
        tops: x.count(2),
        overlap: d as f64 / x.count(2) as f64,
        boundary_depth: Some(boundary),
        evaluated: open_points.len(),
        degenerate,
        perturbed,
        bound: None,
    })
}
