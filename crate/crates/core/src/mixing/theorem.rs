use rand::Rng;

use super::products::{closed_bottom, vertex_mass, ProductContext};
use super::{bracket_constant, constant_c, constant_c_partite};
use crate::complex::{check_regularity, set_membership, simplices_spanning, PartiteStructure, WeightedComplex};
use crate::error::{Error, Result};
use crate::scalar::{factorial, relative_residual, Real};
use crate::spectral::SpectralReport;

const SLACK: f64 = 1e-9;

/// The λ used by a mixing check and whether the spectral hypothesis is known to hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    pub lambda: f64,
    pub verified: bool,
}

impl Hypothesis {
    /// Measured two-sided λ, or an override (unverified if below the measurement).
    pub fn two_sided<T: Real>(report: &SpectralReport<T>, lambda: Option<f64>) -> Self {
        Self::pick(report.lambda().as_f64(), lambda)
    }

    /// Measured one-sided λ = max(0, max μ_k), or an override.
    pub fn one_sided<T: Real>(report: &SpectralReport<T>, lambda: Option<f64>) -> Self {
        Self::pick(report.one_sided_lambda().as_f64(), lambda)
    }

    fn pick(measured: f64, lambda: Option<f64>) -> Self {
        match lambda {
            Some(l) => Hypothesis { lambda: l, verified: l + 1e-10 >= measured },
            None => Hypothesis { lambda: measured, verified: true },
        }
    }

    /// λ supplied without a spectral report.
    pub fn unchecked(lambda: f64) -> Self {
        Hypothesis { lambda, verified: false }
    }
}

/// One telescoping term ⟨(Upper_k - c^{n-k} Lower_k) χ_{X(U_0..U_k)}, χ_{X(U_{n-k}..U_n)}⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub k: usize,
    pub upper: f64,
    pub lower: f64,
    pub value: f64,
    /// Coefficient of this bracket in the telescoping sum.
    pub weight: f64,
    /// λ · (bracket constant) · √(m(U_0) m(U_n)), times (n-k) in the partite case.
    pub bound: f64,
}

impl Bracket {
    pub fn within_bound(&self) -> bool {
        self.value.abs() <= self.bound + SLACK * (1.0 + self.bound)
    }
}

/// The inequality restated with simplex counts, for homogeneous regular complexes.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularForm {
    pub count: usize,
    pub main_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Worst relative residual of the identities used to normalize.
    pub identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub partite: bool,
    /// Sets after moving the minimizing pair to positions 0 and n.
    pub sets: Vec<Vec<usize>>,
    /// `order[j]` is the input index of `sets[j]`.
    pub order: Vec<usize>,
    /// m(X(U_0,...,U_n)) by enumeration.
    pub mass: f64,
    /// The same mass as ⟨d*_{n-1} d_{n-1} χ, χ⟩.
    pub mass_pairing: f64,
    pub main_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub lambda: f64,
    pub pair_term: f64,
    pub brackets: Vec<Bracket>,
    pub telescoping_residual: f64,
    pub pairing_residual: f64,
    pub hypothesis_verified: bool,
    pub regular: Option<RegularForm>,
}

impl MixingReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + SLACK
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn identities_ok(&self, tol: f64) -> bool {
        self.telescoping_residual <= tol && self.pairing_residual <= tol
    }
}

/// Index pair (i < j) minimizing `score(i) * score(j)`, then the order that
/// puts i first and j last.
fn min_pair_order(scores: &[f64]) -> (f64, Vec<usize>) {
    let n = scores.len();
    let mut best = (f64::INFINITY, 0, n - 1);
    for i in 0..n {
        for j in i + 1..n {
            let v = scores[i] * scores[j];
            if v < best.0 {
                best = (v, i, j);
            }
        }
    }
    let (v, i, j) = best;
    let mut order = vec![i];
    order.extend((0..n).filter(|t| *t != i && *t != j));
    order.push(j);
    (v.max(0.0).sqrt(), order)
}

fn mass_of<T: Real>(x: &WeightedComplex<T>, sets: &[Vec<usize>]) -> Result<(f64, usize)> {
    let n = x.dim() as isize;
    let ids = simplices_spanning(&x.complex, sets)?;
    Ok((x.weight.of_set(n, &ids).as_f64(), ids.len()))
}

struct Telescope {
    brackets: Vec<Bracket>,
    mass_pairing: f64,
    residual: f64,
}

/// Telescoping terms with Lower_k scaled by c_k per factor and bracket k
/// weighted by w_k; returns the brackets and the relative residual of
/// a_{n-1} - W·bottom = Σ w_k bracket_k.
fn telescope<T: Real>(
    x: &WeightedComplex<T>,
    ctx: &ProductContext<T>,
    sets: &[Vec<usize>],
    scale: &dyn Fn(usize) -> f64,
    weight: &dyn Fn(usize) -> f64,
    bottom_weight: f64,
    bound: &dyn Fn(usize) -> Result<f64>,
) -> Result<Telescope> {
    let n = x.dim();
    let mut brackets = Vec::with_capacity(n);
    for k in 0..n {
        let c = scale(k);
        let upper = ctx.pairing(x, sets, k, true, T::one())?.as_f64();
        let lower = ctx.pairing(x, sets, k, false, T::one())?.as_f64() * c.powi((n - k) as i32);
        brackets.push(Bracket { k, upper, lower, value: upper - lower, weight: weight(k), bound: bound(k)? });
    }
    let mass_pairing = brackets[n - 1].upper;
    let bottom = closed_bottom(x, sets)?.as_f64();
    let sum: f64 = brackets.iter().map(|b| b.weight * b.value).sum();
    let scale_sum: f64 =
        brackets.iter().map(|b| b.weight * (b.upper.abs() + b.lower.abs())).sum::<f64>() + mass_pairing.abs() + bottom_weight * bottom.abs();
    let residual = relative_residual(mass_pairing - bottom_weight * bottom, sum, scale_sum);
    Ok(Telescope { brackets, mass_pairing, residual })
}

/// |m(X(U_0..U_n)) - Π m(U_i)/m(X(0))^n| ≤ C_n λ min_{i<j} √(m(U_i) m(U_j)).
pub fn verify_mixing<T: Real>(
    x: &WeightedComplex<T>,
    ctx: &ProductContext<T>,
    sets: &[Vec<usize>],
    hyp: Hypothesis,
) -> Result<MixingReport> {
    let n = x.dim();
    check_sets(x, sets)?;
    let masses: Vec<f64> = sets.iter().map(|s| vertex_mass(x, s).map(|m| m.as_f64())).collect::<Result<_>>()?;
    let (pair_term, order) = min_pair_order(&masses);
    let sets: Vec<Vec<usize>> = order.iter().map(|&i| sets[i].clone()).collect();
    let (mass, count) = mass_of(x, &sets)?;
    let main_term = closed_bottom(x, &sets)?.as_f64();
    let m0 = masses[order[0]];
    let mn = masses[order[n]];
    let tele = telescope(
        x,
        ctx,
        &sets,
        &|_| 1.0,
        &|_| 1.0,
        1.0,
        &|k| Ok(hyp.lambda * bracket_constant(n, k)? as f64 * (m0 * mn).sqrt()),
    )?;
    let constant = constant_c(n)? as f64;
    let lhs = (mass - main_term).abs();
    let rhs = constant * hyp.lambda * pair_term;
    let regular = regular_form(x, &sets, count, constant, hyp.lambda)?;
    Ok(MixingReport {
        partite: false,
        sets,
        order,
        mass,
        mass_pairing: tele.mass_pairing,
        main_term,
        lhs,
        rhs,
        constant,
        lambda: hyp.lambda,
        pair_term,
        brackets: tele.brackets,
        telescoping_residual: tele.residual,
        pairing_residual: relative_residual(mass, tele.mass_pairing, mass.abs() + tele.mass_pairing.abs()),
        hypothesis_verified: hyp.verified,
        regular,
    })
}

fn check_sets<T: Real>(x: &WeightedComplex<T>, sets: &[Vec<usize>]) -> Result<()> {
    if sets.len() != x.dim() + 1 {
        return Err(Error::InvalidArgument(format!("expected {} sets, got {}", x.dim() + 1, sets.len())));
    }
    set_membership(sets)?;
    Ok(())
}

fn is_homogeneous<T: Real>(x: &WeightedComplex<T>) -> bool {
    let n = x.dim() as isize;
    x.weight.level(n).iter().all(|w| *w == T::one())
}

fn regular_form<T: Real>(
    x: &WeightedComplex<T>,
    sets: &[Vec<usize>],
    count: usize,
    constant: f64,
    lambda: f64,
) -> Result<Option<RegularForm>> {
    if !is_homogeneous(x) {
        return Ok(None);
    }
    let Some(k) = check_regularity(&x.complex, None).and_then(|r| r.degree) else {
        return Ok(None);
    };
    let n = x.dim();
    let nf = factorial(n) as f64;
    let kk = k as f64;
    let v = x.complex.count(0) as f64;
    let (mass, _) = mass_of(x, sets)?;
    let mut residual = relative_residual(mass, count as f64, count as f64);
    for s in sets {
        let want = nf * kk * s.len() as f64;
        residual = residual.max(relative_residual(vertex_mass(x, s)?.as_f64(), want, want));
    }
    let total = x.weight.total(0).as_f64();
    residual = residual.max(relative_residual(total, nf * kk * v, nf * kk * v));
    let sizes: Vec<f64> = sets.iter().map(|s| s.len() as f64).collect();
    let main_term = nf * kk / v.powi(n as i32) * sizes.iter().product::<f64>();
    let (pair, _) = min_pair_order(&sizes);
    Ok(Some(RegularForm {
        count,
        main_term,
        lhs: (count as f64 - main_term).abs(),
        rhs: constant * nf * lambda * kk * pair,
        identity_residual: residual,
    }))
}

/// |m(X(U))/m(X(n)) - Π m(U_i)/m(S_i)| ≤ C_partite λ min_{i<j} √(m(U_i) m(U_j)/(m(S_i) m(S_j)))
/// for U_i ⊆ S_i.
pub fn verify_partite_mixing<T: Real>(
    x: &WeightedComplex<T>,
    ctx: &ProductContext<T>,
    p: &PartiteStructure,
    sets: &[Vec<usize>],
    hyp: Hypothesis,
) -> Result<MixingReport> {
    let n = x.dim();
    check_sets(x, sets)?;
    if p.num_sides() != n + 1 {
        return Err(Error::NotPartite);
    }
    for (i, s) in sets.iter().enumerate() {
        if s.iter().any(|v| p.side_of(*v) != Some(i)) {
            return Err(Error::SetOutsideSide { set: i });
        }
    }
    let side_mass: Vec<f64> = p.sides().iter().map(|s| vertex_mass(x, s).map(|m| m.as_f64())).collect::<Result<_>>()?;
    let masses: Vec<f64> = sets.iter().map(|s| vertex_mass(x, s).map(|m| m.as_f64())).collect::<Result<_>>()?;
    let ratios: Vec<f64> = masses.iter().zip(&side_mass).map(|(m, s)| m / s).collect();
    let (pair_term, order) = min_pair_order(&ratios);
    let sets: Vec<Vec<usize>> = order.iter().map(|&i| sets[i].clone()).collect();
    let (mass, count) = mass_of(x, &sets)?;
    let top_mass = x.weight.total(n as isize).as_f64();
    let main_term: f64 = ratios.iter().product();
    let m0 = masses[order[0]];
    let mn = masses[order[n]];
    let c = |k: usize| (n + 1 - k) as f64 / (n - k) as f64;
    let w = |k: usize| ((n - k) as f64).powi((n - k - 1) as i32) / factorial(n - k - 1) as f64;
    let bottom_weight = ((n + 1) as f64).powi(n as i32) / factorial(n) as f64;
    let tele = telescope(
        x,
        ctx,
        &sets,
        &c,
        &w,
        bottom_weight,
        &|k| Ok(hyp.lambda * (n - k) as f64 * bracket_constant(n, k)? as f64 * (m0 * mn).sqrt()),
    )?;
    let constant = constant_c_partite(n)? as f64;
    let lhs = (mass / top_mass - main_term).abs();
    let rhs = constant * hyp.lambda * pair_term;
    let regular = partite_regular_form(x, p, &sets, &order, count, constant, hyp.lambda)?;
    Ok(MixingReport {
        partite: true,
        sets,
        order,
        mass,
        mass_pairing: tele.mass_pairing,
        main_term,
        lhs,
        rhs,
        constant,
        lambda: hyp.lambda,
        pair_term,
        brackets: tele.brackets,
        telescoping_residual: tele.residual,
        pairing_residual: relative_residual(mass, tele.mass_pairing, mass.abs() + tele.mass_pairing.abs()),
        hypothesis_verified: hyp.verified,
        regular,
    })
}

fn partite_regular_form<T: Real>(
    x: &WeightedComplex<T>,
    p: &PartiteStructure,
    sets: &[Vec<usize>],
    order: &[usize],
    count: usize,
    constant: f64,
    lambda: f64,
) -> Result<Option<RegularForm>> {
    if !is_homogeneous(x) {
        return Ok(None);
    }
    let Some(degrees) = check_regularity(&x.complex, Some(p)).and_then(|r| r.side_degrees) else {
        return Ok(None);
    };
    let n = x.dim();
    let nf = factorial(n) as f64;
    let (mass, _) = mass_of(x, sets)?;
    let mut residual = relative_residual(mass, count as f64, count as f64);
    for (j, s) in sets.iter().enumerate() {
        let side = order[j];
        let k = degrees[side] as f64;
        let want = nf * k * s.len() as f64;
        residual = residual.max(relative_residual(vertex_mass(x, s)?.as_f64(), want, want));
        let s_side = p.side(side);
        let want = nf * k * s_side.len() as f64;
        residual = residual.max(relative_residual(vertex_mass(x, s_side)?.as_f64(), want, want));
    }
    let tops = x.complex.count(n as isize) as f64;
    let ratios: Vec<f64> = sets.iter().zip(order).map(|(s, &i)| s.len() as f64 / p.side(i).len() as f64).collect();
    let main_term: f64 = ratios.iter().product();
    let (pair, _) = min_pair_order(&ratios);
    Ok(Some(RegularForm {
        count,
        main_term,
        lhs: (count as f64 / tops - main_term).abs(),
        rhs: constant * lambda * pair,
        identity_residual: residual,
    }))
}

/// n+1 disjoint random vertex sets: each vertex joins set i with probability
/// `density/(n+1)` and stays out otherwise.
pub fn random_family<T: Real, R: Rng + ?Sized>(x: &WeightedComplex<T>, density: f64, rng: &mut R) -> Vec<Vec<usize>> {
    let parts = x.dim() + 1;
    let mut sets = vec![Vec::new(); parts];
    for v in x.complex.vertices() {
        if rng.random::<f64>() < density {
            sets[rng.random_range(0..parts)].push(v);
        }
    }
    sets
}

/// U_i ⊆ S_i with each vertex kept independently with probability `density`.
pub fn random_partite_family<R: Rng + ?Sized>(p: &PartiteStructure, density: f64, rng: &mut R) -> Vec<Vec<usize>> {
    p.sides().iter().map(|s| s.iter().copied().filter(|_| rng.random::<f64>() < density).collect()).collect()
}
