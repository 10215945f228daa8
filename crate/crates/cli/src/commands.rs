use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use hdx_core::cochain::{compose_check_dstar_d, d_dstar, lower_walk, nonlazy_upper, upper_walk};
use hdx_core::complex::io::{parse_complex, parse_points, parse_sets, write_complex};
use hdx_core::complex::{detect_partite, PartiteStructure, WeightedComplex};
use hdx_core::garland::{verify_garland_decomposition, verify_localization_identities, verify_orthogonal_bound};
use hdx_core::generators::GeneratorSpec;
use hdx_core::mixing::{
    bottom_product_value, random_family, random_partite_family, verify_exchange_lemmas, verify_mixing,
    verify_partite_mixing, Hypothesis, MixingReport, ProductContext,
};
use hdx_core::overlap::{overlap_bound, overlap_exact_2d, overlap_sampled, OverlapVariant, PointMap};
use hdx_core::rng::SeedSplitter;
use hdx_core::scalar::Tolerance;
use hdx_core::spectral::{link_spectral_report, link_spectral_report_with, threshold_for_target, verify_descent, DescentStep};

use crate::output::{list, Output};
use crate::{DescentArgs, Family, GenerateArgs, Method, MixingArgs, OverlapArgs, SpectraArgs, Suite, VerifyArgs};

type X = WeightedComplex<f64>;

const ROW_SUM_TOL: f64 = 1e-12;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_complex(path: &Path) -> Result<X> {
    parse_complex(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_sets(path: &Path) -> Result<Vec<Vec<usize>>> {
    parse_sets(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn sets_text(sets: &[Vec<usize>]) -> String {
    sets.iter()
        .map(|s| if s.is_empty() { "-".to_string() } else { s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") })
        .collect::<Vec<_>>()
        .join("|")
}

pub fn generate(a: &GenerateArgs, out: &mut Output) -> Result<bool> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| anyhow!("--{flag} is required for this family"));
    let spec = match a.family {
        Family::Complete => GeneratorSpec::Complete { vertices: need(a.vertices, "N")?, n: need(a.dim, "n")? },
        Family::CompletePartite => {
            if a.sides.is_empty() {
                bail!("--sides is required for complete-partite");
            }
            GeneratorSpec::CompletePartite { sides: a.sides.clone() }
        }
        Family::SingleSimplex => GeneratorSpec::SingleSimplex { n: need(a.dim, "n")? },
        Family::SimplexBoundary => GeneratorSpec::SimplexBoundary { n: need(a.dim, "n")? },
        Family::RandomPure => GeneratorSpec::RandomPure {
            vertices: need(a.vertices, "N")?,
            n: need(a.dim, "n")?,
            p: a.p.ok_or_else(|| anyhow!("--p is required for random-pure"))?,
            seed: a.seed,
            max_retries: a.max_retries,
        },
    };
    let c = spec.generate()?;
    let text = write_complex(&X::homogeneous(c.clone()), false);
    match &a.output {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            out.set("DIM", c.dim());
            out.set("TOPS", c.count(c.dim() as isize));
            out.set("VERTICES", c.count(0));
            out.set("PATH", path.display().to_string());
        }
        None => out.raw(&text),
    }
    Ok(true)
}

pub fn spectra(a: &SpectraArgs, out: &mut Output) -> Result<bool> {
    let x = load_complex(&a.complex)?;
    let p = if a.no_partite { None } else { detect_partite(&x.complex).ok().flatten() };
    let report = link_spectral_report_with(&x, p.as_ref())?;
    let n = x.dim();
    for (i, l) in report.links.iter().enumerate() {
        let key = format!("LINK_{i:04}");
        let fmt = |v: Option<f64>| v.map_or("none".to_string(), |v| v.to_string());
        out.line(format!(
            "tau={} dim={} min={} max={} spectrum=[{}]",
            l.tau,
            l.link_dim(n),
            fmt(l.min_nontrivial()),
            fmt(l.max_nontrivial()),
            list(&l.spectrum)
        ));
        out.set(format!("{key}_TAU"), &l.tau);
        out.set(format!("{key}_DIM"), l.link_dim(n));
        out.set(format!("{key}_MIN_NONTRIVIAL"), fmt(l.min_nontrivial()));
        out.set(format!("{key}_MAX_NONTRIVIAL"), fmt(l.max_nontrivial()));
        out.set(format!("{key}_SPECTRUM"), list(&l.spectrum));
        if let Some(pn) = &l.partite_nontrivial {
            out.set(format!("{key}_PARTITE_NONTRIVIAL"), list(pn));
        }
    }
    for k in 0..n {
        out.set(format!("MU_{k}"), report.mu[k]);
        out.set(format!("NU_{k}"), report.nu[k]);
    }
    out.set("LINKS", report.links.len());
    out.set("LAMBDA", report.lambda());
    out.set("ONE_SIDED_LAMBDA", report.one_sided_lambda());
    out.set("PARTITE", report.partite.is_some());
    if let Some(l) = report.partite_lambda() {
        out.set("PARTITE_LAMBDA", l);
    }
    let ok = report.sanity_ok();
    out.set("SANITY_OK", ok);
    Ok(ok)
}

fn levels(requested: Option<isize>, min: isize, max: isize) -> Result<Vec<isize>> {
    match requested {
        Some(k) if k < min || k > max => bail!("--level {k} out of range {min}..={max}"),
        Some(k) => Ok(vec![k]),
        None => Ok((min..=max).collect()),
    }
}

fn verify_weights(x: &X, tol: &Tolerance, out: &mut Output) -> bool {
    let r = x.weight_identity_residuals();
    out.set("WEIGHTS_BALANCE", r.balance);
    out.set("WEIGHTS_TOP_SUM", r.top_sum);
    out.set("WEIGHTS_LEVEL_SUM", r.level_sum);
    out.set("WEIGHTS_TOTAL_RATIO", r.total_ratio);
    let ok = r.max() < tol.exact;
    out.set("WEIGHTS_PASSED", ok);
    out.line(format!("weights: max residual {:e} ({})", r.max(), pass(ok)));
    ok
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn verify_operators(x: &X, a: &VerifyArgs, tol: &Tolerance, row_tol: f64, out: &mut Output) -> Result<bool> {
    let n = x.dim() as isize;
    let mut ok = true;
    let mut export = String::new();
    for k in levels(a.level, 0, n)? {
        let (upper, lower) = if k < n {
            let c = compose_check_dstar_d(x, k, tol.exact)?;
            if a.export_matrices.is_some() {
                export.push_str(&format!("# k={k} d*d\n{}", c.dstar_d.to_text()));
                export.push_str(&format!("# k={k} (k+2)M+\n{}", upper_walk(x, k)?.scaled((k + 2) as f64).to_text()));
                export.push_str(&format!("# k={k} dd*\n{}", c.d_dstar.to_text()));
                export.push_str(&format!("# k={k} (k+1)M-\n{}", lower_walk(x, k)?.scaled((k + 1) as f64).to_text()));
            }
            (Some(c.upper_residual), c.lower_residual)
        } else {
            let top = d_dstar(x, k)?;
            let low = lower_walk(x, k)?.scaled((k + 1) as f64);
            if a.export_matrices.is_some() {
                export.push_str(&format!("# k={k} dd*\n{}", top.to_text()));
                export.push_str(&format!("# k={k} (k+1)M-\n{}", low.to_text()));
            }
            (None, top.max_mixed_difference(&low)?)
        };
        let mut rows: f64 = 0.0;
        let mut walks = vec![lower_walk(x, k)?];
        if k < n {
            walks.push(upper_walk(x, k)?);
            walks.push(nonlazy_upper(x, k)?);
        }
        for w in &walks {
            rows = w.row_sums().iter().fold(rows, |acc, s| acc.max((s - 1.0).abs()));
        }
        let level_ok = upper.is_none_or(|u| u < tol.exact) && lower < tol.exact && rows < row_tol;
        if let Some(u) = upper {
            out.set(format!("OPERATORS_K{k}_UPPER_RESIDUAL"), u);
        }
        out.set(format!("OPERATORS_K{k}_LOWER_RESIDUAL"), lower);
        out.set(format!("OPERATORS_K{k}_ROW_SUM_ERROR"), rows);
        out.set(format!("OPERATORS_K{k}_PASSED"), level_ok);
        out.line(format!(
            "operators k={k}: d*d vs (k+2)M+ {}, dd* vs (k+1)M- {lower:e}, row sums {rows:e} ({})",
            upper.map_or("n/a".to_string(), |u| format!("{u:e}")),
            pass(level_ok)
        ));
        ok &= level_ok;
    }
    if let Some(path) = &a.export_matrices {
        fs::write(path, export).with_context(|| format!("writing {}", path.display()))?;
    }
    out.set("OPERATORS_PASSED", ok);
    Ok(ok)
}

fn verify_garland(x: &X, a: &VerifyArgs, tol: &Tolerance, out: &mut Output) -> Result<bool> {
    let n = x.dim() as isize;
    let seeds = SeedSplitter::new(a.seed);
    let report = link_spectral_report(x)?;
    let mut ok = true;
    for k in levels(a.level, 0, n)? {
        let s = seeds.child(k as u64);
        let loc = verify_localization_identities(x, k, a.trials, s.child(0).seed(), tol.bound)?;
        out.set(format!("GARLAND_LOCALIZATION_K{k}_MAX_RESIDUAL"), loc.max_residual());
        out.set(format!("GARLAND_LOCALIZATION_K{k}_PASSED"), loc.passed());
        out.line(format!("localization k={k}: max residual {:e} ({})", loc.max_residual(), pass(loc.passed())));
        ok &= loc.passed();
        if k < n {
            let g = verify_garland_decomposition(x, k, a.trials, s.child(1).seed(), tol.bound)?;
            out.set(format!("GARLAND_DECOMPOSITION_K{k}_MAX_RESIDUAL"), g.max_residual);
            out.set(format!("GARLAND_DECOMPOSITION_K{k}_PASSED"), g.passed());
            out.line(format!("decomposition k={k}: max residual {:e} ({})", g.max_residual, pass(g.passed())));
            ok &= g.passed();
            let lambda = report.lambda_at(k as usize);
            let b = verify_orthogonal_bound(x, k, lambda, a.trials, s.child(2).seed(), tol.bound)?;
            out.set(format!("GARLAND_ORTHOGONAL_K{k}_LAMBDA"), lambda);
            out.set(format!("GARLAND_ORTHOGONAL_K{k}_MAX_EFFECTIVE_LAMBDA"), b.max_effective_lambda);
            out.set(format!("GARLAND_ORTHOGONAL_K{k}_PASSED"), b.passed());
            out.line(format!(
                "orthogonal bound k={k}: λ {lambda}, effective {} ({})",
                b.max_effective_lambda,
                pass(b.passed())
            ));
            ok &= b.passed();
        }
    }
    out.set("GARLAND_PASSED", ok);
    Ok(ok)
}

fn verify_exchange(x: &X, a: &VerifyArgs, tol: &Tolerance, out: &mut Output) -> Result<bool> {
    let families = match &a.sets {
        Some(path) => vec![load_sets(path)?],
        None => {
            let seeds = SeedSplitter::new(a.seed);
            (0..a.families).map(|j| random_family(x, 0.7, &mut seeds.stream(j as u64))).collect()
        }
    };
    let ctx = ProductContext::new(x)?;
    let report = link_spectral_report(x)?;
    let mut ok = true;
    for (j, sets) in families.iter().enumerate() {
        let key = format!("EXCHANGE_F{j:03}");
        let e = verify_exchange_lemmas(x, sets, tol.exact)?;
        let worst = e
            .dstar_d
            .iter()
            .chain(&e.d_dstar)
            .chain(&e.product)
            .map(|(_, r)| *r)
            .chain(e.corollary.iter().map(|(_, a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0)))
            .fold(0.0, f64::max);
        let b = bottom_product_value(x, sets, tol.exact)?;
        let m = verify_mixing(x, &ctx, sets, Hypothesis::two_sided(&report, None))?;
        let tele_ok = m.identities_ok(tol.bound);
        let fam_ok = e.passed() && b.agree && tele_ok;
        out.set(format!("{key}_SETS"), sets_text(sets));
        out.set(format!("{key}_MAX_RESIDUAL"), worst);
        out.set(format!("{key}_BOTTOM"), b.assembled);
        out.set(format!("{key}_BOTTOM_CLOSED_FORM"), b.closed_form);
        out.set(format!("{key}_TELESCOPING_RESIDUAL"), m.telescoping_residual);
        out.set(format!("{key}_PASSED"), fam_ok);
        out.line(format!(
            "exchange family {j} [{}]: lemmas {worst:e}, bottom {} vs {}, telescoping {:e} ({})",
            sets_text(sets),
            b.assembled,
            b.closed_form,
            m.telescoping_residual,
            pass(fam_ok)
        ));
        ok &= fam_ok;
    }
    out.set("EXCHANGE_PASSED", ok);
    Ok(ok)
}

pub fn verify(a: &VerifyArgs, tol: Tolerance, row_tol: Option<f64>, out: &mut Output) -> Result<bool> {
    let x = load_complex(&a.complex)?;
    let row_tol = row_tol.unwrap_or(ROW_SUM_TOL);
    let all = a.suite == Suite::All;
    let mut ok = true;
    if all || a.suite == Suite::Weights {
        ok &= verify_weights(&x, &tol, out);
    }
    if all || a.suite == Suite::Operators {
        ok &= verify_operators(&x, a, &tol, row_tol, out)?;
    }
    if all || a.suite == Suite::Garland {
        ok &= verify_garland(&x, a, &tol, out)?;
    }
    if all || a.suite == Suite::Exchange {
        ok &= verify_exchange(&x, a, &tol, out)?;
    }
    out.set("VERIFY_PASSED", ok);
    Ok(ok)
}

fn mixing_keys(prefix: &str, m: &MixingReport, out: &mut Output) {
    let k = |s: &str| format!("{prefix}{s}");
    out.set(k("SETS"), sets_text(&m.sets));
    out.set(k("LHS"), m.lhs);
    out.set(k("RHS"), m.rhs);
    out.set(k("HOLDS"), m.holds());
    out.set(k("SLACK"), m.slack());
    out.set(k("MASS"), m.mass);
    out.set(k("MAIN_TERM"), m.main_term);
    out.set(k("CONSTANT"), m.constant);
    out.set(k("LAMBDA"), m.lambda);
    out.set(k("HYPOTHESIS_VERIFIED"), m.hypothesis_verified);
    out.set(k("PAIR_TERM"), m.pair_term);
    out.set(k("TELESCOPING_RESIDUAL"), m.telescoping_residual);
    out.set(k("PAIRING_RESIDUAL"), m.pairing_residual);
    for b in &m.brackets {
        out.set(k(&format!("BRACKET_K{}_VALUE", b.k)), b.value);
        out.set(k(&format!("BRACKET_K{}_BOUND", b.k)), b.bound);
        out.set(k(&format!("BRACKET_K{}_WITHIN_BOUND", b.k)), b.within_bound());
    }
    if let Some(r) = &m.regular {
        out.set(k("REGULAR_COUNT"), r.count);
        out.set(k("REGULAR_LHS"), r.lhs);
        out.set(k("REGULAR_RHS"), r.rhs);
    }
}

pub fn mixing(a: &MixingArgs, tol: Tolerance, out: &mut Output) -> Result<bool> {
    let x = load_complex(&a.complex)?;
    let report = link_spectral_report(&x)?;
    let ctx = ProductContext::new(&x)?;
    let partite: Option<PartiteStructure> = if a.partite {
        Some(detect_partite(&x.complex)?.ok_or_else(|| anyhow!("--partite given but the complex is not partite"))?)
    } else {
        None
    };
    let hyp = match &partite {
        Some(_) => Hypothesis::one_sided(&report, a.lambda),
        None => Hypothesis::two_sided(&report, a.lambda),
    };
    let run = |sets: &[Vec<usize>]| -> Result<MixingReport> {
        Ok(match &partite {
            Some(p) => {
                let p = p.aligned_to(sets)?;
                verify_partite_mixing(&x, &ctx, &p, sets, hyp)?
            }
            None => verify_mixing(&x, &ctx, sets, hyp)?,
        })
    };
    let describe = |m: &MixingReport| {
        format!(
            "[{}] |{} - {}| = {} <= {} ({})",
            sets_text(&m.sets),
            if m.partite { "m(X(U))/m(X(n))" } else { "m(X(U))" },
            m.main_term,
            m.lhs,
            m.rhs,
            pass(m.holds())
        )
    };
    out.set("PARTITE", partite.is_some());
    let ok = match (&a.sets, a.seeds) {
        (Some(path), _) => {
            let m = run(&load_sets(path)?)?;
            out.line(describe(&m));
            mixing_keys("", &m, out);
            m.holds() && m.identities_ok(tol.bound)
        }
        (None, Some(count)) => {
            let seeds = SeedSplitter::new(a.seed);
            let mut ok = true;
            let mut min_slack = f64::INFINITY;
            for j in 0..count {
                let mut rng = seeds.stream(j as u64);
                let sets = match &partite {
                    Some(p) => random_partite_family(p, a.density, &mut rng),
                    None => random_family(&x, a.density, &mut rng),
                };
                let m = run(&sets)?;
                out.line(describe(&m));
                mixing_keys(&format!("FAMILY_{j:03}_"), &m, out);
                min_slack = min_slack.min(m.slack());
                ok &= m.holds() && m.identities_ok(tol.bound);
            }
            out.set("FAMILIES", count);
            out.set("MIN_SLACK", min_slack);
            out.set("LAMBDA", hyp.lambda);
            out.set("HYPOTHESIS_VERIFIED", hyp.verified);
            out.set("HOLDS", ok);
            ok
        }
        (None, None) => bail!("give --sets FILE or --seeds N"),
    };
    Ok(ok)
}

fn step_keys(prefix: &str, s: &DescentStep, out: &mut Output) {
    let key = format!("{prefix}_K{}", s.k);
    out.set(format!("{key}_MEASURED"), s.measured);
    out.set(format!("{key}_FROM"), s.from);
    out.set(format!("{key}_BOUND"), s.bound.map_or("vacuous".to_string(), |b| b.to_string()));
    out.set(format!("{key}_OK"), s.ok());
}

pub fn descent(a: &DescentArgs, out: &mut Output) -> Result<bool> {
    let x = load_complex(&a.complex)?;
    let report = link_spectral_report(&x)?;
    let d = verify_descent(&report);
    for (name, steps) in [("MU_STEP", &d.mu_steps), ("NU_STEP", &d.nu_steps), ("MU_CHAIN", &d.mu_chain)] {
        for s in steps {
            out.line(format!(
                "{} k={}: measured {} from {} bound {} ({})",
                name.to_lowercase(),
                s.k,
                s.measured,
                s.from,
                s.bound.map_or("vacuous".to_string(), |b| b.to_string()),
                pass(s.ok())
            ));
            step_keys(name, s, out);
        }
    }
    for k in 0..x.dim() {
        out.set(format!("MU_{k}"), report.mu[k]);
        out.set(format!("NU_{k}"), report.nu[k]);
    }
    if let Some(t) = a.target {
        out.set("THRESHOLD", threshold_for_target(t, x.dim())?);
    }
    out.set("DESCENT_SKIPPED", d.skipped());
    out.set("DESCENT_PASSED", d.passed());
    Ok(d.passed())
}

pub fn overlap(a: &OverlapArgs, out: &mut Output) -> Result<bool> {
    let x = load_complex(&a.complex)?;
    let pts = parse_points(&read(&a.points)?).with_context(|| format!("parsing {}", a.points.display()))?;
    let f = PointMap::new(&x.complex, &pts)?;
    let n = x.dim();
    let variant = if a.partite {
        if detect_partite(&x.complex)?.is_none() {
            bail!("--partite given but the complex is not partite");
        }
        OverlapVariant::Partite
    } else {
        OverlapVariant::NonPartite
    };
    let lambda = match a.lambda {
        Some(l) => l,
        None => {
            let r = link_spectral_report(&x)?;
            if a.partite {
                r.one_sided_lambda()
            } else {
                r.lambda()
            }
        }
    };
    let bound = overlap_bound(lambda, n, a.pach, variant)?;
    let report = match a.method {
        Method::Exact2d => overlap_exact_2d(&x.complex, &f)?,
        Method::Sample => overlap_sampled(&x.complex, &f, a.samples, a.seed)?,
    }
    .with_bound(bound);
    let holds = report.bound_holds().unwrap_or(true);
    out.line(format!(
        "{}: depth {} of {} at ({}), overlap {}; bound {} ({})",
        report.method.name(),
        report.depth,
        report.tops,
        list(&report.witness),
        report.overlap,
        bound,
        if holds { "holds" } else { "exceeds overlap" }
    ));
    out.set("METHOD", report.method.name());
    out.set("DEPTH", report.depth);
    out.set("TOPS", report.tops);
    out.set("OVERLAP", report.overlap);
    out.set("WITNESS", list(&report.witness));
    if let Some(b) = report.boundary_depth {
        out.set("BOUNDARY_DEPTH", b);
    }
    out.set("EVALUATED", report.evaluated);
    out.set("DEGENERATE", report.degenerate);
    out.set("PERTURBED", report.perturbed);
    out.set("LAMBDA", lambda);
    out.set("PACH", a.pach);
    out.set("BOUND", bound);
    out.set("BOUND_HOLDS", holds);
    Ok(!a.assert_bound || holds)
}
