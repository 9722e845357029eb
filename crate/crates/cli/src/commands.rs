use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::{json, Map, Value};
use sobker::embedding::{default_beta, embedding_bound_radial, embedding_bounds_sobolev, embedding_norm};
use sobker::oracle::eval_fourier_kernel;
use sobker::qmc::{info_complexity_bound, search_point_set, worst_case_error};
use sobker::recovery::{eval_spline, fit_spline};
use sobker::{eval_kernel, KernelSpec, PointSet, QuadratureConfig};

use crate::family::FamilyArgs;
use crate::io::{coord_header, num, read_matrix, Table};
use crate::{Cli, Cmd, ComplexityArgs, EmbedArgs, EmbedCmd, EvalArgs, KernelCmd, RecoverArgs, SearchArgs, TableArgs, WceArgs};

/// Closed form and oracle disagree beyond the tolerance.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Inconsistent(pub String);

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Kernel(KernelCmd::Eval(a)) => kernel_eval(a),
        Cmd::Kernel(KernelCmd::Table(a)) => kernel_table(a),
        Cmd::Embed(a) => embed(a),
        Cmd::Wce(a) => wce(a),
        Cmd::Search(a) => search(a),
        Cmd::Complexity(a) => complexity(a),
        Cmd::Recover(a) => recover(a),
    }
}

fn check_len(v: &[f64], d: usize, name: &str) -> Result<()> {
    if v.len() != d {
        bail!("--{name} has {} coordinates, the kernel has d = {d}", v.len());
    }
    Ok(())
}

fn kernel_eval(a: EvalArgs) -> Result<()> {
    let spec = a.family.spec()?;
    check_len(&a.x, spec.d(), "x")?;
    check_len(&a.t, spec.d(), "t")?;
    if !a.oracle {
        println!("{}", eval_kernel(&spec, &a.x, &a.t)?);
        return Ok(());
    }
    let reference = a
        .family
        .reference(&spec)?
        .context("--oracle needs a closed form to compare against; this family has none")?;
    let value = eval_kernel(&reference, &a.x, &a.t)?;
    let cfg = QuadratureConfig {
        panels_per_unit: a.panels_per_unit,
        gauss_order: a.gauss_order,
        truncation_radius: a.truncation_radius,
        target_abs_tol: a.target_abs_tol,
        ..QuadratureConfig::default()
    };
    cfg.validate()?;
    let oracle = eval_fourier_kernel(&spec.symbol(), &a.x, &a.t, &cfg)?;
    let diff = (value - oracle.value).abs();
    let ok = diff <= a.tol;
    let mut t = Table::stdout(&["value", "oracle", "oracle_err", "abs_diff", "tol", "status"].map(String::from))?;
    t.row([num(value), num(oracle.value), num(oracle.err), num(diff), num(a.tol), status(ok)])?;
    t.finish()?;
    if !ok {
        return Err(Inconsistent(format!("closed form and oracle differ by {diff:e} > {:e}", a.tol)).into());
    }
    Ok(())
}

fn status(ok: bool) -> String {
    if ok { "PASS" } else { "FAIL" }.to_string()
}

fn kernel_table(a: TableArgs) -> Result<()> {
    if !(a.step > 0.0) || !(a.rmax >= 0.0) || !a.rmax.is_finite() {
        bail!("kernel table requires step > 0 and a finite rmax >= 0");
    }
    let spec = a.family.spec()?;
    let rows = (a.rmax / a.step + 1e-9).floor() as usize;
    let origin = vec![0.0; spec.d()];
    let mut t = Table::stdout(&["r".to_string(), "k".to_string()])?;
    for i in 0..=rows {
        let r = i as f64 * a.step;
        let mut x = origin.clone();
        x[0] = r;
        t.row([num(r), num(eval_kernel(&spec, &x, &origin)?)])?;
    }
    t.finish()
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(':').context("--d-range must look like a:b")?;
    let a: usize = a.trim().parse().context("--d-range start is not a count")?;
    let b: usize = b.trim().parse().context("--d-range end is not a count")?;
    if a == 0 || b < a {
        bail!("--d-range needs 1 <= a <= b, got {a}:{b}");
    }
    Ok((a, b))
}

fn embed(a: EmbedArgs) -> Result<()> {
    if let Some(EmbedCmd::Radial { d, s, beta }) = a.radial {
        let beta = beta.unwrap_or_else(|| default_beta(d, s));
        let bound = embedding_bound_radial(d, s, beta)?;
        let mut t = Table::stdout(&["d", "s", "beta", "bound"].map(String::from))?;
        t.row([d.to_string(), num(s), num(beta), num(bound)])?;
        return t.finish();
    }
    let (lo, hi) = parse_range(&a.d_range)?;
    let mut t = Table::stdout(&["d", "lower", "mid", "upper", "cap", "chain"].map(String::from))?;
    for d in lo..=hi {
        let b = embedding_bounds_sobolev(d, d as u32 / 2 + 1)?;
        t.row([d.to_string(), num(b.lower), num(b.mid), num(b.upper), num(b.cap), status(b.chain_holds())])?;
    }
    t.finish()
}

fn points_of(path: &std::path::Path, d: usize) -> Result<PointSet> {
    let rows = read_matrix(path, d)?;
    if rows.is_empty() {
        bail!("{} has no points", path.display());
    }
    Ok(PointSet::new(rows, format!("file:{}", path.display()))?)
}

fn to_object(v: impl serde::Serialize) -> Result<Map<String, Value>> {
    match serde_json::to_value(v)? {
        Value::Object(m) => Ok(m),
        _ => bail!("expected a JSON object"),
    }
}

fn wce(a: WceArgs) -> Result<()> {
    let spec = a.family.spec()?;
    let rho = a.density.density(spec.d(), a.seed)?;
    let pts = points_of(&a.points, spec.d())?;
    let report = worst_case_error(&spec, &rho, &pts, a.mc)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn search(a: SearchArgs) -> Result<()> {
    let spec = a.family.spec()?;
    let rho = a.density.density(spec.d(), a.seed)?;
    let res = search_point_set(&spec, &rho, a.n, a.trials, a.seed, a.mc)?;
    let mut t = Table::file(&a.out, &coord_header(spec.d()))?;
    for p in res.points.points() {
        t.row(p.iter().map(|&v| num(v)))?;
    }
    t.finish()?;
    let mut obj = to_object(&res.report)?;
    obj.insert("trials".into(), json!(res.trials));
    obj.insert("best_trial".into(), json!(res.best_trial));
    obj.insert("seed".into(), json!(a.seed));
    obj.insert("bound".into(), json!(res.bound));
    obj.insert("within_bound".into(), json!(res.within_bound));
    obj.insert("check".into(), json!(status(res.within_bound)));
    println!("{}", Value::Object(obj));
    Ok(())
}

fn complexity(a: ComplexityArgs) -> Result<()> {
    let fam = FamilyArgs { family: a.family, d: a.d, s: a.s, weights: a.weights, truncation: a.truncation };
    let spec = fam.spec()?;
    let c = info_complexity_bound(&spec, a.eps)?;
    let mut t = Table::stdout(&["eps", "embedding_norm", "generic", "cap"].map(String::from))?;
    t.row([num(c.eps), num(c.embedding_norm), c.generic.to_string(), c.sobolev_cap.map(|v| v.to_string()).unwrap_or_default()])?;
    t.finish()
}

fn recover(a: RecoverArgs) -> Result<()> {
    let spec: KernelSpec = a.family.spec()?;
    let d = spec.d();
    let data = read_matrix(&a.data, d + 1)?;
    if data.is_empty() {
        bail!("{} has no rows", a.data.display());
    }
    let (xs, ys): (Vec<Vec<f64>>, Vec<f64>) = data.into_iter().map(|mut r| {
        let y = r.pop().expect("row has d + 1 columns");
        (r, y)
    }).unzip();
    let probes = read_matrix(&a.probe, d)?;
    let pts = PointSet::new(xs, format!("file:{}", a.data.display()))?;
    let model = fit_spline(&spec, &pts, &ys)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("cannot create {}", a.out_dir.display()))?;

    let mut header = coord_header(d);
    header.extend(["y".to_string(), "alpha".to_string()]);
    let mut t = Table::file(&a.out_dir.join("coefficients.csv"), &header)?;
    for ((x, y), alpha) in pts.points().iter().zip(&ys).zip(model.coeffs()) {
        t.row(x.iter().map(|&v| num(v)).chain([num(*y), num(*alpha)]))?;
    }
    t.finish()?;

    let mut header = coord_header(d);
    header.push("value".to_string());
    let mut t = Table::file(&a.out_dir.join("probe_values.csv"), &header)?;
    for p in &probes {
        let v = eval_spline(&model, p)?;
        t.row(p.iter().map(|&v| num(v)).chain([num(v)]))?;
    }
    t.finish()?;

    let summary = json!({
        "n": pts.len(),
        "d": d,
        "norm": model.norm(),
        "embedding_norm": embedding_norm(&spec)?,
        "jitter_used": model.jitter_used(),
        "residual": model.residual(),
        "probes": probes.len(),
    });
    let text = summary.to_string();
    fs::write(a.out_dir.join("summary.json"), format!("{text}\n"))?;
    println!("{text}");
    Ok(())
}
