use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use specset::blaschke::{self, LowerBound, LowerBoundOptions};
use specset::boundary::KernelTable;
use specset::bounds::{self, BoundOptions, BoundReport};
use specset::diagnostics::rank_one_maps;
use specset::gallery::GallerySpec;
use specset::io::{read_matrix_market, write_matrix_market};
use specset::matops::{self, eigen_decomposition};
use specset::regions::{self, RegionOptions, RegionSpec, Window};
use specset::{ComplexMatrix, Error, RegionError};

use crate::output::{float, Outputs};
use crate::{NumericalFailure, BoundsArgs, CommonArgs, GalleryArgs, MatrixArgs, Mode, OptimalArgs, RankoneArgs, TransientArgs};

/// The resolved configuration, echoed into manifest.json and report.json.
#[derive(Serialize)]
struct RunConfig<'a> {
    command: &'a str,
    matrix: &'a MatrixArgs,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    region: Option<&'a RegionSpec>,
    #[serde(flatten)]
    common: &'a CommonArgs,
    threads: usize,
    options: Value,
}

fn load_matrix(m: &MatrixArgs) -> Result<ComplexMatrix> {
    if let Some(spec) = &m.gallery {
        let g = GallerySpec::parse(spec).map_err(Error::from)?;
        return Ok(g.build()?);
    }
    let path = m.matrix.as_ref().context("either --gallery or --matrix is required")?;
    let raw = path.to_string_lossy();
    let path = Path::new(raw.strip_prefix("mm:").unwrap_or(&raw));
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_matrix_market(&text)
        .map_err(Error::from)
        .with_context(|| format!("parsing {}", path.display()))
}

fn load_region(text: &str) -> Result<RegionSpec> {
    let trimmed = text.trim();
    let spec = if trimmed.starts_with('{') {
        RegionSpec::from_json(trimmed)
    } else if trimmed.ends_with(".json") {
        let body = std::fs::read_to_string(trimmed).with_context(|| format!("reading {trimmed}"))?;
        RegionSpec::from_json(&body)
    } else {
        RegionSpec::from_flag(trimmed)
    };
    Ok(spec.map_err(Error::from)?)
}

fn bound_options(common: &CommonArgs, trace_numrad: bool) -> BoundOptions {
    BoundOptions {
        quadrature_tol: common.tol,
        trace_numerical_radius: trace_numrad,
        region: RegionOptions {
            n_angles: common.angles,
            grid: common.grid,
            ..RegionOptions::default()
        },
        ..BoundOptions::default()
    }
}

fn trace_csv(report: &BoundReport) -> Vec<u8> {
    let table = KernelTable {
        mus: Vec::new(),
        samples: report.traces.clone(),
    };
    let gamma = bounds::gamma_values(&report.path, &table);
    let mut out = String::from("s,re_zeta,im_zeta,re_tangent,im_tangent,mu_lambda_min,gamma,resolvent_norm,numrad_resolvent\n");
    let mut s = 0.0;
    for ((node, sample), g) in report.path.nodes().iter().zip(&report.traces).zip(gamma) {
        let w = sample.numerical_radius_resolvent.map(float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            float(s),
            float(sample.zeta.re),
            float(sample.zeta.im),
            float(sample.tangent.re),
            float(sample.tangent.im),
            float(sample.mu_lambda_min),
            float(g),
            float(sample.resolvent_norm),
            w
        ));
        s += node.ds;
    }
    out.into_bytes()
}

fn boundary_csv(report: &BoundReport) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    report.path.write_csv(&mut out)?;
    Ok(out)
}

fn lower_options(seed: u64) -> LowerBoundOptions {
    LowerBoundOptions {
        seed,
        ..LowerBoundOptions::default()
    }
}

/// report.json body: config first, then the bound fields.
fn report_json(config: &RunConfig, report: &BoundReport, extra: Value, seconds: Option<f64>) -> Result<Value> {
    let mut v = json!({ "config": config });
    let obj = v.as_object_mut().expect("object");
    if let Value::Object(fields) = serde_json::to_value(report)? {
        obj.extend(fields);
    }
    obj.insert("winner".into(), json!(report.winner()));
    if let Value::Object(fields) = extra {
        obj.extend(fields);
    }
    if let Some(t) = seconds {
        obj.insert("timings".into(), json!({ "total_seconds": t }));
    }
    Ok(v)
}

fn finish(outputs: Outputs, dir: &Path) -> Result<()> {
    for path in outputs.commit(dir)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

pub fn bounds(args: BoundsArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let a = load_matrix(&args.matrix)?;
    let spec = load_region(&args.region)?;
    let opts = bound_options(&args.common, args.trace_numrad);
    let region = regions::build_region(&a, &spec, &opts.region)?;
    let mut report = bounds::report_for_region(&a, &spec, &region, &opts)?;
    let lower: Option<LowerBound> = if args.lower {
        let lb = blaschke::lower_bound_for_region(&a, &region, &lower_options(args.seed))?;
        report.k_lower = Some(lb.k_lower);
        Some(lb)
    } else {
        None
    };
    let config = RunConfig {
        command: "bounds",
        matrix: &args.matrix,
        dim: a.dim(),
        region: Some(&spec),
        common: &args.common,
        threads,
        options: json!({ "lower": args.lower, "trace_numrad": args.trace_numrad, "seed": args.seed, "bound_options": opts }),
    };
    let extra = json!({ "lower_bound": lower });
    let seconds = args.common.timings.then(|| start.elapsed().as_secs_f64());
    let mut out = Outputs::default();
    out.add_json("manifest.json", &config)?;
    out.add_json("report.json", &report_json(&config, &report, extra, seconds)?)?;
    out.add("trace.csv", trace_csv(&report));
    out.add("boundary.csv", boundary_csv(&report)?);
    println!(
        "K_main = {:.6e}  K_cauchy = {:.6e}  c1 = {:.6}  c2 = {:.6}  components = {}",
        report.k_main, report.k_cauchy, report.c1, report.c2, report.components
    );
    if let Some(k) = report.k_lower {
        println!("K_lower = {k:.6e}");
    }
    finish(out, &args.common.out)
}

pub fn transient(args: TransientArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let a = load_matrix(&args.matrix)?;
    for &lambda in &eigen_decomposition(&a)?.eigenvalues {
        let ok = match args.mode {
            Mode::Exp => lambda.re < 0.0,
            Mode::Power => lambda.norm() < 1.0,
        };
        if !ok {
            return Err(Error::from(RegionError::SpectrumNotInside { lambda }).into());
        }
    }
    let default_region = match args.mode {
        Mode::Exp => "whalf",
        Mode::Power => "wdisk",
    };
    let spec = load_region(args.region.as_deref().unwrap_or(default_region))?;
    let opts = bound_options(&args.common, false);
    let region = regions::build_region(&a, &spec, &opts.region)?;
    let mut report = bounds::report_for_region(&a, &spec, &region, &opts)?;
    if args.lower {
        report.k_lower = Some(blaschke::lower_bound_for_region(&a, &region, &lower_options(args.seed))?.k_lower);
    }

    let (label, curve): (&str, Vec<(f64, f64)>) = match args.mode {
        Mode::Exp => {
            if !(args.t_max > 0.0 && args.t_max.is_finite()) || args.steps == 0 {
                bail!("need t_max > 0 and steps > 0");
            }
            let pts = (0..=args.steps)
                .map(|k| {
                    let t = args.t_max * k as f64 / args.steps as f64;
                    let e = matops::matrix_exponential(&a, t)?;
                    Ok((t, matops::operator_norm(e.as_dmatrix())?))
                })
                .collect::<Result<Vec<_>, specset::LinalgError>>()?;
            ("t", pts)
        }
        Mode::Power => {
            let mut p = ComplexMatrix::identity(a.dim());
            let mut pts = vec![(0.0, 1.0)];
            for k in 1..=args.k_max {
                p = ComplexMatrix::new(p.as_dmatrix() * a.as_dmatrix())?;
                pts.push((k as f64, matops::operator_norm(p.as_dmatrix())?));
            }
            ("k", pts)
        }
    };
    let (arg_sup, sup) = curve.iter().copied().fold((0.0, 0.0), |b, p| if p.1 > b.1 { p } else { b });

    let mut csv = format!("{label},norm\n");
    for (x, y) in &curve {
        if args.mode == Mode::Power {
            csv.push_str(&format!("{},{}\n", *x as u64, float(*y)));
        } else {
            csv.push_str(&format!("{},{}\n", float(*x), float(*y)));
        }
    }
    let config = RunConfig {
        command: "transient",
        matrix: &args.matrix,
        dim: a.dim(),
        region: Some(&spec),
        common: &args.common,
        threads,
        options: json!({
            "mode": args.mode, "t_max": args.t_max, "steps": args.steps, "k_max": args.k_max,
            "lower": args.lower, "seed": args.seed,
        }),
    };
    let extra = json!({
        "curve_sup": sup,
        "curve_argsup": arg_sup,
        "curve_sup_below_K_main": sup <= report.k_main,
    });
    let seconds = args.common.timings.then(|| start.elapsed().as_secs_f64());
    let mut out = Outputs::default();
    out.add_json("manifest.json", &config)?;
    out.add_json("report.json", &report_json(&config, &report, extra, seconds)?)?;
    out.add("transient.csv", csv.into_bytes());
    out.add("boundary.csv", boundary_csv(&report)?);
    println!("sup = {sup:.6e} at {label} = {arg_sup}  K_main = {:.6e}  K_cauchy = {:.6e}", report.k_main, report.k_cauchy);
    finish(out, &args.common.out)
}

fn parse_window(text: &str) -> Result<Window> {
    if text == "grcar" {
        return Ok(Window {
            re_min: -1.0,
            re_max: 3.0,
            im_min: -3.0,
            im_max: 3.0,
        });
    }
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad window {text:?}"))?;
    if v.len() != 4 || !v.iter().all(|x| x.is_finite()) || v[0] >= v[1] || v[2] >= v[3] {
        bail!("window must be re_min,re_max,im_min,im_max with min < max");
    }
    Ok(Window {
        re_min: v[0],
        re_max: v[1],
        im_min: v[2],
        im_max: v[3],
    })
}

pub fn rankone(args: RankoneArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let a = load_matrix(&args.matrix)?;
    let window = parse_window(&args.window)?;
    if args.resolution < 2 {
        bail!("resolution must be at least 2");
    }
    let d = rank_one_maps(&a, window, args.resolution)?;
    let total = args.resolution * args.resolution;
    let config = RunConfig {
        command: "rankone",
        matrix: &args.matrix,
        dim: a.dim(),
        region: None,
        common: &args.common,
        threads,
        options: json!({ "window": window, "resolution": args.resolution }),
    };
    let mut header = json!({
        "config": config,
        "window": window,
        "resolution": args.resolution,
        "masked": d.masked,
        "masked_fraction": d.masked as f64 / total as f64,
        "columns": "re_zeta,im_zeta,value",
    });
    if args.common.timings {
        header["timings"] = json!({ "total_seconds": start.elapsed().as_secs_f64() });
    }
    let mut ratio = Vec::new();
    d.write_csv(&d.ratio_map, &mut ratio)?;
    let mut overlap = Vec::new();
    d.write_csv(&d.overlap_map, &mut overlap)?;
    let mut out = Outputs::default();
    out.add_json("manifest.json", &config)?;
    out.add_json("report.json", &header)?;
    out.add("ratio.csv", ratio);
    out.add("overlap.csv", overlap);
    println!("{total} points, {} masked", d.masked);
    finish(out, &args.common.out)
}

pub fn optimal(args: OptimalArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let a = load_matrix(&args.matrix)?;
    let spec = load_region(&args.region)?;
    let opts = bound_options(&args.common, false);
    let region = regions::build_region(&a, &spec, &opts.region)?;
    let mut report = bounds::report_for_region(&a, &spec, &region, &opts)?;
    let lopts = LowerBoundOptions {
        degree: args.degree,
        starts: args.starts,
        seed: args.seed,
        max_iters: args.max_iters,
        center: None,
    };
    let lb = blaschke::lower_bound_for_region(&a, &region, &lopts)?;
    report.k_lower = Some(lb.k_lower);
    let below = lb.k_lower <= report.k_main * (1.0 + 1e-9);
    let config = RunConfig {
        command: "optimal",
        matrix: &args.matrix,
        dim: a.dim(),
        region: Some(&spec),
        common: &args.common,
        threads,
        options: json!({ "lower_bound_options": lopts }),
    };
    let extra = json!({ "lower_bound": lb, "K_lower_below_K_main": below });
    let seconds = args.common.timings.then(|| start.elapsed().as_secs_f64());
    let mut trace = String::from("start,iterations,initial,best,improved\n");
    for t in &lb.trace {
        trace.push_str(&format!(
            "{},{},{},{},{}\n",
            t.start,
            t.iterations,
            float(t.initial),
            float(t.best),
            u8::from(t.improved)
        ));
    }
    let mut out = Outputs::default();
    out.add_json("manifest.json", &config)?;
    out.add_json("report.json", &report_json(&config, &report, extra, seconds)?)?;
    out.add("starts.csv", trace.into_bytes());
    println!(
        "K_lower = {:.6e}  K_main = {:.6e}  K_cauchy = {:.6e}",
        lb.k_lower, report.k_main, report.k_cauchy
    );
    if !below {
        bail!(NumericalFailure(format!(
            "K_lower {} exceeds K_main {}",
            lb.k_lower, report.k_main
        )));
    }
    finish(out, &args.common.out)
}

pub fn gallery(args: GalleryArgs) -> Result<()> {
    let spec = GallerySpec::parse(&args.spec).map_err(Error::from)?;
    let a = spec.build()?;
    let text = write_matrix_market(&a, &format!("specset gallery {}", args.spec));
    match args.out {
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let name = path.file_name().context("output path has no file name")?.to_string_lossy().into_owned();
            let mut out = Outputs::default();
            out.add(&name, text.into_bytes());
            finish(out, dir)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
