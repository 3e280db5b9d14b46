use std::fs;
use std::path::Path;

use holo2d::geometry::{default_tau, parse_vec2, LadderSpec, RayGeometry, RaySign, Vec2};
use holo2d::io::{fmt_f64, load_ray, write_coefficient_block, write_field_csv, write_intensity_csv, RaySidecar};
use holo2d::recover::{reconstruct_psi1, recover_farfield, Perturbation, RecoveryReport, RecoverySettings};
use holo2d::scenes::{sample_ray, MultipoleScene, RayMeta, Scene};
use holo2d::specfun::{h0_zeros, hankel01};
use holo2d::verify::run_suite;
use holo2d::{Error, Result};
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::svg::{Chart, Series};
use crate::{ForwardArgs, RecoverArgs, VerifyArgs, ZerosArgs};

pub fn init_threads() -> Result<()> {
    let Ok(text) = std::env::var("HOLO2D_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("HOLO2D_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// SHA-256 of the canonical JSON form (keys sorted) of a configuration.
fn config_hash(config: &Map<String, Value>) -> String {
    let digest = Sha256::digest(serde_json::to_string(config).expect("config serializes"));
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_theta(text: &str) -> Result<Vec2> {
    if text.contains(',') {
        return parse_vec2(text);
    }
    let angle: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("theta must be `x,y` or an angle in radians, got {text:?}")))?;
    if !angle.is_finite() {
        return Err(Error::Parse(format!("non-finite angle {text:?}")));
    }
    Ok(Vec2::from_angle(angle))
}

fn vec_json(v: Vec2) -> Value {
    json!([v.x, v.y])
}

pub fn forward(args: &ForwardArgs) -> Result<u8> {
    let scene_text = read(&args.scene)?;
    let scene = MultipoleScene::from_json(&scene_text)?;
    let (kappa, k) = (scene.kappa(), scene.wave_vector());
    let theta = match &args.theta {
        Some(t) => parse_theta(t)?,
        None => Vec2::new(k.y, -k.x) * (1.0 / k.norm()),
    };
    let base = parse_vec2(&args.base)?;
    let tau = match args.tau {
        Some(t) => t,
        None => default_tau(kappa, k, theta),
    };
    let settings = RecoverySettings::default();
    let ladder = args.radii.as_deref().map(LadderSpec::parse).transpose()?;

    let mut metas = Vec::new();
    for sign in [RaySign::Plus, RaySign::Minus] {
        let geometry = RayGeometry::new(base, theta, sign, tau)?;
        geometry.validate(kappa, k, settings.d_min)?;
        metas.push(RayMeta::new(kappa, k, geometry, base)?);
    }

    let mut config = Map::new();
    config.insert("command".into(), json!("forward"));
    config.insert("scene".into(), serde_json::from_str(&scene.to_json())?);
    config.insert("theta".into(), vec_json(metas[0].geometry.theta));
    config.insert(
        "theta_source".into(),
        json!(if args.theta.is_some() { "explicit" } else { "default" }),
    );
    config.insert("base".into(), vec_json(base));
    config.insert("tau".into(), json!(tau));
    config.insert(
        "tau_source".into(),
        json!(if args.tau.is_some() { "explicit" } else { "default" }),
    );
    config.insert(
        "radii".into(),
        json!(ladder.map_or_else(|| "recovery-windows".to_string(), |l| l.to_string())),
    );
    config.insert("order".into(), json!(args.order));
    config.insert("d_min".into(), json!(settings.d_min));
    let hash = config_hash(&config);

    for meta in &metas {
        let radii = match ladder {
            Some(l) => l.phase_aligned(meta.alpha()),
            None => settings.sampling_radii(meta, args.order),
        };
        let data = sample_ray(&scene, *meta, &radii)?;
        let mut sidecar = RaySidecar::from_meta(meta, &hash);
        sidecar.config = config.clone();
        let label = meta.geometry.sign.label();
        write(&args.out, &format!("{label}.csv"), &write_intensity_csv(&data.rows))?;
        write(&args.out, &format!("{label}.json"), &(sidecar.to_json() + "\n"))?;
        println!(
            "{label}: {} rows, D = {:.6}, written to {}",
            data.rows.len(),
            meta.d_value(),
            args.out.join(format!("{label}.csv")).display()
        );
    }
    println!("config hash {hash}");
    Ok(0)
}

fn parse_perturbation(text: &str) -> Result<Perturbation> {
    let bad = || Error::Parse(format!("perturbation must be ORDER:SIZE, got {text:?}"));
    let (order, size) = text.split_once(':').ok_or_else(bad)?;
    let order: usize = order.trim().parse().map_err(|_| bad())?;
    let size: f64 = size.trim().parse().map_err(|_| bad())?;
    if !size.is_finite() {
        return Err(bad());
    }
    Ok(Perturbation {
        order,
        delta: Complex64::new(size, 0.0),
    })
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn recover(args: &RecoverArgs) -> Result<u8> {
    let mut inputs = Vec::new();
    let mut input_hashes = Map::new();
    for label in ["plus", "minus"] {
        let csv = read(&args.input.join(format!("{label}.csv")))?;
        let sidecar = read(&args.input.join(format!("{label}.json")))?;
        input_hashes.insert(format!("{label}.csv"), json!(sha256_hex(&csv)));
        input_hashes.insert(format!("{label}.json"), json!(sha256_hex(&sidecar)));
        let data = load_ray(&csv, &sidecar).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{label} ray: {msg}")),
            Error::Parse(msg) => Error::Parse(format!("{label}.csv/{label}.json: {msg}")),
            other => other,
        })?;
        inputs.push(data);
    }
    let settings = RecoverySettings {
        override_precision_cap: args.override_precision_cap,
        perturbation: args.perturb.as_deref().map(parse_perturbation).transpose()?,
        ..Default::default()
    };
    let report = recover_farfield(&inputs[0], &inputs[1], args.order, &settings)?;
    let kappa = report.plus.kappa;
    let radii = match &args.radii {
        Some(spec) => LadderSpec::parse(spec)?.radii(),
        None => LadderSpec::spanning(10.0 / kappa, 100.0 / kappa, 10)?.radii(),
    };
    let samples = reconstruct_psi1(&report, &radii)?;

    let mut config = Map::new();
    config.insert("command".into(), json!("recover"));
    config.insert("inputs".into(), Value::Object(input_hashes));
    config.insert("order".into(), json!(args.order));
    config.insert("reconstruction_radii".into(), json!(radii));
    config.insert("override_precision_cap".into(), json!(args.override_precision_cap));
    if let Some(p) = &settings.perturbation {
        config.insert(
            "perturbation".into(),
            json!({"order": p.order, "delta": [p.delta.re, p.delta.im]}),
        );
    }
    let hash = config_hash(&config);

    let fit_residuals = |ray: RaySign| -> Vec<f64> {
        report
            .estimates
            .iter()
            .filter(|e| e.ray == ray)
            .map(|e| e.extrapolation.fit_residual)
            .collect()
    };
    write(
        &args.out,
        "farfield_plus.csv",
        &write_coefficient_block(&report.f_plus, &fit_residuals(RaySign::Plus)),
    )?;
    write(
        &args.out,
        "farfield_minus.csv",
        &write_coefficient_block(&report.f_minus, &fit_residuals(RaySign::Minus)),
    )?;
    write(
        &args.out,
        "karp_F.csv",
        &write_coefficient_block(&report.karp.f, &report.system_residual),
    )?;
    write(
        &args.out,
        "karp_G.csv",
        &write_coefficient_block(&report.karp.g, &report.system_residual),
    )?;
    write(&args.out, "reconstruction.csv", &write_field_csv(&samples))?;

    let estimates: Vec<Value> = report
        .estimates
        .iter()
        .map(|e| {
            json!({
                "order": e.order,
                "ray": e.ray.label(),
                "samples": e.extrapolation.samples,
                "terms": e.extrapolation.terms,
                "aligned": e.extrapolation.aligned,
                "fit_residual": e.extrapolation.fit_residual,
                "condition": e.extrapolation.condition,
                "growth": e.extrapolation.growth,
            })
        })
        .collect();
    let summary = json!({
        "config_hash": hash,
        "config": config,
        "kappa": kappa,
        "k": vec_json(report.plus.k),
        "theta": vec_json(report.plus.geometry.theta),
        "frame_origin": vec_json(report.frame_origin()),
        "frame_angle": report.plus.frame_angle(),
        "tau": report.plus.geometry.tau,
        "estimates": estimates,
        "warnings": report.warnings,
    });
    write(
        &args.out,
        "report.json",
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    if args.plots {
        write_plots(&args.out, &report, &samples)?;
    }

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{:>5}  {:>24}  {:>24}  {:>24}  {:>24}",
        "order", "Re f(phi)", "Im f(phi)", "Re f(phi+pi)", "Im f(phi+pi)"
    );
    for (n, (p, m)) in report.f_plus.iter().zip(&report.f_minus).enumerate() {
        println!(
            "{n:>5}  {:>24}  {:>24}  {:>24}  {:>24}",
            fmt_f64(p.re),
            fmt_f64(p.im),
            fmt_f64(m.re),
            fmt_f64(m.im)
        );
    }
    println!("config hash {hash}");
    Ok(0)
}

fn write_plots(dir: &Path, report: &RecoveryReport, samples: &[holo2d::recover::FieldSample]) -> Result<()> {
    for ray in [RaySign::Plus, RaySign::Minus] {
        let series: Vec<Series> = report
            .estimates
            .iter()
            .filter(|e| e.ray == ray)
            .map(|e| Series {
                label: format!("order {}", e.order),
                points: e
                    .radii
                    .iter()
                    .zip(&e.sequence)
                    .map(|(t, v)| (*t, (v - e.value).norm()))
                    .collect(),
            })
            .collect();
        let title = format!("Estimator ladder, {} ray", ray.label());
        let chart = Chart {
            title: &title,
            x_label: "frame radius t",
            y_label: "|E(t) - limit|",
            log_x: true,
            log_y: true,
        };
        write(dir, &format!("estimator_{}.svg", ray.label()), &chart.render(&series))?;
    }
    let mut series = Vec::new();
    for ray in [RaySign::Plus, RaySign::Minus] {
        let on_ray: Vec<_> = samples.iter().filter(|s| s.ray == ray).collect();
        series.push(Series {
            label: format!("Re psi1, {}", ray.label()),
            points: on_ray.iter().map(|s| (s.s, s.value.re)).collect(),
        });
        series.push(Series {
            label: format!("Im psi1, {}", ray.label()),
            points: on_ray.iter().map(|s| (s.s, s.value.im)).collect(),
        });
    }
    let chart = Chart {
        title: "Reconstructed scattered field",
        x_label: "s",
        y_label: "psi1",
        log_x: true,
        log_y: false,
    };
    write(dir, "reconstruction.svg", &chart.render(&series))
}

fn default_scene() -> Result<MultipoleScene> {
    MultipoleScene::new(
        1.0,
        Vec2::new(0.0, 1.0),
        [
            (0, Complex64::new(1.0, 0.0)),
            (1, Complex64::new(0.5, 0.0)),
            (2, Complex64::new(0.25, 0.0)),
        ],
    )
}

pub fn verify(args: &VerifyArgs) -> Result<u8> {
    let scene = match &args.scene {
        Some(path) => MultipoleScene::from_json(&read(path)?)?,
        None => default_scene()?,
    };
    let settings = RecoverySettings {
        override_precision_cap: args.override_precision_cap,
        ..Default::default()
    };
    let report = run_suite(&scene, args.order, &settings)?;
    for c in &report.checks {
        let status = match (c.passed, c.negative_control) {
            (true, false) => "PASS",
            (true, true) => "PASS (intentional failure detected)",
            (false, false) => "FAIL",
            (false, true) => "FAIL (intentional failure not detected)",
        };
        let relation = if c.negative_control { ">" } else { "<=" };
        println!(
            "{:<32} {:>10.3e} {relation} {:<8.1e} {status}",
            c.name, c.residual, c.tolerance
        );
    }
    println!(
        "{} checks, {} passed, {} failed",
        report.checks.len(),
        report.passed,
        report.failed
    );
    if let Some(dir) = &args.out {
        let summary = json!({
            "scene": serde_json::from_str::<Value>(&scene.to_json())?,
            "order": args.order,
            "checks": report.checks,
            "passed": report.passed,
            "failed": report.failed,
        });
        write(dir, "verify.json", &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

pub fn zeros(args: &ZerosArgs) -> Result<u8> {
    if args.count > 20 {
        return Err(Error::Config(format!(
            "at most 20 zeros can be listed, got {}",
            args.count
        )));
    }
    let mut zs = h0_zeros(args.count).map_err(|e| match e {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    })?;
    zs.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut csv = String::from("j,re,im,abs,abs_h0\n");
    println!(
        "{:>3}  {:>24}  {:>24}  {:>24}  {:>10}",
        "j", "Re z", "Im z", "|z|", "|H0(z)|"
    );
    for (j, z) in zs.iter().enumerate() {
        let h0 = hankel01(*z)?.0.norm();
        println!(
            "{:>3}  {:>24}  {:>24}  {:>24}  {h0:>10.2e}",
            j + 1,
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(z.norm())
        );
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            j + 1,
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(z.norm()),
            fmt_f64(h0)
        ));
    }
    if let Some(dir) = &args.out {
        write(dir, "zeros.csv", &csv)?;
    }
    Ok(0)
}
