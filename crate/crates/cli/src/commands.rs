use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use padic_fractal::integrate::{
    haar_integral, parse_complex, path_sweep, straight_path, write_sweep_csv, Integrand,
};
use padic_fractal::maps::{
    image_points, nu_margin_bound, nu_margin_bound_scaled, solenoid_point, tau_derivative_check,
    DistortionOptions, MapParams, SolenoidParams,
};
use padic_fractal::measures::{box_dimension, log_spaced_scales, BoxDimension, PointCloud};
use padic_fractal::padic::{AWord, Region};
use padic_fractal::profiles::Depth;
use padic_fractal::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cert::{delta_plus_interval, in_domain, mask_point, CertOptions, Verdict};
use crate::config::RunConfig;
use crate::output::{OutputDir, Report};
use crate::raster::{hit_counts, tone_map, Raster, Viewport};

const LABELS: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

fn cert_options(cfg: &RunConfig) -> CertOptions {
    CertOptions {
        max_depth: cfg.mask.max_depth,
        max_states: cfg.mask.max_states,
        truncation: cfg.mask.truncation,
    }
}

/// Fails with `NotCertified` unless `Delta^+ > 0` is certified, when the
/// config asks for it.
fn require_embedding(cfg: &RunConfig, params: &MapParams) -> Result<Option<bool>> {
    if !cfg.require_embedding {
        return Ok(None);
    }
    let iv = delta_plus_interval(params, 0.0, cert_options(cfg))?;
    if iv.lower > 0.0 {
        Ok(Some(true))
    } else {
        Err(Error::NotCertified(format!(
            "Delta+ in [{}, {}] at s = {}",
            iv.lower,
            iv.upper,
            params.s()
        )))
    }
}

/// `sup |Upsilon|` over the region, from the geometric envelope.
pub fn envelope(params: &MapParams, region: &Region) -> f64 {
    let r = params.s().norm();
    let lowest = region
        .balls()
        .iter()
        .map(|b| b.center().v0().min(b.level()))
        .min()
        .unwrap_or(0);
    params.profile().sup_bound() * r.powi(lowest as i32) / (1.0 - r)
}

/// Image points of `region` at `depth`, rendered as a hit-count raster.
pub struct SetFrame {
    pub points: Vec<Complex64>,
    pub view: Viewport,
    pub raster: Raster,
    pub missed: usize,
}

pub fn render_set(
    params: &MapParams,
    region: &Region,
    depth: u32,
    width: u32,
    height: u32,
) -> Result<SetFrame> {
    let points = image_points(params, region, depth)?;
    let view = Viewport {
        center: Complex64::new(0.0, 0.0),
        half_width: envelope(params, region).max(f64::MIN_POSITIVE),
        width,
        height,
    };
    let (counts, missed) = hit_counts(&points, &view);
    Ok(SetFrame {
        raster: tone_map(&counts, width, height),
        points,
        view,
        missed,
    })
}

fn frame_stats(frame: &SetFrame, params: &MapParams, depth: u32) -> Value {
    json!({
        "s": [params.s().re, params.s().im],
        "depth": depth,
        "points": frame.points.len(),
        "outside_viewport": frame.missed,
        "half_width": frame.view.half_width,
    })
}

pub fn cmd_set(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let params = cfg.params()?;
    let region = cfg.bounded_region()?;
    let certified = require_embedding(cfg, &params)?;
    let frame = render_set(&params, &region, cfg.depth, cfg.width, cfg.height)?;
    let mut dir = OutputDir::create(out, "set", cfg)?;
    let stats = frame_stats(&frame, &params, cfg.depth);
    frame.raster.write_ppm(dir.path("set.ppm"))?;
    dir.manifest("set.ppm", stats.clone())?;
    if cfg.write_points {
        PointCloud::from_complex(&frame.points, Value::Null).write_csv(dir.path("set.csv"))?;
        dir.manifest("set.csv", stats.clone())?;
    }
    Ok(Report {
        command: "set",
        files: dir.files(),
        summary: stats,
        certified,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaskCell {
    pub s: Complex64,
    pub embedding: Verdict,
    pub delta: Verdict,
}

/// Certified `Delta^+ > t_+` and `delta > t_delta` over the grid of pixel
/// centers, rows top to bottom.
pub fn mask_grid(cfg: &RunConfig) -> Result<Vec<MaskCell>> {
    let profile = cfg.profile()?;
    let [r0, r1] = cfg.mask.re;
    let [i0, i1] = cfg.mask.im;
    let (w, h) = (cfg.width, cfg.height);
    let opts = cert_options(cfg);
    (0..w * h)
        .into_par_iter()
        .map(|k| {
            let (col, row) = (k % w, k / w);
            let s = Complex64::new(
                r0 + (r1 - r0) * (col as f64 + 0.5) / w as f64,
                i1 - (i1 - i0) * (row as f64 + 0.5) / h as f64,
            );
            let params = if in_domain(s) {
                Some(MapParams::upsilon(profile.clone(), s)?)
            } else {
                None
            };
            let (embedding, delta) = mask_point(
                params.as_ref(),
                cfg.mask.plus_threshold,
                cfg.mask.small_threshold,
                opts,
            )?;
            Ok(MaskCell {
                s,
                embedding,
                delta,
            })
        })
        .collect()
}

fn verdict_color(v: Verdict) -> [u8; 3] {
    match v {
        Verdict::Yes => [255, 255, 255],
        Verdict::No => [0, 0, 0],
        Verdict::Undecided => [128, 128, 128],
        Verdict::Outside => [64, 0, 0],
    }
}

pub fn cmd_mask(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let cells = mask_grid(cfg)?;
    let mut dir = OutputDir::create(out, "mask", cfg)?;
    let mut tally = std::collections::BTreeMap::new();
    for (name, pick) in [
        (
            "embedding",
            (|c: &MaskCell| c.embedding) as fn(&MaskCell) -> Verdict,
        ),
        ("delta", |c: &MaskCell| c.delta),
    ] {
        let mut img = Raster::new(cfg.width, cfg.height);
        let mut counts = std::collections::BTreeMap::new();
        for (k, c) in cells.iter().enumerate() {
            let v = pick(c);
            img.set(k as u32 % cfg.width, k as u32 / cfg.width, verdict_color(v));
            *counts.entry(v.as_str()).or_insert(0usize) += 1;
        }
        let file = format!("mask_{name}.ppm");
        img.write_ppm(dir.path(&file))?;
        dir.manifest(&file, json!(counts))?;
        tally.insert(name, counts);
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(dir.path("mask.csv"))?);
    writeln!(w, "s_re,s_im,embedding,delta")?;
    for c in &cells {
        writeln!(
            w,
            "{},{},{},{}",
            c.s.re,
            c.s.im,
            c.embedding.as_str(),
            c.delta.as_str()
        )?;
    }
    w.flush()?;
    dir.manifest("mask.csv", json!(tally))?;
    Ok(Report {
        command: "mask",
        files: dir.files(),
        summary: json!(tally),
        certified: None,
    })
}

pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let profile = cfg.profile()?;
    let region = cfg.bounded_region()?;
    let f = Integrand::parse(&cfg.sweep.integrand)?;
    let path = straight_path(
        parse_complex(&cfg.sweep.from)?,
        parse_complex(&cfg.sweep.to)?,
        cfg.sweep.points,
    );
    let opts = DistortionOptions {
        max_depth: cfg.mask.max_depth,
        threshold: Some(0.0),
        ..Default::default()
    };
    let rows = path_sweep(&path, cfg.theta, &profile, &region, &f, cfg.depth, &opts)?;
    let mut dir = OutputDir::create(out, "sweep", cfg)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    std::fs::write(dir.path("sweep.csv"), buf)?;
    let flagged = rows.iter().filter(|r| !r.certified).count();
    let stats = json!({ "rows": rows.len(), "flagged": flagged, "integrand": cfg.sweep.integrand });
    dir.manifest("sweep.csv", stats.clone())?;
    if cfg.sweep.frames {
        for (k, row) in rows.iter().enumerate() {
            let Some(s) = row.s else { continue };
            let label = LABELS.get(k).map(|&b| b as char).unwrap_or('_');
            let params = MapParams::upsilon(profile.clone(), s)?;
            let frame = render_set(
                &params,
                &region,
                cfg.sweep.frame_depth,
                cfg.width,
                cfg.height,
            )?;
            let file = format!("frame_{label}.ppm");
            frame.raster.write_ppm(dir.path(&file))?;
            let mut st = frame_stats(&frame, &params, cfg.sweep.frame_depth);
            st["d"] = json!([row.d.re, row.d.im]);
            dir.manifest(&file, st)?;
        }
    }
    let report = Report {
        command: "sweep",
        files: dir.files(),
        summary: stats,
        certified: Some(flagged == 0),
    };
    if cfg.require_embedding && flagged > 0 {
        return Err(Error::NotCertified(format!(
            "{flagged} of {} path points lack a certified embedding",
            rows.len()
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub s: Complex64,
    pub points: usize,
    pub estimate: f64,
    pub closed_form: f64,
    pub residual: f64,
    pub counts: Vec<(f64, usize)>,
}

/// Box dimension of the image of `region` at `depth`, fitted over
/// `|s|^coarse diam .. |s|^(depth - margin) diam`.
pub fn dimension_estimate(cfg: &RunConfig, params: &MapParams) -> Result<DimensionReport> {
    let region = cfg.bounded_region()?;
    let pts = image_points(params, &region, cfg.depth)?;
    let cloud = PointCloud::from_complex(&pts, Value::Null);
    let diam = cloud.extent();
    let r = params.s().norm();
    let fine = cfg.depth.saturating_sub(cfg.scales.fine_margin);
    if fine <= cfg.scales.coarse_level || diam == 0.0 {
        return Err(Error::Invalid(format!(
            "depth {} leaves no scale window below level {}",
            cfg.depth, cfg.scales.coarse_level
        )));
    }
    let scales = log_spaced_scales(
        diam * r.powi(cfg.scales.coarse_level as i32),
        diam * r.powi(fine as i32),
        cfg.scales.count,
    );
    let BoxDimension {
        estimate,
        counts,
        residual,
    } = box_dimension(&cloud, &scales)?;
    Ok(DimensionReport {
        s: params.s(),
        points: cloud.len(),
        estimate,
        closed_form: params.dimension(),
        residual,
        counts,
    })
}

pub fn cmd_dimension(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let params = cfg.params()?;
    let certified = require_embedding(cfg, &params)?;
    let rep = dimension_estimate(cfg, &params)?;
    let mut dir = OutputDir::create(out, "dimension", cfg)?;
    dir.json("dimension.json", &rep)?;
    Ok(Report {
        command: "dimension",
        files: dir.files(),
        summary: json!({
            "estimate": rep.estimate,
            "closed_form": rep.closed_form,
            "residual": rep.residual,
            "points": rep.points,
        }),
        certified,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolenoidReport {
    pub points: usize,
    pub estimate: f64,
    pub closed_form: f64,
    pub residual: f64,
    pub counts: Vec<(f64, usize)>,
    /// `tau`-derivative residuals at steps `h`, `h/2`, `h/4`.
    pub tau_residuals: Vec<f64>,
    pub tau_budgets: Vec<f64>,
}

pub fn solenoid_params(cfg: &RunConfig) -> Result<SolenoidParams> {
    SolenoidParams::new(
        cfg.a_sequence(cfg.solenoid.depth + 1)?,
        parse_complex(&cfg.solenoid.nu)?,
        parse_complex(&cfg.solenoid.alpha)?,
        cfg.named_profile(&cfg.solenoid.profile)?,
    )
}

fn random_word(sp: &SolenoidParams, rng: &mut ChaCha8Rng) -> Result<AWord> {
    let digits = (0..sp.a.len())
        .map(|k| rng.random_range(0..sp.a.radix(k)))
        .collect();
    AWord::new(sp.a.clone(), digits)
}

/// `Omega` at `samples` seeded random `(tau, x)`.
pub fn solenoid_cloud(cfg: &RunConfig, sp: &SolenoidParams) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pts = Vec::with_capacity(cfg.solenoid.samples);
    for _ in 0..cfg.solenoid.samples {
        let tau: f64 = rng.random();
        let x = random_word(sp, &mut rng)?;
        pts.push(solenoid_point(sp, tau, &x, cfg.solenoid.depth)?);
    }
    Ok(PointCloud::from_points3(&pts, Value::Null))
}

pub fn solenoid_estimate(
    cfg: &RunConfig,
    sp: &SolenoidParams,
    cloud: &PointCloud,
) -> Result<SolenoidReport> {
    let e = cloud.extent();
    let scales = log_spaced_scales(
        e / cfg.solenoid.coarse,
        e / cfg.solenoid.fine,
        cfg.solenoid.scale_count,
    );
    let bd = box_dimension(cloud, &scales)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0074_6175);
    let tau: f64 = rng.random();
    let x = random_word(sp, &mut rng)?;
    let mut tau_residuals = Vec::new();
    let mut tau_budgets = Vec::new();
    for k in 0..3 {
        let h = cfg.solenoid.step / 2f64.powi(k);
        let c = tau_derivative_check(sp, tau, &x, h, cfg.solenoid.depth)?;
        tau_residuals.push(c.residual);
        tau_budgets.push(c.budget);
    }
    Ok(SolenoidReport {
        points: cloud.len(),
        estimate: bd.estimate,
        closed_form: 1.0 + 1.0 / sp.nu.re,
        residual: bd.residual,
        counts: bd.counts,
        tau_residuals,
        tau_budgets,
    })
}

pub fn cmd_solenoid(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let sp = solenoid_params(cfg)?;
    let cloud = solenoid_cloud(cfg, &sp)?;
    let rep = solenoid_estimate(cfg, &sp, &cloud)?;
    let mut dir = OutputDir::create(out, "solenoid", cfg)?;
    cloud.write_csv(dir.path("solenoid.csv"))?;
    dir.manifest("solenoid.csv", json!({ "points": cloud.len() }))?;
    dir.json("solenoid_dimension.json", &rep)?;
    Ok(Report {
        command: "solenoid",
        files: dir.files(),
        summary: json!({
            "estimate": rep.estimate,
            "closed_form": rep.closed_form,
            "residual": rep.residual,
            "tau_residuals": rep.tau_residuals,
        }),
        certified: None,
    })
}

pub fn cmd_integrate(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let params = cfg.params()?;
    let domain = cfg.domain()?;
    let fs = cfg.integrands()?;
    let certified = require_embedding(cfg, &params)?;
    let results = fs
        .iter()
        .map(|f| haar_integral(&params, &domain, f, cfg.depth))
        .collect::<Result<Vec<_>>>()?;
    let mut dir = OutputDir::create(out, "integrate", cfg)?;
    let mut w = std::io::BufWriter::new(std::fs::File::create(dir.path("integrate.csv"))?);
    writeln!(w, "f,s_re,s_im,I_re,I_im,err,depth,cells")?;
    let s = params.s();
    let mut rows = Vec::new();
    for (spec, r) in cfg.integrands.iter().zip(&results) {
        writeln!(
            w,
            "{spec},{},{},{},{},{},{},{}",
            s.re, s.im, r.value.re, r.value.im, r.error_bound, r.depth, r.cells
        )?;
        rows.push(json!({
            "f": spec,
            "value": [r.value.re, r.value.im],
            "error_bound": r.error_bound,
        }));
    }
    w.flush()?;
    dir.manifest("integrate.csv", json!({ "s": [s.re, s.im] }))?;
    Ok(Report {
        command: "integrate",
        files: dir.files(),
        summary: json!(rows),
        certified,
    })
}

pub fn cmd_nu(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let phi = cfg.profile()?;
    let nu = phi.nu_default(cfg.nu_depth)?;
    let sigma = nu.value / (1.0 + nu.value);
    let osc = phi.oscillation_bound();
    let moduli: Vec<Value> = match phi.depth() {
        Depth::Finite(_) => vec![],
        Depth::Infinite => (1..=cfg.nu_depth.min(12))
            .map(|m| {
                phi.p_continuity_modulus(m, cfg.nu_depth.max(m + 2))
                    .map(|r| json!({ "m": m, "sampled": r.sampled, "upper": r.upper }))
            })
            .collect::<Result<_>>()?,
    };
    let mut summary = json!({
        "profile": phi.name(),
        "p": phi.base(),
        "nu": nu.value,
        "nu_uncertainty": nu.uncertainty,
        "nu_exact": nu.exact,
        "sigma": sigma,
        "oscillation": osc,
        "sup_bound": phi.sup_bound(),
        "sampled_sup": phi.sampled_sup(cfg.nu_depth.min(12))?,
        "moduli": moduli,
    });
    if cfg.s.is_some() || cfg.d.is_some() {
        let (s, _) = cfg.s()?;
        summary["nu_margin_bound"] = json!(nu_margin_bound(nu.lower(), s));
        summary["nu_margin_bound_scaled"] = json!(nu_margin_bound_scaled(nu.lower(), osc, s));
    }
    let mut dir = OutputDir::create(out, "nu", cfg)?;
    dir.json("nu.json", &summary)?;
    Ok(Report {
        command: "nu",
        files: dir.files(),
        summary,
        certified: None,
    })
}
