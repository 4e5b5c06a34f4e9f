use std::path::{Path, PathBuf};

use panolayout::attention::{build_attention, normalize_max, spherical_blur};
use panolayout::boundary::BoundaryVector;
use panolayout::eval::{depth_metrics, layout_rmse, luminance_invdepth_pcc, EvalReport, PixelMask};
use panolayout::io::{
    read_boundary, read_color_png, read_label_png, read_layout_png, read_pfm, write_boundary,
    write_color_png, write_layout_png, write_pfm, PipelineConfig,
};
use panolayout::pipeline::{extract_cues, CueConfig};
use panolayout::recon::{
    estimate_plane_heights, reconstruct_bottom, reconstruct_bottom_exact, sample_depth_at_boundary,
};
use panolayout::synth::{perturb_labels, render_cuboid};
use panolayout::transforms::{AugmentPlan, Sample};
use panolayout::Error;

use crate::{Cli, Command};

/// A failed command: message plus process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Io { .. }) { 2 } else { 1 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Prefixes errors that do not already name a file with the offending
/// argument.
fn ctx<T>(r: panolayout::Result<T>, what: &str) -> Outcome<T> {
    r.map_err(|e| match e {
        Error::Io { .. } | Error::Format { .. } => e.into(),
        other => Failure {
            code: 1,
            message: format!("{what}: {other}"),
        },
    })
}

fn arg(flag: &str, path: &Path) -> String {
    format!("--{flag} {}", path.display())
}

fn write_text(path: &Path, text: &str) -> Outcome<()> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn make_dir(path: &Path) -> Outcome<()> {
    std::fs::create_dir_all(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

pub fn run(cli: Cli) -> Outcome<()> {
    let cfg = match &cli.config {
        Some(p) => ctx(PipelineConfig::load(p), &arg("config", p))?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        Command::SynthRoom { out, seed } => synth_room(&cfg, &out, seed),
        Command::ExtractCues {
            labels,
            normals,
            depth,
            out,
            debug,
        } => extract(&cfg, &labels, &normals, &depth, &out, debug),
        Command::ReconBottom {
            top,
            depth,
            exact,
            out,
        } => recon(&cfg, &top, &depth, exact, out.as_deref()),
        Command::Attention { top, out, height } => attention(&cfg, &top, &out, height),
        Command::EvalDepth {
            pred,
            gt,
            mask,
            report,
        } => eval_depth(&cfg, &pred, &gt, mask.as_deref(), &report),
        Command::EvalLayout {
            pred_top,
            gt_top,
            pred_bottom,
            gt_bottom,
            report,
        } => eval_layout(&pred_top, &gt_top, &pred_bottom, &gt_bottom, &report),
        Command::BiasPcc {
            color,
            depth,
            report,
        } => bias_pcc(&color, &depth, report.as_deref()),
        Command::Augment { sample, seed, out } => augment(&sample, seed, &out),
    }
}

fn synth_room(cfg: &PipelineConfig, out: &Path, seed: Option<u64>) -> Outcome<()> {
    let mut params = cfg.synth;
    if let Some(s) = seed {
        params.seed = s;
    }
    let scene = ctx(params.scene(), "synth.scene")?;
    let render = ctx(render_cuboid(&scene), "synth.scene")?;
    let labels = if params.label_holes > 0.0 {
        ctx(
            perturb_labels(&render.labels, params.label_holes, params.seed),
            "synth.label_holes",
        )?
    } else {
        render.labels.clone()
    };
    make_dir(out)?;
    write_pfm(&out.join("depth.pfm"), &render.depth)?;
    write_pfm(&out.join("normals.pfm"), &render.normals)?;
    write_layout_png(&out.join("labels.png"), &labels)?;
    write_boundary(&out.join("top.json"), &render.top)?;
    write_boundary(&out.join("bottom.json"), &render.bottom)?;
    Ok(())
}

fn extract(
    cfg: &PipelineConfig,
    labels: &Path,
    normals: &Path,
    depth: &Path,
    out: &Path,
    debug: bool,
) -> Outcome<()> {
    let label_map = read_label_png(labels)?;
    let normals_grid = read_pfm(normals)?;
    let depth_grid = read_pfm(depth)?;
    if normals_grid.channels() != 3 {
        return Err(Failure {
            code: 1,
            message: format!(
                "{}: normals need 3 channels, got {}",
                arg("normals", normals),
                normals_grid.channels()
            ),
        });
    }
    let cue_cfg = ctx(CueConfig::from_pipeline(cfg), "mapping")?;
    let what = format!(
        "{}, {}, {}",
        arg("labels", labels),
        arg("normals", normals),
        arg("depth", depth)
    );
    let cues = ctx(
        extract_cues(&label_map, &normals_grid, &depth_grid, &cue_cfg),
        &what,
    )?;
    make_dir(out)?;
    write_boundary(&out.join("top.json"), &cues.top)?;
    write_boundary(&out.join("bottom.json"), &cues.bottom)?;
    let heights = match &cues.heights {
        Ok(h) => serde_json::to_value(h).expect("plain data"),
        Err(msg) => serde_json::json!({ "error": msg }),
    };
    let summary = serde_json::json!({
        "scene_valid": cues.validity.scene_valid,
        "valid_meridians": cues.validity.meridians.iter().filter(|&&v| v).count(),
        "meridians": cues.validity.meridians,
        "heights": heights,
        "mad": {
            "median": cues.mad.median,
            "mad": cues.mad.mad,
            "rejected": cues.mad.rejected,
            "skipped": cues.mad.skipped,
        },
    });
    write_text(&out.join("cues.json"), &to_json(&summary))?;
    if debug {
        write_layout_png(&out.join("layout.png"), &cues.layout)?;
        write_layout_png(&out.join("refined.png"), &cues.refined)?;
        write_boundary(&out.join("greedy_top.json"), &cues.greedy_top)?;
        write_boundary(&out.join("greedy_bottom.json"), &cues.greedy_bottom)?;
        write_boundary(&out.join("median_top.json"), &cues.median_top)?;
        write_text(&out.join("radii.json"), &to_json(&cues.radii))?;
    }
    Ok(())
}

fn recon(
    cfg: &PipelineConfig,
    top: &Path,
    depth: &Path,
    exact: bool,
    out: Option<&Path>,
) -> Outcome<()> {
    let top_b = read_boundary(top)?;
    let depth_grid = read_pfm(depth)?;
    let heights = ctx(
        estimate_plane_heights(&depth_grid, &cfg.recon),
        &arg("depth", depth),
    )?;
    let what = format!("{}, {}", arg("top", top), arg("depth", depth));
    let radii = ctx(
        sample_depth_at_boundary(&depth_grid, &top_b, cfg.recon.w),
        &what,
    )?;
    let bottom = if exact {
        ctx(reconstruct_bottom_exact(&top_b, &radii, &heights), &what)?
    } else {
        ctx(reconstruct_bottom(&top_b, &radii, &heights), &what)?
    };
    match out {
        Some(p) => write_boundary(p, &bottom)?,
        None => println!("{}", panolayout::io::boundary_to_json(&bottom)),
    }
    Ok(())
}

fn attention(cfg: &PipelineConfig, top: &Path, out: &Path, height: Option<usize>) -> Outcome<()> {
    let top_b = read_boundary(top)?;
    let w = top_b.width();
    let h = height.unwrap_or(w / 2);
    let map = ctx(
        build_attention(&top_b, &cfg.attention, w, h),
        &arg("top", top),
    )?;
    let mut blurred = ctx(spherical_blur(&map, &cfg.attention), "attention")?;
    if cfg.attention.normalize {
        normalize_max(&mut blurred.grid);
    }
    write_pfm(out, &blurred.grid)?;
    Ok(())
}

fn eval_depth(
    cfg: &PipelineConfig,
    pred: &Path,
    gt: &Path,
    mask: Option<&Path>,
    report: &Path,
) -> Outcome<()> {
    let p = read_pfm(pred)?;
    let g = read_pfm(gt)?;
    let mut m = PixelMask::depth_range(&g, cfg.metrics.min_depth, cfg.metrics.max_depth);
    if let Some(mp) = mask {
        let grid = read_pfm(mp)?;
        m = ctx(m.and(&PixelMask::from_grid(&grid)), &arg("mask", mp))?;
    }
    let what = format!("{}, {}", arg("pred", pred), arg("gt", gt));
    let metrics = ctx(depth_metrics(&p, &g, &m), &what)?;
    let r = EvalReport::default().with_depth(&metrics);
    write_text(report, &(r.to_json() + "\n"))?;
    print!("{}", r.to_text());
    Ok(())
}

fn eval_layout(
    pred_top: &Path,
    gt_top: &Path,
    pred_bottom: &Path,
    gt_bottom: &Path,
    report: &Path,
) -> Outcome<()> {
    let pt = read_boundary(pred_top)?;
    let gt = read_boundary(gt_top)?;
    let pb = read_boundary(pred_bottom)?;
    let gb = read_boundary(gt_bottom)?;
    let top = ctx(
        layout_rmse(&pt, &gt, None),
        &format!("{}, {}", arg("pred-top", pred_top), arg("gt-top", gt_top)),
    )?;
    let bottom = ctx(
        layout_rmse(&pb, &gb, None),
        &format!(
            "{}, {}",
            arg("pred-bottom", pred_bottom),
            arg("gt-bottom", gt_bottom)
        ),
    )?;
    let r = EvalReport::default().with_layout(top, bottom);
    write_text(report, &(r.to_json() + "\n"))?;
    print!("{}", r.to_text());
    Ok(())
}

fn read_color(path: &Path) -> Outcome<panolayout::pano::EquirectGrid> {
    let is_pfm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pfm"));
    Ok(if is_pfm {
        read_pfm(path)?
    } else {
        read_color_png(path)?
    })
}

fn bias_pcc(color: &Path, depth: &Path, report: Option<&Path>) -> Outcome<()> {
    let c = read_color(color)?;
    let d = read_pfm(depth)?;
    let (w, h) = d.dims();
    let what = format!("{}, {}", arg("color", color), arg("depth", depth));
    let pcc = ctx(luminance_invdepth_pcc(&c, &d, &PixelMask::all(w, h)), &what)?;
    let r = EvalReport::default().with_pcc(pcc);
    if let Some(p) = report {
        write_text(p, &(r.to_json() + "\n"))?;
    }
    println!("pcc={pcc}");
    Ok(())
}

/// File names recognised in a sample directory.
const SAMPLE_FILES: [&str; 7] = [
    "color.png",
    "depth.pfm",
    "normals.pfm",
    "labels.png",
    "top.json",
    "bottom.json",
    "mask.pfm",
];

fn read_sample(dir: &Path) -> Outcome<Sample> {
    let file = |name: &str| -> Option<PathBuf> {
        let p = dir.join(name);
        p.is_file().then_some(p)
    };
    let mut s = Sample::default();
    if let Some(p) = file("color.png") {
        s.color = Some(read_color_png(&p)?);
    }
    if let Some(p) = file("depth.pfm") {
        s.depth = Some(read_pfm(&p)?);
    }
    if let Some(p) = file("normals.pfm") {
        s.normals = Some(read_pfm(&p)?);
    }
    if let Some(p) = file("labels.png") {
        s.labels = Some(read_layout_png(&p)?);
    }
    if let Some(p) = file("top.json") {
        s.top = Some(read_boundary(&p)?);
    }
    if let Some(p) = file("bottom.json") {
        s.bottom = Some(read_boundary(&p)?);
    }
    if let Some(p) = file("mask.pfm") {
        s.mask = Some(read_pfm(&p)?);
    }
    Ok(s)
}

fn write_sample(dir: &Path, s: &Sample) -> Outcome<()> {
    make_dir(dir)?;
    if let Some(g) = &s.color {
        write_color_png(&dir.join("color.png"), g)?;
    }
    if let Some(g) = &s.depth {
        write_pfm(&dir.join("depth.pfm"), g)?;
    }
    if let Some(g) = &s.normals {
        write_pfm(&dir.join("normals.pfm"), g)?;
    }
    if let Some(l) = &s.labels {
        write_layout_png(&dir.join("labels.png"), l)?;
    }
    let boundaries: [(&str, &Option<BoundaryVector>); 2] =
        [("top.json", &s.top), ("bottom.json", &s.bottom)];
    for (name, b) in boundaries {
        if let Some(b) = b {
            write_boundary(&dir.join(name), b)?;
        }
    }
    if let Some(g) = &s.mask {
        write_pfm(&dir.join("mask.pfm"), g)?;
    }
    Ok(())
}

fn augment(sample: &Path, seed: u64, out: &Path) -> Outcome<()> {
    let s = read_sample(sample)?;
    let what = arg("sample", sample);
    let dims = ctx(s.dims(), &what)?;
    let Some((w, h)) = dims else {
        return Err(Failure {
            code: 1,
            message: format!(
                "{what}: no grid found (expected any of {})",
                SAMPLE_FILES.join(", ")
            ),
        });
    };
    let plan = AugmentPlan::sample(seed, w, h);
    let augmented = ctx(plan.apply(&s), &what)?;
    write_sample(out, &augmented)?;
    write_text(&out.join("plan.json"), &to_json(&plan))
}
