//! Subcommand implementations. Each writes its CSV and JSON files and returns the
//! JSON summary.

use std::path::{Path, PathBuf};

use homframe::frame::{
    canonical_dual, deformation_sweep, frame_bounds, guarded_gram_pseudo_inverse, p_lower_bound_probe, CoherentSystem, DualOptions,
    FrameMode, FrameOptions, ProbeOptions, Regularization, Verdict,
};
use homframe::heisenberg::{verify_orthogonality, window, WindowKind};
use homframe::pointset::{beurling_density, dilate_set, CenterSampling};
use homframe::schur::{build_envelope, inverse_decay_experiment, schur_norm, EnvelopeFunction, InverseDecayOptions};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, RegularizationName};
use crate::error::CliError;
use crate::matrix_io::{read_matrix, write_matrix, Dtype};
use crate::output::{jnum, num, write_csv, write_json, Provenance, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Density,
    FrameBounds,
    Riesz,
    PProbe,
    DualFrame,
    DeformSweep,
    Schur,
    Orthogonality,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Density,
        Command::FrameBounds,
        Command::Riesz,
        Command::PProbe,
        Command::DualFrame,
        Command::DeformSweep,
        Command::Schur,
        Command::Orthogonality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::FrameBounds => "framebounds",
            Command::Riesz => "riesz",
            Command::PProbe => "p-probe",
            Command::DualFrame => "dual-frame",
            Command::DeformSweep => "deform-sweep",
            Command::Schur => "schur",
            Command::Orthogonality => "orthogonality",
        }
    }
}

/// Files written by a run and its summary.
#[derive(Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

pub fn run(cmd: Command, cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let prov = Provenance { command: cmd.name().into(), config_hash: cfg.hash(), seed: cfg.seed };
    let mut files = Vec::new();
    let summary = match cmd {
        Command::Density => density(cfg, dir, &prov, &mut files)?,
        Command::FrameBounds => bounds(cfg, FrameMode::Frame, dir, &prov, &mut files)?,
        Command::Riesz => bounds(cfg, FrameMode::Riesz, dir, &prov, &mut files)?,
        Command::PProbe => probe(cfg, dir, &prov, &mut files)?,
        Command::DualFrame => dual(cfg, dir, &prov, &mut files)?,
        Command::DeformSweep => sweep(cfg, dir, &prov, &mut files)?,
        Command::Schur => schur(cfg, dir, &prov, &mut files)?,
        Command::Orthogonality => orthogonality(cfg, dir, &prov, &mut files)?,
    };
    files.push(write_json(dir, cmd.name(), &prov, summary.clone())?);
    Ok(RunOutput { files, summary })
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Frame => "stable",
        Verdict::NotFrame => "degenerate",
        Verdict::Undecided => "undecided",
    }
}

fn system(cfg: &ExperimentConfig) -> Result<CoherentSystem, CliError> {
    let kind = cfg.window_kind();
    CoherentSystem::with_kind(cfg.window_signal()?, kind, cfg.point_set()?).map_err(|e| CliError::config(format!("coherent system: {e}")))
}

fn frame_options(cfg: &ExperimentConfig, mode: FrameMode) -> FrameOptions {
    let mut o = FrameOptions::for_mode(mode, cfg.truncation.radii.clone());
    if let Some(g) = cfg.truncation.guard {
        o.guard = g;
    }
    o
}

fn mode_name(mode: FrameMode) -> &'static str {
    match mode {
        FrameMode::Frame => "frame",
        FrameMode::Riesz => "riesz",
    }
}

fn density(cfg: &ExperimentConfig, dir: &Path, prov: &Provenance, files: &mut Vec<PathBuf>) -> Result<Value, CliError> {
    let ps = cfg.point_set()?;
    let w = ps.window_radius();
    let radii = cfg.density.radii.clone().unwrap_or_else(|| vec![w / 4.0, w / 2.0]);
    let q = ps.spec().homogeneous_dimension();
    let sampling = CenterSampling { max_centers: cfg.density.max_centers, volume_seed: cfg.seed, ..CenterSampling::default() };
    let mut table = Table::new(&["dilation", "radius", "lower", "upper", "expected"]);
    let mut per = Vec::new();
    let mut base: Option<(f64, f64)> = None;
    for &r in &cfg.density.dilations {
        let set = if r == 1.0 { ps.clone() } else { dilate_set(&ps, r)? };
        let scaled: Vec<f64> = radii.iter().map(|x| x * r).collect();
        let est = beurling_density(&set, &scaled, sampling.clone())?;
        let expected = ps.expected_density().map(|d| d * r.powf(-q));
        for (k, rad) in est.radii_used.iter().enumerate() {
            table.push(vec![num(r), num(*rad), num(est.per_radius_inf[k]), num(est.per_radius_sup[k]), expected.map(num).unwrap_or_default()]);
        }
        if r == 1.0 {
            base = Some((est.lower, est.upper));
        }
        per.push((r, est.lower, est.upper, expected));
    }
    files.push(write_csv(dir, "density", prov, &table)?);
    let rows: Vec<Value> = per
        .iter()
        .map(|&(r, lo, up, ex)| {
            // r^Q D(D_r Λ) / D(Λ) is 1 under the scaling law
            let law = base.map(|(bl, bu)| json!({ "lower": jnum(lo * r.powf(q) / bl), "upper": jnum(up * r.powf(q) / bu) }));
            json!({ "dilation": r, "lower": jnum(lo), "upper": jnum(up), "expected": ex.map(jnum), "scaling_law_ratio": law })
        })
        .collect();
    Ok(json!({ "group": ps.spec().name(), "homogeneous_dimension": q, "window_radius": w, "radii": radii, "dilations": rows }))
}

fn bounds(cfg: &ExperimentConfig, mode: FrameMode, dir: &Path, prov: &Provenance, files: &mut Vec<PathBuf>) -> Result<Value, CliError> {
    let cs = system(cfg)?;
    let rep = frame_bounds(&cs, mode, &frame_options(cfg, mode))?;
    let mut table = Table::new(&["radius", "atoms", "test_dimension", "lower", "upper", "ratio", "iterative"]);
    let ratios = rep.ratios();
    for k in 0..rep.radii.len() {
        table.push(vec![
            num(rep.radii[k]),
            rep.truncation_sizes[k].to_string(),
            rep.test_dimensions[k].to_string(),
            num(rep.lower_by_truncation[k]),
            num(rep.upper_by_truncation[k]),
            num(ratios[k]),
            rep.iterative[k].to_string(),
        ]);
    }
    let stem = if mode == FrameMode::Frame { "framebounds" } else { "riesz" };
    files.push(write_csv(dir, stem, prov, &table)?);
    Ok(json!({
        "mode": mode_name(mode),
        "method": format!("{:?}", rep.method),
        "lower_bound": jnum(rep.lower_bound),
        "upper_bound": jnum(rep.upper_bound),
        "ratio": jnum(rep.ratio()),
        "monotone": rep.monotone,
        "verdict": verdict(rep.verdict),
    }))
}

fn probe(cfg: &ExperimentConfig, dir: &Path, prov: &Provenance, files: &mut Vec<PathBuf>) -> Result<Value, CliError> {
    let cs = system(cfg)?;
    let mode: FrameMode = cfg.probe.mode.into();
    let mut opts = ProbeOptions::new(mode, cfg.truncation.radii.clone(), cfg.seed);
    opts.trials = cfg.probe.trials;
    opts.iterations = cfg.probe.iterations;
    opts.certify = cfg.probe.certify;
    if let Some(g) = cfg.truncation.guard {
        opts.guard = g;
    }
    let mut table = Table::new(&["p", "radius", "lower", "upper"]);
    let mut reports = Vec::new();
    for p in cfg.probe.p.iter().filter_map(|p| p.value()) {
        let rep = p_lower_bound_probe(&cs, mode, p, &opts)?;
        for k in 0..rep.radii.len() {
            table.push(vec![num(p), num(rep.radii[k]), num(rep.lower_by_truncation[k]), num(rep.upper_by_truncation[k])]);
        }
        reports.push(rep);
    }
    files.push(write_csv(dir, "p-probe", prov, &table)?);
    let agree = reports.windows(2).all(|w| w[0].verdict == w[1].verdict);
    let per: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "p": jnum(r.p),
                "method": format!("{:?}", r.method),
                "estimate": jnum(r.estimate()),
                "certified_lower": r.certified_lower.map(jnum),
                "reconstruction_residual": r.reconstruction_residual.map(jnum),
                "verdict": verdict(r.verdict),
            })
        })
        .collect();
    Ok(json!({ "mode": mode_name(mode), "probes": per, "verdicts_agree": agree }))
}

fn envelope_rows(table: &mut Table, envs: &[&EnvelopeFunction]) {
    let n = envs.iter().map(|e| e.values().len()).max().unwrap_or(0);
    for k in 0..n {
        let edges = envs.iter().find(|e| e.values().len() > k).unwrap().edges();
        let mut row = vec![num(edges[k]), num(edges[k + 1])];
        row.extend(envs.iter().map(|e| num(e.values().get(k).copied().unwrap_or(0.0))));
        table.push(row);
    }
}

fn dual(cfg: &ExperimentConfig, dir: &Path, prov: &Provenance, files: &mut Vec<PathBuf>) -> Result<Value, CliError> {
    let cs = system(cfg)?;
    let mut opts = DualOptions {
        regularization: match cfg.dual.regularization {
            RegularizationName::None => Regularization::None,
            RegularizationName::SpectralFloor => Regularization::SpectralFloor,
        },
        floor_rel: cfg.dual.floor_rel,
        interior_radius: cfg.dual.interior_radius,
        ..DualOptions::default()
    };
    if let Some(g) = cfg.truncation.guard {
        opts.guard = g;
    }
    let d = canonical_dual(&cs, &opts)?;
    let mut res_table = Table::new(&["hermite_order", "residual"]);
    let mut worst: f64 = 0.0;
    for k in 0..cfg.dual.hermite_tests {
        let f = window(&cfg.grid(), WindowKind::Hermite(k))?;
        let r = d.reconstruction_residual(&f)?;
        worst = worst.max(r);
        res_table.push(vec![k.to_string(), num(r)]);
    }
    let mut env_table = Table::new(&["radius_lo", "radius_hi", "envelope"]);
    envelope_rows(&mut env_table, &[&d.decay_envelope]);
    files.push(write_csv(dir, "dual-frame", prov, &env_table)?);
    files.push(write_csv(dir, "dual-frame-residuals", prov, &res_table)?);
    Ok(json!({
        "lower_bound": jnum(d.lower_bound),
        "upper_bound": jnum(d.upper_bound),
        "floor": jnum(d.floor),
        "retained_rank": d.retained_rank,
        "atoms": cs.len(),
        "decay_exponent": jnum(d.decay_fit.exponent),
        "decay_constant": jnum(d.decay_fit.constant),
        "decay_bins_used": d.decay_fit.bins_used,
        "max_reconstruction_residual": jnum(worst),
    }))
}

fn sweep(cfg: &ExperimentConfig, dir: &Path, prov: &Provenance, files: &mut Vec<PathBuf>) -> Result<Value, CliError> {
    if let Some(r) = cfg.sweep.r.iter().find(|r| !(**r >= 0.8 && **r <= 1.25)) {
        return Err(CliError::config(format!("deform-sweep needs r in [0.8, 1.25], got {r}")));
    }
    let cs = system(cfg)?;
    let mode: FrameMode = cfg.sweep.mode.into();
    let rep = deformation_sweep(&cs, &cfg.sweep.r, mode, &frame_options(cfg, mode))?;
    let mut table = Table::new(&["r", "density", "lower", "upper", "ratio"]);
    for row in &rep.rows {
        table.push(vec![num(row.r), num(row.density), num(row.lower), num(row.upper), num(row.ratio)]);
    }
    files.push(write_csv(dir, "deform-sweep", prov, &table)?);
    let dmin = rep.rows.iter().map(|r| r.density).fold(f64::INFINITY, f64::min);
    let dmax = rep.rows.iter().map(|r| r.density).fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({
        "mode": mode_name(mode),
        "continuous": rep.continuous,
        "persistent": rep.persistent,
        "density_range": [jnum(dmin), jnum(dmax)],
        "crosses_critical_density": dmin < 1.0 && dmax > 1.0,
    }))
}

fn schur(cfg: &ExperimentConfig, dir: &Path, prov: &Provenance, files: &mut Vec<PathBuf>) -> Result<Value, CliError> {
    let (mut a, pinv) = match &cfg.schur.matrix {
        Some(path) => (read_matrix(Path::new(path))?, None),
        None => {
            let cs = system(cfg)?;
            let radius = *cfg.truncation.radii.last().unwrap();
            let (g, block) = guarded_gram_pseudo_inverse(&cs, radius, cfg.schur.guard, cfg.schur.floor_rel)?;
            let bin = dir.join("schur-matrix.bin");
            write_matrix(&bin, &g, &cfg.group, cfg.norm, Dtype::Complex128)?;
            files.push(bin.clone());
            files.push(crate::matrix_io::sidecar_path(&bin));
            (g, Some(block))
        }
    };
    let alpha = cfg.schur.alpha.unwrap_or(a.rows().spec().homogeneous_dimension() + 1.0);
    let sn = schur_norm(&a, alpha);
    let env = build_envelope(&mut a, cfg.schur.bin);
    let fit = env.fit_decay();
    let mut out = json!({
        "rows": a.rows().len(),
        "cols": a.cols().len(),
        "schur_norm": {
            "row_sum_sup": jnum(sn.row_sum_sup),
            "col_sum_sup": jnum(sn.col_sum_sup),
            "norm": jnum(sn.norm),
            "alpha": jnum(sn.alpha),
        },
        "operator_norm_estimate": jnum(a.operator_norm_estimate(100)),
        "envelope_decay_exponent": jnum(fit.exponent),
    });
    let mut table = Table::new(&["radius_lo", "radius_hi", "envelope"]);
    if a.rows().len() == a.cols().len() {
        let mut o = InverseDecayOptions::for_matrix(&a);
        o.alpha = alpha;
        o.bin_width = cfg.schur.bin;
        o.floor_rel = cfg.schur.floor_rel;
        o.pseudo_inverse = pinv;
        let inv = inverse_decay_experiment(&a, &o)?;
        table = Table::new(&["radius_lo", "radius_hi", "envelope", "inverse_envelope"]);
        envelope_rows(&mut table, &[&inv.envelope_in, &inv.envelope_out]);
        out["inverse_decay"] = json!({
            "s_in": jnum(inv.s_in),
            "s_out": jnum(inv.s_out),
            "min_abs_eigenvalue": jnum(inv.min_abs_eigenvalue),
            "pseudo_inverse_used": inv.pseudo_inverse_used,
            "assertion_holds": inv.assertion_holds,
        });
    } else {
        envelope_rows(&mut table, &[&env]);
    }
    files.push(write_csv(dir, "schur", prov, &table)?);
    Ok(out)
}

fn orthogonality(cfg: &ExperimentConfig, dir: &Path, prov: &Provenance, files: &mut Vec<PathBuf>) -> Result<Value, CliError> {
    let grid = cfg.grid();
    let g = window(&grid, WindowKind::Gaussian)?;
    let o = &cfg.orthogonality;
    let family = o.orders.iter().map(|&k| window(&grid, WindowKind::Hermite(k))).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["f1", "f2", "integral_re", "integral_im", "expected_re", "expected_im", "error", "refinement_delta"]);
    let mut max_err: f64 = 0.0;
    let mut formal = None;
    for (a, fa) in o.orders.iter().zip(&family) {
        for (b, fb) in o.orders.iter().zip(&family) {
            if b < a {
                continue;
            }
            let r = verify_orthogonality(fa, fb, &g, &g, o.extent, o.step)?;
            let err = (r.integral - r.expected).norm();
            max_err = max_err.max(err);
            if *a == 0 && *b == 0 {
                formal = r.formal_dimension;
            }
            table.push(vec![
                format!("h{a}"),
                format!("h{b}"),
                num(r.integral.re),
                num(r.integral.im),
                num(r.expected.re),
                num(r.expected.im),
                num(err),
                num(r.refinement_delta),
            ]);
        }
    }
    files.push(write_csv(dir, "orthogonality", prov, &table)?);
    Ok(json!({ "extent": o.extent, "step": o.step, "max_error": jnum(max_err), "formal_dimension": formal.map(jnum) }))
}
