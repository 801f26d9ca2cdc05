use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use gpvortex::coefficients::{self, coefficient_report};
use gpvortex::fieldio;
use gpvortex::kwong::{self, verify_identities, KwongProfile};
use gpvortex::linops::{self, PsiSet};
use gpvortex::minimizer::{self, FlowConfig, Frame, Functional, GPParams, Init, MinimizerReport};
use gpvortex::quadrature::inner;
use gpvortex::verify::{self, ExpansionReport};
use gpvortex::GridSpec;
use serde::{Deserialize, Serialize};

use crate::config::*;
use crate::CliError;

#[derive(Serialize)]
struct Report<'a, C, R> {
    format_version: u32,
    command: &'static str,
    config: &'a C,
    result: R,
}

fn emit<C: Serialize, R: Serialize>(
    command: &'static str,
    config: &C,
    result: R,
    path: Option<&Path>,
) -> Result<(), CliError> {
    let r = Report { format_version: FORMAT_VERSION, command, config, result };
    let mut text = serde_json::to_string_pretty(&r).expect("report serializes");
    text.push('\n');
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn profile(n: usize, l: f64, tol: f64) -> Result<KwongProfile, CliError> {
    positive("kwong tolerance", tol)?;
    let grid = GridSpec::square(n, l)?;
    let radial = kwong::solve_kwong_radial(tol)?;
    Ok(kwong::kwong_on_grid(&radial, grid)?)
}

fn parse_frame(s: &str) -> Result<Frame, CliError> {
    match s {
        "rescaled" => Ok(Frame::Rescaled),
        "physical" => Ok(Frame::Physical),
        other => Err(CliError::Validation(format!("frame must be physical or rescaled, got {other:?}"))),
    }
}

fn require_a(a: Option<f64>) -> Result<f64, CliError> {
    a.ok_or_else(|| CliError::Validation("the interaction strength --a is required".into()))
}

#[derive(Deserialize)]
struct OracleFile {
    w0: f64,
    a_star: f64,
}

#[derive(Serialize)]
struct OracleCheck {
    fixture: PathBuf,
    w0: f64,
    a_star: f64,
    w0_abs_deviation: f64,
    a_star_rel_deviation: f64,
}

/// Comparison with the shooting fixture in `$GPVORTEX_FIXTURES`, if set.
fn oracle_check(w0: f64, a_star: f64) -> Result<Option<OracleCheck>, CliError> {
    let Some(dir) = std::env::var_os("GPVORTEX_FIXTURES") else {
        return Ok(None);
    };
    let path = PathBuf::from(dir).join("oracle.json");
    let text = fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let o: OracleFile =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(Some(OracleCheck {
        fixture: path,
        w0: o.w0,
        a_star: o.a_star,
        w0_abs_deviation: (w0 - o.w0).abs(),
        a_star_rel_deviation: (a_star - o.a_star).abs() / o.a_star,
    }))
}

#[derive(Serialize)]
struct KwongResult {
    w0: f64,
    w_origin_grid: f64,
    a_star_radial: f64,
    a_star_2d: f64,
    grad_sq: f64,
    mass: f64,
    half_quartic: f64,
    gn_ratio: f64,
    max_relative_defect: f64,
    residual_sup: f64,
    tail_amplitude: f64,
    tail_match_defect: f64,
    bisection_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleCheck>,
}

pub fn kwong(cfg: KwongConfig) -> Result<(), CliError> {
    let kp = profile(cfg.n, cfg.l, cfg.tol)?;
    let id = verify_identities(&kp);
    if let Some(out) = &cfg.out {
        fieldio::write_real(kp.w(), out)?;
    }
    let r = &kp.radial;
    let result = KwongResult {
        w0: r.w0,
        w_origin_grid: kp.w().values[kp.grid().origin_index()],
        a_star_radial: r.a_star,
        a_star_2d: kp.a_star_2d,
        grad_sq: id.grad_sq,
        mass: id.mass,
        half_quartic: id.half_quartic,
        gn_ratio: id.gn_ratio,
        max_relative_defect: id.max_relative_defect,
        residual_sup: kp.residual,
        tail_amplitude: r.tail_amplitude,
        tail_match_defect: r.tail_match_defect,
        bisection_steps: r.bisection_steps,
        oracle: oracle_check(r.w0, kp.a_star_2d)?,
    };
    emit("kwong", &cfg, result, cfg.report.as_deref())
}

fn selected(which: &str) -> Result<Vec<&'static str>, CliError> {
    Ok(match which {
        "1" => vec!["psi1"],
        "2" => vec!["psi2"],
        "aniso" => vec!["psi_aniso"],
        "I" => vec!["psiI"],
        "3" => vec!["psi3_static", "psi3_rot"],
        "4" => vec!["psi4"],
        "5" => vec!["psi5"],
        "all" => vec!["psi1", "psi2", "psi_aniso", "psiI", "psi3_static", "psi3_rot", "psi4", "psi5"],
        other => {
            return Err(CliError::Validation(format!("--which must be 1, 2, aniso, I, 3, 4, 5 or all, got {other:?}")))
        }
    })
}

#[derive(Serialize)]
struct FieldEntry {
    file: String,
    l2_norm: f64,
    sup_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<linops::SolveDiagnostics>,
}

#[derive(Serialize)]
struct PsiResult {
    #[serde(rename = "Lambda")]
    lambda: f64,
    lambda0: f64,
    a_star: f64,
    fields: BTreeMap<String, FieldEntry>,
}

pub fn psi(cfg: PsiConfig) -> Result<(), CliError> {
    let names = selected(&cfg.which)?;
    let kp = profile(cfg.n, cfg.l, cfg.kwong_tol)?;
    let ps = linops::build_psi_set(cfg.lambda, &kp)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out_dir.display())))?;
    fieldio::write_real(kp.w(), cfg.out_dir.join("w.gpf"))?;
    let mut fields = BTreeMap::new();
    for (name, f) in ps.named_fields() {
        if !names.contains(&name) {
            continue;
        }
        let file = format!("{name}.gpf");
        fieldio::write_real(f, cfg.out_dir.join(&file))?;
        fields.insert(
            name.to_string(),
            FieldEntry {
                file,
                l2_norm: inner(f, f).sqrt(),
                sup_norm: f.sup_norm(),
                diagnostics: ps.diagnostics.get(name).cloned(),
            },
        );
    }
    let result = PsiResult { lambda: ps.lambda, lambda0: ps.lambda0, a_star: ps.a_star, fields };
    emit("psi", &cfg, result, Some(&cfg.out_dir.join("psi.json")))
}

/// Reads a directory written by `psi --which all` and checks it matches
/// `lambda` and the profile grid.
fn load_psi_set(dir: &Path, lambda: f64, kp: &KwongProfile) -> Result<PsiSet, CliError> {
    let meta = dir.join("psi.json");
    let text = fs::read_to_string(&meta).map_err(|e| CliError::Io(format!("{}: {e}", meta.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", meta.display())))?;
    let stored = v["result"]["Lambda"]
        .as_f64()
        .ok_or_else(|| CliError::Validation(format!("{} has no Lambda", meta.display())))?;
    if stored != lambda {
        return Err(CliError::Validation(format!(
            "correctors in {} were built for Lambda = {stored}, not {lambda}",
            dir.display()
        )));
    }
    let read = |name: &str| -> Result<gpvortex::RealField, CliError> {
        let f = fieldio::read_real(dir.join(format!("{name}.gpf")))?;
        gpvortex::field::ensure_same_grid(&kp.grid(), &f.grid)?;
        Ok(f)
    };
    Ok(PsiSet {
        lambda,
        lambda0: coefficients::lambda0(lambda, kp),
        a_star: kp.a_star_2d,
        w: kp.w().clone(),
        psi1: read("psi1")?,
        psi2: read("psi2")?,
        psi_aniso: read("psi_aniso")?,
        psi_i: read("psiI")?,
        psi3_static: read("psi3_static")?,
        psi3_rot: read("psi3_rot")?,
        psi4: read("psi4")?,
        psi5: read("psi5")?,
        diagnostics: BTreeMap::new(),
    })
}

pub fn constants(cfg: ConstantsConfig) -> Result<(), CliError> {
    let kp = profile(cfg.n, cfg.l, cfg.kwong_tol)?;
    let ps = linops::build_psi_set(cfg.lambda, &kp)?;
    emit("constants", &cfg, coefficient_report(&ps, &kp), cfg.report.as_deref())
}

#[derive(Serialize)]
struct MinimizeResult {
    #[serde(flatten)]
    report: MinimizerReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    field_file: Option<PathBuf>,
}

pub fn minimize(mut cfg: MinimizeConfig) -> Result<(), CliError> {
    let a = require_a(cfg.a)?;
    let frame = parse_frame(&cfg.frame)?;
    let l = *cfg.l.get_or_insert(match frame {
        Frame::Rescaled => 16.0,
        Frame::Physical => 6.0,
    });
    let init = match cfg.init.as_str() {
        "gaussian" => Init::Gaussian,
        "kwong-seeded" => Init::KwongSeeded,
        path => Init::File(PathBuf::from(path)),
    };
    let flow = FlowConfig {
        dt: cfg.dt,
        tol_energy: cfg.tol_energy,
        tol_residual: cfg.tol,
        max_steps: cfg.max_steps,
        frame,
        init,
        newton_switch: cfg.newton_switch,
        max_newton: cfg.max_newton,
    };
    flow.validate()?;
    let p = GPParams::new(a, cfg.lambda, cfg.omega);
    p.validate_shape()?;
    let grid = GridSpec::square(cfg.n, l)?;
    let kp = profile(cfg.profile_n, cfg.profile_l, cfg.kwong_tol)?;
    let grid = if frame == Frame::Rescaled && grid == kp.grid() { kp.grid() } else { grid };
    let r = minimizer::minimize(&p, grid, &flow, &kp)?;
    if let Some(out) = &cfg.out {
        fieldio::write_complex(&r.field, out)?;
    }
    let result = MinimizeResult { report: r.report, field_file: cfg.out.clone() };
    emit("minimize", &cfg, result, cfg.report.as_deref())
}

#[derive(Serialize)]
struct VerifyResult {
    mu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_min_report: Option<f64>,
    x_a: [f64; 2],
    y_a: [f64; 2],
    theta: f64,
    overlap: f64,
    rotational_coefficient: f64,
    expansion: ExpansionReport,
}

#[derive(Deserialize)]
struct MinReportFile {
    result: MinReportResult,
}

#[derive(Deserialize)]
struct MinReportResult {
    params: GPParams,
    mu: f64,
}

fn verify_point(p: &GPParams, kp: &KwongProfile, psis: &PsiSet) -> Result<(f64, verify::GaugeFit), CliError> {
    let r = minimizer::minimize(p, kp.grid(), &FlowConfig::default(), kp)?;
    let gf = verify::fit_gauge(&r.field, p, Frame::Rescaled, kp)?;
    debug_assert_eq!(psis.lambda, p.lambda);
    Ok((r.report.mu, gf))
}

pub fn verify(cfg: VerifyConfig) -> Result<(), CliError> {
    let a = require_a(cfg.a)?;
    let frame = parse_frame(&cfg.frame)?;
    let p = GPParams::new(a, cfg.lambda, cfg.omega);
    let kp = profile(cfg.n, cfg.l, cfg.kwong_tol)?;
    p.validate(kp.critical_mass())?;
    let psis = match &cfg.psi_dir {
        Some(dir) => load_psi_set(dir, cfg.lambda, &kp)?,
        None => linops::build_psi_set(cfg.lambda, &kp)?,
    };
    let mu_min_report = match &cfg.min_report {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let m: MinReportFile =
                serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            let q = m.result.params;
            if q.a != p.a || q.lambda != p.lambda || q.omega != p.omega {
                return Err(CliError::Validation(format!(
                    "{} was produced for (a, Lambda, Omega) = ({}, {}, {}), not ({}, {}, {})",
                    path.display(),
                    q.a,
                    q.lambda,
                    q.omega,
                    p.a,
                    p.lambda,
                    p.omega
                )));
            }
            Some(m.result.mu)
        }
        None => None,
    };
    let (mu, gf) = match &cfg.field {
        Some(path) => {
            let u = fieldio::read_complex(path)?;
            let f = Functional::new(&p, u.grid, frame, &kp)?;
            let (lambda, _, _) = f.residual(&u.values);
            (f.physical_mu(lambda), verify::fit_gauge(&u, &p, frame, &kp)?)
        }
        None => verify_point(&p, &kp, &psis)?,
    };
    let expansion = verify::decompose_and_compare(&gf, &psis, mu)?;
    let result = VerifyResult {
        mu,
        mu_min_report,
        x_a: gf.x_a,
        y_a: gf.y_a,
        theta: gf.theta,
        overlap: gf.overlap,
        rotational_coefficient: verify::rotational_coefficient(&gf, &psis, mu)?,
        expansion,
    };
    emit("verify", &cfg, result, cfg.out.as_deref())
}

#[derive(Serialize)]
struct SweepRow {
    a: f64,
    eps: f64,
    mu: f64,
    beta: f64,
    beta_over_eps4: f64,
    c_star_ref: f64,
    xa_norm: f64,
    #[serde(rename = "R_resid1")]
    r_resid1: f64,
    #[serde(rename = "R_resid2")]
    r_resid2: f64,
    #[serde(rename = "I_resid")]
    i_resid: f64,
    vortex_free_radius: f64,
    #[serde(rename = "decay_C1")]
    decay_c1: f64,
}

#[derive(Serialize)]
struct SweepResult {
    a_star: f64,
    points: Vec<ExpansionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xa_scaling: Option<verify::XaScaling>,
    /// Log-log slope of `|beta / eps^4 - C|` against `eps^4` for each constant.
    order_c_star: Option<f64>,
    order_c_star_mass_consistent: Option<f64>,
}

pub fn sweep(cfg: SweepConfig) -> Result<(), CliError> {
    let kp = profile(cfg.n, cfg.l, cfg.kwong_tol)?;
    let a_star = kp.critical_mass();
    let a_list: Vec<f64> = match (&cfg.a_list, &cfg.da_list) {
        (Some(a), None) => a.clone(),
        (None, Some(d)) => d.iter().map(|d| a_star - d).collect(),
        _ => return Err(CliError::Validation("give exactly one of --a-list and --da-list".into())),
    };
    if a_list.is_empty() {
        return Err(CliError::Validation("the sweep list is empty".into()));
    }
    if cfg.workers == 0 {
        return Err(CliError::Validation("workers must be at least 1".into()));
    }
    let params: Vec<GPParams> = a_list.iter().map(|&a| GPParams::new(a, cfg.lambda, cfg.omega)).collect();
    for p in &params {
        p.validate(a_star)?;
    }
    let psis = linops::build_psi_set(cfg.lambda, &kp)?;
    let run = |p: &GPParams| -> Result<ExpansionReport, CliError> {
        let (mu, gf) = verify_point(p, &kp, &psis)?;
        Ok(verify::decompose_and_compare(&gf, &psis, mu)?)
    };
    let mut slots: Vec<Option<Result<ExpansionReport, CliError>>> = (0..params.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.workers.min(params.len()))
            .map(|w| {
                let params = &params;
                let run = &run;
                s.spawn(move || {
                    (w..params.len()).step_by(cfg.workers).map(|k| (k, run(&params[k]))).collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, r) in h.join().expect("sweep worker panicked") {
                slots[k] = Some(r);
            }
        }
    });
    let points: Vec<ExpansionReport> =
        slots.into_iter().map(|r| r.expect("every point ran")).collect::<Result<_, _>>()?;

    if let Some(path) = &cfg.csv {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        for r in &points {
            w.serialize(SweepRow {
                a: r.params.a,
                eps: r.eps,
                mu: r.mu,
                beta: r.beta,
                beta_over_eps4: r.beta_over_eps4,
                c_star_ref: r.c_star,
                xa_norm: r.xa_norm,
                r_resid1: r.r_residual1,
                r_resid2: r.r_residual2,
                i_resid: r.i_residual,
                vortex_free_radius: r.vortex_free_radius,
                decay_c1: r.decay.c1,
            })
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }

    let e4: Vec<f64> = points.iter().map(|r| r.eps.powi(4)).collect();
    let order = |c: f64| {
        (points.len() >= 2).then(|| {
            verify::observed_order(&e4, &points.iter().map(|r| (r.beta_over_eps4 - c).abs()).collect::<Vec<_>>())
        })
    };
    let result = SweepResult {
        a_star,
        order_c_star: order(points[0].c_star),
        order_c_star_mass_consistent: order(points[0].c_star_mass_consistent),
        xa_scaling: verify::xa_scaling_check(&points, 1e-3).ok(),
        points,
    };
    emit("sweep", &cfg, result, cfg.report.as_deref())
}
