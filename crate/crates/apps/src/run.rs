//! Dispatch of a validated [`RunConfig`] to the solvers and rendering of
//! their machine-readable output.

use diskspec_core::sparseops::format_sig17;
use diskspec_core::sparseops::identities::Factory;
use diskspec_core::transform::theta_grid;
use diskspec_core::Result;
use num_complex::Complex64;
use serde::Serialize;

use crate::bessel_modes::run_bessel;
use crate::config::{Example, Format, RunConfig};
use crate::fields::{sample, uniform_radii, GridField};
use crate::helmholtz::{run_helmholtz, Forcing, HelmholtzParams};
use crate::inertial::run_inertial;
use crate::opscheck::{run_opscheck, OpsSizes};
use crate::pipe::{mode_fields, run_pipe, ModeKind, PipeParams, PipeRun};

/// Version of every JSON document emitted by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

/// Rendered results of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Main document in the requested format.
    pub document: String,
    /// Grid dumps, each written to `<fields>/<name>.csv`.
    pub fields: Vec<GridField>,
    /// One-line human summary.
    pub summary: String,
    /// False when a self-check failed.
    pub passed: bool,
}

#[derive(Serialize)]
struct Eigenvalue {
    index: usize,
    re: f64,
    im: f64,
    residual: Option<f64>,
}

fn eigen_rows(values: &[Complex64], residuals: &[f64]) -> Vec<Eigenvalue> {
    values
        .iter()
        .zip(residuals)
        .enumerate()
        .map(|(index, (l, r))| Eigenvalue {
            index,
            re: l.re,
            im: l.im,
            residual: (!r.is_nan()).then_some(*r),
        })
        .collect()
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report") + "\n"
}

#[derive(Serialize)]
struct BesselDoc {
    schema_version: u32,
    m: u32,
    n_r: usize,
    eigenvalues: Vec<Eigenvalue>,
    kappa: Vec<f64>,
    oracle_error: Vec<f64>,
    max_imag_ratio: f64,
    mode: usize,
    origin_slope: f64,
    decay_index: usize,
}

fn bessel(cfg: &RunConfig) -> Result<RunOutput> {
    let run = run_bessel(cfg.m, cfg.n_r, cfg.mode)?;
    let document = match cfg.format {
        Format::Csv => run.spectrum.to_csv(),
        Format::Json => json(&BesselDoc {
            schema_version: SCHEMA_VERSION,
            m: run.m,
            n_r: run.n,
            eigenvalues: eigen_rows(&run.spectrum.eigenvalues, &run.spectrum.residuals),
            kappa: run.kappa.clone(),
            oracle_error: run.oracle_error.clone(),
            max_imag_ratio: run.max_imag_ratio,
            mode: run.mode,
            origin_slope: run.origin_slope,
            decay_index: run.decay_index,
        }),
    };
    let mut fields = Vec::new();
    if cfg.fields.is_some() {
        let radii = uniform_radii(cfg.grid_nr);
        fields.push(sample(
            "eigenfunction",
            &run.eigenfunction,
            cfg.m as i64,
            &radii,
            cfg.grid_ntheta,
        )?);
    }
    let good = run.oracle_error.iter().take_while(|e| **e <= 1e-10).count();
    let summary = format!(
        "bessel m={} N={}: {} eigenvalues, leading {} within 1e-10 of J_m zeros, kappa_{} = {}",
        run.m,
        run.n,
        run.spectrum.len(),
        good,
        run.mode,
        format_sig17(run.kappa[run.mode])
    );
    Ok(RunOutput {
        document,
        fields,
        summary,
        passed: true,
    })
}

#[derive(Serialize)]
struct InertialDoc {
    schema_version: u32,
    m: u32,
    alpha: f64,
    n_r: usize,
    eigenvalues: Vec<Eigenvalue>,
    max_imag: f64,
    max_abs: f64,
    kappa_resolved: f64,
    max_resolved_error: f64,
}

fn inertial(cfg: &RunConfig) -> Result<RunOutput> {
    let run = run_inertial(cfg.m, cfg.alpha, cfg.n_r)?;
    let document = match cfg.format {
        Format::Csv => run.spectrum.to_csv(),
        Format::Json => json(&InertialDoc {
            schema_version: SCHEMA_VERSION,
            m: run.m,
            alpha: run.alpha,
            n_r: run.n,
            eigenvalues: eigen_rows(&run.spectrum.eigenvalues, &run.spectrum.residuals),
            max_imag: run.max_imag,
            max_abs: run.max_abs,
            kappa_resolved: run.kappa_resolved,
            max_resolved_error: run.max_resolved_error(),
        }),
    };
    let omega = run.omega();
    let summary = format!(
        "inertial m={} alpha={} N={}: {} frequencies in [{}, {}], max |Im| {:.3e}, {} resolved roots within {:.3e}",
        run.m,
        run.alpha,
        run.n,
        omega.len(),
        format_sig17(omega[0]),
        format_sig17(omega[omega.len() - 1]),
        run.max_imag,
        run.resolved.len(),
        run.max_resolved_error()
    );
    Ok(RunOutput {
        document,
        fields: Vec::new(),
        summary,
        passed: true,
    })
}

#[derive(Serialize)]
struct ModeDoc {
    kind: ModeKind,
    index: usize,
    re: f64,
    im: f64,
    residual: f64,
    centroid: f64,
}

#[derive(Serialize)]
struct PipeDoc {
    schema_version: u32,
    params: PipeParams,
    eigenvalues: Vec<Eigenvalue>,
    leading: Vec<ModeDoc>,
}

fn leading_docs(run: &PipeRun) -> Vec<ModeDoc> {
    [ModeKind::Centre, ModeKind::Wall]
        .into_iter()
        .filter_map(|k| run.leading(k))
        .map(|m| ModeDoc {
            kind: m.kind,
            index: m.index,
            re: m.eigenvalue.re,
            im: m.eigenvalue.im,
            residual: m.residual,
            centroid: m.centroid,
        })
        .collect()
}

fn pipe(cfg: &RunConfig) -> Result<RunOutput> {
    let params = PipeParams {
        m: cfg.m,
        alpha: cfg.alpha,
        re: cfg.re,
        n: cfg.n_r,
    };
    let run = run_pipe(params)?;
    let leading = leading_docs(&run);
    let document = match cfg.format {
        Format::Csv => run.spectrum.to_csv(),
        Format::Json => json(&PipeDoc {
            schema_version: SCHEMA_VERSION,
            params,
            eigenvalues: eigen_rows(&run.spectrum.eigenvalues, &run.spectrum.residuals),
            leading,
        }),
    };
    let radii = uniform_radii(cfg.grid_nr);
    let mut fields = Vec::new();
    let mut parts = Vec::new();
    for (kind, label) in [(ModeKind::Centre, "centre"), (ModeKind::Wall, "wall")] {
        if let Some(mode) = run.leading(kind) {
            if cfg.fields.is_some() {
                for mut f in mode_fields(cfg.m, mode, &radii, cfg.grid_ntheta)? {
                    f.name = format!("{label}_{}", f.name);
                    fields.push(f);
                }
            }
            parts.push(format!(
                "{label} {}{:+}i (n={})",
                format_sig17(mode.eigenvalue.re),
                mode.eigenvalue.im,
                mode.index
            ));
        }
    }
    let summary = format!(
        "pipe m={} alpha={} Re={:e} N={}: {} eigenvalues; {}",
        cfg.m,
        cfg.alpha,
        cfg.re,
        cfg.n_r,
        run.spectrum.len(),
        parts.join(", ")
    );
    Ok(RunOutput {
        document,
        fields,
        summary,
        passed: true,
    })
}

fn helmholtz(cfg: &RunConfig) -> Result<RunOutput> {
    let params = HelmholtzParams {
        kappa_sq: cfg.kappa_sq(),
        tol: cfg.tol,
        ..HelmholtzParams::new(cfg.kappa, cfg.tol)
    };
    let run = run_helmholtz(&Forcing::gaussian(), &params)?;
    let r = &run.report;
    let document = match cfg.format {
        Format::Json => json(r),
        Format::Csv => {
            let mut s = String::from("m,n_used,residual\n");
            for p in &r.per_m {
                s.push_str(&format!(
                    "{},{},{}\n",
                    p.m,
                    p.n_used,
                    format_sig17(p.residual)
                ));
            }
            s
        }
    };
    let mut fields = Vec::new();
    if cfg.fields.is_some() {
        let radii = uniform_radii(cfg.grid_nr);
        let thetas = theta_grid(cfg.grid_ntheta);
        let values = radii
            .iter()
            .map(|&rad| {
                thetas
                    .iter()
                    .map(|&t| run.eval(rad, t).map(Complex64::from))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        fields.push(GridField {
            name: "solution".into(),
            radii,
            thetas,
            values,
        });
    }
    let mut summary = format!(
        "helmholtz kappa={}{}: {} coefficients over {} Fourier indices, max residual {:.3e}, {:.3} s",
        cfg.kappa,
        if cfg.screened { " (screened)" } else { "" },
        r.total_coeffs,
        r.per_m.len(),
        r.max_residual,
        r.wall_time_s
    );
    for w in &r.warnings {
        summary.push_str(&format!("\nwarning: {w}"));
    }
    Ok(RunOutput {
        document,
        fields,
        summary,
        passed: true,
    })
}

fn opscheck(cfg: &RunConfig) -> Result<RunOutput> {
    let report = run_opscheck(&Factory, cfg.seed, OpsSizes::default())?;
    let document = match cfg.format {
        Format::Csv => report.to_csv(),
        Format::Json => json(&report),
    };
    let worst = report
        .checks
        .iter()
        .max_by(|a, b| (a.deviation / a.tolerance).total_cmp(&(b.deviation / b.tolerance)));
    let mut summary = format!(
        "opscheck seed={}: {} checks, {} failed",
        cfg.seed,
        report.checks.len(),
        report.failures().count()
    );
    if let Some(w) = worst {
        summary.push_str(&format!(
            "; worst {}/{} (k={}, m={}, N={}) deviation {:.3e} of tolerance {:.1e}",
            w.suite, w.name, w.k, w.m, w.n, w.deviation, w.tolerance
        ));
    }
    Ok(RunOutput {
        document,
        fields: Vec::new(),
        summary,
        passed: report.passed,
    })
}

/// Runs the configured example.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.example {
        Example::Bessel => bessel(cfg),
        Example::Inertial => inertial(cfg),
        Example::Pipe => pipe(cfg),
        Example::Helmholtz => helmholtz(cfg),
        Example::Opscheck => opscheck(cfg),
    }
}
