use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{PbMode, ProblemConfig};
use super::scenarios::coefficient_field;
use crate::bddc::{Bddc, BddcOptions};
use crate::coarse_edges::CoarseSpace;
use crate::error::{Error, Result};
use crate::linalg::{pcg, SolveReport};
use crate::meshfe::{assemble_global, assemble_subdomains, BoxMesh, CoefficientField, EdgeSpace, GlobalSystem, LocalSystem};
use crate::partition::{classify_globs, geometric_partition, GlobSet, PbPartition};

/// Everything up to, but excluding, the preconditioner.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: ProblemConfig,
    pub space: EdgeSpace,
    pub field: CoefficientField,
    pub part: PbPartition,
    pub globs: GlobSet,
    pub coarse: CoarseSpace,
    pub global: GlobalSystem,
    pub locals: Vec<LocalSystem>,
}

impl Pipeline {
    pub fn build(cfg: &ProblemConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.mesh_cells();
        let l = cfg.lengths;
        let mesh = BoxMesh::new(n[0], n[1], n[2], l[0], l[1], l[2]).map_err(|e| e.context("mesh"))?;
        let field = coefficient_field(cfg, &mesh).map_err(|e| e.context("scenario"))?;
        let n_geo = cfg.n_subdomains();
        let geo = geometric_partition(&mesh, cfg.partition).map_err(|e| e.context("partition"))?;
        let part = match cfg.pb_mode {
            PbMode::Geometric => PbPartition::geometric(geo, n_geo, &field),
            PbMode::Material => PbPartition::by_material(&mesh, geo, n_geo, &field),
            PbMode::Relaxed => {
                PbPartition::relaxed(&mesh, geo, n_geo, &field, cfg.r_alpha, cfg.r_beta, cfg.split_connected)
            }
        }
        .map_err(|e| e.context("partition"))?;
        let globs = classify_globs(&mesh, &part);
        let space = EdgeSpace::new(mesh);
        let coarse = CoarseSpace::build(&space, &globs).map_err(|e| e.context("coarse edges"))?;
        let global = assemble_global(&space, &field, cfg.load).map_err(|e| e.context("assembly"))?;
        let locals = assemble_subdomains(&space, &field, &part.geo, n_geo, cfg.load).map_err(|e| e.context("assembly"))?;
        Ok(Self { config: cfg.clone(), space, field, part, globs, coarse, global, locals })
    }

    pub fn options(&self) -> BddcOptions {
        BddcOptions { scaling: self.config.scaling, perturbed: self.config.perturbed }
    }

    pub fn preconditioner(&self, opts: BddcOptions) -> Result<Bddc> {
        Bddc::setup(&self.space, &self.global, &self.locals, &self.part, &self.globs, &self.coarse, opts)
            .map_err(|e| e.context("preconditioner setup"))
    }

    pub fn solve(&self, prec: &Bddc) -> Result<(Vec<f64>, SolveReport)> {
        let a = self.global.a();
        pcg(&a, prec, &self.global.f, self.config.tol, self.config.maxit).map_err(|e| e.context("solve"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub iterations: usize,
    pub converged: bool,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub condition: f64,
    pub coarse_size: usize,
    pub n_dofs: usize,
    pub subdomain_dofs: Vec<usize>,
    pub n_pb: usize,
    pub n_globs: usize,
    pub n_coarse_edges: usize,
    pub residual_history: Vec<f64>,
    pub setup_s: f64,
    pub solve_s: f64,
    pub config: BTreeMap<String, String>,
}

impl RunReport {
    /// The report with timing fields zeroed.
    pub fn without_timing(&self) -> Self {
        Self { setup_s: 0.0, solve_s: 0.0, ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs the whole pipeline and PCG; returns the report and the solution.
pub fn run_with_solution(cfg: &ProblemConfig) -> Result<(RunReport, Vec<f64>)> {
    crate::par::with_threads(cfg.threads, || {
        let t0 = Instant::now();
        let pipe = Pipeline::build(cfg)?;
        let prec = pipe.preconditioner(pipe.options())?;
        let setup_s = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let (x, rep) = pipe.solve(&prec)?;
        let solve_s = t1.elapsed().as_secs_f64();
        let report = RunReport {
            iterations: rep.iterations,
            converged: rep.converged,
            lambda_min: rep.lanczos_eigs.0,
            lambda_max: rep.lanczos_eigs.1,
            condition: rep.condition_estimate(),
            coarse_size: prec.coarse_size(),
            n_dofs: pipe.space.n_dofs(),
            subdomain_dofs: pipe.locals.iter().map(LocalSystem::n_dofs).collect(),
            n_pb: pipe.part.n_pb(),
            n_globs: pipe.globs.n_globs(),
            n_coarse_edges: pipe.coarse.n_edges(),
            residual_history: rep.residual_history,
            setup_s,
            solve_s,
            config: cfg.to_map(),
        };
        Ok((report, x))
    })
}

pub fn run(cfg: &ProblemConfig) -> Result<RunReport> {
    run_with_solution(cfg).map(|(r, _)| r)
}

/// C `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), exp.abs())
    } else {
        trim(&format!("{:.*}", (16 - exp) as usize, x))
    }
}

pub const CSV_HEADER: &str =
    "scenario,P,H_over_h,scaling,perturbed,pb_mode,r_alpha,r_beta,contrast,iterations,lambda_min,lambda_max,coarse_size,n_dofs,setup_s,solve_s";

pub fn csv_row(cfg: &ProblemConfig, r: &RunReport) -> String {
    let cells = cfg.mesh_cells();
    [
        cfg.scenario.to_string(),
        cfg.n_subdomains().to_string(),
        (cells[0] / cfg.partition[0]).to_string(),
        cfg.scaling.to_string(),
        cfg.perturbed.to_string(),
        cfg.pb_mode.to_string(),
        format_g17(cfg.r_alpha),
        format_g17(cfg.r_beta),
        format_g17(cfg.contrast()),
        r.iterations.to_string(),
        format_g17(r.lambda_min),
        format_g17(r.lambda_max),
        r.coarse_size.to_string(),
        r.n_dofs.to_string(),
        format_g17(r.setup_s),
        format_g17(r.solve_s),
    ]
    .join(",")
}

/// Appends rows to `path`, writing the header first if the file is new or
/// empty.
pub fn append_csv(path: &Path, rows: &[String]) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        f.write_all(CSV_HEADER.as_bytes())?;
        f.write_all(b"\n")?;
    }
    for r in rows {
        f.write_all(r.as_bytes())?;
        f.write_all(b"\n")?;
    }
    Ok(())
}

/// Runs `cfg` once per value of `key`; returns each configuration with its
/// report.
pub fn sweep(cfg: &ProblemConfig, key: &str, values: &[String]) -> Result<Vec<(ProblemConfig, RunReport)>> {
    if cfg.get(key).is_none() {
        return Err(Error::Config(format!("unknown sweep key `{key}`")));
    }
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let mut c = cfg.clone();
        c.set(key, v)?;
        let r = run(&c).map_err(|e| e.context(format!("{key} = {v}")))?;
        out.push((c, r));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::config::Scenario;

    #[test]
    fn g17_matches_c_printf() {
        // expected strings from printf("%.17g")
        let cases = [
            (0.1, "0.10000000000000001"),
            (1e-6, "9.9999999999999995e-07"),
            (1.0, "1"),
            (1e6, "1000000"),
            (1e17, "1e+17"),
            (123.456, "123.456"),
            (-2.5e-5, "-2.5000000000000001e-05"),
            (1.0 / 3.0, "0.33333333333333331"),
            (0.0001, "0.0001"),
            (f64::INFINITY, "inf"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g17(x), s, "{x:e}");
        }
    }

    #[test]
    fn homogeneous_run_converges_and_is_deterministic() {
        let mut cfg = ProblemConfig::default();
        cfg.threads = 1;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert!(a.converged && a.iterations <= 25, "{}", a.iterations);
        assert_eq!(a.coarse_size, 12);
        assert_eq!(a.without_timing().to_json().unwrap(), b.without_timing().to_json().unwrap());
        assert!(a.lambda_min >= 1.0 - 1e-6);
    }

    #[test]
    fn csv_row_layout() {
        let mut cfg = ProblemConfig::default();
        cfg.scenario = Scenario::Checkerboard;
        cfg.contrast_exp = Some(1.0);
        cfg.h_ratio = 2;
        let r = run(&cfg).unwrap();
        let row = csv_row(&cfg, &r);
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), CSV_HEADER.split(',').count());
        assert_eq!(&fields[..9], &["checkerboard", "8", "2", "cardinality", "false", "geometric", "inf", "inf", "100"]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        append_csv(&p, std::slice::from_ref(&row)).unwrap();
        append_csv(&p, &[row]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with(CSV_HEADER) && text.ends_with('\n') && !text.contains('\r'));
    }

    #[test]
    fn bad_config_surfaces_context() {
        let mut cfg = ProblemConfig::default();
        cfg.partition = [3, 2, 2];
        cfg.h_ratio = 0;
        cfg.cells = [8, 8, 8];
        assert!(run(&cfg).is_err());
    }
}
