//! Executes a [`RunConfig`] and collects the output files.

use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use fraclap::fl_oracle::{frac_lap_direct_1d, frac_lap_radial_2d, OracleConfig, RadialSupport};
use fraclap::geometry::{make_annulus, make_disc, make_kite, Interval1D, Point};
use fraclap::manufactured::{disc_exact_phi, disc_exact_u, family_rhs, ConvergenceReport, FamilyG, JacobiFamilySpec};
use fraclap::solver1d::{solve_1d, Problem1D};
use fraclap::solver2d::{solve_2d, verify_composition, Problem2D, Resolution2D};
use fraclap::special_fn::FractionalOrder;
use fraclap::{DomainGeometry64, Solution1D64, Solution2D64};
use serde::Serialize;
use serde_json::json;

use crate::config::{DomainSpec, GSpec, Kind, Reference, Resolution, RhsSpec, RunConfig};
use crate::expr::Expr;
use crate::CliError;

/// Version string of the build, from `git describe` when available.
pub const BUILD: &str = env!("FRACLAP_BUILD");

type F2 = Arc<dyn Fn(Point<f64>) -> f64 + Send + Sync>;
type F1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Everything a run writes, as file name and contents.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (name, text) in &self.files {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }

    fn check(&mut self, name: &str, value: f64, tolerance: Option<f64>) {
        if let Some(t) = tolerance {
            self.checks.push(Check { name: name.into(), value, tolerance: t, passed: value <= t });
        }
    }
}

fn order(cfg: &RunConfig) -> Result<FractionalOrder<f64>, CliError> {
    Ok(FractionalOrder::new(cfg.s)?)
}

fn domain_2d(cfg: &RunConfig) -> Result<DomainGeometry64, CliError> {
    let d = match cfg.domain {
        DomainSpec::Disc { radius } => make_disc(radius)?,
        DomainSpec::Kite => make_kite()?,
        DomainSpec::Annulus { inner, outer } => make_annulus(inner, outer)?,
        DomainSpec::Interval { .. } => return Err(CliError::Config("expected a 2D domain".into())),
    };
    Ok(match cfg.d_scale {
        Some(c) => d.with_d_scale(c)?,
        None => d,
    })
}

fn interval(cfg: &RunConfig) -> Result<Interval1D<f64>, CliError> {
    match cfg.domain {
        DomainSpec::Interval { a, b } => Ok(Interval1D::new(a, b)?),
        _ => Err(CliError::Config("expected an interval".into())),
    }
}

fn family(cfg: &RunConfig, k: usize, g: GSpec) -> Result<JacobiFamilySpec<f64>, CliError> {
    let g = match g {
        GSpec::RadiusSquared => FamilyG::RadiusSquared,
        GSpec::Kite => FamilyG::Kite,
        GSpec::AnnulusRadial => FamilyG::AnnulusRadial,
    };
    Ok(JacobiFamilySpec::new(order(cfg)?, k, g))
}

fn rhs_2d(cfg: &RunConfig) -> Result<F2, CliError> {
    Ok(match &cfg.rhs {
        RhsSpec::Jacobi { k, g } => Arc::new(family_rhs(&family(cfg, *k, *g)?)?),
        RhsSpec::Constant { value } => {
            let v = *value;
            Arc::new(move |_| v)
        }
        RhsSpec::Expression { expr } => {
            let e = Expr::parse(expr, ["x", "y"])?;
            Arc::new(move |p: Point<f64>| e.eval(p[0], p[1]))
        }
    })
}

fn rhs_1d(cfg: &RunConfig) -> Result<F1, CliError> {
    Ok(match &cfg.rhs {
        RhsSpec::Constant { value } => {
            let v = *value;
            Arc::new(move |_| v)
        }
        RhsSpec::Expression { expr } => {
            let e = Expr::parse(expr, ["x", ""])?;
            Arc::new(move |x| e.eval(x, 0.0))
        }
        RhsSpec::Jacobi { .. } => return Err(CliError::Config("the Jacobi family is two-dimensional".into())),
    })
}

/// Exact `u` of the disc family, independent of the scaling of `d`.
fn exact_u(cfg: &RunConfig) -> Result<Option<F2>, CliError> {
    match (&cfg.rhs, cfg.has_exact()) {
        (RhsSpec::Jacobi { k, g }, true) => Ok(Some(Arc::new(disc_exact_u(&family(cfg, *k, *g)?)?))),
        _ => Ok(None),
    }
}

/// `(ε_∞, ε_rms)`; a zero reference gives the absolute maximum instead
/// of the relative one.
fn metrics(u: &[f64], u_ref: &[f64]) -> Result<(f64, f64), CliError> {
    if u_ref.iter().all(|v| *v == 0.0) {
        let m = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rms = (u.iter().map(|v| v * v).sum::<f64>() / u.len().max(1) as f64).sqrt();
        return Ok((m, rms));
    }
    Ok(fraclap::manufactured::error_metrics(u, u_ref)?)
}

fn res_2d(r: &Resolution) -> Resolution2D {
    Resolution2D::new(r.n_rho.unwrap_or(0), r.n_theta.unwrap_or(0), r.n_boundary.unwrap_or(0))
}

enum Solved {
    One(Solution1D64),
    Two(Solution2D64),
}

impl Solved {
    fn unknowns(&self) -> usize {
        match self {
            Solved::One(s) => s.phi_coeffs.len() + 2,
            Solved::Two(s) => s.diagnostics.unknowns,
        }
    }

    fn residual(&self) -> f64 {
        match self {
            Solved::One(s) => s.residual,
            Solved::Two(s) => s.diagnostics.residual,
        }
    }

    /// Node coordinates (1D nodes as `[x]`) and `u` there.
    fn node_values(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        match self {
            Solved::One(s) => (s.collocation.iter().map(|x| vec![*x]).collect(), s.collocation.iter().map(|x| s.u_eval(*x)).collect()),
            Solved::Two(s) => (s.grid.nodes.iter().map(|p| p.to_vec()).collect(), s.u_nodes()),
        }
    }

    fn u_at(&self, p: &[f64]) -> f64 {
        match self {
            Solved::One(s) => s.u_eval(p[0]),
            Solved::Two(s) => s.u_eval([p[0], p[1]]),
        }
    }
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    verbose: bool,
}

impl Runner<'_> {
    fn log(&self, msg: impl FnOnce() -> String) {
        if self.verbose {
            eprintln!("{}", msg());
        }
    }

    fn solve(&self, r: &Resolution) -> Result<Solved, CliError> {
        let cfg = self.cfg;
        let t = Instant::now();
        let out = if cfg.domain.is_1d() {
            let f = rhs_1d(cfg)?;
            let p = Problem1D::new(interval(cfg)?, order(cfg)?, move |x| f(x));
            Solved::One(solve_1d(&p, r.n.unwrap_or(0))?)
        } else {
            let f = rhs_2d(cfg)?;
            let p = Problem2D::new(domain_2d(cfg)?, order(cfg)?, move |x| f(x));
            Solved::Two(solve_2d(&p, res_2d(r))?)
        };
        self.log(|| format!("solved {r:?}: {} unknowns in {:.2} s", out.unknowns(), t.elapsed().as_secs_f64()));
        Ok(out)
    }

    fn solution_json(&self, sol: &Solved, res: &Resolution, checks: &[Check]) -> String {
        let cfg = self.cfg;
        let (nodes, u) = sol.node_values();
        let mut v = json!({
            "metadata": {
                "kind": cfg.kind,
                "s": cfg.s,
                "d_scale": cfg.d_scale.unwrap_or(1.0),
                "domain": cfg.domain,
                "rhs": cfg.rhs,
                "resolution": res,
                "unknowns": sol.unknowns(),
                "build": BUILD,
            },
            "nodes": nodes,
            "u": u,
        });
        let m = v.as_object_mut().expect("object");
        match sol {
            Solved::One(s) => {
                m.insert("phi".into(), json!(s.collocation.iter().map(|x| s.phi(*x)).collect::<Vec<_>>()));
                m.insert("phi_chebyshev".into(), json!(s.phi_coeffs));
                m.insert("zeta".into(), json!([s.zeta1, s.zeta2]));
                m.insert("a".into(), json!([]));
                m.insert("diagnostics".into(), json!({ "residual": s.residual, "condition": s.condition }));
            }
            Solved::Two(s) => {
                m.insert("phi".into(), json!(s.phi));
                m.insert("boundary_nodes".into(), json!(s.mesh.positions()));
                m.insert("zeta".into(), json!(s.zeta));
                m.insert("a".into(), json!(s.a));
                let d = &s.diagnostics;
                m.insert(
                    "diagnostics".into(),
                    json!({
                        "residual": d.residual,
                        "condition": d.condition,
                        "hole_basis_residual": d.hole_basis_residual,
                        "gauge_violation": d.gauge_violation,
                    }),
                );
            }
        }
        m.insert("checks".into(), json!(checks));
        serde_json::to_string_pretty(&v).expect("json") + "\n"
    }

    fn slice_csv(&self, sol: &Solved) -> Option<String> {
        let sl = self.cfg.output.slice.as_ref()?;
        let dim = sl.from.len();
        let mut out = if dim == 1 { "x,u\n".to_string() } else { "x1,x2,u\n".to_string() };
        for i in 0..sl.points {
            let t = i as f64 / (sl.points - 1) as f64;
            let p: Vec<f64> = sl.from.iter().zip(&sl.to).map(|(a, b)| a + t * (b - a)).collect();
            let u = sol.u_at(&p);
            for c in &p {
                out += &format!("{c:.15e},");
            }
            out += &format!("{u:.15e}\n");
        }
        Some(out)
    }

    /// Adds `solution.json` and the optional slice for `sol`.
    fn finish(&self, mut out: Outcome, sol: &Solved, res: &Resolution) -> Outcome {
        out.check("residual", sol.residual(), self.cfg.tolerances.residual);
        let json = self.solution_json(sol, res, &out.checks);
        out.files.push(("solution.json".into(), json));
        if let Some(s) = self.slice_csv(sol) {
            out.files.push(("slice.csv".into(), s));
        }
        out
    }

    fn solve_once(&self) -> Result<Outcome, CliError> {
        let res = self.cfg.resolutions[0];
        let t = Instant::now();
        let sol = self.solve(&res)?;
        let mut out = Outcome::default();
        if let Some(u_ref) = exact_u(self.cfg)? {
            let (nodes, u) = sol.node_values();
            let r: Vec<f64> = nodes.iter().map(|p| u_ref([p[0], p[1]])).collect();
            let (ei, er) = metrics(&u, &r)?;
            let mut rep = ConvergenceReport::new();
            rep.push(sol.unknowns(), ei, er, t.elapsed().as_secs_f64())?;
            out.files.push(("report.csv".into(), rep.to_csv()));
            out.check("eps_inf", ei, self.cfg.tolerances.eps_inf);
        }
        Ok(self.finish(out, &sol, &res))
    }

    fn convergence(&self) -> Result<Outcome, CliError> {
        let cfg = self.cfg;
        let exact = match cfg.reference() {
            Reference::Exact => exact_u(cfg)?,
            Reference::Finest => None,
        };
        let mut sols = Vec::new();
        for r in &cfg.resolutions {
            let t = Instant::now();
            let sol = self.solve(r)?;
            sols.push((sol, t.elapsed().as_secs_f64()));
        }
        let mut rep = ConvergenceReport::new();
        let (finest, _) = sols.last().expect("resolutions are validated");
        let rows = if exact.is_some() { sols.len() } else { sols.len() - 1 };
        for (sol, time) in &sols[..rows] {
            let (nodes, u) = sol.node_values();
            let r: Vec<f64> = match &exact {
                Some(ue) => nodes.iter().map(|p| ue([p[0], p[1]])).collect(),
                None => nodes.iter().map(|p| finest.u_at(p)).collect(),
            };
            let (ei, er) = metrics(&u, &r)?;
            self.log(|| format!("N = {}: eps_inf {ei:.3e}, eps_rms {er:.3e}", sol.unknowns()));
            rep.push(sol.unknowns(), ei, er, *time)?;
        }
        let mut out = Outcome::default();
        let last = rep.rows.last().map(|r| r.eps_inf).unwrap_or(0.0);
        out.check("eps_inf", last, cfg.tolerances.eps_inf);
        out.files.push(("report.csv".into(), rep.to_csv()));
        let res = *cfg.resolutions.last().expect("validated");
        Ok(self.finish(out, finest, &res))
    }

    fn oracle(&self) -> Result<Outcome, CliError> {
        let cfg = self.cfg;
        let spec = cfg.oracle.as_ref().expect("validated");
        let s = order(cfg)?;
        let sv = cfg.s;
        let oc = OracleConfig::default();
        let mut rows = Vec::new();
        if cfg.domain.is_1d() {
            let iv = interval(cfg)?;
            let phi = Expr::parse(spec.phi.as_deref().expect("validated"), ["x", ""])?;
            let f = rhs_1d(cfg)?;
            let (a, b) = (iv.a, iv.b);
            let u = move |x: f64| iv.d(x).max(0.0).powf(sv) * phi.eval(x, 0.0);
            for &x in &spec.points {
                rows.push((x, frac_lap_direct_1d(&u, a, b, x, s, &oc)?, f(x)));
            }
        } else {
            let c = cfg.d_scale.unwrap_or(1.0);
            let (support, d): (RadialSupport<f64>, Box<dyn Fn(f64) -> f64>) = match cfg.domain {
                DomainSpec::Disc { radius } => {
                    (RadialSupport::Disc { radius }, Box::new(move |r: f64| c * (radius * radius - r * r)))
                }
                DomainSpec::Annulus { inner, outer } => (
                    RadialSupport::Annulus { inner, outer },
                    Box::new(move |r: f64| c * (outer * outer - r * r) * (r * r - inner * inner)),
                ),
                _ => return Err(CliError::Config("the 2D oracle needs a radial domain".into())),
            };
            let u: Box<dyn Fn(f64) -> f64> = match &spec.phi {
                Some(text) => {
                    let phi = Expr::parse(text, ["r", ""])?;
                    Box::new(move |r: f64| d(r).max(0.0).powf(sv) * phi.eval(r, 0.0))
                }
                None => {
                    let ue = exact_u(cfg)?.expect("validated");
                    Box::new(move |r: f64| ue([r, 0.0]))
                }
            };
            let f = rhs_2d(cfg)?;
            for &r in &spec.points {
                rows.push((r, frac_lap_radial_2d(&*u, support, r, s, &oc)?, f([r, 0.0])));
            }
        }
        let fmax = rows.iter().fold(0.0f64, |m, r| m.max(r.2.abs()));
        let err = rows.iter().fold(0.0f64, |m, r| m.max((r.1 - r.2).abs()));
        let rel = if fmax > 0.0 { err / fmax } else { err };
        let mut csv = String::from("point,frac_lap,f,diff\n");
        for (p, l, f) in &rows {
            csv += &format!("{p:.15e},{l:.15e},{f:.15e},{:.15e}\n", l - f);
        }
        let mut out = Outcome::default();
        out.check("oracle", rel, cfg.tolerances.oracle);
        out.files.push(("oracle.csv".into(), csv));
        let summary = json!({
            "metadata": { "kind": cfg.kind, "s": cfg.s, "domain": cfg.domain, "rhs": cfg.rhs, "build": BUILD },
            "max_relative_difference": rel,
            "checks": out.checks,
        });
        out.files.push(("solution.json".into(), serde_json::to_string_pretty(&summary).expect("json") + "\n"));
        Ok(out)
    }

    fn composition(&self) -> Result<Outcome, CliError> {
        let cfg = self.cfg;
        let spec = cfg.composition.as_ref().expect("validated");
        let dom = domain_2d(cfg)?;
        let s = order(cfg)?;
        let f = rhs_2d(cfg)?;
        let targets: Vec<Point<f64>> = spec.targets.clone();
        let mut solved = None;
        let rep = match (exact_u(cfg)?, &cfg.rhs) {
            (Some(ue), RhsSpec::Jacobi { k, g }) => {
                let phi = disc_exact_phi(&family(cfg, *k, *g)?)?;
                // φ scales like c^{-s} when d is multiplied by c
                let scale = cfg.d_scale.unwrap_or(1.0).powf(-cfg.s);
                verify_composition(|x| ue(x), move |x| scale * phi(x), |x| f(x), &dom, s, &targets, spec.h)?
            }
            _ => {
                let res = *cfg.resolutions.last().expect("validated");
                let Solved::Two(sol) = self.solve(&res)? else { unreachable!("2D domain") };
                let r = verify_composition(|x| sol.u_eval(x), |x| sol.phi_eval(x), |x| f(x), &dom, s, &targets, spec.h)?;
                solved = Some((Solved::Two(sol), res));
                r
            }
        };
        let mut csv = String::from("x1,x2,composed,f\n");
        for ((p, c), fv) in rep.targets.iter().zip(&rep.composed).zip(&rep.f) {
            csv += &format!("{:.15e},{:.15e},{c:.15e},{fv:.15e}\n", p[0], p[1]);
        }
        let mut out = Outcome::default();
        out.check("composition", rep.residual, cfg.tolerances.composition);
        out.files.push(("composition.csv".into(), csv));
        match solved {
            Some((sol, res)) => Ok(self.finish(out, &sol, &res)),
            None => {
                let summary = json!({
                    "metadata": { "kind": cfg.kind, "s": cfg.s, "domain": cfg.domain, "rhs": cfg.rhs, "build": BUILD },
                    "residual": rep.residual,
                    "u_mismatch": rep.u_mismatch,
                    "checks": out.checks,
                });
                out.files.push(("solution.json".into(), serde_json::to_string_pretty(&summary).expect("json") + "\n"));
                Ok(out)
            }
        }
    }
}

/// Runs `cfg` and returns the files to write and the tolerance checks.
pub fn execute(cfg: &RunConfig, verbose: bool) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let r = Runner { cfg, verbose };
    match cfg.kind {
        Kind::Solve1d | Kind::Solve2d => r.solve_once(),
        Kind::Convergence => r.convergence(),
        Kind::Oracle => r.oracle(),
        Kind::VerifyComposition => r.composition(),
    }
}
