//! `mas`: verification front end for Monge-Ampère structures of fluid flows.
//!
//! Every subcommand prints one JSON report (schema `report_version` 1).
//! Exit codes: 0 pass, 1 a check failed, 2 bad input.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mas_core::catalog::{self, Entry};
use mas_core::curvature::{self, MetricField};
use mas_core::exterior::{signature, VectorField};
use mas_core::fieldexpr::ScalarField;
use mas_core::fluids::{self, GridField};
use mas_core::ma4::{self, MaStructure4};
use mas_core::ma6;
use mas_core::reduction::{self, TranslationAction};
use mas_core::report::Report;
use mas_core::{sample, selftest, Error};

const REPORT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "mas", version, allow_negative_numbers = true, about = "Monge-Ampère geometry of incompressible flows")]
struct Cli {
    /// Seed for the random sample set.
    #[arg(long, env = "MAS_SEED", default_value_t = sample::DEFAULT_SEED, global = true)]
    seed: u64,
    /// Number of sample points.
    #[arg(long, default_value_t = sample::DEFAULT_SAMPLES as u64, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Replace every check tolerance (must be positive).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print a short human-readable summary instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run every known-answer vector.
    Selftest {
        /// Corrupt one expected value; the run must then fail.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Elliptic/hyperbolic type of the 2D Euler structure.
    Classify {
        /// Stream function over (x1, x2); a = ψ_11 ψ_22 − ψ_12².
        #[arg(long, conflicts_with = "a", required_unless_present = "a", allow_hyphen_values = true)]
        psi: Option<String>,
        /// a = Δp/2 over (x1, x2).
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        /// Comma-separated point, e.g. "0,0".
        #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
        at: Option<String>,
        /// Lattice "min:max:n,min:max:n".
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Hypersymplectic triple of the 2D Euler structure.
    Triple {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// Hitchin tensor, pfaffian, metric and dual of a 6D catalog structure.
    Hitchin {
        #[arg(long, default_value = "burgers-cy")]
        structure: String,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
    },
    /// Reduction along a translation action.
    Reduce {
        #[arg(long, value_enum)]
        action: Action,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Moment-map level c.
        #[arg(long, default_value_t = 0.0)]
        level: f64,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        a: String,
    },
    /// Burgers-type construction: planar equation, Poisson source, bilagrangian graph.
    Burgers {
        #[arg(long)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
        /// Δp over (x1, x2).
        #[arg(long, allow_hyphen_values = true)]
        dp: String,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
    },
    /// Ricci and Riemann tensors of a catalog metric.
    Curvature {
        #[arg(long, default_value = "burgers-cy")]
        metric: String,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
    },
    /// Finite-difference diagnostics of gridded velocity data.
    Grid {
        /// CSV with header x1,x2[,x3],u1,u2[,u3][,p].
        #[arg(long, required_unless_present = "synthetic")]
        csv: Option<PathBuf>,
        /// Built-in sampled flow instead of a file.
        #[arg(long, value_enum, conflicts_with = "csv")]
        synthetic: Option<Synthetic>,
        /// Nodes per axis for synthetic flows.
        #[arg(long, default_value_t = 32)]
        n: usize,
        /// Also save the synthetic lattice as CSV.
        #[arg(long)]
        write_csv: Option<PathBuf>,
        /// Include per-node records.
        #[arg(long)]
        full: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Action {
    Laplace3d,
    Stretching,
    BurgersSplit,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Synthetic {
    Rotation,
    TaylorGreen,
    Burgers,
}

/// Error envelope: `{stage, message, offset?}`.
struct Failure {
    stage: &'static str,
    err: Error,
}

trait Stage<T> {
    fn at(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for mas_core::Result<T> {
    fn at(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|err| Failure { stage, err })
    }
}

struct Output {
    body: Value,
    /// `None` for purely descriptive commands.
    pass: Option<bool>,
    lines: Vec<String>,
}

fn report_lines(r: &Report) -> Vec<String> {
    r.per_check
        .iter()
        .map(|c| {
            let tag = if c.informational {
                "INFO"
            } else if c.pass {
                "PASS"
            } else {
                "FAIL"
            };
            format!("{tag} {} (residual {:.3e}, tol {:.0e})", c.name, c.residual, c.tol)
        })
        .collect()
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn plane(src: &str) -> Result<ScalarField, Failure> {
    ScalarField::parse(src, &ma4::plane_chart()).at("parse")
}

fn parse_point(s: &str, dim: usize) -> Result<Vec<f64>, Failure> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure { stage: "parse", err: Error::Invalid(format!("point `{s}`: {e}")) })?;
    if vals.len() != dim {
        return Err(Failure { stage: "parse", err: Error::Dimension { expected: dim, got: vals.len() } });
    }
    Ok(vals)
}

/// `min:max:n` per axis, comma-separated.
fn parse_lattice(s: &str, dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let bad = |m: String| Failure { stage: "parse", err: Error::Invalid(m) };
    let axes: Vec<&str> = s.split(',').collect();
    if axes.len() != dim {
        return Err(Failure { stage: "parse", err: Error::Dimension { expected: dim, got: axes.len() } });
    }
    let mut ticks = Vec::new();
    for ax in axes {
        let parts: Vec<&str> = ax.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(bad(format!("axis `{ax}` is not min:max:n")));
        };
        let lo: f64 = lo.trim().parse().map_err(|e| bad(format!("`{lo}`: {e}")))?;
        let hi: f64 = hi.trim().parse().map_err(|e| bad(format!("`{hi}`: {e}")))?;
        let n: usize = n.trim().parse().map_err(|e| bad(format!("`{n}`: {e}")))?;
        if n == 0 {
            return Err(bad("a lattice axis needs at least one node".into()));
        }
        let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
        ticks.push((0..n).map(|i| lo + i as f64 * step).collect::<Vec<f64>>());
    }
    let mut pts = vec![vec![]];
    for t in ticks {
        pts = pts.into_iter().flat_map(|p: Vec<f64>| t.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    Ok(pts)
}

fn apply_tol(r: &mut Report, tol: Option<f64>) {
    if let Some(t) = tol {
        r.retolerate(t);
    }
}

fn cmd_selftest(cli: &Cli, inject_fault: bool) -> Result<Output, Failure> {
    let opts = selftest::Options { seed: cli.seed, samples: cli.samples as usize, inject_fault };
    let out = selftest::run(&opts);
    let mut lines: Vec<String> = out
        .vectors
        .iter()
        .map(|v| {
            let tag = if v.pass { "PASS" } else { "FAIL" };
            format!("{tag} [{}] {} (residual {:.3e})", v.module, v.name, v.residual)
        })
        .collect();
    lines.extend(out.errata.iter().map(|v| format!("ERRATUM [{}] {} (residual {:.3e})", v.module, v.name, v.residual)));
    Ok(Output { body: to_value(&out), pass: Some(out.passed), lines })
}

fn cmd_classify(psi: &Option<String>, a: &Option<String>, at: &Option<String>, grid: &Option<String>) -> Result<Output, Failure> {
    let a_field = match (psi, a) {
        (Some(p), None) => {
            let psi = plane(p)?;
            let h = |i: usize, j: usize| psi.diff_many(&[i, j]);
            h(0, 0) * h(1, 1) - h(0, 1) * h(0, 1)
        }
        (None, Some(a)) => plane(a)?,
        _ => return Err(Failure { stage: "parse", err: Error::Invalid("give exactly one of --psi, --a".into()) }),
    };
    let pts = match (at, grid) {
        (Some(p), _) => vec![parse_point(p, 2)?],
        (None, Some(g)) => parse_lattice(g, 2)?,
        (None, None) => vec![vec![0.0, 0.0]],
    };
    let s = MaStructure4::euler(&a_field).at("structure")?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for p in &pts {
        let q = [p[0], p[1], 0.0, 0.0];
        let class = ma4::classify(&s, &q).at("classify")?;
        let av = a_field.eval(p).at("classify")?;
        lines.push(format!("{p:?}: a = {av} → {class:?}"));
        rows.push(json!({ "point": p, "a": av, "class": class }));
    }
    let body = json!({ "a": a_field.to_string(), "points": rows });
    Ok(Output { body, pass: None, lines })
}

fn cmd_triple(cli: &Cli, a: &str) -> Result<Output, Failure> {
    let a = plane(a)?;
    let s = MaStructure4::euler(&a).at("structure")?;
    let pts = sample::unit_box(cli.seed, cli.samples as usize, 4);
    let t = ma4::build_triple(&s, &pts).at("build_triple")?;
    let mut rep = t.verify(&pts, cli.tol.unwrap_or(1e-10)).at("verify")?;
    apply_tol(&mut rep, cli.tol);
    let integ = ma4::integrability(&s, &pts).at("integrability")?;
    let lines = report_lines(&rep);
    let body = json!({
        "a": a.to_string(),
        "omega_hat": t.omega_hat.to_string(),
        "report": rep,
        "integrability": integ,
    });
    Ok(Output { body, pass: Some(rep.passed()), lines })
}

fn cmd_hitchin(cli: &Cli, name: &str, a: &Option<String>) -> Result<Output, Failure> {
    let a = a.as_deref().map(plane).transpose()?;
    let pts = sample::unit_box(cli.seed, cli.samples as usize, 6);
    match catalog::lookup(name, a.as_ref()).at("catalog")? {
        Entry::Four(_) => Err(Failure {
            stage: "catalog",
            err: Error::Invalid(format!("`{name}` is a 4D structure; use `triple`")),
        }),
        Entry::Six(s) => {
            let h0 = ma6::hitchin_at(&s.omega, &s.vol, &pts[0]).at("hitchin")?;
            let mut lam = (f64::INFINITY, f64::NEG_INFINITY);
            for p in &pts {
                let l = ma6::hitchin_at(&s.omega, &s.vol, p).at("hitchin")?.lambda;
                lam = (lam.0.min(l), lam.1.max(l));
            }
            let g = ma6::lr_metric6(&s.omega, &s.big, &s.vol, false).at("lr_metric")?;
            let gm = g.eval(&pts[0]).at("lr_metric")?;
            let mut compat = ma6::lr_compatibility(&s, &pts).at("compatibility")?;
            apply_tol(&mut compat, cli.tol);
            let dual = if h0.degenerate { None } else { Some(ma6::hitchin_dual(&s.omega, &s.vol).at("dual")?) };
            let rows = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
                (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
            };
            let mut lines = vec![format!("λ ∈ [{}, {}]", lam.0, lam.1), format!("signature {:?}", signature(&gm))];
            lines.extend(report_lines(&compat));
            let body = json!({
                "structure": name,
                "description": catalog::describe(name),
                "omega": s.omega.to_string(),
                "lambda": { "min": lam.0, "max": lam.1 },
                "degenerate": h0.degenerate,
                "at": pts[0],
                "K": rows(&h0.k),
                "g": rows(&gm),
                "signature": signature(&gm),
                "dual": dual.map(|d| d.to_string()),
                "compatibility": compat,
            });
            Ok(Output { body, pass: Some(compat.passed()), lines })
        }
        Entry::Pair(p) => {
            let mut rep = ma6::euler_pair_relations(&p, &pts).at("relations")?;
            apply_tol(&mut rep, cli.tol);
            let lines = report_lines(&rep);
            let body = json!({
                "structure": name,
                "description": catalog::describe(name),
                "omega": p.omega.to_string(),
                "theta": p.theta.to_string(),
                "report": rep,
            });
            Ok(Output { body, pass: Some(rep.passed()), lines })
        }
    }
}

fn cmd_reduce(cli: &Cli, action: Action, gamma: f64, level: f64, a: &str) -> Result<Output, Failure> {
    let a = plane(a)?;
    let pts6 = sample::unit_box(cli.seed, cli.samples as usize, 6);
    match action {
        Action::Laplace3d => {
            let act = TranslationAction::laplace3d(level).at("action")?;
            let wc = reduction::reduce(&reduction::laplace3d_form(), &act, &pts6).at("reduce")?;
            let body = json!({
                "action": "laplace3d",
                "moment_map": act.mu.to_string(),
                "level": level,
                "omega_c": wc.to_string(),
                "omega_c_form": wc.to_json(),
            });
            Ok(Output { lines: vec![format!("ω_c = {wc}")], body, pass: None })
        }
        Action::Stretching => {
            let mut red = reduction::reduce_euler_pair(&a, gamma, level, &pts6).at("reduce")?;
            apply_tol(&mut red.report, cli.tol);
            let mut lines = vec![
                format!("ω_c = {}", red.omega_c),
                format!("θ_c = {}", red.theta_c),
                format!("ω₀ = {}", red.change.omega0),
            ];
            lines.extend(report_lines(&red.report));
            let body = json!({
                "action": "stretching",
                "gamma": gamma,
                "level": level,
                "omega_c": red.omega_c.to_string(),
                "theta_c": red.theta_c.to_string(),
                "theta_c_canonical": red.change.theta_c.to_string(),
                "omega0": red.change.omega0.to_string(),
                "report": red.report,
            });
            Ok(Output { body, pass: Some(red.report.passed()), lines })
        }
        Action::BurgersSplit => {
            let mut rep = reduction::burgers_decomposition(&a, &pts6).at("decomposition")?;
            apply_tol(&mut rep, cli.tol);
            let lines = report_lines(&rep);
            let body = json!({ "action": "burgers-split", "a": a.to_string(), "report": rep });
            Ok(Output { body, pass: Some(rep.passed()), lines })
        }
    }
}

fn cmd_burgers(cli: &Cli, gamma: f64, psi: &str, dp: &str, c: f64) -> Result<Output, Failure> {
    let psi = plane(psi)?;
    let a = plane(dp)?.scale(0.5);
    let pts = sample::unit_box(cli.seed, cli.samples as usize, 3);
    let mut r = fluids::prop5_verify(gamma, &psi, c, &a, &pts).at("construction")?;
    apply_tol(&mut r.report, cli.tol);
    r.failed_stage = r.report.per_check.iter().filter(|ch| !ch.pass && !ch.informational).find_map(|ch| {
        [fluids::Stage::StreamFunction, fluids::Stage::PressurePoisson, fluids::Stage::Bilagrangian]
            .into_iter()
            .find(|s| ch.name.starts_with(s.label()))
    });
    let u = fluids::burgers_build(gamma, &psi, c).at("construction")?.u;
    let comps: Vec<String> = u.components().iter().map(|f| f.to_string()).collect();
    let lines = report_lines(&r.report);
    let body = json!({ "gamma": gamma, "psi": psi.to_string(), "a": a.to_string(), "c": c, "u": comps, "report": r });
    Ok(Output { body, pass: Some(r.report.passed()), lines })
}

fn cmd_curvature(cli: &Cli, name: &str, a: &Option<String>) -> Result<Output, Failure> {
    let a = a.as_deref().map(plane).transpose()?;
    let (g, dim) = match catalog::lookup(name, a.as_ref()).at("catalog")? {
        Entry::Four(s) => (ma4::lr_metric(&s).at("metric")?, 4),
        Entry::Six(s) => (ma6::lr_metric6(&s.omega, &s.big, &s.vol, false).at("metric")?, 6),
        Entry::Pair(p) => (ma6::lr_metric6(&p.omega, &p.big, &p.vol, false).at("metric")?, 6),
    };
    let pts = sample::unit_box(cli.seed, cli.samples as usize, dim);
    let rep = curvature::analyze(&MetricField::new(g), &pts).at("curvature")?;
    let lines = vec![
        format!("Ricci max {:.3e} → {}", rep.ricci_max, if rep.ricci_flat { "Ricci-flat" } else { "not Ricci-flat" }),
        format!("Riemann max {:.3e} → {:?}", rep.riemann_max, rep.flatness),
    ];
    let body = json!({ "metric": name, "report": rep });
    Ok(Output { body, pass: None, lines })
}

fn cmd_grid(
    csv: &Option<PathBuf>,
    synthetic: Option<Synthetic>,
    n: usize,
    write_csv: &Option<PathBuf>,
    full: bool,
) -> Result<Output, Failure> {
    let g = match (csv, synthetic) {
        (Some(path), _) => fluids::grid_load(path).at("load")?,
        (None, Some(kind)) => {
            let (u, lo, hi, dim): (VectorField, f64, f64, usize) = match kind {
                Synthetic::Rotation => {
                    (VectorField::parse(&ma4::plane_chart(), &["-x2", "x1"]).at("sample")?, -1.0, 1.0, 2)
                }
                Synthetic::TaylorGreen => (fluids::taylor_green().0, 0.0, std::f64::consts::TAU, 2),
                Synthetic::Burgers => {
                    let psi = plane("x1^2 + x2^2")?;
                    (fluids::burgers_build(2.0, &psi, 0.0).at("sample")?.u, -1.0, 1.0, 3)
                }
            };
            let h = (hi - lo) / (n.max(2) - 1) as f64;
            GridField::sample(&u, None, &vec![lo; dim], &vec![h; dim], &vec![n; dim]).at("sample")?
        }
        (None, None) => return Err(Failure { stage: "parse", err: Error::Invalid("give --csv or --synthetic".into()) }),
    };
    if let Some(path) = write_csv {
        let text = g.to_csv().at("write")?;
        std::fs::write(path, text)
            .map_err(|e| Failure { stage: "write", err: Error::Grid(format!("{}: {e}", path.display())) })?;
    }
    let rep = fluids::grid_analyze(&g, full).at("analyze")?;
    let mut lines: Vec<String> = rep
        .summary
        .iter()
        .map(|(k, s)| format!("{k}: min {:.6e} max {:.6e} mean {:.6e}", s.min, s.max, s.mean))
        .collect();
    lines.push(format!(
        "elliptic {} hyperbolic {} degenerate {}",
        rep.counts.elliptic, rep.counts.hyperbolic, rep.counts.degenerate
    ));
    Ok(Output { body: to_value(&rep), pass: None, lines })
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Selftest { .. } => "selftest",
        Cmd::Classify { .. } => "classify",
        Cmd::Triple { .. } => "triple",
        Cmd::Hitchin { .. } => "hitchin",
        Cmd::Reduce { .. } => "reduce",
        Cmd::Burgers { .. } => "burgers",
        Cmd::Curvature { .. } => "curvature",
        Cmd::Grid { .. } => "grid",
    }
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(Failure { stage: "parse", err: Error::Invalid(format!("--tol must be positive, got {t}")) });
        }
    }
    match &cli.cmd {
        Cmd::Selftest { inject_fault } => cmd_selftest(cli, *inject_fault),
        Cmd::Classify { psi, a, at, grid } => cmd_classify(psi, a, at, grid),
        Cmd::Triple { a } => cmd_triple(cli, a),
        Cmd::Hitchin { structure, a } => cmd_hitchin(cli, structure, a),
        Cmd::Reduce { action, gamma, level, a } => cmd_reduce(cli, *action, *gamma, *level, a),
        Cmd::Burgers { gamma, psi, dp, c } => cmd_burgers(cli, *gamma, psi, dp, *c),
        Cmd::Curvature { metric, a } => cmd_curvature(cli, metric, a),
        Cmd::Grid { csv, synthetic, n, write_csv, full } => cmd_grid(csv, *synthetic, *n, write_csv, *full),
    }
}

fn emit(cli: &Cli, text: String) -> Result<(), String> {
    match &cli.out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display())),
        None => {
            // A closed pipe is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = command_name(&cli.cmd);
    let header = json!({
        "report_version": REPORT_VERSION,
        "command": command,
        "seed": cli.seed,
        "samples": cli.samples,
    });
    let (text, code) = match dispatch(&cli) {
        Ok(out) => {
            let verdict = match out.pass {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "info",
            };
            let code = if out.pass == Some(false) { 1 } else { 0 };
            if cli.text {
                let mut t = format!("mas {command}: {verdict} (seed {}, samples {})", cli.seed, cli.samples);
                for l in out.lines {
                    t.push('\n');
                    t.push_str(&l);
                }
                (t, code)
            } else {
                let mut doc = header;
                doc["verdict"] = json!(verdict);
                doc["result"] = out.body;
                (serde_json::to_string_pretty(&doc).expect("json"), code)
            }
        }
        Err(f) => {
            let mut env = json!({ "stage": f.stage, "message": f.err.to_string() });
            if let Some(o) = f.err.offset() {
                env["offset"] = json!(o);
            }
            eprintln!("mas {command}: {} error: {}", f.stage, f.err);
            if cli.text {
                return ExitCode::from(2);
            }
            let mut doc = header;
            doc["verdict"] = json!("error");
            doc["error"] = env;
            (serde_json::to_string_pretty(&doc).expect("json"), 2)
        }
    };
    if let Err(e) = emit(&cli, text) {
        eprintln!("mas: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
