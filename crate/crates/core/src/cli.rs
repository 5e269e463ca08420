//! Command-line front end: spec files, subcommands and JSON reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{parse, print, Expr, ExternDecl, ExternDef, FieldSystem};
use crate::gauge::{check_assumptions, covariance_residual, drop_gauge_field, gauge_lagrangian};
use crate::homotopy::homotopy_potential;
use crate::jet::{decompose, euler_lagrange, total_derivative_unbounded, Generator};
use crate::noether::{
    classify, fixed_region_check, Classification, NoetherReport, Region, RegionCheckConfig,
};
use crate::numverify::{
    conservation_report, current_drift, finite_diff_check, integrate, random_divergence,
    RandomBounds, Scenario,
};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "noether",
    version,
    about = "Noether currents, quasi-symmetries and their verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Currents, obstruction and classification for a spec file.
    Analyze(CommonArgs),
    /// Integrates the scenario and checks conservation of the improved current.
    Verify(VerifyArgs),
    /// Divergence potential of a null Lagrangian.
    Homotopy(HomotopyArgs),
    /// Minimal coupling of a vertical u(1) quasi-symmetry.
    Gauge(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Conservation tolerance tol_c.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Writes the trajectory as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HomotopyArgs {
    #[arg(required_unless_present = "seed")]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Round trip on a random divergence instead of a spec file.
    #[arg(long, conflicts_with = "spec")]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    system: SystemSpec,
    lagrangian: String,
    generator: Option<GeneratorSpec>,
    scenario: Option<ScenarioSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSpec {
    dim: usize,
    fields: Vec<String>,
    #[serde(default)]
    externs: Vec<ExternSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExternSpec {
    name: String,
    #[serde(default)]
    arg: usize,
    def: Option<ExternDef>,
    /// Derivative chain generated from `def`.
    #[serde(default)]
    derivatives: Vec<String>,
    #[serde(default)]
    antiderivatives: Vec<String>,
    /// Single links to externs declared separately.
    derivative: Option<String>,
    antiderivative: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSpec {
    x: Vec<String>,
    y: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub dt: Option<f64>,
    pub q0: Vec<f64>,
    pub qdot0: Vec<f64>,
    pub tol_c: Option<f64>,
    pub tol_fd: Option<f64>,
}

/// Parsed and validated spec file.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub system: FieldSystem,
    pub lagrangian: Expr,
    pub generator: Option<Generator>,
    pub scenario: Option<ScenarioSpec>,
}

fn at(field: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let field = field.into();
    move |e| Error::Spec {
        field,
        msg: e.to_string(),
    }
}

fn build_system(s: &SystemSpec) -> Result<FieldSystem> {
    let mut sys = FieldSystem::new(s.dim, s.fields.iter().cloned()).map_err(at("system"))?;
    for (i, e) in s.externs.iter().enumerate() {
        let field = format!("system.externs[{i}]");
        if !e.derivatives.is_empty() || !e.antiderivatives.is_empty() {
            if e.derivative.is_some() || e.antiderivative.is_some() {
                return Err(Error::Spec {
                    field,
                    msg: "use either derivative chains or single links, not both".into(),
                });
            }
            let def = e.def.clone().ok_or_else(|| Error::Spec {
                field: field.clone(),
                msg: "derivative chains need a numeric definition".into(),
            })?;
            let d: Vec<&str> = e.derivatives.iter().map(String::as_str).collect();
            let a: Vec<&str> = e.antiderivatives.iter().map(String::as_str).collect();
            sys.declare_family(&e.name, e.arg, def, &d, &a)
                .map_err(at(field))?;
        } else {
            let decl = ExternDecl {
                arg: e.arg,
                derivative: e.derivative.clone(),
                antiderivative: e.antiderivative.clone(),
                def: e.def.clone(),
            };
            sys.declare_extern(&e.name, decl).map_err(at(field))?;
        }
    }
    sys.validate().map_err(at("system.externs"))?;
    Ok(sys)
}

fn parse_list(
    items: &[String],
    expected: usize,
    field: &str,
    sys: &FieldSystem,
) -> Result<Vec<Expr>> {
    if items.len() != expected {
        return Err(Error::Spec {
            field: field.into(),
            msg: format!("expected {expected} entries, found {}", items.len()),
        });
    }
    items
        .iter()
        .enumerate()
        .map(|(i, t)| parse(t, sys).map_err(at(format!("{field}[{i}]"))))
        .collect()
}

pub fn load_spec(text: &str) -> Result<LoadedSpec> {
    let spec: SpecFile = serde_json::from_str(text).map_err(|e| Error::Spec {
        field: "spec".into(),
        msg: e.to_string(),
    })?;
    let system = build_system(&spec.system)?;
    let lagrangian = parse(&spec.lagrangian, &system).map_err(at("lagrangian"))?;
    let generator = match &spec.generator {
        None => None,
        Some(g) => {
            let x = parse_list(&g.x, system.dim(), "generator.x", &system)?;
            let y = parse_list(&g.y, system.num_fields(), "generator.y", &system)?;
            Some(decompose(&x, &y, &system).map_err(at("generator"))?)
        }
    };
    Ok(LoadedSpec {
        system,
        lagrangian,
        generator,
        scenario: spec.scenario,
    })
}

pub fn load_spec_file(path: &Path) -> Result<LoadedSpec> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_spec(&text)
}

impl LoadedSpec {
    pub fn require_generator(&self) -> Result<&Generator> {
        self.generator.as_ref().ok_or_else(|| Error::Spec {
            field: "generator".into(),
            msg: "missing".into(),
        })
    }

    /// Scenario from the spec block with command-line overrides applied.
    pub fn scenario(
        &self,
        t0: Option<f64>,
        t1: Option<f64>,
        dt: Option<f64>,
        tol: Option<f64>,
    ) -> Result<Scenario> {
        let missing = |what: &str| Error::Spec {
            field: format!("scenario.{what}"),
            msg: "missing".into(),
        };
        let s = self.scenario.clone().ok_or_else(|| missing("q0"))?;
        Ok(Scenario {
            system: self.system.clone(),
            lagrangian: self.lagrangian.clone(),
            generator: self.require_generator()?.clone(),
            t0: t0.or(s.t0).ok_or_else(|| missing("t0"))?,
            t1: t1.or(s.t1).ok_or_else(|| missing("t1"))?,
            dt: dt.or(s.dt).ok_or_else(|| missing("dt"))?,
            q0: s.q0,
            qdot0: s.qdot0,
            tol_c: tol.or(s.tol_c).unwrap_or(1e-6),
            tol_fd: s.tol_fd.unwrap_or(1e-6),
        })
    }
}

fn dsl(e: &Expr, sys: &FieldSystem) -> Value {
    Value::String(print(e, sys))
}

fn dsl_list(es: &[Expr], sys: &FieldSystem) -> Value {
    Value::Array(es.iter().map(|e| dsl(e, sys)).collect())
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::ExactSymmetry => "ExactSymmetry",
        Classification::QuasiSymmetry => "QuasiSymmetry",
        Classification::NotQuasiSymmetry => "NotQuasiSymmetry",
    }
}

/// JSON form of a Noether report.
pub fn noether_json(spec: &LoadedSpec, gen: &Generator, r: &NoetherReport) -> Value {
    let sys = &spec.system;
    let opt = |v: &Option<Vec<Expr>>| v.as_ref().map_or(Value::Null, |v| dsl_list(v, sys));
    json!({
        "lagrangian": dsl(&spec.lagrangian, sys),
        "generator": { "x": dsl_list(&gen.x(), sys), "y": dsl_list(&gen.y(), sys), "y0": dsl_list(&gen.y0(), sys) },
        "euler_lagrange": dsl_list(&r.euler_lagrange, sys),
        "bare_current": dsl_list(&r.j, sys),
        "obstruction": dsl(&r.f, sys),
        "classification": classification_name(r.classification),
        "f_pot": opt(&r.f_pot),
        "improved_current": opt(&r.improved),
        "noether_residual": r.residual.as_ref().map_or(Value::Null, |e| dsl(e, sys)),
        "el_of_obstruction": opt(&r.el_of_f),
        "homotopy": r.homotopy.as_ref().map_or(Value::Null, |h| json!({
            "lambda": dsl_list(&h.lambda, sys),
            "zero_field_part": dsl(&h.zero_field_part, sys),
            "h0": dsl(&h.h0, sys),
        })),
    })
}

fn envelope(command: &str, body: Value) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command });
    if let (Value::Object(head), Value::Object(rest)) = (&mut v, body) {
        head.extend(rest);
    }
    v
}

/// Report value and exit code.
pub type Outcome = (Value, i32);

pub fn analyze(spec: &LoadedSpec) -> Result<Outcome> {
    let gen = spec.require_generator()?;
    let r = classify(&spec.lagrangian, gen, &spec.system)?;
    let code = if r.classification == Classification::NotQuasiSymmetry {
        2
    } else {
        0
    };
    Ok((envelope("analyze", noether_json(spec, gen, &r)), code))
}

pub fn verify(spec: &LoadedSpec, args: &VerifyArgs) -> Result<Outcome> {
    let s = spec.scenario(args.t0, args.t1, args.dt, args.tol)?;
    let gen = &s.generator;
    let sys = &s.system;
    let r = classify(&s.lagrangian, gen, sys)?;
    if r.classification == Classification::NotQuasiSymmetry {
        let body =
            json!({ "classification": classification_name(r.classification), "pass": false });
        return Ok((envelope("verify", body), 2));
    }
    let tr = integrate(&s)?;
    if let Some(path) = &args.csv {
        let file =
            fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        tr.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    let improved = conservation_report(&s, &r, &tr)?;
    let bare = current_drift(&r.j[0], &tr, s.tol_c, sys)?;
    let fd = finite_diff_check(&r.j[0], &tr, s.tol_fd, sys)?;
    let cfg = RegionCheckConfig {
        intervals: tr.len() - 1,
        ..RegionCheckConfig::default()
    };
    let region = fixed_region_check(
        &r.f,
        r.f_pot.as_deref(),
        &Region::interval(s.t0, s.t1),
        &[&tr],
        &cfg,
        sys,
    )?;
    let pass = improved.pass && fd.pass && region.boundary_consistent;
    let last = tr.len() - 1;
    let body = json!({
        "classification": classification_name(r.classification),
        "improved_current": dsl(&r.improved.as_ref().expect("present for symmetries")[0], sys),
        "bare_current": dsl(&r.j[0], sys),
        "scenario": { "t0": s.t0, "t1": s.t1, "dt": s.dt, "samples": tr.len(), "tol_c": s.tol_c, "tol_fd": s.tol_fd },
        "conservation": improved,
        "bare_drift": bare,
        "finite_difference": fd,
        "fixed_region": region,
        "endpoint_velocity": { "initial": tr.qdot.iter().map(|v| v[0]).collect::<Vec<_>>(), "final": tr.qdot.iter().map(|v| v[last]).collect::<Vec<_>>() },
        "pass": pass,
    });
    Ok((envelope("verify", body), if pass { 0 } else { 1 }))
}

pub fn homotopy_from_spec(spec: &LoadedSpec) -> Result<Outcome> {
    let sys = &spec.system;
    let h = homotopy_potential(&spec.lagrangian, sys)?;
    let body = json!({
        "lagrangian": dsl(&spec.lagrangian, sys),
        "lambda": dsl_list(&h.lambda, sys),
        "zero_field_part": dsl(&h.zero_field_part, sys),
        "h0": dsl(&h.h0, sys),
    });
    Ok((envelope("homotopy", body), 0))
}

/// Random divergence round trip: EL vanishes and d_mu Lambda^mu = L.
pub fn homotopy_round_trip(seed: u64) -> Result<Outcome> {
    let bounds = RandomBounds {
        max_dim: 2,
        max_fields: 2,
        ..RandomBounds::default()
    };
    let (sys, l) = random_divergence(seed, &bounds);
    let el_zero = (0..sys.num_fields())
        .map(|a| euler_lagrange(&l, a, &sys)?.is_zero())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|z| z);
    let h = homotopy_potential(&l, &sys)?;
    let mut div = Expr::zero();
    for (mu, c) in h.lambda.iter().enumerate() {
        div = div + total_derivative_unbounded(c, mu, &sys)?;
    }
    let ok = div.equiv(&l)?;
    let body = json!({
        "seed": seed,
        "dim": sys.dim(),
        "fields": sys.field_names(),
        "lagrangian": dsl(&l, &sys),
        "lambda": dsl_list(&h.lambda, &sys),
        "euler_lagrange_vanishes": el_zero,
        "round_trip": ok,
    });
    Ok((
        envelope("homotopy", body),
        if el_zero && ok { 0 } else { 1 },
    ))
}

pub fn gauge(spec: &LoadedSpec) -> Result<Outcome> {
    let gen = spec.require_generator()?;
    let sys = &spec.system;
    if let Some(v) = check_assumptions(gen).first() {
        return Err(Error::AssumptionViolated(v.to_string()));
    }
    let r = classify(&spec.lagrangian, gen, sys)?;
    let f_pot = r.f_pot.as_ref().ok_or_else(|| {
        Error::FPotCondition(
            "obstruction is not a divergence, the variation is not a quasi-symmetry".into(),
        )
    })?;
    let g = gauge_lagrangian(&spec.lagrangian, gen, f_pot, sys)?;
    let covariant = covariance_residual(gen, sys)?
        .iter()
        .flatten()
        .map(Expr::is_zero)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|z| z);
    let recovers = drop_gauge_field(&g.l_gauged)?.equiv(&spec.lagrangian)?;
    let body = json!({
        "lagrangian": dsl(&spec.lagrangian, sys),
        "f_pot": dsl_list(f_pot, sys),
        "gauged_lagrangian": dsl(&g.l_gauged, sys),
        "f_tilde": dsl_list(&g.f_tilde, sys),
        "transform_residual": dsl(&g.transform_residual, sys),
        "conditions": {
            "antisymmetric": g.conditions.antisymmetric,
            "contraction": g.conditions.contraction,
            "covariant_derivative": covariant,
            "recovers_lagrangian": recovers,
        },
    });
    Ok((envelope("gauge", body), 0))
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn emit(v: &Value, out: Option<&Path>) -> Result<()> {
    let text = render(v);
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(e.to_string())),
    }
}

fn dispatch(cli: &Cli) -> Result<(Outcome, Option<PathBuf>)> {
    Ok(match &cli.command {
        Command::Analyze(a) => (analyze(&load_spec_file(&a.spec)?)?, a.out.clone()),
        Command::Verify(a) => (verify(&load_spec_file(&a.spec)?, a)?, a.out.clone()),
        Command::Homotopy(a) => {
            let outcome = match (a.seed, &a.spec) {
                (Some(seed), _) => homotopy_round_trip(seed)?,
                (None, Some(path)) => homotopy_from_spec(&load_spec_file(path)?)?,
                (None, None) => unreachable!("clap requires a spec or a seed"),
            };
            (outcome, a.out.clone())
        }
        Command::Gauge(a) => (gauge(&load_spec_file(&a.spec)?)?, a.out.clone()),
    })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli).and_then(|((v, code), out)| emit(&v, out.as_deref()).map(|_| code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOOST: &str = r#"{
        "system": {"dim": 1, "fields": ["q"]},
        "lagrangian": "(* 1/2 (pow (d q 0) 2))",
        "generator": {"x": ["0"], "y": ["x0"]}
    }"#;

    #[test]
    fn loads_and_analyzes() {
        let spec = load_spec(BOOST).unwrap();
        let (v, code) = analyze(&spec).unwrap();
        assert_eq!(code, 0);
        assert_eq!(v["schema"], 1);
        assert_eq!(v["classification"], "QuasiSymmetry");
        assert_eq!(v["f_pot"][0], "q");
    }

    #[test]
    fn errors_name_the_field() {
        let bad = BOOST.replace("(* 1/2 (pow (d q 0) 2))", "(* 1/2 (pow (d p 0) 2))");
        let e = load_spec(&bad).unwrap_err().to_string();
        assert!(e.starts_with("lagrangian:"), "{e}");
        let bad = BOOST.replace(r#""y": ["x0"]"#, r#""y": ["x0", "1"]"#);
        let e = load_spec(&bad).unwrap_err().to_string();
        assert!(e.starts_with("generator.y:"), "{e}");
        let bad = BOOST.replace(r#""x": ["0"]"#, r#""x": ["(d q 0)"]"#);
        assert!(load_spec(&bad)
            .unwrap_err()
            .to_string()
            .starts_with("generator:"));
    }

    #[test]
    fn seeded_round_trip() {
        let (v, code) = homotopy_round_trip(7).unwrap();
        assert_eq!(code, 0);
        assert_eq!(v["round_trip"], true);
    }

    #[test]
    fn deterministic_output() {
        let spec = load_spec(BOOST).unwrap();
        assert_eq!(
            render(&gauge(&spec).unwrap().0),
            render(&gauge(&spec).unwrap().0)
        );
    }
}
