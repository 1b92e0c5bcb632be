//! Subcommand implementations. Each renders a JSON value, a LaTeX form and
//! a plain form; the selected one is printed with the echoed configuration.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use steinforge::ibp::{conjecture_run, derive_operator, minimal_scan, SearchBounds, Status};
use steinforge::operator::{catalog, catalog_listing, CatalogEntry, NoncentralParams, CATALOG_KEYS};
use steinforge::verify::noncentral::density_checks;
use steinforge::verify::{
    mutation_control, verify_entry, verify_noncentral_operator, verify_pushforward, Method, QuadratureConfig, RuleKind,
    TestFunction, VerificationReport, VerifyOptions,
};
use steinforge::{DiffOperator, Polynomial, Rational};

use crate::polyspec::{parse_coefficients, parse_polynomial, SpecError};
use crate::{CatalogAction, Cli, Command, Format, PolyArgs, Rule, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Core(#[from] steinforge::Error),
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON in `{path}`: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use steinforge::Error as E;
        match self {
            CliError::Internal(_)
            | CliError::Core(E::Internal(_) | E::QuadratureValidation { .. } | E::BesselOverflow(_)) => 70,
            _ => 64,
        }
    }
}

pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

struct Rendered {
    json: Value,
    latex: String,
    plain: String,
    code: u8,
}

type Result<T> = std::result::Result<T, CliError>;

pub fn execute(cli: &Cli, threads: Option<usize>) -> Result<Outcome> {
    let start = Instant::now();
    let (name, mut config, rendered) = match &cli.command {
        Command::Derive {
            poly,
            order,
            degree,
            deepen,
            z_cap,
            derivative_cap,
        } => derive(poly, *order, *degree, *deepen, *z_cap, *derivative_cap)?,
        Command::Scan {
            poly,
            max_order,
            max_degree,
        } => scan(poly, *max_order, *max_degree)?,
        Command::Verify {
            catalog,
            operator,
            poly,
            opts,
        } => verify(catalog.as_deref(), operator.as_deref(), poly, opts)?,
        Command::Catalog { action } => catalog_command(action)?,
        Command::Conjecture {
            hermite,
            max_order,
            max_degree,
        } => conjecture(*hermite, *max_order, *max_degree)?,
        Command::Noncentral {
            k,
            lambda,
            means,
            verify,
            tol,
        } => noncentral(k.as_deref(), lambda.as_deref(), means.as_deref(), *verify, *tol)?,
    };
    eprintln!("steinforge {name}: done in {:.2?}", start.elapsed());
    config["format"] = json!(format_name(cli.format));
    config["threads"] = json!(threads);
    let header = format!("steinforge {name} {config}");
    let stdout = match cli.format {
        Format::Json => {
            let doc = json!({ "command": name, "config": config, "result": rendered.json });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Latex => format!("% {header}\n{}\n", rendered.latex),
        Format::Plain => format!("# {header}\n{}", rendered.plain),
    };
    Ok(Outcome {
        stdout,
        code: rendered.code,
    })
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Latex => "latex",
        Format::Plain => "plain",
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(e.to_string()))
}

fn optional_poly(args: &PolyArgs) -> Result<Option<Polynomial>> {
    Ok(match (&args.poly, &args.coeffs) {
        (Some(text), _) => Some(parse_polynomial(text)?),
        (None, Some(list)) => Some(parse_coefficients(list)?),
        (None, None) => None,
    })
}

fn required_poly(args: &PolyArgs) -> Result<Polynomial> {
    optional_poly(args)?.ok_or_else(|| CliError::Usage("one of --poly or --coeffs is required".into()))
}

fn operator_latex(op: Option<&DiffOperator>) -> String {
    op.map_or_else(|| "% no operator".to_string(), DiffOperator::to_latex)
}

fn derive(
    args: &PolyArgs,
    order: usize,
    degree: usize,
    deepen: bool,
    z_cap: Option<usize>,
    derivative_cap: Option<usize>,
) -> Result<(&'static str, Value, Rendered)> {
    let p = required_poly(args)?;
    let deg = p.degree().unwrap_or(0);
    let defaults = SearchBounds::default_for(deg, order, degree);
    let bounds = SearchBounds {
        z_power_cap: z_cap.unwrap_or(defaults.z_power_cap),
        derivative_cap: derivative_cap.unwrap_or(defaults.derivative_cap),
        ..defaults
    };
    let config = json!({ "poly": p.to_string(), "bounds": to_value(&bounds)?, "deepen": deepen });
    eprintln!("steinforge derive: P = {p}, M = {order}, D = {degree}");
    let r = derive_operator(&p, bounds, deepen)?;
    let mut plain = format!("status: {}\nnullspace_dim: {}\n", r.status.as_str(), r.nullspace_dim);
    if let Some(op) = &r.operator {
        plain += &format!("operator: {}\n", op.to_plain());
    }
    if let Some(c) = &r.certificate {
        plain += &format!("certificate: {} multipliers\n", c.len());
    }
    let code = if r.status == Status::Found { 0 } else { 2 };
    Ok((
        "derive",
        config,
        Rendered {
            json: to_value(&r)?,
            latex: operator_latex(r.operator.as_ref()),
            plain,
            code,
        },
    ))
}

fn scan(args: &PolyArgs, max_order: usize, max_degree: usize) -> Result<(&'static str, Value, Rendered)> {
    let p = required_poly(args)?;
    let config = json!({ "poly": p.to_string(), "max_order": max_order, "max_degree": max_degree });
    eprintln!("steinforge scan: P = {p}, orders 1..={max_order}, degrees 0..={max_degree}");
    let s = minimal_scan(&p, max_order, max_degree)?;
    let mut plain = String::from("order\tdegree\tstatus\tnullspace_dim\n");
    for c in &s.grid {
        plain += &format!(
            "{}\t{}\t{}\t{}\n",
            c.order,
            c.degree,
            c.status.as_str(),
            c.nullspace_dim
        );
    }
    let op = s.minimal.as_ref().and_then(|r| r.operator.as_ref());
    match s.minimal_cell() {
        Some((m, d)) => plain += &format!("minimal: ({m}, {d})\n"),
        None => plain += "minimal: none\n",
    }
    if let Some(op) = op {
        plain += &format!("operator: {}\n", op.to_plain());
    }
    let code = if s.minimal.is_some() { 0 } else { 2 };
    Ok((
        "scan",
        config,
        Rendered {
            latex: operator_latex(op),
            json: to_value(&s)?,
            plain,
            code,
        },
    ))
}

fn verify_options(args: &VerifyArgs) -> Result<VerifyOptions> {
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(CliError::Usage("--methods must name at least one method".into()));
    }
    let rule = match args.rule {
        Rule::Adaptive => RuleKind::Adaptive,
        Rule::GaussHermite => RuleKind::GaussHermite,
        Rule::Precise => RuleKind::Precise,
    };
    Ok(VerifyOptions {
        methods,
        suite: TestFunction::default_suite(),
        max_degree: args.max_degree,
        quadrature: QuadratureConfig {
            rule,
            nodes: args.nodes,
            tol: args.tol,
        },
        samples: args.samples,
        seed: args.seed,
        density_tol: args.tol,
    })
}

/// Operator and pushforward from a JSON file holding an operator, a
/// derivation result or a `derive` output document.
fn read_operator_file(path: &Path) -> Result<(DiffOperator, Option<Polynomial>)> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    let doc: Value = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: shown.clone(),
        source,
    })?;
    let body = doc.get("result").unwrap_or(&doc);
    let op_value = body.get("operator").unwrap_or(body);
    if op_value.is_null() {
        return Err(CliError::Usage(format!("`{shown}` holds no operator")));
    }
    let op: DiffOperator = serde_json::from_value(op_value.clone()).map_err(|source| CliError::Json {
        path: shown.clone(),
        source,
    })?;
    let poly = match body.get("poly") {
        Some(v) => Some(
            serde_json::from_value::<Polynomial>(v.clone()).map_err(|source| CliError::Json { path: shown, source })?,
        ),
        None => None,
    };
    Ok((op, poly))
}

fn report_plain(report: &VerificationReport) -> String {
    let mut s = String::from("method\ttest\tresidual\ttolerance\tpass\n");
    for t in &report.tests {
        let method = t.params.get("method").and_then(Value::as_str).unwrap_or(&report.method);
        s += &format!(
            "{method}\t{}\t{:e}\t{:e}\t{}\n",
            t.name, t.residual, t.tolerance, t.pass
        );
    }
    s += &format!("pass: {}\n", report.pass);
    s
}

fn verify(
    key: Option<&str>,
    file: Option<&Path>,
    poly: &PolyArgs,
    args: &VerifyArgs,
) -> Result<(&'static str, Value, Rendered)> {
    let opts = verify_options(args)?;
    let flag_poly = optional_poly(poly)?;
    let (op, pushforward, mut report) = match (key, file) {
        (Some(key), _) => {
            let mut entry: CatalogEntry = catalog(key)?;
            if let Some(p) = flag_poly {
                entry.pushforward = Some(p);
            }
            eprintln!("steinforge verify: catalog entry {}", entry.key);
            let report = verify_entry(&entry, &opts)?;
            let op = entry
                .operator
                .clone()
                .ok_or_else(|| CliError::Usage(format!("`{key}` has no operator")))?;
            (op, entry.pushforward, report)
        }
        (None, Some(path)) => {
            let (op, file_poly) = read_operator_file(path)?;
            let p = flag_poly.or(file_poly).ok_or_else(|| {
                CliError::Usage("the operator file has no pushforward; pass --poly or --coeffs".into())
            })?;
            eprintln!("steinforge verify: operator from {} against P = {p}", path.display());
            let report = verify_pushforward(&op, &p, &opts)?;
            (op, Some(p), report)
        }
        (None, None) => return Err(CliError::Usage("one of --catalog or --operator is required".into())),
    };
    if args.mutation {
        let p = pushforward
            .as_ref()
            .ok_or_else(|| CliError::Usage("--mutation needs a polynomial pushforward".into()))?;
        let m = mutation_control(&op, p, &opts.suite, &opts.quadrature)?;
        report = VerificationReport::merge(vec![report, m]);
    }
    let config = json!({
        "catalog": key,
        "operator_file": file.map(|p| p.display().to_string()),
        "poly": pushforward.as_ref().map(Polynomial::to_string),
        "methods": to_value(&opts.methods)?,
        "suite": opts.suite.iter().map(TestFunction::name).collect::<Vec<_>>(),
        "max_degree": opts.max_degree,
        "quadrature": to_value(&opts.quadrature)?,
        "samples": opts.samples,
        "seed": opts.seed,
        "mutation": args.mutation,
    });
    let code = if report.pass { 0 } else { 1 };
    Ok((
        "verify",
        config,
        Rendered {
            json: json!({ "operator": to_value(&op)?, "report": to_value(&report)? }),
            latex: format!("{}\n% pass: {}", op.to_latex(), report.pass),
            plain: format!("operator: {}\n{}", op.to_plain(), report_plain(&report)),
            code,
        },
    ))
}

fn entry_plain(e: &CatalogEntry) -> String {
    let mut s = format!("{}: {}\n", e.key, e.description);
    if let Some(p) = &e.pushforward {
        s += &format!("  W = P(Z), P = {p}\n");
    }
    if let Some(op) = &e.operator {
        s += &format!("  operator: {}\n", op.to_plain());
    }
    if let Some(row) = &e.table {
        s += &format!("  leading coefficient: {}\n", row.leading_coefficient);
    }
    s
}

fn catalog_command(action: &CatalogAction) -> Result<(&'static str, Value, Rendered)> {
    match action {
        CatalogAction::List => {
            let entries = catalog_listing();
            let latex = entries
                .iter()
                .map(|e| format!("% {}\n{}", e.key, operator_latex(e.operator.as_ref())))
                .collect::<Vec<_>>()
                .join("\n");
            Ok((
                "catalog",
                json!({ "action": "list" }),
                Rendered {
                    json: json!({ "keys": CATALOG_KEYS, "entries": to_value(&entries)? }),
                    latex,
                    plain: entries.iter().map(entry_plain).collect(),
                    code: 0,
                },
            ))
        }
        CatalogAction::Show { key } => {
            let e = catalog(key)?;
            let latex = match (&e.operator, &e.table) {
                (Some(op), _) => op.to_latex(),
                (None, Some(row)) => format!("% leading coefficient\n{}", row.leading_coefficient),
                (None, None) => "% no operator".into(),
            };
            Ok((
                "catalog",
                json!({ "action": "show", "key": key }),
                Rendered {
                    json: to_value(&e)?,
                    latex,
                    plain: entry_plain(&e),
                    code: 0,
                },
            ))
        }
    }
}

fn conjecture(n: usize, max_order: usize, max_degree: usize) -> Result<(&'static str, Value, Rendered)> {
    eprintln!("steinforge conjecture: H_{n}, orders 1..={max_order}, degrees 0..={max_degree}");
    let r = conjecture_run(n, max_order, max_degree)?;
    let config = json!({ "hermite": n, "max_order": max_order, "max_degree": max_degree });
    let mut plain = match r.scan.minimal_cell() {
        Some((m, d)) => format!("minimal: ({m}, {d})\n"),
        None => "minimal: none\n".into(),
    };
    plain += &format!(
        "suspected minimal order: {}; consistent: {}\n",
        r.suspected_min_order, r.consistent_with_suspected_order
    );
    if let Some(lead) = &r.scan.leading_coefficient {
        plain += &format!("leading coefficient: {lead}\n");
    }
    for c in &r.comparisons {
        let verdict = c.report.as_ref().map_or("no operator".to_string(), |rep| {
            format!("proportional: {}", rep.proportional)
        });
        plain += &format!("{} ({}): {verdict}\n", c.label, c.polynomial);
    }
    if let Some(v) = &r.verification {
        plain += &report_plain(v);
    }
    let code = match &r.verification {
        Some(v) if !v.pass => 1,
        _ => 0,
    };
    let op = r.scan.minimal.as_ref().and_then(|m| m.operator.as_ref());
    Ok((
        "conjecture",
        config,
        Rendered {
            latex: operator_latex(op),
            json: to_value(&r)?,
            plain,
            code,
        },
    ))
}

fn parse_rational(flag: &str, text: &str) -> Result<Rational> {
    Rational::parse_decimal(text).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn noncentral(
    k: Option<&str>,
    lambda: Option<&str>,
    means: Option<&[String]>,
    verify: bool,
    tol: f64,
) -> Result<(&'static str, Value, Rendered)> {
    let params = match (means, k, lambda) {
        (Some(means), _, _) => NoncentralParams::from_means(
            means
                .iter()
                .map(|m| parse_rational("means", m))
                .collect::<Result<Vec<_>>>()?,
        )?,
        (None, Some(k), Some(l)) => NoncentralParams::new(parse_rational("k", k)?, parse_rational("lambda", l)?)?,
        _ => return Err(CliError::Usage("give --k and --lambda, or --means".into())),
    };
    let op = params.operator();
    let checks = if verify {
        let suite = TestFunction::default_suite();
        Some(VerificationReport::merge(vec![
            density_checks(&params, 1e-10, tol)?,
            verify_noncentral_operator(&params, &suite, tol)?,
        ]))
    } else {
        None
    };
    let config = json!({ "params": to_value(&params)?, "verify": verify, "tol": tol });
    let mut plain = format!(
        "k = {}, lambda = {}\noperator: {}\n",
        params.k,
        params.lambda,
        op.to_plain()
    );
    if let Some(c) = &checks {
        plain += &report_plain(c);
    }
    let code = match &checks {
        Some(c) if !c.pass => 1,
        _ => 0,
    };
    Ok((
        "noncentral",
        config,
        Rendered {
            json: json!({ "params": to_value(&params)?, "operator": to_value(&op)?, "checks": to_value(&checks)? }),
            latex: op.to_latex(),
            plain,
            code,
        },
    ))
}
