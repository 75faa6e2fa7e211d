//! `fwverify`: evaluate, verify and inspect the identity catalog.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 runtime
//! error.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use foxwright::catalog::{self, Domain, Identity, Side};
use foxwright::harness::{self, Execution, ReportFormat, TrialConfig, VerificationReport};
use foxwright::inversion::{self, InversionContext};
use foxwright::notation;
use foxwright::series::Binding;
use num_complex::Complex64;
use serde_json::json;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "fwverify", version, about = "Fox-Wright and hypergeometric identity verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Lhs,
    Rhs,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered identities.
    List {
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Evaluate one or both sides at a binding.
    Eval {
        #[arg(long)]
        identity: String,
        /// NAME=RE or NAME=RE,IM; repeatable.
        #[arg(long = "bind")]
        bind: Vec<String>,
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Randomized two-sided verification.
    Verify {
        /// Identity name, or `all`.
        #[arg(long)]
        identity: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long = "n-max", default_value_t = 12)]
        n_max: u64,
        #[arg(long = "m-max", default_value_t = 4)]
        m_max: u64,
        #[arg(long = "pole-distance", default_value_t = 1e-3)]
        pole_distance: f64,
        /// Also write the rendered report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Run trials on the calling thread only.
        #[arg(long)]
        serial: bool,
    },
    /// Check that the inverse pair undoes itself.
    Roundtrip {
        /// RE or RE,IM; random contexts are drawn when x, y, z are omitted.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Parse identity files and confirm they print back to themselves.
    ParseCheck {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

/// A failure carrying its exit code; rendered as JSON when requested.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    suggestions: Vec<String>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
            suggestions: Vec::new(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_RUNTIME,
            kind: "runtime",
            message: message.into(),
            suggestions: Vec::new(),
        }
    }
}

fn json_requested(args: &[String]) -> bool {
    args.windows(2).any(|w| w[0] == "--format" && w[1] == "json") || args.iter().any(|a| a == "--format=json")
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let json = json_requested(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report_failure(
                Failure::usage(
                    e.render()
                        .to_string()
                        .trim_end()
                        .trim_start_matches("error: ")
                        .to_string(),
                ),
                json,
            );
        }
    };
    if let Err(f) = configure_threads() {
        return report_failure(f, json);
    }
    let out = io::stdout();
    let mut out = out.lock();
    let result = match cli.command {
        Command::List { format } => list(format, &mut out),
        Command::Eval {
            identity,
            bind,
            side,
            format,
        } => eval(&identity, &bind, side, format, &mut out),
        Command::Verify {
            identity,
            trials,
            seed,
            tol,
            n_max,
            m_max,
            pole_distance,
            out: path,
            format,
            serial,
        } => {
            let cfg = TrialConfig {
                identity,
                trials,
                seed,
                tol,
                n_max,
                m_max,
                pole_distance,
                ..TrialConfig::default()
            };
            verify(cfg, path, format, serial, &mut out)
        }
        Command::Roundtrip {
            x,
            y,
            z,
            n_max,
            trials,
            seed,
            tol,
            format,
        } => roundtrip([x, y, z], n_max, trials, seed, tol, format, &mut out),
        Command::ParseCheck { files, format } => parse_check(&files, format, &mut out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => report_failure(f, json),
    }
}

fn report_failure(f: Failure, json: bool) -> ExitCode {
    if json {
        let v = json!({"error": {"kind": f.kind, "message": f.message, "suggestions": f.suggestions}});
        // Stdout may already be closed (the failure can be a broken pipe).
        let _ = writeln!(io::stdout(), "{}", serde_json::to_string_pretty(&v).expect("plain JSON value"));
    }
    let mut err = io::stderr();
    let _ = writeln!(err, "error: {}", f.message);
    if !f.suggestions.is_empty() {
        let _ = writeln!(err, "did you mean: {}", f.suggestions.join(", "));
    }
    ExitCode::from(f.code)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("FW_VERIFY_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::usage(format!("FW_VERIFY_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::runtime(e.to_string()))
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .map_err(|e| Failure::runtime(format!("cannot write output: {e}")))
}

fn suggestions(name: &str) -> Vec<String> {
    let mut scored: Vec<(f64, &str)> = catalog::list_identities()
        .iter()
        .map(|id| (strsim::normalized_levenshtein(name, &id.name), id.name.as_str()))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    // Close matches when there are any, otherwise the three nearest names.
    let close = scored.iter().filter(|(s, n)| *s >= 0.4 || n.contains(name)).count();
    let take = if close > 0 { close.min(5) } else { 3 };
    scored.into_iter().take(take).map(|(_, n)| n.to_string()).collect()
}

fn find(name: &str) -> Result<&'static Identity, Failure> {
    catalog::lookup(name).map_err(|_| Failure {
        code: EXIT_USAGE,
        kind: "unknown-identity",
        message: format!("unknown identity `{name}`"),
        suggestions: suggestions(name),
    })
}

fn parse_complex(text: &str) -> Option<Complex64> {
    let mut parts = text.split(',');
    let re = parts.next()?.trim().parse().ok()?;
    let im = match parts.next() {
        Some(p) => p.trim().parse().ok()?,
        None => 0.0,
    };
    parts.next().is_none().then(|| Complex64::new(re, im))
}

fn parse_binding(id: &Identity, binds: &[String]) -> Result<Binding, Failure> {
    let mut b = Binding::new();
    for spec in binds {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("binding `{spec}` is not NAME=VALUE")))?;
        let name = if name == "λ" { "l" } else { name.trim() };
        match id.symbols.get(name) {
            None => {
                return Err(Failure::usage(format!(
                    "`{}` has no parameter `{name}` (parameters: {})",
                    id.name,
                    id.symbols.keys().cloned().collect::<Vec<_>>().join(", ")
                )))
            }
            Some(Domain::NonnegInt) => {
                let v: i64 = value
                    .trim()
                    .parse()
                    .ok()
                    .filter(|v| *v >= 0)
                    .ok_or_else(|| Failure::usage(format!("`{name}` needs a nonnegative integer, got `{value}`")))?;
                b.set_int(name, v);
            }
            Some(Domain::Complex) => {
                let z = parse_complex(value)
                    .ok_or_else(|| Failure::usage(format!("`{name}` needs RE or RE,IM, got `{value}`")))?;
                b.set_complex(name, z);
            }
        }
    }
    Ok(b)
}

fn fmt_complex(z: Complex64) -> String {
    format!("{} {} {}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

fn list(format: Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let ids = catalog::list_identities();
    let text = match format {
        Format::Json => {
            let v: Vec<_> = ids
                .iter()
                .map(|id| {
                    json!({
                        "name": id.name,
                        "source": id.provenance,
                        "params": id.symbol_summary(),
                        "constraints": id.constraints.iter().map(notation::print_constraint).collect::<Vec<_>>(),
                        "lhs": notation::print_expr(&id.lhs),
                        "rhs": notation::print_expr(&id.rhs),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&v).map_err(|e| Failure::runtime(e.to_string()))?
        }
        Format::Csv => {
            let mut s = String::from("name,params,source\n");
            for id in ids {
                s.push_str(&format!("{},\"{}\",\"{}\"\n", id.name, id.symbol_summary(), id.provenance));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for id in ids {
                s.push_str(&format!("{:<24} {:<28} {}\n", id.name, id.symbol_summary(), id.provenance));
            }
            s
        }
    };
    write_out(out, &text)?;
    Ok(0)
}

fn eval(name: &str, binds: &[String], side: SideArg, format: Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let id = find(name)?;
    let b = parse_binding(id, binds)?;
    let sides: &[Side] = match side {
        SideArg::Lhs => &[Side::Lhs],
        SideArg::Rhs => &[Side::Rhs],
        SideArg::Both => &[Side::Lhs, Side::Rhs],
    };
    let mut values = Vec::new();
    for s in sides {
        let v = id.eval_side(*s, &b).map_err(|e| Failure::runtime(e.to_string()))?;
        values.push((*s, v));
    }
    let rel_err = (values.len() == 2).then(|| {
        let (l, r) = (values[0].1, values[1].1);
        (l - r).norm() / 1f64.max(l.norm()).max(r.norm())
    });
    let label = |s: Side| match s {
        Side::Lhs => "lhs",
        Side::Rhs => "rhs",
    };
    let text = match format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("identity".into(), json!(id.name));
            obj.insert("binding".into(), serde_json::to_value(&b).map_err(|e| Failure::runtime(e.to_string()))?);
            for (s, v) in &values {
                obj.insert(label(*s).into(), json!({"re": finite(v.re), "im": finite(v.im)}));
            }
            if let Some(e) = rel_err {
                obj.insert("rel_err".into(), json!(finite(e)));
            }
            serde_json::to_string_pretty(&obj).map_err(|e| Failure::runtime(e.to_string()))?
        }
        Format::Csv => {
            let mut s = String::from("side,re,im\n");
            for (side, v) in &values {
                s.push_str(&format!("{},{:.17e},{:.17e}\n", label(*side), v.re, v.im));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for (side, v) in &values {
                s.push_str(&format!("{} = {}\n", label(*side), fmt_complex(*v)));
            }
            if let Some(e) = rel_err {
                s.push_str(&format!("rel_err = {e:.3e}\n"));
            }
            s
        }
    };
    write_out(out, &text)?;
    Ok(0)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn report_format(f: Format) -> ReportFormat {
    match f {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
        Format::Table => ReportFormat::Table,
    }
}

fn verify(cfg: TrialConfig, path: Option<PathBuf>, format: Format, serial: bool, out: &mut dyn Write) -> Result<u8, Failure> {
    let exec = if serial { Execution::Serial } else { Execution::Parallel };
    let harness_err = |e: harness::HarnessError| match e {
        harness::HarnessError::InvalidConfig(m) => Failure::usage(m),
        other => Failure::runtime(other.to_string()),
    };
    let reports: Vec<VerificationReport> = if cfg.identity == "all" {
        harness::verify_all_with(&cfg, exec).map_err(harness_err)?
    } else {
        find(&cfg.identity)?;
        vec![harness::verify_identity_with(&cfg, exec).map_err(harness_err)?]
    };
    let fmt = report_format(format);
    let text = harness::render(&reports, fmt).map_err(harness_err)?;
    if let Some(p) = &path {
        harness::write_reports(&reports, p, fmt).map_err(harness_err)?;
    }
    write_out(out, &text)?;
    Ok(if reports.iter().all(|r| r.all_pass()) { 0 } else { EXIT_FAIL })
}

#[allow(clippy::too_many_arguments)]
fn roundtrip(
    xyz: [Option<String>; 3],
    n_max: usize,
    trials: u64,
    seed: u64,
    tol: f64,
    format: Format,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let given: Vec<Option<Complex64>> = xyz
        .iter()
        .zip(["x", "y", "z"])
        .map(|(v, n)| {
            v.as_ref()
                .map(|s| parse_complex(s).ok_or_else(|| Failure::usage(format!("--{n} needs RE or RE,IM, got `{s}`"))))
                .transpose()
        })
        .collect::<Result<_, _>>()?;
    let fixed = match given.as_slice() {
        [Some(x), Some(y), Some(z)] => {
            Some(InversionContext::new(*x, *y, *z).map_err(|e| Failure::usage(e.to_string()))?)
        }
        [None, None, None] => None,
        _ => return Err(Failure::usage("give all of --x, --y, --z or none")),
    };
    let mut rows = Vec::new();
    for t in 0..trials {
        let (ctx, seq) = match fixed {
            Some(ctx) => (ctx, inversion::sample_sequence(seed, t, n_max + 1)),
            None => inversion::sample_case(seed, t, n_max)
                .ok_or_else(|| Failure::runtime(format!("no well-posed context found for trial {t}")))?,
        };
        let err = inversion::roundtrip_error(&seq, &ctx, n_max).map_err(|e| Failure::runtime(e.to_string()))?;
        rows.push((t, ctx, ctx.guard_margin(n_max), err));
    }
    let worst = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let pass = worst <= tol;
    let text = match format {
        Format::Json => {
            let trials: Vec<_> = rows
                .iter()
                .map(|(t, c, g, e)| {
                    json!({
                        "trial_index": t,
                        "x": {"re": c.x.re, "im": c.x.im},
                        "y": {"re": c.y.re, "im": c.y.im},
                        "z": {"re": c.z.re, "im": c.z.im},
                        "guard_margin": g,
                        "roundtrip_error": finite(*e),
                    })
                })
                .collect();
            let v = json!({"n_max": n_max, "seed": seed, "tol": tol, "guard_min": inversion::GUARD_MIN, "trials": trials, "max_error": finite(worst), "pass": pass});
            serde_json::to_string_pretty(&v).map_err(|e| Failure::runtime(e.to_string()))?
        }
        Format::Csv => {
            let mut s = String::from("trial_index,x_re,x_im,y_re,y_im,z_re,z_im,guard_margin,roundtrip_error\n");
            for (t, c, g, e) in &rows {
                s.push_str(&format!(
                    "{t},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{g:.6e},{e:.16e}\n",
                    c.x.re, c.x.im, c.y.re, c.y.im, c.z.re, c.z.im
                ));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for (t, c, g, e) in &rows {
                s.push_str(&format!(
                    "trial {t:>4}  x={}  y={}  z={}  guard={g:.2e}  error={e:.3e}\n",
                    short(c.x),
                    short(c.y),
                    short(c.z)
                ));
            }
            s.push_str(&format!(
                "summary: {} trials, max roundtrip error {worst:.3e} (tol {tol:e}) {}\n",
                rows.len(),
                if pass { "PASS" } else { "FAIL" }
            ));
            s
        }
    };
    write_out(out, &text)?;
    Ok(if pass { 0 } else { EXIT_FAIL })
}

fn short(z: Complex64) -> String {
    format!("{:.4}{:+.4}i", z.re, z.im)
}

fn parse_check(files: &[PathBuf], format: Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let mut results = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(f).map_err(|e| Failure::runtime(format!("cannot read {}: {e}", f.display())))?;
        let outcome = match notation::parse_identity(&text) {
            Err(e) => Err(format!("{}:{}", f.display(), e)),
            Ok(id) => {
                let printed = notation::print_identity(&id);
                match notation::parse_identity(&printed) {
                    Ok(again) if again == id => Ok(id.name),
                    Ok(_) => Err(format!("{}: print/parse is not a fixpoint", f.display())),
                    Err(e) => Err(format!("{}: reprinted text does not parse: {e}", f.display())),
                }
            }
        };
        results.push((f.display().to_string(), outcome));
    }
    let ok = results.iter().all(|r| r.1.is_ok());
    let text = match format {
        Format::Json => {
            let v: Vec<_> = results
                .iter()
                .map(|(f, r)| match r {
                    Ok(name) => json!({"file": f, "ok": true, "identity": name}),
                    Err(e) => json!({"file": f, "ok": false, "error": e}),
                })
                .collect();
            serde_json::to_string_pretty(&json!({"files": v, "ok": ok})).map_err(|e| Failure::runtime(e.to_string()))?
        }
        Format::Csv => {
            let mut s = String::from("file,ok,detail\n");
            for (f, r) in &results {
                let (flag, detail) = match r {
                    Ok(n) => ("true", n.clone()),
                    Err(e) => ("false", e.replace('"', "'")),
                };
                s.push_str(&format!("{f},{flag},\"{detail}\"\n"));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for (f, r) in &results {
                match r {
                    Ok(n) => s.push_str(&format!("ok    {f} ({n})\n")),
                    Err(e) => s.push_str(&format!("FAIL  {e}\n")),
                }
            }
            let good = results.iter().filter(|r| r.1.is_ok()).count();
            s.push_str(&format!("summary: {good}/{} files ok\n", results.len()));
            s
        }
    };
    write_out(out, &text)?;
    Ok(if ok { 0 } else { EXIT_FAIL })
}
