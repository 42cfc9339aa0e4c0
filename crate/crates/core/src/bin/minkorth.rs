use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use minkorth::approximation::{
    best_approx_membership, best_approximation, coapprox_membership_sampled, coapprox_sufficient_test, Subspace,
};
use minkorth::format::{fmt_num, fmt_vec, parse_vec, round12};
use minkorth::geometry::{
    bisector_sample, boundary_reversal_check_2d, max_parallel_segment, rotundity_check, section2d, smoothness_check,
    SECTION_SAMPLES,
};
use minkorth::orthogonality::{
    birkhoff_slack, birkhoff_test, isosceles_alpha_interval, isosceles_test, left_alpha_interval, right_alpha_interval,
    AlphaInterval,
};
use minkorth::{Error, Gauge, Result, Tolerances};

#[derive(Parser)]
#[command(name = "minkorth", version, about = "Orthogonality and approximation in generalized Minkowski spaces")]
struct Cli {
    /// Gauge description (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    gauge: Option<String>,
    /// Write results here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Absolute tolerance for exact comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct Pair {
    #[arg(short = 'x', allow_hyphen_values = true)]
    x: String,
    #[arg(short = 'y', allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

#[derive(Args)]
struct Approx {
    /// Subspace basis, vectors separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    basis: String,
    #[arg(short = 'y', allow_hyphen_values = true)]
    y: String,
    /// Candidate point in the subspace.
    #[arg(short = 'x', allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 65)]
    samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Summary of the gauge.
    Info,
    /// Gauge value.
    Eval {
        #[arg(short = 'v', allow_hyphen_values = true)]
        v: String,
    },
    /// Polar gauge value.
    Polar {
        #[arg(short = 'v', allow_hyphen_values = true)]
        v: String,
    },
    /// epsilon-directional derivative at x in direction y.
    Dd(Pair),
    /// Support of the epsilon-subdifferential at x in direction u.
    SubdiffSupport {
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: String,
        #[arg(short = 'u', allow_hyphen_values = true)]
        u: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// epsilon-Birkhoff orthogonality of x to y.
    Birkhoff(Pair),
    /// alpha with x epsilon-Birkhoff orthogonal to alpha x + y.
    RightInterval(Pair),
    /// alpha with alpha x + y epsilon-Birkhoff orthogonal to x.
    LeftInterval(Pair),
    /// Isosceles orthogonality of y to x.
    Isosceles(Pair),
    /// alpha with alpha x + y isosceles orthogonal to x.
    IsoscelesInterval(Pair),
    /// Best approximation of y in a subspace (membership test with -x).
    Bestapprox(Approx),
    /// Co-approximation checks for x.
    Coapprox(Approx),
    /// Bisector of -x and x along sampled directions (CSV-friendly).
    Bisector {
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Explicit directions separated by ';' (overrides --samples).
        #[arg(long, allow_hyphen_values = true)]
        dirs: Option<String>,
    },
    /// Unit sphere on the half-flat of x and y.
    Section {
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: String,
        #[arg(short = 'y', allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = SECTION_SAMPLES)]
        samples: usize,
    },
    /// M_y(x) against 2 gamma(x)/gamma(y).
    MRatio {
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: String,
        #[arg(short = 'y', allow_hyphen_values = true)]
        y: String,
    },
    /// Gateaux differentiability away from the origin, with a witness if not
    CheckSmooth,
    /// Strict convexity of the unit ball, with a witness segment if not
    CheckRotund,
    /// Orthogonality reversal along the boundary of a planar gauge.
    #[command(name = "reversal-2d")]
    Reversal2d {
        #[arg(long, default_value_t = 720)]
        samples: usize,
    },
}

enum Val {
    Num(f64),
    Int(usize),
    Bool(bool),
    Vec(Vec<f64>),
    Str(String),
    None,
}

impl Val {
    fn text(&self) -> String {
        match self {
            Val::Num(v) => fmt_num(*v),
            Val::Int(n) => n.to_string(),
            Val::Bool(b) => b.to_string(),
            Val::Vec(v) => fmt_vec(v),
            Val::Str(s) => s.clone(),
            Val::None => "none".into(),
        }
    }

    fn csv(&self) -> Vec<String> {
        match self {
            Val::Vec(v) => v.iter().map(|x| fmt_num(*x)).collect(),
            Val::None => vec![String::new()],
            other => vec![other.text()],
        }
    }

    fn json(&self) -> Value {
        match self {
            Val::Num(v) => num(*v),
            Val::Int(n) => json!(n),
            Val::Bool(b) => json!(b),
            Val::Vec(v) => Value::Array(v.iter().map(|x| num(*x)).collect()),
            Val::Str(s) => json!(s),
            Val::None => Value::Null,
        }
    }
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(round12(v)).map_or(Value::Null, Value::Number)
}

struct Report {
    fields: Vec<(String, Val)>,
    /// Plain-text form when it differs from `key: value` lines.
    text: Option<String>,
    table: Option<(Vec<String>, Vec<Vec<f64>>)>,
}

impl Report {
    fn fields(fields: Vec<(&str, Val)>) -> Self {
        Report { fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect(), text: None, table: None }
    }

    fn single(key: &str, v: Val) -> Self {
        let text = v.text();
        Report { text: Some(text), ..Report::fields(vec![(key, v)]) }
    }

    fn interval(i: &AlphaInterval) -> Self {
        let text = format!("[{}, {}]", fmt_num(i.lo), fmt_num(i.hi));
        let mut fields = vec![("alpha_lo", Val::Num(i.lo)), ("alpha_hi", Val::Num(i.hi))];
        if let Some((a, b)) = &i.certificates {
            fields.push(("certificate_lo", Val::Vec(a.clone())));
            fields.push(("certificate_hi", Val::Vec(b.clone())));
        }
        Report { text: Some(text), ..Report::fields(fields) }
    }

    fn table(header: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        Report { fields: Vec::new(), text: None, table: Some((header, rows)) }
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match (format, &self.table) {
            (Format::Json, Some((h, rows))) => {
                let rows: Vec<Value> = rows.iter().map(|r| Value::Array(r.iter().map(|v| num(*v)).collect())).collect();
                out = json!({ "columns": h, "rows": rows }).to_string();
                out.push('\n');
            }
            (_, Some((h, rows))) => {
                let sep = if matches!(format, Format::Csv) { "," } else { " " };
                out.push_str(&h.join(sep));
                out.push('\n');
                for r in rows {
                    let cells: Vec<String> = r.iter().map(|v| fmt_num(*v)).collect();
                    out.push_str(&cells.join(sep));
                    out.push('\n');
                }
            }
            (Format::Json, None) => {
                let mut m = Map::new();
                for (k, v) in &self.fields {
                    m.insert(k.clone(), v.json());
                }
                out = Value::Object(m).to_string();
                out.push('\n');
            }
            (Format::Csv, None) => {
                let mut head = Vec::new();
                let mut row = Vec::new();
                for (k, v) in &self.fields {
                    let cells = v.csv();
                    if let Val::Vec(_) = v {
                        head.extend((0..cells.len()).map(|i| format!("{k}_{i}")));
                    } else {
                        head.push(k.clone());
                    }
                    row.extend(cells);
                }
                out = format!("{}\n{}\n", head.join(","), row.join(","));
            }
            (Format::Text, None) => match &self.text {
                Some(t) => {
                    out.push_str(t);
                    out.push('\n');
                }
                None => {
                    for (k, v) in &self.fields {
                        out.push_str(&format!("{k}: {}\n", v.text()));
                    }
                }
            },
        }
        out
    }
}

fn load_gauge(cli: &Cli) -> Result<Gauge> {
    let path = cli.gauge.as_deref().ok_or_else(|| Error::Domain("--gauge FILE is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    let g = Gauge::from_json(&text)?;
    Ok(match cli.tol {
        Some(t) if t.is_finite() && t > 0.0 => {
            let base = g.tolerances();
            g.with_tolerances(Tolerances { exact: t, ..base })
        }
        Some(_) => return Err(Error::Domain("--tol must be positive".into())),
        None => g,
    })
}

fn parse_basis(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').map(parse_vec).collect()
}

fn run(cli: &Cli) -> Result<Report> {
    let g = load_gauge(cli)?;
    let d = g.dim();
    let pair = |p: &Pair| -> Result<(Vec<f64>, Vec<f64>)> { Ok((parse_vec(&p.x)?, parse_vec(&p.y)?)) };
    let report = match &cli.command {
        Command::Info => {
            let s = smoothness_check(&g).map(|r| r.smooth).ok();
            let r = rotundity_check(&g).map(|r| r.rotund).ok();
            let generators = g.normals().or(g.vertices()).map_or(0, |v| v.len());
            let opt = |b: Option<bool>| b.map_or(Val::None, Val::Bool);
            Report::fields(vec![
                ("type", Val::Str(g.kind().into())),
                ("dim", Val::Int(d)),
                ("generators", Val::Int(generators)),
                ("smooth", opt(s)),
                ("rotund", opt(r)),
            ])
        }
        Command::Eval { v } => Report::single("value", Val::Num(g.eval(&parse_vec(v)?)?)),
        Command::Polar { v } => Report::single("value", Val::Num(g.polar_eval(&parse_vec(v)?)?)),
        Command::Dd(p) => {
            let (x, y) = pair(p)?;
            Report::single("value", Val::Num(g.directional_derivative(&x, &y, p.eps)?))
        }
        Command::SubdiffSupport { x, u, eps } => {
            let (x, u) = (parse_vec(x)?, parse_vec(u)?);
            let o = g.subdifferential(&x, *eps)?;
            let s = o.support(&u)?;
            let p = o.extreme_point(&u)?;
            Report {
                text: Some(fmt_num(s)),
                ..Report::fields(vec![("support", Val::Num(s)), ("extreme_point", Val::Vec(p))])
            }
        }
        Command::Birkhoff(p) => {
            let (x, y) = pair(p)?;
            let holds = birkhoff_test(&g, &x, &y, p.eps)?;
            let slack = birkhoff_slack(&g, &x, &y, p.eps)?;
            Report {
                text: Some(holds.to_string()),
                ..Report::fields(vec![("holds", Val::Bool(holds)), ("slack", Val::Num(slack))])
            }
        }
        Command::RightInterval(p) => {
            let (x, y) = pair(p)?;
            Report::interval(&right_alpha_interval(&g, &x, &y, p.eps)?)
        }
        Command::LeftInterval(p) => {
            let (x, y) = pair(p)?;
            Report::interval(&left_alpha_interval(&g, &x, &y, p.eps)?)
        }
        Command::Isosceles(p) => {
            let (x, y) = pair(p)?;
            Report::single("holds", Val::Bool(isosceles_test(&g, &y, &x)?))
        }
        Command::IsoscelesInterval(p) => {
            let (x, y) = pair(p)?;
            Report::interval(&isosceles_alpha_interval(&g, &x, &y)?)
        }
        Command::Bestapprox(a) => {
            let u = Subspace::new(parse_basis(&a.basis)?, d)?;
            let y = parse_vec(&a.y)?;
            match &a.x {
                Some(x) => {
                    Report::single("member", Val::Bool(best_approx_membership(&g, &u, &y, a.eps, &parse_vec(x)?)?))
                }
                None => {
                    let r = best_approximation(&g, &u, &y, a.eps)?;
                    Report::fields(vec![
                        ("point", Val::Vec(r.point)),
                        ("coefficients", Val::Vec(r.coefficients)),
                        ("value", Val::Num(r.value)),
                        ("certificate", Val::Vec(r.certificate)),
                    ])
                }
            }
        }
        Command::Coapprox(a) => {
            let u = Subspace::new(parse_basis(&a.basis)?, d)?;
            let y = parse_vec(&a.y)?;
            let x = parse_vec(a.x.as_deref().ok_or_else(|| Error::Domain("coapprox needs -x".into()))?)?;
            let sampled = coapprox_membership_sampled(&g, &u, &y, a.eps, &x, a.samples)?;
            let sufficient = coapprox_sufficient_test(&g, &u, &y, &x, a.eps, a.samples)?;
            Report::fields(vec![("sampled", Val::Bool(sampled)), ("sufficient", Val::Bool(sufficient))])
        }
        Command::Bisector { x, samples, dirs } => {
            let x = parse_vec(x)?;
            let directions = match dirs {
                Some(s) => parse_basis(s)?,
                None => plane_directions(d, *samples)?,
            };
            let rows = bisector_sample(&g, &x, &directions)?;
            let mut header: Vec<String> = (0..d).map(|i| format!("dir_{i}")).collect();
            header.push("alpha_lo".into());
            header.push("alpha_hi".into());
            header.extend((0..d).map(|i| format!("point_lo_{i}")));
            header.extend((0..d).map(|i| format!("point_hi_{i}")));
            let rows = rows
                .into_iter()
                .map(|r| {
                    let mut row = r.direction;
                    row.push(r.interval.lo);
                    row.push(r.interval.hi);
                    row.extend(r.points.0);
                    row.extend(r.points.1);
                    row
                })
                .collect();
            Report::table(header, rows)
        }
        Command::Section { x, y, samples } => {
            let sec = section2d(&g, &parse_vec(x)?, &parse_vec(y)?, *samples)?;
            let mut header = vec!["s".to_string(), "t".to_string()];
            header.extend((0..d).map(|i| format!("point_{i}")));
            let rows = sec
                .boundary
                .iter()
                .map(|p| {
                    let mut row = p.to_vec();
                    row.extend(sec.lift(*p));
                    row
                })
                .collect();
            Report::table(header, rows)
        }
        Command::MRatio { x, y } => {
            let (x, y) = (parse_vec(x)?, parse_vec(y)?);
            let sec = section2d(&g, &x, &y, SECTION_SAMPLES)?;
            let m = max_parallel_segment(&sec, &g, &x)?;
            let bound = 2.0 * g.eval(&x)? / g.eval(&y)?;
            let guarantee = m <= bound + g.tolerances().exact * (1.0 + bound);
            Report::fields(vec![("m", Val::Num(m)), ("bound", Val::Num(bound)), ("guarantee", Val::Bool(guarantee))])
        }
        Command::CheckSmooth => {
            let r = smoothness_check(&g)?;
            let mut f = vec![("smooth", Val::Bool(r.smooth))];
            if let Some((x, a, b)) = r.witness {
                f.push(("witness_x", Val::Vec(x)));
                f.push(("subgradient_1", Val::Vec(a)));
                f.push(("subgradient_2", Val::Vec(b)));
            }
            Report::fields(f)
        }
        Command::CheckRotund => {
            let r = rotundity_check(&g)?;
            let mut f = vec![("rotund", Val::Bool(r.rotund))];
            if let Some((p, q)) = r.witness {
                f.push(("witness_1", Val::Vec(p)));
                f.push(("witness_2", Val::Vec(q)));
            }
            Report::fields(f)
        }
        Command::Reversal2d { samples } => {
            let r = boundary_reversal_check_2d(&g, *samples)?;
            Report::fields(vec![
                ("points", Val::Int(r.points)),
                ("primal_slack", Val::Num(r.primal_slack)),
                ("dual_slack", Val::Num(r.dual_slack)),
                ("max_slack", Val::Num(r.max_slack)),
            ])
        }
    };
    Ok(report)
}

/// `n` unit directions at equal angles in the plane of the first two axes.
fn plane_directions(d: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    if d < 2 || n == 0 {
        return Err(Error::Domain("bisector sampling needs d >= 2 and --samples >= 1".into()));
    }
    Ok((0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n as f64;
            let mut v = vec![0.0; d];
            v[0] = th.cos();
            v[1] = th.sin();
            v
        })
        .collect())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            let text = report.render(cli.format);
            let written = match &cli.out {
                Some(path) => fs::write(path, text.as_bytes()),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
