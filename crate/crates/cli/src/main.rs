//! `volcano`: command-line access to class groups, existence verdicts, prime searches,
//! isogeny graphs and heuristic scans. JSON on stdout; exit 0 on success, 1 on domain errors,
//! 2 on usage errors.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use volcano_core::config::Caps;
use volcano_core::heuristics::{self, Kind, CSV_HEADER};
use volcano_core::isogeny::{self, build_field, build_graph, IsogenyGraph};
use volcano_core::ordertower::{kappa_bruteforce, kappa_structure, OrderTower};
use volcano_core::primesearch;
use volcano_core::quadforms::class_group_capped;
use volcano_core::solvability::{decide_constructive, decide_existence, Crater, VolcanoSpec};
use volcano_core::Error;

#[derive(Parser, Debug)]
#[command(name = "volcano", version, about = "Isogeny volcanoes, class groups and k-explosive primes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Largest |D| whose class group is enumerated
    #[arg(long, global = true, default_value_t = Caps::default().class_group)]
    class_group_cap: u64,
    /// Largest field size p^k
    #[arg(long, global = true, default_value_t = Caps::default().field)]
    field_cap: u64,
    /// Largest |D_K| in heuristic scans
    #[arg(long, global = true, default_value_t = Caps::default().scan)]
    scan_cap: u64,
    /// Largest |D_0| tried when searching compatible orders
    #[arg(long, global = true, default_value_t = Caps::default().compatible_search)]
    compatible_cap: u64,
    /// Worker threads (default: available cores)
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Accepted for interface stability; every computation is deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Human-readable text instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
}

impl Global {
    fn caps(&self) -> Caps {
        Caps {
            class_group: self.class_group_cap,
            field: self.field_cap,
            scan: self.scan_cap,
            compatible_search: self.compatible_cap,
            ..Caps::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Existence verdict for a volcano over F_{p^k}
    Decide(DecideArgs),
    /// k-explosive primes up to a bound for the tower over D_0
    Search(SearchArgs),
    /// Whether a volcano appears in the isogeny graph for a given or searched prime
    Verify(VerifyArgs),
    /// Class number and invariant factors of Cl(D)
    Classgroup(ClassgroupArgs),
    /// Closed-form and enumerated kernel of S_d -> S_0
    Kappa(KappaArgs),
    /// Heuristic scan over imaginary quadratic fields, as CSV
    Heur(HeurArgs),
    /// Build the ell-isogeny graph over F_{p^k} and classify its components
    Graph(GraphArgs),
}

#[derive(Args, Debug, Clone)]
struct VolcanoArgs {
    /// Crater type: I1, R1, S1, R2, S2, Sn or S<n>
    #[arg(long)]
    crater: String,
    /// Cycle length for Sn craters
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    depth: u32,
}

impl VolcanoArgs {
    fn spec(&self) -> Result<VolcanoSpec, Error> {
        let upper = self.crater.to_ascii_uppercase();
        if let Some(num) = upper.strip_prefix('S').and_then(|s| s.parse::<u32>().ok()) {
            if self.n.is_some_and(|n| n != num) {
                return Err(Error::InvalidSpec(format!(
                    "crater {} conflicts with --n {}",
                    self.crater,
                    self.n.unwrap()
                )));
            }
            return VolcanoSpec::split(num, self.ell, self.depth);
        }
        let crater: Crater = self.crater.parse()?;
        VolcanoSpec::new(crater, self.n, self.ell, self.depth)
    }
}

#[derive(Args, Debug)]
struct DecideArgs {
    #[command(flatten)]
    volcano: VolcanoArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Attach proof orders and search compatible orders for open cells
    #[arg(long)]
    constructive: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, allow_hyphen_values = true)]
    d0: i64,
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    depth: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 100_000)]
    pmax: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    volcano: VolcanoArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Prime to test; without it the first prime found for --d0 is used
    #[arg(long, required_unless_present = "d0")]
    p: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    d0: Option<i64>,
    #[arg(long, default_value_t = 100_000)]
    pmax: u64,
}

#[derive(Args, Debug)]
struct ClassgroupArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
}

#[derive(Args, Debug)]
struct KappaArgs {
    #[arg(long, allow_hyphen_values = true)]
    dk: i64,
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    d: u32,
    /// Base conductor, coprime to ell
    #[arg(long, default_value_t = 1)]
    c: u64,
}

#[derive(Args, Debug)]
struct HeurArgs {
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    e: u32,
    /// i1 or r2
    #[arg(long)]
    kind: String,
    #[arg(long)]
    xmax: u64,
    #[arg(long)]
    stride: u64,
    /// CSV destination (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checkpoint file for resumable scans
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Whitespace-separated columns with a commented header instead of CSV
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long)]
    ell: u64,
    /// Write Graphviz output here ("-" for stdout)
    #[arg(long)]
    dot: Option<PathBuf>,
}

/// Output of a subcommand: JSON for stdout, or None when the subcommand already wrote its
/// payload (CSV or DOT to stdout).
type Outcome = Option<Value>;

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotADiscriminant(_) => "NotADiscriminant",
        Error::NotFundamental(_) => "NotFundamental",
        Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
        Error::NotPrimitive { .. } => "NotPrimitive",
        Error::DiscriminantMismatch(..) => "DiscriminantMismatch",
        Error::NotPrime(_) => "NotPrime",
        Error::NotSplit { .. } => "NotSplit",
        Error::NotRepresentable { .. } => "NotRepresentable",
        Error::PrimeEqualsEll(_) => "EllEqualsP",
        Error::WrongRamification { .. } => "WrongRamification",
        Error::ConductorNotCoprime { .. } => "ConductorNotCoprime",
        Error::Overflow(_) => "Overflow",
        Error::CapExceeded { .. } => "CapExceeded",
        Error::NoCoprimeRepresentative(_) => "NoCoprimeRepresentative",
        Error::Inconsistent(_) => "Inconsistent",
        Error::HypothesisViolation(_) => "HypothesisViolation",
        Error::InvalidSpec(_) => "InvalidSpec",
        Error::Unsupported(_) => "UnsupportedEll",
        Error::Data(_) => "Data",
        Error::Io(_) => "Io",
    }
}

/// Component shapes in order of first appearance, with counts.
fn component_summary(g: &IsogenyGraph) -> Vec<Value> {
    let mut order: Vec<String> = Vec::new();
    let mut counts: std::collections::HashMap<String, (u64, u64)> = Default::default();
    for (comp, cls) in g.classify_all() {
        let label = cls.label();
        let entry = counts.entry(label.clone()).or_insert_with(|| {
            order.push(label);
            (0, 0)
        });
        entry.0 += 1;
        if g.touches_excluded(&comp) {
            entry.1 += 1;
        }
    }
    order
        .into_iter()
        .map(|label| {
            let (count, excluded) = counts[&label];
            json!({"shape": label, "count": count, "adjacent_to_excluded": excluded})
        })
        .collect()
}

fn graph_json(g: &IsogenyGraph) -> Value {
    let edges: u64 = (0..g.vertices.len())
        .flat_map(|v| g.adj[v].iter().filter(move |&&(w, _)| w >= v).map(|&(_, m)| m as u64))
        .sum();
    json!({
        "p": g.field.p,
        "k": g.field.k,
        "ell": g.ell,
        "vertices": g.vertices.len(),
        "edges": edges,
        "components": component_summary(g),
    })
}

fn run_decide(args: &DecideArgs, caps: &Caps) -> Result<Outcome, Error> {
    let v = args.volcano.spec()?;
    let verdict = if args.constructive {
        decide_constructive(&v, args.k, caps)?
    } else {
        decide_existence(&v, args.k)
    };
    Ok(Some(serde_json::to_value(verdict).expect("verdict serializes")))
}

fn run_search(args: &SearchArgs, caps: &Caps) -> Result<Outcome, Error> {
    let res = primesearch::search(args.d0, args.ell, args.depth, args.k, args.pmax, caps)?;
    Ok(Some(json!({
        "primes": res.primes,
        "empirical_density": res.empirical_density,
        "predicted_density": res.predicted_density,
        "eligible": res.eligible,
        "prime_count": res.prime_count,
        "x_size": res.x.size,
        "h_next": res.x.h_next,
    })))
}

fn run_verify(args: &VerifyArgs, caps: &Caps) -> Result<Outcome, Error> {
    let v = args.volcano.spec()?;
    let p = match (args.p, args.d0) {
        (Some(p), _) => Some(p),
        (None, Some(d0)) => {
            primesearch::search(d0, v.ell, v.d, args.k, args.pmax, caps)?.primes.first().copied()
        }
        (None, None) => unreachable!("clap requires --p or --d0"),
    };
    let mut out = Map::new();
    out.insert("volcano".into(), json!(v.to_string()));
    out.insert("k".into(), json!(args.k));
    out.insert("p".into(), json!(p));
    let Some(p) = p else {
        out.insert("appears".into(), json!(false));
        out.insert("components".into(), json!([]));
        return Ok(Some(Value::Object(out)));
    };
    let k = u32::try_from(args.k).map_err(|_| Error::CapExceeded {
        what: "field size p^k",
        size: u128::MAX,
        cap: caps.field as u128,
    })?;
    let field = build_field(p, k, caps)?;
    let g = build_graph(&field, v.ell)?;
    out.insert("appears".into(), json!(isogeny::contains_volcano(&g, &v)));
    out.insert("components".into(), json!(component_summary(&g)));
    Ok(Some(Value::Object(out)))
}

fn run_classgroup(args: &ClassgroupArgs, caps: &Caps) -> Result<Outcome, Error> {
    let g = class_group_capped(args.d, caps.class_group)?;
    Ok(Some(json!({"h": g.order(), "divisors": g.descriptor.elementary_divisors})))
}

fn run_kappa(args: &KappaArgs, caps: &Caps) -> Result<Outcome, Error> {
    let tower = OrderTower::new(args.dk, args.c, args.ell)?;
    let (closed, _) = kappa_structure(&tower, args.d)?;
    let brute = kappa_bruteforce(&tower, args.d, caps)?;
    Ok(Some(json!({
        "dk": args.dk,
        "ell": args.ell,
        "d": args.d,
        "closed_form": closed.elementary_divisors,
        "brute_force": brute.elementary_divisors,
        "match": closed == brute,
    })))
}

fn run_heur(args: &HeurArgs, caps: &Caps) -> Result<Outcome, Error> {
    let kind: Kind = args.kind.parse()?;
    let rows = heuristics::scan(
        args.ell,
        args.e,
        kind,
        args.xmax,
        args.stride,
        caps,
        args.checkpoint.as_deref(),
    )?;
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    if args.gnuplot {
        let mut w = io::BufWriter::new(sink);
        writeln!(w, "# {}", CSV_HEADER.join(" "))?;
        for row in &rows {
            writeln!(w, "{}", row.csv_record().join(" "))?;
        }
        w.flush()?;
    } else {
        let mut w = csv::Writer::from_writer(sink);
        let io_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(io_err)?;
        for row in &rows {
            w.write_record(row.csv_record()).map_err(io_err)?;
        }
        w.flush()?;
    }
    match &args.out {
        Some(path) => {
            let last = rows.last();
            Ok(Some(json!({
                "out": path.display().to_string(),
                "rows": rows.len(),
                "x": last.map(|r| r.x),
                "eligible": last.map(|r| r.eligible),
                "hits": last.map(|r| r.hits),
                "ratio": last.map(|r| heuristics::format_ratio(r.ratio)),
            })))
        }
        None => Ok(None),
    }
}

fn run_graph(args: &GraphArgs, caps: &Caps) -> Result<Outcome, Error> {
    let field = build_field(args.p, args.k, caps)?;
    let g = build_graph(&field, args.ell)?;
    match &args.dot {
        Some(path) if path.as_os_str() == "-" => {
            io::stdout().lock().write_all(g.to_dot().as_bytes())?;
            Ok(None)
        }
        Some(path) => {
            std::fs::write(path, g.to_dot())?;
            Ok(Some(graph_json(&g)))
        }
        None => Ok(Some(graph_json(&g))),
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, val) in map {
                match val {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(val, indent + 2, out);
                    }
                    Value::Array(items) if items.iter().any(|x| x.is_object()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for item in items {
                            let mut inner = String::new();
                            render_text(item, 0, &mut inner);
                            let line = inner.lines().collect::<Vec<_>>().join(", ");
                            out.push_str(&format!("{pad}  - {line}\n"));
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k:<width$}  {}\n", scalar(val))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn kappa_table(v: &Value) -> String {
    let fmt_group = |x: &Value| {
        let divs: Vec<String> = x
            .as_array()
            .map(|a| a.iter().map(|d| format!("Z/{d}")).collect())
            .unwrap_or_default();
        if divs.is_empty() {
            "0".to_string()
        } else {
            divs.join(" x ")
        }
    };
    let closed = fmt_group(&v["closed_form"]);
    let brute = fmt_group(&v["brute_force"]);
    let w = closed.len().max(brute.len()).max("closed form".len());
    format!(
        "{:>8} {:>4} {:>3}  {:<w$}  {:<w$}  match\n{:>8} {:>4} {:>3}  {:<w$}  {:<w$}  {}\n",
        "D_K",
        "ell",
        "d",
        "closed form",
        "enumerated",
        v["dk"].to_string(),
        v["ell"].to_string(),
        v["d"].to_string(),
        closed,
        brute,
        v["match"]
    )
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let caps = cli.global.caps();
    match &cli.command {
        Command::Decide(a) => run_decide(a, &caps),
        Command::Search(a) => run_search(a, &caps),
        Command::Verify(a) => run_verify(a, &caps),
        Command::Classgroup(a) => run_classgroup(a, &caps),
        Command::Kappa(a) => run_kappa(a, &caps),
        Command::Heur(a) => run_heur(a, &caps),
        Command::Graph(a) => run_graph(a, &caps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.global.seed;
    if let Some(n) = cli.global.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .expect("thread pool is configured once");
    }
    let mut stdout = io::stdout().lock();
    match run(&cli) {
        Ok(Some(value)) => {
            let text = if cli.global.pretty {
                if matches!(cli.command, Command::Kappa(_)) {
                    kappa_table(&value)
                } else {
                    let mut s = String::new();
                    render_text(&value, 0, &mut s);
                    s
                }
            } else {
                format!("{}\n", serde_json::to_string(&value).expect("json"))
            };
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = json!({"error": error_kind(&e), "message": e.to_string()});
            let _ = writeln!(stdout, "{}", serde_json::to_string(&obj).expect("json"));
            ExitCode::from(1)
        }
    }
}
