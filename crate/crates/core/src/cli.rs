//! Command-line front end: `legclus <command> <word> [flags]`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::augvar::{self, Style};
use crate::bridge::{apply_move, fraction_value, smooth_isotopic, BridgeWord, Move};
use crate::cluster::{is_really_full_rank, labelled_arrows, mutation_class, Seed};
use crate::dga::build_dga;
use crate::fillings::{self, PinchSequence};
use crate::polygon::{initial_seed, BlockModel};
use crate::render::{seed_dot, triangulation_svg};
use crate::ring::Coefficients;
use crate::rulings;

pub const SCHEMA: &str = "legclus/1";

#[derive(Debug, Parser)]
#[command(name = "legclus", version, about = "Augmentation varieties, cluster seeds and fillings of Legendrian 2-bridge links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    Inequality,
    Equation,
}

#[derive(Debug, Args)]
pub struct WordArg {
    /// Block word such as `[5,4]` or `5,4`.
    pub word: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fractions, the three moves, and (with a second word) the smooth isotopy test.
    Classify { word: String, other: Option<String> },
    /// Generators and differentials over F_2.
    Dga(WordArg),
    /// The augmentation variety: presentation, point count, closed form.
    Augvar {
        word: String,
        #[arg(long = "char", default_value_t = 2)]
        characteristic: u64,
        #[arg(long, value_enum, default_value_t = StyleArg::Inequality)]
        style: StyleArg,
        /// Compare the brute-force count with the closed form.
        #[arg(long)]
        count: bool,
        /// List every point.
        #[arg(long)]
        list: bool,
    },
    /// The initial seed.
    Seed(WordArg),
    /// Mutate the initial seed at the given 1-based vertices, in order.
    Mutate {
        word: String,
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<usize>,
    },
    /// Breadth-first enumeration of the seeds of the mutation class.
    Seeds {
        word: String,
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = 20_000)]
        bound: usize,
    },
    /// A pinching sequence (left to right by default) or all filling classes.
    Fillings {
        word: String,
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long)]
        enumerate: bool,
        /// Block whose triangulation `--format svg` draws.
        #[arg(long, default_value_t = 1)]
        block: usize,
    },
    /// Normal rulings, the ruling polynomial and the Kauffman identity.
    Rulings(WordArg),
    /// Every cross-check this crate knows for one word.
    Verify(WordArg),
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.to_string())
    }
}

/// A finished report in every format it supports.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub dot: Option<String>,
    pub svg: Option<String>,
    /// Nonzero when a check inside the report failed.
    pub failed: bool,
}

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Text => Ok(report.text.clone().into_bytes()),
        Format::Json => {
            let mut v = report.json.clone();
            if let Value::Object(m) = &mut v {
                m.insert("schema".into(), json!(SCHEMA));
            }
            let mut s = serde_json::to_string_pretty(&v).expect("serializable");
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Dot => report.dot.clone().map(String::into_bytes).ok_or_else(|| "this report has no DOT form".into()),
        Format::Svg => report.svg.clone().map(String::into_bytes).ok_or_else(|| "this report has no SVG form".into()),
    }
}

fn parse_word(s: &str) -> Result<BridgeWord, Failure> {
    s.parse().map_err(|e: crate::bridge::BridgeError| Failure::Usage(e.to_string()))
}

fn rational(s: &str) -> Result<BridgeWord, Failure> {
    let w = parse_word(s)?;
    w.require_rational_form()?;
    Ok(w)
}

/// Runs one invocation and returns the exit code: 0 success, 1 domain error, 2 usage error.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let format = if cli.json { Format::Json } else { cli.format };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            return 2;
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            return 1;
        }
    };
    let bytes = match render(&report, format) {
        Ok(b) => b,
        Err(m) => {
            let _ = writeln!(stderr, "error: {m}");
            return 2;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes),
        None => stdout.write_all(&bytes),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return 1;
    }
    i32::from(report.failed)
}

fn execute(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Classify { word, other } => classify(word, other.as_deref()),
        Command::Dga(w) => dga(&rational(&w.word)?),
        Command::Augvar { word, characteristic, style, count, list } => {
            let style = match style {
                StyleArg::Inequality => Style::Inequality,
                StyleArg::Equation => Style::Equation,
            };
            augvar_report(&rational(word)?, *characteristic, style, *count, *list)
        }
        Command::Seed(w) => Ok(seed_report(&initial_seed(&rational(&w.word)?), "initial seed")),
        Command::Mutate { word, at } => {
            let mut s = initial_seed(&rational(word)?);
            for &v in at {
                if v == 0 || v > s.quiver.size() {
                    return Err(Failure::Usage(format!("vertex {v} out of range 1..={}", s.quiver.size())));
                }
                s = s.mutate(v - 1)?;
            }
            let at: Vec<String> = at.iter().map(|v| v.to_string()).collect();
            Ok(seed_report(&s, &format!("seed after mutating at {}", at.join(","))))
        }
        Command::Seeds { word, enumerate, bound } => seeds(&rational(word)?, *enumerate, *bound),
        Command::Fillings { word, sequence, enumerate, block } => {
            fillings_report(&rational(word)?, sequence.as_deref(), *enumerate, *block)
        }
        Command::Rulings(w) => rulings_report(&rational(&w.word)?),
        Command::Verify(w) => verify(&rational(&w.word)?),
    }
}

fn classify(word: &str, other: Option<&str>) -> Result<Report, Failure> {
    let w = parse_word(word)?;
    let f = fraction_value(&w);
    let mut text = format!("{w}: {f}\n");
    let mut moves = BTreeMap::new();
    for (name, mv) in [("extend_one", Move::ExtendOne), ("prepend_one", Move::PrependOne), ("reverse", Move::Reverse)] {
        let img = apply_move(&w, mv, false)?;
        text += &format!("  {name}: {img} ({})\n", fraction_value(&img));
        moves.insert(name, img.to_string());
    }
    let mut json = json!({ "word": w.to_string(), "fraction": f.to_string(), "moves": moves });
    if let Some(o) = other {
        let v = parse_word(o)?;
        let g = fraction_value(&v);
        let iso = smooth_isotopic(&w, &v);
        text += &format!("{} ({f} vs {g})\n", if iso { "isotopic" } else { "not isotopic" });
        json["other"] = json!(v.to_string());
        json["other_fraction"] = json!(g.to_string());
        json["isotopic"] = json!(iso);
    }
    Ok(Report { text, json, ..Default::default() })
}

fn dga(word: &BridgeWord) -> Result<Report, Failure> {
    let d = build_dga(word)?;
    let mut text = format!("dg-algebra of {word} over F_2\n");
    let mut map = BTreeMap::new();
    for (g, f) in &d.differentials {
        text += &format!("  d{g} = {f}\n");
        map.insert(g.clone(), f.to_string());
    }
    let order: Vec<&String> = d.differentials.iter().map(|(g, _)| g).collect();
    Ok(Report { text, json: json!({ "word": word.to_string(), "generators": order, "differentials": map }), ..Default::default() })
}

fn closed_form_text(word: &BridgeWord) -> Result<String, Failure> {
    let ctx = augvar::q_context();
    let mut degs: BTreeMap<usize, usize> = BTreeMap::new();
    for b in BlockModel::all(word) {
        *degs.entry(b.size - 2).or_default() += 1;
    }
    let parts: Vec<String> = degs
        .iter()
        .rev()
        .filter(|(&d, _)| d > 0)
        .map(|(&d, &e)| {
            let f = augvar::f_poly(&ctx, d).to_string();
            let f = if d > 1 || f.contains(' ') { format!("({f})") } else { f };
            if e > 1 {
                format!("{f}^{e}")
            } else {
                f
            }
        })
        .collect();
    Ok(if parts.is_empty() { "1".into() } else { parts.join("·") })
}

fn augvar_report(word: &BridgeWord, p: u64, style: Style, count: bool, list: bool) -> Result<Report, Failure> {
    let ring = Coefficients::prime_field(p)?;
    let pres = augvar::presentation_over(word, style, ring)?;
    let cf = augvar::point_count_closed_form(word)?;
    let mut text = format!("augmentation variety of {word} over F_{p} ({} style)\n", format!("{style:?}").to_lowercase());
    text += &format!("  coordinates: {}\n", pres.coord_names().join(", "));
    for e in &pres.equations {
        text += &format!("  {e} = 0\n");
    }
    for e in &pres.inequations {
        text += &format!("  {e} != 0\n");
    }
    let cft = closed_form_text(word)?;
    text += &format!("  closed form: {cft} = {cf}\n");
    let mut json = json!({
        "word": word.to_string(),
        "char": p,
        "style": format!("{style:?}").to_lowercase(),
        "coordinates": pres.coord_names(),
        "equations": pres.equations.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "inequations": pres.inequations.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "closed_form": cf.to_string(),
        "closed_form_factored": cft,
    });
    let mut failed = false;
    if count || list {
        let n = augvar::count_points(&pres, p)?;
        let want = augvar::closed_form_value(word, p)?;
        let verdict = if n == want { "MATCH" } else { "MISMATCH" };
        failed = n != want;
        text += &format!("  brute force: {n}\n  closed form at q = {p}: {want}\n  verdict: {verdict}\n");
        json["count"] = json!(n.to_string());
        json["closed_form_value"] = json!(want.to_string());
        json["verdict"] = json!(verdict);
    }
    if list {
        let pts = augvar::enumerate_points(&pres, p)?;
        let rows: Vec<Value> = pts.iter().map(|pt| json!({ "values": pt.values, "t1": pt.forced_t1, "t2": pt.forced_t2 })).collect();
        for pt in &pts {
            text += &format!("  {:?} t1={} t2={}\n", pt.values, pt.forced_t1, pt.forced_t2);
        }
        json["points"] = json!(rows);
    }
    Ok(Report { text, json, failed, ..Default::default() })
}

fn seed_report(s: &Seed, title: &str) -> Report {
    let mut text = format!("{title}\n");
    for (v, x) in s.variables.iter().enumerate() {
        let kind = if s.quiver.is_frozen(v) { "frozen" } else { "mutable" };
        text += &format!("  {}: {x} ({kind})\n", v + 1);
    }
    let arrows: Vec<String> = labelled_arrows(&s.quiver)
        .iter()
        .map(|((i, j), m)| if *m == 1 { format!("{i}->{j}") } else { format!("{i}->{j} x{m}") })
        .collect();
    text += &format!("  arrows: {}\n", arrows.join(", "));
    let full = is_really_full_rank(&s.quiver);
    text += &format!("  really full rank: {full}\n");
    let mut json = s.to_json();
    json["really_full_rank"] = json!(full);
    Report { text, json, dot: Some(seed_dot(s)), ..Default::default() }
}

fn seeds(word: &BridgeWord, enumerate: bool, bound: usize) -> Result<Report, Failure> {
    let s = initial_seed(word);
    let expected = fillings::filling_count(word);
    if !enumerate {
        let text = format!("{word}: {expected} seeds expected; pass --enumerate to list them\n");
        return Ok(Report { text, json: json!({ "word": word.to_string(), "expected": expected.to_string() }), ..Default::default() });
    }
    let class = mutation_class(&s, bound)?;
    let n = BigInt::from(class.seeds.len());
    let mut text = format!("{word}: {} seeds{} (triangulation count {expected})\n", n, if class.complete { "" } else { " before hitting the bound" });
    let rows: Vec<Vec<String>> = class
        .seeds
        .iter()
        .map(|t| t.quiver.mutable_vertices().iter().map(|&v| t.variables[v].to_string()).collect())
        .collect();
    for r in &rows {
        text += &format!("  {{{}}}\n", r.join(", "));
    }
    let failed = class.complete && n != expected;
    Ok(Report {
        text,
        json: json!({ "word": word.to_string(), "count": class.seeds.len(), "complete": class.complete, "expected": expected.to_string(), "seeds": rows }),
        failed,
        ..Default::default()
    })
}

fn fillings_report(word: &BridgeWord, sequence: Option<&str>, enumerate: bool, block: usize) -> Result<Report, Failure> {
    if enumerate {
        let classes = fillings::enumerate_filling_classes(word)?;
        let mut text = format!("{word}: {} filling classes\n", classes.count);
        let mut rows = Vec::new();
        for s in &classes.representatives {
            let tris = fillings::sequence_to_triangulations(s)?;
            let ts: Vec<String> = tris.iter().map(|t| t.to_string()).collect();
            text += &format!("  {s}  {}\n", ts.join("  "));
            rows.push(json!({ "sequence": s.chords, "triangulations": ts }));
        }
        return Ok(Report { text, json: json!({ "word": word.to_string(), "count": classes.count.to_string(), "classes": rows }), ..Default::default() });
    }
    let seq = match sequence {
        Some(s) => PinchSequence::parse(word, s)?,
        None => PinchSequence::left_to_right(word)?,
    };
    let f = fillings::run_sequence(&seq)?;
    let mut text = format!("{word}, pinching {seq}\n");
    for (i, t) in f.triangulations.iter().enumerate() {
        text += &format!("  block {}: {t}\n", i + 1);
    }
    text += "  parametrization:\n";
    for (j, e) in f.parametrization.iter().enumerate() {
        text += &format!("    a{} = {e}\n", j + 1);
    }
    let chart: Vec<String> = f.chart.iter().map(|x| x.to_string()).collect();
    text += &format!("  chart: {}\n", chart.join(", "));
    text += &format!("  t1 = {}\n  t2 = {}\n", f.t1, f.t2);
    let labels: Vec<String> = f.labels.iter().map(|l| l.to_string()).collect();
    text += &format!("  pinches: {}\n", labels.join(", "));
    let torus = f.is_torus_chart();
    let variety = f.satisfies_variety()?;
    text += &format!("  torus chart: {torus}\n  on the variety: {variety}\n");
    let mut json = f.to_json();
    json["torus_chart"] = json!(torus);
    json["on_variety"] = json!(variety);
    let svg = f.triangulations.get(block.wrapping_sub(1)).map(|t| triangulation_svg(t, true));
    Ok(Report { text, json, svg, failed: !(torus && variety), ..Default::default() })
}

fn rulings_report(word: &BridgeWord) -> Result<Report, Failure> {
    let json = rulings::rulings_report(word)?;
    let mut text = format!("{word}: {} normal rulings (Fibonacci product {})\n", json["count"], json["fibonacci_product"].as_str().unwrap_or(""));
    for r in json["rulings"].as_array().expect("array") {
        text += &format!(
            "  {}  s={} r={} stratum (F*)^{} x F^{}\n",
            r["types"].as_str().unwrap_or(""),
            r["switches"],
            r["returns"],
            r["torus_rank"],
            r["affine_rank"]
        );
    }
    text += &format!("  B(z) = {}\n", json["ruling_polynomial"].as_str().unwrap_or(""));
    let ok = json["kauffman_identity"].as_bool().unwrap_or(false);
    text += &format!("  Kauffman identity: {ok}\n");
    Ok(Report { text, json, failed: !ok, ..Default::default() })
}

fn verify(word: &BridgeWord) -> Result<Report, Failure> {
    let mut checks: Vec<(String, bool)> = Vec::new();
    let pres = augvar::presentation(word, Style::Inequality)?;
    for p in [2u64, 3, 5] {
        let n = match augvar::count_points(&pres, p) {
            Ok(n) => n,
            Err(augvar::AugvarError::BudgetExceeded(..)) => continue,
            Err(e) => return Err(e.into()),
        };
        checks.push((format!("point count over F_{p}"), n == augvar::closed_form_value(word, p)?));
    }
    let mut units = true;
    augvar::for_each_point(&pres, 2, |pt| units &= pt.forced_t1 != 0 && pt.forced_t2 != 0)?;
    checks.push(("forced units nonzero over F_2".into(), units));
    let seed = initial_seed(word);
    checks.push(("initial quiver really full rank".into(), is_really_full_rank(&seed.quiver)));
    let lr = fillings::run_sequence(&PinchSequence::left_to_right(word)?)?;
    checks.push(("left-to-right filling is a torus chart".into(), lr.is_torus_chart() && lr.satisfies_variety()?));
    if fillings::sequence_count(word)? <= BigInt::from(200_000) {
        let c = fillings::torus_chart_census(word)?;
        checks.push(("every pinching sequence gives a torus chart".into(), c.failure_count == 0));
        let cc = fillings::commutation_census(word)?;
        checks.push(("swap classes match triangulation tuples".into(), cc.bijective && BigInt::from(cc.classes) == cc.expected));
    }
    let rs = rulings::enumerate_rulings(word)?;
    checks.push(("ruling count = Fibonacci product = anticlique count".into(), BigInt::from(rs.len()) == rulings::ruling_count(word) && rs.len() == rulings::all_anticliques(word).len()));
    checks.push(("Kauffman identity".into(), rulings::kauffman_identity_check(word)?));
    if let Ok(strata) = rulings::stratify_points(word, 2) {
        let ok = strata.iter().all(|(a, n)| rulings::ruling_from_anticlique(word, a).map(|r| r.shape().size(2) == *n).unwrap_or(false));
        checks.push(("strata sizes over F_2".into(), ok && strata.len() == rs.len()));
    }
    let mut text = format!("verify {word}\n");
    for (name, ok) in &checks {
        text += &format!("  {} {name}\n", if *ok { "PASS" } else { "FAIL" });
    }
    let failed = checks.iter().any(|(_, ok)| !ok);
    let json = json!({
        "word": word.to_string(),
        "checks": checks.iter().map(|(n, ok)| json!({ "name": n, "pass": ok })).collect::<Vec<_>>(),
        "pass": !failed,
    });
    Ok(Report { text, json, failed, ..Default::default() })
}
