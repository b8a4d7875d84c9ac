use clap::{Args, Parser, Subcommand, ValueEnum};
use ribbon::holieb::{
    graded_necklace_op, necklace_bracket, necklace_cobracket, rho_generator, GenKey, SymSum,
};
use ribbon::hypergraph::{HSum, Hypergraph};
use ribbon::mcstar::check_mc_encoding;
use ribbon::prop::{hcompose_sums, vcompose_sums};
use ribbon::rep::eval_sum;
use ribbon::theta::{darboux_alphabet, graded_alphabet, ThetaFamily};
use ribbon::verify::{
    check_closure_weight, check_functoriality, check_ibl_relations, check_lieb_axioms, ClosureBounds,
    Composer, Report, WordBounds,
};
use ribbon::words::{wordsum_to_json, CycWord, Letter};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rhyper", version, about = "Ribbon hypergraphs, cyclic-word state sums and IBL-infinity checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Degree parameter d.
    #[arg(long, global = true, default_value_t = 1, allow_negative_numbers = true)]
    d: i32,
    /// Number of base letters.
    #[arg(long = "N", global = true, default_value_t = 1)]
    n_letters: u32,
    #[arg(long, global = true)]
    max_len: Option<usize>,
    /// Bound on m + n + 2a.
    #[arg(long, global = true)]
    max_gen: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Boundary cycles and cell counts of one graph.
    Boundaries,
    /// Canonical HSum of a graph or list of graphs.
    Canon,
    /// Compose `{"a": .., "b": ..}`; vertical composition applies b first.
    Compose {
        #[arg(value_enum)]
        how: How,
    },
    /// Evaluate `{"graph": .., "theta": .., "words": [..]}`.
    Eval,
    /// Hypergraph image of the generator (m, n, a).
    Generator {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
    },
    /// Necklace operations on plain words, read as a JSON list of words.
    Necklace {
        #[arg(value_enum)]
        op: NecklaceOp,
    },
    /// Graded necklace operation of (m, n, a) on a JSON list of words.
    GradedOp {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
    },
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Random samples for functoriality.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum How {
    H,
    V,
}

#[derive(Clone, Copy, ValueEnum)]
enum NecklaceOp {
    Bracket,
    Cobracket,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Lieb,
    Ibl,
    Functoriality,
    Closure,
    Mc,
}

enum Outcome {
    Done(Value),
    Checked(Report),
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read_input(c: &Common) -> Result<Value, InputError> {
    let text = match &c.input {
        Some(p) => std::fs::read_to_string(p).map_err(|e| InputError(format!("{}: {e}", p.display())))?,
        None => std::io::read_to_string(std::io::stdin())?,
    };
    serde_json::from_str(&text).map_err(|e| InputError(format!("malformed JSON: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, InputError> {
    v.get(key).ok_or_else(|| InputError(format!("missing field {key:?}")))
}

/// A single graph, an HSum object, or an array of graphs.
fn parse_sum(v: &Value) -> Result<HSum, InputError> {
    if v.is_array() || v.get("terms").is_some() {
        Ok(HSum::from_json(v)?)
    } else {
        Ok(HSum::from_graph(&Hypergraph::from_json(v)?))
    }
}

fn parse_words(v: &Value) -> Result<Vec<CycWord>, InputError> {
    let raw: Vec<Vec<Letter>> = serde_json::from_value(v.clone())?;
    raw.iter()
        .map(|ls| {
            CycWord::canonical(ls)
                .map(|(w, _)| w)
                .ok_or_else(|| InputError(format!("word {ls:?} vanishes by its own symmetry")))
        })
        .collect()
}

fn parse_theta(v: &Value) -> Result<ThetaFamily, InputError> {
    match v.as_str() {
        Some("darboux") => Ok(ThetaFamily::darboux()),
        Some("graded") => Ok(ThetaFamily::graded()),
        Some(other) => Err(InputError(format!("unknown family {other:?}"))),
        None => Ok(ThetaFamily::from_json(v)?),
    }
}

fn key(m: usize, n: usize, a: usize) -> Result<GenKey, InputError> {
    Ok(GenKey::new(m, n, a)?)
}

fn sym_json(s: &SymSum) -> Value {
    wordsum_to_json(s)
}

fn run(cmd: &Cmd, c: &Common) -> Result<Outcome, InputError> {
    let out = match cmd {
        Cmd::Boundaries => {
            let g = Hypergraph::from_json(&read_input(c)?)?;
            json!({
                "edges": g.edge_count(),
                "vertices": g.n_vertices(),
                "hyperedges": g.n_hyperedges(),
                "boundaries": g.boundaries(),
                "degree": g.degree(),
            })
        }
        Cmd::Canon => parse_sum(&read_input(c)?)?.to_json(),
        Cmd::Compose { how } => {
            let v = read_input(c)?;
            let (a, b) = (parse_sum(field(&v, "a")?)?, parse_sum(field(&v, "b")?)?);
            match how {
                How::H => hcompose_sums(&a, &b)?.to_json(),
                How::V => vcompose_sums(&a, &b)?.to_json(),
            }
        }
        Cmd::Eval => {
            let v = read_input(c)?;
            let g = parse_sum(field(&v, "graph")?)?;
            let theta = parse_theta(field(&v, "theta")?)?;
            let words = parse_words(field(&v, "words")?)?;
            wordsum_to_json(&eval_sum(&g, &theta, &words)?)
        }
        Cmd::Generator { m, n, a } => rho_generator(key(*m, *n, *a)?, c.d)?.to_json(),
        Cmd::Necklace { op } => {
            let words = parse_words(&read_input(c)?)?;
            let res = match (op, words.as_slice()) {
                (NecklaceOp::Bracket, [w1, w2]) => necklace_bracket(c.n_letters, w1, w2)?,
                (NecklaceOp::Cobracket, [w]) => necklace_cobracket(c.n_letters, w)?,
                _ => return Err(InputError("bracket takes two words, cobracket one".into())),
            };
            sym_json(&res)
        }
        Cmd::GradedOp { m, n, a } => {
            let words = parse_words(&read_input(c)?)?;
            sym_json(&graded_necklace_op(c.n_letters, key(*m, *n, *a)?, &words)?)
        }
        Cmd::Verify { suite, samples } => return verify(*suite, *samples, c).map(Outcome::Checked),
    };
    Ok(Outcome::Done(out))
}

fn verify(suite: Suite, samples: usize, c: &Common) -> Result<Report, InputError> {
    let n = c.n_letters;
    let rep = match suite {
        Suite::Lieb => check_lieb_axioms(&ThetaFamily::darboux(), n, c.max_len.unwrap_or(6))?,
        Suite::Ibl => {
            let w = c.max_gen.unwrap_or(6);
            let bounds = WordBounds { alphabet: graded_alphabet(n, 1), max_total_len: c.max_len.unwrap_or(6) };
            check_ibl_relations(&ThetaFamily::graded(), w, &bounds, w.saturating_sub(1))?
        }
        Suite::Functoriality => {
            let alphabet: Vec<Letter> =
                [0, 1].iter().take(n.max(1) as usize).enumerate().map(|(i, &g)| Letter::Free { id: i as u32, deg: g }).collect();
            let theta = ThetaFamily::random_table(c.d, &alphabet, 4, c.seed, 1.0);
            let mut r = check_functoriality(
                &theta,
                &alphabet,
                samples,
                c.max_gen.unwrap_or(5),
                c.max_len.unwrap_or(6),
                c.seed,
                Composer::Exact,
            )?;
            r.seed = Some(c.seed);
            r
        }
        Suite::Closure => {
            let bounds = ClosureBounds {
                max_p: 2,
                max_weight: c.max_gen.unwrap_or(5),
                max_total_len: c.max_len.unwrap_or(4),
                schedler_len: 5,
            };
            check_closure_weight(n, &bounds)?
        }
        Suite::Mc => check_mc_encoding(&ThetaFamily::darboux(), &darboux_alphabet(n), c.max_len.unwrap_or(4))?,
    };
    Ok(rep)
}

fn report_json(r: &Report) -> Value {
    let mut v = r.to_json();
    v["passed"] = Value::Bool(r.passed());
    v
}

/// One row per array element (or one row for an object); nested values are
/// written as compact JSON.
fn to_csv(v: &Value) -> Result<String, InputError> {
    let rows: Vec<&Value> = match v {
        Value::Array(a) => a.iter().collect(),
        other => vec![other],
    };
    let mut cols: Vec<String> = Vec::new();
    for r in &rows {
        if let Value::Object(o) = r {
            for k in o.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    let cell = |x: Option<&Value>| match x {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if cols.is_empty() {
        w.write_record(["value"])?;
        for r in &rows {
            w.write_record([cell(Some(r))])?;
        }
    } else {
        w.write_record(&cols)?;
        for r in &rows {
            w.write_record(cols.iter().map(|k| cell(r.get(k))))?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn emit(v: &Value, c: &Common) -> Result<(), InputError> {
    let mut text = match c.format {
        Format::Json => serde_json::to_string_pretty(v)?,
        Format::Csv => to_csv(v)?,
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &c.output {
        Some(p) => std::fs::write(p, text).map_err(|e| InputError(format!("{}: {e}", p.display())))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let c = &cli.common;
    let result = run(&cli.cmd, c).and_then(|o| match o {
        Outcome::Done(v) => emit(&v, c).map(|_| ExitCode::SUCCESS),
        Outcome::Checked(r) => {
            emit(&report_json(&r), c)?;
            Ok(if r.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    });
    match result {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("rhyper: {msg}");
            ExitCode::from(2)
        }
    }
}
