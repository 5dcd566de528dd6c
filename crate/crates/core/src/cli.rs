//! Command-line surface. Results go to stdout as JSON lines (rationals as
//! strings, sets as DSL text); a short human summary goes to stderr.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad input
//! (parse/validation/precondition errors, or an instance the exact
//! procedures cannot decide).

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebra::{self, RankVector};
use crate::constructions::{self, Word};
use crate::dsl::{parse, render};
use crate::error::{Error, Result};
use crate::expr::{MaybeSet, SetExpr};
use crate::oracle;
use crate::points_file::read_points;
use crate::rat::Rat;
use crate::topology;

#[derive(Parser, Debug)]
#[command(
    name = "cbset",
    version,
    about = "Exact topology of countable subsets of the line"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Cantor–Bendixson rank of the closure.
    Rank {
        expr: String,
    },
    /// Derived set of a closed set.
    Lpt {
        expr: String,
    },
    /// Isolated points.
    Iso {
        expr: String,
    },
    Closure {
        expr: String,
    },
    /// Closed / discrete / compact flags and accumulation points.
    Props {
        expr: String,
    },
    /// Depth-truncated enumeration.
    Enum {
        expr: String,
        #[arg(long, default_value_t = oracle::DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Piece bound for factors that are unions of N_i + 1 discrete sets.
    Kbound {
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<u32>,
    },
    /// Discrete decomposition of b_1 E_1 + ... + b_m E_m.
    Limage {
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        coeffs: Vec<String>,
        #[arg(required = true)]
        exprs: Vec<String>,
    },
    /// Split Y + Z (compact plus tail) into ordered discrete families.
    CombineTail {
        y: String,
        z: String,
        /// Index window A..B.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Randomized check of linear images of E^n.
    Hypothesis {
        expr: String,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Ex1 {
        #[command(subcommand)]
        cmd: Ex1Cmd,
    },
    Cantor {
        #[command(subcommand)]
        cmd: CantorCmd,
    },
}

#[derive(Subcommand, Debug)]
enum Ex1Cmd {
    Encode {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        points: PathBuf,
    },
    Decode {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        points: PathBuf,
    },
    Claim {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        max_index: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CantorCmd {
    Gen {
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        max_k: u64,
    },
    Verify {
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        max_k: u64,
    },
    Witness {
        #[arg(long, value_delimiter = ',', required = true)]
        sigma: Vec<u8>,
        #[arg(long)]
        k: usize,
    },
}

/// Collected output of one invocation.
#[derive(Debug, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn record(&mut self, v: Value) {
        self.stdout.push_str(&v.to_string());
        self.stdout.push('\n');
    }

    fn note(&mut self, s: impl AsRef<str>) {
        self.stderr.push_str(s.as_ref());
        self.stderr.push('\n');
    }

    fn fail_if(&mut self, bad: bool) {
        if bad {
            self.code = 1;
        }
    }
}

pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let mut out = Output::default();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                out.stdout = text;
            } else {
                out.stderr = text;
            }
            out.code = code;
            return out;
        }
    };
    if let Err(e) = dispatch(cli.cmd, &mut out) {
        out.code = match e {
            Error::Construction(_) => 1,
            _ => 2,
        };
        out.note(format!("error: {e}"));
    }
    out
}

fn rs(x: &Rat) -> Value {
    Value::String(x.to_string())
}

fn rats(xs: &[Rat]) -> Value {
    Value::Array(xs.iter().map(rs).collect())
}

fn set(e: &MaybeSet) -> Value {
    match e {
        Some(e) => Value::String(render(e)),
        None => Value::Null,
    }
}

fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse()
        .map_err(|e| Error::Validation(format!("bad rational '{s}': {e}")))
}

fn parse_window(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Validation(format!("window must look like A..B, got '{s}'"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn dispatch(cmd: Cmd, out: &mut Output) -> Result<()> {
    match cmd {
        Cmd::Rank { expr } => {
            let r = topology::rank(&parse(&expr)?)?;
            out.record(json!({ "rank": r }));
            out.note(format!("rank {r}"));
        }
        Cmd::Lpt { expr } => {
            let l = topology::lpt_set(&parse(&expr)?)?;
            out.record(json!({ "lpt": set(&l) }));
        }
        Cmd::Iso { expr } => {
            let i = topology::iso_points(&parse(&expr)?)?;
            out.record(json!({ "iso": render(&i) }));
        }
        Cmd::Closure { expr } => {
            let c = topology::closure(&parse(&expr)?)?;
            out.record(json!({ "closure": render(&c) }));
        }
        Cmd::Props { expr } => {
            let f = topology::topo_facts(&parse(&expr)?)?;
            out.record(json!({
                "closed": f.is_closed,
                "discrete": f.is_discrete,
                "compact": f.is_compact,
                "acc": set(&f.acc),
                "rank": f.rank,
            }));
        }
        Cmd::Enum { expr, depth } => {
            let en = oracle::enumerate(&parse(&expr)?, depth)?;
            out.record(json!({
                "depth": depth,
                "points": rats(&en.points),
                "tail_bound": en.tail_bound.as_ref().map(rs),
            }));
            out.note(format!("{} points", en.points.len()));
        }
        Cmd::Kbound { ranks } => {
            let k = algebra::kbound(&RankVector::new(ranks)?)?;
            out.record(json!({ "K": k }));
        }
        Cmd::Limage { coeffs, exprs } => {
            let b: Vec<Rat> = coeffs.iter().map(|c| parse_rat(c)).collect::<Result<_>>()?;
            let es: Vec<SetExpr> = exprs.iter().map(|e| parse(e)).collect::<Result<_>>()?;
            let plan = algebra::linear_image_decompose(&es, &b)?;
            for p in &plan.pieces {
                out.record(json!({
                    "label": p.label(),
                    "set": render(&p.set),
                    "discrete": p.discrete,
                }));
            }
            let ok = plan.all_discrete() && plan.pieces.len() as u64 <= plan.k;
            out.record(json!({
                "K": plan.k,
                "pieces": plan.pieces.len(),
                "image": render(&plan.image),
                "pass": ok,
            }));
            out.note(format!(
                "{} pieces (bound {}), {}",
                plan.pieces.len(),
                plan.k,
                if ok { "all discrete" } else { "CHECK FAILED" }
            ));
            out.fail_if(!ok);
        }
        Cmd::CombineTail { y, z, window } => {
            let w = window.as_deref().map(parse_window).transpose()?;
            let plan = algebra::tail_combine(&parse(&y)?, &parse(&z)?, w)?;
            let families: Vec<Value> = plan
                .families
                .iter()
                .map(|f| {
                    json!({
                        "residue": f.residue,
                        "indices": f.indices,
                        "pieces": f.pieces.iter().map(render).collect::<Vec<_>>(),
                        "discrete": f.discrete,
                    })
                })
                .collect();
            let discrete = plan.families.iter().all(|f| f.discrete.iter().all(|&b| b));
            out.record(json!({
                "shift": rs(&plan.shift),
                "d": rs(&plan.d),
                "N": rs(&plan.n),
                "M": plan.m,
                "iota": plan.iota_offsets.iter().map(|(n, x)| json!([n, rs(x)])).collect::<Vec<_>>(),
                "families": families,
                "ordering_holds": plan.ordering_holds(),
                "ordering_violations": plan.ordering_violations,
            }));
            out.note(format!(
                "d = {}, N = {}, M = {}, ordering {}",
                plan.d,
                plan.n,
                plan.m,
                if plan.ordering_holds() {
                    "holds"
                } else {
                    "FAILS"
                }
            ));
            out.fail_if(!plan.ordering_holds() || !discrete);
        }
        Cmd::Hypothesis {
            expr,
            arity,
            trials,
            seed,
        } => {
            let r = algebra::hypothesis_check(&parse(&expr)?, arity, trials, seed)?;
            for t in &r.trials {
                out.record(json!({
                    "trial": t.index,
                    "coeffs": rats(&t.coeffs),
                    "K": t.k,
                    "pieces": t.pieces,
                    "discrete": t.all_discrete,
                    "closed": t.closed,
                    "pass": t.pass,
                    "error": t.error,
                }));
            }
            out.record(json!({ "pass": r.pass() }));
            let failed = r.trials.iter().filter(|t| !t.pass).count();
            out.note(format!("{} trials, {failed} failed", r.trials.len()));
            out.fail_if(!r.pass());
        }
        Cmd::Ex1 { cmd } => ex1(cmd, out)?,
        Cmd::Cantor { cmd } => cantor(cmd, out)?,
    }
    Ok(())
}

fn ex1(cmd: Ex1Cmd, out: &mut Output) -> Result<()> {
    match cmd {
        Ex1Cmd::Encode { bound, points } => {
            let inst = constructions::ex1_encode(bound, &read_points(&points)?)?;
            out.record(json!({ "N": bound, "a": rats(&inst.a) }));
            out.note(format!("{} terms", inst.a.len()));
        }
        Ex1Cmd::Decode { bound, points } => {
            let d: Vec<Rat> = constructions::ex1_decode(bound, &read_points(&points)?)
                .into_iter()
                .collect();
            out.record(json!({ "N": bound, "d": rats(&d) }));
            out.note(format!("{} points", d.len()));
        }
        Ex1Cmd::Claim {
            bound,
            points,
            max_index,
        } => {
            let r = constructions::ex1_claim_check(bound, &read_points(&points)?, max_index)?;
            out.record(json!({
                "pairs_checked": r.pairs_checked,
                "violations": r.violations,
                "holds": r.holds(),
            }));
            out.note(format!(
                "{} pairs, {} violations",
                r.pairs_checked,
                r.violations.len()
            ));
            out.fail_if(!r.holds());
        }
    }
    Ok(())
}

fn cantor(cmd: CantorCmd, out: &mut Output) -> Result<()> {
    match cmd {
        CantorCmd::Gen { max_len, max_k } => {
            let inst = constructions::cantor_build(max_len, max_k)?;
            for r in &inst.records {
                out.record(json!({
                    "word": r.word.digits(),
                    "u": rs(&r.u),
                    "v": rs(&r.v),
                    "interval": [rs(&r.interval.0), rs(&r.interval.1)],
                    "points": rats(&r.points),
                }));
            }
            out.note(format!("{} words", inst.records.len()));
        }
        CantorCmd::Verify { max_len, max_k } => {
            let r = constructions::cantor_verify(max_len, max_k)?;
            out.record(json!({
                "words": r.words,
                "points": r.points,
                "containment_violations": r.containment_violations,
                "disjointness_violations": r.disjointness_violations,
                "range_violations": r.range_violations,
                "density_violations": r.density_violations,
                "witness_violations": r.witness_violations,
                "pass": r.pass(),
            }));
            out.note(format!(
                "{} words, {} points: {}",
                r.words,
                r.points,
                if r.pass() {
                    "all checks pass"
                } else {
                    "CHECKS FAILED"
                }
            ));
            out.fail_if(!r.pass());
        }
        CantorCmd::Witness { sigma, k } => {
            let w = Word::new(sigma)?;
            let t = constructions::non_isolation_witness(&w, k)?;
            let gap = (t.v() - w.v()).abs();
            let bound = constructions::cantor::witness_bound(w.len(), k);
            out.record(json!({
                "witness": t.digits(),
                "v": rs(&t.v()),
                "gap": rs(&gap),
                "bound": rs(&bound),
            }));
            out.fail_if(gap > bound || gap.is_zero());
        }
    }
    Ok(())
}
