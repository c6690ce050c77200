//! Experiment configuration and the command dispatcher behind the
//! `sparse-sieve` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::{
    measure_well_distribution, sieve_lhs, theorem1_bracket, theorem1_bracket_exact, BoundReport,
    ShapeParams,
};
use crate::counting::{k_delta, ClassWindows};
use crate::error::{Error, Result};
use crate::harmonic::gauss_sum;
use crate::moduli::{
    build_moduli_set, derive_subset, enumerate_farey, read_moduli_file, ModuliKind, ModuliSet,
};
use crate::report::{emit_sweep, fmt_g17, OutputFormat, SweepRow};
use crate::sequence::{make_sequence, z_norm, SequenceKind};
use crate::verify::{run_verification, GroupResult, VerifyScale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SieveSum,
    KDelta,
    ACount,
    Farey,
    Gauss,
    Bracket,
    Shapes,
    Verify,
    Sweep,
}

/// Everything one run needs. Loaded from a TOML file whose keys match the
/// field names, then overridden by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    /// Sequence spec such as `ones`, `random_phases:7` or `file:a.txt`;
    /// sweeps accept a comma-separated list.
    pub seq: String,
    pub n: String,
    pub seed: u64,
    /// `squares`, `octave`, `primes`, `list:1,4,9` or `file:path`; the
    /// first three take their size from `q`/`q0` or an inline `:value`.
    pub moduli: String,
    /// Integer or an expression in `N` such as `N^0.3` (floored).
    pub q: Option<String>,
    pub q0: Option<f64>,
    pub eps: f64,
    /// A number, or `measure` to estimate it from the set.
    pub x: String,
    /// Intervals of the geometric `z` grid; 0 selects the exact evaluator.
    pub z_grid: usize,
    pub grid_n: Vec<String>,
    pub grid_q: Vec<String>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    pub delta: Option<f64>,
    pub u: Option<f64>,
    pub k: Option<i64>,
    pub l: Option<i64>,
    pub t: Option<u64>,
    pub c: Option<u64>,
    pub scale: VerifyScaleArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum VerifyScaleArg {
    Quick,
    #[default]
    Full,
}

impl From<VerifyScaleArg> for VerifyScale {
    fn from(v: VerifyScaleArg) -> Self {
        match v {
            VerifyScaleArg::Quick => VerifyScale::Quick,
            VerifyScaleArg::Full => VerifyScale::Full,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            seq: "ones".into(),
            n: "1024".into(),
            seed: 0,
            moduli: "squares".into(),
            q: None,
            q0: None,
            eps: 0.0,
            x: "1".into(),
            z_grid: 64,
            grid_n: Vec::new(),
            grid_q: Vec::new(),
            out: None,
            format: OutputFormat::Csv,
            threads: None,
            delta: None,
            u: None,
            k: None,
            l: None,
            t: None,
            c: None,
            scale: VerifyScaleArg::Full,
        }
    }
}

/// Command-line flags; each one set overrides the config file.
#[derive(Debug, Parser)]
#[command(
    name = "sparse-sieve",
    version,
    about = "Large sieve experiments over sparse moduli"
)]
pub struct Cli {
    /// TOML file with default settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub cmd: Option<Command>,
    #[arg(long)]
    pub seq: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub moduli: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub q0: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub z_grid: Option<usize>,
    /// Comma-separated `N` values, e.g. `2^10,2^12`.
    #[arg(long, value_delimiter = ',')]
    pub grid_n: Option<Vec<String>>,
    /// Comma-separated `Q` values or expressions, e.g. `N^0.3`.
    #[arg(long, value_delimiter = ',')]
    pub grid_q: Option<Vec<String>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<i64>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub c: Option<u64>,
    /// Instance sizes for `verify`.
    #[arg(long, value_enum)]
    pub scale: Option<VerifyScaleArg>,
}

impl Cli {
    /// The file config (if any) with every given flag applied on top.
    pub fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! over {
            ($($f:ident),*) => {$( if let Some(v) = self.$f { cfg.$f = v; } )*};
        }
        macro_rules! over_opt {
            ($($f:ident),*) => {$( if self.$f.is_some() { cfg.$f = self.$f; } )*};
        }
        over!(seq, n, seed, moduli, eps, x, z_grid, grid_n, grid_q, format, scale);
        over_opt!(q, q0, out, threads, delta, u, k, l, t, c);
        if self.cmd.is_some() {
            cfg.command = self.cmd;
        }
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// `⌊x⌋` forgiving a relative error of `10⁻¹²` below an integer, so that
/// `1024^0.3` floors to 8.
fn floor_tolerant(x: f64) -> f64 {
    let up = x.round();
    if up > x && (up - x) <= 1e-12 * up.abs().max(1.0) {
        up
    } else {
        x.floor()
    }
}

/// An integer, `a^b`, or `N^b` with `N` substituted; fractional powers are
/// floored.
pub fn parse_size(expr: &str, n: Option<f64>) -> Result<f64> {
    let s = expr.trim();
    let num = |t: &str| -> Result<f64> {
        let t = t.trim();
        if t.eq_ignore_ascii_case("n") {
            return n.ok_or_else(|| {
                Error::Config(format!("'{expr}' refers to N, which is not known here"))
            });
        }
        t.parse::<f64>()
            .map_err(|_| Error::Config(format!("cannot parse size '{expr}'")))
    };
    let v = match s.split_once('^') {
        Some((base, exp)) => floor_tolerant(num(base)?.powf(num(exp)?)),
        None => num(s)?,
    };
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::Config(format!("size '{expr}' evaluates to {v}")));
    }
    Ok(v)
}

fn parse_count(expr: &str, n: Option<f64>) -> Result<u64> {
    let v = parse_size(expr, n)?;
    if v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(Error::Config(format!("'{expr}' is not an integer count")));
    }
    Ok(v as u64)
}

/// The moduli set named by `spec`, sized by an inline value, `q`, or `q0`.
pub fn parse_moduli(
    spec: &str,
    q: Option<&str>,
    q0: Option<f64>,
    n: Option<f64>,
) -> Result<ModuliSet> {
    let (head, inline) = match spec.split_once(':') {
        Some((h, rest)) => (h.trim(), Some(rest.trim())),
        None => (spec.trim(), None),
    };
    let size = |what: &str| -> Result<u64> {
        let expr = inline.or(q).ok_or_else(|| {
            Error::Config(format!("moduli '{what}' needs a size (inline or --q)"))
        })?;
        parse_count(expr, n)
    };
    match head {
        "squares" => build_moduli_set(&ModuliKind::SquaresUpTo(size("squares")?)),
        "primes" => build_moduli_set(&ModuliKind::PrimesUpTo(size("primes")?)),
        "octave" => {
            let base = match (inline, q0) {
                (Some(expr), _) => parse_size(expr, n)?,
                (None, Some(v)) => v,
                (None, None) => {
                    return Err(Error::Config(
                        "moduli 'octave' needs Q0 (inline or --q0)".into(),
                    ))
                }
            };
            build_moduli_set(&ModuliKind::SquaresInOctave(base))
        }
        "list" => {
            let list = inline.ok_or_else(|| Error::Config("moduli 'list' needs values".into()))?;
            let mut values = list
                .split([',', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| Error::Config(format!("bad modulus '{t}'")))
                })
                .collect::<Result<Vec<u64>>>()?;
            values.sort_unstable();
            values.dedup();
            if values.first() == Some(&0) {
                return Err(Error::Config("moduli must be positive".into()));
            }
            ModuliSet::explicit(values).map_err(|e| Error::Config(e.to_string()))
        }
        "file" => {
            let path = inline.ok_or_else(|| Error::Config("moduli 'file' needs a path".into()))?;
            read_moduli_file(Path::new(path))
        }
        other => Err(Error::Config(format!("unknown moduli kind '{other}'"))),
    }
}

/// The `Q` that enters the bound shapes: the root bound for square moduli,
/// otherwise the length of the interval holding the set.
pub fn shape_q(set: &ModuliSet) -> f64 {
    match *set.kind() {
        ModuliKind::SquaresUpTo(q) => q as f64,
        ModuliKind::SquaresInOctave(q0) => (2.0 * q0).sqrt().floor(),
        _ => set.span(),
    }
}

fn octave_base(set: &ModuliSet) -> Option<f64> {
    match *set.kind() {
        ModuliKind::SquaresInOctave(q0) => Some(q0),
        _ => None,
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    /// Set by `verify` when any group failed.
    pub verification_failed: bool,
}

impl Outcome {
    fn ok(bytes: Vec<u8>) -> Self {
        Self {
            bytes,
            verification_failed: false,
        }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.verification_failed)
    }
}

/// Process exit status for an error: 2 when the request itself is invalid,
/// 3 for failures while running it.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::Domain(_)
        | Error::InvalidDelta(_)
        | Error::InvalidRegime(_)
        | Error::NotCoprime { .. }
        | Error::NotInvertible { .. }
        | Error::EmptySet(_)
        | Error::OutOfRange { .. }
        | Error::FileFormat { .. } => 2,
        Error::CapacityExceeded { .. }
        | Error::QuadratureFailure { .. }
        | Error::Io(_)
        | Error::Json(_) => 3,
    }
}

/// Runs `cfg` on a worker pool of the configured size.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cfg))
}

/// Executes `cfg` and writes its output to `cfg.out` or stdout; returns the
/// process exit status.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<i32> {
    let outcome = execute(cfg)?;
    match &cfg.out {
        Some(path) => fs::write(path, &outcome.bytes)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&outcome.bytes)?;
            stdout.flush()?;
        }
    }
    Ok(outcome.exit_code())
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("this command needs --{flag}")))
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Outcome> {
    let command = cfg
        .command
        .ok_or_else(|| Error::Config("no command given (--cmd)".into()))?;
    let json = cfg.format == OutputFormat::Json;
    let n_value = || parse_count(&cfg.n, None);
    let moduli = |n: Option<f64>| parse_moduli(&cfg.moduli, cfg.q.as_deref(), cfg.q0, n);
    let scalar = |name: &str, v: String, extra: serde_json::Value| -> Result<Outcome> {
        if json {
            let mut obj = json!({ "command": name, "value": serde_json::from_str::<serde_json::Value>(&v).unwrap_or(json!(v)) });
            if let (Some(o), Some(e)) = (obj.as_object_mut(), extra.as_object()) {
                o.extend(e.clone());
            }
            let mut b = serde_json::to_vec_pretty(&obj)?;
            b.push(b'\n');
            Ok(Outcome::ok(b))
        } else {
            Ok(Outcome::ok(format!("{v}\n").into_bytes()))
        }
    };
    match command {
        Command::SieveSum => {
            let n = n_value()?;
            let seq = make_sequence(&SequenceKind::parse(&cfg.seq, cfg.seed)?, n as usize)?;
            let set = moduli(Some(n as f64))?;
            let lhs = sieve_lhs(&seq, &set)?;
            scalar("sieve-sum", fmt_g17(lhs), json!({ "Z": seq.energy() }))
        }
        Command::KDelta => {
            let set = moduli(n_value().ok().map(|n| n as f64))?;
            let farey = enumerate_farey(&set)?;
            let k = k_delta(&farey, require(cfg.delta, "delta")?)?;
            scalar("k-delta", k.to_string(), json!({}))
        }
        Command::ACount => {
            let set = moduli(n_value().ok().map(|n| n as f64))?;
            let t = cfg.t.unwrap_or(1);
            let (k, l) = (require(cfg.k, "k")?, require(cfg.l, "l")?);
            if k < 1 {
                return Err(Error::Config("--k must be positive".into()));
            }
            let query = crate::counting::WindowQuery::new(require(cfg.u, "u")?, k as u64, l, t)?;
            let subset = derive_subset(&set, t);
            let a = ClassWindows::new(&subset, query.k(), t, set.offset(), set.span())
                .max_count(query.u(), query.l());
            scalar("a-count", a.to_string(), json!({}))
        }
        Command::Farey => {
            let set = moduli(n_value().ok().map(|n| n as f64))?;
            let farey = enumerate_farey(&set)?;
            if json {
                let list: Vec<_> = farey
                    .entries()
                    .iter()
                    .map(|f| json!({ "a": f.a, "q": f.q, "value": f.value }))
                    .collect();
                let mut b = serde_json::to_vec_pretty(&list)?;
                b.push(b'\n');
                Ok(Outcome::ok(b))
            } else {
                let mut s = String::from("a,q,value\n");
                for f in farey.entries() {
                    let _ = writeln!(s, "{},{},{}", f.a, f.q, fmt_g17(f.value));
                }
                Ok(Outcome::ok(s.into_bytes()))
            }
        }
        Command::Gauss => {
            let c = require(cfg.c, "c")?;
            let g = gauss_sum(require(cfg.k, "k")?, cfg.l.unwrap_or(0), c)?;
            let bound = (2.0 * c as f64).sqrt();
            if json {
                let obj = json!({ "command": "gauss", "re": g.re, "im": g.im, "abs": g.norm(), "bound": bound });
                let mut b = serde_json::to_vec_pretty(&obj)?;
                b.push(b'\n');
                Ok(Outcome::ok(b))
            } else {
                let s = format!(
                    "re,im,abs,bound\n{},{},{},{}\n",
                    fmt_g17(g.re),
                    fmt_g17(g.im),
                    fmt_g17(g.norm()),
                    fmt_g17(bound)
                );
                Ok(Outcome::ok(s.into_bytes()))
            }
        }
        Command::Bracket => {
            let n = n_value()?;
            let set = moduli(Some(n as f64))?;
            let br = if cfg.z_grid == 0 {
                theorem1_bracket_exact(&set, n)
            } else {
                theorem1_bracket(&set, n, cfg.z_grid)
            };
            if json {
                let mut b = serde_json::to_vec_pretty(&br)?;
                b.push(b'\n');
                Ok(Outcome::ok(b))
            } else {
                let (r, z, h) = br
                    .argmax
                    .map(|(r, z, h)| (r.to_string(), fmt_g17(z), h.to_string()))
                    .unwrap_or_default();
                let s = format!(
                    "B,shape,r,z,h\n{},{},{r},{z},{h}\n",
                    fmt_g17(br.b),
                    fmt_g17(br.shape)
                );
                Ok(Outcome::ok(s.into_bytes()))
            }
        }
        Command::Shapes => emit_sweep(&grid_rows(cfg, false)?, cfg.format).map(Outcome::ok),
        Command::Sweep => emit_sweep(&grid_rows(cfg, true)?, cfg.format).map(Outcome::ok),
        Command::Verify => {
            let summary = run_verification(cfg.scale.into(), cfg.seed)?;
            let bytes = if json {
                let mut b = serde_json::to_vec_pretty(&summary)?;
                b.push(b'\n');
                b
            } else {
                format!("{summary}\n").into_bytes()
            };
            Ok(Outcome {
                bytes,
                verification_failed: !summary.all_passed(),
            })
        }
    }
}

/// One row per `(N, Q, sequence)`; `measure` adds the sieve sum.
fn grid_rows(cfg: &ExperimentConfig, measure: bool) -> Result<Vec<SweepRow>> {
    let ns: Vec<String> = if cfg.grid_n.is_empty() {
        vec![cfg.n.clone()]
    } else {
        cfg.grid_n.clone()
    };
    let qs: Vec<Option<String>> = if cfg.grid_q.is_empty() {
        vec![cfg.q.clone()]
    } else {
        cfg.grid_q.iter().cloned().map(Some).collect()
    };
    let seqs: Vec<&str> = cfg
        .seq
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if seqs.is_empty() {
        return Err(Error::Config("sequence list is empty".into()));
    }
    let mut rows = Vec::new();
    for n_expr in &ns {
        let n = parse_count(n_expr, None)?;
        if n == 0 {
            return Err(Error::Config("N must be positive".into()));
        }
        for q_expr in &qs {
            let set = parse_moduli(&cfg.moduli, q_expr.as_deref(), cfg.q0, Some(n as f64))?;
            let x = match cfg.x.trim() {
                "measure" => measure_well_distribution(&set, n, 8),
                v => v.parse::<f64>().map_err(|_| {
                    Error::Config(format!("--x must be a number or 'measure', got '{v}'"))
                })?,
            };
            let params = ShapeParams {
                n: n as f64,
                q: shape_q(&set),
                s_count: set.len() as f64,
                q0: cfg.q0.or(octave_base(&set)),
                eps: cfg.eps,
                x,
            };
            for spec in &seqs {
                let kind = SequenceKind::parse(spec, cfg.seed)?;
                let (z, lhs) = if measure {
                    let seq = make_sequence(&kind, n as usize)?;
                    (z_norm(&seq).powi(2), Some(sieve_lhs(&seq, &set)?))
                } else {
                    (energy_without_values(&kind, n)?, None)
                };
                rows.push(SweepRow {
                    sequence: kind.label(),
                    s_count: set.len() as u64,
                    report: BoundReport::new(&params, z, lhs)?,
                });
            }
        }
    }
    Ok(rows)
}

/// `Z` for shape-only rows, without materializing huge sequences when the
/// answer is known in closed form.
fn energy_without_values(kind: &SequenceKind, n: u64) -> Result<f64> {
    match kind {
        SequenceKind::Ones
        | SequenceKind::RandomSigns(_)
        | SequenceKind::RandomPhases(_)
        | SequenceKind::Focused(_) => Ok(n as f64),
        SequenceKind::Delta(m) if *m >= 1 && *m <= n => Ok(1.0),
        _ => Ok(make_sequence(kind, n as usize)?.energy()),
    }
}

/// The sweep used to check byte-identical output across thread counts.
pub fn determinism_config(scale: VerifyScale) -> ExperimentConfig {
    let grid_n = match scale {
        VerifyScale::Full => vec!["2^10", "2^11", "2^12"],
        VerifyScale::Quick => vec!["2^10", "2^11"],
    };
    ExperimentConfig {
        command: Some(Command::Sweep),
        seq: "ones,random_phases".into(),
        seed: 7,
        moduli: "squares".into(),
        grid_n: grid_n.into_iter().map(String::from).collect(),
        grid_q: vec!["N^0.3".into()],
        ..ExperimentConfig::default()
    }
}

pub fn determinism_group(scale: VerifyScale) -> Result<GroupResult> {
    let base = determinism_config(scale);
    let run = |threads: usize| {
        execute(&ExperimentConfig {
            threads: Some(threads),
            ..base.clone()
        })
    };
    let one = run(1)?;
    let mut passed = 0;
    let mut failures = Vec::new();
    for threads in [2usize, 8] {
        if run(threads)?.bytes == one.bytes {
            passed += 1;
        } else {
            failures.push(format!("{threads} threads differ from 1 thread"));
        }
    }
    Ok(GroupResult {
        module: "cli".into(),
        name: "determinism".into(),
        passed,
        total: 2,
        failures,
        notes: Vec::new(),
    })
}
