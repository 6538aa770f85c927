//! Command-line driver for `pbsum-core`.
//!
//! Exit status: 0 on success, 1 when a verification, comparison or derivation
//! produces a negative result, 2 on usage errors and unknown names.

pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::mpsc;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pbsum_core::algebra::{cos_power_centered, cos_power_vector};
use pbsum_core::discovery::{derive_profile, ProfileStatus, RowKind};
use pbsum_core::identities::{
    builtin_registry, export_json, import_json, lhs_eval, rhs_eval, verify, Identity, Lin,
    OracleRef, Status, DEFAULT_N_MAX,
};
use pbsum_core::oeis::{self, FetchOptions};
use pbsum_core::sequences::{key, registry};
use rayon::prelude::*;
use serde::Serialize;

use report::{CospowReport, DeriveReport, OeisReport, Summary, TableReport, VerifyEntry, VerifyReport};

#[derive(Debug, Parser)]
#[command(name = "pbsum", version, about = "Periodic weighted binomial sum identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify registry identities with exact arithmetic.
    Verify(VerifyArgs),
    /// Print the first terms of a sequence.
    Table(TableArgs),
    /// Recover a periodic weight profile for a target sequence.
    Derive(DeriveArgs),
    /// Compare a sequence with an OEIS b-file.
    OeisCheck(OeisArgs),
    /// Print `(z^e + z^-e)^p` in `Z[z]/(z^N - 1)`.
    Cospow(CospowArgs),
    /// Write the identity registry as JSON.
    Export,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Family id or instance id such as `genlucas-even(m=3)`.
    #[arg(long, conflicts_with = "all")]
    pub identity: Option<String>,
    /// Verify every identity (the default).
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = DEFAULT_N_MAX, value_parser = clap::value_parser!(i64).range(1..))]
    pub n_max: i64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(0..))]
    pub n_min: i64,
    /// One entry per parameter instance instead of per family.
    #[arg(long)]
    pub instances: bool,
    /// Verify identities from a JSON document instead of the registry.
    #[arg(long, value_name = "FILE")]
    pub import: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Sequence name, optionally with parameters: `genlucas(3)`.
    #[arg(long)]
    pub sequence: String,
    /// Parameter of a parametric sequence.
    #[arg(long)]
    pub m: Option<i64>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub count: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Row {
    Even,
    Odd,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub m: Option<i64>,
    /// Index of the target as `a*n + c`, for example `2n+1`.
    #[arg(long, default_value = "n", value_parser = parse_index)]
    pub index: Lin,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub period: u32,
    #[arg(long, value_enum, default_value_t = Row::Even)]
    pub row: Row,
    /// Inclusive range of `n`, written `A..B`; defaults to `0..P+5`.
    #[arg(long, value_parser = parse_range)]
    pub solve_range: Option<(i64, i64)>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct OeisArgs {
    #[arg(long)]
    pub sequence: String,
    #[arg(long)]
    pub m: Option<i64>,
    #[arg(long)]
    pub id: String,
    /// Read the b-file from disk.
    #[arg(long, value_name = "PATH", conflicts_with = "fetch")]
    pub bfile: Option<PathBuf>,
    /// Download the b-file when it is not cached.
    #[arg(long)]
    pub fetch: bool,
    #[arg(long, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CospowArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub modulus: u32,
    #[arg(long)]
    pub exp: i64,
    #[arg(long)]
    pub power: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn parse_index(s: &str) -> Result<Lin, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("expected an index like `2n+1`, got `{s}`");
    let Some(pos) = t.find('n') else {
        return t.parse().map(Lin::constant).map_err(|_| bad());
    };
    let a = match &t[..pos] {
        "" | "+" => 1,
        "-" => -1,
        a => a.parse().map_err(|_| bad())?,
    };
    let c = match &t[pos + 1..] {
        "" => 0,
        c if c.starts_with('+') || c.starts_with('-') => c.parse().map_err(|_| bad())?,
        _ => return Err(bad()),
    };
    Ok(Lin::of_n(a, c))
}

/// Splits `name(3,4)` into its name and parameters; `--m` appends one more.
pub fn parse_sequence(spec: &str, m: Option<i64>) -> Result<(String, Vec<i64>), CliError> {
    let (name, mut params) = match spec.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| CliError::usage(format!("unbalanced parentheses in `{spec}`")))?;
            let params = inner
                .split(',')
                .map(|p| p.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::usage(format!("bad parameter in `{spec}`: {e}")))?;
            (name.to_string(), params)
        }
        None => (spec.to_string(), Vec::new()),
    };
    params.extend(m);
    Ok((name, params))
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: String) -> Self {
        CliError { code: 2, message }
    }
}

impl From<pbsum_core::Error> for CliError {
    fn from(e: pbsum_core::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, out),
        Command::Table(a) => cmd_table(a, out),
        Command::Derive(a) => cmd_derive(a, out),
        Command::OeisCheck(a) => cmd_oeis(a, out),
        Command::Cospow(a) => cmd_cospow(a, out),
        Command::Export => cmd_export(out),
    };
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

/// Identities checked together and reported as one entry.
struct Group {
    id: String,
    members: Vec<Identity>,
}

fn select(identities: Vec<Identity>, args: &VerifyArgs) -> Result<Vec<Group>, CliError> {
    if let Some(want) = &args.identity {
        if let Some(one) = identities.iter().find(|i| &i.id == want) {
            return Ok(vec![Group {
                id: one.id.clone(),
                members: vec![one.clone()],
            }]);
        }
        let members: Vec<Identity> = identities.into_iter().filter(|i| &i.family == want).collect();
        if members.is_empty() {
            return Err(CliError::usage(format!("unknown identity `{want}`")));
        }
        return Ok(vec![Group {
            id: want.clone(),
            members,
        }]);
    }
    let mut groups: Vec<Group> = Vec::new();
    for identity in identities {
        let id = if args.instances { &identity.id } else { &identity.family };
        match groups.iter_mut().find(|g| &g.id == id) {
            Some(g) => g.members.push(identity),
            None => groups.push(Group {
                id: id.clone(),
                members: vec![identity],
            }),
        }
    }
    Ok(groups)
}

fn check_group(group: &Group, lo: i64, hi: i64) -> VerifyEntry {
    let reports: Vec<_> = group.members.iter().map(|i| verify(i, lo, hi)).collect();
    let failing = reports.iter().position(|r| !r.passed());
    let first_divergence = failing.and_then(|i| reports[i].first_divergence.clone());
    let (lhs, rhs) = match &first_divergence {
        Some(d) => (Some(d.lhs.clone()), Some(d.rhs.clone())),
        None => {
            let top = reports[0].range[1];
            let show = |v: pbsum_core::Result<_>| v.ok().map(|v: pbsum_core::identities::Evaluated| v.to_string());
            if reports[0].checked == 0 {
                (None, None)
            } else {
                (show(lhs_eval(&group.members[0], top)), show(rhs_eval(&group.members[0], top)))
            }
        }
    };
    VerifyEntry {
        id: group.id.clone(),
        domain: reports[0].domain.clone(),
        status: if failing.is_some() { Status::Fail } else { Status::Pass },
        first_divergence,
        lhs,
        rhs,
        millis: reports.iter().map(|r| r.millis).sum(),
        instances: reports.len(),
        range: [
            reports.iter().map(|r| r.range[0]).min().unwrap_or(lo),
            reports.iter().map(|r| r.range[1]).max().unwrap_or(hi),
        ],
        checked: reports.iter().map(|r| r.checked).sum(),
        failing_instance: failing.filter(|_| reports.len() > 1).map(|i| reports[i].id.clone()),
    }
}

#[derive(Serialize)]
struct CsvEntry<'a> {
    id: &'a str,
    domain: &'a str,
    status: &'a str,
    first_divergence: Option<i64>,
    lhs: &'a str,
    rhs: &'a str,
    millis: u64,
    instances: usize,
    range_start: i64,
    range_end: i64,
    checked: usize,
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
    }
}

fn text_line(out: &mut dyn Write, e: &VerifyEntry) -> io::Result<()> {
    write!(
        out,
        "{} {:<32} {:<16} n={}..{} checked={} {}ms",
        status_word(e.status),
        e.id,
        e.domain,
        e.range[0],
        e.range[1],
        e.checked,
        e.millis
    )?;
    if e.instances > 1 {
        write!(out, " instances={}", e.instances)?;
    }
    writeln!(out)?;
    if let Some(d) = &e.first_divergence {
        if let Some(inst) = &e.failing_instance {
            writeln!(out, "     in {inst}")?;
        }
        writeln!(out, "     first divergence at n={}: lhs={} rhs={}", d.n, d.lhs, d.rhs)?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.n_min > args.n_max {
        return Err(CliError::usage(format!("--n-min {} exceeds --n-max {}", args.n_min, args.n_max)));
    }
    let identities = match &args.import {
        Some(path) => import_json(&fs::read_to_string(path)?)?,
        None => builtin_registry(),
    };
    let groups = select(identities, args)?;
    let (lo, hi) = (args.n_min, args.n_max);

    let mut csv_header = true;
    let (tx, rx) = mpsc::channel();
    let entries = thread::scope(|scope| -> Result<Vec<VerifyEntry>, CliError> {
        let groups = &groups;
        scope.spawn(move || {
            groups.par_iter().enumerate().for_each_with(tx, |tx, (i, g)| {
                let _ = tx.send((i, check_group(g, lo, hi)));
            });
        });
        let mut pending = BTreeMap::new();
        let mut entries = Vec::with_capacity(groups.len());
        for (i, entry) in rx {
            pending.insert(i, entry);
            while let Some(entry) = pending.remove(&entries.len()) {
                match args.format {
                    Format::Text => text_line(out, &entry)?,
                    Format::Csv => {
                        let mut w = csv::WriterBuilder::new().has_headers(csv_header).from_writer(Vec::new());
                        csv_header = false;
                        w.serialize(CsvEntry {
                            id: &entry.id,
                            domain: &entry.domain,
                            status: status_word(entry.status),
                            first_divergence: entry.first_divergence.as_ref().map(|d| d.n),
                            lhs: entry.lhs.as_deref().unwrap_or(""),
                            rhs: entry.rhs.as_deref().unwrap_or(""),
                            millis: entry.millis,
                            instances: entry.instances,
                            range_start: entry.range[0],
                            range_end: entry.range[1],
                            checked: entry.checked,
                        })?;
                        out.write_all(&w.into_inner().map_err(|e| CliError::usage(e.to_string()))?)?;
                    }
                    Format::Json => {}
                }
                out.flush()?;
                entries.push(entry);
            }
        }
        Ok(entries)
    })?;

    let pass = entries.iter().filter(|e| e.status == Status::Pass).count();
    let summary = Summary {
        pass,
        fail: entries.len() - pass,
    };
    match args.format {
        Format::Text => {
            let word = if summary.fail == 0 { "PASS" } else { "FAIL" };
            writeln!(out, "{word} {}/{}", summary.pass, entries.len())?;
        }
        Format::Json => write_json(
            out,
            &VerifyReport {
                command: "verify".into(),
                entries,
                summary,
            },
        )?,
        Format::Csv => {}
    }
    Ok(if summary.fail == 0 { 0 } else { 1 })
}

fn cmd_table(args: &TableArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (name, params) = parse_sequence(&args.sequence, args.m)?;
    let oracle = registry().get(&name, &params)?;
    let start = oracle.start();
    let values = (start..start + i64::from(args.count))
        .map(|n| oracle.eval(n).map(|v| v.to_string()))
        .collect::<pbsum_core::Result<Vec<_>>>()?;
    match args.format {
        Format::Text => writeln!(out, "{}", values.join(", "))?,
        Format::Json => write_json(
            out,
            &TableReport {
                command: "table".into(),
                sequence: key(&name, &params),
                start,
                values,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "value"])?;
            for (i, v) in values.iter().enumerate() {
                w.write_record([(start + i as i64).to_string(), v.clone()])?;
            }
            out.write_all(&w.into_inner().map_err(|e| CliError::usage(e.to_string()))?)?;
        }
    }
    Ok(0)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn cmd_derive(args: &DeriveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (name, params) = parse_sequence(&args.target, args.m)?;
    registry().get(&name, &params)?;
    let target = OracleRef::new(&name, args.index)
        .with_params(params.iter().map(|&p| Lin::constant(p)).collect());
    let period = args.period as usize;
    let row = match args.row {
        Row::Even => RowKind::Even,
        Row::Odd => RowKind::Odd,
    };
    let solve = args.solve_range.unwrap_or((0, period as i64 + 5));
    let solution = derive_profile(&target, period, row, solve)?;
    let unique = solution.status == ProfileStatus::Unique;
    let identity = unique.then(|| solution.to_identity());
    match args.format {
        Format::Text => {
            let row_word = match args.row {
                Row::Even => "even",
                Row::Odd => "odd",
            };
            writeln!(out, "target   {}[{}], period {period}, {row_word} row", key(&name, &params), args.index)?;
            let status = match &solution.status {
                ProfileStatus::Unique => "unique".to_string(),
                ProfileStatus::Underdetermined { dimension } => format!("underdetermined, dimension {dimension}"),
                ProfileStatus::Infeasible { violated_n } => format!("infeasible at n={violated_n}"),
            };
            writeln!(out, "status   {status}")?;
            if row == RowKind::Even {
                writeln!(out, "center   {}", solution.center)?;
            }
            writeln!(out, "weights  {}", join(&solution.weights))?;
            for v in &solution.nullspace {
                writeln!(out, "kernel   {}", join(v))?;
            }
            writeln!(
                out,
                "solved   n={}..{}, held out n={}..{} ({} checked)",
                solution.solve_range[0],
                solution.solve_range[1],
                solution.held_out_range[0],
                solution.held_out_range[1],
                solution.held_out_checked
            )?;
            if let Some(identity) = &identity {
                writeln!(out, "identity")?;
                write_json(out, identity)?;
            }
        }
        Format::Json => write_json(
            out,
            &DeriveReport {
                command: "derive".into(),
                solution,
                identity,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["residue", "weight"])?;
            if row == RowKind::Even {
                w.write_record(["center".to_string(), solution.center.to_string()])?;
            }
            for (k, v) in solution.weights.iter().enumerate() {
                w.write_record([k.to_string(), v.to_string()])?;
            }
            out.write_all(&w.into_inner().map_err(|e| CliError::usage(e.to_string()))?)?;
        }
    }
    Ok(if unique { 0 } else { 1 })
}

fn cmd_oeis(args: &OeisArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (name, params) = parse_sequence(&args.sequence, args.m)?;
    oeis::validate_id(&args.id)?;
    let mut opts = FetchOptions::from_env();
    if let Some(dir) = &args.cache_dir {
        opts.cache_dir = dir.clone();
    }
    let table = match &args.bfile {
        Some(path) => oeis::parse_bfile(&args.id, &fs::read_to_string(path)?, &path.display().to_string())?,
        None if args.fetch => {
            opts.network = true;
            oeis::fetch(&args.id, &opts)?
        }
        None => match oeis::bundled(&args.id) {
            Some(t) => t,
            None => oeis::fetch(&args.id, &opts)?,
        },
    };
    let alignment = oeis::compare(registry(), &name, &params, &table, args.count)?;
    let ok = alignment.is_match;
    let report = OeisReport {
        command: "oeis-check".into(),
        sequence: key(&name, &params),
        source: table.source.clone(),
        count: args.count,
        alignment,
    };
    match args.format {
        Format::Text => {
            let a = &report.alignment;
            writeln!(
                out,
                "{} {} vs {}: {}/{} terms agree at shift {} ({})",
                if ok { "MATCH" } else { "MISMATCH" },
                report.sequence,
                a.id,
                a.matched,
                a.compared,
                a.shift,
                report.source
            )?;
            if let Some(m) = &a.first_mismatch {
                writeln!(out, "     first mismatch at n={}: local {} b-file {}", m.index, m.local, m.bfile)?;
            }
        }
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            let a = &report.alignment;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["sequence", "id", "shift", "matched", "compared", "is_match", "first_mismatch"])?;
            w.write_record([
                report.sequence.clone(),
                a.id.clone(),
                a.shift.to_string(),
                a.matched.to_string(),
                a.compared.to_string(),
                a.is_match.to_string(),
                a.first_mismatch.as_ref().map(|m| m.index.to_string()).unwrap_or_default(),
            ])?;
            out.write_all(&w.into_inner().map_err(|e| CliError::usage(e.to_string()))?)?;
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_cospow(args: &CospowArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let modulus = args.modulus as usize;
    let v = cos_power_vector(modulus, args.exp, args.power);
    let agrees = v == cos_power_centered(modulus, args.exp, args.power);
    let coeffs: Vec<String> = v.coeffs().iter().map(|c| c.to_string()).collect();
    match args.format {
        Format::Text => {
            writeln!(out, "[{}]", coeffs.join(", "))?;
            writeln!(out, "centered expansion {}", if agrees { "agrees" } else { "differs" })?;
        }
        Format::Json => write_json(
            out,
            &CospowReport {
                command: "cospow".into(),
                modulus,
                exp: args.exp,
                power: args.power,
                coeffs,
                centered_agrees: agrees,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["exponent", "coefficient"])?;
            for (i, c) in coeffs.iter().enumerate() {
                w.write_record([i.to_string(), c.clone()])?;
            }
            out.write_all(&w.into_inner().map_err(|e| CliError::usage(e.to_string()))?)?;
        }
    }
    Ok(if agrees { 0 } else { 1 })
}

fn cmd_export(out: &mut dyn Write) -> Result<i32, CliError> {
    writeln!(out, "{}", export_json(&builtin_registry()))?;
    Ok(0)
}
