//! `mv2`: encode, decode, verify and inspect multi-radix recodings.
//!
//! Exit status: 0 success, 1 usage error, 2 data or corruption error,
//! 3 verification regression.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mv2::analytics::{self, FormulaSet, Ratio};
use mv2::verify::with_decimal;
use mv2::{
    decode_pipeline, emit, encode_pipeline, ingest, CloneId, CodeBook, Container, InputFormat,
    PipelineParams, Radix, Width,
};

#[derive(Parser)]
#[command(name = "mv2", version, about = "Multi-radix MV2 recoding codecs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recode a file into a container.
    Encode(EncodeArgs),
    /// Rebuild the original file from a container.
    Decode(DecodeArgs),
    /// Check every closed-form quantity against the codecs on the main file.
    Verify(VerifyArgs),
    /// Print the closed-form ratios, flag lengths and growth model.
    Analytics(AnalyticsArgs),
    /// Print the shortest-first codebook.
    Codebook(CodebookArgs),
}

#[derive(Args)]
struct Shape {
    #[arg(long, short = 'p', default_value_t = 2)]
    radix: u64,
    #[arg(long, short = 'n', default_value_t = 8)]
    width: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Bytes,
    Digits,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long, short = 'c', value_parser = clap::value_parser!(u8).range(1..=3), default_value_t = 1)]
    clone: u8,
    #[arg(long, short = 'm', value_parser = clap::value_parser!(u8).range(1..), default_value_t = 1)]
    rounds: u8,
    #[arg(long, value_enum, default_value = "bytes")]
    input_format: FormatArg,
    #[arg(long)]
    json: bool,
    input: PathBuf,
    output: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    input: PathBuf,
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    shape: Shape,
    /// Restrict to one clone.
    #[arg(long, short = 'c', value_parser = clap::value_parser!(u8).range(1..=3))]
    clone: Option<u8>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AnalyticsArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long, short = 'm', value_parser = clap::value_parser!(u32).range(1..=1000), default_value_t = 10)]
    rounds: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CodebookArgs {
    #[command(flatten)]
    shape: Shape,
    /// Number of rows to print after the histogram.
    #[arg(long, default_value_t = 16)]
    limit: u64,
    #[arg(long)]
    json: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<mv2::Error> for Failure {
    fn from(e: mv2::Error) -> Self {
        let code = if e.is_usage() { 1 } else { 2 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ExitCode> = Result<T, Failure>;

// Output goes to a pipe that may close early (`mv2 verify | head`); stop
// writing quietly instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Verify(a) => verify(a),
        Command::Analytics(a) => analytics(a),
        Command::Codebook(a) => codebook(a),
    };
    outcome.unwrap_or_else(|f| {
        eprintln!("error: {}", f.message);
        ExitCode::from(f.code)
    })
}

fn shape(s: &Shape) -> CliResult<(Radix, Width)> {
    Ok((Radix::new(s.radix)?, Width::new(s.width)?))
}

fn print_json(v: &serde_json::Value) {
    out!(
        "{}",
        serde_json::to_string_pretty(v).expect("json values serialize")
    );
}

fn encode(a: EncodeArgs) -> CliResult {
    let (radix, width) = shape(&a.shape)?;
    let clone_id = CloneId::try_from(a.clone)?;
    let format = match a.input_format {
        FormatArg::Bytes => InputFormat::Bytes,
        FormatArg::Digits => InputFormat::Digits,
    };
    let params = PipelineParams::new(radix, width, clone_id, a.rounds, format)?;
    let bytes = fs::read(&a.input)
        .map_err(|e| Failure::data(format!("reading {}: {e}", a.input.display())))?;
    let input = ingest(&bytes, format, radix)?;
    let container = encode_pipeline(&input, &params)?;
    let out = container.serialize()?;
    fs::write(&a.output, &out)
        .map_err(|e| Failure::data(format!("writing {}: {e}", a.output.display())))?;

    let input_pits = input.len();
    let total = container.total_pits();
    let ratio = |x: usize| (input_pits > 0).then(|| Ratio::new(x as u64, input_pits as u64));
    if a.json {
        let rounds: Vec<_> = container
            .rounds
            .iter()
            .enumerate()
            .map(|(i, r)| {
                json!({
                    "round": i + 1,
                    "pad": r.pad_count,
                    "flag_len": r.flag_len.len(),
                    "flag_msb": r.flag_msb.as_ref().map_or(0, |s| s.len()),
                })
            })
            .collect();
        print_json(&json!({
            "clone": clone_id.number(),
            "radix": radix.get(),
            "width": width.get(),
            "input_pits": input_pits,
            "remainder": container.remainder.len(),
            "rounds": rounds,
            "total": total,
            "remainder_ratio": ratio(container.remainder.len()).map(|r| r.to_string()),
            "total_ratio": ratio(total).map(|r| r.to_string()),
            "container_bytes": out.len(),
        }));
    } else {
        out!("{clone_id}, p={radix}, n={width}, {} round(s)", a.rounds);
        out!("input pits:     {input_pits}");
        for (i, r) in container.rounds.iter().enumerate() {
            match &r.flag_msb {
                Some(msb) => out!(
                    "round {:>3}: pad {}, flag_len {}, flag_msb {}",
                    i + 1,
                    r.pad_count,
                    r.flag_len.len(),
                    msb.len()
                ),
                None => out!(
                    "round {:>3}: pad {}, flag_len {}",
                    i + 1,
                    r.pad_count,
                    r.flag_len.len()
                ),
            }
        }
        out!("remainder pits: {}", container.remainder.len());
        out!("total pits:     {total}");
        if let (Some(k), Some(t)) = (ratio(container.remainder.len()), ratio(total)) {
            out!("remainder ratio {}", with_decimal(&k));
            out!("total ratio     {}", with_decimal(&t));
        }
        out!("container bytes {}", out.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn decode(a: DecodeArgs) -> CliResult {
    let bytes = fs::read(&a.input)
        .map_err(|e| Failure::data(format!("reading {}: {e}", a.input.display())))?;
    let container = Container::parse(&bytes)?;
    let stream = decode_pipeline(&container)?;
    let out = emit(&stream, container.params.input_format)?;
    fs::write(&a.output, &out)
        .map_err(|e| Failure::data(format!("writing {}: {e}", a.output.display())))?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> CliResult {
    let (radix, width) = shape(&a.shape)?;
    let clones = match a.clone {
        Some(c) => vec![CloneId::try_from(c)?],
        None => Vec::new(),
    };
    let report = mv2::verify(radix, width, &clones)?;
    if a.json {
        print_json(&serde_json::to_value(&report).expect("report serializes"));
    } else {
        out!("{}", report.to_text().trim_end());
    }
    let regressions = report.regressions();
    if regressions.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for r in &regressions {
        eprintln!("regression: {r}");
    }
    Ok(ExitCode::from(3))
}

fn growth_rows(k: Option<&Ratio>, kf: &Ratio, rounds: u32) -> Result<Vec<Ratio>, mv2::Error> {
    let k = k.ok_or(mv2::Error::DegenerateRatio)?;
    (1..=rounds)
        .map(|m| analytics::growth_after_rounds(k, kf, m))
        .collect()
}

fn analytics(a: AnalyticsArgs) -> CliResult {
    let (radix, width) = shape(&a.shape)?;
    let f = FormulaSet::evaluate(radix, width);
    let ks = [Some(&f.k1), f.k2.as_ref(), Some(&f.k3)];
    let growth: Vec<Result<Vec<Ratio>, mv2::Error>> = ks
        .iter()
        .map(|k| growth_rows(*k, &f.kf, a.rounds))
        .collect();

    let clone3_case = match f.lf_clone3.case {
        analytics::Clone3FlagCase::Binary => "binary".to_string(),
        analytics::Clone3FlagCase::General { m } => format!("general(m={m})"),
    };

    if a.json {
        let ratio = |r: &Ratio| json!({ "exact": r.to_string(), "decimal": r.to_decimal(6) });
        let growth_json: Vec<_> = growth
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let clone = i + 1;
                match g {
                    Ok(rows) => json!({
                        "clone": clone,
                        "rounds": rows.iter().enumerate().map(|(m, r)| json!({
                            "m": m + 1,
                            "exact": r.to_string(),
                            "decimal": r.to_decimal(6),
                        })).collect::<Vec<_>>(),
                    }),
                    Err(e) => json!({ "clone": clone, "error": e.to_string() }),
                }
            })
            .collect();
        print_json(&json!({
            "radix": radix.get(),
            "width": width.get(),
            "k1": ratio(&f.k1),
            "k2": f.k2.as_ref().map(ratio),
            "k3": ratio(&f.k3),
            "flag_len_clone1": f.lf_clone1.to_string(),
            "flag_msb_clone2": f.lf_clone2.as_ref().map(|l| l.msb.to_string()),
            "flag_len_clone2_paper": f.lf_clone2.as_ref().map(|l| l.paper_len.to_string()),
            "flag_len_clone2_corrected": f.lf_clone2.as_ref().map(|l| l.corrected_len.to_string()),
            "flag_len_clone3": f.lf_clone3.value.to_string(),
            "flag_len_clone3_case": clone3_case,
            "expansion_factor": ratio(&f.kf),
            "delta_len": f.delta_len.to_string(),
            "growth": growth_json,
        }));
        return Ok(ExitCode::SUCCESS);
    }

    out!("p={radix} n={width}");
    out!("k1                {}", with_decimal(&f.k1));
    match &f.k2 {
        Some(k2) => out!("k2                {}", with_decimal(k2)),
        None => out!("k2                - (needs n >= 2)"),
    }
    out!("k3                {}", with_decimal(&f.k3));
    out!("flag clone 1      {}", f.lf_clone1);
    if let Some(l) = &f.lf_clone2 {
        out!("flag_msb clone 2  {}", l.msb);
        out!(
            "flag_len clone 2  {} (printed formula {})",
            l.corrected_len,
            l.paper_len
        );
    }
    out!("flag clone 3      {} [{clone3_case}]", f.lf_clone3.value);
    out!("expansion factor  {}", with_decimal(&f.kf));
    out!("delta length      {}", f.delta_len);
    out!("growth after m rounds:");
    for (i, g) in growth.iter().enumerate() {
        match g {
            Ok(rows) => {
                let cells: Vec<String> = rows
                    .iter()
                    .enumerate()
                    .map(|(m, r)| format!("m={}:{}", m + 1, r.to_decimal(4)))
                    .collect();
                out!("  clone {} {}", i + 1, cells.join(" "));
            }
            Err(e) => out!("  clone {} {e}", i + 1),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn codebook(a: CodebookArgs) -> CliResult {
    let (radix, width) = shape(&a.shape)?;
    let book = CodeBook::build(radix, width)?;
    let histogram: Vec<String> = book
        .histogram()
        .iter()
        .map(|(len, count)| format!("{len}:{count}"))
        .collect();
    let sep = if radix.get() > 10 { "." } else { "" };
    let code_text = |len: usize, code: u64| {
        let mut digits = vec![0; len];
        let mut v = code;
        for d in digits.iter_mut().rev() {
            *d = v % radix.get() as u64;
            v /= radix.get() as u64;
        }
        digits
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(sep)
    };
    let rows: Vec<(u64, usize, String)> = book
        .rows()
        .take(usize::try_from(a.limit).unwrap_or(usize::MAX))
        .map(|(v, len, code)| (v, len, code_text(len, code)))
        .collect();

    if a.json {
        print_json(&json!({
            "radix": radix.get(),
            "width": width.get(),
            "histogram": book.histogram().iter().map(|(l, c)| (l.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
            "total_code_pits": book.total_code_pits().to_string(),
            "rows": rows.iter().map(|(v, l, c)| json!({ "element": v, "length": l, "code": c })).collect::<Vec<_>>(),
        }));
    } else {
        out!("{}", histogram.join(" "));
        for (v, len, code) in rows {
            out!("{v:>8} {len:>4} {code}");
        }
    }
    Ok(ExitCode::SUCCESS)
}
