//! Command-line front end: argument parsing, CSV output and the run manifest.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Deserialize;

use crate::channel::pdl_db_to_alpha;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::schemes::SchemeId;
use crate::sim::{worst_case_sweep, BerRecord, SnrGrid, SweepConfig};

pub const CSV_HEADER: [&str; 8] = [
    "scheme",
    "alpha",
    "snr_db",
    "worst_ber",
    "argmax_gamma",
    "argmax_theta",
    "total_bits",
    "total_errors",
];

/// Prefix of the manifest line that carries wall-clock data.
pub const WALL_CLOCK_PREFIX: &str = "# wall_clock:";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Worst-case BER sweeps for PDL mitigation schemes.
#[derive(Debug, Parser)]
#[command(name = "pdlsim", version, arg_required_else_help = true)]
struct Args {
    /// Scheme to simulate: iz, pz, d, pd, ref or all. Repeatable or comma-separated.
    #[arg(long = "scheme", value_name = "NAME", value_delimiter = ',')]
    schemes: Vec<String>,
    /// Worst-case PDL parameter alpha in [0, 1). Repeatable or comma-separated.
    #[arg(long = "alpha", value_name = "A", value_delimiter = ',')]
    alphas: Vec<f64>,
    /// Worst-case PDL in dB, converted to alpha. Repeatable.
    #[arg(long = "pdl-db", value_name = "DB")]
    pdl_db: Vec<f64>,
    /// SNR range in dB as start:stop:step.
    #[arg(long = "snr-db", value_name = "RANGE")]
    snr_db: Option<String>,
    #[arg(long)]
    gamma_points: Option<usize>,
    #[arg(long)]
    theta_points: Option<usize>,
    /// Stop a grid point after this many bit errors.
    #[arg(long)]
    min_errors: Option<u64>,
    /// Stop a grid point after this many frames.
    #[arg(long)]
    max_frames: Option<u64>,
    /// Stop a grid point after this many information bits.
    #[arg(long)]
    max_bits: Option<u64>,
    /// Codewords per staggered frame (D, pD).
    #[arg(long)]
    zeta: Option<usize>,
    /// Chase decoder test positions.
    #[arg(long)]
    chase_p: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with sweep settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (also PDLSIM_WORKERS). Does not change results.
    #[arg(long)]
    workers: Option<usize>,
}

/// Sweep settings as read from a config file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    schemes: Option<Vec<String>>,
    alphas: Option<Vec<f64>>,
    pdl_db: Option<Vec<f64>>,
    snr_db: Option<String>,
    gamma_points: Option<usize>,
    theta_points: Option<usize>,
    min_errors: Option<u64>,
    max_frames: Option<u64>,
    max_bits: Option<u64>,
    zeta: Option<usize>,
    chase_p: Option<usize>,
    seed: Option<u64>,
}

/// A parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub config: SweepConfig,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    /// Help or version text. `code` is nonzero when help was shown because
    /// no arguments were given.
    Display { text: String, code: i32 },
    Usage(String),
}

pub fn parse_snr_range(s: &str) -> Result<SnrGrid> {
    let bad = || Error::Config(format!("malformed SNR range '{s}', expected start:stop:step"));
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let grid = match nums[..] {
        [v] => SnrGrid { start: v, stop: v, step: 1.0 },
        [start, stop, step] => SnrGrid { start, stop, step },
        _ => return Err(bad()),
    };
    grid.points()?;
    Ok(grid)
}

fn parse_schemes(names: &[String]) -> Result<Vec<SchemeId>> {
    let mut out = Vec::new();
    for name in names {
        if name.eq_ignore_ascii_case("all") {
            out.extend(SchemeId::ALL);
        } else {
            out.push(name.parse()?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Parses `argv` (including the program name) into a sweep configuration.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Display {
                text: e.to_string(),
                code: 0,
            },
            ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => CliError::Display {
                text: e.to_string(),
                code: EXIT_USAGE,
            },
            _ => CliError::Display {
                text: e.render().to_string(),
                code: EXIT_USAGE,
            },
        }
    })?;
    build_invocation(args).map_err(|e| CliError::Usage(e.to_string()))
}

fn build_invocation(args: Args) -> Result<Invocation> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let scheme_names = if args.schemes.is_empty() {
        file.schemes.unwrap_or_else(|| vec!["all".into()])
    } else {
        args.schemes
    };
    let schemes = parse_schemes(&scheme_names)?;

    let (alphas, pdls) = if args.alphas.is_empty() && args.pdl_db.is_empty() {
        (file.alphas.unwrap_or_default(), file.pdl_db.unwrap_or_default())
    } else {
        (args.alphas, args.pdl_db)
    };
    let mut all_alphas = alphas;
    for pdl in pdls {
        all_alphas.push(pdl_db_to_alpha(pdl)?);
    }
    if all_alphas.is_empty() {
        return Err(Error::Config("give at least one --alpha or --pdl-db".into()));
    }

    let snr = args
        .snr_db
        .or(file.snr_db)
        .ok_or_else(|| Error::Config("--snr-db start:stop:step is required".into()))?;

    let mut config = SweepConfig::new(schemes, all_alphas, parse_snr_range(&snr)?);
    macro_rules! pick {
        ($field:ident, $flag:ident) => {
            if let Some(v) = args.$flag.or(file.$flag) {
                config.$field = v;
            }
        };
    }
    pick!(gamma_points, gamma_points);
    pick!(theta_points, theta_points);
    pick!(min_bit_errors, min_errors);
    pick!(max_frames, max_frames);
    pick!(zeta, zeta);
    pick!(chase_p, chase_p);
    pick!(base_seed, seed);
    config.max_info_bits = args.max_bits.or(file.max_bits);
    config.validate()?;
    Ok(Invocation {
        config,
        out: args.out,
        workers: args.workers,
    })
}

/// Provenance written as comment lines above the CSV header.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: SweepConfig,
    pub version: String,
    pub started_unix: u64,
    pub elapsed_secs: f64,
}

impl RunManifest {
    pub fn new(config: &SweepConfig) -> Self {
        Self {
            config: config.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            elapsed_secs: 0.0,
        }
    }

    fn lines(&self) -> Vec<String> {
        let c = &self.config;
        let f = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let schemes: Vec<&str> = c.schemes.iter().map(|s| s.token()).collect();
        vec![
            format!("# pdlsim {}", self.version),
            format!("# seed: {}", c.base_seed),
            format!("# schemes: {}", schemes.join(" ")),
            format!("# alphas: {}", f(&c.alphas)),
            format!("# snr_db: {}:{}:{}", c.snr_db.start, c.snr_db.stop, c.snr_db.step),
            format!("# grid: gamma_points={} theta_points={}", c.gamma_points, c.theta_points),
            format!(
                "# stop: min_errors={} max_frames={} max_bits={}",
                c.min_bit_errors,
                c.max_frames,
                c.max_info_bits.map_or("none".to_string(), |b| b.to_string())
            ),
            format!("# link: zeta={} chase_p={}", c.zeta, c.chase_p),
            format!(
                "{WALL_CLOCK_PREFIX} started_unix={} elapsed_s={:.3}",
                self.started_unix, self.elapsed_secs
            ),
        ]
    }
}

/// Writes the manifest, the header and one row per record.
pub fn emit_csv<W: Write>(records: &[BerRecord], manifest: &RunManifest, mut sink: W) -> Result<()> {
    for line in manifest.lines() {
        writeln!(sink, "{line}")?;
    }
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.scheme.token().to_string(),
            r.alpha.to_string(),
            r.snr_db.to_string(),
            r.worst_ber.to_string(),
            r.argmax_gamma.to_string(),
            r.argmax_theta.to_string(),
            r.total_bits.to_string(),
            r.total_errors.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records back from [`emit_csv`] output.
pub fn parse_csv<R: BufRead>(source: R) -> Result<Vec<BerRecord>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let bad = |field: &str| Error::Config(format!("bad {field} in row {row:?}"));
        let float = |i: usize| row[i].parse::<f64>().map_err(|_| bad(CSV_HEADER[i]));
        let int = |i: usize| row[i].parse::<u64>().map_err(|_| bad(CSV_HEADER[i]));
        out.push(BerRecord {
            scheme: row[0].parse()?,
            alpha: float(1)?,
            snr_db: float(2)?,
            worst_ber: float(3)?,
            argmax_gamma: float(4)?,
            argmax_theta: float(5)?,
            total_bits: int(6)?,
            total_errors: int(7)?,
        });
    }
    Ok(out)
}

/// Human-readable table of the records.
pub fn summary(records: &[BerRecord]) -> String {
    let mut s = String::from("scheme  alpha    snr_db   worst_ber     gamma    theta\n");
    for r in records {
        s.push_str(&format!(
            "{:<7} {:<8.4} {:<8.3} {:<13.4e} {:<8.4} {:.4}\n",
            r.scheme.label(),
            r.alpha,
            r.snr_db,
            r.worst_ber,
            r.argmax_gamma,
            r.argmax_theta
        ));
    }
    s
}

/// Runs a parsed invocation and returns the CSV text.
pub fn execute(inv: &Invocation) -> Result<String> {
    let exec = match inv.workers {
        Some(w) => Execution::workers(w),
        None => Execution::FromEnv,
    };
    let mut manifest = RunManifest::new(&inv.config);
    let started = Instant::now();
    let records = worst_case_sweep(&inv.config, exec)?;
    manifest.elapsed_secs = started.elapsed().as_secs_f64();
    let mut buf = Vec::new();
    emit_csv(&records, &manifest, &mut buf)?;
    eprint!("{}", summary(&records));
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let inv = match parse_args(argv) {
        Ok(inv) => inv,
        Err(CliError::Display { text, code }) => {
            if code == 0 {
                print!("{text}");
            } else {
                eprint!("{text}");
            }
            return code;
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let written = execute(&inv).and_then(|csv| match &inv.out {
        Some(path) => {
            // write whole file at once; nothing is left behind on failure
            let tmp = path.with_extension("csv.partial");
            std::fs::write(&tmp, csv)?;
            std::fs::rename(&tmp, path)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
            Ok(())
        }
    });
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}
