//! `cbc`: bounded lossy image compression on the command line.
//!
//! Exit codes: 0 success, 1 usage or format error, 2 I/O error, 3 bound
//! violations found by `verify`. Reports go to stdout, diagnostics to
//! stderr, and output files appear atomically or not at all.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cbc_core::lossy::LossyCodecConfig;
use cbc_core::{compress, decompress_full, inspect, ColorMode, CompressConfig};

#[derive(Parser)]
#[command(
    name = "cbc",
    version,
    about = "Lossy image compression with hard per-sample error bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColorArg {
    /// Bound each channel independently.
    None,
    /// Rotate RGB through the reversible color transform and bound
    /// luminance only.
    Rct,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a binary PNM (P5/P6) image into a CBC1 file.
    Compress {
        /// Input image (.pgm/.ppm).
        #[arg(long)]
        input: PathBuf,
        /// Output CBC1 file.
        #[arg(long)]
        output: PathBuf,
        /// Channel treatment.
        #[arg(long, value_enum, default_value_t = ColorArg::None)]
        color: ColorArg,
        /// Critical bit depth: "4", "R=4,G=4,B=4", or "Y=4" with --color rct.
        #[arg(long, default_value = "4")]
        critical_depth: String,
        /// Lossy codec: "const", "down:f=4", or "haar:q=32,levels=3".
        #[arg(long, default_value = "haar:q=32,levels=3")]
        lossy: String,
    },
    /// Decompress a CBC1 file back to a canonical PNM image.
    Decompress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print a CBC1 file's header fields, section sizes, and ratios.
    Inspect {
        #[arg(long)]
        input: PathBuf,
    },
    /// Certify that a CBC1 file's decode stays inside its error bounds.
    Verify {
        /// The image the file was compressed from.
        #[arg(long)]
        original: PathBuf,
        /// The CBC1 file to check.
        #[arg(long)]
        compressed: PathBuf,
    },
    /// Compare two PNM images.
    Metrics {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    /// Bad arguments, unparsable input, or an invalid configuration.
    Usage(String),
    /// The operating system refused a read or write.
    Io(String),
    /// `verify` found samples outside their certified bounds.
    Violations(u64),
}

impl From<cbc_core::Error> for CliError {
    fn from(e: cbc_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the destination directory so the
/// target path either holds the complete output or nothing.
fn write_file_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: &dyn std::fmt::Display| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(&e))?;
    tmp.write_all(bytes).map_err(|e| io_err(&e))?;
    tmp.persist(path).map_err(|e| io_err(&e))?;
    Ok(())
}

/// Parses "4", "R=4,G=4,B=4", or "Y=4" against the chosen color mode and
/// channel count.
fn parse_critical_depth(spec: &str, color: ColorArg, channels: usize) -> Result<Vec<u8>, CliError> {
    let usage = |msg: String| Err(CliError::Usage(msg));
    if let Ok(n) = spec.parse::<u8>() {
        return Ok(match color {
            ColorArg::Rct => vec![n],
            ColorArg::None => vec![n; channels],
        });
    }
    if let Some(value) = spec.strip_prefix("Y=") {
        if color != ColorArg::Rct {
            return usage("critical depth \"Y=..\" requires --color rct".into());
        }
        let n = value
            .parse::<u8>()
            .map_err(|_| CliError::Usage(format!("bad critical depth \"{spec}\"")))?;
        return Ok(vec![n]);
    }
    if spec.contains('=') {
        if color != ColorArg::None {
            return usage(format!("per-channel critical depth \"{spec}\" requires --color none"));
        }
        if channels != 3 {
            return usage(format!(
                "per-channel critical depth \"{spec}\" needs an RGB image"
            ));
        }
        let mut depths = [None::<u8>; 3];
        for part in spec.split(',') {
            let (channel, value) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("bad critical depth part \"{part}\"")))?;
            let slot = match channel {
                "R" => 0,
                "G" => 1,
                "B" => 2,
                _ => return usage(format!("unknown channel \"{channel}\" in \"{spec}\"")),
            };
            if depths[slot].is_some() {
                return usage(format!("channel \"{channel}\" given twice in \"{spec}\""));
            }
            depths[slot] = Some(
                value
                    .parse::<u8>()
                    .map_err(|_| CliError::Usage(format!("bad critical depth part \"{part}\"")))?,
            );
        }
        let [Some(r), Some(g), Some(b)] = depths else {
            return usage(format!("\"{spec}\" must name R, G, and B"));
        };
        return Ok(vec![r, g, b]);
    }
    usage(format!("bad critical depth \"{spec}\""))
}

/// Parses "const", "down:f=N", or "haar:q=N,levels=M" (either order;
/// defaults q=32, levels=3).
fn parse_lossy(spec: &str) -> Result<LossyCodecConfig, CliError> {
    let number = |part: &str, key: &str| -> Result<u32, CliError> {
        part.strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| CliError::Usage(format!("bad codec parameter \"{part}\" in \"{spec}\"")))
    };
    if spec == "const" {
        return Ok(LossyCodecConfig::Const);
    }
    if let Some(rest) = spec.strip_prefix("down:") {
        return Ok(LossyCodecConfig::Downsample {
            factor: number(rest, "f")?,
        });
    }
    if spec == "haar" {
        return Ok(LossyCodecConfig::Haar { levels: 3, q: 32 });
    }
    if let Some(rest) = spec.strip_prefix("haar:") {
        let (mut levels, mut q) = (3, 32);
        let (mut saw_levels, mut saw_q) = (false, false);
        for part in rest.split(',') {
            if part.starts_with("levels") && !saw_levels {
                levels = number(part, "levels")?;
                saw_levels = true;
            } else if part.starts_with('q') && !saw_q {
                q = number(part, "q")?;
                saw_q = true;
            } else {
                return Err(CliError::Usage(format!(
                    "bad codec parameter \"{part}\" in \"{spec}\""
                )));
            }
        }
        return Ok(LossyCodecConfig::Haar { levels, q });
    }
    Err(CliError::Usage(format!("unknown codec spec \"{spec}\"")))
}

fn cmd_compress(
    input: &Path,
    output: &Path,
    color: ColorArg,
    critical_depth: &str,
    lossy: &str,
) -> Result<(), CliError> {
    let image = cbc_core::read_pnm(&read_file(input)?)?;
    let critical_depths = parse_critical_depth(critical_depth, color, image.len())?;
    let config = CompressConfig {
        color_mode: match color {
            ColorArg::None => ColorMode::PerChannel,
            ColorArg::Rct => ColorMode::RctY,
        },
        critical_depths,
        codec: parse_lossy(lossy)?,
    };
    let bytes = compress(&image, &config)?;
    write_file_atomic(output, &bytes)?;
    let report = inspect(&bytes)?;
    println!("raw_size={}", report.raw_size());
    println!("lossless_size={}", report.header.lossless_len);
    println!("lossy_size={}", report.header.lossy_len);
    println!("file_size={}", report.file_size());
    let ratio = report.raw_size() as f64 / report.file_size() as f64;
    println!("ratio_total={ratio:.2}");
    Ok(())
}

fn cmd_decompress(input: &Path, output: &Path) -> Result<(), CliError> {
    let decoded = cbc_core::decompress(&read_file(input)?)?;
    write_file_atomic(output, &cbc_core::write_pnm(&decoded)?)
}

fn cmd_inspect(input: &Path) -> Result<(), CliError> {
    print!("{}", inspect(&read_file(input)?)?);
    Ok(())
}

fn cmd_verify(original: &Path, compressed: &Path) -> Result<(), CliError> {
    let image = cbc_core::read_pnm(&read_file(original)?)?;
    let bytes = read_file(compressed)?;
    let decoded = decompress_full(&bytes)?;
    let violations = cbc_core::verify_bounds(&image, &decoded.bounded, &decoded.header)?;
    let mut report = cbc_core::compute_metrics(&image, &decoded.bounded)?;
    report.bound_violations = Some(violations);
    let raw = inspect(&bytes)?.raw_size();
    report.compression_ratio = Some(raw as f64 / bytes.len() as f64);
    print!("{report}");
    if violations > 0 {
        return Err(CliError::Violations(violations));
    }
    Ok(())
}

fn cmd_metrics(a: &Path, b: &Path) -> Result<(), CliError> {
    let image_a = cbc_core::read_pnm(&read_file(a)?)?;
    let image_b = cbc_core::read_pnm(&read_file(b)?)?;
    print!("{}", cbc_core::compute_metrics(&image_a, &image_b)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Compress {
            input,
            output,
            color,
            critical_depth,
            lossy,
        } => cmd_compress(input, output, *color, critical_depth, lossy),
        Command::Decompress { input, output } => cmd_decompress(input, output),
        Command::Inspect { input } => cmd_inspect(input),
        Command::Verify {
            original,
            compressed,
        } => cmd_verify(original, compressed),
        Command::Metrics { a, b } => cmd_metrics(a, b),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is
            // a usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Violations(count)) => {
            eprintln!("error: {count} samples violate their bounds");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_depth_grammar() {
        assert_eq!(parse_critical_depth("4", ColorArg::None, 3).unwrap(), vec![4, 4, 4]);
        assert_eq!(parse_critical_depth("4", ColorArg::None, 1).unwrap(), vec![4]);
        assert_eq!(parse_critical_depth("6", ColorArg::Rct, 3).unwrap(), vec![6]);
        assert_eq!(parse_critical_depth("Y=4", ColorArg::Rct, 3).unwrap(), vec![4]);
        assert_eq!(
            parse_critical_depth("R=1,G=2,B=3", ColorArg::None, 3).unwrap(),
            vec![1, 2, 3]
        );
        assert_eq!(
            parse_critical_depth("B=3,R=1,G=2", ColorArg::None, 3).unwrap(),
            vec![1, 2, 3]
        );
        assert!(parse_critical_depth("Y=4", ColorArg::None, 3).is_err());
        assert!(parse_critical_depth("R=4,G=4,B=4", ColorArg::Rct, 3).is_err());
        assert!(parse_critical_depth("R=4,G=4", ColorArg::None, 3).is_err());
        assert!(parse_critical_depth("R=4,R=4,B=4", ColorArg::None, 3).is_err());
        assert!(parse_critical_depth("R=4,G=4,B=4", ColorArg::None, 1).is_err());
        assert!(parse_critical_depth("X=4", ColorArg::None, 3).is_err());
        assert!(parse_critical_depth("four", ColorArg::None, 1).is_err());
    }

    #[test]
    fn lossy_grammar() {
        assert_eq!(parse_lossy("const").unwrap(), LossyCodecConfig::Const);
        assert_eq!(
            parse_lossy("down:f=4").unwrap(),
            LossyCodecConfig::Downsample { factor: 4 }
        );
        assert_eq!(
            parse_lossy("haar:q=64,levels=4").unwrap(),
            LossyCodecConfig::Haar { levels: 4, q: 64 }
        );
        assert_eq!(
            parse_lossy("haar:levels=4,q=64").unwrap(),
            LossyCodecConfig::Haar { levels: 4, q: 64 }
        );
        assert_eq!(
            parse_lossy("haar").unwrap(),
            LossyCodecConfig::Haar { levels: 3, q: 32 }
        );
        assert_eq!(
            parse_lossy("haar:q=8").unwrap(),
            LossyCodecConfig::Haar { levels: 3, q: 8 }
        );
        assert!(parse_lossy("down").is_err());
        assert!(parse_lossy("down:g=4").is_err());
        assert!(parse_lossy("haar:q=1,q=2").is_err());
        assert!(parse_lossy("jpeg").is_err());
        // Range checks live in the codec config, not the parser.
        assert_eq!(
            parse_lossy("down:f=0").unwrap(),
            LossyCodecConfig::Downsample { factor: 0 }
        );
        assert!(LossyCodecConfig::Downsample { factor: 0 }.validate().is_err());
    }
}
