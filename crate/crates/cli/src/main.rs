use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use homfib::engine::FiberType;
use homfib_cli::commands::{self, CertTarget, CliError, Report, SearchSettings, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "homfib", version, about = "Decide which fibered 2-handlebody boundaries a 3-manifold admits")]
struct Cli {
    /// Output style: an aligned table or one JSON record per line.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Args)]
struct SearchArgs {
    /// Largest absolute value of any unknown entry tried by the search.
    #[arg(long, default_value_t = 8)]
    bound: u32,
    /// Cap on search steps and on residue enumeration size.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
}

impl SearchArgs {
    fn settings(&self) -> SearchSettings {
        SearchSettings { bound: self.bound, budget: self.budget }
    }
}

#[derive(Args)]
struct CertArgs {
    /// Directory receiving certificate files.
    #[arg(long, default_value = ".")]
    cert_dir: PathBuf,
    /// Do not write a certificate.
    #[arg(long)]
    no_cert: bool,
}

impl CertArgs {
    fn target(&self) -> CertTarget<'_> {
        if self.no_cert {
            CertTarget::Skip
        } else {
            CertTarget::Dir(&self.cert_dir)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// First homology of the manifold.
    Homology {
        /// Input document, or `-` for stdin.
        spec: PathBuf,
    },
    /// Linking form Gram matrix, matched against single generators when possible.
    LinkingForm {
        spec: PathBuf,
        /// Largest group order for which equivalence is tested.
        #[arg(long, default_value_t = homfib::linking::DEFAULT_ORDER_BOUND)]
        order_bound: u64,
    },
    /// Decide whether the block determinant equation has a solution for one fiber.
    Decide {
        spec: PathBuf,
        /// Fiber as `g,n`: genus g with n+1 boundary components.
        #[arg(long, value_parser = parse_fiber)]
        fiber: FiberType,
        /// Required to ask the disk fiber `0,0`.
        #[arg(long)]
        disk: bool,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Least fiber genus, or the best bounds found.
    Hc {
        spec: PathBuf,
        /// Largest genus examined when no upper bound is known.
        #[arg(long)]
        max_genus: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Enumerate determinant residues modulo one modulus.
    Obstruct {
        spec: PathBuf,
        #[arg(long, value_parser = parse_fiber)]
        fiber: FiberType,
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Recheck a certificate file.
    Verify {
        certificate: PathBuf,
        /// Also require the certificate to be for this manifold.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Reduce a `1,0` or `0,n` solution to the fiber with one fewer handle.
    Reduce {
        spec: PathBuf,
        #[arg(long, value_parser = parse_fiber)]
        fiber: FiberType,
        /// Take the solution from an `exists` certificate instead of searching.
        #[arg(long)]
        from_cert: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// `hc` for E0(1..4) and E1(2..3) summed with up to `max-r` copies of S²×S¹.
    Table {
        #[arg(long, default_value_t = 3)]
        max_r: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
}

fn parse_fiber(s: &str) -> Result<FiberType, String> {
    let (g, n) = s.split_once(',').ok_or("expected g,n")?;
    let g = g.trim().parse().map_err(|e| format!("genus: {e}"))?;
    let n = n.trim().parse().map_err(|e| format!("n: {e}"))?;
    Ok(FiberType::new(g, n))
}

fn run(command: &Command) -> Result<Report, CliError> {
    let load = |p: &Path| commands::load_spec(p);
    match command {
        Command::Homology { spec } => Ok(commands::homology(&load(spec)?)),
        Command::LinkingForm { spec, order_bound } => commands::linking_form(&load(spec)?, *order_bound),
        Command::Decide { spec, fiber, disk, search, cert } => {
            commands::decide_cmd(&load(spec)?, *fiber, *disk, &search.settings(), &cert.target())
        }
        Command::Hc { spec, max_genus, search } => commands::hc_cmd(&load(spec)?, *max_genus, &search.settings()),
        Command::Obstruct { spec, fiber, modulus, budget, cert } => {
            commands::obstruct_cmd(&load(spec)?, *fiber, *modulus, *budget, &cert.target())
        }
        Command::Verify { certificate, spec, budget } => {
            let doc = spec.as_deref().map(load).transpose()?;
            commands::verify_cmd(certificate, doc.as_ref(), *budget)
        }
        Command::Reduce { spec, fiber, from_cert, search } => {
            commands::reduce_cmd(&load(spec)?, *fiber, &search.settings(), from_cert.as_deref())
        }
        Command::Table { max_r, search } => commands::table_cmd(*max_r, &search.settings()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(report) => {
            match cli.format {
                Format::Human => print!("{}", report.human),
                Format::Records => print!("{}", report.render_records()),
            }
            if report.code != 0 && report.records.first().and_then(|r| r.get("status")).is_some_and(|s| s == "stale certificate") {
                eprintln!("stale certificate: it does not name the problem being checked");
            }
            ExitCode::from(report.code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
