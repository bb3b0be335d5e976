//! The `aperiodic` command line: argument parsing, file I/O, reports and
//! SVG output over the `aperiodic` library.

pub mod io;
pub mod scenes;
pub mod svg;

mod commands;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

pub use commands::run;

/// Exit codes.
pub const OK: i32 = 0;
pub const CHECK_FAILED: i32 = 1;
pub const USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "aperiodic",
    version,
    about = "Exact checks for aperiodic configurations, coin games, hulls and certificates"
)]
pub struct Cli {
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, or output file for `cert build`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Print machine-readable reports.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The coin-and-bucket game.
    #[command(subcommand)]
    Game(GameCmd),
    /// Finite patterns and periodicity defects.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Hulls of leveled diamond families.
    #[command(subcommand)]
    Hull(HullCmd),
    /// Safe points and safe paths.
    #[command(subcommand)]
    Safe(SafeCmd),
    /// Hypotheses and hull properties of a family file.
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Witness certificates and configurations.
    #[command(subcommand)]
    Cert(CertCmd),
    /// Gluing two certified configurations.
    #[command(subcommand)]
    Glue(GlueCmd),
}

#[derive(Debug, Args)]
pub struct GameRules {
    /// Forbid moving a coin back into its own bucket.
    #[arg(long)]
    pub no_self_moves: bool,
    /// Most states expanded per search.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
}

#[derive(Debug, Subcommand)]
pub enum GameCmd {
    /// Decides orientability of `k` buckets holding `n` heads each.
    Solve {
        #[arg(long)]
        buckets: usize,
        #[arg(long)]
        coins: u32,
        #[command(flatten)]
        rules: GameRules,
    },
    /// Plays the halving cascade.
    Greedy {
        #[arg(long)]
        buckets: usize,
        #[arg(long)]
        coins: u32,
    },
    /// Verdicts for every `k <= kmax`, `n <= nmax`.
    Table {
        #[arg(long)]
        kmax: usize,
        #[arg(long)]
        nmax: u32,
        #[command(flatten)]
        rules: GameRules,
    },
}

#[derive(Debug, Subcommand)]
pub enum PatternCmd {
    /// Finds the least `n`-aperiodic pair.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// Checks acceptability up to a level.
    Acceptable {
        #[arg(long)]
        file: PathBuf,
        /// `N1,N2,..:R1,R2,..` or a JSON file with `n_seq` and `r_seq`.
        #[arg(long)]
        profile: String,
        #[arg(long)]
        level: usize,
    },
    /// Runs the inductive construction over a Thue-Morse line.
    Construct {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        budget: u64,
        /// Length of the tabulated Thue-Morse prefix.
        #[arg(long, default_value_t = 1 << 14)]
        prefix: usize,
        /// Bound `r_{k+1}` by the current level's window length.
        #[arg(long)]
        current_level_bound: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum HullCmd {
    Build {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SafeCmd {
    Query {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_parser = io::point, allow_hyphen_values = true)]
        point: aperiodic::geometry::Point,
    },
    Path {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_parser = io::point, allow_hyphen_values = true)]
        point: aperiodic::geometry::Point,
        #[arg(long, value_parser = io::rational)]
        extent: aperiodic::rational::Q,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeomCmd {
    Check {
        #[arg(long)]
        file: PathBuf,
        /// Random safe points whose paths are built and verified.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CertCmd {
    Validate {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        profile: String,
        #[arg(long, value_parser = io::window, allow_hyphen_values = true)]
        window: Option<aperiodic::certificate::Window>,
    },
    /// Builds a dense certificate over a window.
    Build {
        #[arg(long)]
        profile: String,
        #[arg(long, value_parser = io::window, allow_hyphen_values = true)]
        window: aperiodic::certificate::Window,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Chooses a configuration compatible with a certificate.
    Config {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    Compat {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// Defaults to the built-in profile whose radii match the certificate.
        #[arg(long)]
        profile: Option<String>,
    },
    /// An `n`-aperiodic pair of anchors read off the certificate.
    Extract {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        profile: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GlueCmd {
    Run {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        cx: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        cy: PathBuf,
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        profile: String,
        #[arg(long, value_parser = io::window, allow_hyphen_values = true)]
        window: aperiodic::certificate::Window,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// Also write `glue.svg`.
        #[arg(long)]
        svg: bool,
    },
}

/// Parses `argv` (program name first), runs the command and prints its
/// report. Returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { USAGE } else { OK };
        }
    };
    match run(&cli) {
        Ok(out) => {
            if !cli.quiet || out.code != OK {
                if cli.json {
                    print!("{}", io::to_json(&out.json));
                } else {
                    print!("{}", out.text);
                }
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            USAGE
        }
    }
}
