use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bmo_multipliers::report::{
    cmd_bmo_suite, cmd_corpus, cmd_multiplier_check, cmd_product_suite, cmd_psi_build, BmoSuiteConfig, CorpusConfig,
    MultiplierCheckConfig, MultiplierFixture, Outcome, ProductSuiteConfig, EXIT_INPUT,
};

#[derive(Parser)]
#[command(name = "bmo-multipliers", version, about = "Multiplier, BMO and square-function experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Ones,
    Lacunary,
}

#[derive(Subcommand)]
enum Command {
    /// Block condition, necessity witnesses and majorant checks for a multiplier.
    MultiplierCheck {
        /// Multiplier as CSV (`m,n,re,im`) or JSON; a built-in fixture when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "ones")]
        fixture: Fixture,
        /// Window side of the built-in fixture.
        #[arg(long, default_value_t = 256)]
        window: usize,
        /// Torus grid for the majorant checks.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oscillation identities on cubes, the atomic-measure ladder and the lower-bound chain.
    BmoSuite {
        /// Function fixture (JSON); `cos(2π(4x + 8y))` when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Atomic measure fixture (JSON).
        #[arg(long)]
        measure: Option<PathBuf>,
        /// Sample cells per unit length.
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Frequency window; the Nyquist window when absent.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Product functionals over an open set, the rectangle identity and the scale table.
    ProductSuite {
        /// Function fixture (JSON); a character when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Open-set mask (JSON); the unit square when absent.
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Wavelet profile from `psi-build`; built on the fly when absent.
        #[arg(long)]
        psi: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Accepted for a uniform interface; product fixtures are deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the seeded corpora and their summary statistics.
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        size: usize,
        /// Top frequency of the Hardy-space witnesses.
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and check the wavelet profile.
    PsiBuild {
        /// Samples on [-1, 1].
        #[arg(long, default_value_t = 4097)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_outputs(out: &Path, o: &Outcome) -> std::io::Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("report.json"), &o.report)?;
    for (name, body) in &o.files {
        std::fs::write(out.join(name), body)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out) = match cli.command {
        Command::MultiplierCheck {
            input,
            fixture,
            window,
            grid,
            seed,
            samples,
            tol,
            out,
        } => {
            let cfg = MultiplierCheckConfig {
                input,
                fixture: match fixture {
                    Fixture::Ones => MultiplierFixture::Ones,
                    Fixture::Lacunary => MultiplierFixture::Lacunary,
                },
                window,
                grid,
                seed,
                samples,
                tol,
            };
            (cmd_multiplier_check(&cfg), out)
        }
        Command::BmoSuite {
            input,
            measure,
            grid,
            window,
            seed,
            tol,
            out,
        } => {
            let cfg = BmoSuiteConfig {
                input,
                measure,
                grid,
                window,
                seed,
                tol,
            };
            (cmd_bmo_suite(&cfg), out)
        }
        Command::ProductSuite {
            input,
            mask,
            psi,
            grid,
            depth,
            seed: _,
            tol,
            out,
        } => {
            let cfg = ProductSuiteConfig {
                input,
                mask,
                psi,
                grid,
                depth,
                tol,
            };
            (cmd_product_suite(&cfg), out)
        }
        Command::Corpus {
            seed,
            size,
            window,
            grid,
            depth,
            out,
        } => {
            let cfg = CorpusConfig {
                seed,
                size,
                window,
                grid,
                depth,
            };
            (cmd_corpus(&cfg), out)
        }
        Command::PsiBuild { grid, out } => (cmd_psi_build(grid), out),
    };
    match result {
        Ok(o) => {
            print!("{}", o.report);
            if let Some(dir) = out {
                if let Err(e) = write_outputs(&dir, &o) {
                    eprintln!("error: cannot write to {}: {e}", dir.display());
                    return ExitCode::from(EXIT_INPUT as u8);
                }
            }
            ExitCode::from(o.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
