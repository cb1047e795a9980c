//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gpnorm_core::automorphisms::{aut0_generators, orbit, parse_sequence, AutGen};
use gpnorm_core::classes::{classes_report, tau_structure};
use gpnorm_core::classifier::{classify, verify_certificate, CertKind, Certificate, Effort, Verdict};
use gpnorm_core::corpus;
use gpnorm_core::norms::{distortion_table, estimate, BfsParams};
use gpnorm_core::presentation::{parse_presentation, Order, Presentation};
use gpnorm_core::words::{format_word, parse_word, NormalWord};

#[derive(Debug, Parser)]
#[command(
    name = "gpnorm",
    version,
    about = "Normal forms, automorphisms and invariant word norms for graph products of cyclic groups"
)]
pub struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassesFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SearchArgs {
    /// Rounds of orbit enumeration.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(0..=64))]
    pub orbit_depth: u64,
    /// Longest orbit element kept, in syllables.
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u64).range(1..=256))]
    pub len_cap: u64,
    /// Largest product length searched.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub radius: u64,
}

impl SearchArgs {
    fn params(&self) -> BfsParams {
        BfsParams {
            orbit_depth: self.orbit_depth as usize,
            length_cap: self.len_cap as usize,
            radius: self.radius as usize,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the invariant word norm is bounded and print the verdict.
    Classify {
        graph: PathBuf,
        /// Write the verdict (with certificate) to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Split non-primary vertex groups into primary factors first.
        #[arg(long)]
        expand_primary: bool,
    },
    /// Print the canonical normal form of a word.
    Nf { graph: PathBuf, word: String },
    /// Certified lower and upper bounds for the norm of a word.
    Norm {
        graph: PathBuf,
        word: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Verdict or certificate file produced by `classify --out`.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Bounds for the norms of the powers of a word, as CSV.
    Distortion {
        graph: PathBuf,
        word: String,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..=1000))]
        nmax: u64,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Also write an SVG plot to this file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Preorders, classes, Hasse diagram and join decomposition.
    Classes {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = ClassesFormat::Json)]
        format: ClassesFormat,
    },
    /// Truncated orbit of words under automorphisms, one literal per line.
    Orbit {
        graph: PathBuf,
        /// Comma-separated seed words; defaults to the vertex generators.
        #[arg(long)]
        seeds: Option<String>,
        /// Generator literals such as `tv(a,b) pc(a,c)`; defaults to the
        /// standard generators of the finite-index subgroup.
        #[arg(long)]
        gens: Option<String>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(0..=64))]
        depth: u64,
        #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u64).range(1..=256))]
        len_cap: u64,
    },
    /// Re-check a verdict file against a presentation.
    Verify {
        graph: PathBuf,
        cert: PathBuf,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
        samples: u64,
    },
    /// Write the named corpus and seeded random presentations to a directory.
    GenCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=8))]
        max_vertices: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Comma-separated vertex orders, `inf` for infinite cyclic.
        #[arg(long, default_value = "2,3,4,inf")]
        orders: String,
        /// Instead of random presentations, write every labelled graph on
        /// exactly `max-vertices` vertices.
        #[arg(long)]
        exhaustive: bool,
    },
}

/// Error carrying an exit status.
#[derive(Debug)]
struct Exit(i32);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn load(path: &Path) -> Result<Presentation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_presentation(&text).with_context(|| format!("parsing {}", path.display()))
}

fn word(p: &Presentation, text: &str) -> Result<NormalWord> {
    parse_word(p, text).with_context(|| format!("word {text:?}"))
}

/// A verdict file, or a bare certificate.
fn load_verdict(path: &Path) -> Result<Verdict> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(v) = serde_json::from_str::<Verdict>(&text) {
        return Ok(v);
    }
    let certificate = Certificate::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(Verdict {
        bounded: certificate.kind == CertKind::BoundedDecomposition,
        certificate,
        trace: vec![],
    })
}

fn parse_orders(text: &str) -> Result<Vec<Order>> {
    text.split(',')
        .map(|s| match s.trim() {
            "inf" => Ok(Order::Infinite),
            n => match n.parse::<u64>() {
                Ok(n) if n >= 2 => Ok(Order::Finite(n)),
                _ => bail!("bad order {n:?}"),
            },
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Classify {
            graph,
            out: file,
            expand_primary,
        } => {
            let mut p = load(&graph)?;
            if expand_primary {
                p = p.expand_to_primary()?;
            }
            let verdict = classify(&p)?;
            let text = serde_json::to_string_pretty(&verdict)?;
            if let Some(file) = file {
                write_file(&file, &text)?;
            }
            writeln!(out, "{text}")?;
        }
        Command::Nf { graph, word: w } => {
            let p = load(&graph)?;
            writeln!(out, "{}", format_word(&p, &word(&p, &w)?))?;
        }
        Command::Norm {
            graph,
            word: w,
            search,
            cert,
        } => {
            let p = load(&graph)?;
            let x = word(&p, &w)?;
            let verdict = cert.as_deref().map(load_verdict).transpose()?;
            let est = estimate(&p, &x, verdict.as_ref().map(|v| &v.certificate), search.params())?;
            writeln!(out, "{}", serde_json::to_string_pretty(&est)?)?;
        }
        Command::Distortion {
            graph,
            word: w,
            nmax,
            search,
            cert,
            svg,
        } => {
            let p = load(&graph)?;
            let x = word(&p, &w)?;
            let verdict = cert.as_deref().map(load_verdict).transpose()?;
            let table = distortion_table(
                &p,
                &x,
                verdict.as_ref().map(|v| &v.certificate),
                nmax as usize,
                search.params(),
            )?;
            if let Some(svg) = svg {
                write_file(&svg, &table.to_svg())?;
            }
            write!(out, "{}", table.to_csv())?;
        }
        Command::Classes { graph, format } => {
            let p = load(&graph)?;
            match format {
                ClassesFormat::Json => {
                    writeln!(out, "{}", serde_json::to_string_pretty(&classes_report(&p)?)?)?
                }
                ClassesFormat::Dot => write!(out, "{}", tau_structure(&p)?.hasse_dot(&p))?,
            }
        }
        Command::Orbit {
            graph,
            seeds,
            gens,
            depth,
            len_cap,
        } => {
            let p = load(&graph)?;
            let seeds: Vec<NormalWord> = match seeds {
                Some(s) => s.split(',').map(|w| word(&p, w)).collect::<Result<_>>()?,
                None => (0..p.len()).map(|v| NormalWord::generator(&p, v)).collect(),
            };
            let gens: Vec<AutGen> = match gens {
                Some(g) => parse_sequence(&p, &g)?.into_iter().map(|s| s.gen).collect(),
                None => aut0_generators(&p)?,
            };
            let o = orbit(&p, &seeds, &gens, depth as usize, len_cap as usize);
            for x in &o.elements {
                writeln!(out, "{}", format_word(&p, x))?;
            }
        }
        Command::Verify {
            graph,
            cert,
            samples,
        } => {
            let p = load(&graph)?;
            let verdict = load_verdict(&cert)?;
            let report = verify_certificate(
                &p,
                &verdict,
                Effort {
                    samples: samples as usize,
                    seed,
                },
            );
            for c in &report.checks {
                writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            if let Some(b) = report.uniform_bound {
                writeln!(out, "uniform bound: {b}")?;
            }
            if report.citation_level {
                writeln!(out, "note: certificate rests on a cited result")?;
            }
            writeln!(out, "{}", if report.pass { "PASS" } else { "FAIL" })?;
            if !report.pass {
                return Err(Exit(2).into());
            }
        }
        Command::GenCorpus {
            out: dir,
            max_vertices,
            count,
            orders,
            exhaustive,
        } => {
            let alphabet = parse_orders(&orders)?;
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let mut written = 0;
            for (name, p) in corpus::named() {
                write_file(&dir.join(format!("{name}.json")), &p.to_json())?;
                written += 1;
            }
            let list = if exhaustive {
                corpus::exhaustive_labelled(max_vertices as usize, &alphabet)
            } else {
                corpus::random_corpus(count, max_vertices as usize, &alphabet, seed)
            };
            let prefix = if exhaustive { "labelled" } else { "random" };
            let width = list.len().to_string().len();
            for (i, p) in list.iter().enumerate() {
                write_file(&dir.join(format!("{prefix}_{i:0width$}.json")), &p.to_json())?;
                written += 1;
            }
            writeln!(out, "wrote {written} presentations to {}", dir.display())?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the exit status: 0 on success, 1 on usage or input errors, 2 when a
/// verification fails.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => match e.downcast_ref::<Exit>() {
            Some(Exit(code)) => *code,
            None => {
                let _ = writeln!(err, "error: {e:#}");
                1
            }
        },
    }
}
