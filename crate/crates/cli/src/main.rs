//! `gist` — command-line front door for the gisting proxy and its
//! evaluation toolkit.
//!
//! Results go to stdout, diagnostics to stderr; usage errors exit 2,
//! operational errors exit 1.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use url::Url;

use gist_core::langid::{train_profile, DEFAULT_ORDER};
use gist_evalkit::{random_baseline, report, JudgmentSet, ReportConfig};
use gist_proxy::{gist_document, load_config, serve, ProxyConfig, Services};

#[derive(Parser)]
#[command(
    name = "gist",
    about = "Word-by-word gisting of web pages, plus its evaluation toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gist a URL or local HTML file to stdout.
    Gist {
        /// http(s) URL or path to a local HTML file.
        target: String,
        /// Target language for the glosses.
        #[arg(long, default_value = "en")]
        to: String,
        /// Proxy configuration file (lexicons, profiles, policy).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the gisting proxy HTTP server.
    Serve {
        /// Proxy configuration file.
        #[arg(long)]
        config: PathBuf,
    },
    /// Train a character n-gram language profile from a corpus file.
    TrainLangid {
        /// Plain-text corpus (at least 100 characters).
        corpus: PathBuf,
        /// Language code recorded in the profile.
        #[arg(long)]
        lang: String,
        /// N-gram order.
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        n: usize,
        /// Output profile path.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Score a judgments CSV: distances to the control group with
    /// confidence intervals, optional random baseline and kappa matrix.
    Eval {
        /// CSV with header `subject,condition,item,category`.
        judgments: PathBuf,
        /// Add this many seeded uniform-random subjects.
        #[arg(long, default_value_t = 0)]
        runs: usize,
        /// Seed for the random baseline and the bootstrap.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Confidence level in percent.
        #[arg(long, default_value_t = 95.0)]
        ci: f64,
        /// Bootstrap resamples per subject.
        #[arg(long, default_value_t = 2000)]
        resamples: usize,
        /// Exclude none-of-the-above from random draws.
        #[arg(long)]
        forced_choice: bool,
        /// Size of the random draw universe including none-of-the-above;
        /// default is the largest numbered category plus one.
        #[arg(long)]
        categories: Option<u32>,
        /// Also print the pairwise Cohen's kappa matrix.
        #[arg(long)]
        kappa: bool,
        /// Write the machine-readable report CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gist: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gist { target, to, config } => cmd_gist(&target, &to, config.as_deref()),
        Command::Serve { config } => {
            let config = load_config(&config).context("loading config")?;
            serve(config)?;
            Ok(())
        }
        Command::TrainLangid {
            corpus,
            lang,
            n,
            output,
        } => {
            let text = std::fs::read_to_string(&corpus)
                .with_context(|| format!("reading corpus {}", corpus.display()))?;
            let profile = train_profile(&text, &lang, n)?;
            profile
                .save_to_path(&output)
                .with_context(|| format!("writing profile {}", output.display()))?;
            eprintln!(
                "trained {} profile (n={}) from {} characters -> {}",
                lang,
                n,
                text.chars().count(),
                output.display()
            );
            Ok(())
        }
        Command::Eval {
            judgments,
            runs,
            seed,
            ci,
            resamples,
            forced_choice,
            categories,
            kappa,
            csv,
        } => cmd_eval(
            &judgments,
            runs,
            seed,
            ci,
            resamples,
            forced_choice,
            categories,
            kappa,
            csv.as_deref(),
        ),
    }
}

fn cmd_gist(target: &str, to: &str, config_path: Option<&Path>) -> anyhow::Result<()> {
    let config = match config_path {
        Some(path) => load_config(path).context("loading config")?,
        None => ProxyConfig::default(),
    };
    let services = Services::from_config(&config)?;
    let (bytes, transport_charset, base_url) = if let Ok(url) = Url::parse(target) {
        match url.scheme() {
            "http" | "https" => fetch_remote(&config, &url)?,
            "file" => {
                let path = url.to_file_path().ok().context("bad file:// URL")?;
                read_local(&path)?
            }
            other => bail!("unsupported URL scheme `{other}`"),
        }
    } else {
        read_local(Path::new(target))?
    };
    let result = gist_document(
        &bytes,
        transport_charset.as_deref(),
        &base_url,
        to,
        &services,
    )?;
    eprintln!(
        "gisted {} segments ({} glossed) in {:?}",
        result.stats.segments, result.stats.segments_gisted, result.elapsed
    );
    print!("{}", result.html);
    Ok(())
}

/// Local files are gisted as if served from a fixed synthetic origin so
/// output does not depend on the absolute path, and no network is touched.
fn read_local(path: &Path) -> anyhow::Result<(Vec<u8>, Option<String>, Url)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "page.html".to_string());
    let base = Url::parse(&format!("http://local.invalid/{name}"))?;
    Ok((bytes, None, base))
}

fn fetch_remote(config: &ProxyConfig, url: &Url) -> anyhow::Result<(Vec<u8>, Option<String>, Url)> {
    let fetched = gist_proxy::fetch::fetch_blocking(
        url,
        std::time::Duration::from_secs(config.timeout_s),
        config.max_body_bytes,
    )
    .with_context(|| format!("fetching {url}"))?;
    Ok((fetched.bytes, fetched.transport_charset, fetched.final_url))
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    judgments: &Path,
    runs: usize,
    seed: u64,
    ci: f64,
    resamples: usize,
    forced_choice: bool,
    categories: Option<u32>,
    kappa: bool,
    csv: Option<&Path>,
) -> anyhow::Result<()> {
    let mut set = JudgmentSet::from_csv_path(judgments)
        .with_context(|| format!("loading {}", judgments.display()))?;
    if runs > 0 {
        let universe = match categories {
            Some(c) => c,
            None => set.max_numbered_category().unwrap_or(1) + 1,
        };
        set = random_baseline(&set, universe, runs, seed, forced_choice)?;
        eprintln!(
            "added {runs} random subjects drawing uniformly over {universe} categories{}",
            if forced_choice {
                " (forced choice, none-of-the-above excluded)"
            } else {
                " (including none-of-the-above)"
            }
        );
    }
    let report_config = ReportConfig {
        ci_level: ci,
        resamples,
        seed,
        include_kappa: kappa,
    };
    let rep = report(&set, &report_config)?;
    print!("{}", rep.render_table());
    if let Some(path) = csv {
        std::fs::write(path, rep.to_csv())
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
