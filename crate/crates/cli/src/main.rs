use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use megden_core::dataio::{self, SyntheticConfig};
use megden_core::denoise::{self, DenoiseConfig, Mode, ThresholdRule, DEFAULT_LEVELS};
use megden_core::metrics;
use megden_core::{Matrix, Wavelet};

mod plot;

const THREADS_ENV: &str = "MEGDEN_THREADS";

#[derive(Parser)]
#[command(name = "megden", version, about = "Wavelet denoising of multichannel MEG trial recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic dataset (manifest + one CSV per trial).
    Gen(GenArgs),
    /// Average all trials element-wise.
    Average(AverageArgs),
    /// Denoise a dataset and write the K x post-stimulus estimate.
    Denoise(DenoiseArgs),
    /// Output SNIR (dB) between a trial average and a denoised estimate.
    Snir(SnirArgs),
    /// Dump scaling and wavelet filter coefficients.
    Filters(FiltersArgs),
    /// Render a CSV matrix as overlaid SVG traces.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Output directory.
    #[arg(long, default_value = "data")]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 274)]
    sensors: usize,
    #[arg(long, default_value_t = 120)]
    pre: usize,
    #[arg(long, default_value_t = 241)]
    post: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// White-noise standard deviation, fT.
    #[arg(long, default_value_t = 100.0)]
    noise_sigma: f64,
    /// Evoked response amplitude, fT.
    #[arg(long, default_value_t = 200.0)]
    amp: f64,
    /// Evoked response frequency, Hz.
    #[arg(long, default_value_t = 10.0)]
    freq: f64,
    /// Evoked response decay constant, ms.
    #[arg(long, default_value_t = 100.0)]
    decay: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Window {
    /// Post-stimulus samples only.
    Post,
    /// Pre- and post-stimulus samples.
    Full,
}

#[derive(Args)]
struct AverageArgs {
    /// Dataset directory.
    #[arg(long, default_value = "data")]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Window::Post)]
    window: Window,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WaveletName {
    Db4,
    Coif1,
    Ahaar,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeName {
    Single,
    Multi,
}

#[derive(Args)]
struct WaveletArgs {
    #[arg(long, value_enum, default_value_t = WaveletName::Ahaar)]
    wavelet: WaveletName,
    /// Adjusted-Haar zero parameter (2n zeros); ahaar only, default 2.
    #[arg(long)]
    n: Option<usize>,
}

impl WaveletArgs {
    fn wavelet(&self) -> Result<Wavelet> {
        match (self.wavelet, self.n) {
            (WaveletName::Ahaar, n) => Ok(Wavelet::AdjustedHaar(n.unwrap_or(2))),
            (_, Some(_)) => bail!("--n only applies to --wavelet ahaar"),
            (WaveletName::Db4, None) => Ok(Wavelet::Daubechies4),
            (WaveletName::Coif1, None) => Ok(Wavelet::Coiflet1),
        }
    }
}

#[derive(Args)]
struct DenoiseArgs {
    #[arg(long, default_value = "data")]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    wavelet: WaveletArgs,
    /// Decomposition depth J.
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    scales: usize,
    #[arg(long, value_enum, default_value_t = ModeName::Multi)]
    mode: ModeName,
    /// Trial index used in single mode.
    #[arg(long, default_value_t = 0)]
    trial: usize,
    /// Use universal soft-threshold shrinkage instead of the per-sensor estimate.
    #[arg(long)]
    threshold: bool,
}

#[derive(Args)]
struct SnirArgs {
    /// Trial-average matrix (K x N).
    #[arg(long)]
    mean: PathBuf,
    /// Denoised matrix (K x N).
    #[arg(long)]
    calc: PathBuf,
    /// Also write per-sensor energy ratios to this CSV.
    #[arg(long)]
    ratios: Option<PathBuf>,
}

#[derive(Args)]
struct FiltersArgs {
    #[command(flatten)]
    wavelet: WaveletArgs,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "MEG signal")]
    title: String,
    /// Time of the first column, ms.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    /// Sample period, ms.
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long, default_value_t = 960)]
    width: u32,
    #[arg(long, default_value_t = 540)]
    height: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => bail!("{THREADS_ENV}: {e}"),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<()> {
    let threads = thread_count()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring worker pool")
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<()> {
    thread_count().map(|_| ())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Average(args) => cmd_average(args),
        Command::Denoise(args) => cmd_denoise(args),
        Command::Snir(args) => cmd_snir(args),
        Command::Filters(args) => cmd_filters(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let config = SyntheticConfig {
        seed: args.seed,
        sensors: args.sensors,
        pre_samples: args.pre,
        post_samples: args.post,
        trials: args.trials,
        noise_sigma: args.noise_sigma,
        response_amp: args.amp,
        response_freq_hz: args.freq,
        response_decay_ms: args.decay,
    };
    let set = dataio::generate_synthetic(&config)?;
    dataio::save_dataset(&args.out, &config.manifest(), &set)?;
    println!(
        "wrote {} trials of {}x{} to {}",
        set.len(),
        set.sensors(),
        set.epoch().total(),
        args.out.display()
    );
    Ok(())
}

fn cmd_average(args: AverageArgs) -> Result<()> {
    let (_, set) = dataio::load_dataset(&args.data)?;
    let avg = denoise::average_trials(&set);
    let avg = match args.window {
        Window::Full => avg,
        Window::Post => avg.columns(set.epoch().pre_samples, set.epoch().post_samples)?,
    };
    dataio::save_matrix(&avg, &args.out)?;
    println!("wrote {}x{} average to {}", avg.rows(), avg.cols(), args.out.display());
    Ok(())
}

fn cmd_denoise(args: DenoiseArgs) -> Result<()> {
    let wavelet = args.wavelet.wavelet()?;
    let (_, set) = dataio::load_dataset(&args.data)?;
    let mode = match args.mode {
        ModeName::Single => Mode::SingleTrial(args.trial),
        ModeName::Multi => Mode::MultiTrial,
    };
    let config = DenoiseConfig::new(wavelet, args.scales, mode);
    let out = match (args.threshold, mode) {
        (false, _) => denoise::denoise(&set, &config)?,
        (true, Mode::MultiTrial) => {
            denoise::threshold_denoise_multi(&set, &config, ThresholdRule::Universal)?
        }
        (true, Mode::SingleTrial(i)) => {
            let trial = set
                .trial(i)
                .with_context(|| format!("trial index {i} out of range for {} trials", set.len()))?;
            denoise::threshold_denoise(trial, set.epoch(), &config, ThresholdRule::Universal)?
        }
    };
    dataio::save_matrix(&out, &args.out)?;
    let post = set.epoch().post_samples;
    let from_wavelet = denoise::wavelet_sensor_count(set.sensors(), post, args.scales);
    println!(
        "{wavelet}, J={}: {} sensors from approximation coefficients, {} mean-filled; wrote {}x{} to {}",
        args.scales,
        from_wavelet,
        set.sensors() - from_wavelet,
        out.rows(),
        out.cols(),
        args.out.display()
    );
    Ok(())
}

fn format_db(db: f64) -> String {
    if db.is_infinite() {
        if db > 0.0 { "inf dB" } else { "-inf dB" }.to_string()
    } else {
        format!("{db:.2} dB")
    }
}

fn cmd_snir(args: SnirArgs) -> Result<()> {
    let mean = dataio::load_matrix(&args.mean, None, None)?;
    let calc = dataio::load_matrix(&args.calc, Some(mean.rows()), Some(mean.cols()))?;
    let report = metrics::snir(&mean, &calc)?;
    if let Some(path) = &args.ratios {
        let ratios = Matrix::from_vec(report.sensors, 1, report.per_sensor_ratio.clone())?;
        dataio::save_matrix(&ratios, path)?;
    }
    println!("{}", format_db(report.snir_db));
    Ok(())
}

fn cmd_filters(args: FiltersArgs) -> Result<()> {
    let filters = args.wavelet.wavelet()?.filters()?;
    let mut out = String::new();
    let list = |v: &[f64]| v.iter().map(|c| format!("{c:.16e}")).collect::<Vec<_>>().join(", ");
    writeln!(out, "wavelet: {} ({} taps)", filters.wavelet(), filters.len())?;
    writeln!(out, "orthonormal (sum h = sqrt 2):")?;
    writeln!(out, "  h = [{}]", list(filters.lowpass()))?;
    writeln!(out, "  g = [{}]", list(filters.highpass()))?;
    writeln!(out, "literature convention (x {:.16e}):", filters.literature_scale())?;
    writeln!(out, "  h = [{}]", list(&filters.literature_lowpass()))?;
    writeln!(out, "  g = [{}]", list(&filters.literature_highpass()))?;
    print!("{out}");
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let data = dataio::load_matrix(&args.input, None, None)?;
    let spec = plot::PlotSpec {
        title: args.title,
        width: args.width,
        height: args.height,
        t0_ms: args.t0,
        dt_ms: args.dt,
        ..plot::PlotSpec::default()
    };
    let svg = plot::render_svg(&data, &spec);
    write_file(&args.out, svg.as_bytes())?;
    println!("wrote {} traces to {}", data.rows(), args.out.display());
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}
