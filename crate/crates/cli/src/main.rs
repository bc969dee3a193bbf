use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use steinersym::angles::vdc_prefix;
use steinersym::experiment::{write_comparison_csv, ExperimentError, Frame};
use steinersym::grid::{read_grid, write_grid, write_pgm, write_profile_csv, RadialProfile};
use steinersym::verify::{all_passed, Suite};
use steinersym::{
    compare_sequences, discrepancy, gap, iterate, random_grid, rearrange_radial, steiner_direction,
    sup_distance, vdc_angle, Builtin, Calibration, DirectionSequence, DyadicAngle, GridError,
    GridFunction, IterateConfig,
};

#[derive(Parser)]
#[command(
    name = "steinersym",
    version,
    about = "Iterated Steiner symmetrization along the van der Corput directions"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Grid resolution n (the grid is n×n) for generated inputs.
    #[arg(long, global = true, default_value_t = 128)]
    resolution: usize,
    /// Half-width L of the domain [−L, L]² for generated inputs.
    #[arg(long, global = true, default_value_t = 2.0)]
    half_width: f64,
    /// Seed for random inputs and the `random` sequence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the van der Corput angles as exact turn fractions.
    Vdc {
        #[arg(long)]
        count: u64,
        /// Add the gap γ_n = θ_n − θ_{n−1}.
        #[arg(long)]
        gaps: bool,
        /// Add D_N for every prefix length N that is a power of two.
        #[arg(long)]
        discrepancy: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a builtin or random input grid.
    Generate {
        /// bump, square, disk or random.
        #[arg(long, default_value = "bump")]
        builtin: String,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// Apply S_α once.
    Symmetrize {
        input: PathBuf,
        /// Direction as a turn fraction, e.g. 1/4 or 3/2^3.
        #[arg(long)]
        angle: DyadicAngle,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// Write the symmetric decreasing rearrangement f*.
    Rearrange {
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// CSV of the radial profile (rank, radius, value).
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// Run f_n = S_{θ_n} f_{n−1} and report the convergence observables.
    Iterate {
        #[command(flatten)]
        source: Source,
        /// vdc, golden, random, random:SEED or fixed:A,B,...
        #[arg(long, default_value = "vdc")]
        seq: String,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        /// Report CSV (stdout if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Final grid.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        pgm: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// rotated (one resampling per step) or lab.
        #[arg(long, default_value = "rotated")]
        frame: Frame,
        /// Rescale to the input mass after every step.
        #[arg(long)]
        renormalize: bool,
        /// Fail unless the final distance and non-radial energy are at most
        /// this fraction of their initial values.
        #[arg(long, value_name = "RATIO")]
        assert_converged: Option<f64>,
    },
    /// Run several sequences on the same input and tabulate the final
    /// observables.
    Compare {
        #[command(flatten)]
        source: Source,
        /// Sequence to include; repeat for several.
        #[arg(long = "seq", default_values_t = ["vdc".to_string(), "golden".to_string(), "random".to_string(), "fixed:0,1/4".to_string()])]
        seqs: Vec<String>,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        #[arg(long, default_value = "rotated")]
        frame: Frame,
        /// Comparison CSV (stdout if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run an invariant suite: angles, rearrange, grid, experiment or all.
    Verify {
        suite: Suite,
        /// Summary file (stdout only if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-measure the interpolation budgets and print them as TOML.
    Calibrate {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// bump, square, disk or random.
    #[arg(long, conflicts_with = "input")]
    builtin: Option<String>,
    /// Grid file.
    #[arg(long)]
    input: Option<PathBuf>,
}

/// Exit statuses: 1 usage or I/O, 2 invariant or precondition failure,
/// 3 numeric failure.
enum Failure {
    Usage(anyhow::Error),
    Invariant(anyhow::Error),
    Numeric(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invariant(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Invariant(e) | Failure::Numeric(e) => e,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        match e {
            GridError::SupportViolation { .. } => Failure::Invariant(e.into()),
            GridError::InvalidSample { .. } => Failure::Numeric(e.into()),
            _ => Failure::Usage(e.into()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Step {
                source: GridError::SupportViolation { .. },
                ..
            } => Failure::Invariant(e.into()),
            ExperimentError::Grid(GridError::SupportViolation { .. }) => {
                Failure::Invariant(e.into())
            }
            ExperimentError::NonFinite { .. }
            | ExperimentError::Step {
                source: GridError::InvalidSample { .. },
                ..
            } => Failure::Numeric(e.into()),
            _ => Failure::Usage(e.into()),
        }
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = cli.common;
    match cli.command {
        Command::Vdc {
            count,
            gaps,
            discrepancy,
            output,
        } => cmd_vdc(&common, count, gaps, discrepancy, output.as_deref()),
        Command::Generate {
            builtin,
            output,
            pgm,
        } => {
            let f = builtin_grid(&builtin, &common)?;
            let stanza = stanza("generate", &common, &[("builtin", builtin.clone())]);
            save_grid(&f, &output, pgm.as_deref(), &stanza)?;
            Ok(())
        }
        Command::Symmetrize {
            input,
            angle,
            output,
            pgm,
        } => cmd_symmetrize(&common, &input, angle, &output, pgm.as_deref()),
        Command::Rearrange {
            input,
            output,
            profile,
            pgm,
        } => {
            let f = load_grid(&input)?;
            let star = rearrange_radial(&f);
            let stanza = stanza_for_grid(
                "rearrange",
                &common,
                &f,
                &[("input", input.display().to_string())],
            );
            save_grid(&star, &output, pgm.as_deref(), &stanza)?;
            if let Some(path) = profile {
                write_with(&path, |w| {
                    write_profile_csv(&RadialProfile::of(&f), w, &stanza)
                })?;
            }
            println!("sup_change={}", sup_distance(&f, &star)?);
            Ok(())
        }
        Command::Iterate {
            source,
            seq,
            steps,
            report,
            output,
            pgm,
            stride,
            frame,
            renormalize,
            assert_converged,
        } => {
            let config = IterateConfig {
                steps,
                frame,
                stride: stride.max(1),
                renormalize_mass: renormalize,
                ..IterateConfig::default()
            };
            let params = IterateParams {
                seq: &seq,
                config,
                report: report.as_deref(),
                output: output.as_deref(),
                pgm: pgm.as_deref(),
                assert_converged,
            };
            cmd_iterate(&common, &source, params)
        }
        Command::Compare {
            source,
            seqs,
            steps,
            frame,
            report,
        } => {
            let (f, label) = load_source(&source, &common)?;
            let kinds = seqs
                .iter()
                .map(|s| parse_sequence(s, common.seed))
                .collect::<Result<Vec<_>, _>>()?;
            let config = IterateConfig {
                steps,
                frame,
                ..IterateConfig::default()
            };
            let rows = compare_sequences(&f, &kinds, &config)?;
            let mut extra = vec![
                ("input", label),
                ("steps", steps.to_string()),
                ("frame", frame.to_string()),
            ];
            for k in &kinds {
                extra.push(("sequence", k.to_string()));
            }
            let stanza = stanza_for_grid("compare", &common, &f, &extra);
            write_to(report.as_deref(), |w| {
                write_comparison_csv(&rows, w, &stanza)
            })?;
            Ok(())
        }
        Command::Verify { suite, report } => {
            let outcomes = suite.run();
            let passed = outcomes.iter().filter(|o| o.passed).count();
            let mut lines: Vec<String> = stanza(
                "verify",
                &common,
                &[("suite", format!("{suite:?}").to_lowercase())],
            )
            .into_iter()
            .map(|l| format!("# {l}"))
            .collect();
            lines.extend(outcomes.iter().map(|o| o.to_string()));
            lines.push(format!("summary: {passed}/{} passed", outcomes.len()));
            let text = lines.join("\n") + "\n";
            print!("{text}");
            if let Some(path) = report {
                fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            if all_passed(&outcomes) {
                Ok(())
            } else {
                Err(Failure::Invariant(anyhow::anyhow!(
                    "{} of {} checks failed",
                    outcomes.len() - passed,
                    outcomes.len()
                )))
            }
        }
        Command::Calibrate { output } => {
            let measured = Calibration::measure()?;
            let mut text = String::new();
            for line in stanza("calibrate", &common, &[]) {
                text.push_str(&format!("# {line}\n"));
            }
            text.push_str(&measured.to_toml());
            write_to(output.as_deref(), |w| w.write_all(text.as_bytes()))?;
            Ok(())
        }
    }
}

fn cmd_vdc(
    common: &Common,
    count: u64,
    gaps: bool,
    with_discrepancy: bool,
    output: Option<&Path>,
) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::Usage(anyhow::anyhow!(
            "--count must be at least 1"
        )));
    }
    let mut text = String::new();
    let extra = [
        ("count", count.to_string()),
        ("gaps", gaps.to_string()),
        ("discrepancy", with_discrepancy.to_string()),
    ];
    for line in stanza("vdc", common, &extra) {
        text.push_str(&format!("# {line}\n"));
    }
    let mut header = vec!["n", "fraction", "radians"];
    if gaps {
        header.extend(["gap", "gap_radians"]);
    }
    if with_discrepancy {
        header.extend(["N", "D_N", "D_N_decimal"]);
    }
    text.push_str(&header.join(","));
    text.push('\n');
    let prefix = if with_discrepancy {
        vdc_prefix(usize::try_from(count).context("count too large")?)
    } else {
        Vec::new()
    };
    for n in 0..count {
        let a = vdc_angle(n);
        let mut row = vec![n.to_string(), a.to_string(), a.to_radians().to_string()];
        if gaps {
            if n == 0 {
                row.extend([String::new(), String::new()]);
            } else {
                let g = gap(n).map_err(anyhow::Error::from)?;
                row.extend([g.to_string(), g.to_radians().to_string()]);
            }
        }
        if with_discrepancy {
            let len = n + 1;
            if len.is_power_of_two() {
                let d = discrepancy(&prefix[..len as usize]).map_err(anyhow::Error::from)?;
                row.extend([len.to_string(), d.value.to_string(), d.to_f64().to_string()]);
            } else {
                row.extend([String::new(), String::new(), String::new()]);
            }
        }
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_to(output, |w| w.write_all(text.as_bytes()))?;
    Ok(())
}

fn cmd_symmetrize(
    common: &Common,
    input: &Path,
    angle: DyadicAngle,
    output: &Path,
    pgm: Option<&Path>,
) -> Result<(), Failure> {
    let f = load_grid(input)?;
    let s = steiner_direction(&f, angle)?;
    let drift = if f.mass() == 0.0 {
        0.0
    } else {
        (s.mass() - f.mass()) / f.mass()
    };
    let change = sup_distance(&f, &s)?;
    let stanza = stanza_for_grid(
        "symmetrize",
        common,
        &f,
        &[
            ("input", input.display().to_string()),
            ("angle", angle.to_string()),
        ],
    );
    save_grid(&s, output, pgm, &stanza)?;
    println!("mass_drift={drift}");
    println!("sup_change={change}");
    Ok(())
}

struct IterateParams<'a> {
    seq: &'a str,
    config: IterateConfig,
    report: Option<&'a Path>,
    output: Option<&'a Path>,
    pgm: Option<&'a Path>,
    assert_converged: Option<f64>,
}

fn cmd_iterate(common: &Common, source: &Source, p: IterateParams<'_>) -> Result<(), Failure> {
    let (f, label) = load_source(source, common)?;
    let seq = parse_sequence(p.seq, common.seed)?;
    let out = iterate(&f, &seq, &p.config, &label)?;
    let report = &out.report;
    let mut stanza = vec![
        format!("steinersym {}", env!("CARGO_PKG_VERSION")),
        "command=iterate".into(),
    ];
    stanza.push(format!("seed={}", common.seed));
    write_to(p.report, |w| {
        for line in &stanza {
            writeln!(w, "# {line}")?;
        }
        report.write_csv(w)
    })?;
    if let Some(path) = p.output {
        stanza.extend(report.header.stanza());
        save_grid(&out.final_grid, path, p.pgm, &stanza)?;
    }
    let (first, last) = (report.initial(), report.last());
    eprintln!(
        "steps={} distance {} -> {} non-radial energy {} -> {} mass_drift {}",
        last.step,
        first.distance,
        last.distance,
        first.nonradial_energy,
        last.nonradial_energy,
        last.mass_drift
    );
    if let Some(ratio) = p.assert_converged {
        let distance_ok = last.distance <= ratio * first.distance;
        let energy_ok = last.nonradial_energy <= ratio * first.nonradial_energy;
        if !(distance_ok && energy_ok) {
            return Err(Failure::Invariant(anyhow::anyhow!(
                "not converged: distance ratio {}, non-radial energy ratio {} (required ≤ {ratio})",
                last.distance / first.distance,
                last.nonradial_energy / first.nonradial_energy
            )));
        }
    }
    Ok(())
}

fn parse_sequence(spec: &str, seed: u64) -> Result<DirectionSequence, Failure> {
    if spec == "random" {
        return Ok(DirectionSequence::UniformRandom { seed });
    }
    Ok(spec
        .parse::<DirectionSequence>()
        .map_err(anyhow::Error::from)?)
}

fn builtin_grid(name: &str, common: &Common) -> Result<GridFunction, Failure> {
    if name == "random" {
        return Ok(random_grid(
            common.seed,
            common.resolution,
            common.half_width,
        )?);
    }
    let b: Builtin = name.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(b.sample(common.resolution, common.half_width)?)
}

fn load_source(source: &Source, common: &Common) -> Result<(GridFunction, String), Failure> {
    match (&source.builtin, &source.input) {
        (_, Some(path)) => Ok((load_grid(path)?, path.display().to_string())),
        (Some(name), None) => {
            let label = if name == "random" {
                format!("random:{}", common.seed)
            } else {
                name.clone()
            };
            Ok((builtin_grid(name, common)?, label))
        }
        (None, None) => Ok((builtin_grid("bump", common)?, "bump".into())),
    }
}

fn load_grid(path: &Path) -> Result<GridFunction, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match read_grid(&text) {
        Ok(f) => Ok(f),
        Err(GridError::InvalidSample { row, col, value }) => {
            Err(Failure::Numeric(anyhow::anyhow!(
                "{}: invalid sample {value} at row {row}, column {col}",
                path.display()
            )))
        }
        Err(e) => Err(Failure::Usage(
            anyhow::Error::from(e).context(format!("parsing {}", path.display())),
        )),
    }
}

fn save_grid(
    f: &GridFunction,
    path: &Path,
    pgm: Option<&Path>,
    stanza: &[String],
) -> Result<(), Failure> {
    write_with(path, |w| write_grid(f, w, stanza))?;
    if let Some(p) = pgm {
        write_with(p, |w| write_pgm(f, w, stanza))?;
    }
    Ok(())
}

fn write_with<F>(path: &Path, body: F) -> anyhow::Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    body(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_to<F>(path: Option<&Path>, body: F) -> anyhow::Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => write_with(p, |w| body(w)),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock).context("writing to stdout")?;
            lock.flush().context("writing to stdout")
        }
    }
}

fn stanza(command: &str, common: &Common, extra: &[(&str, String)]) -> Vec<String> {
    let mut lines = vec![
        format!("steinersym {}", env!("CARGO_PKG_VERSION")),
        format!("command={command}"),
        format!("resolution={}", common.resolution),
        format!("half_width={}", common.half_width),
        format!("seed={}", common.seed),
    ];
    lines.extend(extra.iter().map(|(k, v)| format!("{k}={v}")));
    lines
}

/// Like [`stanza`], but the grid's own resolution and half-width replace the
/// command-line defaults.
fn stanza_for_grid(
    command: &str,
    common: &Common,
    f: &GridFunction,
    extra: &[(&str, String)],
) -> Vec<String> {
    let actual = Common {
        resolution: f.resolution(),
        half_width: f.half_width(),
        ..common.clone()
    };
    stanza(command, &actual, extra)
}
