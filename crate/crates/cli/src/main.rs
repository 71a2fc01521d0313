//! `qdarp`: shape pulses, propagate the emitter and run sweeps from a JSON
//! configuration.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical refusal
//! (grid or step size), 4 I/O error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdarp_core::analysis::{adiabaticity_ratio, bloch_export, dressed_energies};
use qdarp_core::config::Config;
use qdarp_core::dynamics::propagate;
use qdarp_core::grid::SimGrid;
use qdarp_core::params::HBAR;
use qdarp_core::shaper::{self, autocorrelation, instantaneous_profile, SampledField};
use qdarp_core::sweep::{self, format_significant, Axis, SweepConfig, CSV_DIGITS};
use qdarp_core::Error;

#[derive(Parser)]
#[command(name = "qdarp", version, about = "Chirped spectral-hole pulses driving a two-level emitter")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shaped field, spectrum and intensity autocorrelation.
    Shape(Common),
    /// Density-matrix trajectory with dressed energies and adiabaticity.
    Evolve(Common),
    /// Dressed-state energies and adiabaticity ratio along the pulse.
    Dressed(Common),
    /// Bloch-vector path.
    Bloch(Common),
    /// Final occupation over a grid of parameters.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output if omitted. For `shape` this is a prefix
    /// for `<out>_field`, `<out>_spectrum` and `<out>_autocorr`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// `name=start:stop:count` or `name=v1,v2,...`; name is area, chirp, hole
    /// or temperature. Values may carry a `pi` suffix; areas are in radians.
    #[arg(long = "axis")]
    axes: Vec<String>,
    /// Run each point with and without phonons.
    #[arg(long)]
    phonon_toggle: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "QDARP_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Maximum number of propagations.
    #[arg(long, default_value_t = sweep::DEFAULT_BUDGET)]
    budget: usize,
    /// Record the wall-clock time in the metadata. Without it the timestamp
    /// comes from SOURCE_DATE_EPOCH, if set, so repeated runs are identical.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Column-oriented numeric table; `None` marks an undefined value.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| v.map_or_else(|| "nan".to_string(), |v| format_significant(v, CSV_DIGITS)))
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn json_value(&self) -> serde_json::Value {
        serde_json::json!({ "columns": self.columns, "rows": self.rows })
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => pretty(&self.json_value()),
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("tables serialize");
    s.push('\n');
    s
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn synthesize(cfg: &Config) -> Result<SampledField, Error> {
    let pulse = cfg.pulse_spec();
    let grid = SimGrid::sized_for(&pulse, cfg.grid_options())?;
    shaper::synthesize(&pulse, &cfg.emitter_config(), &grid)
}

fn shape(common: &Common) -> Result<(), Error> {
    let cfg = Config::load(&common.config)?;
    let field = synthesize(&cfg)?;
    let grid = field.grid();
    let profile = instantaneous_profile(&field)?;
    let mut f = Table::new(&["t_ps", "re_rabi", "im_rabi", "abs_rabi", "delta_inst_psinv"]);
    for (i, v) in field.time_envelope().iter().enumerate() {
        f.push(vec![Some(grid.time(i)), Some(v.re), Some(v.im), Some(v.norm()), profile.delta_inst[i]]);
    }
    let mut s = Table::new(&["omega_mev", "re_spec", "im_spec", "abs_spec"]);
    for (k, v) in field.spectrum().iter().enumerate() {
        let energy = cfg.emitter.energy_mev + HBAR * grid.frequency(k);
        s.push(vec![Some(energy), Some(v.re), Some(v.im), Some(v.norm())]);
    }
    let ac = autocorrelation(&field)?;
    let mut a = Table::new(&["delay_ps", "g"]);
    for (d, g) in ac.delays.iter().zip(&ac.values) {
        a.push(vec![Some(*d), Some(*g)]);
    }
    let parts = [("field", &f), ("spectrum", &s), ("autocorr", &a)];
    match (&common.out, common.format) {
        (Some(prefix), format) => {
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            let stem = prefix.with_extension("");
            for (name, table) in parts {
                let mut path = stem.clone().into_os_string();
                path.push(format!("_{name}.{ext}"));
                write_output(Some(Path::new(&path)), &table.render(format))?;
            }
            Ok(())
        }
        (None, Format::Json) => {
            let doc = serde_json::json!({
                "field": f.json_value(),
                "spectrum": s.json_value(),
                "autocorr": a.json_value(),
            });
            write_output(None, &pretty(&doc))
        }
        (None, Format::Csv) => {
            let text: Vec<String> = parts.iter().map(|(_, t)| t.csv()).collect();
            write_output(None, &text.join("\n"))
        }
    }
}

fn evolve(common: &Common) -> Result<(), Error> {
    let cfg = Config::load(&common.config)?;
    let field = synthesize(&cfg)?;
    let traj = propagate(&field, &cfg.emitter_config(), &cfg.solver_params())?;
    let mut t = Table::new(&[
        "t_ps", "occ", "sx", "sy", "sz", "e_plus_mev", "e_minus_mev", "adiab_ratio",
    ]);
    for i in 0..traj.times.len() {
        let s = traj.bloch[i];
        let e = traj.dressed_energies[i];
        t.push(vec![
            Some(traj.times[i]),
            Some(traj.occupation[i]),
            Some(s[0]),
            Some(s[1]),
            Some(s[2]),
            e.map(|e| e.0),
            e.map(|e| e.1),
            traj.adiabaticity_ratio[i],
        ]);
    }
    write_output(common.out.as_deref(), &t.render(common.format))
}

fn dressed(common: &Common) -> Result<(), Error> {
    let cfg = Config::load(&common.config)?;
    let field = synthesize(&cfg)?;
    let profile = instantaneous_profile(&field)?;
    let curve = dressed_energies(&profile);
    let ratio = adiabaticity_ratio(&profile);
    let mut t = Table::new(&[
        "t_ps", "abs_rabi", "delta_inst_psinv", "e_plus_mev", "e_minus_mev", "adiab_ratio",
    ]);
    for i in 0..profile.len() {
        t.push(vec![
            Some(profile.times[i]),
            Some(profile.omega_abs[i]),
            profile.delta_inst[i],
            curve.e_plus[i],
            curve.e_minus[i],
            ratio.ratio[i],
        ]);
    }
    eprintln!(
        "min gap {:.6} meV at {:.6} ps; max adiabaticity ratio {:.6} at {:.6} ps",
        curve.min_gap, curve.gap_time, ratio.max, ratio.max_time
    );
    write_output(common.out.as_deref(), &t.render(common.format))
}

fn bloch(common: &Common) -> Result<(), Error> {
    let cfg = Config::load(&common.config)?;
    let field = synthesize(&cfg)?;
    let traj = propagate(&field, &cfg.emitter_config(), &cfg.solver_params())?;
    let mut t = Table::new(&["t_ps", "sx", "sy", "sz"]);
    for p in bloch_export(&traj) {
        t.push(vec![Some(p.t), Some(p.sx), Some(p.sy), Some(p.sz)]);
    }
    write_output(common.out.as_deref(), &t.render(common.format))
}

fn run_sweep(args: &SweepArgs) -> Result<(), Error> {
    let base = Config::load(&args.common.config)?;
    let axes = args
        .axes
        .iter()
        .map(|a| a.parse::<Axis>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = SweepConfig::new(base, axes).with_phonon_toggle(args.phonon_toggle);
    cfg.budget = args.budget;
    let mut result = sweep::run_sweep(&cfg, args.jobs)?;
    if args.timestamp {
        result.metadata.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    let failures: usize = result.runs.iter().map(|r| r.failures.len()).sum();
    if failures > 0 {
        eprintln!("{failures} sweep point(s) failed; see the output for details");
    }
    let format = match args.common.format {
        Format::Csv => sweep::Format::Csv,
        Format::Json => sweep::Format::Json,
    };
    match &args.common.out {
        Some(path) => sweep::emit_results(&result, format, path),
        None => write_output(None, &result.render(format)),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Domain { .. } => 2,
        Error::GridSizing { .. } | Error::StepTooLarge { .. } => 3,
        Error::Io { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Shape(c) => shape(c),
        Command::Evolve(c) => evolve(c),
        Command::Dressed(c) => dressed(c),
        Command::Bloch(c) => bloch(c),
        Command::Sweep(s) => run_sweep(s),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdarp: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
