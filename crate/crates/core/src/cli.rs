//! Command-line front end.

use std::collections::BTreeMap;
use std::error::Error;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::designs::{digitization_report, document, DesignId};
use crate::electrostatics::output_config_energy;
use crate::format::{parse, serialize, LayoutDocument};
use crate::geometry::Polarization;
use crate::layout::{validate, Layout};
use crate::metrics::{compare, metrics_for, sig4, ComparisonManifest};
use crate::solver::{assign_inputs, solve, truth_table, SolverConfig, SolverMode};

type Failure = Box<dyn Error>;

#[derive(Parser, Debug)]
#[command(
    name = "qca",
    version,
    about = "Quantum-dot cellular automata layout simulator"
)]
struct Cli {
    /// Seed for the sweep solver's visiting order.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = SolverArg::Exhaustive)]
    solver: SolverArg,
    /// Interaction cutoff in nm, or `inf`.
    #[arg(long, global = true, default_value = "inf", value_parser = parse_radius)]
    radius: Radius,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Exhaustive,
    Sweep,
}

#[derive(Debug, Clone, Copy)]
struct Radius(Option<f64>);

#[derive(Debug, Clone, Default)]
struct Inputs(BTreeMap<String, bool>);

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a layout file for structural problems.
    Validate { file: PathBuf },
    /// Solve a layout for one input vector, or for all with --truth-table.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        truth_table: bool,
        /// Input bits, e.g. A=1,B=0,C=0. Defaults to the values stored in the file.
        #[arg(long, value_parser = parse_inputs)]
        inputs: Option<Inputs>,
    },
    /// Energy breakdown of one output candidate.
    Energy {
        file: PathBuf,
        #[arg(long)]
        output: String,
        #[arg(long, value_parser = parse_polarization, allow_hyphen_values = true)]
        candidate: Polarization,
        #[arg(long, value_parser = parse_inputs)]
        inputs: Option<Inputs>,
        /// Network state of the driver cells.
        #[arg(long, value_enum, default_value_t = StateArg::Stored)]
        state: StateArg,
    },
    /// Cell count, area, latency and cost of a layout.
    Metrics { file: PathBuf },
    /// Rank the designs of a comparison manifest by cost.
    Compare { manifest: PathBuf },
    /// Print a built-in design in `.qcal` form.
    Gen {
        design: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare a built-in design's electron distances with the published tables.
    Audit { design: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StateArg {
    /// Polarizations recorded in the file.
    Stored,
    /// Ground state from the configured solver.
    Ground,
}

fn parse_radius(s: &str) -> Result<Radius, String> {
    if s == "inf" {
        return Ok(Radius(None));
    }
    match s.parse::<f64>() {
        Ok(r) if r > 0.0 && r.is_finite() => Ok(Radius(Some(r))),
        _ => Err(format!(
            "expected a positive length in nm or `inf`, got `{s}`"
        )),
    }
}

fn parse_polarization(s: &str) -> Result<Polarization, String> {
    s.parse::<Polarization>().map_err(|e| e.to_string())
}

fn parse_inputs(s: &str) -> Result<Inputs, String> {
    let mut map = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected LABEL=0|1, got `{part}`"))?;
        let bit = match v {
            "0" => false,
            "1" => true,
            _ => return Err(format!("input `{k}` must be 0 or 1, got `{v}`")),
        };
        if map.insert(k.to_string(), bit).is_some() {
            return Err(format!("input `{k}` given twice"));
        }
    }
    Ok(Inputs(map))
}

fn load(path: &Path) -> Result<LayoutDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn with_inputs(layout: &Layout, inputs: &Option<Inputs>) -> Result<Layout, Failure> {
    Ok(match inputs {
        Some(Inputs(map)) => assign_inputs(layout, map)?,
        None => layout.clone(),
    })
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code: 0 on success, 1 on domain errors, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
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
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let config = SolverConfig {
        mode: match cli.solver {
            SolverArg::Exhaustive => SolverMode::Exhaustive,
            SolverArg::Sweep => SolverMode::Sweep,
        },
        effect_radius: cli.radius.0,
        seed: cli.seed,
        ..SolverConfig::default()
    };

    match cli.command {
        Command::Validate { file } => {
            let doc = load(&file)?;
            let violations = validate(&doc.layout);
            if violations.is_empty() {
                writeln!(out, "ok")?;
                return Ok(0);
            }
            for v in &violations {
                writeln!(out, "{v}")?;
            }
            Ok(1)
        }
        Command::Simulate {
            file,
            truth_table: true,
            ..
        } => {
            let doc = load(&file)?;
            doc.layout.check()?;
            truth_table(&doc.layout, &config)?.write_csv(out)?;
            Ok(0)
        }
        Command::Simulate { file, inputs, .. } => {
            let doc = load(&file)?;
            doc.layout.check()?;
            let layout = with_inputs(&doc.layout, &inputs)?;
            let s = solve(&layout, &config)?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["cell", "x_nm", "y_nm", "role", "label", "polarization"])?;
            for (i, c) in layout.cells.iter().enumerate() {
                let p = if s.ambiguous.contains(&i) {
                    "x".to_string()
                } else {
                    s.assignment.get(i).to_string()
                };
                w.write_record([
                    i.to_string(),
                    c.center.x.to_string(),
                    c.center.y.to_string(),
                    c.role.kind().to_string(),
                    c.role.label().unwrap_or("").to_string(),
                    p,
                ])?;
            }
            w.flush()?;
            drop(w);
            writeln!(out, "# total_energy_J {:.6e}", s.assignment.total_energy)?;
            writeln!(out, "# converged {} tie {}", s.converged, s.tie)?;
            Ok(0)
        }
        Command::Energy {
            file,
            output,
            candidate,
            inputs,
            state,
        } => {
            let doc = load(&file)?;
            let layout = with_inputs(&doc.layout, &inputs)?;
            let states = match state {
                StateArg::Stored => layout.states(),
                StateArg::Ground => solve(&layout, &config)?.assignment.partial(),
            };
            output_config_energy(&layout, &output, candidate, &states)?.write_csv(out)?;
            Ok(0)
        }
        Command::Metrics { file } => {
            let doc = load(&file)?;
            doc.layout.check()?;
            let m = metrics_for(&doc.layout)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["name", "cell_count", "area_um2", "latency_clocks", "cost"])?;
            w.write_record([
                m.name.clone(),
                m.cell_count.to_string(),
                sig4(m.area_um2),
                sig4(m.latency_clocks),
                sig4(m.cost),
            ])?;
            w.flush()?;
            Ok(0)
        }
        Command::Compare { manifest } => {
            let text = fs::read(&manifest).map_err(|e| format!("{}: {e}", manifest.display()))?;
            let m = ComparisonManifest::from_csv(text.as_slice())?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let rows = m.resolve(base, |p| {
                load(p).map(|d| d.layout).map_err(|e| e.to_string())
            })?;
            compare(&rows)?.write_csv(out)?;
            Ok(0)
        }
        Command::Gen { design, output } => {
            let id: DesignId = design.parse()?;
            let text = serialize(&document(id));
            match output {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => out.write_all(text.as_bytes())?,
            }
            Ok(0)
        }
        Command::Audit { design } => {
            let id: DesignId = design.parse()?;
            let report = digitization_report(id)
                .ok_or_else(|| format!("no published distances for `{id}`"))?;
            report.write_csv(out)?;
            Ok(0)
        }
    }
}
