mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use defect_charges::derive::derive;
use defect_charges::models::{build_model, Fault};
use defect_charges::numsim::{LatticeConfig, Simulation, CSV_HEADER};
use defect_charges::verify::{check_all, CheckOptions};
use defect_charges::{Error, ModelName, ParamValues};

use manifest::{now, sha256_hex, RunManifest};

const THREADS_VAR: &str = "DEFECT_CHARGES_THREADS";

#[derive(Parser)]
#[command(name = "defect-charges", version, about = "Conserved charges of integrable models with defects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
}

impl ParamArgs {
    fn values(self) -> ParamValues {
        let d = ParamValues::default();
        ParamValues {
            m: self.m.unwrap_or(d.m),
            g: self.g.unwrap_or(d.g),
            a: self.a.unwrap_or(d.a),
            sigma: self.sigma.unwrap_or(d.sigma),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Derive Riccati coefficients, charges and defect terms through an order
    Derive {
        /// bt, gt or sg
        model: ModelName,
        #[arg(long, default_value_t = 2)]
        order: i32,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the verification matrix
    Check {
        /// all, bt, gt or sg
        #[arg(long, default_value = "all")]
        model: String,
        /// deliberately corrupt the model (k-sign)
        #[arg(long)]
        inject_fault: Option<Fault>,
        /// random points for the Grassmann sampling check
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run a lattice simulation from a JSON config
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// also write a gnuplot script for the charge curves
        #[arg(long)]
        gnuplot: bool,
    },
}

enum Failure {
    Verification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse(_) | Error::InvalidParams(_) | Error::Json(_) | Error::Io(_) => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Verification(e.to_string()),
        }
    }
}

fn io_failure(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {}", path.display(), e))
}

fn setup_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{} must be a positive integer, got `{}`", THREADS_VAR, v)))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_derive(model: ModelName, order: i32, out: &Path, params: ParamValues) -> Result<(), Failure> {
    let started = now();
    let spec = build_model(model, params)?;
    let d = derive(&spec, order)?;
    let paths = d.write(out)?;
    let key = serde_json::json!({ "model": model, "order": order, "params": params });
    let mut man = RunManifest::new(sha256_hex(key.to_string().as_bytes()), params, started);
    for p in &paths {
        man.add(p).map_err(io_failure(p))?;
        println!("wrote {}", p.display());
    }
    let m = man.finish(out).map_err(io_failure(out))?;
    println!("wrote {}", m.display());
    for c in &d.densities.charges {
        println!("{} = {}", c.name, c.normal_form.text);
    }
    for c in &d.defect.charges {
        println!("{} = {}", c.name, c.value.text);
    }
    Ok(())
}

fn cmd_check(model: &str, fault: Option<Fault>, samples: usize, seed: u64, params: ParamValues) -> Result<(), Failure> {
    let models =
        if model.eq_ignore_ascii_case("all") { ModelName::ALL.to_vec() } else { vec![model.parse::<ModelName>()?] };
    let opts = CheckOptions { models, params, fault, samples, seed };
    let out = check_all(&opts);
    for c in &out {
        println!("{}", c);
    }
    let failed = out.iter().filter(|c| !c.passed).count();
    println!("{} checks, {} passed, {} failed", out.len(), out.len() - failed, failed);
    if failed > 0 {
        return Err(Failure::Verification(format!("{} checks failed", failed)));
    }
    Ok(())
}

fn gnuplot_script(csv: &str, has_number: bool) -> String {
    let col = |name: &str| CSV_HEADER.iter().position(|h| *h == name).unwrap() + 1;
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    let mut names = vec!["E", "P"];
    if has_number {
        names.insert(0, "N");
    }
    for q in names {
        let cols: Vec<String> = ["L", "R", "D", "tot"]
            .iter()
            .map(|side| format!("'{}' using 1:{} with lines", csv, col(&format!("{}_{}", q, side))))
            .collect();
        s.push_str(&format!("set output '{}.png'\nplot {}\n", q, cols.join(", \\\n     ")));
    }
    s
}

fn cmd_simulate(config: &Path, out: &Path, gnuplot: bool) -> Result<(), Failure> {
    let started = now();
    let bytes = std::fs::read(config).map_err(io_failure(config))?;
    let cfg = LatticeConfig::from_file(config)?;
    let sim = Simulation::new(cfg.clone())?;
    let report = sim.run()?;
    std::fs::create_dir_all(out).map_err(io_failure(out))?;
    let csv = out.join("charges.csv");
    report.write_csv_file(&csv)?;
    let mut man = RunManifest::new(sha256_hex(&bytes), cfg.params, started);
    man.add(&csv).map_err(io_failure(&csv))?;
    if gnuplot {
        let gp = out.join("charges.gp");
        let bt = cfg.model == defect_charges::numsim::SimModel::Bt;
        std::fs::write(&gp, gnuplot_script("charges.csv", bt)).map_err(io_failure(&gp))?;
        man.add(&gp).map_err(io_failure(&gp))?;
    }
    let m = man.finish(out).map_err(io_failure(out))?;
    let d = report.drift();
    println!("steps {} dt {:e} rows {}", report.steps, report.dt, report.rows.len());
    println!("drift  total: N {:.3e}  E {:.3e}  P {:.3e}", d.n_total, d.e_total, d.p_total);
    println!("drift  bulk:  N {:.3e}  E {:.3e}  P {:.3e}", d.n_bulk, d.e_bulk, d.p_bulk);
    if report.alpha_clamps > 0 {
        println!("warning: defect angle clamped {} times", report.alpha_clamps);
    }
    println!("wrote {}", csv.display());
    println!("wrote {}", m.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = setup_threads().and_then(|_| match &cli.command {
        Command::Derive { model, order, out, params } => cmd_derive(*model, *order, out, params.values()),
        Command::Check { model, inject_fault, samples, seed, params } => {
            cmd_check(model, *inject_fault, *samples, *seed, params.values())
        }
        Command::Simulate { config, out, gnuplot } => cmd_simulate(config, out, *gnuplot),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
