use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmc_fsi::alpha::alpha_terms;
use cmc_fsi::loopgain::ssaa;
use cmc_fsi::output::{fmt9, write_atomic};
use cmc_fsi::report::run_report;
use cmc_fsi::sda::{analyze, verdict_of};
use cmc_fsi::sim::{simulate_with, SimOptions};
use cmc_fsi::stability::{conservative_checks, gain_limit, hba_verdict, kmax};
use cmc_fsi::sweep::{write_sweep, Range, SweepRequest, SweepScheme};
use cmc_fsi::{ConverterConfig, Error, Result, Topology};

#[derive(Parser)]
#[command(name = "cmc-fsi", version, about = "Fast-scale instability analysis for current-mode control")]
struct Cli {
    /// Worker threads for parallel work (0 = available parallelism).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print α(D, p), its leading terms and K_max(D, p).
    Alpha {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        p: f64,
    },
    /// Closed-form harmonic-balance verdict and average-model phase margin.
    Analyze { config: PathBuf },
    /// Stability region and limit curves over a (D, p) or (D, z) grid.
    Sweep {
        #[arg(long)]
        scheme: SweepScheme,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        d_range: Range,
        #[arg(long, alias = "z-range")]
        p_range: Range,
        /// Comma-separated p or z values for the curve files.
        #[arg(long, value_delimiter = ',')]
        curves: Option<Vec<f64>>,
        /// Topology of the reference-bound overlay.
        #[arg(long, default_value = "boost")]
        overlay: Topology,
        #[arg(long)]
        out: PathBuf,
    },
    /// Switched simulation; writes the waveform trace as CSV.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value_t = 300)]
        periods: usize,
        #[arg(long, default_value_t = 20)]
        samples_per_period: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Periodic orbit and eigenvalues of the clock-to-clock map.
    Sda {
        config: PathBuf,
        /// Optional CSV of the eigenvalues.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All four analyses side by side.
    Report {
        config: PathBuf,
        /// Optional CSV copy of the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn cmd_alpha(d: f64, p: f64) -> Result<()> {
    let t = alpha_terms(d, p)?;
    println!("alpha={}", fmt9(t.closed));
    println!("alpha0={}", fmt9(t.alpha0));
    println!("alpha1={}", fmt9(t.alpha1));
    println!("correction={}", fmt9(t.correction));
    println!("kmax={}", kmax(d, p)?);
    Ok(())
}

fn cmd_analyze(path: &PathBuf) -> Result<()> {
    let cfg = ConverterConfig::load(path)?;
    println!("{}", cfg.summary());
    let v = hba_verdict(&cfg)?;
    println!(
        "HBA: {} index={} S={} margin={}",
        if v.stable { "stable" } else { "unstable" },
        fmt9(v.index),
        fmt9(v.required_ramp_slope),
        fmt9(v.margin)
    );
    if let Some((lim, gain)) = gain_limit(&cfg)? {
        println!("HBA: gain={} limit={lim}", fmt9(gain));
    }
    if cfg.voltage_loop.is_open() {
        let c = conservative_checks(&cfg)?;
        let flag = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
        println!(
            "HBA: conservative K<1/pi={} Ktilde<Ktilde_max(1,z)={} wc<ws/pi={}",
            flag(c.k_lt_1_over_pi),
            flag(c.ktilde_lt_z_over_pi),
            flag(c.wc_lt_ws_over_pi)
        );
    }
    let a = ssaa(&cfg)?;
    println!(
        "SSAA: wc={} rad/s wc/ws={} PM={} deg",
        fmt9(a.omega_c),
        fmt9(a.omega_c / cfg.omega_s()),
        fmt9(a.phase_margin_deg)
    );
    Ok(())
}

fn cmd_simulate(path: &PathBuf, periods: usize, samples: usize, out: &PathBuf) -> Result<()> {
    let cfg = ConverterConfig::load(path)?;
    let mut opts = SimOptions::periods(periods);
    opts.samples_per_period = samples;
    let trace = simulate_with(&cfg, &opts)?;
    write_atomic(out, &trace.to_csv())?;
    println!("classification={}", trace.classification);
    println!("periods={}", trace.duty_sequence.len());
    if let Some(t) = trace.dcm_at {
        println!("dcm_at={}", fmt9(t));
    }
    if !trace.duty_sequence.is_empty() {
        println!("mean_duty={}", fmt9(trace.mean_duty(50)));
    }
    println!("trace={}", out.display());
    Ok(())
}

fn cmd_sda(path: &PathBuf, out: Option<&PathBuf>) -> Result<()> {
    let cfg = ConverterConfig::load(path)?;
    let r = analyze(&cfg)?;
    let v = verdict_of(&r);
    let fp: Vec<String> = r.fixed_point.iter().map(|x| fmt9(*x)).collect();
    println!("fixed_point=[{}]", fp.join(", "));
    println!("duty={}", fmt9(r.duty_at_fixed_point));
    let mut csv = String::from("index,re,im,abs\n");
    for (i, z) in r.eigenvalues.iter().enumerate() {
        println!("eigenvalue,{i},{},{}", fmt9(z.re), fmt9(z.im));
        csv.push_str(&format!("{i},{},{},{}\n", fmt9(z.re), fmt9(z.im), fmt9(z.norm())));
    }
    let verdict = if v.marginal {
        "marginal"
    } else if v.stable {
        "stable"
    } else {
        "unstable"
    };
    println!("verdict={verdict}");
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(out) = out {
        write_atomic(out, &csv)?;
    }
    Ok(())
}

fn cmd_report(path: &PathBuf, out: Option<&PathBuf>) -> Result<()> {
    let cfg = ConverterConfig::load(path)?;
    let report = run_report(&cfg);
    print!("{}", report.to_text());
    if let Some(out) = out {
        write_atomic(out, &report.to_csv())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Alpha { d, p } => cmd_alpha(d, p),
        Command::Analyze { config } => cmd_analyze(&config),
        Command::Sweep {
            scheme,
            k,
            d_range,
            p_range,
            curves,
            overlay,
            out,
        } => {
            let req = SweepRequest {
                scheme,
                k,
                d_range,
                x_range: p_range,
                curve_values: curves,
                overlay_topology: overlay,
            };
            for f in write_sweep(&req, &out)? {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Simulate {
            config,
            periods,
            samples_per_period,
            out,
        } => cmd_simulate(&config, periods, samples_per_period, &out),
        Command::Sda { config, out } => cmd_sda(&config, out.as_ref()),
        Command::Report { config, out } => cmd_report(&config, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => Err(Error::Numerical(format!("worker pool: {e}"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
