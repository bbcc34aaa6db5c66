use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use log::info;

use uaa_core::output::{emit_plot_script, write_csv};
use uaa_core::regions::region_profile;
use uaa_core::units::{to_db, wavelength_from_ghz};
use uaa_core::{
    asymptotic_snr, fixtures, mrc_snr_closed_form, mrc_snr_direct, run_scenario, run_scenario_with_jobs,
    validate_all, ArcArrayGeometry, Error, LinkBudget, SweepResult, SweepScenario, UserLocation,
};

const EXIT_USAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(name = "uaa", version, about = "Near-field analysis of extremely large uniform arc arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-shot MRC SNR: direct summation, closed form and many-antenna limit.
    Snr(SnrArgs),
    /// Phase- and power-based region boundaries for a list of angles.
    Regions(RegionArgs),
    /// Run a scenario file and write its CSV and plot script.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run every built-in oracle and property check.
    Validate {
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Regenerate the four figure sweeps.
    Figures {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("size").required(true).args(["aperture", "radius"]))]
struct SnrArgs {
    /// Chord length D between the end antennas, m.
    #[arg(long)]
    aperture: Option<f64>,
    /// Arc radius r0, m.
    #[arg(long)]
    radius: Option<f64>,
    /// Arc support L (sagitta), m.
    #[arg(long)]
    support: f64,
    /// User range from the chord midpoint, m.
    #[arg(long)]
    r: f64,
    #[arg(long, allow_negative_numbers = true)]
    theta_deg: f64,
    #[arg(long, default_value_t = 30.0)]
    freq_ghz: f64,
    #[arg(long, default_value_t = 50.0, allow_negative_numbers = true)]
    gamma0_db: f64,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    aperture: f64,
    #[arg(long)]
    support: f64,
    /// Comma-separated user angles in degrees.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_value = "-90,-60,-30,0,30,60,90")]
    theta_deg: Vec<f64>,
    /// Power-ratio threshold in (0, 1).
    #[arg(long, default_value_t = 0.9)]
    upsilon: f64,
    #[arg(long, default_value_t = 30.0)]
    freq_ghz: f64,
}

/// Exit code and one-line message.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
            _ => EXIT_USAGE,
        };
        Failure(code, e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid usage"));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Snr(args) => snr(&args),
        Command::Regions(args) => regions(&args),
        Command::Sweep { config, out, jobs } => {
            let scenario = SweepScenario::from_file(&config)?;
            let result = execute(&scenario, jobs)?;
            write_outputs(&result, &out, &scenario.output)
        }
        Command::Validate { json } => validate(json),
        Command::Figures { out, jobs } => {
            for scenario in fixtures::all() {
                let result = execute(&scenario, jobs)?;
                write_outputs(&result, &out, &scenario.output)?;
            }
            Ok(())
        }
    }
}

fn execute(scenario: &SweepScenario, jobs: Option<usize>) -> Result<SweepResult, Failure> {
    info!("running scenario `{}` ({})", scenario.output, scenario.kind.as_str());
    Ok(match jobs {
        Some(n) => run_scenario_with_jobs(scenario, n)?,
        None => run_scenario(scenario)?,
    })
}

fn write_outputs(result: &SweepResult, dir: &Path, stem: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure(EXIT_CONFIG, format!("{}: {e}", dir.display())))?;
    let csv = dir.join(format!("{stem}.csv"));
    let script = dir.join(format!("{stem}.gp"));
    write_csv(result, &csv)?;
    emit_plot_script(result, &script)?;
    let infeasible = result.points.iter().filter(|p| p.status != "ok").count();
    println!("wrote {} ({} rows, {infeasible} points with infeasible metrics)", csv.display(), result.rows.len());
    println!("wrote {}", script.display());
    Ok(())
}

fn snr(args: &SnrArgs) -> Result<(), Failure> {
    let wavelength = wavelength_from_ghz(args.freq_ghz);
    let aperture = match (args.aperture, args.radius) {
        (Some(d), _) => d,
        (None, Some(r0)) => {
            if !(args.support > 0.0 && args.support <= r0) {
                return Err(Failure(EXIT_USAGE, "support must lie in (0, radius]".into()));
            }
            2.0 * (args.support * (2.0 * r0 - args.support)).sqrt()
        }
        (None, None) => unreachable!("clap enforces the size group"),
    };
    let geom = ArcArrayGeometry::from_aperture_support(aperture, args.support, wavelength)?;
    let link = LinkBudget::from_reference_snr_db(args.gamma0_db, wavelength)?;
    let user = UserLocation::from_degrees(args.r, args.theta_deg)?;
    println!(
        "geometry: M={} r0={:.6} m alpha={:.6} rad L={:.6} m D={:.6} m spacing={:.6} m",
        geom.count(),
        geom.radius(),
        geom.central_angle(),
        geom.support(),
        geom.aperture(),
        geom.actual_spacing()
    );
    let rows = [
        ("snr_direct", mrc_snr_direct(&geom, &user, &link)),
        ("snr_closed_form", mrc_snr_closed_form(&geom, &user, &link)),
        ("snr_asymptote", asymptotic_snr(&user, geom.support(), wavelength / 2.0, &link)),
    ];
    for (name, value) in rows {
        match value {
            Ok(v) => println!("{name:<16} {:>10.4} dB  {v:.10e}", to_db(v)),
            Err(e) => println!("{name:<16} n/a ({e})"),
        }
    }
    Ok(())
}

fn regions(args: &RegionArgs) -> Result<(), Failure> {
    let wavelength = wavelength_from_ghz(args.freq_ghz);
    let geom = ArcArrayGeometry::from_aperture_support(args.aperture, args.support, wavelength)?;
    let thetas: Vec<f64> = args.theta_deg.iter().map(|d| d.to_radians()).collect();
    if args.theta_deg.iter().any(|d| d.abs() > 90.0) {
        return Err(Failure(EXIT_USAGE, "angles must lie in [-90, 90] degrees".into()));
    }
    let rows = region_profile(&geom, &thetas, args.upsilon)?;
    let cell = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"));
    println!(
        "{:>9} {:>16} {:>16} {:>12} {:>12} {:>12}",
        "theta_deg", "uaa_ddrayl", "uaa_ddrayl_apx", "uaa_upd", "ula_ddrayl", "ula_upd"
    );
    for (deg, row) in args.theta_deg.iter().zip(rows) {
        println!(
            "{deg:>9.3} {:>16} {:>16} {:>12} {:>12} {:>12}",
            cell(row.uaa_ddrayl_exact),
            cell(row.uaa_ddrayl_approx),
            cell(row.uaa_upd),
            cell(row.ula_ddrayl),
            cell(row.ula_upd)
        );
    }
    Ok(())
}

fn validate(json: bool) -> Result<(), Failure> {
    let report = validate_all();
    if json {
        println!("{}", report.to_json());
    } else {
        for c in &report.checks {
            println!(
                "{} {:<30} measured {:>10.3e}  tolerance {:>8.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            );
        }
    }
    if report.passed {
        Ok(())
    } else {
        let n = report.failures().count();
        Err(Failure(EXIT_VALIDATION, format!("{n} validation check(s) failed")))
    }
}
