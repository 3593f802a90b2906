use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C;

use poleflow::experiments::{self, amplitude_scan, caustic_envelope, heading_of, ScanSettings};
use poleflow::output::{drift_json, events_json, trajectory_csv};
use poleflow::plot::{self, Bounds, Curve, Series};
use poleflow::scenario::{self, Member, MemberRun, Scenario};
use poleflow::verify::{self, BoundaryGrid, Row};
use poleflow::{Error, Event, EventKind, IntegratorConfig, Result, Trajectory};

#[derive(Parser)]
#[command(
    name = "poleflow",
    version,
    about = "Point poles over a variable seabed"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct Common {
    /// Directory for output files.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Relative integration tolerance (absolute tolerance is 1% of it).
    #[arg(long)]
    tol: Option<f64>,
    /// Output formats to write.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["csv", "json", "svg"])]
    format: Vec<Format>,
}

impl Common {
    fn wants(&self, f: Format) -> bool {
        self.format.contains(&f)
    }

    fn config(&self, base: &IntegratorConfig) -> Result<IntegratorConfig> {
        let mut cfg = base.clone();
        if let Some(tol) = self.tol {
            cfg = cfg.with_tolerances(tol, tol * 1e-2);
        }
        cfg.validate()
            .map_err(|e| Error::Config(format!("--tol: {e}")))?;
        Ok(cfg)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)
            .map_err(|e| Error::io(format!("creating {}", self.out_dir.display()), e))?;
        let path = self.out_dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
        Ok(path)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario file or preset.
    Run {
        /// Path to a scenario TOML file, or the name of a preset.
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// Compare simulated pairs with a closed-form law over a parameter grid.
    Verify {
        #[arg(value_enum)]
        law: LawArg,
        /// Incidence angles from the normal, in degrees.
        #[arg(long, value_delimiter = ',')]
        theta_deg: Option<Vec<f64>>,
        /// Seabed values on the incident side (magnitudes for the mirror).
        #[arg(long, value_delimiter = ',')]
        s1: Option<Vec<f64>>,
        /// Seabed values beyond the step.
        #[arg(long, value_delimiter = ',')]
        s2: Option<Vec<f64>>,
        /// Pair strength `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        mu: Option<C>,
        /// Pair separation.
        #[arg(long, default_value_t = 0.05)]
        separation: f64,
        /// Imaginary offset of the leapfrogging vortices.
        #[arg(long, default_value_t = 0.5)]
        dz: f64,
        #[arg(long, default_value_t = 4)]
        half_periods: usize,
        /// Disk radii for the rainbow.
        #[arg(long, value_delimiter = ',', default_values_t = [0.5])]
        radius: Vec<f64>,
        /// Pair separations for the rainbow.
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.7, 1.0])]
        distance: Vec<f64>,
        /// Largest accepted error (radians for angles, relative otherwise).
        #[arg(long)]
        max_error: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Zigzag amplitude against departure angle in a trough.
    AmplitudeScan {
        #[arg(default_value = "trough")]
        scenario: String,
        /// Initial heights of the pair midpoint, one curve each.
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.5])]
        initial_im: Vec<f64>,
        /// Number of departure angles, evenly spaced inside (0, π).
        #[arg(long, default_value_t = 19)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Pairs reflected by a circular mirror, with the envelope of the reflected rays.
    Caustic {
        #[arg(default_value = "caustic-arc")]
        scenario: String,
        /// Ensemble size.
        #[arg(long, default_value_t = 40)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// List presets, print one, or export them all to --out-dir.
    Presets {
        /// Print the named preset.
        #[arg(long)]
        show: Option<String>,
        /// Write every preset file into --out-dir.
        #[arg(long)]
        export: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Snell,
    Reflection,
    Leapfrog,
    Rainbow,
}

/// Outcome of a command: clean or partial.
enum Outcome {
    Clean,
    Partial,
}

fn parse_complex(text: &str) -> std::result::Result<C, String> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts[..] {
        [re, im] => match (re.trim().parse(), im.trim().parse()) {
            (Ok(re), Ok(im)) => Ok(C::new(re, im)),
            _ => Err(format!("expected re,im numbers, got {text:?}")),
        },
        _ => Err(format!("expected re,im, got {text:?}")),
    }
}

fn load(scenario: &str) -> Result<Scenario> {
    let path = Path::new(scenario);
    if path.exists() {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(format!("reading {scenario}"), e))?;
        Scenario::from_toml(&text).map_err(|e| Error::Config(format!("{scenario}: {e}")))
    } else {
        Scenario::preset(scenario)
    }
}

fn failure_events(member: &Member, err: &Error) -> Vec<Event> {
    vec![Event {
        kind: EventKind::Failure,
        time: 0.0,
        pole: None,
        location: member
            .poles
            .first()
            .map_or(C::new(0.0, 0.0), |p| p.position),
        detail: Some(err.to_string()),
    }]
}

fn member_curves(traj: &Trajectory, member: &Member) -> Vec<Curve> {
    member
        .poles
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mu = p.strength.simple_strength().unwrap_or(C::new(0.0, 0.0));
            let mut c = Curve::new(traj.path(k).map(|(_, z)| z).collect(), plot::pole_color(mu));
            c.width = 0.8;
            c
        })
        .collect()
}

fn view_of(s: &Scenario) -> Option<Bounds> {
    s.plot.view.map(|[xmin, xmax, ymin, ymax]| Bounds {
        xmin,
        xmax,
        ymin,
        ymax,
    })
}

/// Writes per-member files and the overlay plot; single writer after all runs.
fn write_runs(
    common: &Common,
    s: &Scenario,
    runs: &[MemberRun],
    extra: Vec<Curve>,
) -> Result<Outcome> {
    let mut partial = false;
    let mut curves = Vec::new();
    for run in runs {
        let label = &run.member.label;
        match &run.trajectory {
            Ok(traj) => {
                if traj.ended_early() {
                    partial = true;
                    if let Some(e) = traj.terminal_event() {
                        eprintln!("{label}: {} at t = {}", e.kind.as_str(), e.time);
                    }
                }
                if common.wants(Format::Csv) && s.outputs.trajectory {
                    common.write(&format!("{label}.trajectory.csv"), &trajectory_csv(traj))?;
                }
                if common.wants(Format::Json) && s.outputs.events {
                    common.write(&format!("{label}.events.json"), &events_json(&traj.events))?;
                }
                curves.extend(member_curves(traj, &run.member));
            }
            Err(e) => {
                partial = true;
                eprintln!("{label}: integration failed: {e}");
                if common.wants(Format::Json) && s.outputs.events {
                    common.write(
                        &format!("{label}.events.json"),
                        &events_json(&failure_events(&run.member, e)),
                    )?;
                }
            }
        }
        if common.wants(Format::Json) && !run.drift.is_empty() {
            let mut reports = Vec::new();
            for (q, r) in s.outputs.drift.iter().zip(&run.drift) {
                match r {
                    Ok(r) => reports.push(r.clone()),
                    Err(e) => {
                        partial = true;
                        eprintln!("{label}: drift of {}: {e}", q.name());
                    }
                }
            }
            common.write(&format!("{label}.drift.json"), &drift_json(&reports))?;
        }
    }
    if common.wants(Format::Svg) && s.outputs.svg {
        curves.extend(extra);
        let seabed = runs.first().map(|r| &r.member.seabed);
        let svg = plot::trajectory_svg(&s.name, seabed, &curves, view_of(s));
        common.write(&format!("{}.svg", s.name), &svg)?;
    }
    Ok(if partial {
        Outcome::Partial
    } else {
        Outcome::Clean
    })
}

fn cmd_run(scenario: &str, common: &Common) -> Result<Outcome> {
    let mut s = load(scenario)?;
    s.integrator = common.config(&s.integrator)?;
    let runs = s.run()?;
    let outcome = write_runs(common, &s, &runs, Vec::new())?;
    let clean = runs.iter().filter(|r| r.is_clean()).count();
    println!(
        "{}: {} of {} members reached t = {}",
        s.name,
        clean,
        runs.len(),
        s.integrator.t_end
    );
    Ok(outcome)
}

fn write_rows(common: &Common, name: &str, rows: &[Row], tol: f64) -> Result<Outcome> {
    print!("{}", verify::rows_table(rows));
    let max = verify::max_error(rows);
    println!(
        "max error {} (tolerance {tol:e})",
        max.map_or("-".into(), |e| format!("{e:.3e}"))
    );
    if common.wants(Format::Csv) {
        common.write(&format!("verify-{name}.csv"), &verify::rows_csv(rows))?;
    }
    if common.wants(Format::Json) {
        let json = serde_json::to_string_pretty(rows).expect("rows serialize");
        common.write(&format!("verify-{name}.json"), &(json + "\n"))?;
    }
    Ok(if rows.iter().any(|r| r.status.is_failure()) {
        Outcome::Partial
    } else {
        Outcome::Clean
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    law: LawArg,
    theta_deg: Option<Vec<f64>>,
    s1: Option<Vec<f64>>,
    s2: Option<Vec<f64>>,
    mu: Option<C>,
    separation: f64,
    dz: f64,
    half_periods: usize,
    radius: &[f64],
    distance: &[f64],
    max_error: Option<f64>,
    common: &Common,
) -> Result<Outcome> {
    let cfg = common.config(&IntegratorConfig::default())?;
    let thetas = theta_deg.unwrap_or_else(|| (1..=8).map(|k| 10.0 * k as f64).collect());
    let (name, rows, tol) = match law {
        LawArg::Snell | LawArg::Reflection => {
            let mirror = matches!(law, LawArg::Reflection);
            let grid = BoundaryGrid {
                theta1_deg: thetas,
                s1: s1.unwrap_or_else(|| if mirror { vec![1.0, 3.0] } else { vec![1.0] }),
                s2: s2.unwrap_or_else(|| {
                    if mirror {
                        vec![1.0, 0.5]
                    } else {
                        vec![0.5, 2.0]
                    }
                }),
                mu: mu.unwrap_or(if mirror {
                    C::new(0.0, -1.0)
                } else {
                    C::new(0.0, 1.0)
                }),
                separation,
            };
            if grid.theta1_deg.is_empty() || grid.s1.is_empty() || grid.s2.is_empty() {
                return Err(Error::Config("verify: empty parameter grid".into()));
            }
            let tol = max_error.unwrap_or(1e-3);
            let rows = verify::verify_boundary(&grid, mirror, tol, &cfg);
            (if mirror { "reflection" } else { "snell" }, rows, tol)
        }
        LawArg::Leapfrog => {
            let tol = max_error.unwrap_or(0.02);
            let s1 = s1.as_ref().and_then(|v| v.first().copied()).unwrap_or(1.0);
            let s2 = s2.as_ref().and_then(|v| v.first().copied()).unwrap_or(3.0);
            let rows = vec![verify::verify_leapfrog(
                s1,
                s2,
                C::new(0.0, dz),
                half_periods,
                tol,
                &cfg,
            )];
            ("leapfrog", rows, tol)
        }
        LawArg::Rainbow => {
            if radius.is_empty() || distance.is_empty() {
                return Err(Error::Config("verify: empty parameter grid".into()));
            }
            let tol = max_error.unwrap_or(0.02);
            (
                "rainbow",
                verify::verify_rainbow(radius, distance, tol, &cfg),
                tol,
            )
        }
    };
    write_rows(common, name, &rows, tol)
}

fn cmd_amplitude(
    scenario: &str,
    initial_im: &[f64],
    points: usize,
    common: &Common,
) -> Result<Outcome> {
    let s = load(scenario)?;
    let seabed = s.seabed.clone().ok_or_else(|| {
        Error::Config("amplitude-scan needs a scenario with a single seabed".into())
    })?;
    let pair = s
        .pair
        .ok_or_else(|| Error::Config("amplitude-scan needs a scenario with a `pair`".into()))?;
    if points == 0 || initial_im.is_empty() {
        return Err(Error::Config("amplitude-scan: empty grid".into()));
    }
    let cfg = common.config(&s.integrator)?;
    let thetas: Vec<f64> = (1..=points)
        .map(|k| std::f64::consts::PI * k as f64 / (points + 1) as f64)
        .collect();
    let settings = ScanSettings {
        separation: pair.separation,
        mu: pair.mu,
        ..ScanSettings::default()
    };
    let curves = initial_im
        .iter()
        .map(|&y| amplitude_scan(&seabed, y, &thetas, &settings, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut csv =
        String::from("initial_im,theta_over_pi,theta,amplitude,max_abs_im,extrema,flagged\n");
    for c in &curves {
        for p in &c.points {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.initial_im,
                p.theta_over_pi,
                p.theta,
                p.amplitude,
                p.max_abs_im,
                p.extrema,
                p.flagged
            ));
            if p.flagged {
                eprintln!(
                    "Im z = {}: θ/π = {:.4} flagged (no zigzag within the time limit)",
                    c.initial_im, p.theta_over_pi
                );
            }
        }
    }
    if common.wants(Format::Csv) {
        common.write(&format!("{}.amplitude.csv", s.name), &csv)?;
    }
    if common.wants(Format::Json) {
        let json = serde_json::to_string_pretty(&curves).expect("curves serialize");
        common.write(&format!("{}.amplitude.json", s.name), &(json + "\n"))?;
    }
    if common.wants(Format::Svg) {
        let colors = ["#1f4fd1", "#d1281f", "#2a8c3a", "#8a2be2"];
        let series: Vec<Series> = curves
            .iter()
            .enumerate()
            .map(|(k, c)| Series {
                label: format!("Im z = {}", c.initial_im),
                points: c
                    .points
                    .iter()
                    .filter(|p| !p.flagged)
                    .map(|p| (p.theta_over_pi, p.amplitude))
                    .collect(),
                color: colors[k % colors.len()].into(),
            })
            .collect();
        let svg = plot::line_chart(
            &format!("{}: zigzag amplitude", s.name),
            "θ/π",
            "amplitude",
            &series,
        );
        common.write(&format!("{}.amplitude.svg", s.name), &svg)?;
    }
    for c in &curves {
        println!("Im z = {}:", c.initial_im);
        for p in &c.points {
            println!(
                "  θ/π {:.4}  amplitude {:.6}{}",
                p.theta_over_pi,
                p.amplitude,
                if p.flagged { "  (flagged)" } else { "" }
            );
        }
    }
    Ok(Outcome::Clean)
}

fn cmd_caustic(scenario: &str, count: usize, common: &Common) -> Result<Outcome> {
    let mut s = load(scenario)?;
    s.integrator = common.config(&s.integrator)?;
    let seabed = s
        .seabed
        .clone()
        .ok_or_else(|| Error::Config("caustic needs a scenario with a single seabed".into()))?;
    let pair = s
        .pair
        .ok_or_else(|| Error::Config("caustic needs a scenario with a `pair`".into()))?;
    let poleflow::Seabed::ArcMirror { center, radius, .. } = seabed else {
        return Err(Error::Config("caustic needs an arc-mirror seabed".into()));
    };
    let members = experiments::caustic_ensemble(
        &seabed,
        count,
        pair.separation,
        pair.center.im,
        &s.integrator,
    )?;
    let mut runs = Vec::new();
    let mut summary = Vec::new();
    for (k, m) in members.into_iter().enumerate() {
        let poles = experiments::pair_with_heading(
            C::new(m.release_x, pair.center.im),
            pair.separation,
            std::f64::consts::FRAC_PI_2,
            C::new(0.0, -1.0),
            &seabed,
        );
        let final_heading = m
            .trajectory
            .as_ref()
            .ok()
            .and_then(experiments::fitted_axis_angle)
            .map(|a| {
                heading_of(
                    a,
                    C::new(0.0, -1.0),
                    seabed.eval(m.trajectory.as_ref().unwrap().last().unwrap().positions[0]),
                )
            });
        if m.flagged {
            eprintln!(
                "pair released at x = {} straddles an end of the arc",
                m.release_x
            );
        }
        summary.push(serde_json::json!({
            "release_x": m.release_x,
            "flagged": m.flagged,
            "final_heading": final_heading,
            "terminal": m.trajectory.as_ref().ok().and_then(|t| t.terminal_event()).map(|e| e.kind.as_str()),
        }));
        runs.push(MemberRun {
            member: Member {
                label: format!("{}-{k:03}", s.name),
                seabed: seabed.clone(),
                poles,
            },
            trajectory: m.trajectory,
            drift: Vec::new(),
        });
    }
    s.outputs.drift.clear();
    let envelope = caustic_envelope(center, radius, 400);
    let mut env_curve = Curve::new(envelope.clone(), "#000000").dashed();
    env_curve.width = 1.5;
    let outcome = write_runs(common, &s, &runs, vec![env_curve])?;
    if common.wants(Format::Csv) {
        let mut csv = String::from("x,y\n");
        for z in &envelope {
            csv.push_str(&format!("{},{}\n", z.re, z.im));
        }
        common.write(&format!("{}.envelope.csv", s.name), &csv)?;
    }
    if common.wants(Format::Json) {
        let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
        common.write(&format!("{}.caustic.json", s.name), &(json + "\n"))?;
    }
    println!(
        "{}: {} pairs, focus at {}",
        s.name,
        runs.len(),
        center + C::new(0.0, radius / 2.0)
    );
    Ok(outcome)
}

fn cmd_presets(show: Option<&str>, export: bool, common: &Common) -> Result<Outcome> {
    if let Some(name) = show {
        let text = scenario::preset_source(name)
            .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
        print!("{text}");
        return Ok(Outcome::Clean);
    }
    for name in scenario::preset_names() {
        let s = Scenario::preset(name)?;
        println!("{name:<18} {}", s.description);
        if export {
            common.write(
                &format!("{name}.toml"),
                scenario::preset_source(name).expect("listed"),
            )?;
        }
    }
    Ok(Outcome::Clean)
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
    let result = match &cli.command {
        Command::Run { scenario, common } => cmd_run(scenario, common),
        Command::Verify {
            law,
            theta_deg,
            s1,
            s2,
            mu,
            separation,
            dz,
            half_periods,
            radius,
            distance,
            max_error,
            common,
        } => cmd_verify(
            *law,
            theta_deg.clone(),
            s1.clone(),
            s2.clone(),
            *mu,
            *separation,
            *dz,
            *half_periods,
            radius,
            distance,
            *max_error,
            common,
        ),
        Command::AmplitudeScan {
            scenario,
            initial_im,
            points,
            common,
        } => cmd_amplitude(scenario, initial_im, *points, common),
        Command::Caustic {
            scenario,
            count,
            common,
        } => cmd_caustic(scenario, *count, common),
        Command::Presets {
            show,
            export,
            common,
        } => cmd_presets(show.as_deref(), *export, common),
    };
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
