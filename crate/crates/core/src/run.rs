//! Whole runs: the work behind each command-line mode.
//!
//! The `*_run` functions are pure (no filesystem access) so they can be
//! tested and compared directly; [`execute`] writes their results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::energy::{
    blowup_form, ellipticity_margin, modified_density, modified_energy, variational_gradient, FrankConstants,
};
use crate::error::{Error, Result};
use crate::grid::{Boundary, GridSpec};
use crate::hydro::{concentration_scan, flow_step, initial_budget, EnergyBudget, FlowState, StepOptions};
use crate::io::config::{Mode, RunConfig};
use crate::io::recipes::{generate_initial, Recipe, RecipeParams};
use crate::io::rng::SplitMix64;
use crate::io::snapshot::{write_snapshot, Snapshot};
use crate::io::timeseries::{format_timeseries, Record};
use crate::manifold::{constraint_residuals, random_tangent_sample};
use crate::minimize::{harmonic_extension, minimize, MinimizeConfig, MinimizeResult};
use crate::vec3::{axpy, dot, mat_norm2};

fn params(c: &RunConfig) -> RecipeParams {
    RecipeParams {
        amplitude: c.amplitude,
        wavenumber: c.wavenumber,
        width: c.width,
    }
}

/// Number of steps to reach the horizon; the horizon must be a whole
/// number of steps.
pub fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    let n = (horizon / dt).round();
    if (n * dt - horizon).abs() > 1e-9 * horizon.max(dt) {
        return Err(Error::Validation {
            field: "horizon".into(),
            msg: format!("{horizon} is not a multiple of dt = {dt}"),
        });
    }
    Ok(n as usize)
}

pub fn record(step: u64, state: &FlowState, budget: &EnergyBudget, radius: f64, c0: f64) -> Record {
    let cr = constraint_residuals(&state.directors);
    let scan = concentration_scan(state, radius, c0);
    Record {
        step,
        time: state.t,
        kinetic: budget.kinetic,
        dirichlet_n: budget.dirichlet_n,
        dirichlet_m: budget.dirichlet_m,
        total: budget.total,
        visc_dissip: budget.visc_dissip,
        dir_dissip: budget.dir_dissip,
        budget_residual: budget.residual,
        max_norm_err_n: cr.norm_err_n,
        max_norm_err_m: cr.norm_err_m,
        max_dot_nm: cr.dot,
        max_local_energy: scan.max_local,
        concentration_fired: scan.fired,
    }
}

#[derive(Clone, Debug)]
pub struct FlowRun {
    pub records: Vec<Record>,
    /// `(step, snapshot)` every `snapshot_every` steps and at the end.
    pub snapshots: Vec<(usize, Snapshot)>,
    pub final_state: FlowState,
}

/// Evolve from `state` to the configured horizon.
pub fn flow_run_from(config: &RunConfig, mut state: FlowState) -> Result<FlowRun> {
    let steps = step_count(config.horizon, config.dt)?;
    let radius = config.radii()[0];
    let opts = StepOptions {
        retract: config.retract,
    };
    let mut records = vec![record(0, &state, &initial_budget(&state), radius, config.c0)];
    let mut snapshots = vec![(0, Snapshot::from_flow_state(&state))];
    for k in 1..=steps {
        let (next, budget) = flow_step(&state, config.dt, &opts)?;
        state = next;
        records.push(record(k as u64, &state, &budget, radius, config.c0));
        let due = config.snapshot_every > 0 && k % config.snapshot_every == 0;
        if due || k == steps {
            snapshots.push((k, Snapshot::from_flow_state(&state)));
        }
    }
    Ok(FlowRun {
        records,
        snapshots,
        final_state: state,
    })
}

pub fn flow2d_run(config: &RunConfig) -> Result<FlowRun> {
    let grid = config.grid()?;
    let init = generate_initial(config.recipe, config.seed, &grid, &params(config))?;
    flow_run_from(config, FlowState::new(init.u, init.directors, config.nu)?)
}

pub fn minimize_run(config: &RunConfig) -> Result<MinimizeResult> {
    let grid = config.grid()?;
    let data = generate_initial(config.recipe, config.seed, &grid, &params(config))?;
    // the harmonic extension can pass through degenerate frames; the recipe
    // field itself is always admissible
    let initial = match harmonic_extension(&data.directors) {
        Err(Error::DegenerateInput(_)) => data.directors.clone(),
        other => other?,
    };
    let mut mc = MinimizeConfig::new(grid, config.k);
    if let Some(t) = config.tau {
        mc.tau = t;
    }
    mc.max_iter = config.max_iter;
    mc.tol = config.tol;
    mc.eps0_sq = config.eps0_sq;
    mc.radii = config.radii();
    minimize(&mc, &initial)
}

/// One line of a self-check report.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pointwise and discrete consistency checks for the configured constants.
pub fn check_run(config: &RunConfig) -> Result<Vec<CheckLine>> {
    let k = &config.k;
    let mut rng = SplitMix64::new(config.seed);
    let mut out = Vec::new();

    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let (n, m, dn, dm) = random_tangent_sample(&mut rng);
        let w = modified_density(&n, &m, &dn, &dm, k)?;
        worst = worst.min(w - 0.5 * (k.alpha1() * mat_norm2(&dn) + k.alpha2() * mat_norm2(&dm)));
    }
    out.push(CheckLine {
        name: "coercivity",
        passed: worst >= -1e-12,
        detail: format!("min slack {worst:e}"),
    });

    let one = FrankConstants::one_constant();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let (n, m, dn, dm) = random_tangent_sample(&mut rng);
        let w = modified_density(&n, &m, &dn, &dm, &one)?;
        worst = worst.max((w - 0.5 * (mat_norm2(&dn) + mat_norm2(&dm))).abs());
    }
    out.push(CheckLine {
        name: "one-constant",
        passed: worst <= 1e-12,
        detail: format!("max deviation {worst:e}"),
    });

    let e = ellipticity_margin(&blowup_form(k), k);
    out.push(CheckLine {
        name: "ellipticity",
        passed: e.passes,
        detail: format!("lambda_min {:e} threshold {:e}", e.lambda_min, e.threshold),
    });

    let grid = GridSpec::uniform(3, 8, 1.0, Boundary::Dirichlet)?;
    let field = generate_initial(Recipe::RandomSmooth, config.seed, &grid, &RecipeParams::default())?.directors;
    let (gn, gm) = variational_gradient(&field, k);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let dir: Vec<_> = (0..2 * field.len())
            .map(|i| {
                if grid.is_boundary_node(i % field.len()) {
                    [0.0; 3]
                } else {
                    rng.gaussian3()
                }
            })
            .collect();
        let (dn, dm) = dir.split_at(field.len());
        let analytic: f64 = (0..field.len())
            .map(|i| dot(&gn[i], &dn[i]) + dot(&gm[i], &dm[i]))
            .sum();
        let at = |s: f64| {
            let mut f = field.clone();
            for i in 0..f.len() {
                f.n[i] = axpy(&f.n[i], s, &dn[i]);
                f.m[i] = axpy(&f.m[i], s, &dm[i]);
            }
            modified_energy(&f, k)
        };
        let fd = (at(1e-5) - at(-1e-5)) / 2e-5;
        worst = worst.max((fd - analytic).abs() / analytic.abs().max(1e-300));
    }
    out.push(CheckLine {
        name: "gradient",
        passed: worst <= 1e-6,
        detail: format!("max relative error {worst:e}"),
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub width: f64,
    pub initial_max_local: f64,
    pub final_max_local: f64,
    pub initial_dirichlet: f64,
    pub final_dirichlet: f64,
}

/// Evolve concentrated bumps of each configured width and report how much
/// energy stays concentrated in the scan disk.
pub fn bubble_probe_run(config: &RunConfig) -> Result<Vec<ProbeRow>> {
    let grid = config.grid()?;
    let radius = config.radii()[0];
    config
        .probe_widths
        .iter()
        .map(|&width| {
            let p = RecipeParams {
                width,
                ..params(config)
            };
            let init = generate_initial(Recipe::ConcentratedBump, config.seed, &grid, &p)?;
            let state = FlowState::new(init.u, init.directors, config.nu)?;
            let first = concentration_scan(&state, radius, config.c0).max_local;
            let b0 = initial_budget(&state);
            let run = flow_run_from(
                &RunConfig {
                    snapshot_every: 0,
                    ..config.clone()
                },
                state,
            )?;
            let b1 = initial_budget(&run.final_state);
            Ok(ProbeRow {
                width,
                initial_max_local: first,
                final_max_local: concentration_scan(&run.final_state, radius, config.c0).max_local,
                initial_dirichlet: b0.dirichlet_n + b0.dirichlet_m,
                final_dirichlet: b1.dirichlet_n + b1.dirichlet_m,
            })
        })
        .collect()
}

/// What a mode produced: files written and a short human-readable summary.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    /// False when a check or the ellipticity test failed.
    pub ok: bool,
}

fn write(path: PathBuf, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, text)?;
    files.push(path);
    Ok(())
}

/// Run `config.mode` and write its outputs under `out`.
pub fn execute(config: &RunConfig, out: &Path) -> Result<Outcome> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    let mut o = Outcome {
        ok: true,
        ..Default::default()
    };
    write(out.join("config.txt"), &config.to_text(), &mut o.files)?;
    match config.mode {
        Mode::Flow2d => {
            let run = flow2d_run(config)?;
            write(
                out.join("timeseries.csv"),
                &format_timeseries(&run.records),
                &mut o.files,
            )?;
            for (step, snap) in &run.snapshots {
                let path = out.join(format!("snap_{step:06}.bin"));
                write_snapshot(snap, &path)?;
                o.files.push(path);
            }
            let last = run.records.last().expect("initial record");
            let fired = run.records.iter().filter(|r| r.concentration_fired).count();
            o.summary = format!(
                "flow2d: {} steps to t = {}, total energy {:e} -> {:e}, concentration fired on {} steps",
                run.records.len() - 1,
                last.time,
                run.records[0].total,
                last.total,
                fired
            );
        }
        Mode::Minimize => {
            let r = minimize_run(config)?;
            let mut csv = String::from("iteration,energy,grad_norm\n");
            for (i, (e, g)) in r.energy_trace.iter().zip(&r.grad_norm_trace).enumerate() {
                let _ = writeln!(csv, "{i},{e:.16e},{g:.16e}");
            }
            write(out.join("minimize.csv"), &csv, &mut o.files)?;
            let mut cand = String::from("node,x,y,z,radius,scaled_energy\n");
            let g = &r.field.grid;
            for e in r.scan.entries.iter().filter(|e| r.scan.flagged.contains(&e.center)) {
                let x = g.position(e.center);
                let _ = writeln!(
                    cand,
                    "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    e.center, x[0], x[1], x[2], e.radius, e.value
                );
            }
            write(out.join("candidates.csv"), &cand, &mut o.files)?;
            let mut snap = Snapshot::from_directors(&r.field);
            snap.fields.push(("lambda1".into(), r.lambda1.clone()));
            snap.fields.push(("lambda2".into(), r.lambda2.clone()));
            snap.fields.push(("mu".into(), r.mu.clone()));
            let path = out.join("minimizer.bin");
            write_snapshot(&snap, &path)?;
            o.files.push(path);
            o.summary = format!(
                "minimize: {} after {} iterations, energy {:e}, projected-gradient norm {:e}, {} candidate(s)",
                if r.converged { "converged" } else { "NOT converged" },
                r.iterations,
                r.energy_trace.last().expect("initial energy"),
                r.grad_norm,
                r.scan.flagged.len()
            );
        }
        Mode::Check => {
            let lines = check_run(config)?;
            let mut text = String::new();
            for l in &lines {
                let _ = writeln!(
                    text,
                    "{} {}: {}",
                    if l.passed { "PASS" } else { "FAIL" },
                    l.name,
                    l.detail
                );
            }
            o.ok = lines.iter().all(|l| l.passed);
            write(out.join("check.txt"), &text, &mut o.files)?;
            o.summary = text.trim_end().to_string();
        }
        Mode::Ellipticity => {
            let e = ellipticity_margin(&blowup_form(&config.k), &config.k);
            let text = format!(
                "lambda_min = {:.16e}\nthreshold = {:.16e}\npasses = {}\n",
                e.lambda_min, e.threshold, e.passes
            );
            o.ok = e.passes;
            write(out.join("ellipticity.txt"), &text, &mut o.files)?;
            o.summary = text.trim_end().replace('\n', ", ");
        }
        Mode::BubbleProbe => {
            let rows = bubble_probe_run(config)?;
            let mut csv = String::from("width,initial_max_local,final_max_local,initial_dirichlet,final_dirichlet\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    r.width, r.initial_max_local, r.final_max_local, r.initial_dirichlet, r.final_dirichlet
                );
            }
            write(out.join("bubble_probe.csv"), &csv, &mut o.files)?;
            o.summary = format!("bubble-probe: {} width(s)", rows.len());
        }
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config;

    #[test]
    fn step_count_requires_whole_steps() {
        assert_eq!(step_count(0.5, 1e-3).unwrap(), 500);
        assert_eq!(step_count(0.0, 1e-3).unwrap(), 0);
        assert!(step_count(0.5, 0.3).is_err());
    }

    #[test]
    fn small_flow_run_is_monotone_and_records_every_step() {
        let c = parse_config("cells = 16\nrecipe = random-smooth\nseed = 3\ndt = 0.005\nhorizon = 0.05\nsnapshot_every = 4\namplitude = 0.5").unwrap();
        let run = flow2d_run(&c).unwrap();
        assert_eq!(run.records.len(), 11);
        assert_eq!(run.snapshots.iter().map(|s| s.0).collect::<Vec<_>>(), vec![0, 4, 8, 10]);
        for w in run.records.windows(2) {
            assert!(w[1].total <= w[0].total);
        }
        assert!(run
            .records
            .iter()
            .all(|r| r.max_norm_err_n <= 1e-12 && r.max_dot_nm <= 1e-12));
    }

    #[test]
    fn check_mode_passes_for_general_constants() {
        let c = parse_config("mode = check\nk2 = 2.5\nk7 = 0.3\nk11 = 1.2\n").unwrap();
        let lines = check_run(&c).unwrap();
        assert_eq!(lines.len(), 4);
        assert!(lines.iter().all(|l| l.passed), "{lines:?}");
    }

    #[test]
    fn minimize_mode_on_small_grid() {
        let c = parse_config("mode = minimize\nndim = 3\nboundary = dirichlet\ncells = 6\nlength = 1.0\nrecipe = circle-wave\ntol = 1e-6").unwrap();
        let r = minimize_run(&c).unwrap();
        assert!(r.converged);
    }

    #[test]
    fn execute_writes_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let c = parse_config("mode = ellipticity").unwrap();
        let o = execute(&c, dir.path()).unwrap();
        assert!(o.ok);
        let names: Vec<_> = o
            .files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["config.txt", "ellipticity.txt"]);
    }
}
