//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Reference values come from closed forms or from samplers written
//! here independently of the library.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use biaxial::energy::{
    blowup_form, ellipticity_margin, modified_density, modified_energy, total_energy, variational_gradient,
};
use biaxial::hydro::{concentration_scan, flow_step, initial_budget, StepOptions};
use biaxial::io::rng::SplitMix64;
use biaxial::io::{parse_config, read_snapshot, write_snapshot, Snapshot};
use biaxial::manifold::constraint_residuals;
use biaxial::minimize::{el_residual, harmonic_extension, minimize};
use biaxial::run::execute;
use biaxial::vec3::{mat_vec, rotation, Mat3, Vec3};
use biaxial::{
    Boundary, DirectorPairField, EnergyBudget, FlowState, FrankConstants, GridSpec, MinimizeConfig, VectorField2D,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

// ---------- independent samplers ----------

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(a: Vec3) -> Vec3 {
    let l = dot(&a, &a).sqrt();
    a.map(|v| v / l)
}

fn frob2(m: &Mat3) -> f64 {
    m.iter().flatten().map(|v| v * v).sum()
}

/// Orthonormal pair from two gaussian vectors by Gram-Schmidt.
fn random_frame(rng: &mut SplitMix64) -> (Vec3, Vec3) {
    let n = unit(rng.gaussian3());
    let b = rng.gaussian3();
    let c = dot(&b, &n);
    (n, unit([b[0] - c * n[0], b[1] - c * n[1], b[2] - c * n[2]]))
}

/// Tangent Jacobians: each column pair `(x, y)` is a gaussian vector in R^6
/// orthogonally projected onto the tangent space of the constraint set,
/// whose normal space is spanned by `(n, 0)`, `(0, m)`, `(m, n) / sqrt 2`.
fn tangent_sample(rng: &mut SplitMix64) -> (Vec3, Vec3, Mat3, Mat3) {
    let (n, m) = random_frame(rng);
    let mut dn = [[0.0; 3]; 3];
    let mut dm = [[0.0; 3]; 3];
    for a in 0..3 {
        let mut x = rng.gaussian3();
        let mut y = rng.gaussian3();
        let pn = dot(&x, &n);
        let pm = dot(&y, &m);
        let pmix = 0.5 * (dot(&x, &m) + dot(&y, &n));
        for i in 0..3 {
            x[i] -= pn * n[i] + pmix * m[i];
            y[i] -= pm * m[i] + pmix * n[i];
        }
        for i in 0..3 {
            dn[i][a] = x[i];
            dm[i][a] = y[i];
        }
    }
    (n, m, dn, dm)
}

/// k1..k6 log-uniform in [0.05, 20]; k7..k12 uniform in [0, 5] or exactly 0.
fn random_constants(rng: &mut SplitMix64) -> FrankConstants {
    let mut k = [0.0; 12];
    for (i, v) in k.iter_mut().enumerate() {
        *v = if i < 6 {
            (0.05f64.ln() + rng.next_f64() * (20.0f64 / 0.05).ln()).exp()
        } else if rng.next_f64() < 0.1 {
            0.0
        } else {
            5.0 * rng.next_f64()
        };
    }
    FrankConstants::new(k).unwrap()
}

fn general_constants() -> FrankConstants {
    FrankConstants::new([1.0, 2.0, 1.5, 1.2, 0.8, 1.1, 0.3, 0.2, 0.1, 0.4, 0.5, 0.6]).unwrap()
}

// ---------- 1-3: pointwise ----------

fn coercivity() -> Outcome {
    let mut rng = SplitMix64::new(0xC0E1);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let k = random_constants(&mut rng);
        for _ in 0..1000 {
            let (n, m, dn, dm) = tangent_sample(&mut rng);
            let w = modified_density(&n, &m, &dn, &dm, &k).unwrap();
            worst = worst.min(w - 0.5 * (k.alpha1() * frob2(&dn) + k.alpha2() * frob2(&dm)));
        }
    }
    outcome(
        worst >= -1e-12,
        format!("1e6 samples, 1e3 constant sets, min slack {worst:.3e}"),
    )
}

fn one_constant() -> Outcome {
    let mut rng = SplitMix64::new(0x0C);
    let k = FrankConstants::one_constant();
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let (n, m, dn, dm) = tangent_sample(&mut rng);
        let w = modified_density(&n, &m, &dn, &dm, &k).unwrap();
        worst = worst.max((w - 0.5 * (frob2(&dn) + frob2(&dm))).abs());
    }
    outcome(worst <= 1e-12, format!("1e5 samples, max deviation {worst:.3e}"))
}

fn ellipticity() -> Outcome {
    let mut rng = SplitMix64::new(0xE11);
    let mut worst = f64::INFINITY;
    let mut rayleigh_ok = true;
    for _ in 0..200 {
        let k = random_constants(&mut rng);
        let form = blowup_form(&k);
        let e = ellipticity_margin(&form, &k);
        worst = worst.min(e.lambda_min - 0.5 * k.alpha3());
        // the reported minimum must bound the form from below
        for _ in 0..20 {
            let xi: Mat3 = [rng.gaussian3(), rng.gaussian3(), rng.gaussian3()];
            rayleigh_ok &= form.energy(&xi) >= e.lambda_min * frob2(&xi) - 1e-10 * frob2(&xi);
        }
    }
    let one = FrankConstants::one_constant();
    let l1 = ellipticity_margin(&blowup_form(&one), &one).lambda_min;
    outcome(
        worst >= -1e-10 && l1 >= 0.5 - 1e-12 && rayleigh_ok,
        format!("min lambda_min - alpha3/2 = {worst:.3e}, one-constant lambda_min = {l1:.15}"),
    )
}

// ---------- 4-6: discrete energy ----------

fn box_grid(cells: usize) -> GridSpec {
    GridSpec::uniform(3, cells, 1.0, Boundary::Dirichlet).unwrap()
}

/// A smooth 3-D frame field and the same field rotated by an angle that
/// vanishes on the boundary of the unit cube.
fn null_lagrangian_pair(grid: &GridSpec) -> (DirectorPairField, DirectorPairField) {
    let base = |x: [f64; 3]| {
        let axis = unit([1.0 + 0.5 * x[1], 0.7 * x[2] - 0.2, 0.4 + x[0] * x[1]]);
        rotation(&axis, 1.3 * x[0] + 0.9 * x[1] * x[1] - 0.6 * x[2])
    };
    let a = DirectorPairField::from_fn(grid.clone(), |x| {
        let r = base(x);
        (mat_vec(&r, &[0.0, 0.0, 1.0]), mat_vec(&r, &[1.0, 0.0, 0.0]))
    });
    let b = DirectorPairField::from_fn(grid.clone(), |x| {
        let bump = 64.0 * x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]) * x[2] * (1.0 - x[2]);
        let twist = rotation(&unit([0.3, -0.5, 1.0]), 1.5 * bump);
        let r = base(x);
        (
            mat_vec(&twist, &mat_vec(&r, &[0.0, 0.0, 1.0])),
            mat_vec(&twist, &mat_vec(&r, &[1.0, 0.0, 0.0])),
        )
    });
    (a, b)
}

fn null_lagrangian() -> Outcome {
    let k = FrankConstants::one_constant();
    let diff = |cells| {
        let (a, b) = null_lagrangian_pair(&box_grid(cells));
        let (ea, eb) = (total_energy(&a, &k), total_energy(&b, &k));
        let d = (ea.null_n - eb.null_n).abs() + (ea.null_m - eb.null_m).abs();
        (
            d,
            ea.null_n.abs() + ea.null_m.abs(),
            (ea.dirichlet() - eb.dirichlet()).abs(),
        )
    };
    let (d16, scale, dd) = diff(16);
    let (d32, _, _) = diff(32);
    let ratio = d16 / d32;
    outcome(
        ratio >= 3.0,
        format!(
            "|NL(A)-NL(B)| {d16:.3e} -> {d32:.3e}, ratio {ratio:.2} (NL scale {scale:.3e}, Dirichlet gap {dd:.3e})"
        ),
    )
}

fn gradient_fd() -> Outcome {
    let grid = box_grid(12);
    let k = general_constants();
    let field = DirectorPairField::from_fn(grid.clone(), |x| {
        let axis = unit([0.4 + x[2], 1.0 - x[0], 0.3 + x[1] * x[0]]);
        let r = rotation(&axis, 2.0 * x[0] - x[1] + 1.5 * x[2] * x[2]);
        (mat_vec(&r, &[0.0, 0.0, 1.0]), mat_vec(&r, &[1.0, 0.0, 0.0]))
    });
    let (gn, gm) = variational_gradient(&field, &k);
    let mut rng = SplitMix64::new(0x6AD);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let dir: Vec<(Vec3, Vec3)> = (0..field.len())
            .map(|i| {
                if grid.is_boundary_node(i) {
                    ([0.0; 3], [0.0; 3])
                } else {
                    (rng.gaussian3(), rng.gaussian3())
                }
            })
            .collect();
        let analytic: f64 = dir
            .iter()
            .enumerate()
            .map(|(i, (a, b))| dot(&gn[i], a) + dot(&gm[i], b))
            .sum();
        let at = |s: f64| {
            let mut f = field.clone();
            for (i, (a, b)) in dir.iter().enumerate() {
                for c in 0..3 {
                    f.n[i][c] += s * a[c];
                    f.m[i][c] += s * b[c];
                }
            }
            modified_energy(&f, &k)
        };
        let h = 1e-5;
        let fd = (at(h) - at(-h)) / (2.0 * h);
        worst = worst.max((fd - analytic).abs() / analytic.abs());
    }
    outcome(
        worst <= 1e-6,
        format!("12^3, 50 directions, max relative error {worst:.3e}"),
    )
}

fn minimizer() -> Outcome {
    let grid = box_grid(16);
    let a = PI / 2.0;
    let boundary = DirectorPairField::from_fn(grid.clone(), |x| {
        ([(a * x[0]).cos(), (a * x[0]).sin(), 0.0], [0.0, 0.0, 1.0])
    });
    let k = FrankConstants::one_constant();
    let initial = harmonic_extension(&boundary).unwrap();
    let config = MinimizeConfig::new(grid.clone(), k);
    let r = minimize(&config, &initial).unwrap();
    let monotone = r.energy_trace.windows(2).all(|w| w[1] <= w[0]);
    let el = el_residual(&r.field, &k).norm;
    let m_dev = r
        .field
        .m
        .iter()
        .map(|m| (m[0] * m[0] + m[1] * m[1] + (m[2] - 1.0).powi(2)).sqrt())
        .fold(0.0, f64::max);
    // the planar wave is itself harmonic: the minimizer must reproduce it
    let wave_err = r
        .field
        .n
        .iter()
        .zip(&boundary.n)
        .map(|(p, q)| (0..3).map(|c| (p[c] - q[c]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    outcome(
        r.converged && r.grad_norm <= 1e-6 && monotone && el <= 1e-5 && m_dev <= 1e-6,
        format!(
            "16^3, {} iterations, grad norm {:.3e}, monotone {monotone}, el_residual {el:.3e}, |m-e3| {m_dev:.3e}, |n-wave| {wave_err:.3e}",
            r.iterations, r.grad_norm
        ),
    )
}

// ---------- 7-10: flow ----------

/// Per-step budgets, velocity maxima and constraint errors of a run, and
/// its final state.
struct FlowTrace {
    dt: f64,
    budgets: Vec<EnergyBudget>,
    max_u: Vec<f64>,
    drift: Vec<f64>,
    last: FlowState,
}

fn drift(state: &FlowState) -> f64 {
    constraint_residuals(&state.directors).max()
}

fn evolve(state: FlowState, dt: f64, horizon: f64, retract: bool) -> FlowTrace {
    let steps = (horizon / dt).round() as usize;
    let opts = StepOptions { retract };
    let mut trace = FlowTrace {
        dt,
        budgets: vec![initial_budget(&state)],
        max_u: vec![state.u.max_abs()],
        drift: vec![drift(&state)],
        last: state,
    };
    for _ in 0..steps {
        let (next, b) = flow_step(&trace.last, dt, &opts).unwrap();
        trace.budgets.push(b);
        trace.max_u.push(next.u.max_abs());
        trace.drift.push(drift(&next));
        trace.last = next;
    }
    trace
}

fn periodic(cells: usize) -> GridSpec {
    GridSpec::uniform(2, cells, TAU, Boundary::Periodic).unwrap()
}

fn constant_frame(grid: &GridSpec) -> DirectorPairField {
    DirectorPairField::constant(grid.clone(), [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
}

fn taylor_green_state(cells: usize) -> FlowState {
    let g = periodic(cells);
    let u = VectorField2D::from_fn(g.clone(), |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin()]);
    FlowState::new(u, constant_frame(&g), 1.0).unwrap()
}

fn circle_theta(x: [f64; 3], t: f64) -> f64 {
    (-2.0 * t).exp() * x[0].sin() * x[1].sin()
}

fn circle_state(cells: usize) -> FlowState {
    let g = periodic(cells);
    let d = DirectorPairField::from_fn(g.clone(), |x| {
        let th = circle_theta(x, 0.0);
        ([th.cos(), th.sin(), 0.0], [0.0, 0.0, 1.0])
    });
    FlowState::new(VectorField2D::zeros(g), d, 1.0).unwrap()
}

fn kinetic_error(trace: &FlowTrace) -> f64 {
    let k0 = trace.budgets[0].kinetic;
    let last = trace.budgets.last().unwrap();
    let t = trace.last.t;
    (last.kinetic - k0 * (-4.0 * t).exp()).abs() / (k0 * (-4.0 * t).exp())
}

fn taylor_green(coarse: &FlowTrace, fine: &FlowTrace) -> Outcome {
    let (e1, e2) = (kinetic_error(coarse), kinetic_error(fine));
    let ratio = e1 / e2;
    let k0 = coarse.budgets[0].kinetic;
    outcome(
        e1 <= 0.02 && (3.0..=5.0).contains(&ratio),
        format!("K0 {k0:.6} (exact pi^2), relative error 64^2 {e1:.3e}, 128^2 {e2:.3e}, ratio {ratio:.3}"),
    )
}

/// `|n - n*|_{L2} / |theta*|_{L2}`, stricter than relative to `|n*|`.
fn circle_error(state: &FlowState) -> (f64, f64) {
    let g = state.grid();
    let (mut err, mut th2, mut nrm) = (0.0, 0.0, 0.0);
    for i in 0..g.node_count() {
        let th = circle_theta(g.position(i), state.t);
        let (n, m) = (state.directors.n[i], state.directors.m[i]);
        err += (n[0] - th.cos()).powi(2) + (n[1] - th.sin()).powi(2) + n[2] * n[2];
        err += m[0] * m[0] + m[1] * m[1] + (m[2] - 1.0).powi(2);
        th2 += th * th;
        nrm += 2.0;
    }
    ((err / th2).sqrt(), (err / nrm).sqrt())
}

fn circle_oracle(coarse: &FlowTrace) -> Outcome {
    let last = &coarse.last;
    let (rel_theta, rel_frame) = circle_error(last);
    let e0 = coarse.budgets[0].dirichlet_n + coarse.budgets[0].dirichlet_m;
    let umax = coarse.max_u.iter().cloned().fold(0.0, f64::max);
    outcome(
        rel_theta <= 0.01 && umax <= 1e-3 * e0,
        format!(
            "t = {:.3}, L2 error {rel_theta:.3e} of |theta| ({rel_frame:.3e} of |(n,m)|), max |u| {umax:.3e} vs {:.3e} (E0 = {e0:.6}, exact pi^2)",
            last.t,
            1e-3 * e0
        ),
    )
}

/// Largest per-step energy increase (relative to the initial energy) and the
/// time-integrated absolute budget residual.
fn energy_law(trace: &FlowTrace) -> (f64, f64) {
    let e0 = trace.budgets[0].total;
    let rise = trace
        .budgets
        .windows(2)
        .map(|w| (w[1].total - w[0].total) / e0)
        .fold(f64::NEG_INFINITY, f64::max);
    let summed = trace.budgets[1..].iter().map(|b| trace.dt * b.residual.abs()).sum();
    (rise, summed)
}

fn energy_law_check(runs: [(&str, &FlowTrace, &FlowTrace); 2]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, coarse, fine) in runs {
        let (r1, s1) = energy_law(coarse);
        let (r2, s2) = energy_law(fine);
        let ratio = s1 / s2;
        ok &= r1 <= 1e-14 && r2 <= 1e-14 && ratio >= 1.8;
        parts.push(format!(
            "{name}: max rise {:.1e}, summed residual {s1:.3e} -> {s2:.3e} (ratio {ratio:.2})",
            r1.max(r2)
        ));
    }
    outcome(ok, parts.join("; "))
}

fn constraints(coarse: &FlowTrace) -> Outcome {
    let on = coarse.drift.iter().cloned().fold(0.0, f64::max);
    let off1 = *evolve(circle_state(64), 1e-3, 0.5, false).drift.last().unwrap();
    let off2 = *evolve(circle_state(64), 5e-4, 0.5, false).drift.last().unwrap();
    let ratio = off1 / off2;
    outcome(
        on <= 1e-12 && (1.6..=2.4).contains(&ratio),
        format!("retracted max error {on:.3e}; unretracted drift {off1:.3e} -> {off2:.3e}, ratio {ratio:.3}"),
    )
}

// ---------- 11-12 ----------

fn concentration() -> Outcome {
    let c0 = 8.0 * PI;
    let cells = 128;
    let g = periodic(cells);
    let h = TAU / cells as f64;
    let r = 1.6;
    let mut ok = true;
    let mut parts = Vec::new();
    let mut case = |name: &str, density: &dyn Fn([f64; 3]) -> f64, predicted: f64| {
        let u = VectorField2D::from_fn(g.clone(), |x| [density(x).sqrt(), 0.0]);
        let state = FlowState::new(u, constant_frame(&g), 1.0).unwrap();
        let rep = concentration_scan(&state, r, c0);
        let fires = predicted >= c0;
        let close = (rep.max_local - predicted).abs() <= 0.05 * c0;
        ok &= close && rep.fired == fires && rep.fired == (rep.max_local >= c0);
        parts.push(format!(
            "{name}: {:.4} vs {:.4} C0, fired {}",
            rep.max_local / c0,
            predicted / c0,
            rep.fired
        ));
    };
    let disk = PI * r * r;
    for level in [0.5, 1.5] {
        let e = level * c0 / disk;
        case(&format!("uniform {level}"), &|_| e, e * disk);
    }
    let s = r / 4.0;
    let centre = [PI, PI];
    let s2 = s * s;
    for mass in [2.0 * c0, 0.5 * c0] {
        // a gaussian of total mass M holds M (1 - exp(-r^2 / 2 s^2)) inside the disk
        let bump = move |x: [f64; 3]| {
            let d2 = (x[0] - centre[0]).powi(2) + (x[1] - centre[1]).powi(2);
            mass / (2.0 * PI * s2) * (-d2 / (2.0 * s2)).exp()
        };
        case(
            &format!("bump {:.1}", mass / c0),
            &bump,
            mass * (1.0 - (-r * r / (2.0 * s2)).exp()),
        );
    }
    outcome(ok, format!("r = {r}, h = {h:.4}: {}", parts.join("; ")))
}

fn io_determinism() -> Outcome {
    let flow = "mode = flow2d\ncells = 32\nlength = 6.283185307179586\nrecipe = random-smooth\nseed = 42\ndt = 0.001\nhorizon = 0.05\nsnapshot_every = 10\n";
    let mini = "mode = minimize\nndim = 3\nboundary = dirichlet\ncells = 8\nlength = 1.0\nrecipe = random-smooth\nseed = 42\namplitude = 0.3\nmax_iter = 200\n";
    let mut ok = true;
    let mut files = 0;
    for text in [flow, mini] {
        let c = parse_config(text).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let oa = execute(&c, a.path()).unwrap();
        execute(&c, b.path()).unwrap();
        for p in &oa.files {
            let name = p.file_name().unwrap();
            let x = std::fs::read(p).unwrap();
            ok &= x == std::fs::read(b.path().join(name)).unwrap();
            files += 1;
            if name.to_string_lossy().ends_with(".bin") {
                let s = read_snapshot(p).unwrap();
                ok &= s.to_bytes() == x;
            }
        }
    }
    let state = circle_state(16);
    let snap = Snapshot::from_flow_state(&state);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.bin");
    write_snapshot(&snap, &path).unwrap();
    let back = read_snapshot(&path).unwrap();
    let bits = |s: &Snapshot| {
        s.fields
            .iter()
            .flat_map(|(_, v)| v.iter().map(|x| x.to_bits()))
            .collect::<Vec<_>>()
    };
    ok &= back == snap && bits(&back) == bits(&snap);
    outcome(
        ok,
        format!("{files} output files identical across repeated runs; snapshot round trip bit-exact"),
    )
}

// ---------- driver ----------

fn report(id: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let passed = o.passed && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
    println!(
        "{} {id:>2} {name}: {} [{:.1}s{budget}]",
        if passed { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64()
    );
    passed
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let secs = |s| Some(Duration::from_secs(s));
    let mut all = true;
    all &= report(1, "coercivity", secs(30), coercivity);
    all &= report(2, "one-constant reduction", None, one_constant);
    all &= report(3, "strong ellipticity", secs(10), ellipticity);
    all &= report(4, "null-Lagrangian invariance", secs(120), null_lagrangian);
    all &= report(5, "gradient vs finite differences", secs(60), gradient_fd);
    all &= report(6, "minimizer", secs(300), minimizer);

    let mut tg = None;
    all &= report(7, "Taylor-Green decay", secs(120), || {
        let coarse = evolve(taylor_green_state(64), 1e-3, 0.5, true);
        let fine = evolve(taylor_green_state(128), 2.5e-4, 0.5, true);
        let o = taylor_green(&coarse, &fine);
        tg = Some((coarse, fine));
        o
    });
    let mut circle = None;
    all &= report(8, "circle-valued coupled oracle", secs(180), || {
        let coarse = evolve(circle_state(64), 1e-3, 0.5, true);
        let fine = evolve(circle_state(128), 2.5e-4, 0.5, true);
        let o = circle_oracle(&coarse);
        circle = Some((coarse, fine));
        o
    });
    let (tg, circle) = (tg.unwrap(), circle.unwrap());
    all &= report(9, "energy law", None, || {
        energy_law_check([("taylor-green", &tg.0, &tg.1), ("circle", &circle.0, &circle.1)])
    });
    all &= report(10, "constraint preservation", None, || constraints(&circle.0));
    all &= report(11, "concentration detector", secs(30), concentration);
    all &= report(12, "IO determinism", None, io_determinism);
    if !all {
        std::process::exit(1);
    }
}
