//! Mode dispatch: builds grids, calls the solver drivers, evaluates the checks and collects
//! fields for dumping.

use std::fs;
use std::path::Path;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spwell::bounds::{
    a_priori, big_c_max, big_c_product, c_of_p, c_p, check_pointwise, constants_with_m0, decay_fit, moser_bound,
    moser_ladder, ps_device, tail_mass, BoundCheck,
};
use spwell::discretization::{dump_field, GridKind};
use spwell::energy::{h1_sobolev, mp_level_upper, Functional, SmallSphere};
use spwell::poisson::{estimate_s0, potential_bounds, sharp_s0, solve_ball, solve_potential, PoissonBoundary};
use spwell::solver::{
    default_endpoint, domain_approximation, gradient_flow, ground_state, lambda_continuation, lambda_sweep,
    limit_problem_direct, mountain_pass_run, mu_sweep, nonexistence_probe, random_field, MpRun, SolverOptions,
};
use spwell::{Field, Grid, Omega0, Solution, Well};

use crate::config::{LambdaMethod, Mode, RunConfig};
use crate::report::{
    Details, DomainStepReport, EntryReport, LadderReport, LimitReference, MpReport, Phase, RunReport,
    SobolevReport, Timings, VerifyReport,
};
use crate::table::sweep_table;

/// Everything a run produces.
pub struct RunOutput {
    pub report: RunReport,
    pub timings: Timings,
    /// `(stem, field)` pairs written as `stem.bin` + `stem.json`.
    pub fields: Vec<(String, Field)>,
}

impl RunOutput {
    /// Writes `report.json`, `timings.json`, `table.csv` and the field dumps into `dir`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("report.json"), self.report.to_json())?;
        fs::write(dir.join("timings.json"), serde_json::to_string_pretty(&self.timings)? + "\n")?;
        fs::write(dir.join("table.csv"), sweep_table(std::slice::from_ref(&self.report))?)?;
        if !self.fields.is_empty() {
            let fdir = dir.join("fields");
            fs::create_dir_all(&fdir)?;
            for (stem, f) in &self.fields {
                dump_field(f, &fdir, stem).with_context(|| format!("dumping {stem}"))?;
            }
        }
        Ok(())
    }
}

/// Reference grid for the `D^{1,2}` Sobolev constant; computed once per process.
fn s0_estimate() -> f64 {
    static S0: OnceLock<f64> = OnceLock::new();
    *S0.get_or_init(|| {
        Grid::radial(200.0, 20001)
            .and_then(|g| estimate_s0(&Arc::new(g)))
            .unwrap_or_else(|_| sharp_s0())
    })
}

fn s_125() -> spwell::Result<f64> {
    static S: OnceLock<f64> = OnceLock::new();
    if let Some(&s) = S.get() {
        return Ok(s);
    }
    let s = h1_sobolev(2.4)?;
    Ok(*S.get_or_init(|| s))
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    s0: f64,
    sphere: Option<SmallSphere>,
    phases: Vec<Phase>,
    fields: Vec<(String, Field)>,
}

impl Ctx<'_> {
    fn timed<R>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let t = Instant::now();
        let r = f(self);
        self.phases.push(Phase { name: name.into(), seconds: t.elapsed().as_secs_f64() });
        r
    }

    fn keep(&mut self, label: &str, s: &Solution) {
        if self.cfg.dump_fields {
            self.fields.push((format!("{label}_u"), s.u.clone()));
            self.fields.push((format!("{label}_phi"), s.phi.clone()));
        }
    }

    fn opts(&self) -> &SolverOptions {
        &self.cfg.solver
    }
}

/// Runs a validated configuration. Solver errors end up in `report.failure`.
pub fn run(cfg: &RunConfig, warnings: Vec<String>) -> RunOutput {
    let start = Instant::now();
    let mut echo = cfg.clone();
    echo.out = None;
    let s0 = s0_estimate();
    let sphere = SmallSphere::estimate(cfg.params.p).ok();
    let mut ctx = Ctx { cfg, s0, sphere, phases: Vec::new(), fields: Vec::new() };
    let mut report = RunReport {
        mode: cfg.mode,
        config: echo,
        warnings,
        constants: constants_with_m0(&cfg.params, None),
        sobolev: SobolevReport { s0_estimate: s0, s0_sharp: sharp_s0(), small_sphere: sphere },
        entries: Vec::new(),
        checks: Vec::new(),
        details: None,
        failure: None,
        tally: Default::default(),
    };
    let outcome = match cfg.mode {
        Mode::Solve => ctx.timed("solve", |c| solve(c, &mut report)),
        Mode::GroundState => ctx.timed("ground-state", |c| ground(c, &mut report)),
        Mode::DomainApprox => ctx.timed("domain-approx", |c| domain(c, &mut report)),
        Mode::LambdaSweep => match cfg.sweep.lambda_method {
            LambdaMethod::Independent => ctx.timed("lambda-sweep", |c| lambdas(c, &mut report)),
            LambdaMethod::Continuation => ctx.timed("lambda-continuation", |c| continuation(c, &mut report)),
        },
        Mode::MuSweep => ctx.timed("mu-sweep", |c| mus(c, &mut report)),
        Mode::Verify => ctx.timed("verify", |c| verify(c, &mut report)),
        Mode::NonexistenceProbe => ctx.timed("nonexistence-probe", |c| probe(c, &mut report)),
    };
    if let Err(e) = outcome {
        report.failure = Some(e.to_string());
    }
    let m0 = report.entries.iter().find_map(|e| e.a_priori.as_ref().map(|a| a.m0));
    report.constants = constants_with_m0(&cfg.params, m0);
    report.recount();
    let timings = Timings { total_seconds: start.elapsed().as_secs_f64(), phases: ctx.phases };
    RunOutput { report, timings, fields: ctx.fields }
}

fn grid_of(cfg: &RunConfig) -> spwell::Result<Arc<Grid>> {
    let (k, n) = (cfg.grid.k.unwrap_or_default(), cfg.grid.n.unwrap_or_default());
    Ok(Arc::new(match cfg.grid.kind {
        GridKind::Radial => Grid::radial(k, n)?,
        GridKind::Box3d => Grid::box3d(k, n)?,
    }))
}

fn sphere_of(ctx: &Ctx) -> spwell::Result<SmallSphere> {
    match ctx.sphere {
        Some(s) => Ok(s),
        None => SmallSphere::estimate(ctx.cfg.params.p),
    }
}

/// Radius where `g` first reaches its plateau, for a centred ball `Omega0`.
fn decay_radius(well: &Well) -> Option<f64> {
    match &well.omega0 {
        Omega0::Ball { center, radius } if *center == [0.0; 3] => Some(radius + well.tau),
        _ => None,
    }
}

/// Checks and diagnostics shared by every solved configuration. `level` is a mountain-pass
/// level bound for the a-priori constants.
fn entry(ctx: &Ctx, label: &str, s: &Solution, mp: Option<&MpRun<f64>>, level: Option<f64>) -> spwell::Result<EntryReport> {
    let opts = ctx.opts();
    let well = &ctx.cfg.well;
    let params = &s.params;
    let sum = s.summary();
    let mut checks = vec![
        BoundCheck::upper("residual_dual", sum.residual_norm, opts.tol, 0.0),
        BoundCheck::upper("nehari_gap", sum.nehari_gap.abs(), opts.nehari_tol * sum.norm * sum.norm, 0.0),
        BoundCheck::lower("norm_positive", sum.norm, opts.zero_norm, 0.0),
    ];
    let moser = moser_bound(&s.u, params, ctx.s0)?;
    checks.push(moser.check.clone());

    let a_priori = match level {
        Some(l) if params.p >= 3.0 => {
            let a = a_priori(l, params.p, ctx.s0, s_125()?)?;
            checks.push(BoundCheck::upper("a_priori_norm", sum.norm + sum.grad_phi, a.m, 0.0));
            checks.push(BoundCheck::upper("a_priori_sup", sum.sup, a.m0, 0.0));
            Some(a)
        }
        _ => None,
    };
    if params.p < 2.0 {
        checks.extend(check_pointwise(&s.u, &s.phi, params)?);
        checks.push(ps_device(&s.u, &solve_potential(&s.u, s.boundary)?, params)?);
    }
    let decay = match decay_radius(well) {
        Some(r0) if s.grid.kind() == GridKind::Radial && s.grid.k() >= 2.0 * r0 + 4.0 => {
            let fit = decay_fit(&s.u, params, r0)?;
            checks.push(fit.check.clone());
            Some(fit)
        }
        _ => None,
    };
    let mountain_pass = mp.map(|run| {
        let e = sum.energy;
        checks.push(BoundCheck::lower("energy_positive", e, 0.0, 0.0));
        checks.push(BoundCheck::lower("energy_ge_alpha", e, run.sphere.alpha, 0.0));
        checks.push(BoundCheck::upper("energy_le_upper", e, run.upper.level, 1e-9 * run.upper.level.abs()));
        let monotone = run.level_history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs());
        checks.push(BoundCheck::flag("level_monotone", monotone));
        checks.push(BoundCheck::flag("endpoint_admissible", run.upper.admissible).soft());
        MpReport {
            upper_level: run.upper.level,
            t_star: run.upper.t_star,
            endpoint_energy: run.upper.endpoint_energy,
            endpoint_admissible: run.upper.admissible,
            endpoint_t0: run.endpoint.t0,
            endpoint_norm: run.endpoint.norm,
            initial_level: run.initial_level,
            ridge_level: run.ridge_level,
            final_level: e,
            sweeps: run.sweeps,
            path: run.path.clone(),
        }
    });

    let g = well.sample(&s.grid)?;
    let w = s.grid.weights();
    let (mut g_mass, mut outside) = (0.0, 0.0);
    for (i, &u) in s.u.values().iter().enumerate() {
        g_mass += w[i] * g[i] * u * u;
        if g[i] > 0.0 {
            outside += w[i] * u * u;
        }
    }
    Ok(EntryReport {
        label: label.into(),
        mountain_pass,
        moser: Some(moser),
        a_priori,
        decay,
        tail_mass_half: tail_mass(&s.u, s.grid.k() / 2.0)?,
        g_mass,
        mu_g_mass: params.mu * g_mass,
        outside_mass: outside,
        limit_residual: None,
        checks,
        solution: sum,
    })
}

fn solve(ctx: &mut Ctx, report: &mut RunReport) -> spwell::Result<()> {
    let cfg = ctx.cfg;
    let grid = grid_of(cfg)?;
    let func = Functional::new(&grid, &cfg.well, &cfg.params)?.with_boundary(cfg.solver.boundary);
    let sphere = sphere_of(ctx)?;
    let run = mountain_pass_run(&func, &sphere, ctx.opts())?;
    let mut e = entry(ctx, "mp", &run.solution, Some(&run), Some(run.upper.level))?;
    if cfg.params.p >= 3.0 {
        // independent route to the same critical point: Nehari-projected flow from the endpoint
        let oracle = ctx.timed("flow-oracle", |c| gradient_flow(&run.endpoint.field, &cfg.params, &cfg.well, c.opts()))?;
        let check = match oracle.solution() {
            Some(f) => BoundCheck::upper("flow_oracle_energy", (f.energy.total - run.solution.energy.total).abs(), 1e-4, 0.0)
                .with_detail(format!("flow energy {:.10}", f.energy.total)),
            None => BoundCheck::flag("flow_oracle_energy", false).with_detail("flow decayed to zero"),
        };
        e.checks.push(check);
    }
    report.entries.push(e);
    ctx.keep("mp", &run.solution);
    Ok(())
}

fn ground(ctx: &mut Ctx, report: &mut RunReport) -> spwell::Result<()> {
    let cfg = ctx.cfg;
    let grid = grid_of(cfg)?;
    let gs = ground_state(&cfg.params, &cfg.well, &grid, cfg.n_starts, cfg.seed, ctx.opts())?;
    let mut e = entry(ctx, "ground", &gs.solution, None, None)?;
    e.checks.extend(gs.checks.iter().cloned());
    e.checks.push(BoundCheck::flag("mu_above_mu1", gs.above_mu1).soft());
    report.entries.push(e);
    report.details = Some(Details::GroundState { found: gs.found, lost_starts: gs.lost_starts, above_mu1: gs.above_mu1 });
    ctx.keep("ground", &gs.solution);
    Ok(())
}

fn domain(ctx: &mut Ctx, report: &mut RunReport) -> spwell::Result<()> {
    let cfg = ctx.cfg;
    let ks = cfg.grid.k_schedule.clone().unwrap_or_default();
    let h = cfg.grid.h.unwrap_or_default();
    // the endpoint lives on the smallest ball, so its ray maximum bounds every level
    let level = if cfg.params.p >= 3.0 {
        let n = (ks[0] / h).round() as usize + 1;
        let g0 = Arc::new(match cfg.grid.kind {
            GridKind::Radial => Grid::radial(ks[0], n)?,
            GridKind::Box3d => Grid::box3d(ks[0], 2 * n - 1)?,
        });
        let f0 = Functional::new(&g0, &cfg.well, &cfg.params)?.with_boundary(cfg.solver.boundary);
        let ep = default_endpoint(&f0, &sphere_of(ctx)?)?;
        Some(mp_level_upper(&f0, &ep.field)?.level)
    } else {
        None
    };
    let d = domain_approximation(&cfg.params, &cfg.well, cfg.grid.kind, &ks, h, ctx.opts())?;
    for (st, s) in d.steps.iter().zip(&d.solutions) {
        let label = format!("k_{}", st.k);
        report.entries.push(entry(ctx, &label, s, None, level)?);
        ctx.keep(&label, s);
    }
    let decreasing = d.differences_decreasing();
    report.checks.push(BoundCheck::flag("cauchy_differences_decreasing", decreasing).soft());
    if let [.., a, b] = d.steps.as_slice() {
        let spread = (b.monopole_corrected_energy - a.monopole_corrected_energy).abs();
        report.checks.push(
            BoundCheck::upper("monopole_corrected_spread", spread, 1e-3, 0.0)
                .soft()
                .with_detail(format!("k = {} vs {}", a.k, b.k)),
        );
    }
    report.details = Some(Details::DomainApprox {
        h,
        steps: d
            .steps
            .iter()
            .map(|s| DomainStepReport {
                k: s.k,
                cauchy_diff: s.cauchy_diff,
                tail_mass: s.tail_mass,
                tail_product: s.tail_product,
                monopole_corrected_energy: s.monopole_corrected_energy,
            })
            .collect(),
        differences_decreasing: decreasing,
    });
    if let Some(f) = d.failure {
        report.failure = Some(f);
    }
    Ok(())
}

fn lambdas(ctx: &mut Ctx, report: &mut RunReport) -> spwell::Result<()> {
    let cfg = ctx.cfg;
    let grid = grid_of(cfg)?;
    let levels = lambda_sweep(&cfg.params, &cfg.well, &grid, &cfg.sweep.lambdas, ctx.opts())?;
    let mut energies = Vec::new();
    let mut errors = Vec::new();
    for lv in &levels {
        match &lv.run {
            Ok(run) => {
                let label = format!("lambda_{}", lv.lambda);
                report.entries.push(entry(ctx, &label, &run.solution, Some(run), Some(run.upper.level))?);
                ctx.keep(&label, &run.solution);
                energies.push(Some(run.solution.energy.total));
                errors.push(None);
            }
            Err(e) => {
                energies.push(None);
                errors.push(Some(e.to_string()));
            }
        }
    }
    let first_bad = errors.iter().position(Option::is_some);
    let good = first_bad.unwrap_or(levels.len());
    let last_success = good.checked_sub(1).map(|i| levels[i].lambda);
    let first_failure = first_bad.map(|i| levels[i].lambda);
    report.checks.push(BoundCheck::flag("all_lambdas_solved", first_bad.is_none()).soft());
    let solved: Vec<(f64, f64)> = levels.iter().zip(&energies).filter_map(|(l, e)| e.map(|e| (l.lambda, e))).collect();
    for w in solved.windows(2) {
        report.checks.push(
            BoundCheck::upper(format!("level_nondecreasing[{} -> {}]", w[0].0, w[1].0), w[0].1, w[1].1, 1e-6).soft(),
        );
    }
    report.details = Some(Details::LambdaSweep {
        lambdas: cfg.sweep.lambdas.clone(),
        levels: energies,
        errors,
        last_success,
        first_failure,
    });
    Ok(())
}

fn continuation(ctx: &mut Ctx, report: &mut RunReport) -> spwell::Result<()> {
    let cfg = ctx.cfg;
    let grid = grid_of(cfg)?;
    let c = lambda_continuation(&cfg.params, &cfg.well, &grid, &cfg.sweep.lambdas, ctx.opts())?;
    let alpha = sphere_of(ctx)?.alpha;
    for (lam, s) in c.lambdas.iter().zip(&c.solutions) {
        let label = format!("lambda_{lam}");
        let mut e = entry(ctx, &label, s, None, None)?;
        e.checks.push(BoundCheck::lower("energy_ge_alpha", s.energy.total, alpha, 0.0));
        report.entries.push(e);
        ctx.keep(&label, s);
    }
    let mut e = entry(ctx, "limit", &c.limit, None, None)?;
    e.checks.push(BoundCheck::lower("energy_ge_alpha", c.limit.energy.total, alpha, 0.0));
    report.entries.push(e);
    ctx.keep("limit", &c.limit);

    let gaps = &c.relative_gaps;
    report.checks.push(BoundCheck::flag("gaps_decreasing", gaps.windows(2).all(|w| w[1] < w[0])).soft());
    if let Some(&last) = gaps.last() {
        report.checks.push(BoundCheck::upper("final_relative_gap", last, 5e-2, 0.0).soft());
    }
    let energies: Vec<f64> = c.solutions.iter().map(|s| s.energy.total).collect();
    report
        .checks
        .push(BoundCheck::flag("energies_nonincreasing", energies.windows(2).all(|w| w[1] <= w[0] + 1e-9)).soft());
    report.details = Some(Details::Continuation {
        lambdas: c.lambdas.clone(),
        relative_gaps: c.relative_gaps.clone(),
        limit_energy: c.limit.energy.total,
    });
    Ok(())
}

fn mus(ctx: &mut Ctx, report: &mut RunReport) -> spwell::Result<()> {
    let cfg = ctx.cfg;
    let grid = grid_of(cfg)?;
    let sweep = mu_sweep(&cfg.params, &cfg.well, &grid, &cfg.sweep.mus, ctx.opts())?;
    for (me, s) in sweep.entries.iter().zip(&sweep.solutions) {
        let label = format!("mu_{}", me.mu);
        let mut e = entry(ctx, &label, s, None, None)?;
        e.limit_residual = Some(me.limit_residual);
        report.entries.push(e);
        ctx.keep(&label, s);
    }
    let en = &sweep.entries;
    let first = en[0].mu_g_mass;
    let top = en.iter().map(|e| e.mu_g_mass).fold(f64::NEG_INFINITY, f64::max);
    report.checks.push(BoundCheck::upper("mu_g_mass_bounded", top, 1.1 * first, 0.0).soft());
    report.checks.push(
        BoundCheck::flag("outside_mass_decreasing", en.windows(2).all(|w| w[1].outside_mass < w[0].outside_mass)).soft(),
    );
    report.checks.push(
        BoundCheck::flag("limit_residual_decreasing", en.windows(2).all(|w| w[1].limit_residual < w[0].limit_residual))
            .soft(),
    );
    let mut limit_reference = None;
    if let Some(n) = cfg.sweep.limit_reference_n {
        let radius = cfg.well.inscribed_ball().radius;
        let direct = ctx.timed("limit-reference", |c| limit_problem_direct(&cfg.params, radius, n, c.opts()))?;
        let last = en.last().expect("nonempty sweep").limit_residual;
        report.checks.push(
            BoundCheck::upper("limit_residual_vs_direct", last, 10.0 * direct.residual_l2, 0.0)
                .soft()
                .with_detail(format!("direct solve on Omega0: residual {:.3e}", direct.residual_l2)),
        );
        limit_reference = Some(LimitReference { radius, n, energy: direct.energy.total, residual_l2: direct.residual_l2 });
        ctx.keep("limit", &direct);
    }
    report.details = Some(Details::MuSweep { limit_reference });
    Ok(())
}

fn probe(ctx: &mut Ctx, report: &mut RunReport) -> spwell::Result<()> {
    let cfg = ctx.cfg;
    let grid = grid_of(cfg)?;
    let pr = nonexistence_probe(&cfg.params, &cfg.well, &grid, cfg.n_inits, cfg.seed, ctx.opts())?;
    report.checks.push(BoundCheck::flag("all_decayed", pr.all_decayed).soft().with_detail(pr.summary.clone()));
    report.details = Some(Details::NonexistenceProbe(pr));
    Ok(())
}

/// Closed-form and oracle checks that need no solve.
fn verify(ctx: &mut Ctx, report: &mut RunReport) -> spwell::Result<()> {
    let cfg = ctx.cfg;
    let checks = &mut report.checks;

    // the two closed forms of C_{p,lambda}
    let mut gap: f64 = 0.0;
    let mut points = 0;
    for i in 0..50 {
        let p = 1.05 + 0.9 * i as f64 / 49.0;
        for j in 0..50 {
            let lam = 10f64.powf(-2.0 + 2.0 * j as f64 / 49.0);
            if let (Some(a), Some(b)) = (big_c_product(p, lam), big_c_max(p, lam)) {
                gap = gap.max((a - b).abs() / b);
                points += 1;
            }
        }
    }
    checks.push(BoundCheck::upper("big_c_forms_agree", gap, 1e-12, 0.0).with_detail(format!("{points} (p, lambda) points")));
    checks.push(BoundCheck::flag("big_c_grid_complete", points == 2500));
    let spot = [
        ("c_p(1.5)", c_p(1.5), 0.25),
        ("c(1.5)", c_of_p(1.5), 0.015625),
        ("C(1.5, 0.01)", big_c_max(1.5, 0.01), 421875.0 / 256.0),
        ("C_product(1.5, 0.01)", big_c_product(1.5, 0.01), 421875.0 / 256.0),
    ];
    for (name, got, want) in spot {
        let got = got.unwrap_or(f64::NAN);
        checks.push(BoundCheck::upper(format!("spot {name}"), (got - want).abs(), 0.0, 4.0 * f64::EPSILON * want));
    }

    // Moser ladders
    let mut ps = vec![1.5, 3.0, 4.0];
    if cfg.params.p > 1.0 && cfg.params.p < 5.0 && !ps.contains(&cfg.params.p) {
        ps.push(cfg.params.p);
    }
    let mut moser = Vec::new();
    for p in ps {
        let lad = moser_ladder(p, 40)?;
        let d = lad.delta;
        let f_lim = (2.0 * d * d - d.powi(3)) / (1.0 - d).powi(2);
        let g_lim = d * d / (1.0 - d);
        let (f, g) = (*lad.f.last().expect("ladder"), *lad.g.last().expect("ladder"));
        checks.push(BoundCheck::flag(format!("moser_delta_in_unit_interval[p={p}]"), d > 0.0 && d < 1.0));
        checks.push(BoundCheck::upper(format!("moser_f_limit[p={p}]"), (f - f_lim).abs(), 1e-10, 0.0));
        checks.push(BoundCheck::upper(format!("moser_g_limit[p={p}]"), (g - g_lim).abs(), 1e-10, 0.0));
        let (fl, gl) = (*lad.f_ladder.last().expect("ladder"), *lad.g_ladder.last().expect("ladder"));
        checks.push(BoundCheck::upper(format!("moser_f_ladder_sum[p={p}]"), (fl - f_lim).abs(), 1e-10, 0.0));
        checks.push(BoundCheck::upper(format!("moser_g_ladder_sum[p={p}]"), (gl - g_lim).abs(), 1e-10, 0.0));
        moser.push(LadderReport { p, delta: d, f_last: f, g_last: g, f_inf: lad.f_inf, g_inf: lad.g_inf });
    }

    // Poisson oracles
    let n = 1024;
    let g = Arc::new(Grid::radial(4.0, n)?);
    let charge = Field::radial_fn(g.clone(), |r| if r <= 1.0 { 1.0 } else { 0.0 });
    let sol = solve_potential(&charge, PoissonBoundary::FreeSpace)?;
    let node = |r: f64| sol.phi.values()[(r / g.h()).round() as usize];
    let (phi0, phi1) = (node(0.0), node(1.0));
    checks.push(BoundCheck::upper("ball_charge_phi_center", (phi0 / 0.5 - 1.0).abs(), 5e-3, 0.0));
    checks.push(BoundCheck::upper("ball_charge_phi_edge", (phi1 * 3.0 - 1.0).abs(), 5e-3, 0.0));
    let identity_gap = (sol.grad_energy - sol.coupling).abs() / sol.grad_energy;
    checks.push(BoundCheck::upper("poisson_energy_identity", identity_gap, 1e-8, 0.0));
    let bumps = 20;
    let bg = Arc::new(Grid::radial(8.0, 1024)?);
    for i in 0..bumps {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let u = random_field(&bg, 2.0, &mut rng);
        for c in potential_bounds(&u, &solve_ball(&u)?, ctx.s0)? {
            checks.push(BoundCheck { name: format!("{}[bump {i}]", c.name), ..c });
        }
    }

    report.details = Some(Details::Verify(VerifyReport {
        constant_grid_points: points,
        constant_max_gap: gap,
        moser,
        poisson_n: n,
        phi_center: phi0,
        phi_edge: phi1,
        identity_gap,
        random_bumps: bumps,
    }));
    Ok(())
}
