//! End-to-end acceptance checks. Each test is one release gate: it drives
//! the public API the way the benchmark CLI does, validates results through
//! the independent checkers (reference search, schedule validator, replay),
//! and prints a PASS line with the measured numbers (visible under
//! `--nocapture`). Batches shared between gates are computed once.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use armplan::bench::{self, Family, RunParams, RunReport};
use armplan::fixtures;
use armplan::geom::Point;
use armplan::guidance::Strategy;
use armplan::ilp::build_model;
use armplan::mode_graph::{
    build_mode_graph, mode_of, validate_state, ArmSpec, ModeGraph, MultiModalState, RegionSpec,
    VertexId, Workspace,
};
use armplan::motion::MotionModel;
use armplan::oracle::Oracle;
use armplan::plan_check::check_plan;
use armplan::planner::{plan, GroundedAction, GuidanceCache, PlannerConfig};
use armplan::replay::replay;
use armplan::scenario::Scenario;
use armplan::solver::{solve, solve_mapf, SolveOutcome};
use armplan::teg::expand;

fn run_one(
    scenario: &Scenario,
    strategy: Strategy,
    trials: u64,
    seed: u64,
    pure_guidance: bool,
) -> RunReport {
    let params = RunParams {
        strategy,
        budget_ms: 2000,
        trials,
        seed,
        motion: MotionModel::FreeSpace,
        pure_guidance,
    };
    bench::run(scenario, &params).expect("benchmark run")
}

struct Batches {
    switch_scenario: Scenario,
    /// Twenty single-trial pure-guidance runs, individually timed.
    switch_smart: Vec<(RunReport, Duration)>,
    switch_greedy: RunReport,
    /// Per seed: scenario, smart report, sequential report.
    corridor: Vec<(Scenario, RunReport, RunReport)>,
    corridor_elapsed: Duration,
    random: Vec<(Scenario, RunReport)>,
}

impl Batches {
    fn reports(&self) -> Vec<&RunReport> {
        let mut all: Vec<&RunReport> = self.switch_smart.iter().map(|(r, _)| r).collect();
        all.push(&self.switch_greedy);
        for (_, smart, sequential) in &self.corridor {
            all.push(smart);
            all.push(sequential);
        }
        all.extend(self.random.iter().map(|(_, r)| r));
        all
    }

    fn scenarios(&self) -> Vec<&Scenario> {
        let mut all = vec![&self.switch_scenario];
        all.extend(self.corridor.iter().map(|(s, _, _)| s));
        all.extend(self.random.iter().map(|(s, _)| s));
        all
    }
}

fn batches() -> &'static Batches {
    static BATCHES: OnceLock<Batches> = OnceLock::new();
    BATCHES.get_or_init(|| {
        // The three batch groups are independent; timings are measured
        // inside each thread, so sharing the machine only makes them worse,
        // never better.
        std::thread::scope(|scope| {
            let switch = scope.spawn(|| {
                let scenario = bench::generate(Family::Switch, 2, 2, 0).expect("switch scenario");
                let smart = (0..20)
                    .map(|seed| {
                        let t0 = Instant::now();
                        let report = run_one(&scenario, Strategy::Smart, 1, seed, true);
                        (report, t0.elapsed())
                    })
                    .collect();
                let greedy = run_one(&scenario, Strategy::Greedy, 20, 0, true);
                (scenario, smart, greedy)
            });
            let corridor = scope.spawn(|| {
                let t0 = Instant::now();
                let runs: Vec<(Scenario, RunReport, RunReport)> = (0..20)
                    .map(|seed| {
                        let scenario = bench::generate(Family::SideToSide, 4, 4, seed)
                            .expect("corridor scenario");
                        let smart = run_one(&scenario, Strategy::Smart, 1, seed, false);
                        let sequential = run_one(&scenario, Strategy::Sequential, 1, seed, false);
                        (scenario, smart, sequential)
                    })
                    .collect();
                (runs, t0.elapsed())
            });
            let random = scope.spawn(|| {
                (0..20)
                    .map(|seed| {
                        let scenario =
                            bench::generate(Family::Random, 4, 4, seed).expect("random scenario");
                        let report = run_one(&scenario, Strategy::Smart, 1, seed, false);
                        (scenario, report)
                    })
                    .collect()
            });

            let (switch_scenario, switch_smart, switch_greedy) = switch.join().unwrap();
            let (corridor, corridor_elapsed) = corridor.join().unwrap();
            Batches {
                switch_scenario,
                switch_smart,
                switch_greedy,
                corridor,
                corridor_elapsed,
                random: random.join().unwrap(),
            }
        })
    })
}

/// A small random workspace (at most 5 vertices, capacities 1 or 2) with
/// valid start and goal arrangements for up to 3 objects. Geometry is drawn
/// freely, so connectivity and feasibility vary across instances.
fn random_instance(rng: &mut ChaCha8Rng) -> Option<(ModeGraph, MultiModalState, MultiModalState)> {
    let n_arms = rng.random_range(1..=2usize);
    let n_regions = rng.random_range(1..=(5 - n_arms));
    let arms = (0..n_arms)
        .map(|i| ArmSpec {
            id: format!("a{i}"),
            base: Point::xy(rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)),
            reach: rng.random_range(0.8..2.2),
        })
        .collect();
    let regions = (0..n_regions)
        .map(|i| RegionSpec {
            id: format!("r{i}"),
            centroid: Point::xy(rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)),
            capacity: rng.random_range(1..=2usize),
            extent: 0.3,
        })
        .collect();
    let ws = Workspace { arms, regions, handoff_distance: rng.random_range(0.5..3.0) };
    let g = build_mode_graph(&ws).ok()?;
    let k = rng.random_range(1..=3usize);
    let init = random_arrangement(rng, &g, k)?;
    let goal = random_arrangement(rng, &g, k)?;
    Some((g, init, goal))
}

fn random_arrangement(rng: &mut ChaCha8Rng, g: &ModeGraph, k: usize) -> Option<MultiModalState> {
    let mut left: Vec<usize> = (0..g.n_vertices()).map(|v| g.capacity(v)).collect();
    let mut vertices = Vec::with_capacity(k);
    for _ in 0..k {
        let open: Vec<VertexId> = (0..g.n_vertices()).filter(|&v| left[v] > 0).collect();
        if open.is_empty() {
            return None;
        }
        let v = open[rng.random_range(0..open.len())];
        left[v] -= 1;
        vertices.push(v);
    }
    Some(MultiModalState(vertices))
}

#[test]
fn exact_solver_matches_reference_search_on_random_instances() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut instances = 0usize;
    let mut checks = 0usize;
    while instances < 200 {
        let Some((g, init, goal)) = random_instance(&mut rng) else { continue };
        let reference = Oracle::new(&g).min_steps(&init, &goal, 6).expect("reference search");
        for horizon in 1..=6usize {
            let teg = expand(&g, horizon).expect("positive horizon");
            let model = build_model(teg, &init, &goal).expect("valid endpoints");
            let solver_feasible = matches!(solve(&model).unwrap(), SolveOutcome::Optimal(_));
            let reference_feasible = reference.is_some_and(|steps| steps <= horizon);
            assert_eq!(
                solver_feasible, reference_feasible,
                "feasibility disagreement on instance {instances} at horizon {horizon}: \
                 reference says {reference:?} steps"
            );
            checks += 1;
        }
        instances += 1;
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(120), "agreement sweep took {elapsed:?}");
    println!(
        "PASS solver agrees with the reference search on {instances} instances \
         x 6 horizons ({checks} checks) in {elapsed:.1?}"
    );
}

#[test]
fn two_arm_swap_ground_truth_holds_end_to_end() {
    let g = build_mode_graph(&fixtures::swap2_workspace()).unwrap();
    let (start, goal) = fixtures::swap2_swap_task();
    let init = mode_of(&g, &start).unwrap();
    let goal = mode_of(&g, &goal).unwrap();

    let reference = Oracle::new(&g);
    assert_eq!(reference.min_steps(&init, &goal, 10).unwrap(), Some(6));
    assert_eq!(reference.min_max_actions(&init, &goal, 10).unwrap(), Some(3));

    let plan = solve_mapf(&g, &init, &goal).unwrap().expect("solvable");
    assert_eq!(plan.n_steps, 6);
    assert_eq!(plan.per_object_actions, vec![3, 3]);
    let stats = check_plan(&g, &init, &goal, &plan.paths).expect("independent validation");
    assert_eq!((stats.n_steps, stats.max_actions), (6, 3));
    println!("PASS two-arm swap: 6 steps, 3 actions per object, schedule validated independently");
}

#[test]
fn buffered_swap_is_solved_by_solver_and_planner() {
    let g = build_mode_graph(&fixtures::swapbuf_workspace()).unwrap();
    let (start, goal) = fixtures::swapbuf_swap_task();
    let init = mode_of(&g, &start).unwrap();
    let goal = mode_of(&g, &goal).unwrap();
    assert_eq!(Oracle::new(&g).min_max_actions(&init, &goal, 8).unwrap(), Some(4));

    let bf = g.vertex_id("Bf").unwrap();
    let schedule = solve_mapf(&g, &init, &goal).unwrap().expect("solvable");
    assert!(
        schedule.paths.iter().any(|p| p.contains(&bf)),
        "the swap is impossible without parking an object on the buffer"
    );

    let scenario = bench::generate(Family::SwapBuffer, 2, 2, 0).unwrap();
    let sg = scenario.validate().unwrap();
    let ws = scenario.workspace();
    let task_start = scenario.initial_task_state(&sg);
    let task_goal = scenario.goal_projection(&sg);
    let config = PlannerConfig { seed: 0, budget_ms: 2000, ..Default::default() };
    let mut cache = GuidanceCache::new();
    let outcome =
        plan(&ws, &sg, &task_start, &task_goal, scenario.footprint_radius, &config, &mut cache)
            .unwrap();
    let solution = outcome.solution().expect("planner solves the buffered swap");
    let sbf = sg.vertex_id("Bf").unwrap();
    let buffered = solution
        .steps
        .iter()
        .flat_map(|step| &step.actions)
        .any(|a| matches!(a, GroundedAction::Place { region, .. } if *region == sbf));
    assert!(buffered, "some synchronized step must place into the buffer");
    replay(&scenario, &solution.steps, &MotionModel::FreeSpace).expect("independent re-execution");
    println!(
        "PASS buffered swap: schedule and plan both route through the buffer, \
         action bound 4 confirmed by the reference search"
    );
}

#[test]
fn schedule_floor_never_exceeds_realized_action_steps() {
    let b = batches();
    let mut checked = 0usize;
    for report in b.reports() {
        for row in &report.rows {
            if let (true, Some(floor), Some(actions)) = (row.success, row.mapf_steps, row.actions)
            {
                assert!(
                    floor <= actions,
                    "{} {} trial {}: floor {floor} exceeds realized {actions}",
                    row.scenario,
                    row.strategy,
                    row.trial
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
    println!("PASS schedule floor respected on all {checked} successful trials");
}

#[test]
fn greedy_bottlenecks_where_smart_always_succeeds() {
    let b = batches();
    let greedy_successes = b.switch_greedy.rows.iter().filter(|r| r.success).count();
    assert_eq!(greedy_successes, 0, "greedy must deadlock on the 2x2 switch");
    assert_eq!(b.switch_smart.len(), 20);
    let mut slowest = Duration::ZERO;
    for (report, elapsed) in &b.switch_smart {
        let row = &report.rows[0];
        assert!(row.success, "smart must solve every trial");
        assert_eq!(row.actions, Some(6), "every smart plan takes 6 action steps");
        assert!(*elapsed < Duration::from_secs(1), "trial took {elapsed:?}");
        slowest = slowest.max(*elapsed);
    }
    println!(
        "PASS 2x2 switch: greedy 0/20, smart 20/20 at 6 action steps, slowest trial {slowest:.1?}"
    );
}

#[test]
fn smart_guidance_beats_sequential_on_action_count() {
    let b = batches();
    let (mut smart_sum, mut smart_n) = (0usize, 0usize);
    let (mut seq_sum, mut seq_n) = (0usize, 0usize);
    let mut strict_wins = 0usize;
    for (_, smart, sequential) in &b.corridor {
        let (s, q) = (&smart.rows[0], &sequential.rows[0]);
        if let (true, Some(a)) = (s.success, s.actions) {
            smart_sum += a;
            smart_n += 1;
        }
        if let (true, Some(a)) = (q.success, q.actions) {
            seq_sum += a;
            seq_n += 1;
        }
        if s.success && q.success && s.actions.unwrap() < q.actions.unwrap() {
            strict_wins += 1;
        }
    }
    let seeds = b.corridor.len();
    assert!(smart_n * 10 >= seeds * 9, "smart solved only {smart_n}/{seeds}");
    assert!(seq_n * 10 >= seeds * 9, "sequential solved only {seq_n}/{seeds}");
    let smart_mean = smart_sum as f64 / smart_n as f64;
    let seq_mean = seq_sum as f64 / seq_n as f64;
    assert!(
        smart_mean <= seq_mean,
        "smart mean {smart_mean:.2} must not exceed sequential mean {seq_mean:.2}"
    );
    assert!(strict_wins * 2 >= seeds, "strictly fewer actions on only {strict_wins}/{seeds} seeds");
    assert!(
        b.corridor_elapsed < Duration::from_secs(300),
        "corridor batch took {:?}",
        b.corridor_elapsed
    );
    println!(
        "PASS 4-arm corridor: smart {smart_mean:.2} vs sequential {seq_mean:.2} mean action \
         steps, strictly fewer on {strict_wins}/{seeds} seeds, success {smart_n}/{seeds} and \
         {seq_n}/{seeds}, batch {:.1?}",
        b.corridor_elapsed
    );
}

#[test]
fn cost_histories_are_anytime() {
    let b = batches();
    let mut successes = 0usize;
    let mut improved = 0usize;
    for (_, report) in &b.random {
        for (trial, history) in &report.histories {
            assert!(!history.is_empty());
            assert!(
                history.windows(2).all(|w| w[1].1 <= w[0].1),
                "cost history must be non-increasing (trial {trial}): {history:?}"
            );
            successes += 1;
            if history.last().unwrap().1 < history[0].1 {
                improved += 1;
            }
        }
    }
    assert!(successes > 0, "no random-family run succeeded");
    assert!(
        improved * 10 >= successes * 3,
        "only {improved}/{successes} runs improved on their first solution"
    );
    println!(
        "PASS anytime: every history non-increasing, {improved}/{successes} runs improved \
         within budget"
    );
}

#[test]
fn repeated_runs_emit_identical_csv() {
    let random = bench::generate(Family::Random, 4, 4, 3).unwrap();
    let switch = bench::generate(Family::Switch, 2, 2, 0).unwrap();
    let cases = [
        (random, Strategy::Smart, 3u64, 5u64, false),
        (switch, Strategy::Sequential, 4u64, 1u64, true),
    ];
    let mut bytes = 0usize;
    for (scenario, strategy, trials, seed, pure_guidance) in &cases {
        let params = RunParams {
            strategy: *strategy,
            budget_ms: 2000,
            trials: *trials,
            seed: *seed,
            motion: MotionModel::FreeSpace,
            pure_guidance: *pure_guidance,
        };
        let first = bench::render_csv(&bench::run(scenario, &params).unwrap().rows);
        let second = bench::render_csv(&bench::run(scenario, &params).unwrap().rows);
        assert_eq!(first, second, "rerun of {} diverged", scenario.id());
        bytes += first.len();
    }
    println!("PASS repeated runs reproduce byte-identical CSV ({bytes} bytes compared)");
}

#[test]
fn capacity_rules_hold_across_every_batch() {
    let b = batches();
    let mut violations = 0usize;
    let mut trials = 0usize;
    for report in b.reports() {
        violations += report.violations;
        trials += report.rows.len();
    }
    assert_eq!(violations, 0, "replay found rule violations");

    for scenario in b.scenarios() {
        let g = scenario.validate().unwrap();
        let init = scenario.initial_projection(&g);
        let goal = scenario.goal_projection(&g);
        validate_state(&g, &init).unwrap();
        validate_state(&g, &goal).unwrap();
        let schedule = solve_mapf(&g, &init, &goal).unwrap().expect("root schedule");
        check_plan(&g, &init, &goal, &schedule.paths).expect("root schedule obeys every rule");
    }
    println!(
        "PASS zero violations across {trials} trials; every root schedule passes the \
         independent validator"
    );
}
