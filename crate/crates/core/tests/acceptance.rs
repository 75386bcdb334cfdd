//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Trained networks are cached under the target directory and reused when the
//! training settings are unchanged, so only the first run pays for training.

mod support;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use metabandit::a2c::{attach_returns, LossWeights};
use metabandit::analysis::{mean_and_se, paired_difference};
use metabandit::baselines::GittinsTable;
use metabandit::envs::TaskDist;
use metabandit::harness::{
    ablate_reward_input, baseline_episodes, cross_matrix, episode_regrets, run_experiment, sweep, BaselineKind, EvalProtocol,
    Experiment, ExperimentConfig, RunMode, Seeds,
};
use metabandit::nn::{
    bptt_gradients, heads, lstm_forward, softmax_sample, trajectory_loss, AgentParams, LstmState, Trajectory, TrajectoryStep,
};
use metabandit::seeded_rng;
use rand::Rng as _;

type Outcome = Result<String, String>;

fn cache_root() -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn random_trajectory(params: &AgentParams, steps: usize, rng: &mut metabandit::Rng) -> Trajectory {
    let mut state = LstmState::zeros(params.hidden);
    let mut traj = Trajectory::default();
    for t in 0..steps {
        let input: Vec<f64> = (0..params.input).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (h, next) = lstm_forward(params, &state, &input).expect("dimensions match");
        let (logits, value) = heads(params, &h).expect("dimensions match");
        let (a, log_prob, entropy) = softmax_sample(&logits, rng);
        traj.steps.push(TrajectoryStep {
            input,
            state: state.clone(),
            action: if t % 3 == 2 && params.actions == 2 { None } else { Some(a) },
            log_prob,
            entropy,
            value,
            reward: rng.random_range(0.0..1.0),
            ret: 0.0,
            advantage: 0.0,
        });
        state = next;
    }
    traj.bootstrap = rng.random_range(-1.0..1.0);
    attach_returns(&mut traj, rng.random_range(0.5..1.0));
    traj
}

fn gradient_check() -> Outcome {
    let mut rng = seeded_rng(2024);
    let (mut checked, mut agree) = (0usize, 0usize);
    for config in 0..20 {
        let hidden = rng.random_range(1..=8);
        let input = rng.random_range(1..=5);
        let actions = rng.random_range(2..=4);
        let steps = rng.random_range(2..=8);
        let params = AgentParams::init(hidden, input, actions, &mut rng);
        let traj = random_trajectory(&params, steps, &mut rng);
        let w = LossWeights { policy: 1.0, value: rng.random_range(0.01..1.0), entropy: rng.random_range(0.0..1.0) };
        let (grads, _) = bptt_gradients(&params, &traj, &w).map_err(err)?;
        let analytic: Vec<f64> = grads.iter().copied().collect();
        let delta = 1e-5;
        for (idx, &g) in analytic.iter().enumerate() {
            let mut plus = params.clone();
            *plus.iter_mut().nth(idx).unwrap() += delta;
            let mut minus = params.clone();
            *minus.iter_mut().nth(idx).unwrap() -= delta;
            let lp = trajectory_loss(&plus, &traj, &w).map_err(err)?.total;
            let lm = trajectory_loss(&minus, &traj, &w).map_err(err)?.total;
            let fd = (lp - lm) / (2.0 * delta);
            if g.abs() < 1e-8 && fd.abs() < 1e-8 {
                continue;
            }
            checked += 1;
            if (g - fd).abs() / g.abs().max(fd.abs()) <= 1e-4 {
                agree += 1;
            }
        }
        if checked == 0 {
            return Err(format!("configuration {config} had no checkable coordinates"));
        }
    }
    let frac = agree as f64 / checked as f64;
    let msg = format!("{agree}/{checked} coordinates within 1e-4 ({:.2}%) over 20 configurations", 100.0 * frac);
    if frac >= 0.99 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn planner_exactness() -> Outcome {
    let small = support::planner_matches_enumeration()?;
    let started = Instant::now();
    let table = GittinsTable::build(100, (1.0, 1.0));
    let build = started.elapsed();
    let dir = cache_root().join("gittins");
    let _ = fs::remove_dir_all(&dir);
    GittinsTable::load_or_build(100, (1.0, 1.0), &dir).map_err(err)?;
    let cached = GittinsTable::load_or_build(100, (1.0, 1.0), &dir).map_err(err)?;
    if cached != table {
        return Err("cached table differs from a fresh build".into());
    }
    if build > Duration::from_secs(600) {
        return Err(format!("T=100 build took {build:.1?}"));
    }
    Ok(format!("{small}; T=100 table of {} states built in {build:.2?} and reloaded from cache", table.num_states()))
}

fn baseline_ordering() -> Outcome {
    let settings = ExperimentConfig::defaults(Experiment::Exp1).env;
    let cache = cache_root().join("gittins");
    let seed = 31_337;
    let run = |name: &str| -> Result<Vec<f64>, String> {
        let kind: BaselineKind = name.parse().map_err(err)?;
        episode_regrets(&baseline_episodes(&kind, TaskDist::Independent, &settings, 2000, seed, Some(&cache)).map_err(err)?)
            .map_err(err)
    };
    let (g, t, u) = (run("gittins")?, run("thompson")?, run("ucb")?);
    let (gt, gt_se) = paired_difference(&t, &g);
    let (tu, tu_se) = paired_difference(&u, &t);
    let msg = format!(
        "R_100 Gittins {:.3}, Thompson {:.3}, UCB {:.3}; gaps {gt:.3} ({:.1} SE), {tu:.3} ({:.1} SE)",
        mean_and_se(&g).0,
        mean_and_se(&t).0,
        mean_and_se(&u).0,
        gt / gt_se,
        tu / tu_se
    );
    if gt >= 2.0 * gt_se && tu >= 2.0 * tu_se {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn independent_arm_sweep() -> Outcome {
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp1);
    cfg.sweep.samples = 30;
    let result = sweep(&cfg, &cache_root().join("sweep_di"), 1, true).map_err(err)?;
    let seeds = Seeds::new(cfg.seed);
    let cache = cache_root().join("gittins");
    let baseline = |name: &str| -> Result<f64, String> {
        let kind: BaselineKind = name.parse().map_err(err)?;
        let recs = baseline_episodes(&kind, cfg.dist_test, &cfg.env, cfg.eval.report_episodes, seeds.report, Some(&cache))
            .map_err(err)?;
        Ok(mean_and_se(&episode_regrets(&recs).map_err(err)?).0)
    };
    let (gittins, thompson, ucb) = (baseline("gittins")?, baseline("thompson")?, baseline("ucb")?);
    let (agent, se) = mean_and_se(&result.aggregate_regret);
    let failed = result.runs.iter().filter(|r| r.error.is_some()).count();
    let msg = format!(
        "top-{} of {} samples ({failed} failed): R_100 {agent:.3} ± {se:.3}; Thompson {thompson:.3}, UCB {ucb:.3}, 2x Gittins {:.3}",
        result.top.len(),
        result.runs.len(),
        2.0 * gittins
    );
    if agent < thompson && agent < ucb && agent <= 2.0 * gittins {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn structure_exploitation() -> Outcome {
    let cfg = ExperimentConfig::defaults(Experiment::Exp2);
    let train = [TaskDist::Independent, TaskDist::Uniform];
    let test = [TaskDist::Easy, TaskDist::Independent];
    let m = cross_matrix(&cfg, &train, &test, &cache_root().join("matrix"), true).map_err(err)?;
    let cell = |tr, te| m.episodes(tr, te).map(<[f64]>::to_vec).map_err(err);
    let (du_de, di_de) = (cell(TaskDist::Uniform, TaskDist::Easy)?, cell(TaskDist::Independent, TaskDist::Easy)?);
    let (du_di, di_di) = (cell(TaskDist::Uniform, TaskDist::Independent)?, cell(TaskDist::Independent, TaskDist::Independent)?);
    let (gain, gain_se) = paired_difference(&di_de, &du_de);
    let (loss, loss_se) = paired_difference(&du_di, &di_di);
    let msg = format!(
        "on D_e: D_u-trained {:.3} vs D_i-trained {:.3} ({:.1} SE); on D_i: D_u-trained {:.3} vs D_i-trained {:.3} ({:+.1} SE)",
        mean_and_se(&du_de).0,
        mean_and_se(&di_de).0,
        gain / gain_se,
        mean_and_se(&du_di).0,
        mean_and_se(&di_di).0,
        loss / loss_se
    );
    if gain >= 2.0 * gain_se && loss > 0.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn informative_bandit() -> Outcome {
    let cfg = ExperimentConfig::defaults(Experiment::Exp3);
    let r = run_experiment(&cfg, &cache_root().join("exp3"), &RunMode::Train { reuse: true }).map_err(err)?;
    let rate = r.informative_rate.ok_or("no informative analysis")?;
    let msg = format!("informative-then-target in {:.1}% of {} frozen episodes", 100.0 * rate, cfg.eval.total());
    if rate >= 0.9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn restless_bandit() -> Outcome {
    let cfg = ExperimentConfig::defaults(Experiment::Exp4);
    let r = run_experiment(&cfg, &cache_root().join("exp4"), &RunMode::Train { reuse: true }).map_err(err)?;
    let agent = r.restless.as_ref().ok_or("no restless analysis")?;
    let (control, control_regret) = r.control.as_ref().ok_or("no control analysis")?;
    let (gap, gap_se) = paired_difference(control_regret, &r.report_regret);
    let a = gap >= 2.0 * gap_se;
    let b = agent.report.favors_free_alpha() && !control.report.favors_free_alpha();
    let d = agent.report.difference;
    let c = d.t >= 2.0;
    let best = |rep: &metabandit::analysis::VolatilityReport| {
        rep.total_bic.iter().min_by(|x, y| x.1.total_cmp(y.1)).map(|(m, _)| *m).unwrap_or("-")
    };
    let msg = format!(
        "(a) R_150 agent {:.3} vs R-W(0.5) {:.3}, gap {:.1} SE {}; (b) best BIC agent `{}`, control `{}` {}; (c) alpha high {:.3} vs low {:.3}, {:.1} SE {}",
        mean_and_se(&r.report_regret).0,
        mean_and_se(control_regret).0,
        gap / gap_se,
        if a { "ok" } else { "FAIL" },
        best(&agent.report),
        best(&control.report),
        if b { "ok" } else { "FAIL" },
        agent.report.high_alpha.0,
        agent.report.low_alpha.0,
        d.t,
        if c { "ok" } else { "FAIL" },
    );
    if a && b && c {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn two_step_task() -> Outcome {
    use metabandit::analysis::StayCondition as C;
    let cfg = ExperimentConfig::defaults(Experiment::Exp5);
    let r = run_experiment(&cfg, &cache_root().join("exp5"), &RunMode::Train { reuse: true }).map_err(err)?;
    let t = r.stay.ok_or("no stay table")?;
    let trials = cfg.eval.total() * cfg.a2c.trials;
    let p = |c| t.p_stay(c).unwrap_or(f64::NAN);
    let rewarded = p(C::RewardedCommon) - p(C::RewardedRare);
    let unrewarded = p(C::UnrewardedRare) - p(C::UnrewardedCommon);
    let msg = format!(
        "{trials} test trials; P(stay): rew/common {:.3}, rew/rare {:.3}, unrew/common {:.3}, unrew/rare {:.3}",
        p(C::RewardedCommon),
        p(C::RewardedRare),
        p(C::UnrewardedCommon),
        p(C::UnrewardedRare)
    );
    if trials >= 2000 && rewarded > 0.1 && unrewarded > 0.1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reward_ablation() -> Outcome {
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp2);
    cfg.dist_train = TaskDist::Easy;
    cfg.dist_test = TaskDist::Easy;
    cfg.ablate_reward = true;
    let r = ablate_reward_input(&cfg, &cache_root().join("ablation_de"), true, true).map_err(err)?;
    let (rate, se) = r.without_reward.suboptimal_rate();
    let (full, _) = r.with_reward.suboptimal_rate();
    let msg = format!("ablated suboptimal-pull rate {rate:.3} ± {se:.3} (intact agent {full:.3})");
    if (rate - 0.5).abs() <= 3.0 * se {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn property_suite() -> Outcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    for (name, check) in support::PROPERTY_CHECKS {
        if let Err(e) = check() {
            failures.push(format!("{name}: {e}"));
        }
    }
    let elapsed = started.elapsed();
    if failures.is_empty() && elapsed < Duration::from_secs(300) {
        Ok(format!("{} checks in {elapsed:.1?}", support::PROPERTY_CHECKS.len()))
    } else {
        Err(format!("{} failed in {elapsed:.1?}: {}", failures.len(), failures.join("; ")))
    }
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Ok(entries) = fs::read_dir(dir) {
        for e in entries.flatten() {
            let p = e.path();
            if p.is_dir() {
                out.extend(csv_files(&p));
            } else if p.extension().is_some_and(|x| x == "csv") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn same_csvs(a: &Path, b: &Path) -> Result<usize, String> {
    let files = csv_files(a);
    if files.is_empty() {
        return Err(format!("no CSVs under {}", a.display()));
    }
    for f in &files {
        let rel = f.strip_prefix(a).map_err(err)?;
        let other = fs::read(b.join(rel)).map_err(|e| format!("{}: {e}", rel.display()))?;
        if fs::read(f).map_err(err)? != other {
            return Err(format!("{} differs", rel.display()));
        }
    }
    Ok(files.len())
}

fn determinism() -> Outcome {
    let root = cache_root().join("determinism");
    let _ = fs::remove_dir_all(&root);
    let mut compared = 0;
    for exp in Experiment::ALL {
        let mut cfg = ExperimentConfig::defaults(exp);
        cfg.seed = 77;
        cfg.a2c.episodes = 40;
        cfg.a2c.hidden = 8;
        if exp == Experiment::Exp4 {
            cfg.eval = EvalProtocol { selection_episodes: 40, report_episodes: 40 };
        }
        let first = root.join(exp.id()).join("first");
        run_experiment(&cfg, &first, &RunMode::Train { reuse: false }).map_err(err)?;
        let replay = ExperimentConfig::load(&first.join("manifest.toml"), None).map_err(err)?;
        let second = root.join(exp.id()).join("second");
        run_experiment(&replay, &second, &RunMode::Train { reuse: false }).map_err(err)?;
        compared += same_csvs(&first, &second).map_err(|e| format!("{exp}: {e}"))?;
    }
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp1);
    cfg.a2c.episodes = 20;
    cfg.a2c.hidden = 8;
    cfg.sweep.samples = 4;
    cfg.sweep.top_k = 2;
    sweep(&cfg, &root.join("sweep").join("first"), 1, false).map_err(err)?;
    let replay = ExperimentConfig::load(&root.join("sweep").join("first").join("manifest.toml"), None).map_err(err)?;
    sweep(&replay, &root.join("sweep").join("second"), 2, false).map_err(err)?;
    compared += same_csvs(&root.join("sweep").join("first"), &root.join("sweep").join("second"))?;
    Ok(format!("{compared} CSVs byte-identical after re-running from manifests (sweep re-run on 2 workers)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 gradient correctness", gradient_check),
        ("2 planner exactness and caching", planner_exactness),
        ("3 baseline ordering", baseline_ordering),
        ("4 meta-RL on independent arms", independent_arm_sweep),
        ("5 structure exploitation", structure_exploitation),
        ("6 informative bandit", informative_bandit),
        ("7 restless bandits", restless_bandit),
        ("8 two-step task", two_step_task),
        ("9 reward-input ablation", reward_ablation),
        ("10 environment property suite", property_suite),
        ("11 determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.split(' ').next() == Some(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
