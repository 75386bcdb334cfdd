//! Monte Carlo and oracle checks shared by the integration tests and the
//! acceptance binary. Each check returns a one-line summary or a failure message.

#![allow(dead_code)]

use metabandit::a2c::EpisodeRecord;
use metabandit::analysis::{fit_rw, regret_curve, stay_probabilities, volatility_comparison, RwModel, StayCondition};
use metabandit::baselines::{
    gittins_choose, play_episode, thompson_choose, BanditPolicy, BetaPosterior, GittinsTable, RwPolicy, UcbPolicy,
};
use metabandit::envs::{
    pull, restless_init, restless_step, sample_informative_task, sample_task, two_step_act, two_step_reset, EnvSettings, Regime,
    RestlessEnv, RestlessParams, Stage, TaskDist, TransitionKind, INFORMATIVE_ARMS,
};
use metabandit::harness::regime_blocks;
use metabandit::seeded_rng;
use rand::Rng as _;

pub type Check = fn() -> Result<String, String>;

/// Every environment, baseline and analysis property, by name.
pub const PROPERTY_CHECKS: &[(&str, Check)] = &[
    ("independent arms: mean 0.5, uncorrelated", independent_arm_moments),
    ("correlated families: p1 + p2 = 1, supports", correlated_families),
    ("sampled mu* is the max arm mean", mu_star_is_max),
    ("Bernoulli pull rate", bernoulli_pull_rate),
    ("informative first-trial expectations", informative_first_trial),
    ("restless jump count and p2 = 1 - p1", restless_dynamics),
    ("two-step transition frequencies", two_step_frequencies),
    ("planner matches exhaustive enumeration", planner_matches_enumeration),
    ("uniform-random regret on hard tasks", uniform_random_regret),
    ("UCB regret is sublinear", ucb_sublinear),
    ("Thompson choice frequencies", thompson_frequencies),
    ("baselines are deterministic", baselines_deterministic),
    ("regret is non-negative and non-decreasing", regret_monotone),
    ("R-W parameter recovery", rw_recovery),
    ("BIC recovers the generating class", bic_recovery),
    ("volatility-dependent learning rates are recovered", volatility_recovery),
    ("stay-probability counts partition trial pairs", stay_partition),
];

fn within(name: &str, observed: f64, expected: f64, tol: f64) -> Result<(), String> {
    if (observed - expected).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{name}: {observed:.6} vs {expected:.6} (tolerance {tol:.6})"))
    }
}

fn binomial_3sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

pub fn independent_arm_moments() -> Result<String, String> {
    let mut rng = seeded_rng(101);
    let n = 100_000;
    let (mut s1, mut s2, mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let p = sample_task(TaskDist::Independent, &mut rng).map_err(|e| e.to_string())?.probs().unwrap();
        s1 += p[0];
        s2 += p[1];
        s11 += p[0] * p[0];
        s22 += p[1] * p[1];
        s12 += p[0] * p[1];
    }
    let nf = n as f64;
    let (m1, m2) = (s1 / nf, s2 / nf);
    let cov = s12 / nf - m1 * m2;
    let rho = cov / ((s11 / nf - m1 * m1) * (s22 / nf - m2 * m2)).sqrt();
    within("mean p1", m1, 0.5, 0.005)?;
    within("correlation", rho, 0.0, 0.01)?;
    Ok(format!("mean p1 {m1:.4}, rho {rho:.4}"))
}

pub fn correlated_families() -> Result<String, String> {
    let mut rng = seeded_rng(102);
    let supports: [(TaskDist, Option<[f64; 2]>); 4] = [
        (TaskDist::Uniform, None),
        (TaskDist::Easy, Some([0.1, 0.9])),
        (TaskDist::Medium, Some([0.25, 0.75])),
        (TaskDist::Hard, Some([0.4, 0.6])),
    ];
    for (dist, support) in supports {
        let mut seen = [0usize; 2];
        for _ in 0..10_000 {
            let p = sample_task(dist, &mut rng).map_err(|e| e.to_string())?.probs().unwrap();
            if p[0] + p[1] != 1.0 {
                return Err(format!("{dist}: p1 + p2 = {}", p[0] + p[1]));
            }
            if let Some(s) = support {
                let i = s.iter().position(|&v| v == p[0]).ok_or(format!("{dist}: p1 = {} off support", p[0]))?;
                seen[i] += 1;
            }
            if dist == TaskDist::Hard {
                within("hard-task gap", (p[0] - p[1]).abs(), 0.2, 1e-12)?;
            }
        }
        if support.is_some() {
            within(&format!("{dist} balance"), seen[0] as f64 / 10_000.0, 0.5, binomial_3sigma(0.5, 10_000))?;
        }
    }
    Ok("40000 tasks".into())
}

pub fn mu_star_is_max() -> Result<String, String> {
    let mut rng = seeded_rng(103);
    let mut n = 0;
    for dist in TaskDist::BERNOULLI {
        for _ in 0..2_000 {
            let task = sample_task(dist, &mut rng).map_err(|e| e.to_string())?;
            let raw = task.probs().unwrap();
            let best = raw.iter().copied().fold(f64::MIN, f64::max);
            if task.optimal_value() != best {
                return Err(format!("{dist}: mu* {} vs {best}", task.optimal_value()));
            }
            n += 1;
        }
    }
    for _ in 0..2_000 {
        let task = sample_informative_task(&mut rng);
        if task.optimal_value() != 5.0 {
            return Err(format!("informative mu* {}", task.optimal_value()));
        }
        n += 1;
    }
    Ok(format!("{n} tasks"))
}

pub fn bernoulli_pull_rate() -> Result<String, String> {
    let mut rng = seeded_rng(104);
    let task = metabandit::envs::BanditTask::bernoulli(TaskDist::Independent, vec![0.7, 0.0]);
    let n = 100_000;
    let mut hits = 0.0;
    for _ in 0..n {
        hits += pull(&task, 0, &mut rng).map_err(|e| e.to_string())?;
        if pull(&task, 1, &mut rng).map_err(|e| e.to_string())? != 0.0 {
            return Err("p = 0 arm paid".into());
        }
    }
    let rate = hits / n as f64;
    within("pull rate", rate, 0.7, binomial_3sigma(0.7, n))?;
    Ok(format!("rate {rate:.4}"))
}

pub fn informative_first_trial() -> Result<String, String> {
    let mut rng = seeded_rng(105);
    let n = 10_000;
    let mut sums = vec![0.0; INFORMATIVE_ARMS];
    let mut sq = vec![0.0; INFORMATIVE_ARMS];
    for _ in 0..n {
        let task = sample_informative_task(&mut rng);
        for (arm, (s, q)) in sums.iter_mut().zip(&mut sq).enumerate() {
            let r = pull(&task, arm, &mut rng).map_err(|e| e.to_string())?;
            *s += r;
            *q += r * r;
        }
    }
    let nf = n as f64;
    for (arm, (s, q)) in sums.iter().zip(&sq).enumerate() {
        let m = s / nf;
        let se = ((q / nf - m * m) / nf).sqrt();
        let expected = if arm == INFORMATIVE_ARMS - 1 { 0.55 } else { 1.4 };
        within(&format!("arm {} first-trial reward", arm + 1), m, expected, 3.0 * se)?;
    }
    Ok(format!("informative {:.4}, arm 1 {:.4}", sums[INFORMATIVE_ARMS - 1] / nf, sums[0] / nf))
}

pub fn restless_dynamics() -> Result<String, String> {
    let mut rng = seeded_rng(106);
    let params = RestlessParams::default();
    let (episodes, steps) = (10_000, 150);
    let mut jumps = 0usize;
    for _ in 0..episodes {
        let mut s = restless_init(Regime::High, &params, &mut rng);
        for _ in 0..steps {
            s = restless_step(&s, &mut rng);
            if !(0.0..=1.0).contains(&s.p1) || s.p2() != 1.0 - s.p1 {
                return Err(format!("p1 {} p2 {}", s.p1, s.p2()));
            }
        }
        jumps += s.jumps;
    }
    let mean = jumps as f64 / episodes as f64;
    let sd = (steps as f64 * 0.1 * 0.9 / episodes as f64).sqrt();
    within("jumps per high-volatility episode", mean, 15.0, 3.0 * sd)?;

    let frozen = RestlessParams { lambda_low: 0.0, ..params };
    let mut s = restless_init(Regime::Low, &frozen, &mut rng);
    let p0 = s.p1;
    for _ in 0..150 {
        s = restless_step(&s, &mut rng);
    }
    if s.p1 != p0 {
        return Err("lambda = 0 moved p1".into());
    }
    let still = RestlessParams { lambda_high: 1.0, jump_sd: 0.0, ..params };
    let mut s = restless_init(Regime::High, &still, &mut rng);
    let p0 = s.p1;
    for _ in 0..150 {
        s = restless_step(&s, &mut rng);
    }
    if s.p1 != p0 {
        return Err("zero-size jumps moved p1".into());
    }
    Ok(format!("mean jumps {mean:.3}"))
}

pub fn two_step_frequencies() -> Result<String, String> {
    let mut rng = seeded_rng(107);
    let n = 100_000;
    let (mut s2_fixed, mut s2_random, mut good_visits, mut good_rewards) = (0usize, 0usize, 0usize, 0.0);
    let mut mdp = two_step_reset(&mut rng);
    for _ in 0..n {
        let (stage, _, kind) = two_step_act(&mut mdp, 0, &mut rng).map_err(|e| e.to_string())?;
        if (stage == Stage::S2) != (kind == TransitionKind::Common) {
            return Err("transition kind disagrees with the visited state".into());
        }
        s2_fixed += (stage == Stage::S2) as usize;
        let action = rng.random_range(0..2);
        let (stage, reward, _) = two_step_act(&mut mdp, action, &mut rng).map_err(|e| e.to_string())?;
        s2_random += (stage == Stage::S2) as usize;
        if stage == mdp.good_state {
            good_visits += 1;
            good_rewards += reward;
        }
    }
    let f_fixed = s2_fixed as f64 / n as f64;
    let f_random = s2_random as f64 / n as f64;
    let r_good = good_rewards / good_visits as f64;
    within("S2 after a1", f_fixed, 0.75, binomial_3sigma(0.75, n))?;
    within("S2 under random actions", f_random, 0.5, binomial_3sigma(0.5, n))?;
    within("reward at the good state", r_good, 0.9, binomial_3sigma(0.9, good_visits))?;
    Ok(format!("S2|a1 {f_fixed:.4}, S2|random {f_random:.4}, reward|good {r_good:.4}"))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Prior probability of an ordered outcome sequence for two independent
/// uniform-prior Bernoulli arms: `prod_a s_a! f_a! / (s_a + f_a + 1)!`.
fn sequence_probability(history: &[(usize, bool)]) -> f64 {
    (0..2)
        .map(|arm| {
            let s = history.iter().filter(|&&(a, r)| a == arm && r).count();
            let f = history.iter().filter(|&&(a, r)| a == arm && !r).count();
            factorial(s) * factorial(f) / factorial(s + f + 1)
        })
        .product()
}

fn success_probability(history: &[(usize, bool)], arm: usize) -> f64 {
    let mut next = history.to_vec();
    next.push((arm, true));
    sequence_probability(&next) / sequence_probability(history)
}

/// Expected reward of a policy given as a function of the full history.
fn policy_value(history: &mut Vec<(usize, bool)>, remaining: usize, policy: &mut dyn FnMut(&[(usize, bool)]) -> usize) -> f64 {
    if remaining == 0 {
        return 0.0;
    }
    let arm = policy(history);
    let p = success_probability(history, arm);
    history.push((arm, true));
    let win = policy_value(history, remaining - 1, policy);
    history.pop();
    history.push((arm, false));
    let lose = policy_value(history, remaining - 1, policy);
    history.pop();
    p * (1.0 + win) + (1.0 - p) * lose
}

/// Best expected reward over every deterministic history-dependent policy.
///
/// For `horizon <= 3` the policies are enumerated one by one as assignments of
/// an arm to every history node; beyond that the maximum is taken node by node
/// over the full (non-aggregated) history tree.
pub fn enumerated_optimum(horizon: usize) -> f64 {
    fn node_id(history: &[(usize, bool)]) -> usize {
        // Histories of length d occupy ids [(4^d - 1)/3, (4^(d+1) - 1)/3).
        let d = history.len();
        let offset = (4usize.pow(d as u32) - 1) / 3;
        offset + history.iter().fold(0, |acc, &(a, r)| acc * 4 + 2 * a + r as usize)
    }
    fn tree_max(history: &mut Vec<(usize, bool)>, remaining: usize) -> f64 {
        if remaining == 0 {
            return 0.0;
        }
        (0..2)
            .map(|arm| {
                let p = success_probability(history, arm);
                history.push((arm, true));
                let win = tree_max(history, remaining - 1);
                history.pop();
                history.push((arm, false));
                let lose = tree_max(history, remaining - 1);
                history.pop();
                p * (1.0 + win) + (1.0 - p) * lose
            })
            .fold(f64::MIN, f64::max)
    }
    if horizon > 3 {
        return tree_max(&mut Vec::new(), horizon);
    }
    let nodes = (4usize.pow(horizon as u32) - 1) / 3;
    let mut best = f64::MIN;
    for assignment in 0u64..(1u64 << nodes) {
        let mut policy = |h: &[(usize, bool)]| ((assignment >> node_id(h)) & 1) as usize;
        best = best.max(policy_value(&mut Vec::new(), horizon, &mut policy));
    }
    best
}

pub fn planner_matches_enumeration() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for horizon in 1..=4 {
        let table = GittinsTable::build(horizon, (1.0, 1.0));
        let optimum = enumerated_optimum(horizon);
        let mut follow = |h: &[(usize, bool)]| {
            let mut post = BetaPosterior::uniform(2);
            for &(a, r) in h {
                if r {
                    post.alpha[a] += 1.0;
                } else {
                    post.beta[a] += 1.0;
                }
            }
            gittins_choose(&table, &post, h.len()).expect("consistent posterior")
        };
        let played = policy_value(&mut Vec::new(), horizon, &mut follow);
        let dp = table.value([0; 4]);
        for (what, v) in [("table value", dp), ("planner policy", played)] {
            let err = (v - optimum).abs();
            worst = worst.max(err);
            if err > 1e-10 {
                return Err(format!("horizon {horizon}: {what} {v:.12} vs enumerated {optimum:.12}"));
            }
        }
    }
    // After one success on arm 1 with two pulls left, staying is optimal.
    let table = GittinsTable::build(2, (1.0, 1.0));
    let post = BetaPosterior { alpha: vec![2.0, 1.0], beta: vec![1.0, 1.0] };
    if gittins_choose(&table, &post, 1).map_err(|e| e.to_string())? != 0 {
        return Err("horizon 2: did not stay after a success".into());
    }
    Ok(format!("horizons 1-4, max error {worst:.1e}"))
}

fn play_many(
    policy: &mut dyn BanditPolicy,
    dist: TaskDist,
    trials: usize,
    episodes: usize,
    seed: u64,
) -> Result<Vec<EpisodeRecord>, String> {
    let settings = EnvSettings { trials, ..EnvSettings::default() };
    let mut rng = seeded_rng(seed);
    (0..episodes)
        .map(|_| {
            let mut env = dist.sample_env(&settings, &mut rng);
            play_episode(policy, env.as_mut(), &mut rng).map_err(|e| e.to_string())
        })
        .collect()
}

fn regrets_at(records: &[EpisodeRecord], t: usize) -> Result<Vec<f64>, String> {
    records.iter().map(|r| regret_curve(r).map(|c| c.at(t)).map_err(|e| e.to_string())).collect()
}

pub fn uniform_random_regret() -> Result<String, String> {
    let mut random = RwPolicy::new(0.5, 0.0, 0.0);
    let records = play_many(&mut random, TaskDist::Hard, 100, 10_000, 108)?;
    let (m, se) = metabandit::analysis::mean_and_se(&regrets_at(&records, 100)?);
    within("uniform-random R_100 on hard tasks", m, 10.0, 2.0 * se)?;
    Ok(format!("R_100 {m:.3} ± {se:.3}"))
}

pub fn ucb_sublinear() -> Result<String, String> {
    let mut ucb = UcbPolicy::new(1.0);
    let records = play_many(&mut ucb, TaskDist::Independent, 100, 2_000, 109)?;
    let r25 = metabandit::analysis::mean(&regrets_at(&records, 25)?);
    let r100 = metabandit::analysis::mean(&regrets_at(&records, 100)?);
    if r100 / 100.0 < r25 / 25.0 {
        Ok(format!("R_25/25 {:.4}, R_100/100 {:.4}", r25 / 25.0, r100 / 100.0))
    } else {
        Err(format!("R_25/25 {:.4} <= R_100/100 {:.4}", r25 / 25.0, r100 / 100.0))
    }
}

pub fn thompson_frequencies() -> Result<String, String> {
    let mut rng = seeded_rng(110);
    let n = 100_000;
    let fresh = BetaPosterior::uniform(2);
    let zeros = (0..n).filter(|_| thompson_choose(&fresh, &mut rng) == 0).count();
    let f = zeros as f64 / n as f64;
    within("fresh posteriors", f, 0.5, binomial_3sigma(0.5, n))?;
    let confident = BetaPosterior { alpha: vec![100.0, 1.0], beta: vec![1.0, 100.0] };
    let firsts = (0..n).filter(|_| thompson_choose(&confident, &mut rng) == 0).count();
    let g = firsts as f64 / n as f64;
    if g <= 0.999 {
        return Err(format!("Beta(100,1) chosen {g:.5}"));
    }
    Ok(format!("fresh {f:.4}, confident {g:.5}"))
}

pub fn baselines_deterministic() -> Result<String, String> {
    use metabandit::harness::{baseline_episodes, BaselineKind};
    let kinds = ["gittins", "thompson", "thompson-restless", "ucb", "rw:0.3:5:0.1"];
    let settings = EnvSettings { trials: 30, ..EnvSettings::default() };
    for k in kinds {
        let kind: BaselineKind = k.parse().map_err(|e: metabandit::Error| e.to_string())?;
        let dist = if k.starts_with("rw") || k.contains("restless") { TaskDist::Restless } else { TaskDist::Independent };
        let a = baseline_episodes(&kind, dist, &settings, 20, 7, None).map_err(|e| e.to_string())?;
        let b = baseline_episodes(&kind, dist, &settings, 20, 7, None).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{k} is not reproducible"));
        }
    }
    Ok(format!("{} policies", kinds.len()))
}

pub fn regret_monotone() -> Result<String, String> {
    let mut random = RwPolicy::new(0.5, 0.0, 0.0);
    let mut n = 0;
    for dist in [TaskDist::Independent, TaskDist::Easy, TaskDist::Restless] {
        let trials = if dist == TaskDist::Restless { 150 } else { 100 };
        for rec in play_many(&mut random, dist, trials, 200, 111)? {
            let c = regret_curve(&rec).map_err(|e| e.to_string())?;
            if c.increments.iter().any(|&x| x < 0.0) || c.cumulative.windows(2).any(|w| w[1] < w[0]) {
                return Err(format!("{dist}: regret decreased"));
            }
            n += 1;
        }
    }
    Ok(format!("{n} episodes"))
}

/// `episodes` restless episodes of an R-W learner whose learning rate depends on the regime.
pub fn rw_restless_episodes(episodes: usize, alpha: impl Fn(Regime) -> f64, beta: f64, seed: u64) -> Vec<EpisodeRecord> {
    let mut rng = seeded_rng(seed);
    (0..episodes)
        .map(|_| {
            let mut env = RestlessEnv::sample(RestlessParams::default(), 150, &mut rng);
            let mut policy = RwPolicy::new(alpha(env.regime()), beta, 0.0);
            play_episode(&mut policy, &mut env, &mut rng).expect("restless episode")
        })
        .collect()
}

pub fn rw_recovery() -> Result<String, String> {
    let records = rw_restless_episodes(10, |_| 0.3, 5.0, 112);
    let fit = fit_rw(&records, RwModel::AB, 0).map_err(|e| e.to_string())?;
    within("recovered alpha", fit.alpha, 0.3, 0.1)?;
    within("recovered beta", fit.beta, 5.0, 1.5)?;
    Ok(format!("alpha {:.3}, beta {:.3} from {} choices", fit.alpha, fit.beta, fit.n))
}

pub fn bic_recovery() -> Result<String, String> {
    let blocks = 10;
    let mut summary = Vec::new();
    for (alpha, expected) in [(0.5, "b"), (0.15, "ab")] {
        let mut hits = 0;
        for b in 0..blocks {
            let records = rw_restless_episodes(10, |_| alpha, 5.0, 1_000 + b as u64 + (alpha * 100.0) as u64);
            let best = RwModel::ALL
                .into_iter()
                .map(|m| fit_rw(&records, m, b).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .min_by(|x, y| x.bic.total_cmp(&y.bic))
                .unwrap();
            hits += (best.model.tag() == expected) as usize;
        }
        if hits * 10 < blocks * 8 {
            return Err(format!("alpha {alpha}: `{expected}` won {hits}/{blocks} blocks"));
        }
        summary.push(format!("{expected} {hits}/{blocks}"));
    }
    Ok(summary.join(", "))
}

pub fn volatility_recovery() -> Result<String, String> {
    let alpha = |r: Regime| if r == Regime::High { 0.8 } else { 0.2 };
    let records = rw_restless_episodes(80, alpha, 5.0, 113);
    let fits = regime_blocks(&records, 10)
        .iter()
        .enumerate()
        .map(|(i, (regime, block))| {
            let mut f = fit_rw(block, RwModel::AB, i)?;
            f.volatility = Some(*regime);
            Ok(f)
        })
        .collect::<metabandit::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let v = volatility_comparison(&fits, RwModel::AB).map_err(|e| e.to_string())?;
    if v.difference.difference > 0.3 {
        Ok(format!("alpha low {:.3}, high {:.3}", v.low_alpha.0, v.high_alpha.0))
    } else {
        Err(format!("difference {:.3}", v.difference.difference))
    }
}

pub fn stay_partition() -> Result<String, String> {
    let settings = EnvSettings { trials: metabandit::envs::TWO_STEP_TRIALS, ..EnvSettings::default() };
    let mut rng = seeded_rng(114);
    let mut records = Vec::new();
    for _ in 0..500 {
        let mut env = TaskDist::TwoStep.sample_env(&settings, &mut rng);
        let mut steps = Vec::new();
        while steps.len() < env.episode_len() {
            let trial = env.trial();
            let action = env.needs_action().then(|| rng.random_range(0..2));
            let state = env.state_index();
            let out = env.step(action, &mut rng).map_err(|e| e.to_string())?;
            let transition = env.last_transition();
            steps.push(metabandit::a2c::TrialRecord { trial, state, action, reward: out.reward, transition });
        }
        records.push(EpisodeRecord { dist: TaskDist::TwoStep, task: env.task(), steps });
    }
    let table = stay_probabilities(&records).map_err(|e| e.to_string())?;
    let pairs = records.len() * (metabandit::envs::TWO_STEP_TRIALS - 1);
    if table.total() != pairs {
        return Err(format!("{} counted pairs, expected {pairs}", table.total()));
    }
    for c in StayCondition::ALL {
        let p = table.p_stay(c).ok_or(format!("{} empty", c.label()))?;
        within(&format!("random stay | {}", c.label()), p, 0.5, 3.0 * (0.25 / table.count(c) as f64).sqrt())?;
    }
    Ok(format!("{pairs} pairs"))
}
