use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use metabandit::analysis::{mean_and_se, volatility_comparison, RwModel};
use metabandit::envs::TaskDist;
use metabandit::harness::{
    self, ablate_reward_input, analyse_restless, baseline_episodes, cross_matrix, episode_regrets, plot_dir, read_episodes,
    regret_rows, run_experiment, sweep, write_fits, write_manifest, write_regret, BaselineKind, Experiment, ExperimentConfig,
    RunMode, Seeds,
};
use metabandit::Result;

#[derive(Parser)]
#[command(name = "metabandit", version, about = "Train and evaluate recurrent meta-RL agents on bandit and two-step tasks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment whose defaults to start from (exp1..exp5).
    #[arg(long, global = true)]
    exp: Option<Experiment>,
    /// Training distribution (di, du, de, dm, dh, informative, restless, twostep).
    #[arg(long, global = true)]
    dist_train: Option<TaskDist>,
    /// Test distribution; defaults to the training distribution.
    #[arg(long, global = true)]
    dist_test: Option<TaskDist>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to `$METABANDIT_OUT/<exp>/<command>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Config file or run manifest; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Reuse networks already trained with identical settings in the output directory.
    #[arg(long, global = true)]
    reuse: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train, freeze and evaluate one agent.
    Train,
    /// Evaluate a saved network with its weights frozen.
    Eval {
        /// Parameter file to evaluate.
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Random hyperparameter search with top-k reporting.
    Sweep {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Train on each Bernoulli family and test on each.
    Matrix,
    /// Run classical baselines on the test distribution.
    Baseline {
        /// gittins, thompson, thompson-restless[:decay], ucb[:chi], rw[:alpha[:beta[:eps]]]; repeatable.
        #[arg(long = "policy", default_values_t = ["gittins".to_string(), "thompson".to_string(), "ucb".to_string()])]
        policies: Vec<String>,
    },
    /// Fit Rescorla-Wagner models to restless episodes of a previous run.
    Fit {
        /// Directory holding `episodes.csv` and `tasks.csv`.
        #[arg(long)]
        from: PathBuf,
    },
    /// Train twin agents with and without the reward input.
    Ablate,
    /// Render SVG plots for the CSVs in a results directory.
    Plot {
        /// Results directory; defaults to `--out`.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Train => "train",
            Command::Eval { .. } => "eval",
            Command::Sweep { .. } => "sweep",
            Command::Matrix => "matrix",
            Command::Baseline { .. } => "baseline",
            Command::Fit { .. } => "fit",
            Command::Ablate => "ablate",
            Command::Plot { .. } => "plot",
        }
    }
}

fn load_config(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path, c.exp)?,
        None => ExperimentConfig::defaults(c.exp.unwrap_or(Experiment::Exp1)),
    };
    if let Some(d) = c.dist_train {
        cfg.dist_train = d;
        if c.dist_test.is_none() {
            cfg.dist_test = d;
        }
    }
    if let Some(d) = c.dist_test {
        cfg.dist_test = d;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn report(label: &str, regrets: &[f64]) {
    let (m, se) = mean_and_se(regrets);
    println!("{label:<28} R_T = {m:.3} ± {se:.3} ({} episodes)", regrets.len());
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli.common)?;
    let out = cli.common.out.clone().unwrap_or_else(|| harness::default_out_root().join(cfg.exp.id()).join(cli.command.name()));
    let reuse = cli.common.reuse;
    match cli.command {
        Command::Train => {
            let r = run_experiment(&cfg, &out, &RunMode::Train { reuse })?;
            summarise(&r);
        }
        Command::Eval { checkpoint } => {
            cfg.a2c.learning_rate = 0.0;
            let r = run_experiment(&cfg, &out, &RunMode::EvalOnly { checkpoint })?;
            summarise(&r);
        }
        Command::Sweep { samples, top_k } => {
            if let Some(n) = samples {
                cfg.sweep.samples = n;
            }
            if let Some(k) = top_k {
                cfg.sweep.top_k = k;
            }
            let r = sweep(&cfg, &out, cli.common.workers, reuse)?;
            for run in &r.runs {
                match (&run.selection_metric, &run.error) {
                    (Some(m), _) => println!(
                        "sample {:3}  lr {:.2e}  gamma {:.3}  selection R_T {:.3}",
                        run.index, run.learning_rate, run.discount, m
                    ),
                    (None, e) => println!("sample {:3}  failed: {}", run.index, e.clone().unwrap_or_default()),
                }
            }
            println!("top {:?}", r.top);
            report(&format!("top-{} report", r.top.len()), &r.aggregate_regret);
        }
        Command::Matrix => {
            let m = cross_matrix(&cfg, &TaskDist::BERNOULLI, &TaskDist::BERNOULLI, &out, reuse)?;
            print!("{:>8}", "train\\test");
            for d in &m.test {
                print!("{:>9}", d.tag());
            }
            println!();
            for &tr in &m.train {
                print!("{:>10}", tr.tag());
                for &te in &m.test {
                    print!("{:>9.3}", m.cell(tr, te)?.0);
                }
                println!();
            }
        }
        Command::Baseline { policies } => {
            std::fs::create_dir_all(&out)?;
            let seeds = Seeds::new(cfg.seed);
            let cache = out.join("cache");
            let mut rows = Vec::new();
            for name in &policies {
                let kind: BaselineKind = name.parse()?;
                let records =
                    baseline_episodes(&kind, cfg.dist_test, &cfg.env, cfg.eval.report_episodes, seeds.report, Some(&cache))?;
                report(&kind.name(), &episode_regrets(&records)?);
                rows.extend(regret_rows(&kind.name(), "-", &records, 0)?);
            }
            write_regret(&out.join("regret.csv"), &rows)?;
            write_manifest(&out, "baseline", &cfg, &["regret.csv"])?;
        }
        Command::Fit { from } => {
            std::fs::create_dir_all(&out)?;
            let records = read_episodes(&from)?;
            let analysis = analyse_restless(&records)?;
            write_fits(&out.join("fits.csv"), &analysis.fits)?;
            write_manifest(&out, "fit", &cfg, &["fits.csv"])?;
            print_volatility(&analysis.fits)?;
        }
        Command::Ablate => {
            let r = ablate_reward_input(&cfg, &out, true, reuse)?;
            for (name, arm) in [("with reward input", &r.with_reward), ("without reward input", &r.without_reward)] {
                report(name, &arm.regret);
                let (s, se) = arm.suboptimal_rate();
                println!("{:<28} suboptimal-pull rate {s:.3} ± {se:.3}", "");
            }
        }
        Command::Plot { dir } => {
            let dir = dir.unwrap_or(out);
            for p in plot_dir(&dir)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn print_volatility(fits: &[metabandit::analysis::FitResult]) -> Result<()> {
    let v = volatility_comparison(fits, RwModel::AB)?;
    println!(
        "alpha (ab): low {:.3} ± {:.3} [{} blocks], high {:.3} ± {:.3} [{} blocks], t = {:.2}",
        v.low_alpha.0, v.low_alpha.1, v.low_blocks, v.high_alpha.0, v.high_alpha.1, v.high_blocks, v.difference.t
    );
    for (model, bic) in &v.total_bic {
        println!("model {model:<4} total BIC {bic:.1}  wins {}", v.wins.get(model).copied().unwrap_or(0));
    }
    Ok(())
}

fn summarise(r: &metabandit::harness::ExperimentResult) {
    report("agent (report set)", &r.report_regret);
    if let Some(t) = &r.stay {
        for c in metabandit::analysis::StayCondition::ALL {
            println!("P(stay | {:<18}) = {:.3} (n = {})", c.label(), t.p_stay(c).unwrap_or(f64::NAN), t.count(c));
        }
    }
    if let Some(rate) = r.informative_rate {
        println!("informative strategy in {:.1}% of episodes", 100.0 * rate);
    }
    if let Some(a) = &r.restless {
        let _ = print_volatility(&a.fits);
    }
    if let Some((_, regret)) = &r.control {
        report("R-W control (report set)", regret);
    }
    println!("results in {}", r.out_dir.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
