//! Compares hand-written BPTT gradients with central finite differences on a
//! small random LSTM and trajectory.

use metabandit::a2c::{attach_returns, LossWeights};
use metabandit::nn::{
    bptt_gradients, heads, lstm_forward, softmax_sample, trajectory_loss, AgentParams, LstmState, Trajectory, TrajectoryStep,
};
use rand::Rng;

fn main() -> metabandit::Result<()> {
    let mut rng = metabandit::seeded_rng(7);
    let params = AgentParams::init(6, 4, 2, &mut rng);
    let mut state = LstmState::zeros(params.hidden);
    let mut traj = Trajectory::default();
    for _ in 0..8 {
        let input: Vec<f64> = (0..params.input).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (h, next) = lstm_forward(&params, &state, &input)?;
        let (logits, value) = heads(&params, &h)?;
        let (action, log_prob, entropy) = softmax_sample(&logits, &mut rng);
        traj.steps.push(TrajectoryStep {
            input,
            state: state.clone(),
            action: Some(action),
            log_prob,
            entropy,
            value,
            reward: rng.random_range(0.0..1.0),
            ret: 0.0,
            advantage: 0.0,
        });
        state = next;
    }
    attach_returns(&mut traj, 0.9);

    let w = LossWeights { policy: 1.0, value: 0.05, entropy: 0.05 };
    let (grads, loss) = bptt_gradients(&params, &traj, &w)?;
    println!("loss {:.5} (policy {:.5}, value {:.5}, entropy {:.5})", loss.total, loss.policy, loss.value, loss.entropy);

    let delta = 1e-5;
    let mut worst: f64 = 0.0;
    for (i, &g) in grads.iter().enumerate() {
        let mut plus = params.clone();
        *plus.iter_mut().nth(i).unwrap() += delta;
        let mut minus = params.clone();
        *minus.iter_mut().nth(i).unwrap() -= delta;
        let fd = (trajectory_loss(&plus, &traj, &w)?.total - trajectory_loss(&minus, &traj, &w)?.total) / (2.0 * delta);
        let scale = g.abs().max(fd.abs());
        if scale > 1e-8 {
            worst = worst.max((g - fd).abs() / scale);
        }
    }
    println!("{} parameters, worst relative error {worst:.2e}", grads.iter().count());
    Ok(())
}
