use serde::{Deserialize, Serialize};

use crate::envs::{reward_level, RewardEncoding};

/// Which signals are fed to the LSTM each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFlags {
    pub reward: bool,
    pub action: bool,
    pub timestep: bool,
    pub observation: bool,
}

impl Default for InputFlags {
    fn default() -> Self {
        Self { reward: true, action: true, timestep: true, observation: false }
    }
}

/// Input width `D` for the given environment shape.
pub fn input_width(flags: &InputFlags, obs_size: usize, actions: usize, reward: RewardEncoding) -> usize {
    let mut d = 0;
    if flags.observation {
        d += obs_size;
    }
    if flags.action {
        d += actions;
    }
    if flags.reward {
        d += reward.width();
    }
    if flags.timestep {
        d += 1;
    }
    d
}

/// Concatenates observation, previous-action one-hot, previous-reward encoding and
/// timestep `t / episode_len`, in that order, skipping disabled signals.
///
/// `step` is 0-based; the encoded timestep is `(step + 1) / episode_len`.
#[allow(clippy::too_many_arguments)]
pub fn encode_input(
    flags: &InputFlags,
    observation: &[f64],
    actions: usize,
    prev_action: Option<usize>,
    prev_reward: Option<f64>,
    reward: RewardEncoding,
    step: usize,
    episode_len: usize,
) -> Vec<f64> {
    let mut x = Vec::with_capacity(input_width(flags, observation.len(), actions, reward));
    if flags.observation {
        x.extend_from_slice(observation);
    }
    if flags.action {
        let start = x.len();
        x.resize(start + actions, 0.0);
        if let Some(a) = prev_action {
            x[start + a] = 1.0;
        }
    }
    if flags.reward {
        match reward {
            RewardEncoding::Scalar => x.push(prev_reward.unwrap_or(0.0)),
            RewardEncoding::InformativeLevels => {
                let start = x.len();
                x.resize(start + reward.width(), 0.0);
                if let Some(slot) = prev_reward.and_then(reward_level) {
                    x[start + slot] = 1.0;
                }
            }
        }
    }
    if flags.timestep {
        x.push((step + 1) as f64 / episode_len.max(1) as f64);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_blank_except_time() {
        let flags = InputFlags::default();
        let x = encode_input(&flags, &[], 2, None, None, RewardEncoding::Scalar, 0, 100);
        assert_eq!(x, vec![0.0, 0.0, 0.0, 0.01]);
    }

    #[test]
    fn layout_with_observation_and_levels() {
        let flags = InputFlags { observation: true, ..Default::default() };
        let x = encode_input(&flags, &[0.0, 1.0, 0.0], 2, Some(1), Some(1.0), RewardEncoding::Scalar, 19, 20);
        assert_eq!(x, vec![0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);

        let flags = InputFlags::default();
        let x = encode_input(&flags, &[], 11, Some(10), Some(0.3), RewardEncoding::InformativeLevels, 1, 5);
        assert_eq!(x.len(), input_width(&flags, 0, 11, RewardEncoding::InformativeLevels));
        assert_eq!(x[10], 1.0);
        assert_eq!(x[11 + 2], 1.0);
        assert_eq!(x.iter().filter(|&&v| v == 1.0).count(), 2);
    }

    #[test]
    fn ablated_reward_is_removed() {
        let flags = InputFlags { reward: false, ..Default::default() };
        let x = encode_input(&flags, &[], 2, Some(0), Some(1.0), RewardEncoding::Scalar, 4, 100);
        assert_eq!(x, vec![1.0, 0.0, 0.05]);
    }
}
