//! Exact finite-horizon Bayes-optimal play for two independent Bernoulli arms.
//!
//! The value of every joint posterior `(s1, f1, s2, f2)` with
//! `n = s1 + f1 + s2 + f2 <= T` pulls is computed by backward induction:
//!
//! ```text
//! V_T(.) = 0
//! Q_a(x) = p_a (1 + V(x + success_a)) + (1 - p_a) V(x + failure_a)
//! V(x)   = max_a Q_a(x)
//! ```
//!
//! with `p_a` the posterior-mean success probability. About 4.6M states at `T = 100`.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::BetaPosterior;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"MBGITTIN";
const VERSION: u32 = 1;
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GittinsTable {
    horizon: usize,
    prior: (f64, f64),
    values: Vec<f64>,
}

fn level_start(n: usize) -> usize {
    // C(n + 3, 4): states with fewer than n pulls.
    n * (n + 1) * (n + 2) * (n + 3) / 24
}

fn block_start(n: usize, k1: usize) -> usize {
    // sum_{j < k1} (j + 1)(n - j + 1)
    (n + 1) * k1 * (k1 + 1) / 2 - if k1 == 0 { 0 } else { (k1 - 1) * k1 * (k1 + 1) / 3 }
}

impl GittinsTable {
    /// Runs backward induction for `horizon` pulls under `Beta(prior.0, prior.1)` priors.
    pub fn build(horizon: usize, prior: (f64, f64)) -> Self {
        let mut table = Self { horizon, prior, values: vec![0.0; level_start(horizon + 1)] };
        for n in (0..horizon).rev() {
            for k1 in 0..=n {
                let n2 = n - k1;
                for s1 in 0..=k1 {
                    for s2 in 0..=n2 {
                        let x = [s1, k1 - s1, s2, n2 - s2];
                        let (q0, q1) = table.action_values(x);
                        let idx = table.index(x);
                        table.values[idx] = q0.max(q1);
                    }
                }
            }
        }
        table
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn prior(&self) -> (f64, f64) {
        self.prior
    }

    pub fn num_states(&self) -> usize {
        self.values.len()
    }

    fn index(&self, [s1, f1, s2, f2]: [usize; 4]) -> usize {
        let n = s1 + f1 + s2 + f2;
        let k1 = s1 + f1;
        level_start(n) + block_start(n, k1) + s1 * (n - k1 + 1) + s2
    }

    /// Optimal expected reward still to come from posterior state `x`.
    pub fn value(&self, x: [usize; 4]) -> f64 {
        let n: usize = x.iter().sum();
        if n >= self.horizon {
            0.0
        } else {
            self.values[self.index(x)]
        }
    }

    fn posterior_mean(&self, s: usize, f: usize) -> f64 {
        (s as f64 + self.prior.0) / ((s + f) as f64 + self.prior.0 + self.prior.1)
    }

    /// Expected immediate-plus-continuation reward of pulling each arm from `x`.
    pub fn action_values(&self, x: [usize; 4]) -> (f64, f64) {
        let [s1, f1, s2, f2] = x;
        let p0 = self.posterior_mean(s1, f1);
        let p1 = self.posterior_mean(s2, f2);
        let q0 = p0 * (1.0 + self.value([s1 + 1, f1, s2, f2])) + (1.0 - p0) * self.value([s1, f1 + 1, s2, f2]);
        let q1 = p1 * (1.0 + self.value([s1, f1, s2 + 1, f2])) + (1.0 - p1) * self.value([s1, f1, s2, f2 + 1]);
        (q0, q1)
    }

    fn cache_name(horizon: usize, prior: (f64, f64)) -> String {
        format!("gittins_h{horizon}_a{}_b{}.bin", prior.0, prior.1)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(fs::File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.horizon as u64).to_le_bytes())?;
        w.write_all(&self.prior.0.to_le_bytes())?;
        w.write_all(&self.prior.1.to_le_bytes())?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bad = |reason: &str| Error::Format { path: path.to_path_buf(), reason: reason.to_string() };
        let mut r = BufReader::new(fs::File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not a Gittins table"));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        if u32::from_le_bytes(b4) != VERSION {
            return Err(bad("unsupported version"));
        }
        let mut read_u64 = |r: &mut BufReader<fs::File>| -> Result<u64> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let horizon = read_u64(&mut r)? as usize;
        let a = f64::from_bits(read_u64(&mut r)?);
        let b = f64::from_bits(read_u64(&mut r)?);
        let len = read_u64(&mut r)? as usize;
        if len != level_start(horizon + 1) {
            return Err(bad("state count does not match horizon"));
        }
        let mut bytes = vec![0u8; len * 8];
        r.read_exact(&mut bytes)?;
        let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
        Ok(Self { horizon, prior: (a, b), values })
    }

    /// Loads the table for `(horizon, prior)` from `dir`, building and caching it on a miss.
    pub fn load_or_build(horizon: usize, prior: (f64, f64), dir: &Path) -> Result<Self> {
        let path: PathBuf = dir.join(Self::cache_name(horizon, prior));
        if path.exists() {
            if let Ok(t) = Self::load(&path) {
                if t.horizon == horizon && t.prior == prior {
                    return Ok(t);
                }
            }
        }
        let table = Self::build(horizon, prior);
        table.save(&path)?;
        Ok(table)
    }
}

/// Table for `horizon` pulls under uniform priors.
pub fn gittins_table(horizon: usize) -> GittinsTable {
    GittinsTable::build(horizon, (1.0, 1.0))
}

/// Bayes-optimal arm for `posterior` after `t` pulls; ties go to arm 0.
pub fn gittins_choose(table: &GittinsTable, posterior: &BetaPosterior, t: usize) -> Result<usize> {
    if posterior.num_arms() != 2 {
        return Err(Error::config("the planner handles two-armed bandits only"));
    }
    let (c0, c1) = match (posterior.counts(0), posterior.counts(1)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidRecord("posterior counts are not whole pulls".into())),
    };
    let pulls = c0.0 + c0.1 + c1.0 + c1.1;
    if pulls != t {
        return Err(Error::InvalidRecord(format!("posterior holds {pulls} pulls but t = {t}")));
    }
    if t >= table.horizon() {
        return Err(Error::InvalidRecord(format!("t = {t} is past the horizon {}", table.horizon())));
    }
    let (q0, q1) = table.action_values([c0.0, c0.1, c1.0, c1.1]);
    Ok(if q1 > q0 + TIE_TOLERANCE { 1 } else { 0 })
}
