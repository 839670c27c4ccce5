use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gp::{expected_improvement, GpSurrogate};
use super::space::{HyperParams, SearchSpace};
use crate::error::{Error, Result};

pub const INITIAL_TRIALS: usize = 5;
pub const CANDIDATE_POOL: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: usize,
    pub params: HyperParams,
    /// Validation MAPE, or the reason the evaluation failed.
    pub score: std::result::Result<f64, String>,
}

impl Trial {
    pub fn value(&self) -> Option<f64> {
        self.score.as_ref().ok().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: Trial,
    pub trials: Vec<Trial>,
}

fn evaluate<F>(index: usize, params: HyperParams, objective: &F) -> Trial
where
    F: Fn(&HyperParams) -> Result<f64>,
{
    let score = match objective(&params) {
        Ok(s) if s.is_finite() && s >= 0.0 => Ok(s),
        Ok(s) => Err(format!("objective returned {s}")),
        Err(e) => Err(e.to_string()),
    };
    Trial {
        index,
        params,
        score,
    }
}

fn evaluate_all<F>(start: usize, points: Vec<HyperParams>, objective: &F) -> Vec<Trial>
where
    F: Fn(&HyperParams) -> Result<f64> + Sync,
{
    points
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| evaluate(start + i, p, objective))
        .collect()
}

/// Lowest score wins; ties go to the earlier trial.
fn finish(trials: Vec<Trial>) -> Result<SearchOutcome> {
    let best = trials
        .iter()
        .filter_map(|t| t.value().map(|v| (v, t)))
        .fold(None::<(f64, &Trial)>, |acc, (v, t)| match acc {
            Some((bv, _)) if bv <= v => acc,
            _ => Some((v, t)),
        })
        .map(|(_, t)| t.clone())
        .ok_or(Error::NoValidTrial)?;
    Ok(SearchOutcome { best, trials })
}

/// Evaluates every grid point once. Evaluations run in parallel; trials are
/// reported in grid order.
pub fn grid_search<F>(space: &SearchSpace, objective: F) -> Result<SearchOutcome>
where
    F: Fn(&HyperParams) -> Result<f64> + Sync,
{
    space.validate()?;
    finish(evaluate_all(0, space.grid(), &objective))
}

/// GP-EI search: `INITIAL_TRIALS` random points, then the EI maximiser over a
/// fixed seeded pool of `CANDIDATE_POOL` points, one evaluation at a time.
/// Pool points already evaluated are skipped; the search ends early if the
/// pool runs out.
pub fn bayesian_search<F>(
    space: &SearchSpace,
    budget: usize,
    seed: u64,
    objective: F,
) -> Result<SearchOutcome>
where
    F: Fn(&HyperParams) -> Result<f64> + Sync,
{
    space.validate()?;
    if budget < INITIAL_TRIALS {
        return Err(Error::InvalidConfig(format!(
            "bayesian search needs a budget of at least {INITIAL_TRIALS}, got {budget}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial: Vec<_> = (0..INITIAL_TRIALS)
        .map(|_| space.sample(&mut rng))
        .collect();
    let pool: Vec<_> = (0..CANDIDATE_POOL)
        .map(|_| space.sample(&mut rng))
        .collect();
    let embedded: Vec<_> = pool.iter().map(|p| space.embed(p).to_vec()).collect();
    let mut used = vec![false; pool.len()];

    let mut trials = evaluate_all(0, initial, &objective);
    while trials.len() < budget {
        for t in &trials {
            if let Some(i) = pool.iter().position(|p| *p == t.params) {
                used[i] = true;
            }
        }
        let observed: Vec<_> = trials.iter().filter(|t| t.value().is_some()).collect();
        let next = if observed.is_empty() {
            used.iter().position(|u| !u)
        } else {
            let x = observed
                .iter()
                .map(|t| space.embed(&t.params).to_vec())
                .collect();
            let y: Vec<f64> = observed.iter().filter_map(|t| t.value()).collect();
            let best = y.iter().copied().fold(f64::INFINITY, f64::min);
            let gp = GpSurrogate::fit(x, &y)?;
            let mut pick: Option<(usize, f64)> = None;
            for (i, q) in embedded.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let (m, v) = gp.posterior(q);
                let ei = expected_improvement(m, v, best);
                if pick.is_none_or(|(_, e)| ei > e) {
                    pick = Some((i, ei));
                }
            }
            pick.map(|(i, _)| i)
        };
        let Some(i) = next else { break };
        used[i] = true;
        let index = trials.len();
        trials.push(evaluate(index, pool[i], &objective));
    }
    finish(trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpo::space::LearningRateAxis;

    fn small() -> SearchSpace {
        SearchSpace {
            lookback: vec![3, 6],
            hidden_size: vec![4, 8],
            learning_rate: LearningRateAxis {
                min: 1e-3,
                max: 1e-2,
                grid: vec![1e-3],
            },
            epochs: vec![10],
        }
    }

    #[test]
    fn grid_counts_and_planted_best() {
        let out = grid_search(&small(), |p| {
            Ok((p.lookback as f64 - 6.0).abs() + (p.hidden_size as f64 - 4.0).abs())
        })
        .unwrap();
        assert_eq!(out.trials.len(), 4);
        assert_eq!(
            (out.best.params.lookback, out.best.params.hidden_size),
            (6, 4)
        );
        assert_eq!(out.best.index, 2);
        assert!(out.trials.iter().enumerate().all(|(i, t)| t.index == i));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let out =
            grid_search(&small(), |p| Ok(if p.hidden_size == 8 { 1.0 } else { 2.0 })).unwrap();
        assert_eq!(out.best.index, 1);
    }

    #[test]
    fn failures_are_recorded_and_all_failed_is_an_error() {
        let out = grid_search(&small(), |p| {
            if p.lookback == 3 {
                Err(Error::InsufficientData("nope".into()))
            } else {
                Ok(f64::NAN)
            }
        });
        assert_eq!(out.unwrap_err(), Error::NoValidTrial);
        let out = grid_search(&small(), |p| {
            if p.lookback == 3 {
                Err(Error::InsufficientData("nope".into()))
            } else {
                Ok(1.0)
            }
        })
        .unwrap();
        assert!(out.trials[0].score.is_err());
        assert_eq!(out.best.index, 2);
    }

    #[test]
    fn budget_five_is_random_only_and_deterministic() {
        let f = |p: &HyperParams| Ok(p.learning_rate * 100.0);
        let a = bayesian_search(&small(), 5, 9, f).unwrap();
        let b = bayesian_search(&small(), 5, 9, f).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials.len(), 5);
        assert!(bayesian_search(&small(), 4, 9, f).is_err());
    }

    #[test]
    fn search_stays_in_space() {
        let s = SearchSpace::default();
        let out = bayesian_search(&s, 15, 4, |p| Ok(p.learning_rate.log10().abs())).unwrap();
        assert_eq!(out.trials.len(), 15);
        assert!(out.trials.iter().all(|t| s.contains(&t.params)));
    }
}
