//! From decision functions to decisions.
//!
//! `nj(t)` is read as player `j`'s subjective probability of choosing
//! strategy 1. A player decides once the fluctuations of `nj` settle below a
//! threshold, and the decision follows the odds at that instant.

use serde::Serialize;

use crate::dynamics::DecisionSeries;
use crate::error::{Error, Result};

/// Odds within this distance of 1 are treated as a tie.
pub const ODDS_TOL: f64 = 1e-6;
/// Below this `pj(0;t)` the odds are reported as infinite.
pub const CERTAINTY_FLOOR: f64 = 1e-12;
pub const DEFAULT_EPSILON: f64 = 0.01;
/// Default sliding-window length as a fraction of `t_max`.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.1;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Odds {
    Finite(f64),
    Infinite,
}

impl Odds {
    pub fn from_probability(p1: f64) -> Self {
        let p1 = p1.clamp(0.0, 1.0);
        let p0 = 1.0 - p1;
        if p0 < CERTAINTY_FLOOR {
            Odds::Infinite
        } else {
            Odds::Finite(p1 / p0)
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Odds::Finite(x) => x,
            Odds::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Zero,
    One,
    /// Tied odds: the player flips a fair coin, or restarts from a modified
    /// state. Which one is up to the caller.
    RandomCoin,
}

impl Decision {
    pub fn from_odds(odds: Odds) -> Self {
        let o = odds.value();
        if (o - 1.0).abs() <= ODDS_TOL {
            Decision::RandomCoin
        } else if o > 1.0 {
            Decision::One
        } else {
            Decision::Zero
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionOutcome {
    pub player: usize,
    /// `None` when the fluctuations never settle on the simulated span.
    pub tau: Option<f64>,
    pub odds_at_tau: Option<Odds>,
    pub decision: Option<Decision>,
    pub epsilon: f64,
    pub window: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlayerAsymptotics {
    pub mean: f64,
    pub fluctuation: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub tail_start: f64,
    pub tail_end: f64,
    pub epsilon: f64,
    pub players: [PlayerAsymptotics; 2],
}

/// Odds `Oj = pj(1;t) / pj(0;t)` at grid time `t`, with `nj` clamped to `[0, 1]`.
pub fn odds(series: &DecisionSeries, t: f64) -> Result<[Odds; 2]> {
    let k = series.grid.index_of(t).ok_or(Error::OffGrid { t, dt: series.grid.dt })?;
    Ok([1, 2].map(|j| Odds::from_probability(series.n(j)[k])))
}

/// `max − min` of every window of `width + 1` consecutive samples, computed
/// with monotone deques.
fn sliding_range(xs: &[f64], width: usize) -> Vec<f64> {
    use std::collections::VecDeque;
    if xs.len() <= width {
        return Vec::new();
    }
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut out = Vec::with_capacity(xs.len() - width);
    for (i, &x) in xs.iter().enumerate() {
        while maxq.back().is_some_and(|&b| xs[b] <= x) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&b| xs[b] >= x) {
            minq.pop_back();
        }
        minq.push_back(i);
        if i >= width {
            let start = i - width;
            while maxq.front().is_some_and(|&f| f < start) {
                maxq.pop_front();
            }
            while minq.front().is_some_and(|&f| f < start) {
                minq.pop_front();
            }
            out.push(xs[maxq[0]] - xs[minq[0]]);
        }
    }
    out
}

/// Decision instant `τj`: the earliest grid time from which every window
/// `[t, t + window]` up to the end of the run has `max − min` of `nj` below
/// `epsilon`. The decision is read from the odds at `τj`.
pub fn decision_time(series: &DecisionSeries, epsilon: f64, window: f64) -> Result<[DecisionOutcome; 2]> {
    let t_max = series.grid.t_max();
    if !(window >= 0.0 && window <= t_max + 1e-12 * t_max.max(1.0)) {
        return Err(Error::WindowTooLarge { window, t_max });
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter { name: "epsilon", reason: format!("{epsilon} must be > 0") });
    }
    let width = ((window / series.grid.dt).round() as usize).min(series.len() - 1);

    Ok([1, 2].map(|j| {
        let ranges = sliding_range(series.n(j), width);
        // first start index after which every window stays below epsilon
        let settled_from = ranges.iter().rposition(|&r| r >= epsilon).map_or(0, |last_bad| last_bad + 1);
        let (tau, odds_at_tau) = if settled_from < ranges.len() {
            let odds = Odds::from_probability(series.n(j)[settled_from]);
            (Some(series.grid.time(settled_from)), Some(odds))
        } else {
            (None, None)
        };
        DecisionOutcome { player: j, tau, odds_at_tau, decision: odds_at_tau.map(Decision::from_odds), epsilon, window }
    }))
}

fn tail_start_index(len: usize, tail_fraction: f64) -> usize {
    let tail_len = ((len as f64) * tail_fraction).ceil().max(1.0) as usize;
    len - tail_len.min(len)
}

/// Mean and `max − min` of `nj` over the trailing `tail_fraction` of the grid.
pub fn asymptotics(series: &DecisionSeries, tail_fraction: f64, epsilon: f64) -> Result<AsymptoticsReport> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_fraction",
            reason: format!("{tail_fraction} must lie in (0, 1)"),
        });
    }
    let start = tail_start_index(series.len(), tail_fraction);
    let players = [1, 2].map(|j| {
        let tail = &series.n(j)[start..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let fluctuation = max - min;
        PlayerAsymptotics { mean, fluctuation, converged: fluctuation < epsilon }
    });
    Ok(AsymptoticsReport { tail_start: series.grid.time(start), tail_end: series.grid.t_max(), epsilon, players })
}

/// Population standard deviation of `nj` over grid points in `[t_a, t_b]`.
pub fn noise_metric(series: &DecisionSeries, t_a: f64, t_b: f64) -> Result<[f64; 2]> {
    let t_max = series.grid.t_max();
    let slack = 1e-9 * series.grid.dt;
    let empty = Error::EmptyWindow { start: t_a, end: t_b, t_max };
    if !(t_a >= -slack && t_b <= t_max + slack && t_a <= t_b) {
        return Err(empty);
    }
    let first = ((t_a - slack) / series.grid.dt).ceil().max(0.0) as usize;
    let last = (((t_b + slack) / series.grid.dt).floor() as usize).min(series.len() - 1);
    if first > last {
        return Err(empty);
    }
    Ok([1, 2].map(|j| {
        let xs = &series.n(j)[first..=last];
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
    }))
}
