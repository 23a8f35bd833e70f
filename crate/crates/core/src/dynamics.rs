//! Propagator `V(t) = exp(iUt)` and the decision functions
//! `nj(t) = μj(t) + δμj(t) + nBj(t)`.
//!
//! Row `j` of `V` (player `j`) is indexed against the operator vector
//! `(b1, b2, b1†, b2†)`, so `V[(j-1, 0)]` is `V_{j,1}` in one-based notation.

use num_complex::Complex64;

use crate::algebra::ComplexMatrix4;
use crate::error::{Error, Result};
use crate::linalg::{eigendecompose, expm, SpectralDecomposition};
use crate::model::{
    build_generator, validate_scenario, EvolutionGenerator, InitialState, ModelParams, ReservoirState, Scenario,
};

/// Eigenvector condition number above which the spectral route is abandoned.
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e8;

/// Uniform grid `t_k = k·dt`, `k = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, len: usize) -> Self {
        assert!(dt > 0.0 && dt.is_finite(), "time step must be positive, got {dt}");
        assert!(len >= 1, "grid needs at least one point");
        Self { dt, len }
    }

    /// Grid covering `[0, t_max]`; the last point is `round(t_max/dt)·dt`.
    pub fn spanning(t_max: f64, dt: f64) -> Self {
        Self::new(dt, (t_max / dt).round() as usize + 1)
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.time(k)).collect()
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.len - 1)
    }

    /// Index of grid time `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = (t / self.dt).round();
        if k < 0.0 || k as usize >= self.len {
            return None;
        }
        ((t - k * self.dt).abs() <= 1e-9 * self.dt.max(t.abs())).then_some(k as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropagatorMethod {
    /// One eigendecomposition of `U`, `V(t) = P·diag(e^{iλt})·P⁻¹`.
    Spectral { condition: f64 },
    /// Padé scaling and squaring at each time point.
    ScalingSquaring { condition: f64 },
}

#[derive(Debug, Clone)]
pub struct PropagatorGrid {
    pub grid: TimeGrid,
    pub matrices: Vec<ComplexMatrix4>,
    pub method: PropagatorMethod,
    pub spectral: Option<SpectralDecomposition>,
}

impl PropagatorGrid {
    pub fn at(&self, k: usize) -> &ComplexMatrix4 {
        &self.matrices[k]
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

pub fn propagator(gen: &EvolutionGenerator, grid: TimeGrid) -> Result<PropagatorGrid> {
    let iu = gen.u * Complex64::i();
    let (spectral, condition) = match eigendecompose(&iu) {
        Ok(d) => {
            let cond = d.condition;
            ((cond <= MAX_EIGENVECTOR_CONDITION).then_some(d), cond)
        }
        Err(Error::Propagator(_)) if iu.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => (None, f64::INFINITY),
        Err(e) => return Err(e),
    };

    let (matrices, method): (Vec<_>, _) = match &spectral {
        Some(d) => {
            let matrices = (0..grid.len)
                .map(|k| {
                    let t = grid.time(k);
                    d.apply(|lambda| (lambda * t).exp())
                })
                .collect();
            (matrices, PropagatorMethod::Spectral { condition })
        }
        None => {
            let matrices = (0..grid.len).map(|k| expm(&(iu * Complex64::new(grid.time(k), 0.0)))).collect();
            (matrices, PropagatorMethod::ScalingSquaring { condition })
        }
    };

    if let Some(k) =
        matrices.iter().position(|m: &ComplexMatrix4| m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())))
    {
        return Err(Error::Propagator(format!(
            "non-finite propagator at t = {} ({method:?}, eigenvector condition {condition:e})",
            grid.time(k)
        )));
    }
    Ok(PropagatorGrid { grid, matrices, method, spectral })
}

fn row(v: &ComplexMatrix4, player: usize) -> [Complex64; 4] {
    let r = player - 1;
    [v[(r, 0)], v[(r, 1)], v[(r, 2)], v[(r, 3)]]
}

/// Player-only contribution `μj` for both players.
pub fn mu_player(v: &ComplexMatrix4, initial: &InitialState) -> [f64; 2] {
    let p = |k, l| initial.amplitude(k, l).norm_sqr();
    let weights = [p(1, 0) + p(1, 1), p(0, 1) + p(1, 1), p(0, 0) + p(0, 1), p(0, 0) + p(1, 0)];
    [1, 2].map(|j| row(v, j).iter().zip(weights).map(|(z, w)| z.norm_sqr() * w).sum())
}

/// Interference contribution `δμj` for both players. Vanishes whenever only
/// one amplitude of `Ψ0` is nonzero.
pub fn delta_mu(v: &ComplexMatrix4, initial: &InitialState) -> [f64; 2] {
    let a = |k, l| initial.amplitude(k, l);
    // ⟨b1† b2⟩ and ⟨b1† b2†⟩ on Ψ0
    let hop = a(1, 0).conj() * a(0, 1);
    let pair = a(1, 1).conj() * a(0, 0);
    let swap = a(0, 1).conj() * a(1, 0);
    [1, 2].map(|j| {
        let [v1, v2, v3, v4] = row(v, j);
        let gain = v1.conj() * v2 * hop + v1.conj() * v4 * pair;
        let loss = v2.conj() * v3 * pair + v3.conj() * v4 * swap;
        2.0 * gain.re - 2.0 * loss.re
    })
}

/// Integrand of the reservoir term at lag `s`, for both players.
fn bath_integrand(v: &ComplexMatrix4, params: &ModelParams, reservoir: &ReservoirState) -> [f64; 2] {
    let (g1, g2) = (params.damping(1), params.damping(2));
    let [n1, n2] = reservoir.occupation;
    [1, 2].map(|j| {
        let [v1, v2, v3, v4] = row(v, j).map(|z| z.norm_sqr());
        2.0 * (g1 * (v1 * n1 + v3 * (1.0 - n1)) + g2 * (v2 * n2 + v4 * (1.0 - n2)))
    })
}

/// Reservoir contribution `nBj(t)` on every grid point. The integrand only
/// depends on the lag, so the integral is accumulated with the composite
/// trapezoid rule in one pass.
pub fn bath_contribution(params: &ModelParams, reservoir: &ReservoirState, prop: &PropagatorGrid) -> [Vec<f64>; 2] {
    let dt = prop.grid.dt;
    let mut out = [vec![0.0], vec![0.0]];
    let mut acc = [0.0; 2];
    let mut prev = bath_integrand(prop.at(0), params, reservoir);
    for v in prop.matrices.iter().skip(1) {
        let cur = bath_integrand(v, params, reservoir);
        for p in 0..2 {
            acc[p] += 0.5 * dt * (prev[p] + cur[p]);
            out[p].push(acc[p]);
        }
        prev = cur;
    }
    out
}

/// Decision function of one player, split into its three parts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlayerSeries {
    pub mu: Vec<f64>,
    pub dmu: Vec<f64>,
    pub bath: Vec<f64>,
    pub total: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSeries {
    pub label: String,
    pub grid: TimeGrid,
    pub players: [PlayerSeries; 2],
}

impl DecisionSeries {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn len(&self) -> usize {
        self.grid.len
    }

    pub fn is_empty(&self) -> bool {
        self.grid.len == 0
    }

    /// `nj(t)` for player 1 or 2.
    pub fn n(&self, player: usize) -> &[f64] {
        &self.players[player - 1].total
    }

    pub fn player(&self, player: usize) -> &PlayerSeries {
        &self.players[player - 1]
    }

    /// Largest distance of any `nj(t)` from `[0, 1]`; zero when in range.
    pub fn bound_excursion(&self) -> f64 {
        self.players.iter().flat_map(|p| p.total.iter()).map(|&x| (-x).max(x - 1.0).max(0.0)).fold(0.0, f64::max)
    }
}

/// Combine an already computed propagator with an initial state.
pub fn assemble_series(
    label: &str,
    prop: &PropagatorGrid,
    params: &ModelParams,
    reservoir: &ReservoirState,
    initial: &InitialState,
) -> DecisionSeries {
    let bath = bath_contribution(params, reservoir, prop);
    let mut players: [PlayerSeries; 2] = Default::default();
    for (p, player) in players.iter_mut().enumerate() {
        player.bath = bath[p].clone();
        player.mu.reserve(prop.len());
        player.dmu.reserve(prop.len());
    }
    for v in &prop.matrices {
        let mu = mu_player(v, initial);
        let dmu = delta_mu(v, initial);
        for p in 0..2 {
            players[p].mu.push(mu[p]);
            players[p].dmu.push(dmu[p]);
        }
    }
    for player in &mut players {
        player.total = (0..prop.len()).map(|k| player.mu[k] + player.dmu[k] + player.bath[k]).collect();
    }
    DecisionSeries { label: label.to_string(), grid: prop.grid, players }
}

pub fn decision_series(s: &Scenario) -> Result<DecisionSeries> {
    let s = validate_scenario(s.clone())?;
    let gen = build_generator(&s.params)?;
    let prop = propagator(&gen, s.time_grid())?;
    Ok(assemble_series(&s.label, &prop, &s.params, &s.reservoir, &s.initial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::max_abs_entry;
    use crate::presets;
    use std::f64::consts::PI;

    fn decoupled(lambda1: f64, n1: f64, initial: InitialState, t_max: f64) -> Scenario {
        let params = ModelParams {
            omega: [1.0, 2.0],
            bath_slope: [1.0, 1.0],
            bath_coupling: [lambda1, 0.0],
            mu_ex: 0.0,
            mu_coop: 0.0,
        };
        Scenario {
            params,
            reservoir: ReservoirState::new(n1, 0.0).unwrap(),
            initial,
            t_max,
            dt: 1e-3,
            label: "decoupled".into(),
        }
    }

    #[test]
    fn grid_indexing() {
        let g = TimeGrid::spanning(0.5, 1e-4);
        assert_eq!(g.len, 5001);
        assert!((g.t_max() - 0.5).abs() < 1e-15);
        assert_eq!(g.index_of(0.25), Some(2500));
        assert_eq!(g.index_of(0.25 + 3e-5), None);
        assert_eq!(g.index_of(0.6), None);
        assert_eq!(g.index_of(-1e-4), None);
    }

    #[test]
    fn propagator_starts_at_identity() {
        let gen = build_generator(&ModelParams { mu_ex: 500.0, mu_coop: 3.0, ..presets::c1() }).unwrap();
        let prop = propagator(&gen, TimeGrid::new(1e-4, 3)).unwrap();
        assert!(max_abs_entry(&(prop.at(0) - ComplexMatrix4::identity())) < 1e-12);
        assert!(matches!(prop.method, PropagatorMethod::Spectral { .. }));
    }

    #[test]
    fn free_propagator_is_diagonal_phases() {
        let params = ModelParams { bath_coupling: [0.0, 0.0], ..presets::c1() };
        let gen = build_generator(&params).unwrap();
        let prop = propagator(&gen, TimeGrid::new(0.01, 101)).unwrap();
        for k in 0..prop.len() {
            let t = prop.grid.time(k);
            let phases = [-1.0, -2.0, 1.0, 2.0].map(|w: f64| Complex64::from_polar(1.0, w * t));
            let expected = ComplexMatrix4::from_diagonal(&nalgebra::Vector4::from(phases));
            assert!(max_abs_entry(&(prop.at(k) - expected)) < 1e-12);
        }
    }

    #[test]
    fn decoupled_damping_of_first_mode() {
        let params = ModelParams { mu_ex: 0.0, mu_coop: 0.0, ..presets::c2() };
        let gen = build_generator(&params).unwrap();
        let prop = propagator(&gen, TimeGrid::new(0.01, 201)).unwrap();
        let gamma = PI * 1.0 / 1.0;
        for k in 0..prop.len() {
            let t = prop.grid.time(k);
            assert!((prop.at(k)[(0, 0)].norm() - (-gamma * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_and_delta_mu_at_identity() {
        let id = ComplexMatrix4::identity();
        assert_eq!(mu_player(&id, &InitialState::basis_state(1, 0)), [1.0, 0.0]);
        let mu = mu_player(&id, &presets::c_alpha1());
        assert!((mu[0] - 0.5).abs() < 1e-15 && (mu[1] - 0.5).abs() < 1e-15);
        for initial in [presets::c_alpha1(), presets::c_alpha2()] {
            assert_eq!(delta_mu(&id, &initial), [0.0, 0.0]);
        }
    }

    #[test]
    fn delta_mu_vanishes_for_basis_states() {
        let gen = build_generator(&ModelParams { mu_ex: 5.0, mu_coop: 2.0, ..presets::c1() }).unwrap();
        let prop = propagator(&gen, TimeGrid::new(1e-3, 200)).unwrap();
        for (k, l) in crate::algebra::BASIS_LABELS {
            let initial = InitialState::basis_state(k, l);
            for v in &prop.matrices {
                assert_eq!(delta_mu(v, &initial), [0.0, 0.0]);
            }
        }
    }

    #[test]
    fn bath_term_vanishes_without_coupling() {
        let params = ModelParams { bath_coupling: [0.0, 0.0], mu_ex: 4.0, mu_coop: 1.0, ..presets::c1() };
        let gen = build_generator(&params).unwrap();
        let prop = propagator(&gen, TimeGrid::new(1e-3, 500)).unwrap();
        let bath = bath_contribution(&params, &ReservoirState::new(0.3, 0.8).unwrap(), &prop);
        assert!(bath.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn decoupled_closed_forms() {
        // n1(t) = e^{-2Γt} + N1 (1 - e^{-2Γt}) with Γ = π λ² / Ω
        let lambda = 0.5;
        let gamma = PI * lambda * lambda;
        for n1 in [0.0, 0.5, 1.0] {
            let s = decoupled(lambda, n1, InitialState::basis_state(1, 0), 4.0);
            let series = decision_series(&s).unwrap();
            for (k, t) in series.times().into_iter().enumerate() {
                let decay = (-2.0 * gamma * t).exp();
                assert!((series.player(1).mu[k] - decay).abs() < 1e-12);
                assert!((series.player(1).bath[k] - n1 * (1.0 - decay)).abs() < 1e-6);
                assert!((series.n(1)[k] - (decay + n1 * (1.0 - decay))).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn free_evolution_freezes_decision_functions() {
        let params = ModelParams { bath_coupling: [0.0, 0.0], ..presets::c2() };
        let s = Scenario {
            params,
            reservoir: ReservoirState::new(0.2, 0.9).unwrap(),
            initial: presets::c_alpha2(),
            t_max: 3.0,
            dt: 1e-3,
            label: "free".into(),
        };
        let series = decision_series(&s).unwrap();
        for j in [1, 2] {
            assert!(series.n(j).iter().all(|&x| (x - 0.5).abs() < 1e-12));
        }
    }

    #[test]
    fn initial_values_follow_born_rule() {
        for fig in &presets::FIGURES {
            let s = fig.scenario();
            let series = decision_series(&s).unwrap();
            let born = s.initial.born_probabilities();
            for j in [1, 2] {
                let p = series.player(j);
                assert!((p.mu[0] - born[j - 1][1]).abs() < 1e-10);
                assert!(p.dmu[0].abs() < 1e-10);
                assert_eq!(p.bath[0], 0.0);
                assert!((series.n(j)[0] - born[j - 1][1]).abs() < 1e-10);
            }
        }
    }
}
