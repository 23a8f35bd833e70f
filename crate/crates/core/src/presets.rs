//! Built-in parameter sets and the figure scenarios assembled from them.
//!
//! All figure presets simulate `t ∈ [0, 0.5]`. With the C1 damping rates
//! (`Γ ≈ 7.85`) the transients have decayed by a factor `e^{-2Γ·0.5} ≈ 4e-4`
//! at the end of that span; C2 damps more slowly, so its asymptote is only
//! partly visible on the same span.

use num_complex::Complex64;

use crate::model::{InitialState, ModelParams, ReservoirState, Scenario};

pub const FIGURE_T_MAX: f64 = 0.5;

/// `ω = (1, 2)`, `Ω = (0.1, 0.1)`, `λ = (0.5, 0.5)`; player couplings zero.
pub fn c1() -> ModelParams {
    ModelParams { omega: [1.0, 2.0], bath_slope: [0.1, 0.1], bath_coupling: [0.5, 0.5], mu_ex: 0.0, mu_coop: 0.0 }
}

/// `ω = (0.1, 0.2)`, `Ω = (1, 1)`, `λ = (1, 0.7)`; player couplings zero.
pub fn c2() -> ModelParams {
    ModelParams { omega: [0.1, 0.2], bath_slope: [1.0, 1.0], bath_coupling: [1.0, 0.7], mu_ex: 0.0, mu_coop: 0.0 }
}

/// All four amplitudes equal to 1/2.
pub fn c_alpha1() -> InitialState {
    InitialState::new([Complex64::new(0.5, 0.0); 4]).expect("normalized by construction")
}

/// `α01 = 1/2 = −α11`, `α00 = i/2 = −α10`.
pub fn c_alpha2() -> InitialState {
    InitialState::from_labels(
        Complex64::new(0.0, 0.5),
        Complex64::new(0.0, -0.5),
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.5, 0.0),
    )
    .expect("normalized by construction")
}

/// Look up a named parameter set (`"C1"`, `"C2"`).
pub fn params_by_name(name: &str) -> Option<ModelParams> {
    match name {
        "C1" => Some(c1()),
        "C2" => Some(c2()),
        _ => None,
    }
}

/// Look up a named initial state (`"Calpha1"`, `"Calpha2"`).
pub fn initial_by_name(name: &str) -> Option<InitialState> {
    match name {
        "Calpha1" => Some(c_alpha1()),
        "Calpha2" => Some(c_alpha2()),
        _ => None,
    }
}

/// Description of one figure panel pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePreset {
    pub name: &'static str,
    pub params_name: &'static str,
    pub initial_name: &'static str,
    pub occupation: [f64; 2],
    pub mu_ex: f64,
    pub mu_coop: f64,
    pub t_max: f64,
}

impl FigurePreset {
    pub fn params(&self) -> ModelParams {
        let base = params_by_name(self.params_name).expect("preset table uses known parameter sets");
        ModelParams { mu_ex: self.mu_ex, mu_coop: self.mu_coop, ..base }
    }

    pub fn scenario(&self) -> Scenario {
        let params = self.params();
        Scenario {
            params,
            reservoir: ReservoirState::new(self.occupation[0], self.occupation[1])
                .expect("preset occupations lie in [0, 1]"),
            initial: initial_by_name(self.initial_name).expect("preset table uses known initial states"),
            t_max: self.t_max,
            dt: params.default_dt(),
            label: self.name.to_string(),
        }
    }
}

const fn figure(
    name: &'static str,
    params_name: &'static str,
    initial_name: &'static str,
    occupation: [f64; 2],
    mu_ex: f64,
    mu_coop: f64,
) -> FigurePreset {
    FigurePreset { name, params_name, initial_name, occupation, mu_ex, mu_coop, t_max: FIGURE_T_MAX }
}

pub const FIGURES: [FigurePreset; 8] = [
    figure("fig1-left", "C1", "Calpha1", [0.0, 1.0], 500.0, 0.0),
    figure("fig1-right", "C1", "Calpha2", [0.0, 1.0], 500.0, 0.0),
    figure("fig2-left", "C1", "Calpha1", [1.0, 1.0], 500.0, 0.0),
    figure("fig2-right", "C1", "Calpha2", [1.0, 1.0], 500.0, 0.0),
    figure("fig3-left", "C2", "Calpha1", [0.0, 1.0], 100.0, 0.0),
    figure("fig3-right", "C2", "Calpha2", [0.0, 1.0], 100.0, 0.0),
    figure("fig6-left", "C1", "Calpha1", [0.0, 1.0], 10.0, 10.0),
    figure("fig6-right", "C1", "Calpha2", [0.0, 1.0], 10.0, 10.0),
];

pub fn figure_by_name(name: &str) -> Option<&'static FigurePreset> {
    FIGURES.iter().find(|f| f.name == name)
}
