//! Model inputs and the reduced evolution generator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{basis_index, ComplexMatrix4, StateVector4};
use crate::dynamics::TimeGrid;
use crate::error::{Error, Result};

/// Tolerance on `Σ|α|² = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Upper bound on `dt · f_max`.
pub const RESOLUTION_LIMIT: f64 = 0.1;
/// Largest step the default grid rule will choose.
pub const DEFAULT_MAX_DT: f64 = 1e-4;

/// Hamiltonian coefficients. Index 0 is player 1, index 1 is player 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Player inertias `ωj`.
    pub omega: [f64; 2],
    /// Reservoir dispersion slopes `Ωj`, with `Ωj(k) = Ωj·k`.
    pub bath_slope: [f64; 2],
    /// Player-reservoir couplings `λj`.
    pub bath_coupling: [f64; 2],
    pub mu_ex: f64,
    pub mu_coop: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("omega1", self.omega[0]),
            ("omega2", self.omega[1]),
            ("Omega1", self.bath_slope[0]),
            ("Omega2", self.bath_slope[1]),
            ("lambda1", self.bath_coupling[0]),
            ("lambda2", self.bath_coupling[1]),
            ("mu_ex", self.mu_ex),
            ("mu_coop", self.mu_coop),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("{value} is not finite") });
            }
        }
        for (name, slope) in [("Omega1", self.bath_slope[0]), ("Omega2", self.bath_slope[1])] {
            if slope <= 0.0 {
                return Err(Error::InvalidParameter { name, reason: format!("{slope} must be > 0") });
            }
        }
        Ok(())
    }

    /// Reservoir-induced damping rate `Γj = π λj² / Ωj` for player `j` (1 or 2).
    pub fn damping(&self, player: usize) -> f64 {
        let i = player - 1;
        PI * self.bath_coupling[i].powi(2) / self.bath_slope[i]
    }

    /// Complex effective frequency `νj = iωj + Γj`.
    pub fn nu(&self, player: usize) -> Complex64 {
        Complex64::new(self.damping(player), self.omega[player - 1])
    }

    /// Fastest rate in the model, used by the grid-resolution rule.
    pub fn fastest_rate(&self) -> f64 {
        [
            self.omega[0].abs(),
            self.omega[1].abs(),
            self.mu_ex.abs(),
            self.mu_coop.abs(),
            self.damping(1),
            self.damping(2),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// `dt = min(1e-4, 0.1 / f_max)`.
    pub fn default_dt(&self) -> f64 {
        let f_max = self.fastest_rate();
        if f_max > 0.0 {
            DEFAULT_MAX_DT.min(RESOLUTION_LIMIT / f_max)
        } else {
            DEFAULT_MAX_DT
        }
    }

    pub fn is_closed(&self) -> bool {
        self.bath_coupling == [0.0, 0.0]
    }
}

/// Occupation constants `Nj` of the two reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirState {
    pub occupation: [f64; 2],
}

impl ReservoirState {
    pub fn new(n1: f64, n2: f64) -> Result<Self> {
        let state = Self { occupation: [n1, n2] };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("N1", self.occupation[0]), ("N2", self.occupation[1])] {
            if !(0.0..=1.0).contains(&n) {
                return Err(Error::InvalidParameter { name, reason: format!("{n} is outside [0, 1]") });
            }
        }
        Ok(())
    }
}

/// Normalized amplitudes of `Ψ0 = Σ αkl φkl`, stored in basis order
/// `(α00, α10, α01, α11)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    amplitudes: [Complex64; 4],
}

impl InitialState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidParameter { name: "alpha", reason: "non-finite amplitude".into() });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_labels(a00: Complex64, a10: Complex64, a01: Complex64, a11: Complex64) -> Result<Self> {
        Self::new([a00, a10, a01, a11])
    }

    /// `Ψ0 = φkl`.
    pub fn basis_state(k: usize, l: usize) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 4];
        amplitudes[basis_index(k, l)] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// `αkl`.
    #[inline]
    pub fn amplitude(&self, k: usize, l: usize) -> Complex64 {
        self.amplitudes[basis_index(k, l)]
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.amplitudes
    }

    pub fn as_vector(&self) -> StateVector4 {
        StateVector4::from(self.amplitudes)
    }

    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self { amplitudes: self.amplitudes.map(|a| a * phase) }
    }

    /// Born-rule probabilities indexed `[player - 1][strategy]`:
    /// `p1(j) = |αj0|² + |αj1|²`, `p2(j) = |α0j|² + |α1j|²`.
    pub fn born_probabilities(&self) -> [[f64; 2]; 2] {
        let p = |k, l| self.amplitude(k, l).norm_sqr();
        [[p(0, 0) + p(0, 1), p(1, 0) + p(1, 1)], [p(0, 0) + p(1, 0), p(0, 1) + p(1, 1)]]
    }

    /// Non-factorizability test on the 2×2 coefficient matrix: the state is
    /// a product state exactly when `α00 α11 − α01 α10 = 0`.
    pub fn is_entangled(&self, tol: f64) -> bool {
        let det = self.amplitude(0, 0) * self.amplitude(1, 1) - self.amplitude(0, 1) * self.amplitude(1, 0);
        det.norm() > tol
    }

    /// Number of amplitudes with modulus above `tol`.
    pub fn support_size(&self, tol: f64) -> usize {
        self.amplitudes.iter().filter(|a| a.norm() > tol).count()
    }
}

/// Reduced generator `U` of the linear system `ḃ = iUb + noise` for
/// `b = (b1, b2, b1†, b2†)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionGenerator {
    pub u: ComplexMatrix4,
    pub nu: [Complex64; 2],
}

pub fn build_generator(params: &ModelParams) -> Result<EvolutionGenerator> {
    params.validate()?;
    let i = Complex64::i();
    let re = |x: f64| Complex64::new(x, 0.0);
    let (nu1, nu2) = (params.nu(1), params.nu(2));
    let (ex, coop) = (params.mu_ex, params.mu_coop);
    #[rustfmt::skip]
    let u = ComplexMatrix4::new(
        i * nu1,   re(-ex),   re(0.0),         re(-coop),
        re(-ex),   i * nu2,   re(coop),        re(0.0),
        re(0.0),   re(coop),  i * nu1.conj(),  re(ex),
        re(-coop), re(0.0),   re(ex),          i * nu2.conj(),
    );
    Ok(EvolutionGenerator { u, nu: [nu1, nu2] })
}

/// A complete simulation input.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ModelParams,
    pub reservoir: ReservoirState,
    pub initial: InitialState,
    pub t_max: f64,
    pub dt: f64,
    pub label: String,
}

impl Scenario {
    pub fn validate(self) -> Result<Self> {
        validate_scenario(self)
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid::spanning(self.t_max, self.dt)
    }

    pub fn with_initial(&self, initial: InitialState) -> Self {
        Self { initial, ..self.clone() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.into_scenario()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&ScenarioFile::from(self)).expect("scenario fields are always serializable")
    }
}

pub fn validate_scenario(s: Scenario) -> Result<Scenario> {
    s.params.validate()?;
    s.reservoir.validate()?;
    // re-run the constructor check so deserialized or hand-built states are covered
    InitialState::new(s.initial.amplitudes())?;
    if !(s.t_max.is_finite() && s.t_max > 0.0) {
        return Err(Error::InvalidParameter { name: "t_max", reason: format!("{} must be > 0", s.t_max) });
    }
    if !(s.dt.is_finite() && s.dt > 0.0) {
        return Err(Error::InvalidParameter { name: "dt", reason: format!("{} must be > 0", s.dt) });
    }
    if s.dt >= s.t_max {
        return Err(Error::InvalidParameter { name: "dt", reason: format!("{} must be < t_max = {}", s.dt, s.t_max) });
    }
    let f_max = s.params.fastest_rate();
    if s.dt * f_max > RESOLUTION_LIMIT * (1.0 + 1e-12) {
        return Err(Error::GridTooCoarse { dt: s.dt, f_max, required: RESOLUTION_LIMIT / f_max });
    }
    Ok(s)
}

/// On-disk scenario document (TOML). Amplitudes are `[re, im]` pairs in basis
/// order `(α00, α10, α01, α11)`. `dt` may be omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub label: String,
    pub omega1: f64,
    pub omega2: f64,
    #[serde(rename = "Omega1")]
    pub big_omega1: f64,
    #[serde(rename = "Omega2")]
    pub big_omega2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu_ex: f64,
    pub mu_coop: f64,
    #[serde(rename = "N1")]
    pub n1: f64,
    #[serde(rename = "N2")]
    pub n2: f64,
    pub alpha: [[f64; 2]; 4],
    pub t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let params = ModelParams {
            omega: [self.omega1, self.omega2],
            bath_slope: [self.big_omega1, self.big_omega2],
            bath_coupling: [self.lambda1, self.lambda2],
            mu_ex: self.mu_ex,
            mu_coop: self.mu_coop,
        };
        params.validate()?;
        let amplitudes = self.alpha.map(|[re, im]| Complex64::new(re, im));
        let scenario = Scenario {
            params,
            reservoir: ReservoirState::new(self.n1, self.n2)?,
            initial: InitialState::new(amplitudes)?,
            t_max: self.t_max,
            dt: self.dt.unwrap_or_else(|| params.default_dt()),
            label: self.label,
        };
        validate_scenario(scenario)
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let p = &s.params;
        Self {
            label: s.label.clone(),
            omega1: p.omega[0],
            omega2: p.omega[1],
            big_omega1: p.bath_slope[0],
            big_omega2: p.bath_slope[1],
            lambda1: p.bath_coupling[0],
            lambda2: p.bath_coupling[1],
            mu_ex: p.mu_ex,
            mu_coop: p.mu_coop,
            n1: s.reservoir.occupation[0],
            n2: s.reservoir.occupation[1],
            alpha: s.initial.amplitudes().map(|a| [a.re, a.im]),
            t_max: s.t_max,
            dt: Some(s.dt),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn generator_for_c1_and_c2() {
        let g1 = build_generator(&presets::c1()).unwrap();
        assert!((g1.nu[0] - c(2.5 * PI, 1.0)).norm() < 1e-12);
        assert!((g1.nu[1] - c(2.5 * PI, 2.0)).norm() < 1e-12);

        let g2 = build_generator(&presets::c2()).unwrap();
        assert!((g2.nu[0] - c(PI, 0.1)).norm() < 1e-12);
        assert!((g2.nu[1] - c(0.49 * PI, 0.2)).norm() < 1e-12);
    }

    #[test]
    fn free_generator_is_diagonal_frequencies() {
        let params = ModelParams { bath_coupling: [0.0, 0.0], mu_ex: 0.0, mu_coop: 0.0, ..presets::c1() };
        let g = build_generator(&params).unwrap();
        let expected = ComplexMatrix4::from_diagonal(&nalgebra::Vector4::new(
            c(-1.0, 0.0),
            c(-2.0, 0.0),
            c(1.0, 0.0),
            c(2.0, 0.0),
        ));
        assert!((g.u - expected).norm() < 1e-15);
    }

    #[test]
    fn generator_block_pattern() {
        let params = ModelParams { mu_ex: 3.0, mu_coop: 7.0, ..presets::c1() };
        let u = build_generator(&params).unwrap().u;
        for (r, col) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            assert_eq!(u[(r, col)], c(0.0, 0.0));
        }
        assert_eq!(u[(0, 3)], c(-7.0, 0.0));
        assert_eq!(u[(1, 2)], c(7.0, 0.0));
        assert_eq!(u[(2, 1)], c(7.0, 0.0));
        assert_eq!(u[(3, 0)], c(-7.0, 0.0));
        assert_eq!(u[(0, 1)], c(-3.0, 0.0));
        assert_eq!(u[(1, 0)], c(-3.0, 0.0));
        assert_eq!(u[(2, 3)], c(3.0, 0.0));
        assert_eq!(u[(3, 2)], c(3.0, 0.0));
        let nu1 = params.nu(1);
        assert_eq!(u[(0, 0)], Complex64::i() * nu1);
        assert_eq!(u[(2, 2)], Complex64::i() * nu1.conj());
    }

    #[test]
    fn generator_rejects_bad_slopes() {
        let mut params = presets::c1();
        params.bath_slope[1] = 0.0;
        assert!(matches!(build_generator(&params), Err(Error::InvalidParameter { name: "Omega2", .. })));
        params.bath_slope[1] = 0.1;
        params.mu_ex = f64::NAN;
        assert!(matches!(build_generator(&params), Err(Error::InvalidParameter { name: "mu_ex", .. })));
    }

    #[test]
    fn born_probabilities_for_presets() {
        let p = presets::c_alpha1().born_probabilities();
        assert!((p[0][1] - 0.5).abs() < 1e-15);
        assert!((p[1][1] - 0.5).abs() < 1e-15);

        let p = presets::c_alpha2().born_probabilities();
        assert!((p[0][1] - 0.5).abs() < 1e-15);
        assert!((p[1][1] - 0.5).abs() < 1e-15);

        let p = InitialState::basis_state(1, 0).born_probabilities();
        assert_eq!(p, [[0.0, 1.0], [1.0, 0.0]]);
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let zero = c(0.0, 0.0);
        assert!(matches!(InitialState::new([zero; 4]), Err(Error::NotNormalized { .. })));
        assert!(InitialState::new([c(1.0, 0.0), c(1e-4, 0.0), zero, zero]).is_err());
    }

    #[test]
    fn entanglement_criterion() {
        assert!(!InitialState::basis_state(1, 0).is_entangled(1e-12));
        assert!(!presets::c_alpha1().is_entangled(1e-12));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = InitialState::from_labels(c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)).unwrap();
        assert!(bell.is_entangled(1e-12));
        // α00 α11 − α01 α10 = (i/2)(−1/2) − (1/2)(−i/2) = 0
        assert!(!presets::c_alpha2().is_entangled(1e-12));
    }

    fn fig1_like(mu_ex: f64, dt: f64) -> Scenario {
        Scenario {
            params: ModelParams { mu_ex, ..presets::c1() },
            reservoir: ReservoirState::new(0.0, 1.0).unwrap(),
            initial: presets::c_alpha1(),
            t_max: 0.5,
            dt,
            label: "test".into(),
        }
    }

    #[test]
    fn resolution_rule() {
        assert!(validate_scenario(fig1_like(500.0, 1e-4)).is_ok());
        match validate_scenario(fig1_like(500.0, 1e-2)) {
            Err(Error::GridTooCoarse { required, .. }) => assert!((required - 2e-4).abs() < 1e-15),
            other => panic!("expected GridTooCoarse, got {other:?}"),
        }
        // default rule lands exactly on the limit
        let p = ModelParams { mu_ex: 500.0, ..presets::c1() };
        assert!((p.default_dt() - 1e-4).abs() < 1e-18);
        let p = ModelParams { mu_ex: 5000.0, ..presets::c1() };
        assert!(validate_scenario(Scenario { params: p, dt: p.default_dt(), ..fig1_like(0.0, 1e-4) }).is_ok());
    }

    #[test]
    fn scenario_domain_errors() {
        let mut s = fig1_like(500.0, 1e-4);
        s.reservoir.occupation[0] = 1.5;
        assert!(matches!(validate_scenario(s), Err(Error::InvalidParameter { name: "N1", .. })));
        let s = Scenario { dt: 0.6, ..fig1_like(0.0, 1e-4) };
        assert!(matches!(validate_scenario(s), Err(Error::InvalidParameter { name: "dt", .. })));
    }

    #[test]
    fn toml_round_trip_and_errors() {
        let s = Scenario { initial: presets::c_alpha2(), ..fig1_like(500.0, 1e-4) };
        let text = s.to_toml_string();
        assert!(text.contains("Omega1") && text.contains("N2") && text.contains("mu_coop"));
        assert_eq!(Scenario::from_toml_str(&text).unwrap(), s);

        let zeros = text.replace("[0.0, 0.5]", "[0.0, 0.0]").replace("[0.5, 0.0]", "[0.0, 0.0]");
        let zeros = zeros.replace("[-0.5, 0.0]", "[0.0, 0.0]").replace("[0.0, -0.5]", "[0.0, 0.0]");
        assert!(matches!(Scenario::from_toml_str(&zeros), Err(Error::NotNormalized { .. })));
        assert!(matches!(Scenario::from_toml_str("label = 3"), Err(Error::Config(_))));
    }

    #[test]
    fn missing_dt_uses_default_rule() {
        let mut file = ScenarioFile::from(&fig1_like(500.0, 1e-4));
        file.dt = None;
        let text = toml::to_string(&file).unwrap();
        assert!(!text.contains("dt"));
        let s = Scenario::from_toml_str(&text).unwrap();
        assert!((s.dt - 1e-4).abs() < 1e-18);
    }
}
