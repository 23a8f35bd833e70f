//! Independent verification routes for the dynamics.
//!
//! `exact_closed_evolution` works in the Schrödinger picture on the
//! four-dimensional player space and shares nothing with the propagator path
//! except the operator matrices from [`crate::algebra`]. Its eigensolver is a
//! self-contained cyclic Jacobi iteration.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::algebra::{build_mode_operators, max_abs_entry, number_operators, ComplexMatrix4, StateVector4};
use crate::dynamics::{decision_series, DecisionSeries, PropagatorGrid, TimeGrid};
use crate::error::{Error, Result};
use crate::model::{EvolutionGenerator, InitialState, ModelParams, Scenario};

/// Player Hamiltonian without reservoirs:
/// `H = ω1 n̂1 + ω2 n̂2 + μex (b1†b2 + b2†b1) + μcoop (b1†b2† + b2 b1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedHamiltonian {
    pub h: ComplexMatrix4,
}

impl ClosedHamiltonian {
    pub fn new(params: &ModelParams) -> Self {
        let ops = build_mode_operators();
        let [n1, n2] = number_operators(&ops);
        let (b1, b2) = (ops.b1, ops.b2);
        let (b1d, b2d) = (b1.adjoint(), b2.adjoint());
        let re = |x: f64| Complex64::new(x, 0.0);
        let h = n1 * re(params.omega[0])
            + n2 * re(params.omega[1])
            + (b1d * b2 + b2d * b1) * re(params.mu_ex)
            + (b1d * b2d + b2 * b1) * re(params.mu_coop);
        Self { h }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs_entry(&(self.h - self.h.adjoint()))
    }

    /// Eigenpairs of `H`. In the Jordan-Wigner basis every entry of `H` is
    /// real, so a real symmetric solver suffices.
    pub fn eigen(&self) -> (Vector4<f64>, Matrix4<f64>) {
        debug_assert!(self.h.iter().all(|z| z.im == 0.0));
        jacobi_eigen(self.h.map(|z| z.re))
    }
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric 4×4 matrix.
/// Returns eigenvalues and orthonormal eigenvectors (as columns).
pub fn jacobi_eigen(mut a: Matrix4<f64>) -> (Vector4<f64>, Matrix4<f64>) {
    let mut v = Matrix4::<f64>::identity();
    for _sweep in 0..100 {
        let off: f64 = (0..4)
            .flat_map(|p| (0..4).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..4 {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// Schrödinger-picture trajectory of the closed player system.
#[derive(Debug, Clone)]
pub struct ClosedTrajectory {
    pub grid: TimeGrid,
    pub states: Vec<StateVector4>,
    /// `⟨Ψ(t), n̂j Ψ(t)⟩` for players 1 and 2.
    pub n: [Vec<f64>; 2],
}

/// `Ψ(t) = exp(−iHt) Ψ0` and the resulting strategy expectations.
/// Only valid without reservoir coupling.
pub fn exact_closed_evolution(
    params: &ModelParams,
    initial: &InitialState,
    grid: TimeGrid,
) -> Result<ClosedTrajectory> {
    if !params.is_closed() {
        return Err(Error::OpenSystem(params.bath_coupling[0], params.bath_coupling[1]));
    }
    params.validate()?;
    let hamiltonian = ClosedHamiltonian::new(params);
    let (energies, vectors) = hamiltonian.eigen();
    let vectors = vectors.map(|x| Complex64::new(x, 0.0));
    let coefficients = vectors.adjoint() * initial.as_vector();
    let [n1, n2] = number_operators(&build_mode_operators());

    let mut states = Vec::with_capacity(grid.len);
    let mut n = [Vec::with_capacity(grid.len), Vec::with_capacity(grid.len)];
    for k in 0..grid.len {
        let t = grid.time(k);
        let evolved = StateVector4::from_fn(|m, _| coefficients[m] * Complex64::from_polar(1.0, -energies[m] * t));
        let psi = vectors * evolved;
        n[0].push(psi.dotc(&(n1 * psi)).re);
        n[1].push(psi.dotc(&(n2 * psi)).re);
        states.push(psi);
    }
    Ok(ClosedTrajectory { grid, states, n })
}

/// Largest central-difference defect `‖(V(t+dt) − V(t−dt))/(2dt) − iU·V(t)‖`
/// over the interior grid points, in the max-entry norm.
pub fn propagator_residual(gen: &EvolutionGenerator, prop: &PropagatorGrid) -> f64 {
    assert!(prop.len() >= 3, "need at least three grid points");
    let iu = gen.u * Complex64::i();
    let inv_2dt = Complex64::new(0.5 / prop.grid.dt, 0.0);
    (1..prop.len() - 1)
        .map(|k| {
            let derivative = (prop.at(k + 1) - prop.at(k - 1)) * inv_2dt;
            max_abs_entry(&(derivative - iu * prop.at(k)))
        })
        .fold(0.0, f64::max)
}

/// Deviation from the classical law of total probability,
/// `Rj(t) = pj(1;t) − Σ_{k,m} |αkm|² pj(1;t | φkm)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtpResidual {
    pub grid: TimeGrid,
    pub residual: [Vec<f64>; 2],
    /// The full run the residual was computed for.
    pub series: DecisionSeries,
}

impl LtpResidual {
    pub fn max_abs(&self, player: usize) -> f64 {
        self.residual[player - 1].iter().map(|r| r.abs()).fold(0.0, f64::max)
    }
}

pub fn ltp_residual(s: &Scenario) -> Result<LtpResidual> {
    let full = decision_series(s)?;
    let amplitudes = s.initial.amplitudes();

    // each conditional run starts from a sharp strategy pair φkm
    let conditional: Vec<(f64, DecisionSeries)> = std::thread::scope(|scope| {
        let handles: Vec<_> = crate::algebra::BASIS_LABELS
            .iter()
            .enumerate()
            .filter(|(i, _)| amplitudes[*i].norm_sqr() > 0.0)
            .map(|(i, &(k, m))| {
                let weight = amplitudes[i].norm_sqr();
                let run = s.with_initial(InitialState::basis_state(k, m));
                scope.spawn(move || decision_series(&run).map(|series| (weight, series)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("conditional run panicked")).collect::<Result<Vec<_>>>()
    })?;

    let residual = [1, 2].map(|j| {
        (0..full.len())
            .map(|k| {
                let classical: f64 = conditional.iter().map(|(w, series)| w * series.n(j)[k]).sum();
                full.n(j)[k] - classical
            })
            .collect()
    });
    Ok(LtpResidual { grid: full.grid, residual, series: full })
}
