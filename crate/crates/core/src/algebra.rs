//! Two-mode fermionic Fock space.
//!
//! Basis vectors are ordered `(φ00, φ10, φ01, φ11)`, where `φkl` has player 1
//! in strategy `k` and player 2 in strategy `l`. The coordinate of `φkl` is
//! therefore `k + 2l`: player 1 is the fast index.
//!
//! Mode operators use a Jordan-Wigner string on the second mode,
//! `b1 = σ⁻ ⊗ 1` and `b2 = σz ⊗ σ⁻`, so that all anticommutation relations
//! hold exactly. `φ11` is defined as `b1† b2† φ00`, which with this choice
//! is `+φ1 ⊗ φ1`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

pub type ComplexMatrix4 = Matrix4<Complex64>;
pub type StateVector4 = Vector4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coordinate of `φkl` in the fixed basis ordering.
#[inline]
pub fn basis_index(k: usize, l: usize) -> usize {
    debug_assert!(k < 2 && l < 2);
    k + 2 * l
}

/// Occupation labels `(k, l)` for each coordinate, in basis order.
pub const BASIS_LABELS: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// `σ⁻`: maps `φ1 = (0,1)ᵀ` to `φ0 = (1,0)ᵀ` and annihilates `φ0`.
pub fn lowering() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ONE, ZERO, ZERO)
}

pub fn parity() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// Operator acting as `first` on player 1 and `second` on player 2, written in
/// the fixed basis ordering.
pub fn tensor(first: &Matrix2<Complex64>, second: &Matrix2<Complex64>) -> ComplexMatrix4 {
    ComplexMatrix4::from_fn(|row, col| {
        let (k, l) = (row % 2, row / 2);
        let (kp, lp) = (col % 2, col / 2);
        first[(k, kp)] * second[(l, lp)]
    })
}

/// Orthonormal basis `(φ00, φ10, φ01, φ11)`.
pub fn build_basis() -> [StateVector4; 4] {
    let mut basis = [StateVector4::zeros(); 4];
    for (i, v) in basis.iter_mut().enumerate() {
        v[i] = ONE;
    }
    basis
}

/// Annihilation operators for the two players.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperators {
    pub b1: ComplexMatrix4,
    pub b2: ComplexMatrix4,
}

impl ModeOperators {
    pub fn annihilator(&self, player: usize) -> &ComplexMatrix4 {
        match player {
            1 => &self.b1,
            2 => &self.b2,
            _ => panic!("player index must be 1 or 2, got {player}"),
        }
    }

    pub fn creator(&self, player: usize) -> ComplexMatrix4 {
        self.annihilator(player).adjoint()
    }

    pub fn as_list(&self) -> [ComplexMatrix4; 2] {
        [self.b1, self.b2]
    }
}

pub fn build_mode_operators() -> ModeOperators {
    let identity = Matrix2::identity();
    ModeOperators { b1: tensor(&lowering(), &identity), b2: tensor(&parity(), &lowering()) }
}

/// Strategy operators `n̂j = bj† bj`.
pub fn number_operators(modes: &ModeOperators) -> [ComplexMatrix4; 2] {
    [modes.b1.adjoint() * modes.b1, modes.b2.adjoint() * modes.b2]
}

/// Rank-one projector `|v⟩⟨v|`.
pub fn projector(v: &StateVector4) -> ComplexMatrix4 {
    v * v.adjoint()
}

/// Largest entry modulus; the matrix norm used for all residuals.
pub fn max_abs_entry(m: &ComplexMatrix4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn anticommutator(x: &ComplexMatrix4, y: &ComplexMatrix4) -> ComplexMatrix4 {
    x * y + y * x
}

/// Largest deviation from the canonical anticommutation relations
/// `{bk, bl†} = δkl` and `{bk, bl} = 0` over every pair in `ops`.
pub fn car_residual(ops: &[ComplexMatrix4]) -> f64 {
    let identity = ComplexMatrix4::identity();
    let mut worst = 0.0_f64;
    for (k, bk) in ops.iter().enumerate() {
        for (l, bl) in ops.iter().enumerate() {
            let expected = if k == l { identity } else { ComplexMatrix4::zeros() };
            let mixed = anticommutator(bk, &bl.adjoint()) - expected;
            let pure = anticommutator(bk, bl);
            worst = worst.max(max_abs_entry(&mixed)).max(max_abs_entry(&pure));
        }
    }
    worst
}
