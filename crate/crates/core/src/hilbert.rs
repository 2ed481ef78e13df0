//! Dense state and operator algebra for the path (two arms) ⊗ spin-1/2 system.
//!
//! Spin is stored in the x-quantization basis {|↑x⟩, |↓x⟩}. In that basis the
//! Pauli operators are
//!
//! ```text
//! σx = diag(1, -1)    σy = [[0, i], [-i, 0]]    σz = [[0, 1], [1, 0]]
//! ```
//!
//! Joint amplitudes are ordered (I↑, I↓, II↑, II↓).

use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex amplitude (dimensionless).
pub type Amplitude = Complex64;

/// Tolerance applied when checking normalization of constructed states.
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance for exact algebraic identities (projector, unitarity checks).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Squared norm below which a vector is treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

pub(crate) const ZERO: Amplitude = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Amplitude = Complex64::new(1.0, 0.0);
pub(crate) const I: Amplitude = Complex64::new(0.0, 1.0);

/// Builds an amplitude from real and imaginary parts.
pub fn c(re: f64, im: f64) -> Amplitude {
    Complex64::new(re, im)
}

fn is_finite(z: Amplitude) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// One of the two interferometer arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    I,
    II,
}

impl Arm {
    pub fn index(self) -> usize {
        match self {
            Arm::I => 0,
            Arm::II => 1,
        }
    }

    pub fn other(self) -> Arm {
        match self {
            Arm::I => Arm::II,
            Arm::II => Arm::I,
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arm::I => f.write_str("I"),
            Arm::II => f.write_str("II"),
        }
    }
}

impl std::str::FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "i" | "1" => Ok(Arm::I),
            "II" | "ii" | "2" => Ok(Arm::II),
            other => Err(Error::Argument(format!("unknown arm {other:?}, expected I or II"))),
        }
    }
}

/// Normalized state of the path qubit: `a|I⟩ + b|II⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    a: Amplitude,
    b: Amplitude,
}

impl PathState {
    /// Normalizes `(a, b)`. Fails on a (numerically) zero or non-finite vector.
    pub fn new(a: Amplitude, b: Amplitude) -> Result<Self> {
        if !is_finite(a) || !is_finite(b) {
            return Err(Error::Construction("non-finite amplitude".into()));
        }
        let n2 = a.norm_sqr() + b.norm_sqr();
        if n2 <= ZERO_NORM {
            return Err(Error::Construction("zero vector".into()));
        }
        let n = n2.sqrt();
        Ok(Self { a: a / n, b: b / n })
    }

    /// `(|I⟩ + |II⟩)/√2`, the balanced output port.
    pub fn symmetric() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { a: c(h, 0.0), b: c(h, 0.0) }
    }

    /// The state localized in one arm.
    pub fn basis(arm: Arm) -> Self {
        match arm {
            Arm::I => Self { a: ONE, b: ZERO },
            Arm::II => Self { a: ZERO, b: ONE },
        }
    }

    pub fn a(&self) -> Amplitude {
        self.a
    }

    pub fn b(&self) -> Amplitude {
        self.b
    }

    pub fn amplitude(&self, arm: Arm) -> Amplitude {
        match arm {
            Arm::I => self.a,
            Arm::II => self.b,
        }
    }

    /// Exchanges the roles of the two arms.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PathState) -> Amplitude {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    /// Canonical representative of the ray: `a` real and non-negative, or
    /// `b` real and non-negative when `|a|` vanishes.
    pub fn canonical(&self) -> Self {
        let pivot = if self.a.norm() >= ALGEBRA_TOL { self.a } else { self.b };
        let phase = pivot.conj() / pivot.norm();
        let mut out = Self { a: self.a * phase, b: self.b * phase };
        // Pin the pivot's imaginary part to exactly zero.
        if self.a.norm() >= ALGEBRA_TOL {
            out.a = c(out.a.norm(), 0.0);
        } else {
            out.b = c(out.b.norm(), 0.0);
        }
        out
    }
}

/// State of the spin pointer in the x basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    up: Amplitude,
    down: Amplitude,
    normalized: bool,
}

impl SpinState {
    /// `|↑x⟩`.
    pub fn up_x() -> Self {
        Self { up: ONE, down: ZERO, normalized: true }
    }

    /// `|↓x⟩`.
    pub fn down_x() -> Self {
        Self { up: ZERO, down: ONE, normalized: true }
    }

    /// Normalizes `(up, down)`.
    pub fn normalized(up: Amplitude, down: Amplitude) -> Result<Self> {
        if !is_finite(up) || !is_finite(down) {
            return Err(Error::Construction("non-finite amplitude".into()));
        }
        let n2 = up.norm_sqr() + down.norm_sqr();
        if n2 <= ZERO_NORM {
            return Err(Error::Construction("zero vector".into()));
        }
        let n = n2.sqrt();
        Ok(Self { up: up / n, down: down / n, normalized: true })
    }

    /// Stores `(up, down)` as given, without normalizing.
    pub fn unnormalized(up: Amplitude, down: Amplitude) -> Self {
        Self { up, down, normalized: false }
    }

    pub fn up(&self) -> Amplitude {
        self.up
    }

    pub fn down(&self) -> Amplitude {
        self.down
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }
}

/// Pure state of path ⊗ spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    c: [Amplitude; 4],
}

impl JointState {
    /// Builds a state from amplitudes in the order (I↑, I↓, II↑, II↓).
    pub fn new(c: [Amplitude; 4]) -> Result<Self> {
        if !c.iter().all(|z| is_finite(*z)) {
            return Err(Error::Construction("non-finite amplitude".into()));
        }
        Ok(Self { c })
    }

    pub fn amplitudes(&self) -> &[Amplitude; 4] {
        &self.c
    }

    /// Amplitude of `|arm⟩|spin⟩`, with `spin_up` selecting ↑x or ↓x.
    pub fn get(&self, arm: Arm, spin_up: bool) -> Amplitude {
        self.c[index(arm, spin_up)]
    }

    /// Spin factor on one arm (unnormalized).
    pub fn arm_spin(&self, arm: Arm) -> (Amplitude, Amplitude) {
        (self.get(arm, true), self.get(arm, false))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn index(arm: Arm, spin_up: bool) -> usize {
    2 * arm.index() + usize::from(!spin_up)
}

/// `p ⊗ s`.
pub fn tensor(p: &PathState, s: &SpinState) -> JointState {
    JointState {
        c: [p.a * s.up, p.a * s.down, p.b * s.up, p.b * s.down],
    }
}

/// Dirac inner product `⟨x|y⟩`, conjugate-linear in `x`.
pub fn inner(x: &JointState, y: &JointState) -> Amplitude {
    x.c.iter().zip(y.c.iter()).map(|(u, v)| u.conj() * v).sum()
}

/// 2×2 complex matrix acting on either factor.
pub type Matrix2 = [[Amplitude; 2]; 2];

pub fn identity2() -> Matrix2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Matrix2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn pauli_y() -> Matrix2 {
    [[ZERO, I], [-I, ZERO]]
}

pub fn pauli_z() -> Matrix2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

/// Linear operator on path ⊗ spin, as a 4×4 matrix in the fixed basis order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator {
    m: [[Amplitude; 4]; 4],
}

impl Operator {
    pub fn from_matrix(m: [[Amplitude; 4]; 4]) -> Result<Self> {
        if !m.iter().flatten().all(|z| is_finite(*z)) {
            return Err(Error::Construction("non-finite operator entry".into()));
        }
        Ok(Self { m })
    }

    pub fn zero() -> Self {
        Self { m: [[ZERO; 4]; 4] }
    }

    pub fn identity() -> Self {
        Self::kron(&identity2(), &identity2())
    }

    /// `path ⊗ spin` Kronecker product.
    pub fn kron(path: &Matrix2, spin: &Matrix2) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (pr, prow) in path.iter().enumerate() {
            for (pc, &pv) in prow.iter().enumerate() {
                for (sr, srow) in spin.iter().enumerate() {
                    for (sc, &sv) in srow.iter().enumerate() {
                        m[2 * pr + sr][2 * pc + sc] = pv * sv;
                    }
                }
            }
        }
        Self { m }
    }

    /// Applies `spin_op` to the spin only in `arm`, identity elsewhere.
    pub fn arm_local(arm: Arm, spin_op: &Matrix2) -> Self {
        let mut out = Self::identity();
        let base = 2 * arm.index();
        for (r, row) in spin_op.iter().enumerate() {
            out.m[base + r][base..base + 2].copy_from_slice(row);
        }
        out
    }

    pub fn entries(&self) -> &[[Amplitude; 4]; 4] {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (col, v) in row.iter_mut().enumerate() {
                *v = self.m[col][r].conj();
            }
        }
        Self { m }
    }

    pub fn trace(&self) -> Amplitude {
        (0..4).map(|k| self.m[k][k]).sum()
    }

    pub fn scale(&self, z: Amplitude) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|v| *v *= z);
        out
    }

    /// `⟨bra|self|ket⟩`.
    pub fn matrix_element(&self, bra: &JointState, ket: &JointState) -> Amplitude {
        inner(bra, &apply_operator(self, ket))
    }

    /// Largest entrywise deviation between two operators.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.max_abs_diff(&(*self * *self)) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Operator::identity()) <= tol
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(self, rhs: Operator) -> Operator {
        let mut out = self;
        for (v, w) in out.m.iter_mut().flatten().zip(rhs.m.iter().flatten()) {
            *v += w;
        }
        out
    }
}

impl Mul for Operator {
    type Output = Operator;

    fn mul(self, rhs: Operator) -> Operator {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (col, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.m[r][k] * rhs.m[k][col]).sum();
            }
        }
        Operator { m }
    }
}

/// Matrix–vector product in the fixed basis order.
pub fn apply_operator(op: &Operator, s: &JointState) -> JointState {
    let mut c = [ZERO; 4];
    for (r, out) in c.iter_mut().enumerate() {
        *out = (0..4).map(|k| op.m[r][k] * s.c[k]).sum();
    }
    JointState { c }
}

/// `|arm⟩⟨arm| ⊗ 1`.
pub fn path_projector(arm: Arm) -> Operator {
    postselect_projector(&PathState::basis(arm))
}

/// `|pf⟩⟨pf| ⊗ 1`: projects the path factor only, leaving spin untouched.
pub fn postselect_projector(pf: &PathState) -> Operator {
    let f = [pf.a, pf.b];
    let mut path = [[ZERO; 2]; 2];
    for (r, row) in path.iter_mut().enumerate() {
        for (col, v) in row.iter_mut().enumerate() {
            *v = f[r] * f[col].conj();
        }
    }
    Operator::kron(&path, &identity2())
}
