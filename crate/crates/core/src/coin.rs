//! Site coins and their P/Q/R/S block structure.
//!
//! A coin is the 2×2 unitary `[[a, b], [c, d]]` acting on the chirality
//! basis `(|L⟩, |R⟩)`. The walk API only builds coins from an environment
//! phase ω via [`Coin::from_phase`]; [`Coin::new`] accepts any unitary and
//! exists so the product-table algebra can be exercised on general coins.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when checking the unitarity relations of a coin.
pub const UNITARITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Trace inner product `⟨A|B⟩ = tr(A* B)`.
    pub fn inner(&self, other: &Mat2) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                acc += self.0[i][j].conj() * other.0[i][j];
            }
        }
        acc
    }

    pub fn scale(&self, k: Complex64) -> Mat2 {
        let m = &self.0;
        Mat2([[k * m[0][0], k * m[0][1]], [k * m[1][0], k * m[1][1]]])
    }

    pub fn apply(&self, v: ChiralityVector) -> ChiralityVector {
        let m = &self.0;
        ChiralityVector {
            left: m[0][0] * v.left + m[0][1] * v.right,
            right: m[1][0] * v.left + m[1][1] * v.right,
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, rhs: Mat2) {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

/// Chirality amplitudes in the `(|L⟩, |R⟩)` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiralityVector {
    pub left: Complex64,
    pub right: Complex64,
}

impl ChiralityVector {
    pub const ZERO: ChiralityVector = ChiralityVector {
        left: ZERO,
        right: ZERO,
    };

    pub fn new(left: Complex64, right: Complex64) -> Self {
        ChiralityVector { left, right }
    }

    /// `(1/√2, i/√2)`, the initial qubit that makes the Hadamard walk symmetric.
    pub fn symmetric() -> Self {
        ChiralityVector {
            left: Complex64::new(FRAC_1_SQRT_2, 0.0),
            right: Complex64::new(0.0, FRAC_1_SQRT_2),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.left.norm_sqr() + self.right.norm_sqr()
    }

    /// Checks `|left|² + |right|² = 1` within `UNITARITY_TOL`.
    pub fn ensure_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > UNITARITY_TOL {
            return Err(Error::invalid(format!(
                "qubit must be normalized, got |left|²+|right|² = {n}"
            )));
        }
        Ok(())
    }
}

impl Add for ChiralityVector {
    type Output = ChiralityVector;

    fn add(self, rhs: ChiralityVector) -> ChiralityVector {
        ChiralityVector {
            left: self.left + rhs.left,
            right: self.right + rhs.right,
        }
    }
}

/// The four single-row blocks of a coin. `P`/`Q` are the left/right move
/// operators; `R`/`S` are the row-swapped companions that close the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    P,
    Q,
    R,
    S,
}

impl Basis {
    pub const ALL: [Basis; 4] = [Basis::P, Basis::Q, Basis::R, Basis::S];

    pub fn index(self) -> usize {
        match self {
            Basis::P => 0,
            Basis::Q => 1,
            Basis::R => 2,
            Basis::S => 3,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::P => "P",
            Basis::Q => "Q",
            Basis::R => "R",
            Basis::S => "S",
        };
        f.write_str(s)
    }
}

/// A 2×2 unitary coin `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coin {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Coin {
    /// Builds a coin from arbitrary entries, rejecting anything that fails
    /// the unitarity relations.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let coin = Coin { a, b, c, d };
        coin.check_unitary()?;
        Ok(coin)
    }

    /// `(1/√2) [[e^{iω}, 1], [1, -e^{-iω}]]`. `ω = 0` gives the Hadamard gate.
    pub fn from_phase(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::invalid(format!("phase must be finite, got {omega}")));
        }
        Ok(Self::from_phase_unchecked(omega))
    }

    pub(crate) fn from_phase_unchecked(omega: f64) -> Self {
        let e = Complex64::from_polar(FRAC_1_SQRT_2, omega);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Coin {
            a: e,
            b: h,
            c: h,
            d: -e.conj(),
        }
    }

    pub fn hadamard() -> Self {
        Self::from_phase_unchecked(0.0)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.a, self.b, self.c, self.d)
    }

    /// Verifies column normalization, orthogonality, `|Δ| = 1`,
    /// `c = -Δ·conj(b)` and `d = Δ·conj(a)`.
    pub fn check_unitary(&self) -> Result<()> {
        let Coin { a, b, c, d } = *self;
        let det = self.det();
        let checks = [
            ("|a|²+|c|²", (a.norm_sqr() + c.norm_sqr() - 1.0).abs()),
            ("|b|²+|d|²", (b.norm_sqr() + d.norm_sqr() - 1.0).abs()),
            ("a·conj(c)+b·conj(d)", (a * c.conj() + b * d.conj()).norm()),
            ("|det|", (det.norm() - 1.0).abs()),
            ("c+det·conj(b)", (c + det * b.conj()).norm()),
            ("d-det·conj(a)", (d - det * a.conj()).norm()),
        ];
        for (name, err) in checks {
            if !(err <= UNITARITY_TOL) {
                return Err(Error::invalid(format!(
                    "coin is not unitary: {name} off by {err:e}"
                )));
            }
        }
        Ok(())
    }

    /// The block of this coin named by `basis`.
    pub fn block(&self, basis: Basis) -> Mat2 {
        match basis {
            Basis::P => Mat2::new(self.a, self.b, ZERO, ZERO),
            Basis::Q => Mat2::new(ZERO, ZERO, self.c, self.d),
            Basis::R => Mat2::new(self.c, self.d, ZERO, ZERO),
            Basis::S => Mat2::new(ZERO, ZERO, self.a, self.b),
        }
    }

    /// `(P, Q)` with `P + Q` equal to the coin.
    pub fn split_pq(&self) -> (Mat2, Mat2) {
        (self.block(Basis::P), self.block(Basis::Q))
    }

    pub fn split_rs(&self) -> (Mat2, Mat2) {
        (self.block(Basis::R), self.block(Basis::S))
    }

    /// Product table for blocks at two (possibly different) sites:
    /// `X_x · Y_y = k · Z_y`, where `self` is the coin at `x`.
    /// Returns `(k, Z)`.
    pub fn multiply_blocks(&self, lhs: Basis, rhs: Basis) -> (Complex64, Basis) {
        use Basis::*;
        let Coin { a, b, c, d } = *self;
        match (lhs, rhs) {
            (P, P) => (a, P),
            (P, Q) => (b, R),
            (P, R) => (a, R),
            (P, S) => (b, P),
            (Q, P) => (c, S),
            (Q, Q) => (d, Q),
            (Q, R) => (c, Q),
            (Q, S) => (d, S),
            (R, P) => (c, P),
            (R, Q) => (d, R),
            (R, R) => (c, R),
            (R, S) => (d, P),
            (S, P) => (a, S),
            (S, Q) => (b, Q),
            (S, R) => (a, Q),
            (S, S) => (b, S),
        }
    }
}
