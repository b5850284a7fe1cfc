//! Brute-force path-sum oracle.
//!
//! `Ξ_n(l, m)` is the sum, over every nearest-neighbour path from the origin
//! with `l` left and `m` right moves, of the time-ordered product of move
//! blocks: the block for the first move sits rightmost and is taken at the
//! origin. Each product is computed twice, once by plain 2×2 multiplication
//! ([`path_matrix`]) and once by the P/Q/R/S product table
//! ([`reduce_word`]); the two must agree.

use num_complex::Complex64;

use crate::coin::{Basis, ChiralityVector, Mat2};
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::evolve::Distribution;

/// Default bound on `l + m`: `2^16` paths is still instant.
pub const DEFAULT_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

impl Move {
    fn block(self) -> Basis {
        match self {
            Move::Left => Basis::P,
            Move::Right => Basis::Q,
        }
    }
}

/// A nonempty sequence of moves from the origin, in time order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathWord {
    moves: Vec<Move>,
}

impl PathWord {
    pub fn new(moves: Vec<Move>) -> Result<Self> {
        if moves.is_empty() {
            return Err(Error::EmptyWalk);
        }
        Ok(PathWord { moves })
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Site occupied before each move; `sites()[0] == 0`.
    pub fn sites(&self) -> Vec<i64> {
        let mut x = 0;
        self.moves
            .iter()
            .map(|mv| {
                let here = x;
                x += match mv {
                    Move::Left => -1,
                    Move::Right => 1,
                };
                here
            })
            .collect()
    }

    pub fn end(&self) -> i64 {
        self.moves
            .iter()
            .map(|mv| if *mv == Move::Left { -1 } else { 1 })
            .sum()
    }
}

/// All `C(l+m, l)` words with `l` left and `m` right moves.
pub fn enumerate_paths(l: usize, m: usize) -> Result<Vec<PathWord>> {
    if l + m == 0 {
        return Err(Error::EmptyWalk);
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(l + m);
    extend_paths(l, m, &mut prefix, &mut out);
    Ok(out)
}

fn extend_paths(l: usize, m: usize, prefix: &mut Vec<Move>, out: &mut Vec<PathWord>) {
    if l == 0 && m == 0 {
        out.push(PathWord {
            moves: prefix.clone(),
        });
        return;
    }
    if l > 0 {
        prefix.push(Move::Left);
        extend_paths(l - 1, m, prefix, out);
        prefix.pop();
    }
    if m > 0 {
        prefix.push(Move::Right);
        extend_paths(l, m - 1, prefix, out);
        prefix.pop();
    }
}

/// Ordered product of the move blocks, origin factor rightmost.
pub fn path_matrix(word: &PathWord, env: &Environment) -> Mat2 {
    word.moves
        .iter()
        .zip(word.sites())
        .fold(Mat2::IDENTITY, |acc, (mv, x)| {
            env.coin(x).block(mv.block()) * acc
        })
}

/// Reduces the word with the product table, scanning the matrix product
/// from its leftmost factor. Returns `(k, Z)` with the product equal to
/// `k · Z_0`.
pub fn reduce_word(word: &PathWord, env: &Environment) -> (Complex64, Basis) {
    let sites = word.sites();
    let last = word.len() - 1;
    let mut scalar = Complex64::new(1.0, 0.0);
    let mut basis = word.moves[last].block();
    let mut site = sites[last];
    for k in (0..last).rev() {
        let (coef, next) = env.coin(site).multiply_blocks(basis, word.moves[k].block());
        scalar *= coef;
        basis = next;
        site = sites[k];
    }
    (scalar, basis)
}

/// Coordinates of a 2×2 matrix in the orthonormal basis
/// `{P_0, Q_0, R_0, S_0}` built from the origin coin.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PqrsCoefficients {
    pub p: Complex64,
    pub q: Complex64,
    pub r: Complex64,
    pub s: Complex64,
}

impl PqrsCoefficients {
    pub fn get(&self, basis: Basis) -> Complex64 {
        match basis {
            Basis::P => self.p,
            Basis::Q => self.q,
            Basis::R => self.r,
            Basis::S => self.s,
        }
    }

    pub fn get_mut(&mut self, basis: Basis) -> &mut Complex64 {
        match basis {
            Basis::P => &mut self.p,
            Basis::Q => &mut self.q,
            Basis::R => &mut self.r,
            Basis::S => &mut self.s,
        }
    }

    /// `p·P_0 + q·Q_0 + r·R_0 + s·S_0`.
    pub fn matrix(&self, env: &Environment) -> Mat2 {
        let origin = env.coin(0);
        Basis::ALL.iter().fold(Mat2::ZERO, |acc, &b| {
            acc + origin.block(b).scale(self.get(b))
        })
    }

    /// Projects `m` onto the basis with the trace inner product.
    pub fn from_matrix(m: &Mat2, env: &Environment) -> Self {
        let origin = env.coin(0);
        let mut out = PqrsCoefficients::default();
        for b in Basis::ALL {
            *out.get_mut(b) = origin.block(b).inner(m);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &PqrsCoefficients) -> f64 {
        Basis::ALL
            .iter()
            .map(|&b| (self.get(b) - other.get(b)).norm())
            .fold(0.0, f64::max)
    }
}

/// Enumeration-based oracle with a configurable bound on path length.
#[derive(Clone, Copy, Debug)]
pub struct PathSum {
    cap: usize,
}

impl Default for PathSum {
    fn default() -> Self {
        PathSum { cap: DEFAULT_CAP }
    }
}

impl PathSum {
    pub fn with_cap(cap: usize) -> Self {
        PathSum { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::EmptyWalk);
        }
        if n > self.cap {
            return Err(Error::ResourceLimit {
                what: "path length",
                requested: n,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// `Ξ_n(l, m)` in the P/Q/R/S basis, accumulated from reduced words.
    pub fn coefficients(&self, l: usize, m: usize, env: &Environment) -> Result<PqrsCoefficients> {
        self.check(l + m)?;
        let mut out = PqrsCoefficients::default();
        for word in enumerate_paths(l, m)? {
            let (k, b) = reduce_word(&word, env);
            *out.get_mut(b) += k;
        }
        Ok(out)
    }

    /// `Ξ_n(l, m)` as a matrix, summed from direct products.
    pub fn summed_matrix(&self, l: usize, m: usize, env: &Environment) -> Result<Mat2> {
        self.check(l + m)?;
        Ok(enumerate_paths(l, m)?
            .iter()
            .fold(Mat2::ZERO, |acc, w| acc + path_matrix(w, env)))
    }

    /// `P(X_n = -l + m) = ‖Ξ_n(l, m) qubit‖²` for every split of `n`.
    pub fn oracle_distribution(
        &self,
        env: &Environment,
        n: usize,
        qubit: ChiralityVector,
    ) -> Result<Distribution> {
        self.check(n)?;
        qubit.ensure_normalized()?;
        // Index j of the distribution is position -n + 2j, i.e. m = j.
        let masses = (0..=n)
            .map(|m| {
                let coeffs = self.coefficients(n - m, m, env)?;
                Ok(coeffs.matrix(env).apply(qubit).norm_sqr())
            })
            .collect::<Result<Vec<f64>>>()?;
        Distribution::from_masses(n, masses)
    }
}

pub fn coefficients(l: usize, m: usize, env: &Environment) -> Result<PqrsCoefficients> {
    PathSum::default().coefficients(l, m, env)
}

pub fn oracle_distribution(
    env: &Environment,
    n: usize,
    qubit: ChiralityVector,
) -> Result<Distribution> {
    PathSum::default().oracle_distribution(env, n, qubit)
}
