//! Complex linear algebra on the qubit state space and its two-player tensor
//! product. Matrices are tiny and fixed-size, so everything lives on the stack.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{wrap, Scalar};

/// Square complex matrix of fixed dimension, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix<T, const N: usize>(pub [[Complex<T>; N]; N]);

/// Single-player observable carrier.
pub type ComplexMatrix2<T> = CMatrix<T, 2>;
/// Two-player (Alice factor first) operator carrier.
pub type ComplexMatrix4<T> = CMatrix<T, 4>;

impl<T: Scalar, const N: usize> CMatrix<T, N> {
    pub fn zero() -> Self {
        CMatrix([[Complex::new(T::zero(), T::zero()); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        CMatrix(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    /// Builds a matrix from real entries.
    pub fn from_real(rows: [[T; N]; N]) -> Self {
        Self::from_fn(|i, j| Complex::new(rows[i][j], T::zero()))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..N).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.0[i][i])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn hermitian_deviation(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `<v|M|v>` for an arbitrary (not necessarily normalized) vector.
    pub fn quadratic_form(&self, v: &[Complex<T>; N]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..N {
            let mut row = Complex::new(T::zero(), T::zero());
            for j in 0..N {
                row = row + self.0[i][j] * v[j];
            }
            acc = acc + v[i].conj() * row;
        }
        acc
    }
}

impl<T: Scalar, const N: usize> Add for CMatrix<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<T: Scalar, const N: usize> Sub for CMatrix<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<T: Scalar, const N: usize> Mul for CMatrix<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| {
            (0..N).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + self.0[i][k] * rhs.0[k][j]
            })
        })
    }
}

/// Wave-function strategy `(cos alpha, e^{i theta} sin alpha)`.
///
/// `alpha` is kept in `[0, pi)` and `theta` in `[0, 2pi)`; shifting `alpha` by
/// `pi` only flips the global sign, which no frequency can see.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector<T> {
    alpha: T,
    theta: T,
}

impl<T: Scalar> StateVector<T> {
    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn components(&self) -> [Complex<T>; 2] {
        let (s, c) = self.alpha.sin_cos();
        [
            Complex::new(c, T::zero()),
            Complex::from_polar(s, self.theta),
        ]
    }

    pub fn norm_sqr(&self) -> T {
        let [c1, c2] = self.components();
        c1.norm_sqr() + c2.norm_sqr()
    }

    /// Bloch vector `(sin 2a cos t, sin 2a sin t, cos 2a)`.
    pub fn bloch(&self) -> [T; 3] {
        let two = T::lit(2.0);
        let (s2, c2) = (two * self.alpha).sin_cos();
        let (st, ct) = self.theta.sin_cos();
        [s2 * ct, s2 * st, c2]
    }
}

pub fn make_state<T: Scalar>(alpha: T, theta: T) -> Result<StateVector<T>> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    Ok(StateVector {
        alpha: wrap(alpha, T::PI()),
        theta: wrap(theta, T::TAU()),
    })
}

/// Outer product `|v><v|`.
pub fn projector_from_state<T: Scalar>(v: &StateVector<T>) -> ComplexMatrix2<T> {
    let c = v.components();
    ComplexMatrix2::from_fn(|i, j| c[i] * c[j].conj())
}

/// Born expectation `<v|M|v>` of a Hermitian observable.
pub fn expectation<T: Scalar>(m: &ComplexMatrix2<T>, v: &StateVector<T>) -> Result<T> {
    let deviation = m.hermitian_deviation();
    if !(deviation <= T::hermitian_tol()) {
        return Err(Error::NotHermitian {
            deviation: deviation.to_f64_lossy(),
        });
    }
    Ok(m.quadratic_form(&v.components()).re)
}

/// Kronecker product with `(M (x) N)[2i+k][2j+l] = M[i][j] N[k][l]`.
pub fn tensor<T: Scalar>(m: &ComplexMatrix2<T>, n: &ComplexMatrix2<T>) -> ComplexMatrix4<T> {
    ComplexMatrix4::from_fn(|r, c| m.0[r / 2][c / 2] * n.0[r % 2][c % 2])
}

/// Product vector `a (x) b` in the same index convention as [`tensor`].
pub fn tensor_state<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> [Complex<T>; 4] {
    let (x, y) = (a.components(), b.components());
    std::array::from_fn(|r| x[r / 2] * y[r % 2])
}

pub fn is_projector<T: Scalar>(m: &ComplexMatrix2<T>, tol: T) -> bool {
    m.hermitian_deviation() <= tol && (*m * *m).max_abs_diff(m) <= tol
}
