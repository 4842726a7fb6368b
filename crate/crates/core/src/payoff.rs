//! Payoff matrices, the payoff operator `sum v_ij A_i (x) B_j`, and Alice's
//! expected payoff in operator, closed and reduced real form.
//!
//! Only Alice is paid; Bob's utility is the negative of hers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{build_lattice, OrthoLattice};
use crate::linalg::{tensor, tensor_state, ComplexMatrix4, StateVector};
use crate::scalar::Scalar;
use crate::strategy::{born_profile, frame_fixed_xyz, ObservableFrame};

/// `v[i][j]` pays Alice when she asks atom `i + 1` and Bob's ball is at atom `j + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffMatrix<T> {
    pairs: usize,
    v: Vec<Vec<T>>,
}

impl<T: Scalar> PayoffMatrix<T> {
    /// Single-pairing matrix: atom `i` against its complement pays `values[i]`.
    pub fn table(values: &[T]) -> Result<Self> {
        let n = values.len();
        if !n.is_multiple_of(2) || n < 4 {
            return Err(Error::Shape(format!(
                "expected 2K >= 4 payoff values, got {n}"
            )));
        }
        let pairs = n / 2;
        let mut v = vec![vec![T::zero(); n]; n];
        for (i, &x) in values.iter().enumerate() {
            v[i][(i + pairs) % n] = x;
        }
        Self::full(v)
    }

    pub fn full(v: Vec<Vec<T>>) -> Result<Self> {
        let n = v.len();
        if !n.is_multiple_of(2) || n < 4 {
            return Err(Error::Shape(format!("expected a 2K x 2K matrix with K >= 2, got {n} rows")));
        }
        if let Some((i, row)) = v.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if v.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("payoff entry"));
        }
        Ok(PayoffMatrix { pairs: n / 2, v })
    }

    pub fn pair_count(&self) -> usize {
        self.pairs
    }

    pub fn entries(&self) -> &[Vec<T>] {
        &self.v
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.v[i][j]
    }

    fn complement(&self, i: usize) -> usize {
        (i + self.pairs) % (2 * self.pairs)
    }

    /// `Some([v_1..v_2K])` when only entries `v[i][i']` are nonzero.
    pub fn table_values(&self) -> Option<Vec<T>> {
        let n = 2 * self.pairs;
        for i in 0..n {
            for j in 0..n {
                if j != self.complement(i) && self.v[i][j] != T::zero() {
                    return None;
                }
            }
        }
        Some((0..n).map(|i| self.v[i][self.complement(i)]).collect())
    }

    /// Whether every payment involves a question and a position from the same
    /// complement pair, i.e. the game splits into per-pair classical subgames.
    pub fn is_pair_local(&self) -> bool {
        let n = 2 * self.pairs;
        (0..n).all(|i| (0..n).all(|j| i % self.pairs == j % self.pairs || self.v[i][j] == T::zero()))
    }

    pub fn max_abs(&self) -> T {
        self.v.iter().flatten().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, factor: T) -> Self {
        PayoffMatrix {
            pairs: self.pairs,
            v: self.v.iter().map(|r| r.iter().map(|&x| x * factor).collect()).collect(),
        }
    }
}

/// `(a, b, c, d)` of the real-strategy reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedCoefficients<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> ReducedCoefficients<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        ReducedCoefficients { a, b, c, d }
    }

    /// A payoff vector whose zero-phase payoff is exactly `H`:
    /// `v2 = 2(d - c)`, `v5 = -2(c + d)`, `v3 = v6 = 0`.
    ///
    /// At zero phases the y-pair questions carry no angle dependence, so `v3`
    /// and `v6` only enter `H` correctly when they vanish.
    pub fn realize(&self) -> [T; 6] {
        let two = T::lit(2.0);
        let z = T::zero();
        [self.a, two * (self.d - self.c), z, self.b, -two * (self.c + self.d), z]
    }
}

pub fn reduce_coefficients<T: Scalar>(v: &PayoffMatrix<T>) -> Result<ReducedCoefficients<T>> {
    let t = table_values_k3(v)?;
    let four = T::lit(4.0);
    Ok(ReducedCoefficients {
        a: t[0],
        b: t[3],
        c: -(t[1] + t[2] + t[4] + t[5]) / four,
        d: (t[1] + t[2] - t[4] - t[5]) / four,
    })
}

fn table_values_k3<T: Scalar>(v: &PayoffMatrix<T>) -> Result<Vec<T>> {
    if v.pair_count() != 3 {
        return Err(Error::NotTableShape);
    }
    v.table_values().ok_or(Error::NotTableShape)
}

/// Sign used for the `c` term of the reduced payoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CTermSign {
    /// `-c (1 - sin 2a sin 2b)`; agrees with the full payoff at zero phases.
    #[default]
    Consistent,
    /// `+c (1 - sin 2a sin 2b)` as the formula is usually printed.
    AsPrinted,
}

/// Reduced real payoff `H(alpha, beta)`.
pub fn reduced_payoff_h<T: Scalar>(k: &ReducedCoefficients<T>, alpha: T, beta: T) -> T {
    reduced_payoff_h_with(k, alpha, beta, CTermSign::Consistent)
}

pub fn reduced_payoff_h_with<T: Scalar>(
    k: &ReducedCoefficients<T>,
    alpha: T,
    beta: T,
    sign: CTermSign,
) -> T {
    let two = T::lit(2.0);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (s2a, s2b) = ((two * alpha).sin(), (two * beta).sin());
    let c = match sign {
        CTermSign::Consistent => -k.c,
        CTermSign::AsPrinted => k.c,
    };
    k.a * ca * ca * sb * sb + k.b * sa * sa * cb * cb + c * (T::one() - s2a * s2b) + k.d * (s2a - s2b)
}

/// Lattice, both players' frames and the payoff matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec<T> {
    lattice: OrthoLattice,
    frame_a: ObservableFrame<T>,
    frame_b: ObservableFrame<T>,
    payoff: PayoffMatrix<T>,
}

impl<T: Scalar> GameSpec<T> {
    pub fn new(frame_a: ObservableFrame<T>, frame_b: ObservableFrame<T>, payoff: PayoffMatrix<T>) -> Result<Self> {
        let k = payoff.pair_count();
        for (name, f) in [("frame_a", &frame_a), ("frame_b", &frame_b)] {
            if f.pair_count() != k {
                return Err(Error::Shape(format!(
                    "{name} has {} pairs but payoff has {k}",
                    f.pair_count()
                )));
            }
        }
        Ok(GameSpec {
            lattice: build_lattice(k)?,
            frame_a,
            frame_b,
            payoff,
        })
    }

    /// The spin-projection game with both players on the x/y/z frame.
    pub fn fixed_xyz(values: &[T; 6]) -> Self {
        let payoff = PayoffMatrix::table(values).expect("six values form a pairs = 3 table");
        GameSpec::new(frame_fixed_xyz(), frame_fixed_xyz(), payoff).expect("consistent pair counts")
    }

    pub fn from_reduced(k: &ReducedCoefficients<T>) -> Self {
        Self::fixed_xyz(&k.realize())
    }

    pub fn lattice(&self) -> &OrthoLattice {
        &self.lattice
    }

    pub fn pair_count(&self) -> usize {
        self.lattice.pair_count()
    }

    pub fn frame_a(&self) -> &ObservableFrame<T> {
        &self.frame_a
    }

    pub fn frame_b(&self) -> &ObservableFrame<T> {
        &self.frame_b
    }

    pub fn payoff(&self) -> &PayoffMatrix<T> {
        &self.payoff
    }

    pub fn with_payoff(&self, payoff: PayoffMatrix<T>) -> Result<Self> {
        Self::new(self.frame_a.clone(), self.frame_b.clone(), payoff)
    }

    /// The game as a bilinear form on Bloch 4-vectors `(1, r)`.
    pub fn bloch_form(&self) -> BlochForm<T> {
        let half = T::lit(0.5);
        let lift = |n: &[T; 3]| [half, half * n[0], half * n[1], half * n[2]];
        let na: Vec<_> = self.frame_a.bloch_vectors().iter().map(lift).collect();
        let nb: Vec<_> = self.frame_b.bloch_vectors().iter().map(lift).collect();
        let mut g = [[T::zero(); 4]; 4];
        for (i, ra) in na.iter().enumerate() {
            for (j, rb) in nb.iter().enumerate() {
                let v = self.payoff.get(i, j);
                if v == T::zero() {
                    continue;
                }
                for r in 0..4 {
                    for c in 0..4 {
                        g[r][c] = g[r][c] + v * ra[r] * rb[c];
                    }
                }
            }
        }
        BlochForm {
            g,
            scale: self.payoff.max_abs(),
        }
    }

    /// Restriction to real strategies (zero phases).
    pub fn real_game(&self) -> RealGame<T> {
        self.bloch_form().real_game()
    }
}

pub fn payoff_operator<T: Scalar>(g: &GameSpec<T>) -> ComplexMatrix4<T> {
    let n = 2 * g.pair_count();
    let mut acc = ComplexMatrix4::zero();
    for i in 0..n {
        for j in 0..n {
            let v = g.payoff.get(i, j);
            if v != T::zero() {
                acc = acc + tensor(&g.frame_a.projectors()[i], &g.frame_b.projectors()[j]).scale(v);
            }
        }
    }
    acc
}

/// The operator with Bob's factor first, `sum v_ij B_j (x) A_i`.
pub fn payoff_operator_bob_first<T: Scalar>(g: &GameSpec<T>) -> ComplexMatrix4<T> {
    let n = 2 * g.pair_count();
    let mut acc = ComplexMatrix4::zero();
    for i in 0..n {
        for j in 0..n {
            let v = g.payoff.get(i, j);
            if v != T::zero() {
                acc = acc + tensor(&g.frame_b.projectors()[j], &g.frame_a.projectors()[i]).scale(v);
            }
        }
    }
    acc
}

/// `<phi (x) psi| P |phi (x) psi>`.
pub fn expected_payoff_operator<T: Scalar>(g: &GameSpec<T>, phi: &StateVector<T>, psi: &StateVector<T>) -> T {
    payoff_operator(g).quadratic_form(&tensor_state(phi, psi)).re
}

/// `sum v_ij <A_i>_phi <B_j>_psi`, the factorized form of the operator expectation.
pub fn expected_payoff_factored<T: Scalar>(g: &GameSpec<T>, phi: &StateVector<T>, psi: &StateVector<T>) -> T {
    let pa = born_profile(&g.frame_a, phi).p;
    let pb = born_profile(&g.frame_b, psi).p;
    let mut acc = T::zero();
    for (i, &x) in pa.iter().enumerate() {
        for (j, &y) in pb.iter().enumerate() {
            acc = acc + g.payoff.get(i, j) * x * y;
        }
    }
    acc
}

/// Six-term closed form for the x/y/z game, valid only for the pairs = 3 table shape.
pub fn expected_payoff_closed<T: Scalar>(v: &PayoffMatrix<T>, alpha: T, theta: T, beta: T, omega: T) -> Result<T> {
    let t = table_values_k3(v)?;
    let (one, two) = (T::one(), T::lit(2.0));
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (s2a, s2b) = ((two * alpha).sin(), (two * beta).sin());
    let (st, ct) = theta.sin_cos();
    let (so, co) = omega.sin_cos();
    let half = |x: T| x / two;
    Ok(t[0] * ca * ca * sb * sb
        + t[1] * half(one + ct * s2a) * half(one - co * s2b)
        + t[2] * half(one + st * s2a) * half(one - so * s2b)
        + t[3] * sa * sa * cb * cb
        + t[4] * half(one - ct * s2a) * half(one + co * s2b)
        + t[5] * half(one - st * s2a) * half(one + so * s2b))
}

/// `E = rho_A^T G rho_B` with `rho = (1, r_x, r_y, r_z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm<T> {
    pub g: [[T; 4]; 4],
    /// Largest payment magnitude, used to scale tie tolerances.
    pub scale: T,
}

impl<T: Scalar> BlochForm<T> {
    pub fn value(&self, ra: &[T; 3], rb: &[T; 3]) -> T {
        let a = [T::one(), ra[0], ra[1], ra[2]];
        let b = [T::one(), rb[0], rb[1], rb[2]];
        let mut acc = T::zero();
        for r in 0..4 {
            for c in 0..4 {
                acc = acc + a[r] * self.g[r][c] * b[c];
            }
        }
        acc
    }

    /// Alice's payoff as `w0 + w . r_A` against Bob's Bloch vector.
    pub fn alice_weights(&self, rb: &[T; 3]) -> [T; 4] {
        let b = [T::one(), rb[0], rb[1], rb[2]];
        std::array::from_fn(|r| (0..4).map(|c| self.g[r][c] * b[c]).sum())
    }

    /// Alice's payoff as `z0 + z . r_B` against Alice's Bloch vector.
    pub fn bob_weights(&self, ra: &[T; 3]) -> [T; 4] {
        let a = [T::one(), ra[0], ra[1], ra[2]];
        std::array::from_fn(|c| (0..4).map(|r| a[r] * self.g[r][c]).sum())
    }

    pub fn real_game(&self) -> RealGame<T> {
        // u = (1, cos 2a, sin 2a) picks rho components (1, r_z, r_x).
        const MAP: [usize; 3] = [0, 3, 1];
        RealGame {
            q: std::array::from_fn(|i| std::array::from_fn(|j| self.g[MAP[i]][MAP[j]])),
            scale: self.scale,
        }
    }
}

/// Real-strategy payoff `E(a, b) = u(a)^T Q u(b)` with `u(x) = (1, cos 2x, sin 2x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealGame<T> {
    pub q: [[T; 3]; 3],
    pub scale: T,
}

#[inline]
fn features<T: Scalar>(x: T) -> [T; 3] {
    let (s, c) = (T::lit(2.0) * x).sin_cos();
    [T::one(), c, s]
}

#[inline]
fn features_d1<T: Scalar>(x: T) -> [T; 3] {
    let two = T::lit(2.0);
    let (s, c) = (two * x).sin_cos();
    [T::zero(), -two * s, two * c]
}

#[inline]
fn features_d2<T: Scalar>(x: T) -> [T; 3] {
    let four = T::lit(4.0);
    let (s, c) = (T::lit(2.0) * x).sin_cos();
    [T::zero(), -four * c, -four * s]
}

impl<T: Scalar> RealGame<T> {
    pub fn features(x: T) -> [T; 3] {
        features(x)
    }

    fn form(&self, u: &[T; 3], w: &[T; 3]) -> T {
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc = acc + u[i] * self.q[i][j] * w[j];
            }
        }
        acc
    }

    pub fn value(&self, alpha: T, beta: T) -> T {
        self.form(&features(alpha), &features(beta))
    }

    /// `Q u(beta)`: Alice's payoff is `dot(u(alpha), weights)`.
    pub fn alice_weights(&self, beta: T) -> [T; 3] {
        let u = features(beta);
        std::array::from_fn(|i| (0..3).map(|j| self.q[i][j] * u[j]).sum())
    }

    /// `Q^T u(alpha)`: the payoff against Bob's angle is `dot(u(beta), weights)`.
    pub fn bob_weights(&self, alpha: T) -> [T; 3] {
        let u = features(alpha);
        std::array::from_fn(|j| (0..3).map(|i| u[i] * self.q[i][j]).sum())
    }

    pub fn gradient(&self, alpha: T, beta: T) -> [T; 2] {
        let (ua, ub) = (features(alpha), features(beta));
        [
            self.form(&features_d1(alpha), &ub),
            self.form(&ua, &features_d1(beta)),
        ]
    }

    /// `[[H_aa, H_ab], [H_ab, H_bb]]`.
    pub fn hessian(&self, alpha: T, beta: T) -> [[T; 2]; 2] {
        let (ua, ub) = (features(alpha), features(beta));
        let (da, db) = (features_d1(alpha), features_d1(beta));
        let cross = self.form(&da, &db);
        [
            [self.form(&features_d2(alpha), &ub), cross],
            [cross, self.form(&ua, &features_d2(beta))],
        ]
    }

    pub fn scaled(&self, factor: T) -> Self {
        RealGame {
            q: self.q.map(|r| r.map(|x| x * factor)),
            scale: self.scale * factor.abs(),
        }
    }
}

/// Anything that reduces to a real-strategy zero-sum game.
pub trait RealStrategyGame<T: Scalar> {
    fn real_game(&self) -> RealGame<T>;
}

impl<T: Scalar> RealStrategyGame<T> for RealGame<T> {
    fn real_game(&self) -> RealGame<T> {
        *self
    }
}

impl<T: Scalar> RealStrategyGame<T> for GameSpec<T> {
    fn real_game(&self) -> RealGame<T> {
        GameSpec::real_game(self)
    }
}

impl<T: Scalar> RealStrategyGame<T> for ReducedCoefficients<T> {
    fn real_game(&self) -> RealGame<T> {
        GameSpec::from_reduced(self).real_game()
    }
}
