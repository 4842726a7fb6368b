//! Observable frames (atoms bound to projectors), Born frequency profiles of
//! wave-function strategies, and the uncertainty and interference relations
//! those profiles obey.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expectation, is_projector, ComplexMatrix2, StateVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameKind<T> {
    /// The x/y/z spin-projection frame with atoms 1..6.
    FixedXyz,
    /// Real directions `(cos t_k, sin t_k)` and their orthogonals.
    Planar { angles: Vec<T> },
}

/// Assignment of a rank-one projector to every lattice atom. Index `a` (0-based)
/// is complemented by `a + K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableFrame<T> {
    kind: FrameKind<T>,
    projectors: Vec<ComplexMatrix2<T>>,
}

impl<T: Scalar> ObservableFrame<T> {
    pub fn kind(&self) -> &FrameKind<T> {
        &self.kind
    }

    pub fn pair_count(&self) -> usize {
        self.projectors.len() / 2
    }

    pub fn projectors(&self) -> &[ComplexMatrix2<T>] {
        &self.projectors
    }

    /// Projector for the 1-based atom index.
    pub fn projector(&self, atom: usize) -> &ComplexMatrix2<T> {
        &self.projectors[atom - 1]
    }

    /// Bloch vector `n` of each projector, `P = (I + n.sigma) / 2`.
    pub fn bloch_vectors(&self) -> Vec<[T; 3]> {
        let two = T::lit(2.0);
        self.projectors
            .iter()
            .map(|p| {
                let off = p.get(0, 1);
                [two * off.re, -two * off.im, (p.get(0, 0) - p.get(1, 1)).re]
            })
            .collect()
    }

    /// Largest violation of `P_a + P_a' = I`, `P_a P_a' = 0` and idempotence.
    pub fn max_defect(&self) -> T {
        let k = self.pair_count();
        let id = ComplexMatrix2::identity();
        let mut worst = T::zero();
        for a in 0..k {
            let (p, q) = (self.projectors[a], self.projectors[a + k]);
            worst = worst
                .max((p + q).max_abs_diff(&id))
                .max((p * q).max_abs_diff(&ComplexMatrix2::zero()));
        }
        for p in &self.projectors {
            worst = worst.max((*p * *p).max_abs_diff(p)).max(p.hermitian_deviation());
        }
        worst
    }

    pub fn is_valid(&self) -> bool {
        self.projectors.iter().all(|p| is_projector(p, T::hermitian_tol()))
            && self.max_defect() <= T::hermitian_tol()
    }
}

pub fn frame_fixed_xyz<T: Scalar>() -> ObservableFrame<T> {
    let (z, h) = (T::zero(), T::lit(0.5));
    let c = Complex::new;
    let projectors = vec![
        ComplexMatrix2::from_real([[T::one(), z], [z, z]]),
        ComplexMatrix2::from_real([[h, h], [h, h]]),
        crate::linalg::CMatrix([[c(h, z), c(z, -h)], [c(z, h), c(h, z)]]),
        ComplexMatrix2::from_real([[z, z], [z, T::one()]]),
        ComplexMatrix2::from_real([[h, -h], [-h, h]]),
        crate::linalg::CMatrix([[c(h, z), c(z, h)], [c(z, -h), c(h, z)]]),
    ];
    ObservableFrame {
        kind: FrameKind::FixedXyz,
        projectors,
    }
}

pub fn frame_planar<T: Scalar>(angles: &[T]) -> Result<ObservableFrame<T>> {
    if angles.len() < 2 {
        return Err(Error::PairCount(angles.len()));
    }
    if angles.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("frame angle"));
    }
    let ray = |x: T, y: T| ComplexMatrix2::from_real([[x * x, x * y], [x * y, y * y]]);
    let mut projectors: Vec<_> = angles
        .iter()
        .map(|t| {
            let (s, c) = t.sin_cos();
            ray(c, s)
        })
        .collect();
    projectors.extend(angles.iter().map(|t| {
        let (s, c) = t.sin_cos();
        ray(-s, c)
    }));
    Ok(ObservableFrame {
        kind: FrameKind::Planar {
            angles: angles.to_vec(),
        },
        projectors,
    })
}

/// Born frequencies `p_a = <s|P_a|s>`, one per atom in atom order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BornProfile<T> {
    pub p: Vec<T>,
    pub alpha: T,
    pub theta: T,
}

impl<T: Scalar> BornProfile<T> {
    pub fn pair_count(&self) -> usize {
        self.p.len() / 2
    }

    /// Frequency of the 1-based atom.
    pub fn atom(&self, a: usize) -> T {
        self.p[a - 1]
    }
}

pub fn born_profile<T: Scalar>(frame: &ObservableFrame<T>, s: &StateVector<T>) -> BornProfile<T> {
    let p = frame
        .projectors
        .iter()
        .map(|m| {
            // Frames are Hermitian by construction.
            expectation(m, s).expect("frame projector is Hermitian")
        })
        .collect();
    BornProfile {
        p,
        alpha: s.alpha(),
        theta: s.theta(),
    }
}

/// The spin-projection uncertainty relation for +-1 valued variables
/// (`+1` on atom k, `-1` on atom k'), with the unit of action set to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyReport<T> {
    pub d1: T,
    pub d2: T,
    pub e3: T,
    pub lhs: T,
    pub rhs: T,
    pub freq_lhs: T,
    pub freq_rhs: T,
    pub holds: bool,
}

impl<T: Scalar> UncertaintyReport<T> {
    pub fn margin(&self) -> T {
        self.lhs - self.rhs
    }

    /// Both sides when every variable takes values `+-price` instead of `+-1`;
    /// the price then stands where the unit of action would.
    pub fn scaled(&self, price: T) -> (T, T) {
        let p4 = price.powi(4);
        (p4 * self.lhs, p4 * self.rhs)
    }
}

pub fn uncertainty_check<T: Scalar>(s: &StateVector<T>) -> UncertaintyReport<T> {
    let prof = born_profile(&frame_fixed_xyz(), s);
    let p = |a| prof.atom(a);
    let e1 = p(1) - p(4);
    let e2 = p(2) - p(5);
    let e3 = p(3) - p(6);
    let d1 = T::one() - e1 * e1;
    let d2 = T::one() - e2 * e2;
    let lhs = d1 * d2;
    let rhs = e3 * e3;
    let freq_lhs = p(1) * p(4) * p(2) * p(5);
    let diff = p(3) - p(6);
    let freq_rhs = diff * diff / T::lit(16.0);
    UncertaintyReport {
        d1,
        d2,
        e3,
        lhs,
        rhs,
        freq_lhs,
        freq_rhs,
        holds: lhs >= rhs - T::identity_tol(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyReduction<T> {
    /// `sin^2 2a`.
    pub lhs_reduced: T,
    pub rhs_reduced: T,
    /// `sin^2 2a cos^2 t (1 - sin^2 2a)`, the factored margin of the product form.
    pub factored_margin: T,
    /// `16 (p1 p4 p2 p5 - (p3 - p6)^2 / 16)` from the Born profile.
    pub direct_margin: T,
    pub forms_agree: bool,
}

pub fn frequency_inequality_reduction<T: Scalar>(s: &StateVector<T>) -> FrequencyReduction<T> {
    let r = uncertainty_check(s);
    let s2 = (T::lit(2.0) * s.alpha()).sin();
    let sin2_sq = s2 * s2;
    let ct = s.theta().cos();
    let factored = sin2_sq * ct * ct * (T::one() - sin2_sq);
    let direct = T::lit(16.0) * (r.freq_lhs - r.freq_rhs);
    let tol = T::identity_tol();
    let reduced_holds = sin2_sq <= T::one() + tol;
    FrequencyReduction {
        lhs_reduced: sin2_sq,
        rhs_reduced: T::one(),
        factored_margin: factored,
        direct_margin: direct,
        forms_agree: (direct >= -tol) == (factored >= -tol) && reduced_holds == (direct >= -tol),
    }
}

/// Second-game frequencies split into a classical mixture of first-game
/// frequencies plus a cross term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterferenceReport<T> {
    pub alpha: T,
    pub theta_a: T,
    pub p1: T,
    pub p3: T,
    pub p2_direct: T,
    /// `(cos^2 t p1, sin^2 t p3, +sin 2t sqrt(p1 p3))`.
    pub p2_terms: [T; 3],
    pub p2_residual: T,
    pub p4_direct: T,
    /// `(cos^2 t p3, sin^2 t p1, -sin 2t sqrt(p1 p3))`.
    pub p4_terms: [T; 3],
    pub p4_residual: T,
}

impl<T: Scalar> InterferenceReport<T> {
    pub fn cross_term(&self) -> T {
        self.p2_terms[2]
    }

    pub fn residual(&self) -> T {
        self.p2_residual.max(self.p4_residual)
    }
}

pub fn interference_decompose<T: Scalar>(alpha: T, theta_a: T) -> Result<InterferenceReport<T>> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    if !theta_a.is_finite() {
        return Err(Error::NonFinite("theta_a"));
    }
    // sqrt(p1 p3) = cos a sin a only on the first quadrant.
    if alpha < T::zero() || alpha > T::FRAC_PI_2() {
        return Err(Error::AngleOutOfRange {
            value: alpha.to_f64_lossy(),
        });
    }
    let (sa, ca) = alpha.sin_cos();
    let (st, ct) = theta_a.sin_cos();
    let p1 = ca * ca;
    let p3 = sa * sa;
    let root = (p1 * p3).sqrt();
    let cross = (T::lit(2.0) * theta_a).sin() * root;
    let p2_terms = [ct * ct * p1, st * st * p3, cross];
    let p4_terms = [ct * ct * p3, st * st * p1, -cross];
    let p2_direct = (alpha - theta_a).cos().powi(2);
    let p4_direct = (alpha - theta_a).sin().powi(2);
    let sum = |t: &[T; 3]| t[0] + t[1] + t[2];
    Ok(InterferenceReport {
        alpha,
        theta_a,
        p1,
        p3,
        p2_direct,
        p2_terms,
        p2_residual: (p2_direct - sum(&p2_terms)).abs(),
        p4_direct,
        p4_terms,
        p4_residual: (p4_direct - sum(&p4_terms)).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{make_state, CMatrix};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    fn st(a: f64, t: f64) -> StateVector<f64> {
        make_state(a, t).unwrap()
    }

    #[test]
    fn fixed_frame_examples() {
        let f = frame_fixed_xyz::<f64>();
        let want = CMatrix([
            [Complex::new(0.5, 0.0), Complex::new(0.0, -0.5)],
            [Complex::new(0.0, 0.5), Complex::new(0.5, 0.0)],
        ]);
        assert_eq!(*f.projector(3), want);
        assert!((*f.projector(1) + *f.projector(4)).max_abs_diff(&ComplexMatrix2::identity()) < 1e-15);
        assert!((*f.projector(2) * *f.projector(5)).max_abs_diff(&ComplexMatrix2::zero()) < 1e-15);
        assert!(f.is_valid());
        assert_eq!(f.pair_count(), 3);
    }

    #[test]
    fn planar_frame_examples() {
        let f = frame_planar(&[0.0, FRAC_PI_4]).unwrap();
        assert!(f.projector(1).max_abs_diff(&ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 0.0]])) < 1e-15);
        assert!(f.is_valid());
        let f = frame_planar(&[0.0, FRAC_PI_2]).unwrap();
        assert!(f.projector(2).max_abs_diff(&ComplexMatrix2::from_real([[0.0, 0.0], [0.0, 1.0]])) < 1e-15);
        let theta_a = 0.7;
        let f = frame_planar(&[0.0, theta_a]).unwrap();
        for &alpha in &[0.0, 0.3, 1.0, 2.5] {
            let p = born_profile(&f, &st(alpha, 0.0));
            assert!((p.atom(2) - (alpha - theta_a).cos().powi(2)).abs() < 1e-12);
        }
        assert_eq!(frame_planar(&[0.3]), Err(Error::PairCount(1)));
        assert!(frame_planar(&[0.3, f64::NAN]).is_err());
    }

    #[test]
    fn bloch_vectors_of_fixed_frame() {
        let n = frame_fixed_xyz::<f64>().bloch_vectors();
        let want = [
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, -1.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
        ];
        for (got, want) in n.iter().zip(want.iter()) {
            for k in 0..3 {
                assert!((got[k] - want[k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn born_profile_examples() {
        let f = frame_fixed_xyz();
        let close = |got: &[f64], want: &[f64]| {
            got.iter().zip(want).all(|(g, w)| (g - w).abs() < 1e-12)
        };
        assert!(close(&born_profile(&f, &st(0.0, 0.0)).p, &[1.0, 0.5, 0.5, 0.0, 0.5, 0.5]));
        assert!(close(&born_profile(&f, &st(FRAC_PI_4, 0.0)).p, &[0.5, 1.0, 0.5, 0.5, 0.0, 0.5]));
        let p = born_profile(&f, &st(FRAC_PI_4, FRAC_PI_2));
        assert!((p.atom(3) - 1.0).abs() < 1e-12 && p.atom(6).abs() < 1e-12);
    }

    #[test]
    fn uncertainty_examples() {
        let r = uncertainty_check(&st(0.0, 1.234));
        assert!(r.d1.abs() < 1e-15 && r.e3.abs() < 1e-15 && r.holds);
        let r = uncertainty_check(&st(FRAC_PI_4, FRAC_PI_2));
        assert!((r.d1 - 1.0).abs() < 1e-12 && (r.d2 - 1.0).abs() < 1e-12 && (r.e3 - 1.0).abs() < 1e-12);
        assert!(r.margin().abs() < 1e-12 && r.holds);
        let r = uncertainty_check(&st(FRAC_PI_4, 0.0));
        assert!(r.d2.abs() < 1e-12 && r.e3.abs() < 1e-12 && r.holds);
    }

    #[test]
    fn uncertainty_scaling_is_uniform() {
        let r = uncertainty_check(&st(0.4, 0.9));
        let (l, rr) = r.scaled(3.0);
        assert!((l - 81.0 * r.lhs).abs() < 1e-12 && (rr - 81.0 * r.rhs).abs() < 1e-12);
    }

    #[test]
    fn reduction_examples() {
        let r = frequency_inequality_reduction(&st(FRAC_PI_4, 0.3));
        assert!((r.lhs_reduced - 1.0).abs() < 1e-12);
        assert_eq!(r.rhs_reduced, 1.0);
        assert!(r.forms_agree);
        let r = frequency_inequality_reduction(&st(0.2, 0.3));
        assert!(r.lhs_reduced <= 1.0);
        assert!((r.factored_margin - r.direct_margin).abs() < 1e-12);
    }

    #[test]
    fn interference_examples() {
        let r = interference_decompose(0.6f64, 0.0).unwrap();
        assert!((r.p2_direct - r.p1).abs() < 1e-15 && r.cross_term() == 0.0);
        let r = interference_decompose(0.6f64, FRAC_PI_2).unwrap();
        assert!((r.p2_direct - r.p3).abs() < 1e-15 && r.cross_term().abs() < 1e-15);
        let r = interference_decompose(FRAC_PI_8, FRAC_PI_8).unwrap();
        assert!((r.p2_direct - 1.0).abs() < 1e-15);
        assert!((r.p2_terms.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.residual() < 1e-12);
    }

    #[test]
    fn interference_rejects_other_quadrants() {
        assert!(matches!(interference_decompose(2.0, 0.1), Err(Error::AngleOutOfRange { .. })));
        assert!(matches!(interference_decompose(-0.1, 0.1), Err(Error::AngleOutOfRange { .. })));
        assert!(interference_decompose(f64::NAN, 0.1).is_err());
    }
}
