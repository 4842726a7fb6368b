//! Experimental: equilibria over full complex strategies `(alpha, theta)` and
//! `(beta, omega)`.
//!
//! On Bloch vectors the payoff is bilinear, so each best response is the unit
//! vector along the opponent-induced weight vector. Equilibria are fixed points
//! of `r_B -> BR_B(BR_A(r_B))`, located from a sphere grid and refined by
//! Gauss-Newton on the fixed-point residual. Certificates are exact.

use serde::Serialize;

use crate::payoff::BlochForm;
use crate::scalar::{wrap, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasedEquilibrium<T> {
    pub alpha: T,
    pub theta: T,
    pub beta: T,
    pub omega: T,
    pub value: T,
    pub verification: T,
}

fn norm3<T: Scalar>(v: &[T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn unit_from_angles<T: Scalar>(polar: T, azimuth: T) -> [T; 3] {
    let (sp, cp) = polar.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    [sp * ca, sp * sa, cp]
}

/// `(alpha, theta)` of the state with Bloch vector `r`.
pub fn angles_of<T: Scalar>(r: &[T; 3]) -> (T, T) {
    let polar = r[2].max(-T::one()).min(T::one()).acos();
    let azimuth = if r[0].abs() + r[1].abs() <= T::epsilon() {
        T::zero()
    } else {
        wrap(r[1].atan2(r[0]), T::TAU())
    };
    (polar / T::lit(2.0), azimuth)
}

/// Alice's best Bloch vector against `rb`, or `None` when she is indifferent.
fn alice_best<T: Scalar>(form: &BlochForm<T>, rb: &[T; 3]) -> Option<[T; 3]> {
    let w = form.alice_weights(rb);
    let v = [w[1], w[2], w[3]];
    let n = norm3(&v);
    (n > T::epsilon()).then(|| v.map(|x| x / n))
}

fn bob_best<T: Scalar>(form: &BlochForm<T>, ra: &[T; 3]) -> Option<[T; 3]> {
    let z = form.bob_weights(ra);
    let v = [z[1], z[2], z[3]];
    let n = norm3(&v);
    (n > T::epsilon()).then(|| v.map(|x| -x / n))
}

/// Largest unilateral gain at `(ra, rb)`.
pub fn certify_phased<T: Scalar>(form: &BlochForm<T>, ra: &[T; 3], rb: &[T; 3]) -> T {
    let value = form.value(ra, rb);
    let w = form.alice_weights(rb);
    let z = form.bob_weights(ra);
    let sup = w[0] + norm3(&[w[1], w[2], w[3]]);
    let inf = z[0] - norm3(&[z[1], z[2], z[3]]);
    (sup - value).max(value - inf).max(T::zero())
}

fn residual<T: Scalar>(form: &BlochForm<T>, polar: T, azimuth: T) -> Option<[T; 3]> {
    let rb = unit_from_angles(polar, azimuth);
    let ra = alice_best(form, &rb)?;
    let back = bob_best(form, &ra)?;
    Some([back[0] - rb[0], back[1] - rb[1], back[2] - rb[2]])
}

fn gauss_newton<T: Scalar>(form: &BlochForm<T>, mut p: T, mut a: T) -> Option<(T, T)> {
    let h = T::lit(1e-7);
    for _ in 0..50 {
        let r = residual(form, p, a)?;
        if norm3(&r) <= T::lit(1e-13) {
            break;
        }
        let rp = residual(form, p + h, a)?;
        let ra = residual(form, p, a + h)?;
        let jp: [T; 3] = std::array::from_fn(|i| (rp[i] - r[i]) / h);
        let ja: [T; 3] = std::array::from_fn(|i| (ra[i] - r[i]) / h);
        // Normal equations of the 3x2 least-squares step.
        let dot = |x: &[T; 3], y: &[T; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let (m00, m01, m11) = (dot(&jp, &jp), dot(&jp, &ja), dot(&ja, &ja));
        let (g0, g1) = (dot(&jp, &r), dot(&ja, &r));
        let det = m00 * m11 - m01 * m01;
        if det.abs() <= T::lit(1e-20) {
            return None;
        }
        p = p - (m11 * g0 - m01 * g1) / det;
        a = a - (m00 * g1 - m01 * g0) / det;
    }
    Some((p, a))
}

/// Searches Bob's Bloch sphere on a `points x 2*points` polar/azimuth grid.
pub fn find_nash_phased<T: Scalar>(form: &BlochForm<T>, eps: T, points: usize) -> Vec<PhasedEquilibrium<T>> {
    let points = points.max(4);
    let (np, na) = (points, 2 * points);
    let dp = T::PI() / T::from_usize(np).unwrap();
    let da = T::TAU() / T::from_usize(na).unwrap();
    let half = T::lit(0.5);
    let grid_angle = |i: usize, j: usize| {
        (
            (T::from_usize(i).unwrap() + half) * dp,
            T::from_usize(j).unwrap() * da,
        )
    };
    let res: Vec<Vec<Option<T>>> = (0..np)
        .map(|i| {
            (0..na)
                .map(|j| {
                    let (p, a) = grid_angle(i, j);
                    residual(form, p, a).map(|r| norm3(&r))
                })
                .collect()
        })
        .collect();

    let mut found: Vec<(PhasedEquilibrium<T>, [T; 3])> = Vec::new();
    for i in 0..np {
        for j in 0..na {
            let Some(r) = res[i][j] else { continue };
            if r > T::lit(0.5) {
                continue;
            }
            let mut is_min = true;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    let ii = i as i64 + di;
                    if ii < 0 || ii >= np as i64 || (di == 0 && dj == 0) {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(na as i64) as usize;
                    if let Some(o) = res[ii as usize][jj] {
                        if o < r {
                            is_min = false;
                        }
                    }
                }
            }
            if !is_min {
                continue;
            }
            let (p0, a0) = grid_angle(i, j);
            let Some((p, a)) = gauss_newton(form, p0, a0) else { continue };
            let rb = unit_from_angles(p, a);
            let Some(ra) = alice_best(form, &rb) else { continue };
            let verification = certify_phased(form, &ra, &rb);
            if verification > eps {
                continue;
            }
            if found.iter().any(|(_, other)| {
                norm3(&[other[0] - rb[0], other[1] - rb[1], other[2] - rb[2]]) < T::lit(1e-6)
            }) {
                continue;
            }
            let (alpha, theta) = angles_of(&ra);
            let (beta, omega) = angles_of(&rb);
            found.push((
                PhasedEquilibrium {
                    alpha,
                    theta,
                    beta,
                    omega,
                    value: form.value(&ra, &rb),
                    verification,
                },
                rb,
            ));
        }
    }
    found.into_iter().map(|(e, _)| e).collect()
}
