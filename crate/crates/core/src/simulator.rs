//! Monte Carlo simulation of the two-stage protocol.
//!
//! Preparation: one player hides a ball on an atom, the other asks "is it at
//! q?". The hider may slide the ball along any edge before answering, so a
//! "yes" is ambiguous and only a "no" (ball on the complement `q'`) is counted.
//! Opposite-vertex frequencies `N_a / (N_a + N_a')` estimate the Born profile.
//!
//! Measurement: one classical subgame per complement pair, where both players
//! follow their per-pair frequencies and Alice is paid `v[i][j]`.
//!
//! Rounds are cut into fixed-size chunks, each driven by its own ChaCha stream
//! keyed by `(seed, tag, chunk)`. Only integer counts are aggregated, so results
//! are identical for any number of worker threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::StateVector;
use crate::payoff::{expected_payoff_operator, GameSpec};
use crate::scalar::Scalar;
use crate::strategy::{born_profile, ObservableFrame};

pub const CHUNK_ROUNDS: u64 = 1 << 16;

const TAG_PREPARATION: u64 = 0;
const TAG_BOB_BALL: u64 = 1;
const TAG_ALICE_BALL: u64 = 2;
const TAG_MEASUREMENT: u64 = 16;

fn chunk_rng(seed: u64, tag: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 40) | chunk);
    rng
}

fn chunks(rounds: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let n = rounds.div_ceil(CHUNK_ROUNDS);
    (0..n).into_par_iter().map(move |c| {
        let start = c * CHUNK_ROUNDS;
        (c, (rounds - start).min(CHUNK_ROUNDS))
    })
}

fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-12 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

#[derive(Debug, Clone)]
pub struct PreparationConfig<T> {
    /// Frame and state of the player hiding the ball.
    pub frame: ObservableFrame<T>,
    pub state: StateVector<T>,
    pub rounds: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyEstimate {
    pub rounds: u64,
    pub definite_rounds: u64,
    /// `N_a`: definite identifications of atom `a`, in atom order.
    pub counts: Vec<u64>,
    /// `N_a / (N_a + N_a')`, undefined when the pair had no definite round.
    pub estimates: Vec<Option<f64>>,
    pub standard_errors: Vec<Option<f64>>,
    /// Exact Born frequencies the estimates converge to.
    pub born: Vec<f64>,
}

impl FrequencyEstimate {
    pub fn pair_count(&self) -> usize {
        self.counts.len() / 2
    }

    /// Estimate for the first atom of each pair, or the first undefined pair.
    pub fn pair_estimates(&self) -> std::result::Result<Vec<(f64, f64)>, usize> {
        (0..self.pair_count())
            .map(|k| match (self.estimates[k], self.standard_errors[k]) {
                (Some(w), Some(se)) => Ok((w, se)),
                _ => Err(k),
            })
            .collect()
    }
}

fn validate_rounds(rounds: u64) -> Result<()> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    Ok(())
}

/// Born frequencies as `f64` for sampling.
fn profile_f64<T: Scalar>(frame: &ObservableFrame<T>, state: &StateVector<T>) -> Vec<f64> {
    born_profile(frame, state)
        .p
        .iter()
        .map(|x| x.to_f64_lossy().clamp(0.0, 1.0))
        .collect()
}

pub fn simulate_preparation<T: Scalar>(cfg: &PreparationConfig<T>) -> Result<FrequencyEstimate> {
    preparation(cfg, TAG_PREPARATION)
}

fn preparation<T: Scalar>(cfg: &PreparationConfig<T>, tag: u64) -> Result<FrequencyEstimate> {
    validate_rounds(cfg.rounds)?;
    let p = profile_f64(&cfg.frame, &cfg.state);
    let k = p.len() / 2;
    let atoms = 2 * k;
    let counts = chunks(cfg.rounds)
        .map(|(c, len)| {
            let mut rng = chunk_rng(cfg.seed, tag, c);
            let mut n = vec![0u64; atoms];
            for _ in 0..len {
                let pair = rng.gen_range(0..k);
                let ball = if rng.gen::<f64>() < p[pair] { pair } else { pair + k };
                let question = rng.gen_range(0..atoms);
                // Only the opposite vertex forces a "no".
                if ball == (question + k) % atoms {
                    n[ball] += 1;
                }
            }
            n
        })
        .reduce(
            || vec![0u64; atoms],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let definite_rounds = counts.iter().sum();
    let mut estimates = vec![None; atoms];
    let mut standard_errors = vec![None; atoms];
    for a in 0..atoms {
        let total = counts[a] + counts[(a + k) % atoms];
        if total > 0 {
            let w = counts[a] as f64 / total as f64;
            estimates[a] = Some(w);
            standard_errors[a] = Some((w * (1.0 - w) / total as f64).sqrt());
        }
    }
    Ok(FrequencyEstimate {
        rounds: cfg.rounds,
        definite_rounds,
        counts,
        estimates,
        standard_errors,
        born: p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgameReport {
    /// 1-based atoms `(a, a')` of the complement pair.
    pub pair: (usize, usize),
    pub rounds: u64,
    /// Round counts indexed `[alice asks a / a'][bob at a / a']`.
    pub counts: [[u64; 2]; 2],
    pub empirical_payoff: f64,
    pub standard_error: f64,
    /// Expected payoff of this subgame under the frequencies actually played.
    pub expected_payoff: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub rounds_per_subgame: u64,
    pub subgames: Vec<SubgameReport>,
    /// Sum over subgames of the mean payoff per round.
    pub pooled_payoff: f64,
    pub standard_error: f64,
    /// Alice's expected payoff for the exact wave functions.
    pub theoretical_payoff: f64,
    pub z_score: f64,
}

fn check_pair_local<T: Scalar>(g: &GameSpec<T>) -> Result<()> {
    if !g.payoff().is_pair_local() {
        return Err(Error::Shape(
            "payoff pays for a question and a position from different pairs; no classical subgame realizes it".into(),
        ));
    }
    Ok(())
}

/// Measurement stage with explicit per-atom frequencies for both players.
fn measurement<T: Scalar>(
    g: &GameSpec<T>,
    qa: &[f64],
    qb: &[f64],
    rounds: u64,
    seed: u64,
    theoretical: f64,
) -> Result<SimulationReport> {
    check_pair_local(g)?;
    validate_rounds(rounds)?;
    let k = g.pair_count();
    let v = |i: usize, j: usize| g.payoff().get(i, j).to_f64_lossy();
    let mut subgames = Vec::with_capacity(k);
    for pair in 0..k {
        let atoms = [pair, pair + k];
        let counts = chunks(rounds)
            .map(|(c, len)| {
                let mut rng = chunk_rng(seed, TAG_MEASUREMENT + pair as u64, c);
                let mut t = [[0u64; 2]; 2];
                for _ in 0..len {
                    let i = usize::from(rng.gen::<f64>() >= qa[pair]);
                    let j = usize::from(rng.gen::<f64>() >= qb[pair]);
                    t[i][j] += 1;
                }
                t
            })
            .reduce(
                || [[0u64; 2]; 2],
                |mut a, b| {
                    for x in 0..2 {
                        for y in 0..2 {
                            a[x][y] += b[x][y];
                        }
                    }
                    a
                },
            );
        let n = rounds as f64;
        let (mut sum, mut sum_sq, mut expected) = (0.0, 0.0, 0.0);
        let fa = [qa[pair], 1.0 - qa[pair]];
        let fb = [qb[pair], 1.0 - qb[pair]];
        for x in 0..2 {
            for y in 0..2 {
                let pay = v(atoms[x], atoms[y]);
                sum += counts[x][y] as f64 * pay;
                sum_sq += counts[x][y] as f64 * pay * pay;
                expected += fa[x] * fb[y] * pay;
            }
        }
        let mean = sum / n;
        let var = if rounds > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let se = (var / n).sqrt();
        subgames.push(SubgameReport {
            pair: (atoms[0] + 1, atoms[1] + 1),
            rounds,
            counts,
            empirical_payoff: mean,
            standard_error: se,
            expected_payoff: expected,
            z_score: z_score(mean - expected, se),
        });
    }
    let pooled: f64 = subgames.iter().map(|s| s.empirical_payoff).sum();
    let se = subgames.iter().map(|s| s.standard_error.powi(2)).sum::<f64>().sqrt();
    Ok(SimulationReport {
        seed,
        rounds_per_subgame: rounds,
        subgames,
        pooled_payoff: pooled,
        standard_error: se,
        theoretical_payoff: theoretical,
        z_score: z_score(pooled - theoretical, se),
    })
}

pub fn simulate_measurement<T: Scalar>(
    g: &GameSpec<T>,
    phi: &StateVector<T>,
    psi: &StateVector<T>,
    rounds_per_subgame: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let qa = profile_f64(g.frame_a(), phi);
    let qb = profile_f64(g.frame_b(), psi);
    let theoretical = expected_payoff_operator(g, phi, psi).to_f64_lossy();
    measurement(g, &qa, &qb, rounds_per_subgame, seed, theoretical)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStageReport {
    /// Frequencies of Alice's ball, estimated by Bob's questions.
    pub alice_preparation: FrequencyEstimate,
    /// Frequencies of Bob's ball, estimated by Alice's questions.
    pub bob_preparation: FrequencyEstimate,
    /// Measurement stage played with the estimated frequencies.
    pub measurement: SimulationReport,
    /// Expected payoff under the estimated frequencies.
    pub estimated_frequency_payoff: f64,
    /// Expected payoff under the exact Born frequencies.
    pub exact_frequency_payoff: f64,
    /// Payoff uncertainty inherited from the preparation estimates (delta method).
    pub propagated_standard_error: f64,
    /// Measurement and preparation errors combined.
    pub total_standard_error: f64,
    /// `(pooled - exact) / total_standard_error`.
    pub z_score: f64,
}

pub fn run_two_stage<T: Scalar>(
    g: &GameSpec<T>,
    phi: &StateVector<T>,
    psi: &StateVector<T>,
    prep_rounds: u64,
    meas_rounds: u64,
    seed: u64,
) -> Result<TwoStageReport> {
    check_pair_local(g)?;
    // Sequential: Bob hides first, then Alice.
    let bob_preparation = preparation(
        &PreparationConfig {
            frame: g.frame_b().clone(),
            state: *psi,
            rounds: prep_rounds,
            seed,
        },
        TAG_BOB_BALL,
    )?;
    let alice_preparation = preparation(
        &PreparationConfig {
            frame: g.frame_a().clone(),
            state: *phi,
            rounds: prep_rounds,
            seed,
        },
        TAG_ALICE_BALL,
    )?;
    let est_a = alice_preparation
        .pair_estimates()
        .map_err(|pair| Error::UndefinedEstimate { player: "alice", pair: pair + 1 })?;
    let est_b = bob_preparation
        .pair_estimates()
        .map_err(|pair| Error::UndefinedEstimate { player: "bob", pair: pair + 1 })?;

    let k = g.pair_count();
    let expand = |est: &[(f64, f64)]| -> Vec<f64> {
        let mut q: Vec<f64> = est.iter().map(|e| e.0).collect();
        q.extend(est.iter().map(|e| 1.0 - e.0));
        q
    };
    let (qa, qb) = (expand(&est_a), expand(&est_b));
    let exact = expected_payoff_operator(g, phi, psi).to_f64_lossy();
    let meas = measurement(g, &qa, &qb, meas_rounds, seed, exact)?;

    let v = |i: usize, j: usize| g.payoff().get(i, j).to_f64_lossy();
    let mut estimated = 0.0;
    let mut propagated_var = 0.0;
    for pair in 0..k {
        let atoms = [pair, pair + k];
        let fa = [qa[pair], 1.0 - qa[pair]];
        let fb = [qb[pair], 1.0 - qb[pair]];
        let (mut d_alice, mut d_bob) = (0.0, 0.0);
        for x in 0..2 {
            for y in 0..2 {
                estimated += fa[x] * fb[y] * v(atoms[x], atoms[y]);
            }
        }
        for y in 0..2 {
            d_alice += (v(atoms[0], atoms[y]) - v(atoms[1], atoms[y])) * fb[y];
        }
        for x in 0..2 {
            d_bob += (v(atoms[x], atoms[0]) - v(atoms[x], atoms[1])) * fa[x];
        }
        propagated_var += (d_alice * est_a[pair].1).powi(2) + (d_bob * est_b[pair].1).powi(2);
    }
    let propagated = propagated_var.sqrt();
    let total = (propagated_var + meas.standard_error.powi(2)).sqrt();
    Ok(TwoStageReport {
        z_score: z_score(meas.pooled_payoff - exact, total),
        alice_preparation,
        bob_preparation,
        measurement: meas,
        estimated_frequency_payoff: estimated,
        exact_frequency_payoff: exact,
        propagated_standard_error: propagated,
        total_standard_error: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::make_state;
    use crate::payoff::PayoffMatrix;
    use crate::strategy::{frame_fixed_xyz, frame_planar};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

    fn st(a: f64, t: f64) -> StateVector<f64> {
        make_state(a, t).unwrap()
    }

    #[test]
    fn eigenstate_preparation_is_exact() {
        let cfg = PreparationConfig {
            frame: frame_planar(&[0.0, 0.9]).unwrap(),
            state: st(0.0, 0.0),
            rounds: 50_000,
            seed: 7,
        };
        let est = simulate_preparation(&cfg).unwrap();
        assert_eq!(est.estimates[0], Some(1.0));
        assert_eq!(est.estimates[2], Some(0.0));
        assert_eq!(est.counts[2], 0);
    }

    #[test]
    fn definite_fraction_is_one_over_two_k() {
        for (frame, want) in [
            (frame_planar(&[0.0, 0.4]).unwrap(), 0.25),
            (frame_fixed_xyz(), 1.0 / 6.0),
        ] {
            let rounds = 400_000;
            let est = simulate_preparation(&PreparationConfig {
                frame,
                state: st(0.3, 0.8),
                rounds,
                seed: 11,
            })
            .unwrap();
            let frac = est.definite_rounds as f64 / rounds as f64;
            let se = (want * (1.0 - want) / rounds as f64).sqrt();
            assert!((frac - want).abs() < 5.0 * se, "{frac} vs {want}");
        }
    }

    #[test]
    fn estimates_sum_to_one_per_pair() {
        let est = simulate_preparation(&PreparationConfig {
            frame: frame_fixed_xyz(),
            state: st(0.3, 0.8),
            rounds: 10_000,
            seed: 3,
        })
        .unwrap();
        for a in 0..3 {
            assert_eq!(est.estimates[a].unwrap() + est.estimates[a + 3].unwrap(), 1.0);
        }
    }

    #[test]
    fn undefined_pair_is_reported() {
        let est = simulate_preparation(&PreparationConfig {
            frame: frame_fixed_xyz(),
            state: st(0.3, 0.8),
            rounds: 1,
            seed: 3,
        })
        .unwrap();
        assert!(est.estimates.iter().any(Option::is_none));
        assert!(est.pair_estimates().is_err());
    }

    #[test]
    fn zero_rounds_rejected() {
        let cfg = PreparationConfig {
            frame: frame_fixed_xyz(),
            state: st(0.3, 0.8),
            rounds: 0,
            seed: 3,
        };
        assert!(simulate_preparation(&cfg).is_err());
    }

    #[test]
    fn deterministic_measurement_subgame() {
        let g = GameSpec::fixed_xyz(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = simulate_measurement(&g, &st(0.0, 0.0), &st(FRAC_PI_2, 0.0), 1000, 5).unwrap();
        assert_eq!(r.subgames[0].counts, [[0, 1000], [0, 0]]);
        assert_eq!(r.subgames[0].empirical_payoff, 1.0);
        assert_eq!(r.subgames[0].standard_error, 0.0);
        assert!((r.theoretical_payoff - 1.0).abs() < 1e-12);
        assert_eq!(r.z_score, 0.0);
    }

    #[test]
    fn rejects_cross_pair_payoffs() {
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][1] = 1.0;
        let g = GameSpec::new(
            frame_planar(&[0.0, 0.5]).unwrap(),
            frame_planar(&[0.0, 0.5]).unwrap(),
            PayoffMatrix::full(rows).unwrap(),
        )
        .unwrap();
        assert!(simulate_measurement(&g, &st(0.1, 0.0), &st(0.2, 0.0), 10, 1).is_err());
    }

    #[test]
    fn same_seed_same_report() {
        let g = GameSpec::fixed_xyz(&[7.0, 7.0, 0.0, 1.0, 1.0, 0.0]);
        let (phi, psi) = (st(FRAC_PI_8, 0.0), st(FRAC_PI_8, 0.0));
        let a = run_two_stage(&g, &phi, &psi, 200_000, 200_000, 42).unwrap();
        let b = run_two_stage(&g, &phi, &psi, 200_000, 200_000, 42).unwrap();
        assert_eq!(a, b);
        let c = run_two_stage(&g, &phi, &psi, 200_000, 200_000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn small_preparation_widens_interval() {
        let g = GameSpec::fixed_xyz(&[7.0, 7.0, 0.0, 1.0, 1.0, 0.0]);
        let (phi, psi) = (st(FRAC_PI_8, 0.0), st(FRAC_PI_8, 0.0));
        let small = run_two_stage(&g, &phi, &psi, 2_000, 100_000, 9).unwrap();
        let large = run_two_stage(&g, &phi, &psi, 1_000_000, 100_000, 9).unwrap();
        assert!(small.propagated_standard_error > 5.0 * large.propagated_standard_error);
        assert!(small.total_standard_error > small.measurement.standard_error);
    }

    #[test]
    fn two_stage_reports_undefined_estimates() {
        let g = GameSpec::fixed_xyz(&[7.0, 7.0, 0.0, 1.0, 1.0, 0.0]);
        let err = run_two_stage(&g, &st(0.3, 0.0), &st(0.3, 0.0), 1, 10, 1).unwrap_err();
        assert!(matches!(err, Error::UndefinedEstimate { .. }));
    }
}
