//! Best-response reaction curves and saddle-point (Nash) search over real
//! strategies `alpha, beta in [0, pi)` with zero phases. Alice maximizes her
//! payoff, Bob minimizes it.
//!
//! Best responses come from a grid scan refined by golden-section search.
//! Equilibrium candidates are where the composed reaction map `BR_B(BR_A(beta))`
//! crosses the diagonal; each candidate is polished by Newton iteration on the
//! gradient and then certified against unilateral deviations on a fine grid.

pub mod phased;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::{RealGame, RealStrategyGame};
use crate::scalar::{circular_diff, wrap, Scalar};

pub const DEFAULT_GRID_STEP: f64 = 1e-3;
pub const DEFAULT_EPS: f64 = 1e-6;
/// Relative tolerance for treating two optima as tied.
pub const TIE_TOL: f64 = 1e-9;
/// Width to which golden-section refinement narrows a bracket.
pub const REFINE_TOL: f64 = 1e-10;
/// Step of the deviation grid used by the equilibrium certificate.
pub const CERTIFICATE_STEP: f64 = 1e-4;

const MAX_CANDIDATES: usize = 20_000;
/// Average best-response set size above which a game counts as degenerate.
const MAX_RESPONSES_PER_POINT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    pub fn name(self) -> &'static str {
        match self {
            Player::Alice => "alice",
            Player::Bob => "bob",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReactionSample<T> {
    pub opponent_angle: T,
    pub best_responses: Vec<T>,
    pub payoff: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReactionCurve<T> {
    pub player: Player,
    pub grid_step: T,
    pub samples: Vec<ReactionSample<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    InteriorSaddle,
    /// At least one player sits on an eigenstate of the first observable
    /// (`sin 2x = 0`), the edge of the real-amplitude strategy range.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult<T> {
    pub alpha_star: T,
    pub beta_star: T,
    pub value: T,
    pub kind: EquilibriumKind,
    /// Largest unilateral improvement found by either player.
    pub verification: T,
}

/// Uniform grid `x_i = i * step`, `i < ceil(pi / step)`, with cached features.
#[derive(Debug, Clone)]
pub struct AngleGrid<T> {
    step: T,
    points: Vec<T>,
    features: Vec<[T; 3]>,
}

impl<T: Scalar> AngleGrid<T> {
    pub fn new(step: T) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() || step > T::PI() {
            return Err(Error::InvalidArgument(format!("grid step must be in (0, pi], got {step}")));
        }
        let n = (T::PI() / step).ceil().to_usize().unwrap_or(0).max(1);
        let points: Vec<T> = (0..n).map(|i| T::from_usize(i).unwrap() * step).collect();
        let features = points.iter().map(|&x| RealGame::features(x)).collect();
        Ok(AngleGrid { step, points, features })
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[inline]
fn dot3<T: Scalar>(u: &[T; 3], w: &[T; 3]) -> T {
    u[0] * w[0] + u[1] * w[1] + u[2] * w[2]
}

/// Maximizes `f` on `[lo, hi]` by golden-section search down to width `tol`.
pub fn golden_section_max<T: Scalar>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, tol: T) -> T {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// Optimizers of `x -> dot(u(x), weights)` over `[0, pi)`, as angles and the
/// optimal value. `sense` is `+1` to maximize and `-1` to minimize.
fn optimize_on_grid<T: Scalar>(grid: &AngleGrid<T>, weights: &[T; 3], sense: T, tie_tol: T) -> (Vec<T>, T) {
    let n = grid.len();
    let f = |x: T| sense * dot3(&RealGame::features(x), weights);
    let vals: Vec<T> = grid.features.iter().map(|u| sense * dot3(u, weights)).collect();
    let (lo, hi) = vals
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(l, u), &v| (l.min(v), u.max(v)));
    if hi - lo <= tie_tol {
        // Indifferent: every angle is optimal.
        return (grid.points.clone(), sense * hi);
    }
    let h = grid.step;
    let mut refined: Vec<(T, T)> = Vec::new();
    for i in 0..n {
        let (prev, next) = (vals[(i + n - 1) % n], vals[(i + 1) % n]);
        if vals[i] < prev || vals[i] < next {
            continue;
        }
        let x = grid.points[i];
        let xr = golden_section_max(f, x - h, x + h, T::lit(REFINE_TOL));
        let fr = f(xr);
        if fr > vals[i] {
            refined.push((wrap(xr, T::PI()), fr));
        } else {
            refined.push((x, vals[i]));
        }
    }
    let best = refined.iter().fold(T::neg_infinity(), |m, &(_, v)| m.max(v));
    let mut keep: Vec<T> = refined
        .into_iter()
        .filter(|&(_, v)| v >= best - tie_tol)
        .map(|(x, _)| x)
        .collect();
    keep.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min_sep = T::lit(1e-8);
    let mut out: Vec<T> = Vec::with_capacity(keep.len());
    for x in keep {
        if out.last().is_none_or(|&y| circular_diff(x, y, T::PI()).abs() > min_sep) {
            out.push(x);
        }
    }
    if out.len() > 1 && circular_diff(out[0], *out.last().unwrap(), T::PI()).abs() <= min_sep {
        out.pop();
    }
    (out, sense * best)
}

fn tie_tolerance<T: Scalar>(game: &RealGame<T>) -> T {
    T::lit(TIE_TOL) * game.scale.max(T::one())
}

/// Reusable search state for one real game and grid.
#[derive(Debug, Clone)]
pub struct Searcher<T> {
    game: RealGame<T>,
    grid: AngleGrid<T>,
    tie_tol: T,
}

impl<T: Scalar> Searcher<T> {
    pub fn new(game: &impl RealStrategyGame<T>, grid_step: T) -> Result<Self> {
        let game = game.real_game();
        Ok(Searcher {
            tie_tol: tie_tolerance(&game),
            grid: AngleGrid::new(grid_step)?,
            game,
        })
    }

    pub fn game(&self) -> &RealGame<T> {
        &self.game
    }

    pub fn grid(&self) -> &AngleGrid<T> {
        &self.grid
    }

    /// Alice's maximizers against `beta`, with the payoff attained.
    pub fn alice(&self, beta: T) -> (Vec<T>, T) {
        optimize_on_grid(&self.grid, &self.game.alice_weights(beta), T::one(), self.tie_tol)
    }

    /// Bob's minimizers against `alpha`, with the payoff attained.
    pub fn bob(&self, alpha: T) -> (Vec<T>, T) {
        optimize_on_grid(&self.grid, &self.game.bob_weights(alpha), -T::one(), self.tie_tol)
    }

    pub fn reaction_curve(&self, player: Player) -> ReactionCurve<T> {
        let samples = self
            .grid
            .points
            .par_iter()
            .map(|&x| {
                let (best_responses, payoff) = match player {
                    Player::Alice => self.alice(x),
                    Player::Bob => self.bob(x),
                };
                ReactionSample {
                    opponent_angle: x,
                    best_responses,
                    payoff,
                }
            })
            .collect();
        ReactionCurve {
            player,
            grid_step: self.grid.step,
            samples,
        }
    }

    /// Equilibria certified to `eps`.
    pub fn find_nash(&self, eps: T) -> Result<Vec<EquilibriumResult<T>>> {
        if !(eps > T::zero()) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let pi = T::PI();
        let h = self.grid.step;
        let match_tol = T::lit(2.0) * h;

        let alice_br: Vec<Vec<T>> = self.grid.points.par_iter().map(|&b| self.alice(b).0).collect();
        let bob_br: Vec<Vec<T>> = self.grid.points.par_iter().map(|&a| self.bob(a).0).collect();
        let limit = MAX_RESPONSES_PER_POINT * self.grid.len();
        for (who, brs) in [("alice", &alice_br), ("bob", &bob_br)] {
            let total: usize = brs.iter().map(Vec::len).sum();
            if total > limit {
                return Err(Error::Degenerate(format!(
                    "{who} is indifferent almost everywhere ({total} best responses on {} grid angles)",
                    self.grid.len()
                )));
            }
        }

        // For every opponent grid angle: (own response, composed response, gap).
        let compose = |own_brs: &[Vec<T>], responder: &(dyn Fn(T) -> Vec<T> + Sync)| -> Vec<Vec<(T, T, T)>> {
            own_brs
                .par_iter()
                .zip(self.grid.points.par_iter())
                .map(|(brs, &x)| {
                    let mut rows = Vec::new();
                    for &own in brs {
                        for back in responder(own) {
                            rows.push((own, back, circular_diff(back, x, pi)));
                        }
                    }
                    rows
                })
                .collect()
        };
        let alice_side = compose(&alice_br, &|a| self.bob(a).0);
        let bob_side = compose(&bob_br, &|b| self.alice(b).0);

        let mut starts: Vec<(T, T)> = Vec::new();
        collect_starts(&self.grid, &alice_side, match_tol, |own, opp| (own, opp), &mut starts);
        collect_starts(&self.grid, &bob_side, match_tol, |own, opp| (opp, own), &mut starts);
        if starts.len() > MAX_CANDIDATES {
            return Err(Error::Degenerate(format!(
                "{} equilibrium candidates; best responses are not isolated",
                starts.len()
            )));
        }

        let certified: Vec<Option<EquilibriumResult<T>>> = starts
            .par_iter()
            .map(|&(a0, b0)| {
                let (a, b) = newton_polish(&self.game, a0, b0, T::lit(0.05).max(T::lit(10.0) * h))
                    .unwrap_or((a0, b0));
                let verification = certify(&self.game, a, b);
                (verification <= eps).then(|| EquilibriumResult {
                    alpha_star: a,
                    beta_star: b,
                    value: self.game.value(a, b),
                    kind: classify(a, b),
                    verification,
                })
            })
            .collect();

        let mut found: Vec<EquilibriumResult<T>> = Vec::new();
        for r in certified.into_iter().flatten() {
            let dup = found.iter_mut().find(|e| {
                circular_diff(e.alpha_star, r.alpha_star, pi).abs() <= match_tol
                    && circular_diff(e.beta_star, r.beta_star, pi).abs() <= match_tol
            });
            match dup {
                Some(e) if r.verification < e.verification => *e = r,
                Some(_) => {}
                None => found.push(r),
            }
        }
        found.sort_by(|x, y| {
            (x.alpha_star, x.beta_star)
                .partial_cmp(&(y.alpha_star, y.beta_star))
                .unwrap()
        });
        Ok(found)
    }
}

/// Start points from one side's composed-response table: direct matches
/// within `match_tol`, plus sign changes of the gap between neighbouring grid
/// angles along a continuous branch.
fn collect_starts<T: Scalar>(
    grid: &AngleGrid<T>,
    table: &[Vec<(T, T, T)>],
    match_tol: T,
    orient: impl Fn(T, T) -> (T, T),
    out: &mut Vec<(T, T)>,
) {
    let pi = T::PI();
    let n = table.len();
    let jump = T::lit(0.25);
    let half = T::lit(0.5);
    for j in 0..n {
        let x = grid.points[j];
        for &(own, _, gap) in &table[j] {
            if gap.abs() <= match_tol {
                out.push(orient(own, x));
            }
        }
        let k = (j + 1) % n;
        let xn = x + grid.step;
        for &(own, _, gap) in &table[j] {
            for &(own_n, _, gap_n) in &table[k] {
                let continuous = circular_diff(own_n, own, pi).abs() <= jump;
                let crosses = (gap < T::zero()) != (gap_n < T::zero());
                if continuous && crosses && gap.abs() < jump && gap_n.abs() < jump {
                    let mid_own = wrap(own + half * circular_diff(own_n, own, pi), pi);
                    out.push(orient(mid_own, wrap(half * (x + xn), pi)));
                }
            }
        }
    }
}

/// Newton iteration on the gradient; `None` if it leaves the `radius`
/// neighbourhood or fails to converge.
fn newton_polish<T: Scalar>(game: &RealGame<T>, a0: T, b0: T, radius: T) -> Option<(T, T)> {
    let pi = T::PI();
    let (mut a, mut b) = (a0, b0);
    for _ in 0..60 {
        let g = game.gradient(a, b);
        let hs = game.hessian(a, b);
        let det = hs[0][0] * hs[1][1] - hs[0][1] * hs[1][0];
        if det.abs() <= T::epsilon() * (T::one() + game.scale * game.scale) {
            return None;
        }
        let da = (hs[1][1] * g[0] - hs[0][1] * g[1]) / det;
        let db = (hs[0][0] * g[1] - hs[1][0] * g[0]) / det;
        a = a - da;
        b = b - db;
        if circular_diff(a, a0, pi).abs() > radius || circular_diff(b, b0, pi).abs() > radius {
            return None;
        }
        if da.abs().max(db.abs()) <= T::lit(1e-14) {
            return Some((wrap(a, pi), wrap(b, pi)));
        }
    }
    let g = game.gradient(a, b);
    (g[0].abs().max(g[1].abs()) <= T::lit(1e-9) * (T::one() + game.scale)).then(|| (wrap(a, pi), wrap(b, pi)))
}

/// Largest unilateral gain over a fine deviation grid (refined locally).
pub fn certify<T: Scalar>(game: &RealGame<T>, alpha: T, beta: T) -> T {
    let value = game.value(alpha, beta);
    let sup_alice = deviation_extreme(&game.alice_weights(beta), T::one());
    let inf_bob = deviation_extreme(&game.bob_weights(alpha), -T::one());
    (sup_alice - value).max(value - inf_bob).max(T::zero())
}

/// `sense * max_x sense * dot(u(x), w)` by a scan with step
/// [`CERTIFICATE_STEP`] and golden refinement around the best scan point.
fn deviation_extreme<T: Scalar>(weights: &[T; 3], sense: T) -> T {
    let step = T::lit(CERTIFICATE_STEP);
    let n = (T::PI() / step).ceil().to_usize().unwrap_or(1);
    let f = |x: T| sense * dot3(&RealGame::features(x), weights);
    let (mut best_x, mut best) = (T::zero(), T::neg_infinity());
    for i in 0..n {
        let x = T::from_usize(i).unwrap() * step;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let xr = golden_section_max(f, best_x - step, best_x + step, T::lit(REFINE_TOL));
    sense * best.max(f(xr))
}

fn classify<T: Scalar>(alpha: T, beta: T) -> EquilibriumKind {
    let edge = |x: T| (T::lit(2.0) * x).sin().abs() <= T::lit(1e-9);
    if edge(alpha) || edge(beta) {
        EquilibriumKind::Boundary
    } else {
        EquilibriumKind::InteriorSaddle
    }
}

pub fn best_response_alice<T: Scalar>(g: &impl RealStrategyGame<T>, beta: T, grid_step: T) -> Result<Vec<T>> {
    Ok(Searcher::new(g, grid_step)?.alice(beta).0)
}

pub fn best_response_bob<T: Scalar>(g: &impl RealStrategyGame<T>, alpha: T, grid_step: T) -> Result<Vec<T>> {
    Ok(Searcher::new(g, grid_step)?.bob(alpha).0)
}

pub fn reaction_curves<T: Scalar>(
    g: &impl RealStrategyGame<T>,
    grid_step: T,
) -> Result<(ReactionCurve<T>, ReactionCurve<T>)> {
    let s = Searcher::new(g, grid_step)?;
    Ok((s.reaction_curve(Player::Alice), s.reaction_curve(Player::Bob)))
}

pub fn find_nash<T: Scalar>(g: &impl RealStrategyGame<T>, eps: T, grid_step: T) -> Result<Vec<EquilibriumResult<T>>> {
    Searcher::new(g, grid_step)?.find_nash(eps)
}
