use std::fmt::Write as _;
use std::path::Path;

use qgame_core::equilibrium::phased::{find_nash_phased, PhasedEquilibrium};
use qgame_core::equilibrium::{Player, Searcher};
use qgame_core::linalg::make_state;
use qgame_core::payoff::{expected_payoff_closed, expected_payoff_operator, reduce_coefficients};
use qgame_core::simulator::{run_two_stage, TwoStageReport};
use qgame_core::strategy::{
    born_profile, frequency_inequality_reduction, interference_decompose, uncertainty_check,
};
use qgame_core::{
    build_lattice, BlochForm, GameSpec, ReactionCurve, RealGame, ReducedCoefficients, StateVector,
};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::{csv_bytes, emit, json_report, sig6, Format};
use crate::spec_file::{self, LoadedSpec};
use crate::{usage, Command, GameSource, OutputArgs};

pub fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Eval { spec, alice, bob, degrees, output } => eval(&spec, alice, bob, degrees, &output),
        Command::Nash { source, eps, grid, phased, sphere_points, output } => {
            nash(&source, eps, grid, phased.then_some(sphere_points), &output)
        }
        Command::React { source, grid, output } => react(&source, grid, &output),
        Command::Simulate {
            spec,
            alice,
            bob,
            prep_rounds,
            meas_rounds,
            seed,
            workers,
            degrees,
            output,
        } => simulate(
            &spec,
            to_rad(alice, degrees),
            to_rad(bob, degrees),
            [prep_rounds, meas_rounds, seed],
            workers,
            &output,
        ),
        Command::Uncertainty { alpha, theta, degrees, price, output } => {
            let (alpha, theta) = to_rad((alpha, theta), degrees);
            uncertainty(alpha, theta, price, &output)
        }
        Command::Interference { alpha, theta_a, degrees, output } => {
            let (alpha, theta_a) = to_rad((alpha, theta_a), degrees);
            interference(alpha, theta_a, &output)
        }
        Command::Lattice { pairs, output } => lattice(pairs, &output),
    }
}

fn to_rad((a, b): (f64, f64), degrees: bool) -> (f64, f64) {
    if degrees {
        (a.to_radians(), b.to_radians())
    } else {
        (a, b)
    }
}

fn state((alpha, theta): (f64, f64)) -> CliResult<StateVector> {
    Ok(make_state(alpha, theta)?)
}

fn no_csv(command: &str) -> CliError {
    usage(format!("{command} has no CSV output; use --json or --text"))
}

fn deg(x: f64) -> String {
    sig6(x.to_degrees())
}

/// A game read from a file or assembled from reduced coefficients.
struct Game {
    spec: GameSpec,
    sha256: Option<String>,
    coeffs: Option<[f64; 4]>,
}

impl Game {
    fn load(src: &GameSource) -> CliResult<Self> {
        match (&src.spec, src.coeffs) {
            (Some(path), _) => {
                let LoadedSpec { game, sha256 } = spec_file::load(path)?;
                Ok(Game { spec: game, sha256: Some(sha256), coeffs: None })
            }
            (None, Some(c)) => Ok(Game {
                spec: GameSpec::from_reduced(&ReducedCoefficients::new(c[0], c[1], c[2], c[3])),
                sha256: None,
                coeffs: Some(c),
            }),
            (None, None) => Err(usage("one of --spec or --coeffs is required")),
        }
    }

    fn real(&self) -> RealGame {
        self.spec.real_game()
    }

    fn bloch(&self) -> BlochForm {
        self.spec.bloch_form()
    }
}

fn eval(path: &Path, alice: (f64, f64), bob: (f64, f64), degrees: bool, out: &OutputArgs) -> CliResult<()> {
    let LoadedSpec { game, sha256 } = spec_file::load(path)?;
    let (a, b) = (to_rad(alice, degrees), to_rad(bob, degrees));
    let (phi, psi) = (state(a)?, state(b)?);
    let value = expected_payoff_operator(&game, &phi, &psi);
    let closed = expected_payoff_closed(game.payoff(), a.0, a.1, b.0, b.1).ok();
    let reduced = reduce_coefficients(game.payoff()).ok();
    let pa = born_profile(game.frame_a(), &phi).p;
    let pb = born_profile(game.frame_b(), &psi).p;

    let bytes = match out.format_or(Format::Json) {
        Format::Json => json_report(
            "eval",
            Some(&sha256),
            json!({ "alice": [a.0, a.1], "bob": [b.0, b.1] }),
            json!({
                "expected_payoff": value,
                "expected_payoff_closed_form": closed,
                "reduced_coefficients": reduced,
                "alice_frequencies": pa,
                "bob_frequencies": pb,
            }),
        )?,
        Format::Text => {
            let mut s = format!("E_A = {}\n", sig6(value));
            if let Some(c) = closed {
                writeln!(s, "E_A (closed form) = {}", sig6(c)).unwrap();
            }
            let list = |p: &[f64]| p.iter().map(|x| sig6(*x)).collect::<Vec<_>>().join(" ");
            writeln!(s, "alice frequencies: {}", list(&pa)).unwrap();
            writeln!(s, "bob frequencies:   {}", list(&pb)).unwrap();
            s.into_bytes()
        }
        Format::Csv => return Err(no_csv("eval")),
    };
    emit(&bytes, out.out.as_deref())
}

#[derive(Serialize)]
struct NashOutput {
    grid_step: f64,
    eps: f64,
    equilibria: Vec<qgame_core::EquilibriumResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phased_equilibria: Option<Vec<PhasedEquilibrium<f64>>>,
}

fn nash(src: &GameSource, eps: f64, grid: f64, sphere: Option<usize>, out: &OutputArgs) -> CliResult<()> {
    let game = Game::load(src)?;
    let equilibria = Searcher::new(&game.real(), grid)?.find_nash(eps)?;
    let phased = sphere.map(|points| find_nash_phased(&game.bloch(), eps, points));
    let res = NashOutput { grid_step: grid, eps, equilibria, phased_equilibria: phased };

    let bytes = match out.format_or(Format::Json) {
        Format::Json => json_report(
            "nash",
            game.sha256.as_deref(),
            json!({ "coeffs": game.coeffs, "eps": eps, "grid": grid, "sphere_points": sphere }),
            &res,
        )?,
        Format::Csv => csv_bytes(
            &["alpha_star", "beta_star", "value", "kind", "verification"],
            res.equilibria.iter().map(|e| {
                [
                    e.alpha_star.to_string(),
                    e.beta_star.to_string(),
                    e.value.to_string(),
                    json!(e.kind).as_str().unwrap_or_default().to_string(),
                    e.verification.to_string(),
                ]
            }),
        )?,
        Format::Text => {
            let mut s = match res.equilibria.len() {
                0 => "no equilibrium found\n".to_string(),
                1 => "1 equilibrium\n".to_string(),
                n => format!("{n} equilibria\n"),
            };
            for e in &res.equilibria {
                writeln!(
                    s,
                    "alpha* = {} ({} deg), beta* = {} ({} deg), value = {}, kind = {}, verification = {}",
                    sig6(e.alpha_star),
                    deg(e.alpha_star),
                    sig6(e.beta_star),
                    deg(e.beta_star),
                    sig6(e.value),
                    json!(e.kind).as_str().unwrap_or_default(),
                    sig6(e.verification),
                )
                .unwrap();
            }
            if let Some(ph) = &res.phased_equilibria {
                writeln!(s, "{} equilibria with phases", ph.len()).unwrap();
                for e in ph {
                    writeln!(
                        s,
                        "alice = ({}, {}), bob = ({}, {}), value = {}, verification = {}",
                        sig6(e.alpha),
                        sig6(e.theta),
                        sig6(e.beta),
                        sig6(e.omega),
                        sig6(e.value),
                        sig6(e.verification),
                    )
                    .unwrap();
                }
            }
            s.into_bytes()
        }
    };
    emit(&bytes, out.out.as_deref())
}

fn react(src: &GameSource, grid: f64, out: &OutputArgs) -> CliResult<()> {
    let game = Game::load(src)?;
    let searcher = Searcher::new(&game.real(), grid)?;
    let curves: [ReactionCurve; 2] = [
        searcher.reaction_curve(Player::Alice),
        searcher.reaction_curve(Player::Bob),
    ];
    let bytes = match out.format_or(Format::Csv) {
        Format::Csv => csv_bytes(
            &["player", "opponent_angle", "best_response", "payoff"],
            curves.iter().flat_map(|c| {
                c.samples.iter().flat_map(move |s| {
                    s.best_responses.iter().map(move |r| {
                        [
                            c.player.name().to_string(),
                            s.opponent_angle.to_string(),
                            r.to_string(),
                            s.payoff.to_string(),
                        ]
                    })
                })
            }),
        )?,
        Format::Json => json_report(
            "react",
            game.sha256.as_deref(),
            json!({ "coeffs": game.coeffs, "grid": grid }),
            &curves,
        )?,
        Format::Text => {
            let mut s = String::new();
            for c in &curves {
                writeln!(s, "# {} best responses", c.player.name()).unwrap();
                for smp in &c.samples {
                    let br = smp.best_responses.iter().map(|x| sig6(*x)).collect::<Vec<_>>();
                    writeln!(s, "{} -> {} (payoff {})", sig6(smp.opponent_angle), br.join(" "), sig6(smp.payoff))
                        .unwrap();
                }
            }
            s.into_bytes()
        }
    };
    emit(&bytes, out.out.as_deref())
}

fn simulate(
    path: &Path,
    a: (f64, f64),
    b: (f64, f64),
    [prep, meas, seed]: [u64; 3],
    workers: Option<u64>,
    out: &OutputArgs,
) -> CliResult<()> {
    let LoadedSpec { game, sha256 } = spec_file::load(path)?;
    let (phi, psi) = (state(a)?, state(b)?);
    let go = || run_two_stage(&game, &phi, &psi, prep, meas, seed);
    let report: TwoStageReport = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(|e| usage(format!("cannot start {n} workers: {e}")))?
            .install(go)?,
        None => go()?,
    };

    let bytes = match out.format_or(Format::Json) {
        // Worker count is deliberately absent: it must not change the report.
        Format::Json => json_report(
            "simulate",
            Some(&sha256),
            json!({
                "alice": [a.0, a.1], "bob": [b.0, b.1],
                "prep_rounds": prep, "meas_rounds": meas, "seed": seed,
            }),
            &report,
        )?,
        Format::Csv => {
            let m = &report.measurement;
            let mut rows: Vec<[String; 11]> = m
                .subgames
                .iter()
                .map(|s| {
                    [
                        format!("{}-{}", s.pair.0, s.pair.1),
                        s.rounds.to_string(),
                        s.counts[0][0].to_string(),
                        s.counts[0][1].to_string(),
                        s.counts[1][0].to_string(),
                        s.counts[1][1].to_string(),
                        s.empirical_payoff.to_string(),
                        s.standard_error.to_string(),
                        s.expected_payoff.to_string(),
                        s.z_score.to_string(),
                        String::new(),
                    ]
                })
                .collect();
            let blank = String::new;
            rows.push([
                "pooled".into(),
                m.rounds_per_subgame.to_string(),
                blank(),
                blank(),
                blank(),
                blank(),
                m.pooled_payoff.to_string(),
                report.total_standard_error.to_string(),
                report.exact_frequency_payoff.to_string(),
                report.z_score.to_string(),
                report.estimated_frequency_payoff.to_string(),
            ]);
            csv_bytes(
                &[
                    "subgame",
                    "rounds",
                    "n_aa",
                    "n_ab",
                    "n_ba",
                    "n_bb",
                    "empirical_payoff",
                    "standard_error",
                    "expected_payoff",
                    "z_score",
                    "estimated_frequency_payoff",
                ],
                rows,
            )?
        }
        Format::Text => {
            let m = &report.measurement;
            let mut s = format!("seed {seed}, {prep} preparation rounds, {meas} rounds per subgame\n");
            for (who, est) in [("alice", &report.alice_preparation), ("bob", &report.bob_preparation)] {
                let k = est.pair_count();
                for a in 0..k {
                    let w = est.estimates[a].unwrap_or(f64::NAN);
                    let se = est.standard_errors[a].unwrap_or(f64::NAN);
                    writeln!(
                        s,
                        "{who} p{} = {} +- {} (born {})",
                        a + 1,
                        sig6(w),
                        sig6(se),
                        sig6(est.born[a])
                    )
                    .unwrap();
                }
            }
            for sg in &m.subgames {
                writeln!(
                    s,
                    "subgame {}-{}: {} +- {} (expected {})",
                    sg.pair.0,
                    sg.pair.1,
                    sig6(sg.empirical_payoff),
                    sig6(sg.standard_error),
                    sig6(sg.expected_payoff)
                )
                .unwrap();
            }
            writeln!(
                s,
                "pooled payoff {} +- {} vs exact {} (z = {})",
                sig6(m.pooled_payoff),
                sig6(report.total_standard_error),
                sig6(report.exact_frequency_payoff),
                sig6(report.z_score)
            )
            .unwrap();
            s.into_bytes()
        }
    };
    emit(&bytes, out.out.as_deref())
}

fn uncertainty(alpha: f64, theta: f64, price: Option<f64>, out: &OutputArgs) -> CliResult<()> {
    if let Some(p) = price {
        if !p.is_finite() {
            return Err(usage("--price must be finite"));
        }
    }
    let s = state((alpha, theta))?;
    let r = uncertainty_check(&s);
    let reduction = frequency_inequality_reduction(&s);
    let margin = r.margin();
    let equality = margin.abs() <= 1e-12;
    let scaled = price.map(|p| r.scaled(p));
    let bytes = match out.format_or(Format::Json) {
        Format::Json => json_report(
            "uncertainty",
            None,
            json!({ "alpha": alpha, "theta": theta, "price": price }),
            json!({
                "relation": r,
                "margin": margin,
                "equality": equality,
                "frequency_form": reduction,
                "scaled": scaled.map(|(l, r)| json!({ "lhs": l, "rhs": r })),
            }),
        )?,
        Format::Text => {
            let mut s = format!(
                "D(A1)*D(A2) = {} >= E(A3)^2 = {}: {}{}\n",
                sig6(r.lhs),
                sig6(r.rhs),
                if r.holds { "holds" } else { "VIOLATED" },
                if equality { " (equality)" } else { "" }
            );
            writeln!(s, "frequency form: {} >= {}", sig6(r.freq_lhs), sig6(r.freq_rhs)).unwrap();
            if let Some((l, rr)) = scaled {
                writeln!(s, "scaled by price: {} >= {}", sig6(l), sig6(rr)).unwrap();
            }
            s.into_bytes()
        }
        Format::Csv => return Err(no_csv("uncertainty")),
    };
    emit(&bytes, out.out.as_deref())
}

fn interference(alpha: f64, theta_a: f64, out: &OutputArgs) -> CliResult<()> {
    let r = interference_decompose(alpha, theta_a)?;
    let bytes = match out.format_or(Format::Json) {
        Format::Json => json_report(
            "interference",
            None,
            json!({ "alpha": alpha, "theta_a": theta_a }),
            json!({ "decomposition": r, "cross_term": r.cross_term(), "residual": r.residual() }),
        )?,
        Format::Text => format!(
            "p1 = {}, p3 = {}\np2 = {} = mixture + {} (residual {})\np4 = {} = mixture - {} (residual {})\n",
            sig6(r.p1),
            sig6(r.p3),
            sig6(r.p2_direct),
            sig6(r.cross_term()),
            sig6(r.p2_residual),
            sig6(r.p4_direct),
            sig6(r.cross_term()),
            sig6(r.p4_residual),
        )
        .into_bytes(),
        Format::Csv => return Err(no_csv("interference")),
    };
    emit(&bytes, out.out.as_deref())
}

fn lattice(pairs: usize, out: &OutputArgs) -> CliResult<()> {
    let l = build_lattice(pairs)?;
    let violations: Vec<[String; 3]> = l
        .check_distributivity()
        .into_iter()
        .map(|(x, y, z)| [x.to_string(), y.to_string(), z.to_string()])
        .collect();
    let blocks: Vec<_> = l
        .boolean_blocks()
        .into_iter()
        .map(|b| {
            let v = l.distributivity_violations_within(&b.elements()).len();
            json!({ "atom": b.atom, "complement": b.complement, "violations": v })
        })
        .collect();
    let bytes = match out.format_or(Format::Json) {
        Format::Json => json_report(
            "lattice",
            None,
            json!({ "pairs": pairs }),
            json!({
                "atoms": l.atom_count(),
                "violation_count": violations.len(),
                "violations": violations,
                "boolean_blocks": blocks,
            }),
        )?,
        Format::Csv => csv_bytes(&["x", "y", "z"], violations)?,
        Format::Text => {
            let mut s = format!(
                "{} atoms; {} triples (x, y, z) with x ^ (y v z) != (x ^ y) v (x ^ z):\n",
                l.atom_count(),
                violations.len()
            );
            for [x, y, z] in &violations {
                writeln!(s, "({x}, {y}, {z})").unwrap();
            }
            for b in &blocks {
                writeln!(
                    s,
                    "block {{O, {}, {}, I}}: {} violations",
                    b["atom"], b["complement"], b["violations"]
                )
                .unwrap();
            }
            s.into_bytes()
        }
    };
    emit(&bytes, out.out.as_deref())
}
