//! Command implementations.
//!
//! Every command distinguishes three endings: verified/done (exit 0), a
//! numerical check that came out false (exit 1), and invalid input
//! (exit 2, reported through `Err`).

use std::path::Path;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde_json::json;

use causalview::{
    check_nosignalling, polarizer_scenario, random_cptp, random_density, random_povm,
    CausalScenario, Error as CoreError, RngSpec, Subsystem, TripartiteCausalScenario,
};
use rand::Rng;

use crate::output::{print_machine, render_table, render_table3, table3_json, table_json, Format};
use crate::schema::{load_scenario_with_tol, save_scenario, Scenario};

/// How a command ended, short of invalid input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Everything checked out: exit 0.
    Pass,
    /// A numerical check failed or a numeric precondition was unmet: exit 1.
    Fail,
}

/// Which observer's table(s) `table` should print.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum View {
    Causal,
    Spacelike,
    Both,
}

/// Conversion direction for `convert`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Direction {
    ToSpacelike,
    ToCausal,
}

/// Maps a rank-deficiency error (a numeric precondition, not a malformed
/// file) onto exit 1 instead of the usual exit 2.
fn rank_deficiency_to_outcome(err: CoreError) -> Result<Outcome> {
    match err {
        CoreError::RankDeficient {
            min_eigenvalue,
            threshold,
        } => {
            eprintln!(
                "cannot reinterpret this shared state causally: the A marginal must be full \
                 rank to define the preparation (minimum eigenvalue {min_eigenvalue:.3e}, \
                 threshold {threshold:.0e})"
            );
            Ok(Outcome::Fail)
        }
        other => Err(other.into()),
    }
}

pub fn cmd_table(file: &Path, view: View, validate_tol: f64, format: Format) -> Result<Outcome> {
    let scenario = load_scenario_with_tol(file, validate_tol)?;
    let mut views = Vec::new();
    let mut gap = None;

    match &scenario {
        Scenario::Causal(s) => match view {
            View::Causal => views.push(("causal", Table::Two(s.joint_distribution()))),
            View::Spacelike => views.push((
                "spacelike",
                Table::Two(s.to_spacelike().joint_distribution()),
            )),
            View::Both => {
                let report = s.equivalence_report();
                gap = Some(report.max_abs_gap);
                views.push(("causal", Table::Two(report.causal)));
                views.push(("spacelike", Table::Two(report.spacelike)));
            }
        },
        Scenario::Spacelike(s) => match view {
            View::Spacelike => views.push(("spacelike", Table::Two(s.joint_distribution()))),
            View::Causal | View::Both => {
                let causal = match s.to_causal() {
                    Ok(c) => c,
                    Err(e) => return rank_deficiency_to_outcome(e),
                };
                if view == View::Both {
                    let spacelike = s.joint_distribution();
                    let causal_jd = causal.joint_distribution();
                    gap = Some(spacelike.max_abs_gap(&causal_jd)?);
                    views.push(("causal", Table::Two(causal_jd)));
                    views.push(("spacelike", Table::Two(spacelike)));
                } else {
                    views.push(("causal", Table::Two(causal.joint_distribution())));
                }
            }
        },
        Scenario::TripartiteCausal(s) => match view {
            View::Causal => views.push(("causal", Table::Three(s.joint_distribution()))),
            View::Spacelike => views.push((
                "spacelike",
                Table::Three(s.to_spacelike().joint_distribution()),
            )),
            View::Both => {
                let report = s.equivalence_report();
                gap = Some(report.max_abs_gap);
                views.push(("causal", Table::Three(report.causal)));
                views.push(("spacelike", Table::Three(report.spacelike)));
            }
        },
        Scenario::TripartiteSpacelike(s) => match view {
            View::Spacelike => views.push(("spacelike", Table::Three(s.joint_distribution()))),
            View::Causal | View::Both => {
                bail!("a tripartite spacelike file has no causal reinterpretation; use --view spacelike")
            }
        },
    }

    match format {
        Format::Human => {
            for (name, table) in &views {
                match table {
                    Table::Two(jd) => {
                        print!("{}", render_table(&format!("p(a, b) — {name} view"), jd))
                    }
                    Table::Three(jd) => {
                        print!(
                            "{}",
                            render_table3(&format!("p(a, b, c) — {name} view"), jd)
                        )
                    }
                }
                println!();
            }
            if let Some(g) = gap {
                println!("max gap between views: {g:.3e}");
            }
        }
        Format::Machine => {
            let tables: Vec<_> = views
                .iter()
                .map(|(name, table)| match table {
                    Table::Two(jd) => table_json(name, jd),
                    Table::Three(jd) => table3_json(name, jd),
                })
                .collect();
            print_machine(&json!({
                "command": "table",
                "kind": scenario.kind(),
                "tables": tables,
                "max_gap": gap,
            }));
        }
    }
    Ok(Outcome::Pass)
}

enum Table {
    Two(causalview::JointDistribution),
    Three(causalview::JointDistribution3),
}

pub fn cmd_convert(
    file: &Path,
    direction: Direction,
    out: &Path,
    validate_tol: f64,
    format: Format,
) -> Result<Outcome> {
    let scenario = load_scenario_with_tol(file, validate_tol)?;
    let converted = match (&scenario, direction) {
        (Scenario::Causal(s), Direction::ToSpacelike) => Scenario::Spacelike(s.to_spacelike()),
        (Scenario::Spacelike(s), Direction::ToCausal) => match s.to_causal() {
            Ok(c) => Scenario::Causal(c),
            Err(e) => return rank_deficiency_to_outcome(e),
        },
        (Scenario::TripartiteCausal(s), Direction::ToSpacelike) => {
            Scenario::TripartiteSpacelike(s.to_spacelike())
        }
        (Scenario::TripartiteSpacelike(_), Direction::ToCausal) => {
            bail!("no causal reinterpretation is defined for tripartite spacelike scenarios")
        }
        (s, d) => bail!(
            "cannot convert a {} file {}",
            s.kind(),
            match d {
                Direction::ToSpacelike => "to the spacelike view",
                Direction::ToCausal => "to the causal view",
            }
        ),
    };
    save_scenario(out, &converted)?;
    match format {
        Format::Human => println!("wrote {} scenario to {}", converted.kind(), out.display()),
        Format::Machine => print_machine(&json!({
            "command": "convert",
            "from": scenario.kind(),
            "to": converted.kind(),
            "out": out.display().to_string(),
        })),
    }
    Ok(Outcome::Pass)
}

pub fn cmd_verify(file: &Path, tol: f64, validate_tol: f64, format: Format) -> Result<Outcome> {
    let scenario = load_scenario_with_tol(file, validate_tol)?;
    let (equivalence_gap, route_gap) = match &scenario {
        Scenario::Causal(s) => {
            let report = s.equivalence_report();
            let route = report
                .causal
                .max_abs_gap(&s.joint_distribution_ensemble())
                .expect("same labels");
            (report.max_abs_gap, route)
        }
        Scenario::TripartiteCausal(s) => {
            let report = s.equivalence_report();
            let route = report
                .causal
                .max_abs_gap(&s.joint_distribution_ensemble())
                .expect("same labels");
            (report.max_abs_gap, route)
        }
        other => bail!(
            "verify needs a causal or tripartite_causal file, got {}",
            other.kind()
        ),
    };
    let pass = equivalence_gap < tol && route_gap < tol;
    match format {
        Format::Human => {
            println!("observer equivalence: max gap {equivalence_gap:.3e} (tolerance {tol:.1e})");
            println!("route agreement:      max gap {route_gap:.3e} (tolerance {tol:.1e})");
            println!("{}", if pass { "verified" } else { "FAILED" });
        }
        Format::Machine => print_machine(&json!({
            "command": "verify",
            "kind": scenario.kind(),
            "equivalence_gap": equivalence_gap,
            "route_gap": route_gap,
            "tol": tol,
            "pass": pass,
        })),
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_nosignal(
    file: &Path,
    extra_povms: usize,
    seed: u64,
    stream: u64,
    tol: f64,
    validate_tol: f64,
    format: Format,
) -> Result<Outcome> {
    let scenario = load_scenario_with_tol(file, validate_tol)?;
    let Scenario::Spacelike(s) = &scenario else {
        bail!("nosignal needs a spacelike file, got {}", scenario.kind());
    };
    let shape = s.shape();
    let mut rng = RngSpec::new(seed, stream).rng();
    let mut povms_a = vec![s.povm_a().clone()];
    let mut povms_b = vec![s.povm_b().clone()];
    for _ in 0..extra_povms {
        let n_a = rng.gen_range(2..=shape.dim_a + 2);
        povms_a.push(random_povm(shape.dim_a, n_a, &mut rng)?);
        let n_b = rng.gen_range(2..=shape.dim_b + 2);
        povms_b.push(random_povm(shape.dim_b, n_b, &mut rng)?);
    }
    let report = check_nosignalling(s.tau(), shape, &povms_a, &povms_b, tol)?;
    match format {
        Format::Human => {
            println!(
                "no-signalling check: {} declared + {extra_povms} random POVMs per side, seed {seed}",
                1
            );
            println!("  A→B marginal deviation: {:.3e}", report.direction_a_to_b);
            println!("  B→A marginal deviation: {:.3e}", report.direction_b_to_a);
            println!("  POVM pairs tested: {}", report.povm_pairs_tested);
            println!(
                "  tolerance {:.1e}: {}",
                tol,
                if report.pass { "pass" } else { "FAIL" }
            );
        }
        Format::Machine => print_machine(&json!({
            "command": "nosignal",
            "direction_a_to_b": report.direction_a_to_b,
            "direction_b_to_a": report.direction_b_to_a,
            "povm_pairs_tested": report.povm_pairs_tested,
            "extra_povms": extra_povms,
            "seed": seed,
            "tol": tol,
            "pass": report.pass,
        })),
    }
    Ok(if report.pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

pub fn cmd_demo_polarizer(alpha: f64, beta: f64, p: f64, format: Format) -> Result<Outcome> {
    let scenario = polarizer_scenario(alpha, beta, p)?;
    let report = scenario.equivalence_report();
    let analytic = p * (beta - alpha).sin().powi(2);
    let causal_rt = report.causal.p_by_label("r", "t").expect("labels fixed");
    let spacelike_rt = report.spacelike.p_by_label("r", "t").expect("labels fixed");
    let pass = report.max_abs_gap < 1e-10
        && (causal_rt - analytic).abs() < 1e-10
        && (spacelike_rt - analytic).abs() < 1e-10;
    match format {
        Format::Human => {
            println!("polarizers at α = {alpha:.6} rad, β = {beta:.6} rad, mixing weight p = {p}");
            println!();
            print!(
                "{}",
                render_table("observer 1 — photon travels from A to B", &report.causal)
            );
            println!();
            print!(
                "{}",
                render_table(
                    "observer 2 — entangled pair measured at A and B",
                    &report.spacelike
                )
            );
            println!();
            println!("p(a=r, b=t) analytic p·sin²(β−α) = {analytic:.6}");
            println!("             observer 1          = {causal_rt:.6}");
            println!("             observer 2          = {spacelike_rt:.6}");
            println!("max gap between views: {:.3e}", report.max_abs_gap);
        }
        Format::Machine => print_machine(&json!({
            "command": "demo_polarizer",
            "alpha": alpha,
            "beta": beta,
            "p": p,
            "analytic_rt": analytic,
            "causal": table_json("causal", &report.causal),
            "spacelike": table_json("spacelike", &report.spacelike),
            "max_gap": report.max_abs_gap,
            "pass": pass,
        })),
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

/// Worst-case gaps over one randomized trial.
struct TrialResult {
    equivalence_gap: f64,
    route_gap: f64,
    state_defect: f64,
}

fn bipartite_trial(seed: u64, stream: u64, dims: &[usize]) -> TrialResult {
    let mut rng = RngSpec::new(seed, stream).rng();
    let d_a = dims[rng.gen_range(0..dims.len())];
    let d_b = dims[rng.gen_range(0..dims.len())];
    let rho = random_density(d_a, 1e-3, &mut rng).expect("valid ridge");
    let k_min = d_a.div_ceil(d_b).max(1);
    let channel = random_cptp(d_a, d_b, rng.gen_range(k_min..=k_min.max(4)), &mut rng)
        .expect("feasible isometry");
    let povm_a = random_povm(d_a, rng.gen_range(2..=5), &mut rng).expect("valid POVM");
    let povm_b = random_povm(d_b, rng.gen_range(2..=5), &mut rng).expect("valid POVM");
    let s = CausalScenario::new(rho, channel, povm_a, povm_b).expect("consistent dims");

    let report = s.equivalence_report();
    let route_gap = report
        .causal
        .max_abs_gap(&s.joint_distribution_ensemble())
        .expect("same labels");
    let sp = s.to_spacelike();
    let marginal_gap = sp
        .tau()
        .mat()
        .partial_trace(sp.shape(), Subsystem::B)
        .expect("consistent shape")
        .frob_dist(&s.rho().mat().transpose())
        .expect("same shape");
    let state_defect = (-sp.tau().min_eigenvalue())
        .max((sp.tau().mat().trace().re - 1.0).abs())
        .max(marginal_gap);
    TrialResult {
        equivalence_gap: report.max_abs_gap,
        route_gap,
        state_defect,
    }
}

fn tripartite_trial(seed: u64, stream: u64, dims: &[usize]) -> TrialResult {
    let mut rng = RngSpec::new(seed, stream).rng();
    let d_c = dims[rng.gen_range(0..dims.len())];
    let (d_a, d_b) = (2, 2);
    let rho = random_density(d_c, 1e-3, &mut rng).expect("valid ridge");
    let channel =
        random_cptp(d_c, d_a * d_b, rng.gen_range(1..=3), &mut rng).expect("feasible isometry");
    let povm_a = random_povm(d_a, rng.gen_range(2..=3), &mut rng).expect("valid POVM");
    let povm_b = random_povm(d_b, rng.gen_range(2..=3), &mut rng).expect("valid POVM");
    let povm_c = random_povm(d_c, rng.gen_range(2..=3), &mut rng).expect("valid POVM");
    let s = TripartiteCausalScenario::new(rho, channel, d_a, d_b, povm_a, povm_b, povm_c)
        .expect("consistent dims");

    let report = s.equivalence_report();
    let route_gap = report
        .causal
        .max_abs_gap(&s.joint_distribution_ensemble())
        .expect("same labels");
    let sp = s.to_spacelike();
    let state_defect = (-sp.tau().min_eigenvalue()).max((sp.tau().mat().trace().re - 1.0).abs());
    TrialResult {
        equivalence_gap: report.max_abs_gap,
        route_gap,
        state_defect,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_suite(
    trials: usize,
    dims: &[usize],
    seed: u64,
    tol: f64,
    tripartite: bool,
    format: Format,
) -> Result<Outcome> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    if dims.is_empty() || dims.iter().any(|&d| !(2..=6).contains(&d)) {
        bail!("--dims must list dimensions between 2 and 6");
    }
    // one independent stream per trial keeps the run order-insensitive
    let results: Vec<TrialResult> = (0..trials as u64)
        .into_par_iter()
        .map(|stream| {
            if tripartite {
                tripartite_trial(seed, stream, dims)
            } else {
                bipartite_trial(seed, stream, dims)
            }
        })
        .collect();

    let fold = |f: fn(&TrialResult) -> f64| {
        results
            .iter()
            .enumerate()
            .map(|(i, r)| (f(r), i))
            .fold((0.0f64, 0usize), |acc, x| if x.0 > acc.0 { x } else { acc })
    };
    let (worst_eq, eq_trial) = fold(|r| r.equivalence_gap);
    let (worst_route, route_trial) = fold(|r| r.route_gap);
    let (worst_state, state_trial) = fold(|r| r.state_defect);
    let pass = worst_eq < tol && worst_route < tol && worst_state < tol;

    match format {
        Format::Human => {
            println!(
                "suite: {trials} {} trials, dims {dims:?}, seed {seed}",
                if tripartite {
                    "tripartite"
                } else {
                    "bipartite"
                }
            );
            println!("  worst observer-equivalence gap: {worst_eq:.3e}  (trial {eq_trial})");
            println!("  worst route-agreement gap:      {worst_route:.3e}  (trial {route_trial})");
            println!("  worst shared-state defect:      {worst_state:.3e}  (trial {state_trial})");
            println!(
                "  tolerance {tol:.1e}: {}",
                if pass { "pass" } else { "FAIL" }
            );
        }
        Format::Machine => print_machine(&json!({
            "command": "suite",
            "trials": trials,
            "dims": dims,
            "seed": seed,
            "tripartite": tripartite,
            "worst_equivalence_gap": worst_eq,
            "worst_route_gap": worst_route,
            "worst_state_defect": worst_state,
            "tol": tol,
            "pass": pass,
        })),
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}
