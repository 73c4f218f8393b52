//! Acceptance checks. One PASS/FAIL line per criterion; tolerances are pinned below.
//!
//! Exits 0 after reporting unless `GITTINS_LAB_ACCEPTANCE_STRICT=1`, in which
//! case any FAIL makes the exit status 1.

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use gittins_lab::bounds::{lower_bound_index, optimistic_index, upper_bound_index, BOUND_TOLERANCE};
use gittins_lab::cli::sweep_row;
use gittins_lab::normal::{excess_sandwich, gordon_bounds, pdf, quantile_asymptotic, sf, std_normal_quantile};
use gittins_lab::sim::{agreement_rate, gittins_table_for, run, Policy, SimulationConfig, Summary};
use gittins_lab::solver::{build_table, gittins_index_standard, solve_index, SolverConfig};
use gittins_lab::{NoiseModel, PosteriorState, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_BRACKET_WIDTH: f64 = 1e-3;
const QUADRATURE_TOLERANCE: f64 = 1e-9;
const GORDON_POINTS: usize = 40;
const STANDARDIZATION_TOLERANCE: f64 = 1e-4;
const STANDARDIZATION_TRIPLES: usize = 20;
const STANDARDIZATION_DISCOUNT: f64 = 0.99;
/// Both sides are solved this tightly so the comparison measures the identity, not the bisection.
const STANDARDIZATION_SOLVER_TOLERANCE: f64 = 1e-6;
const REFINEMENT_RATIOS: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
const AGREEMENT_REPS: u64 = 500;
const REWARD_REPS: u64 = 2000;
const MAX_REWARD_Z: f64 = 3.0;
const SIM_TABLE_POINTS_PER_DECADE: f64 = 8.0;
const SEED: u64 = 20_240_601;

type Check = Result<(bool, String)>;

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("gap to the quantile index shrinks", gap_shrinks),
        ("bounds sandwich the exact index", bounds_sandwich),
        ("expected-excess sandwich", excess_sandwich_check),
        ("Gordon bounds and asymptotic quantile", gordon_and_asymptotic),
        ("standardization identity", standardization),
        ("refinement stability", refinement),
        ("lower-bound exponent ratio vanishes", exponent_ratio),
        ("Gittins and Bayes-UCB agree more when patient", agreement),
        ("simulate output independent of threads", reproducible),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failures += 1;
        }
        let status = if pass { "PASS" } else { "FAIL" };
        println!("{status} {}. {name} ({:.1}s): {detail}", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    let strict = std::env::var("GITTINS_LAB_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && failures > 0 {
        std::process::exit(1);
    }
}

fn gap_shrinks() -> Check {
    let rows = [0.9, 0.99, 0.999]
        .iter()
        .map(|&g| sweep_row(g, 1.0, &SolverConfig::for_discount(g)))
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap_exact_vs_quantile).collect();
    let widths: Vec<f64> = rows.iter().map(|r| r.exact_bracket_hi - r.exact_bracket_lo).collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let halved = gaps[2] < 0.5 * gaps[0];
    let narrow = widths.iter().all(|&w| w < MAX_BRACKET_WIDTH);
    let detail = format!(
        "indices {:.5?}, gaps {:.5?}, widths {:?}; decreasing {decreasing}, halved {halved}, narrow {narrow}",
        rows.iter().map(|r| r.exact_index).collect::<Vec<_>>(),
        gaps,
        widths.iter().map(|w| format!("{w:.1e}")).collect::<Vec<_>>()
    );
    Ok((decreasing && halved && narrow, detail))
}

fn bounds_sandwich() -> Check {
    let mut violations = Vec::new();
    let mut cells = 0;
    for gamma in [0.99, 0.999, 0.9999] {
        let config = SolverConfig::for_discount(gamma);
        let upper = upper_bound_index(gamma)?.value;
        let optimistic = optimistic_index(PosteriorState::standard(), gamma)?;
        for ratio in [0.5, 1.0, 2.0] {
            let exact = gittins_index_standard(gamma, ratio, &config)?;
            let lower = lower_bound_index(gamma, ratio)?.bound;
            let (lo, hi) = exact.bracket;
            let ok = lower <= hi + BOUND_TOLERANCE
                && lo <= optimistic + BOUND_TOLERANCE
                && optimistic <= upper + BOUND_TOLERANCE;
            cells += 1;
            if !ok {
                violations.push(format!("γ {gamma} r {ratio}: {lower:.5} [{lo:.5}, {hi:.5}] {optimistic:.5} {upper:.5}"));
            }
        }
    }
    Ok((violations.is_empty(), format!("{cells} cells, {} violations {violations:?}", violations.len())))
}

/// Adaptive Simpson on `[a, b]`.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn excess_sandwich_check() -> Check {
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for sigma in [0.5, 1.0, 2.0] {
        for d in [2.0, 3.0, 4.0, 6.0, 8.0] {
            let lam = d * sigma;
            let s = excess_sandwich(sigma, lam)?;
            // ∫_λ^∞ (x − λ) φ(x/σ)/σ dx with x = λ + σt.
            let integrand = |t: f64| sigma * t * pdf(d + t);
            // Unit panels so the initial Simpson nodes cannot all miss the mass near t = 0.
            let quad: f64 = (0..40).map(|k| simpson(&integrand, k as f64, k as f64 + 1.0, 1e-18)).sum();
            let err = (s.exact - quad).abs();
            worst = worst.max(err);
            if !s.is_ordered() || err > QUADRATURE_TOLERANCE {
                violations.push(format!("σ {sigma} λ/σ {d}: {s:?} quad {quad:e}"));
            }
        }
    }
    Ok((violations.is_empty(), format!("15 cells, max |exact − quadrature| {worst:.1e}, violations {violations:?}")))
}

fn gordon_and_asymptotic() -> Check {
    let mut violations = 0;
    for i in 0..GORDON_POINTS {
        let z = 0.2 + (8.0 - 0.2) * i as f64 / (GORDON_POINTS - 1) as f64;
        let (lo, hi) = gordon_bounds(z)?;
        let tail = sf(z);
        if !(lo.value() <= tail && tail <= hi.value()) {
            violations += 1;
        }
    }
    let gaps = (1..=6)
        .map(|k| {
            let p = 1.0 - 10f64.powi(-2 * k);
            Ok((std_normal_quantile(p)? - quantile_asymptotic(p)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let halved = gaps[5] < 0.5 * gaps[0];
    let detail = format!(
        "{violations} Gordon violations on {GORDON_POINTS} points; asymptotic gaps at 1−10^-2..1−10^-12 {gaps:.4?} \
         (decreasing {decreasing}, last/first {:.3}, halved {halved})",
        gaps[5] / gaps[0]
    );
    Ok((violations == 0 && halved, detail))
}

fn standardization() -> Check {
    let gamma = STANDARDIZATION_DISCOUNT;
    let config = SolverConfig::with_tolerance(gamma, STANDARDIZATION_SOLVER_TOLERANCE);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..STANDARDIZATION_TRIPLES {
        let mu = rng.random_range(-3.0..3.0);
        let var = 10f64.powf(rng.random_range(-1.0..1.0));
        let noise_var = 10f64.powf(rng.random_range(-1.0..1.0));
        let state = PosteriorState::new(mu, var)?;
        let direct = solve_index(state, gamma, NoiseModel::new(noise_var)?, &config)?.index;
        let standard = gittins_index_standard(gamma, noise_var / var, &config)?.index;
        worst = worst.max((direct - (mu + var.sqrt() * standard)).abs());
    }
    Ok((
        worst < STANDARDIZATION_TOLERANCE,
        format!("γ {gamma}, {STANDARDIZATION_TRIPLES} triples, max difference {worst:.2e}"),
    ))
}

fn refinement() -> Check {
    let gamma = 0.99;
    let config = SolverConfig::for_discount(gamma);
    let coarse = build_table(gamma, &REFINEMENT_RATIOS, &config)?;
    let fine = build_table(gamma, &REFINEMENT_RATIOS, &config.refined())?;
    let mut ok = true;
    let mut cells = Vec::new();
    for i in 0..coarse.len() {
        let moved = (fine.indices()[i] - coarse.indices()[i]).abs();
        let width = coarse.brackets()[i].1 - coarse.brackets()[i].0;
        ok &= moved < width;
        cells.push(format!("{:.1e}/{:.1e}", moved, width));
    }
    Ok((ok, format!("moved/width per ratio {REFINEMENT_RATIOS:?}: {}", cells.join(" "))))
}

fn exponent_ratio() -> Check {
    let mut report = Vec::new();
    let mut pass_at_unit = false;
    for ratio in [1.0, 0.5, 2.0] {
        let values = [2, 4, 6, 8]
            .iter()
            .map(|&k| {
                let gamma = 1.0 - 10f64.powi(-k);
                let d = lower_bound_index(gamma, ratio)?;
                Ok(d.h / (-(-gamma).ln_1p()).sqrt())
            })
            .collect::<Result<Vec<f64>>>()?;
        let decreasing = values.windows(2).all(|w| w[1].abs() < w[0].abs());
        if ratio == 1.0 {
            pass_at_unit = decreasing;
        }
        report.push(format!("ratio {ratio}: {values:.4?} decreasing {decreasing}"));
    }
    Ok((pass_at_unit, report.join("; ")))
}

fn agreement() -> Check {
    let mut rates = Vec::new();
    let mut tables = Vec::new();
    for gamma in [0.9, 0.999] {
        let base = SimulationConfig::symmetric(2, 1.0, 1.0, gamma, Policy::Greedy)?;
        let table = gittins_table_for(
            &base.arms,
            gamma,
            base.horizon,
            SIM_TABLE_POINTS_PER_DECADE,
            &SolverConfig::for_discount(gamma),
        )?;
        let gittins = Policy::Gittins(Arc::new(table));
        let config = SimulationConfig { replications: AGREEMENT_REPS, seed: SEED, ..base.clone() };
        rates.push(agreement_rate(&config, &gittins, &Policy::BayesUcbDiscount)?);
        tables.push((base, gittins));
    }
    let (base, gittins) = &tables[1];
    let summary = |policy: &Policy| -> Result<Summary> {
        let config = SimulationConfig { replications: REWARD_REPS, seed: SEED, policy: policy.clone(), ..base.clone() };
        Ok(Summary::new(policy.name(), &run(&config)?))
    };
    let g = summary(gittins)?;
    let u = summary(&Policy::BayesUcbDiscount)?;
    let z = g.reward_z_score(&u);
    let higher = rates[1] > rates[0];
    let detail = format!(
        "agreement γ 0.9 {:.4}, γ 0.999 {:.4}; reward at 0.999 gittins {:.3}±{:.3} vs ucb {:.3}±{:.3}, z {z:.2}",
        rates[0], rates[1], g.mean_discounted_reward, g.stderr_discounted_reward, u.mean_discounted_reward,
        u.stderr_discounted_reward
    );
    Ok((higher && z < MAX_REWARD_Z, detail))
}

fn reproducible() -> Check {
    let args = [
        "simulate", "--gamma", "0.9", "--policy", "gittins", "--arms", "3", "--reps", "200", "--horizon", "150", "--seed", "7",
    ];
    let mut outputs = Vec::new();
    for threads in [None, Some("1"), Some("4"), Some("7")] {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_gittins-lab"));
        cmd.args(args).env_remove("GITTINS_LAB_THREADS");
        if let Some(t) = threads {
            cmd.env("GITTINS_LAB_THREADS", t);
        }
        let out = cmd.output()?;
        if !out.status.success() {
            return Ok((false, format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))));
        }
        outputs.push(out.stdout);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Ok((same, format!("{} bytes, identical across unset/1/4/7 threads: {same}", outputs[0].len())))
}
