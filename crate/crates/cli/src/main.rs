//! `asym-chsh` — scans and verifications for CHSH experiments with one-sided
//! detector inefficiency.
//!
//! Subcommands:
//! * `bound-scan`  — CSV of the analytic concurrence bound (solid curve) and
//!   the least violating concurrence found by optimization (dashed curve).
//! * `lambda-max`  — numeric vs closed-form largest eigenvalue of a Bell
//!   operator for a scenario given as JSON.
//! * `lhv-check`   — build the Massar–Pironio model for a distribution file,
//!   simulate it exactly and verify the simulation identities.
//! * `prop1-scan`  — CSV of the spectral margin λ_max(𝓑′) − 2 over an angle
//!   grid.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 no LHV model
//! exists at the requested efficiency, 4 invalid input data.

mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::FromPrimitive;

use asym_chsh_core::{
    bell_asymmetric, bell_chsh, bell_single_setting, massar_pironio_model,
    min_concurrence_violating, prop1_margin_scan, sample_model, simulate, verify_simulation,
    violation_ub, BellKind, CoefficientTable, Error as CoreError, NoSignalingDistribution,
    Scenario, Window,
};
use format::sig12;

const EXIT_VERIFICATION_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NO_MODEL: u8 = 3;
const EXIT_INVALID_DATA: u8 = 4;

#[derive(Parser)]
#[command(
    name = "asym-chsh",
    version,
    about = "CHSH violations with one-sided detector inefficiency"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the concurrence bound and the least violating concurrence over η.
    BoundScan {
        #[arg(long)]
        eta_start: f64,
        #[arg(long)]
        eta_stop: f64,
        #[arg(long)]
        steps: usize,
        /// Evaluate the bound outside the derivation window (η up to 1).
        #[arg(long)]
        relaxed_window: bool,
    },
    /// Compare numeric and closed-form λ_max for one scenario.
    LambdaMax {
        /// Scenario as JSON: {"theta_a":..,"theta_b":..,"eta":..}
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Verify the Massar–Pironio simulation for a distribution file.
    LhvCheck {
        /// Path to a distribution JSON file {"A":..,"B":..,"X":..,"Y":..,"p":[..]}.
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        eta: f64,
        /// Verify in exact rational arithmetic (deviation must be exactly 0).
        #[arg(long)]
        rational: bool,
        /// Additionally report a seeded Monte-Carlo estimate with this many
        /// shots per input pair (informational; the verdict uses the exact
        /// summation).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Margin λ_max(𝓑′) − 2 over a non-degenerate angle grid.
    Prop1Scan {
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        grid: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Chsh,
    Asym,
    Single,
}

impl From<KindArg> for BellKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Chsh => BellKind::Chsh,
            KindArg::Asym => BellKind::Asymmetric,
            KindArg::Single => BellKind::SingleSetting,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::BoundScan {
            eta_start,
            eta_stop,
            steps,
            relaxed_window,
        } => bound_scan(eta_start, eta_stop, steps, relaxed_window),
        Command::LambdaMax { scenario, kind } => lambda_max(&scenario, kind.into()),
        Command::LhvCheck {
            dist,
            eta,
            rational,
            samples,
            seed,
        } => lhv_check(&dist, eta, rational, samples, seed),
        Command::Prop1Scan { eta, grid } => prop1_scan(eta, grid),
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn bound_scan(eta_start: f64, eta_stop: f64, steps: usize, relaxed_window: bool) -> ExitCode {
    const EPS: f64 = 1e-12;
    if steps < 2 {
        return usage_error("--steps must be at least 2");
    }
    if !(eta_start.is_finite() && eta_stop.is_finite()) || eta_start >= eta_stop {
        return usage_error("--eta-start must be strictly below --eta-stop");
    }
    if eta_start < 0.5 - EPS {
        return usage_error("--eta-start must be at least 1/2 (no violation exists below)");
    }
    let strict_limit = 1.0 / std::f64::consts::SQRT_2;
    let stop_limit = if relaxed_window { 1.0 } else { strict_limit };
    if eta_stop > stop_limit + EPS {
        return usage_error(&format!(
            "--eta-stop must not exceed {} (pass --relaxed-window to extend to 1)",
            sig12(stop_limit)
        ));
    }

    println!("eta,violation_ub,min_violating_c2,window_flag");
    for i in 0..steps {
        let eta = eta_start + (eta_stop - eta_start) * i as f64 / (steps - 1) as f64;
        if eta <= 0.5 + EPS {
            println!("{},0,0,no-violation", sig12(eta));
            continue;
        }
        let bound = match violation_ub(eta, Window::Relaxed) {
            Ok(b) => b,
            Err(e) => return usage_error(&e.to_string()),
        };
        let (c_min, _witness) = match min_concurrence_violating(eta, BellKind::Asymmetric) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_VERIFICATION_FAILURE);
            }
        };
        let flag = if eta <= strict_limit + EPS {
            "in-window"
        } else {
            "outside-derivation-window"
        };
        println!(
            "{},{},{},{}",
            sig12(eta),
            sig12(bound),
            sig12(c_min * c_min),
            flag
        );
    }
    ExitCode::SUCCESS
}

fn lambda_max(scenario_json: &str, kind: BellKind) -> ExitCode {
    let scenario: Scenario = match serde_json::from_str(scenario_json) {
        Ok(s) => s,
        Err(e) => return usage_error(&format!("invalid scenario JSON: {e}")),
    };
    let operator = match kind {
        BellKind::Chsh => bell_chsh(&scenario),
        BellKind::Asymmetric => bell_asymmetric(&scenario),
        BellKind::SingleSetting => bell_single_setting(&scenario),
    };
    let numeric = match operator.lambda_max() {
        Ok(v) => v,
        Err(e) => return usage_error(&e.to_string()),
    };
    let closed_form = CoefficientTable::for_kind(kind, &scenario)
        .lambda_max_sq()
        .max(0.0)
        .sqrt();
    let round = |x: f64| -> f64 { sig12(x).parse().expect("sig12 emits valid floats") };
    let report = serde_json::json!({
        "kind": match kind {
            BellKind::Chsh => "chsh",
            BellKind::Asymmetric => "asym",
            BellKind::SingleSetting => "single",
        },
        "scenario": {
            "theta_a": round(scenario.theta_a()),
            "theta_b": round(scenario.theta_b()),
            "eta": round(scenario.eta()),
        },
        "lambda_max_numeric": round(numeric),
        "lambda_max_closed_form": round(closed_form),
        "abs_discrepancy": round((numeric - closed_form).abs()),
    });
    println!("{report}");
    ExitCode::SUCCESS
}

fn lhv_check(
    dist_path: &PathBuf,
    eta: f64,
    rational: bool,
    samples: Option<u64>,
    seed: u64,
) -> ExitCode {
    let raw = match std::fs::read_to_string(dist_path) {
        Ok(raw) => raw,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dist_path.display());
            return ExitCode::from(EXIT_INVALID_DATA);
        }
    };
    let distribution: NoSignalingDistribution<f64> = match serde_json::from_str(&raw) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: invalid distribution data: {e}");
            return ExitCode::from(EXIT_INVALID_DATA);
        }
    };
    let alphabets = distribution.alphabets();
    println!(
        "distribution: {} (A={}, B={}, X={}, Y={})",
        dist_path.display(),
        alphabets.a,
        alphabets.b,
        alphabets.x,
        alphabets.y
    );
    println!("eta: {}", sig12(eta));
    println!(
        "mode: {}",
        if rational { "exact-rational" } else { "float" }
    );

    let exit_for = |e: &CoreError| -> ExitCode {
        match e {
            CoreError::NoLhvModel { .. } => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_NO_MODEL)
            }
            _ => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_INVALID_DATA)
            }
        }
    };

    let check = if rational {
        let exact = match distribution.to_exact() {
            Ok(exact) => exact,
            Err(e) => return exit_for(&e),
        };
        let eta = match BigRational::from_f64(eta) {
            Some(eta) => eta,
            None => return usage_error("--eta must be finite"),
        };
        let model = match massar_pironio_model(&exact, eta.clone()) {
            Ok(m) => m,
            Err(e) => return exit_for(&e),
        };
        println!("hidden values: {}", model.hidden_values().len());
        verify_simulation(&exact, eta, &simulate(&model))
    } else {
        let model = match massar_pironio_model(&distribution, eta) {
            Ok(m) => m,
            Err(e) => return exit_for(&e),
        };
        println!("hidden values: {}", model.hidden_values().len());
        if let Some(shots) = samples {
            let empirical = sample_model(&model, shots, seed);
            let exact = simulate(&model);
            let mut worst = 0.0f64;
            for x in 0..alphabets.x {
                for y in 0..alphabets.y {
                    for a in 0..alphabets.a {
                        for b in 0..=alphabets.b {
                            worst = worst
                                .max((empirical.prob(x, y, a, b) - exact.prob(x, y, a, b)).abs());
                        }
                    }
                }
            }
            println!(
                "sampled deviation (shots={shots}, seed={seed}): {}",
                sig12(worst)
            );
        }
        verify_simulation(&distribution, eta, &simulate(&model))
    };

    match check {
        Ok(check) => {
            let deviation = if rational && check.max_deviation == 0.0 {
                "0 (exact)".to_string()
            } else {
                sig12(check.max_deviation)
            };
            println!("max deviation: {deviation}");
            if check.passed {
                println!("result: PASS");
                ExitCode::SUCCESS
            } else {
                let (x, y, a, b) = check.worst_index;
                println!("result: FAIL at (x={x}, y={y}, a={a}, b={b})");
                ExitCode::from(EXIT_VERIFICATION_FAILURE)
            }
        }
        Err(e) => exit_for(&e),
    }
}

fn prop1_scan(eta: f64, grid: usize) -> ExitCode {
    let scan = match prop1_margin_scan(eta, grid) {
        Ok(scan) => scan,
        Err(e) => return usage_error(&e.to_string()),
    };
    println!("theta_a,theta_b,margin");
    for (ta, tb, margin) in &scan.rows {
        println!("{},{},{}", sig12(*ta), sig12(*tb), sig12(*margin));
    }
    if eta == 0.0 {
        println!(
            "# min_margin = {} (equality case: eta = 0)",
            sig12(scan.min_margin)
        );
    } else {
        println!(
            "# min_margin = {} at theta_a={}, theta_b={}",
            sig12(scan.min_margin),
            sig12(scan.argmin.0),
            sig12(scan.argmin.1)
        );
    }
    ExitCode::SUCCESS
}
