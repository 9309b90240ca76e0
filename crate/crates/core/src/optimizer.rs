//! Numerical search for maximal CHSH values under entanglement constraints.
//!
//! States are restricted to real amplitudes: the Bell operators of this
//! family have no σ_y component, so their matrix representations are real
//! symmetric and a real optimum always exists (verified empirically by the
//! `real_restriction_loses_nothing` test rather than assumed silently). A
//! state of fixed concurrence C is parameterised as
//! (A⊗B)(√κ|00⟩ + √(1−κ)|11⟩) with κ = (1+√(1−C²))/2 and A, B real
//! orthogonal (rotation × optional reflection).
//!
//! The search runs a deterministic coarse grid followed by downhill-simplex
//! refinement from the best grid points; ties break toward the lowest grid
//! index so results are reproducible.

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{
    bell_asymmetric, bell_chsh, bell_single_setting, chsh_value, BellKind, BellOperator,
    CoefficientTable,
};
use crate::entanglement::TwoQubitState;
use crate::error::{Error, Result};
use crate::matrix::Complex64;
use crate::scenario::Scenario;

/// Real-amplitude pure state of fixed Schmidt weight, up to local rotations
/// and reflections in the x–z plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateParams {
    /// Largest squared Schmidt coefficient, in [1/2, 1].
    pub kappa_max: f64,
    pub alice_rotation: f64,
    pub bob_rotation: f64,
    pub alice_reflect: bool,
    pub bob_reflect: bool,
}

impl StateParams {
    pub fn new(
        kappa_max: f64,
        alice_rotation: f64,
        bob_rotation: f64,
        alice_reflect: bool,
        bob_reflect: bool,
    ) -> Result<Self> {
        if !(0.5..=1.0 + 1e-12).contains(&kappa_max) || !kappa_max.is_finite() {
            return Err(Error::OutOfRange {
                name: "kappa_max",
                value: kappa_max,
                range: "[1/2, 1]",
            });
        }
        Ok(Self {
            kappa_max: kappa_max.min(1.0),
            alice_rotation,
            bob_rotation,
            alice_reflect,
            bob_reflect,
        })
    }

    /// Real amplitudes of (A⊗B)(√κ|00⟩+√(1−κ)|11⟩) where A, B apply the
    /// optional reflection diag(1,−1) followed by the plane rotation.
    pub fn amplitudes(&self) -> [f64; 4] {
        state_vector(
            self.kappa_max,
            self.alice_rotation,
            self.bob_rotation,
            self.alice_reflect,
            self.bob_reflect,
        )
    }

    pub fn state(&self) -> TwoQubitState {
        let amps = self.amplitudes();
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        TwoQubitState::pure([
            Complex64::new(amps[0] / norm, 0.0),
            Complex64::new(amps[1] / norm, 0.0),
            Complex64::new(amps[2] / norm, 0.0),
            Complex64::new(amps[3] / norm, 0.0),
        ])
        .expect("orthogonal maps preserve the unit norm")
    }
}

/// κ_max = (1 + √(1−C²))/2, the Schmidt weight realising concurrence C.
pub fn kappa_for_concurrence(concurrence: f64) -> f64 {
    (1.0 + (1.0 - concurrence * concurrence).max(0.0).sqrt()) / 2.0
}

#[inline]
fn state_vector(kappa: f64, ra: f64, rb: f64, fa: bool, fb: bool) -> [f64; 4] {
    let c0 = kappa.max(0.0).sqrt();
    let c1 = (1.0 - kappa).max(0.0).sqrt();
    let (sa, ca) = ra.sin_cos();
    let (sb, cb) = rb.sin_cos();
    let fa = if fa { -1.0 } else { 1.0 };
    let fb = if fb { -1.0 } else { 1.0 };
    // Column k of A is A·|k⟩; reflection flips the second column's sign.
    let a_col0 = [ca, sa];
    let a_col1 = [-sa * fa, ca * fa];
    let b_col0 = [cb, sb];
    let b_col1 = [-sb * fb, cb * fb];
    let mut out = [0.0; 4];
    for i in 0..2 {
        for j in 0..2 {
            out[2 * i + j] = c0 * a_col0[i] * b_col0[j] + c1 * a_col1[i] * b_col1[j];
        }
    }
    out
}

#[inline]
fn quad_form(m: &[[f64; 4]; 4], v: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut row = 0.0;
        for j in 0..4 {
            row += m[i][j] * v[j];
        }
        acc += v[i] * row;
    }
    acc
}

/// Search resolution knobs; the defaults match the documented two-stage
/// strategy (64×64 angle grid, 32 rotation steps per side, 4 reflection
/// combinations, simplex refinement from the best 5 grid points).
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub angle_steps: usize,
    pub rotation_steps: usize,
    pub refine_seeds: usize,
    pub refine_max_iters: usize,
    pub simplex_tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            angle_steps: 64,
            rotation_steps: 32,
            refine_seeds: 5,
            refine_max_iters: 500,
            simplex_tolerance: 1e-10,
        }
    }
}

impl SearchConfig {
    /// Cheaper settings for inner loops that run the search many times.
    pub fn coarse() -> Self {
        Self {
            angle_steps: 32,
            rotation_steps: 16,
            refine_seeds: 3,
            refine_max_iters: 400,
            simplex_tolerance: 1e-10,
        }
    }
}

/// Outcome of a violation search.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    /// Achieved CHSH value, recomputed from `best_state`/`best_scenario`
    /// through the full operator path.
    pub best_value: f64,
    pub best_state: StateParams,
    pub best_scenario: Scenario,
    /// Total objective evaluations across grid and refinement.
    pub iterations: u64,
    /// Whether every simplex refinement reached the tolerance before the
    /// iteration cap.
    pub converged: bool,
}

fn operator_for(kind: BellKind, s: &Scenario) -> BellOperator {
    match kind {
        BellKind::Chsh => bell_chsh(s),
        BellKind::Asymmetric => bell_asymmetric(s),
        BellKind::SingleSetting => bell_single_setting(s),
    }
}

fn check_search_kind(kind: BellKind) -> Result<()> {
    match kind {
        BellKind::Chsh => Err(Error::UnsupportedBellKind(kind.name())),
        BellKind::Asymmetric | BellKind::SingleSetting => Ok(()),
    }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || !value.is_finite() {
        return Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

const REFLECTION_COMBOS: [(bool, bool); 4] =
    [(false, false), (false, true), (true, false), (true, true)];

struct Candidate {
    value: f64,
    index: usize,
    params: [f64; 4], // theta_a, theta_b, alice_rotation, bob_rotation
    reflections: (bool, bool),
}

/// Deterministic coarse stage: returns per-angle-pair bests in grid order.
fn grid_stage(eta: f64, kappa: f64, kind: BellKind, config: &SearchConfig) -> Vec<Candidate> {
    let n = config.angle_steps;
    let m = config.rotation_steps;
    let angle = |i: usize| {
        -std::f64::consts::FRAC_PI_2 + (i as f64 + 0.5) * std::f64::consts::PI / n as f64
    };
    let rotation = |j: usize| j as f64 * std::f64::consts::PI / m as f64;

    // States are angle-independent; build them once.
    let states: Vec<[f64; 4]> = (0..m * m * 4)
        .map(|s| {
            let r = s % 4;
            let rbj = (s / 4) % m;
            let raj = s / (4 * m);
            let (fa, fb) = REFLECTION_COMBOS[r];
            state_vector(kappa, rotation(raj), rotation(rbj), fa, fb)
        })
        .collect();

    (0..n * n)
        .into_par_iter()
        .map(|pair| {
            let ai = pair / n;
            let bi = pair % n;
            let ta = angle(ai);
            let tb = angle(bi);
            let matrix = CoefficientTable::from_angles(kind, ta, tb, eta).to_real_matrix();
            let mut best = f64::NEG_INFINITY;
            let mut best_s = 0;
            for (s, v) in states.iter().enumerate() {
                let value = quad_form(&matrix, v);
                if value > best {
                    best = value;
                    best_s = s;
                }
            }
            let r = best_s % 4;
            let rbj = (best_s / 4) % m;
            let raj = best_s / (4 * m);
            Candidate {
                value: best,
                index: pair * (m * m * 4) + best_s,
                params: [ta, tb, rotation(raj), rotation(rbj)],
                reflections: REFLECTION_COMBOS[r],
            }
        })
        .collect()
}

struct NmOutcome {
    x: Vec<f64>,
    value: f64,
    iterations: u64,
    evaluations: u64,
    converged: bool,
}

/// Downhill-simplex minimisation with the standard reflection/expansion/
/// contraction/shrink coefficients (1, 2, 1/2, 1/2).
fn nelder_mead(
    objective: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    max_iters: usize,
    tol: f64,
) -> NmOutcome {
    let n = x0.len();
    let mut evaluations = 0u64;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        objective(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let f = eval(&x);
        simplex.push((x, f));
    }

    let mut iterations = 0u64;
    let mut converged = false;
    for _ in 0..max_iters {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        if (simplex[n].1 - simplex[0].1).abs() < tol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let point = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = point(1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = point(2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = point(0.5);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = point(-0.5);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(worst.1) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (xi, bi) in entry.0.iter_mut().zip(&best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    entry.1 = eval(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    NmOutcome {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        iterations,
        evaluations,
        converged,
    }
}

fn finish(
    eta: f64,
    kappa: f64,
    kind: BellKind,
    params: [f64; 4],
    reflections: (bool, bool),
    iterations: u64,
    converged: bool,
) -> Result<OptimizationResult> {
    let scenario = Scenario::new(params[0], params[1], eta)?;
    let state_params = StateParams::new(kappa, params[2], params[3], reflections.0, reflections.1)?;
    let op = operator_for(kind, &scenario);
    let best_value = chsh_value(&state_params.state(), &op);
    Ok(OptimizationResult {
        best_value,
        best_state: state_params,
        best_scenario: scenario,
        iterations,
        converged,
    })
}

/// Maximises `tr[ρ𝓑]` over states of fixed concurrence and over both
/// measurement angles. The result is an achieved value, hence a certified
/// lower bound on the true maximum.
pub fn max_value_fixed_concurrence_with(
    eta: f64,
    concurrence: f64,
    kind: BellKind,
    config: &SearchConfig,
) -> Result<OptimizationResult> {
    check_search_kind(kind)?;
    check_unit_interval("eta", eta)?;
    check_unit_interval("concurrence", concurrence)?;
    let kappa = kappa_for_concurrence(concurrence);

    let candidates = grid_stage(eta, kappa, kind, config);
    let grid_evals = (config.angle_steps
        * config.angle_steps
        * config.rotation_steps
        * config.rotation_steps
        * 4) as u64;

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| {
        candidates[j]
            .value
            .partial_cmp(&candidates[i].value)
            .expect("finite objective")
            .then(candidates[i].index.cmp(&candidates[j].index))
    });

    let seeds: Vec<&Candidate> = order
        .iter()
        .take(config.refine_seeds.max(1))
        .map(|&i| &candidates[i])
        .collect();

    let angle_step = std::f64::consts::PI / config.angle_steps as f64;
    let rot_step = std::f64::consts::PI / config.rotation_steps as f64;
    let refined: Vec<(NmOutcome, (bool, bool))> = seeds
        .par_iter()
        .map(|seed| {
            let (fa, fb) = seed.reflections;
            let objective = move |x: &[f64]| -> f64 {
                let matrix = CoefficientTable::from_angles(kind, x[0], x[1], eta).to_real_matrix();
                let v = state_vector(kappa, x[2], x[3], fa, fb);
                -quad_form(&matrix, &v)
            };
            let outcome = nelder_mead(
                &objective,
                &seed.params,
                &[angle_step, angle_step, rot_step, rot_step],
                config.refine_max_iters,
                config.simplex_tolerance,
            );
            (outcome, seed.reflections)
        })
        .collect();

    let mut best_value = f64::NEG_INFINITY;
    let mut best: Option<(&NmOutcome, (bool, bool))> = None;
    let mut total_evals = grid_evals;
    let mut iterations_sum = 0u64;
    let mut all_converged = true;
    for (outcome, reflections) in &refined {
        total_evals += outcome.evaluations;
        iterations_sum += outcome.iterations;
        all_converged &= outcome.converged;
        if -outcome.value > best_value {
            best_value = -outcome.value;
            best = Some((outcome, *reflections));
        }
    }
    let _ = iterations_sum;
    let (outcome, reflections) =
        best.ok_or_else(|| Error::SearchFailed("refinement produced no candidates".to_string()))?;
    finish(
        eta,
        kappa,
        kind,
        [outcome.x[0], outcome.x[1], outcome.x[2], outcome.x[3]],
        reflections,
        total_evals,
        all_converged,
    )
}

/// [`max_value_fixed_concurrence_with`] at the default search resolution.
pub fn max_value_fixed_concurrence(
    eta: f64,
    concurrence: f64,
    kind: BellKind,
) -> Result<OptimizationResult> {
    max_value_fixed_concurrence_with(eta, concurrence, kind, &SearchConfig::default())
}

/// Maximises `tr[ρ𝓑]` over states of fixed concurrence with the measurement
/// angles pinned; only the local state orientation is searched.
pub fn max_value_fixed_angles(
    eta: f64,
    concurrence: f64,
    kind: BellKind,
    theta_a: f64,
    theta_b: f64,
    config: &SearchConfig,
) -> Result<OptimizationResult> {
    check_search_kind(kind)?;
    check_unit_interval("eta", eta)?;
    check_unit_interval("concurrence", concurrence)?;
    let kappa = kappa_for_concurrence(concurrence);
    let matrix = CoefficientTable::from_angles(kind, theta_a, theta_b, eta).to_real_matrix();

    let m = config.rotation_steps.max(2) * 2;
    let rotation = |j: usize| j as f64 * std::f64::consts::PI / m as f64;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for s in 0..m * m * 4 {
        let r = s % 4;
        let rbj = (s / 4) % m;
        let raj = s / (4 * m);
        let (fa, fb) = REFLECTION_COMBOS[r];
        let v = state_vector(kappa, rotation(raj), rotation(rbj), fa, fb);
        let value = quad_form(&matrix, &v);
        if value > best.0 {
            best = (value, s);
        }
    }
    let (fa, fb) = REFLECTION_COMBOS[best.1 % 4];
    let x0 = [rotation(best.1 / (4 * m)), rotation((best.1 / 4) % m)];
    let objective = |x: &[f64]| -> f64 {
        let v = state_vector(kappa, x[0], x[1], fa, fb);
        -quad_form(&matrix, &v)
    };
    let rot_step = std::f64::consts::PI / m as f64;
    let outcome = nelder_mead(
        &objective,
        &x0,
        &[rot_step, rot_step],
        config.refine_max_iters,
        config.simplex_tolerance,
    );
    finish(
        eta,
        kappa,
        kind,
        [theta_a, theta_b, outcome.x[0], outcome.x[1]],
        (fa, fb),
        (m * m * 4) as u64 + outcome.evaluations,
        outcome.converged,
    )
}

/// Violation threshold used by the bisection: values above 2 + 1e-9 count.
pub const VIOLATION_THRESHOLD: f64 = 2.0 + 1e-9;
/// Bisection floor on the concurrence, matching the plotting resolution.
pub const CONCURRENCE_FLOOR: f64 = 1e-3;
/// Bisection resolution on the concurrence.
pub const CONCURRENCE_RESOLUTION: f64 = 1e-4;

/// Least concurrence (down to the 1e-3 floor, at 1e-4 resolution) for which
/// the optimizer certifies a CHSH violation at efficiency η, together with
/// the violating witness.
pub fn min_concurrence_violating(eta: f64, kind: BellKind) -> Result<(f64, OptimizationResult)> {
    if kind != BellKind::Asymmetric {
        return Err(Error::UnsupportedBellKind(kind.name()));
    }
    if !eta.is_finite() || eta <= 0.5 {
        return Err(Error::NoViolationPossible { eta });
    }
    check_unit_interval("eta", eta)?;
    let config = SearchConfig::default();
    let attempt = |c: f64| -> Result<(bool, OptimizationResult)> {
        let result = max_value_fixed_concurrence_with(eta, c, kind, &config)?;
        Ok((result.best_value > VIOLATION_THRESHOLD, result))
    };

    let (violates, result) = attempt(CONCURRENCE_FLOOR)?;
    if violates {
        return Ok((CONCURRENCE_FLOOR, result));
    }

    // Bracket the lower edge of the violating interval on a coarse scan.
    let mut lo = CONCURRENCE_FLOOR;
    let mut bracket: Option<(f64, OptimizationResult)> = None;
    for k in 1..=20 {
        let c = k as f64 / 20.0;
        let (violates, result) = attempt(c)?;
        if violates {
            bracket = Some((c, result));
            break;
        }
        lo = c;
    }
    let (mut hi, mut witness) = bracket.ok_or_else(|| {
        Error::SearchFailed(format!(
            "no violating concurrence found at eta = {eta} despite eta > 1/2"
        ))
    })?;

    while hi - lo > CONCURRENCE_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        let (violates, result) = attempt(mid)?;
        if violates {
            hi = mid;
            witness = result;
        } else {
            lo = mid;
        }
    }
    Ok((hi, witness))
}

/// Result of a spectral-margin scan over an interior angle grid.
#[derive(Debug, Clone)]
pub struct MarginScan {
    pub min_margin: f64,
    /// Angles achieving the minimum.
    pub argmin: (f64, f64),
    /// (θ_A, θ_B, λ_max − 2) in row-major grid order.
    pub rows: Vec<(f64, f64, f64)>,
}

/// λ_max(𝓑′) − 2 over a `grid_n`×`grid_n` grid of non-degenerate angles
/// (cell midpoints of (−π/2, π/2)²), computed with the numeric eigensolver.
pub fn prop1_margin_scan(eta: f64, grid_n: usize) -> Result<MarginScan> {
    check_unit_interval("eta", eta)?;
    if grid_n < 2 {
        return Err(Error::OutOfRange {
            name: "grid_n",
            value: grid_n as f64,
            range: "[2, inf)",
        });
    }
    let angle = |i: usize| {
        -std::f64::consts::FRAC_PI_2 + (i as f64 + 0.5) * std::f64::consts::PI / grid_n as f64
    };
    let rows: Vec<(f64, f64, f64)> = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|idx| {
            let ta = angle(idx / grid_n);
            let tb = angle(idx % grid_n);
            let s = Scenario::new(ta, tb, eta).expect("grid angles are finite");
            let lambda = bell_single_setting(&s)
                .lambda_max()
                .expect("Bell operators are Hermitian");
            (ta, tb, lambda - 2.0)
        })
        .collect();
    let mut min_margin = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for &(ta, tb, margin) in &rows {
        if margin < min_margin {
            min_margin = margin;
            argmin = (ta, tb);
        }
    }
    Ok(MarginScan {
        min_margin,
        argmin,
        rows,
    })
}

fn det2(m: &[[Complex64; 2]; 2]) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Maximal concurrence of a superposition of the top two eigenvectors of 𝓑′
/// subject to the superposition still violating the CHSH inequality
/// (for η > 0), or ranging over the full degenerate top eigenspace at η = 0.
pub fn degenerate_eigenspace_concurrence(theta_a: f64, theta_b: f64, eta: f64) -> Result<f64> {
    let s = Scenario::new(theta_a, theta_b, eta)?;
    let spectral = bell_single_setting(&s).spectral()?;
    let l1 = spectral.eigenvalues()[0];
    let l2 = spectral.eigenvalues()[1];
    let v1 = spectral.eigenvector(0);
    let v2 = spectral.eigenvector(1);
    let m1 = [[v1[0], v1[1]], [v1[2], v1[3]]];
    let m2 = [[v2[0], v2[1]], [v2[2], v2[3]]];
    let d1 = det2(&m1);
    let d2 = det2(&m2);
    // Bilinear mixed determinant: det(aM1 + bM2) = a²d1 + ab·mix + b²d2.
    let mix = m1[0][0] * m2[1][1] + m2[0][0] * m1[1][1] - m1[0][1] * m2[1][0] - m2[0][1] * m1[1][0];

    // Admissible mixing weight t: cos²t·λ1 + sin²t·λ2 > 2 for η > 0.
    let t_limit = if eta == 0.0 || l2 > 2.0 {
        std::f64::consts::FRAC_PI_2
    } else if l1 <= 2.0 {
        return Ok(0.0);
    } else {
        let cos_sq = ((2.0 - l2) / (l1 - l2)).clamp(0.0, 1.0);
        cos_sq.sqrt().acos() * (1.0 - 1e-9)
    };

    let concurrence = |t: f64, phi: f64| -> f64 {
        let t = t.clamp(0.0, t_limit);
        let (st, ct) = t.sin_cos();
        let phase = Complex64::new(0.0, phi).exp();
        let det = d1 * ct * ct + mix * phase * ct * st + d2 * phase * phase * st * st;
        2.0 * det.norm()
    };

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let t_steps = 400;
    let phi_steps = 256;
    for i in 0..=t_steps {
        let t = t_limit * i as f64 / t_steps as f64;
        for j in 0..phi_steps {
            let phi = std::f64::consts::TAU * j as f64 / phi_steps as f64;
            let c = concurrence(t, phi);
            if c > best.0 {
                best = (c, t, phi);
            }
        }
    }
    let objective = |x: &[f64]| -> f64 { -concurrence(x[0], x[1]) };
    let outcome = nelder_mead(
        &objective,
        &[best.1, best.2],
        &[
            t_limit / t_steps as f64,
            std::f64::consts::TAU / phi_steps as f64,
        ],
        600,
        1e-12,
    );
    Ok(best.0.max(-outcome.value))
}
