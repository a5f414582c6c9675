//! Constrained minimization of free lateral area at fixed volume.
//!
//! Augmented-Lagrangian outer loop with a projected-gradient inner loop over
//! the box 0 ≤ r_i ≤ √(R² − x_i²). Multi-start: a lens initialization, a
//! flat-cut initialization (an independent basin), and seeded low-frequency
//! perturbations of the lens. Per start the multiplier is warm-started from
//! the median of the pointwise ratios ∂A/∂r : ∂V/∂r over free nodes, nodes
//! at r = 0 are never lifted (support can only shrink; lifting a dead node
//! has a first-order-invisible area jump), and the volume constraint is
//! restored by a Newton step along the volume gradient restricted to free
//! nodes before and after the loop.

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{cap_colatitude_for_volume, BallGeometry};
use crate::lens::solve_rho_for_volume;
use crate::profile::{self, node_bound, Profile};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Options for `minimize_profile_with`.
#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    /// Grid segments (m + 1 nodes). Minimum 100.
    pub m: usize,
    pub seed: u64,
    /// Left end of the support window; defaults to a padded window covering
    /// both the lens and the flat cut.
    pub x_lo: Option<f64>,
    /// Seeded perturbation starts on top of the lens and flat starts.
    pub perturbed_starts: usize,
    pub max_outer: usize,
    pub inner_budget: usize,
    /// Equality tolerance on the volume constraint.
    pub volume_tol: f64,
}

impl MinimizeOptions {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            m,
            seed,
            x_lo: None,
            perturbed_starts: 3,
            max_outer: 40,
            inner_budget: 500,
            volume_tol: 1e-8,
        }
    }
}

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct Minimized {
    pub profile: Profile,
    /// Free lateral area of the returned profile.
    pub area: f64,
    /// Euler–Lagrange multiplier estimate (the mean curvature the optimum
    /// should carry on its free part).
    pub lambda: f64,
    /// Whether the volume constraint was met within tolerance.
    pub converged: bool,
    /// |volume − eps| of the returned profile.
    pub volume_error: f64,
}

/// Minimize free area at fixed volume with default options.
pub fn minimize_profile(n: u32, eps: f64, m: usize, seed: u64) -> Result<Minimized> {
    minimize_profile_with(n, eps, &MinimizeOptions::new(m, seed))
}

/// Minimize free area at fixed volume eps over profiles inside U_n.
pub fn minimize_profile_with(n: u32, eps: f64, opts: &MinimizeOptions) -> Result<Minimized> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be >= 2, got {n}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if opts.m < 100 {
        return Err(Error::Domain(format!("m must be >= 100, got {}", opts.m)));
    }

    let ambient = BallGeometry::unit_volume(n)?;
    let r_amb = ambient.radius();
    let lens = solve_rho_for_volume(n, eps, 1e-12)?;
    let lens = *lens
        .lens()
        .ok_or_else(|| Error::Domain(format!("eps = {eps} is numerically the flat-cut limit")))?;
    let tip = lens.center_dist() - lens.rho();
    let theta_c = cap_colatitude_for_volume(&ambient, eps)?;
    let x_cut = r_amb * theta_c.cos();

    let support_left = tip.min(x_cut);
    let x_lo = opts
        .x_lo
        .unwrap_or_else(|| (support_left - 0.15 * (r_amb - support_left)).max(-0.5 * r_amb));
    if x_lo >= support_left {
        return Err(Error::Domain(format!(
            "x_lo = {x_lo} truncates the initial shapes (need <= {support_left})"
        )));
    }
    let grid = profile::linspace(x_lo, r_amb, opts.m + 1);
    let bound: Vec<f64> = grid.iter().map(|&x| node_bound(r_amb, x)).collect();

    // starts: lens, flat cut, seeded smooth perturbations of the lens
    let lens_radii: Vec<f64> = grid
        .iter()
        .zip(bound.iter())
        .map(|(&x, &b)| {
            if x < tip {
                0.0
            } else if x <= lens.plane_offset_u() {
                (lens.rho() * lens.rho() - (x - lens.center_dist()) * (x - lens.center_dist()))
                    .max(0.0)
                    .sqrt()
                    .min(b)
            } else {
                b
            }
        })
        .collect();
    let flat_radii: Vec<f64> = grid
        .iter()
        .zip(bound.iter())
        .map(|(&x, &b)| if x >= x_cut { b } else { 0.0 })
        .collect();

    let mut starts = vec![lens_radii.clone(), flat_radii];
    for s in 0..opts.perturbed_starts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(s as u64 + 1);
        let amps: Vec<f64> = (0..3).map(|_| 0.03 * (2.0 * rng.random::<f64>() - 1.0)).collect();
        let len = grid.len() as f64 - 1.0;
        let radii: Vec<f64> = lens_radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let t = i as f64 / len;
                let wave: f64 = amps
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * (std::f64::consts::PI * (k + 1) as f64 * t).sin())
                    .sum();
                (r * (1.0 + wave)).clamp(0.0, bound[i])
            })
            .collect();
        starts.push(radii);
    }

    let runs = exec::map_ordered(&starts, |radii| {
        run_start(n, r_amb, eps, &grid, &bound, radii.clone(), opts)
    });

    // best feasible area, ties broken by start order; otherwise the start
    // with the smallest constraint violation
    let mut best: Option<(usize, StartOutcome)> = None;
    for (i, run) in runs.into_iter().enumerate() {
        let better = match &best {
            None => true,
            Some((_, b)) => match (run.feasible, b.feasible) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => run.area < b.area,
                (false, false) => run.volume_error < b.volume_error,
            },
        };
        if better {
            best = Some((i, run));
        }
    }
    let (_, outcome) = best.expect("at least two starts always run");

    let profile = Profile::new(ambient, grid, outcome.radii, 0.0)?;
    Ok(Minimized {
        area: outcome.area,
        lambda: outcome.lambda,
        converged: outcome.feasible,
        volume_error: outcome.volume_error,
        profile,
    })
}

struct StartOutcome {
    radii: Vec<f64>,
    area: f64,
    lambda: f64,
    volume_error: f64,
    feasible: bool,
}

fn run_start(
    n: u32,
    r_amb: f64,
    eps: f64,
    grid: &[f64],
    bound: &[f64],
    mut radii: Vec<f64>,
    opts: &MinimizeOptions,
) -> StartOutcome {
    restore_volume(n, r_amb, eps, grid, bound, &mut radii);
    let init = snapshot(n, r_amb, eps, grid, &radii);

    let mut lambda = initial_multiplier(n, r_amb, grid, &radii);
    let mut mu = (10.0 * lambda.abs()).max(100.0);
    let mut prev_violation = f64::INFINITY;

    for outer in 0..opts.max_outer {
        let mut vals = profile::eval_with_grad(n, r_amb, grid, &radii);
        let mut al_value = al_of(&vals, eps, lambda, mu);
        let mut gradient = al_gradient(&vals, eps, lambda, mu);
        let mut step = 1e-3;
        for _ in 0..opts.inner_budget {
            let mut direction = gradient.clone();
            for (d, &r) in direction.iter_mut().zip(radii.iter()) {
                if r <= 0.0 {
                    *d = d.max(0.0); // dead nodes never lift
                }
            }
            let trial: Vec<f64> = radii
                .iter()
                .zip(direction.iter())
                .zip(bound.iter())
                .map(|((&r, &d), &b)| (r - step * d).clamp(0.0, b))
                .collect();
            let predicted: f64 = direction
                .iter()
                .zip(radii.iter().zip(trial.iter()))
                .map(|(&d, (&r, &t))| d * (r - t))
                .sum();
            let trial_vals = profile::eval(n, r_amb, grid, &trial);
            let c = trial_vals.volume - eps;
            let trial_al = trial_vals.area + lambda * c + 0.5 * mu * c * c;
            if predicted >= 0.0 && trial_al <= al_value - 1e-4 * predicted {
                radii = trial;
                vals = profile::eval_with_grad(n, r_amb, grid, &radii);
                al_value = al_of(&vals, eps, lambda, mu);
                gradient = al_gradient(&vals, eps, lambda, mu);
                step = (step * 1.4).min(1.0);
            } else {
                step *= 0.4;
                if step < 1e-15 {
                    break;
                }
            }
        }
        let violation = (vals.volume - eps).abs();
        lambda += mu * (vals.volume - eps);
        if violation > 0.25 * prev_violation {
            mu = (mu * 5.0).min(1e13);
        }
        prev_violation = violation;
        if violation < 5e-9 && outer >= 6 {
            break;
        }
    }

    restore_volume(n, r_amb, eps, grid, bound, &mut radii);
    let fin = snapshot(n, r_amb, eps, grid, &radii);

    // return the best feasible point this start has seen
    let pick_init = match (init.feasible, fin.feasible) {
        (true, false) => true,
        (false, true) => false,
        _ => init.area < fin.area && init.feasible,
    };
    if pick_init {
        init
    } else {
        fin
    }
}

fn al_of(vals: &profile::FunctionalGradients, eps: f64, lambda: f64, mu: f64) -> f64 {
    let c = vals.volume - eps;
    vals.area + lambda * c + 0.5 * mu * c * c
}

fn al_gradient(vals: &profile::FunctionalGradients, eps: f64, lambda: f64, mu: f64) -> Vec<f64> {
    let c = vals.volume - eps;
    let w = lambda + mu * c;
    vals.grad_area
        .iter()
        .zip(vals.grad_volume.iter())
        .map(|(&ga, &gv)| ga + w * gv)
        .collect()
}

/// Median of ∂A/∂r : ∂V/∂r over free nodes; −median is the warm-start AL
/// multiplier (the lens is pointwise stationary for it away from contact).
fn initial_multiplier(n: u32, r_amb: f64, grid: &[f64], radii: &[f64]) -> f64 {
    let vals = profile::eval_with_grad(n, r_amb, grid, radii);
    let mut ratios: Vec<f64> = (0..radii.len())
        .filter(|&i| !vals.clip[i] && radii[i] > 0.0 && vals.grad_volume[i] > 1e-300)
        .map(|i| vals.grad_area[i] / vals.grad_volume[i])
        .collect();
    if ratios.len() < 4 {
        return 0.0;
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    -ratios[ratios.len() / 2]
}

/// Newton correction along the volume gradient restricted to free nodes,
/// driving |volume − eps| below 1e-12 without touching the clip pattern.
fn restore_volume(n: u32, r_amb: f64, eps: f64, grid: &[f64], bound: &[f64], radii: &mut [f64]) {
    for _ in 0..60 {
        let vals = profile::eval_with_grad(n, r_amb, grid, radii);
        let c = vals.volume - eps;
        if c.abs() <= 1e-12 {
            return;
        }
        let mut denom = 0.0;
        for i in 0..radii.len() {
            if !vals.clip[i] && radii[i] > 0.0 {
                denom += vals.grad_volume[i] * vals.grad_volume[i];
            }
        }
        if denom <= 0.0 {
            return;
        }
        let t = -c / denom;
        for i in 0..radii.len() {
            if !vals.clip[i] && radii[i] > 0.0 {
                radii[i] = (radii[i] + t * vals.grad_volume[i]).clamp(0.0, bound[i]);
            }
        }
    }
}

fn snapshot(n: u32, r_amb: f64, eps: f64, grid: &[f64], radii: &[f64]) -> StartOutcome {
    let vals = profile::eval(n, r_amb, grid, radii);
    let volume_error = (vals.volume - eps).abs();
    StartOutcome {
        radii: radii.to_vec(),
        area: vals.area,
        lambda: -initial_multiplier(n, r_amb, grid, radii),
        volume_error,
        feasible: volume_error <= 1e-8,
    }
}
