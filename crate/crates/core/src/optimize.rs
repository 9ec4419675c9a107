//! Minimal output entropy by descent over unit input vectors.
//!
//! Each restart draws a complex Gaussian start vector and runs a backtracking
//! descent on the sphere. The gradient is a forward finite difference over the
//! `2D` real coordinates of the state, projected onto the tangent space (radial
//! and global-phase directions removed). A trial point is `normalize(x − t ĝ)`;
//! it is accepted only if the objective strictly decreases, otherwise `t` is
//! shrunk. The best restart gives an upper bound on the infimum.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::ProductChannel;
use crate::dims::{SiteDims, SubsetMask};
use crate::entropy::{
    clip_spectrum, entropy_output_in, pnorm_from_spectrum, pnorm_to_entropy, renyi_from_spectrum, ExponentRange,
};
use crate::error::{Error, Result};
use crate::expansion::{additivity_rhs, subset_purities};
use crate::linalg::{eigvalsh, ComplexMatrix};
use crate::random::{gaussian_vector, rng_from_seed, sub_seed};
use crate::state::{l2_norm, PureState};

/// Additivity is violated if the product estimate falls below the analytic sum
/// by more than this.
pub const GAP_LOWER_TOL: f64 = 1e-6;
/// The optimizer is considered to have found the product-state minimum when
/// it lands within this distance above the analytic sum.
pub const GAP_UPPER_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Gradient evaluations per restart.
    pub max_iters: usize,
    pub initial_step: f64,
    pub step_shrink: f64,
    /// Stop once an accepted step lowers the objective by less than this.
    pub converge_tol: f64,
    /// Stop once the trial step falls below this.
    pub min_step: f64,
    /// Finite-difference step for the gradient.
    pub fd_step: f64,
    pub seed: u64,
    /// Worker threads for restarts; results do not depend on this.
    pub threads: usize,
    pub exponent_range: ExponentRange,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 2000,
            initial_step: 0.1,
            step_shrink: 0.5,
            converge_tol: 1e-12,
            min_step: 1e-14,
            fd_step: 1e-6,
            seed: 0,
            threads: 1,
            exponent_range: ExponentRange::Standard,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.restarts < 1 {
            return bad("restarts must be at least 1");
        }
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1");
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return bad("step_shrink must lie in (0, 1)");
        }
        if !(self.converge_tol > 0.0) {
            return bad("converge_tol must be positive");
        }
        if !(self.initial_step > 0.0) || !(self.min_step > 0.0) || !(self.fd_step > 0.0) {
            return bad("step sizes must be positive");
        }
        if self.threads < 1 {
            return bad("threads must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best_value: f64,
    pub best_state: PureState,
    pub best_restart: usize,
    pub p: f64,
    pub dims: SiteDims,
    pub per_restart_values: Vec<f64>,
    pub iterations_used: Vec<usize>,
    /// Accepted objective values per restart, starting point first.
    pub traces: Vec<Vec<f64>>,
}

/// Outcome of a single descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub value: f64,
    pub state: Vec<Complex64>,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = l2_norm(&v);
    for z in &mut v {
        *z /= n;
    }
    v
}

/// Real inner product on `R^{2D}`: `Re <a, b>`.
fn real_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

fn tangent_gradient<F>(objective: &F, x: &[Complex64], fx: f64, h: f64) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Result<f64>,
{
    let mut grad = vec![Complex64::new(0.0, 0.0); x.len()];
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        for (unit, part) in [(Complex64::new(h, 0.0), 0), (Complex64::new(0.0, h), 1)] {
            probe[k] = x[k] + unit;
            let fp = objective(&normalize(probe.clone()))?;
            probe[k] = x[k];
            let d = (fp - fx) / h;
            if part == 0 {
                grad[k].re = d;
            } else {
                grad[k].im = d;
            }
        }
    }
    // remove the radial and global-phase components
    let radial = real_dot(x, &grad);
    let ix: Vec<Complex64> = x.iter().map(|z| z * Complex64::new(0.0, 1.0)).collect();
    let phase = real_dot(&ix, &grad);
    for k in 0..x.len() {
        grad[k] -= x[k] * radial + ix[k] * phase;
    }
    Ok(grad)
}

/// Backtracking descent from `start`. `on_accept` sees the starting point and
/// every accepted point together with its objective value.
pub fn descend<F>(
    objective: &F,
    start: Vec<Complex64>,
    cfg: &OptimizerConfig,
    mut on_accept: impl FnMut(&[Complex64], f64),
) -> Result<Descent>
where
    F: Fn(&[Complex64]) -> Result<f64>,
{
    let mut x = normalize(start);
    let mut fx = objective(&x)?;
    on_accept(&x, fx);
    let mut trace = vec![fx];
    let mut step = cfg.initial_step;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        let grad = tangent_gradient(objective, &x, fx, cfg.fd_step)?;
        let gnorm = l2_norm(&grad);
        if !(gnorm > 0.0) {
            break;
        }
        let mut accepted = None;
        while step >= cfg.min_step {
            let trial: Vec<Complex64> = x.iter().zip(&grad).map(|(xi, gi)| xi - gi * (step / gnorm)).collect();
            let trial = normalize(trial);
            let ft = objective(&trial)?;
            if ft < fx {
                accepted = Some((trial, ft));
                break;
            }
            step *= cfg.step_shrink;
        }
        let Some((next, fnext)) = accepted else {
            break;
        };
        let change = fx - fnext;
        x = next;
        fx = fnext;
        on_accept(&x, fx);
        trace.push(fx);
        step = (step / cfg.step_shrink).min(cfg.initial_step);
        if change < cfg.converge_tol {
            break;
        }
    }
    Ok(Descent {
        value: fx,
        state: x,
        iterations,
        trace,
    })
}

/// Output spectrum of the product channel on `|v><v|`, rounding negatives clipped.
fn output_spectrum(pc: &ProductChannel, v: &[Complex64]) -> Result<Vec<f64>> {
    let out = pc.apply_operator(&ComplexMatrix::outer(v, v))?;
    clip_spectrum(eigvalsh(&out)?)
}

fn check_problem(p: f64, cfg: &OptimizerConfig) -> Result<()> {
    cfg.validate()?;
    cfg.exponent_range.check(p)
}

type Observer<'a> = &'a (dyn Fn(usize, &[Complex64], f64) + Sync);

fn run_restarts<F>(
    pc: &ProductChannel,
    objective: &F,
    cfg: &OptimizerConfig,
    observer: Option<Observer<'_>>,
) -> Result<Vec<Descent>>
where
    F: Fn(&[Complex64]) -> Result<f64> + Sync,
{
    let total = pc.dims().total();
    let one = |k: usize| -> Result<Descent> {
        let mut rng = rng_from_seed(sub_seed(cfg.seed, k as u64));
        let start = gaussian_vector(&mut rng, total);
        descend(objective, start, cfg, |x, f| {
            if let Some(obs) = observer {
                obs(k, x, f);
            }
        })
    };
    if cfg.threads <= 1 {
        (0..cfg.restarts).map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| (0..cfg.restarts).into_par_iter().map(one).collect())
    }
}

fn collect_result(pc: &ProductChannel, p: f64, cfg: &OptimizerConfig, runs: Vec<Descent>) -> Result<OptResult> {
    let best_restart = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .map(|(k, _)| k)
        .expect("at least one restart");
    let best_state = PureState::normalized(runs[best_restart].state.clone(), pc.dims().clone())?;
    // re-evaluate on the renormalized state so the reported value is exactly reproducible
    let best_value = entropy_output_in(pc, &best_state, p, cfg.exponent_range)?;
    let mut per_restart_values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    per_restart_values[best_restart] = best_value;
    Ok(OptResult {
        best_value,
        best_state,
        best_restart,
        p,
        dims: pc.dims().clone(),
        per_restart_values,
        iterations_used: runs.iter().map(|r| r.iterations).collect(),
        traces: runs.into_iter().map(|r| r.trace).collect(),
    })
}

/// Upper bound on `inf_φ S_p(Γ(|φ><φ|))`.
pub fn minimize_entropy_output(pc: &ProductChannel, p: f64, cfg: &OptimizerConfig) -> Result<OptResult> {
    minimize_inner(pc, p, cfg, None)
}

/// As [`minimize_entropy_output`], calling `observer(restart, state, value)` on
/// every visited point.
pub fn minimize_entropy_output_observed(
    pc: &ProductChannel,
    p: f64,
    cfg: &OptimizerConfig,
    observer: &(dyn Fn(usize, &[Complex64], f64) + Sync),
) -> Result<OptResult> {
    minimize_inner(pc, p, cfg, Some(observer))
}

fn minimize_inner(
    pc: &ProductChannel,
    p: f64,
    cfg: &OptimizerConfig,
    observer: Option<Observer<'_>>,
) -> Result<OptResult> {
    check_problem(p, cfg)?;
    let objective = |v: &[Complex64]| -> Result<f64> { Ok(renyi_from_spectrum(&output_spectrum(pc, v)?, p)) };
    let runs = run_restarts(pc, &objective, cfg, observer)?;
    collect_result(pc, p, cfg, runs)
}

/// Estimate of `ν_p = sup_φ ‖Γ(|φ><φ|)‖_p`, `1 < p ≤ 2`.
///
/// The descent runs on `−(p/(p−1)) log ‖·‖_p` with the same restart seeds as
/// [`minimize_entropy_output`].
pub fn maximize_pnorm(pc: &ProductChannel, p: f64, cfg: &OptimizerConfig) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    check_problem(p, cfg)?;
    let objective =
        |v: &[Complex64]| -> Result<f64> { Ok(pnorm_to_entropy(pnorm_from_spectrum(&output_spectrum(pc, v)?, p), p)) };
    let runs = run_restarts(pc, &objective, cfg, None)?;
    let best = runs.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    Ok((-(p - 1.0) / p * best).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityCertificate {
    pub dims: SiteDims,
    pub p: f64,
    pub meo_product_estimate: f64,
    pub meo_sum_of_singles: f64,
    /// `meo_product_estimate − meo_sum_of_singles`.
    pub gap: f64,
    /// `max_Λ (1 − tr ρ_Λ²)` at the best state found.
    pub argmin_product_distance: f64,
    pub optimization: OptResult,
}

impl AdditivityCertificate {
    pub fn passes(&self) -> bool {
        self.gap >= -GAP_LOWER_TOL && self.gap <= GAP_UPPER_TOL
    }
}

/// Compares the optimizer's bound for `⊗_j Γ_{d_j}` with `Σ_j log(d_j − 1)`.
pub fn certify_additivity(dims: &SiteDims, p: f64, cfg: &OptimizerConfig) -> Result<AdditivityCertificate> {
    if dims.num_sites() < 2 {
        return Err(Error::InvalidDims("additivity needs at least two sites".into()));
    }
    ExponentRange::Standard.check(p)?;
    let pc = ProductChannel::from_dims(dims);
    let optimization = minimize_entropy_output(&pc, p, cfg)?;
    let meo_sum_of_singles = additivity_rhs(dims);
    let purities = subset_purities(dims, &optimization.best_state)?;
    let argmin_product_distance = purities
        .iter()
        .filter(|(m, _)| **m != SubsetMask::EMPTY)
        .map(|(_, &pur)| 1.0 - pur)
        .fold(0.0, f64::max);
    Ok(AdditivityCertificate {
        dims: dims.clone(),
        p,
        meo_product_estimate: optimization.best_value,
        meo_sum_of_singles,
        gap: optimization.best_value - meo_sum_of_singles,
        argmin_product_distance,
        optimization,
    })
}
