//! Thin multistart layer over argmin's Nelder–Mead.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iters: u64,
    /// Stop when the standard deviation of simplex costs drops below this.
    pub tolerance: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_iters: 2000, tolerance: 1e-8, initial_step: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub value: f64,
    pub point: Vec<f64>,
    pub converged: bool,
}

struct Objective<'a, F>(&'a F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        let v = (self.0)(p);
        Ok(if v.is_finite() { v } else { f64::MAX })
    }
}

/// Minimizes `obj` from `start`. Non-finite objective values are treated as +∞.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(obj: &F, start: Vec<f64>, opts: &SimplexOptions) -> Minimum {
    let mut simplex = vec![start.clone()];
    for i in 0..start.len() {
        let mut v = start.clone();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(opts.tolerance).expect("tolerance is non-negative");
    let run = Executor::new(Objective(obj), solver).configure(|s| s.max_iters(opts.max_iters)).run();
    match run {
        Ok(res) => {
            let state = res.state();
            let point = state.get_best_param().cloned().unwrap_or(start);
            let converged = matches!(
                state.get_termination_status(),
                TerminationStatus::Terminated(TerminationReason::SolverConverged)
            );
            Minimum { value: state.get_best_cost(), point, converged }
        }
        Err(_) => Minimum { value: obj(&start), point: start, converged: false },
    }
}

/// Runs one Nelder–Mead per start (in parallel) and returns all minima in
/// start order, so reductions over them are deterministic.
pub fn multistart<F>(obj: &F, starts: Vec<Vec<f64>>, opts: &SimplexOptions) -> Vec<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    starts.into_par_iter().map(|s| nelder_mead(obj, s, opts)).collect()
}

/// Index of the smallest value; ties go to the earliest index.
pub fn argmin_of(minima: &[Minimum]) -> Option<usize> {
    minima
        .iter()
        .enumerate()
        .filter(|(_, m)| m.value.is_finite())
        .fold(None, |best: Option<(usize, f64)>, (i, m)| match best {
            Some((_, v)) if v <= m.value => best,
            _ => Some((i, m.value)),
        })
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(&f, vec![-1.2, 1.0], &SimplexOptions { max_iters: 5000, tolerance: 1e-14, initial_step: 0.5 });
        assert!(m.value < 1e-8, "{m:?}");
        assert!((m.point[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn multistart_picks_global_basin() {
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2) + 0.1 * x[0];
        let starts = vec![vec![2.0], vec![-2.0]];
        let ms = multistart(&f, starts, &SimplexOptions::default());
        let best = argmin_of(&ms).unwrap();
        assert_eq!(best, 1);
        assert!(ms[1].point[0] < 0.0);
    }

    #[test]
    fn non_finite_is_rejected() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) };
        let m = nelder_mead(&f, vec![0.1], &SimplexOptions::default());
        assert!((m.point[0] - 0.5).abs() < 1e-3);
    }
}
