use serde::Serialize;

use crate::error::{Error, Result};

/// Default safety margin on the fixed point.
pub const DEFAULT_EPSILON: f64 = 0.001;

const TOLERANCE: f64 = 1e-12;
const MAX_ITER: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoSolution {
    pub t: f64,
    pub rho_star: f64,
    pub epsilon: f64,
    pub rho: f64,
    pub iterations: usize,
}

fn map(t: f64, x: f64) -> f64 {
    -(-t * x).exp_m1()
}

/// Non-zero fixed point of `x = 1 - exp(-t x)` by iteration from `x = 1`,
/// then `rho = (1 - epsilon) rho*`.
pub fn solve_rho_star(t: f64, epsilon: f64) -> Result<RhoSolution> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::NoSolution(t));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParams(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let mut x = 1.0;
    let mut iterations = 0;
    loop {
        let next = map(t, x);
        iterations += 1;
        let step = (next - x).abs();
        x = next;
        if step <= TOLERANCE || iterations >= MAX_ITER {
            break;
        }
    }
    // Newton on g(x) = x - 1 + exp(-t x) to tighten the last digits
    for _ in 0..4 {
        let g = x - map(t, x);
        let dg = 1.0 - t * (-t * x).exp();
        if dg.abs() < f64::EPSILON {
            break;
        }
        let next = x - g / dg;
        if !(next > 0.0 && next <= 1.0) {
            break;
        }
        x = next;
    }
    Ok(RhoSolution {
        t,
        rho_star: x,
        epsilon,
        rho: (1.0 - epsilon) * x,
        iterations,
    })
}

pub fn residual(t: f64, x: f64) -> f64 {
    (x - map(t, x)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bisect(t: f64) -> f64 {
        let g = |x: f64| x - 1.0 + (-t * x).exp();
        let (mut lo, mut hi) = (0.5, 1.0);
        assert!(g(lo) < 0.0 && g(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn t_two_matches_bisection() {
        let s = solve_rho_star(2.0, 0.001).unwrap();
        assert!((s.rho_star - bisect(2.0)).abs() <= 1e-10);
        assert!((s.rho_star - 0.796812).abs() < 1e-6);
        assert!(residual(2.0, s.rho_star) <= 1e-12);
        assert!(s.rho < s.rho_star);
    }

    #[test]
    fn large_t_approaches_one() {
        let s = solve_rho_star(50.0, 0.001).unwrap();
        assert!((s.rho_star - (1.0 - (-50f64).exp())).abs() <= 1e-20);
    }

    #[test]
    fn residuals() {
        for t in [1.1, 1.5, 2.0, 5.0, 50.0] {
            let s = solve_rho_star(t, 0.05).unwrap();
            assert!(residual(t, s.rho_star) <= 1e-12, "t = {t}");
            assert!(s.rho_star > 0.0 && s.rho_star <= 1.0);
        }
    }

    #[test]
    fn t_one_has_no_solution() {
        assert_eq!(solve_rho_star(1.0, 0.001), Err(Error::NoSolution(1.0)));
        assert!(solve_rho_star(0.5, 0.001).is_err());
        assert!(solve_rho_star(2.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn bracket_and_residual(t in 1.05f64..40.0) {
            let g = |x: f64| x - 1.0 + (-t * x).exp();
            prop_assert!(g(1e-9) < 0.0);
            prop_assert!(g(1.0) > 0.0);
            let s = solve_rho_star(t, 0.001).unwrap();
            prop_assert!(residual(t, s.rho_star) <= 1e-12);
            prop_assert!(s.rho_star > 0.0 && s.rho_star <= 1.0);
        }
    }
}
