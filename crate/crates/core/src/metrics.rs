//! Accuracy metrics: MAE against the exact solution and its spread over runs.
//!
//! Sums here are compensated (Neumaier) so results do not depend on grid
//! ordering beyond the last few ulps.

use crate::error::{Error, Result};
use crate::network::ShallowNet;
use crate::problems::{default_config, EvalGrid, Points, ProblemSpec};
use crate::sampler;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn mae(pred: &[f64], exact: &[f64]) -> Result<f64> {
    if pred.len() != exact.len() {
        return Err(Error::invalid(format!("length mismatch: {} predictions, {} exact values", pred.len(), exact.len())));
    }
    if pred.is_empty() {
        return Err(Error::invalid("mae of empty lists"));
    }
    Ok(compensated_sum(pred.iter().zip(exact).map(|(p, e)| (p - e).abs())) / pred.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub mae: f64,
    pub n_eval_points: usize,
    pub per_point_abs_errors: Option<Vec<f64>>,
}

/// The closed equidistant evaluation grid of `problem` (endpoints included).
pub fn eval_points(problem: &ProblemSpec, grid: EvalGrid) -> Result<Points> {
    let n = grid.per_axis;
    match (problem.interval(), problem.rect()) {
        (Some(iv), _) => Ok(Points::from_1d(&sampler::equidistant(iv, n)?.points)),
        (_, Some(rect)) => {
            let xs = sampler::equidistant(rect.x, n)?;
            let ys = sampler::equidistant(rect.y, n)?;
            Ok(Points::from_2d(&sampler::tensor_grid(&xs, &ys)?.points))
        }
        _ => unreachable!("every problem has a domain"),
    }
}

pub fn default_eval_points(problem: &ProblemSpec) -> Result<Points> {
    eval_points(problem, default_config(problem.kind()).eval)
}

/// MAE of `net` against the exact solution over `points`.
pub fn evaluate(problem: &ProblemSpec, net: &ShallowNet, points: &Points, keep_errors: bool) -> Result<EvalResult> {
    evaluate_against(net, points, |p| problem.exact_solution(p), keep_errors)
}

/// MAE of `net` against an arbitrary reference function.
pub fn evaluate_against<F: Fn(&[f64]) -> f64>(
    net: &ShallowNet,
    points: &Points,
    exact: F,
    keep_errors: bool,
) -> Result<EvalResult> {
    let mut pred = Vec::with_capacity(points.len());
    let mut reference = Vec::with_capacity(points.len());
    for p in points.iter() {
        pred.push(net.forward(p)?);
        reference.push(exact(p));
    }
    let mae = mae(&pred, &reference)?;
    let per_point_abs_errors =
        keep_errors.then(|| pred.iter().zip(&reference).map(|(p, e)| (p - e).abs()).collect());
    Ok(EvalResult { mae, n_eval_points: points.len(), per_point_abs_errors })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub mean_mae: f64,
    /// Population standard deviation (divisor `runs`).
    pub sd: f64,
    pub runs: usize,
}

pub fn aggregate(maes: &[f64]) -> Result<Aggregate> {
    if maes.is_empty() {
        return Err(Error::invalid("aggregate of an empty list"));
    }
    let o = maes.len() as f64;
    let mean = compensated_sum(maes.iter().copied()) / o;
    let var = compensated_sum(maes.iter().map(|m| (m - mean) * (m - mean))) / o;
    Ok(Aggregate { mean_mae: mean, sd: var.sqrt(), runs: maes.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetLayout;
    use crate::problems::ProblemKind;
    use proptest::prelude::*;

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(matches!(mae(&[1.0], &[1.0, 2.0]), Err(Error::InvalidArgument(_))));
        assert!(mae(&[], &[]).is_err());
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate(&[5.0]).unwrap(), Aggregate { mean_mae: 5.0, sd: 0.0, runs: 1 });
        assert_eq!(aggregate(&[1.0; 4]).unwrap(), Aggregate { mean_mae: 1.0, sd: 0.0, runs: 4 });
        assert_eq!(aggregate(&[1.0, 3.0]).unwrap(), Aggregate { mean_mae: 2.0, sd: 1.0, runs: 2 });
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn self_comparison_is_zero() {
        let net = ShallowNet::init_glorot(NetLayout::new(1, vec![5]).unwrap(), 3);
        let p = ProblemSpec::standard(ProblemKind::Oscillator);
        let pts = default_eval_points(&p).unwrap();
        let r = evaluate_against(&net, &pts, |x| net.forward(x).unwrap(), true).unwrap();
        assert_eq!(r.mae, 0.0);
        assert_eq!(r.n_eval_points, 500);
        assert_eq!(r.per_point_abs_errors.unwrap().len(), 500);
    }

    #[test]
    fn zero_net_decay_lower_bound() {
        let p = ProblemSpec::standard(ProblemKind::Decay);
        let net = ShallowNet::zeros(NetLayout::new(1, vec![3]).unwrap());
        let pts = default_eval_points(&p).unwrap();
        let r = evaluate(&p, &net, &pts, false).unwrap();
        assert!(r.mae >= 100.0 / 500.0);
        assert!(r.per_point_abs_errors.is_none());
    }

    #[test]
    fn zero_net_poisson_mean_of_exact() {
        let p = ProblemSpec::poisson();
        let net = ShallowNet::zeros(NetLayout::new(2, vec![3]).unwrap());
        let r = evaluate(&p, &net, &default_eval_points(&p).unwrap(), false).unwrap();
        assert_eq!(r.n_eval_points, 10_000);
        // direct double loop over i/99, j/99
        let mut direct = 0.0;
        for i in 0..100 {
            for j in 0..100 {
                direct += (i as f64 / 99.0 * j as f64 / 99.0).exp();
            }
        }
        direct /= 10_000.0;
        assert!((r.mae - direct).abs() < 1e-12);
        assert!((r.mae - 1.318_738_324_062_987).abs() < 1e-12, "{}", r.mae);
    }

    proptest! {
        #[test]
        fn mae_symmetric_and_translation(v in proptest::collection::vec(-10.0f64..10.0, 1..50), c in -5.0f64..5.0) {
            let e: Vec<f64> = v.iter().map(|x| x * 0.5).collect();
            prop_assert_eq!(mae(&v, &e).unwrap(), mae(&e, &v).unwrap());
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            prop_assert!((mae(&shifted, &v).unwrap() - c.abs()).abs() < 1e-12);
        }

        #[test]
        fn sd_identity(v in proptest::collection::vec(0.0f64..1.0, 1..100)) {
            let a = aggregate(&v).unwrap();
            let mean_sq = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
            prop_assert!(((a.sd * a.sd + a.mean_mae * a.mean_mae) - mean_sq).abs() <= 1e-12 * mean_sq.max(1e-300));
            prop_assert!(a.sd >= 0.0);
        }

        #[test]
        fn order_independent(mut v in proptest::collection::vec(-3.0f64..3.0, 2..200), seed in any::<u64>()) {
            let e = vec![0.1; v.len()];
            let before = mae(&v, &e).unwrap();
            use rand::seq::SliceRandom;
            v.shuffle(&mut crate::rng::rng_from_seed(seed));
            let after = mae(&v, &e).unwrap();
            prop_assert!((before - after).abs() <= 1e-12 * before);
        }
    }
}
