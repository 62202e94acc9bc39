//! Small statistical helpers: least-squares line fits for convergence and
//! divergence certification, and total-variation distance between discrete
//! distributions.

use crate::error::{Error, Result};

/// Ordinary least-squares fit y = slope * x + intercept.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 means the points are exactly affine.
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("line fit needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("line fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // r^2 = 1 - SS_res / SS_tot; constant y gives a perfect horizontal fit
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - (syy - sxy * sxy / sxx) / syy };
    Ok(LineFit { slope, intercept, r_squared })
}

/// Log-log slope of |err| against n; pairs with err = 0 are rejected because
/// the decay order is then sharper than any power law we could report.
pub fn log_log_slope(ns: &[f64], errs: &[f64]) -> Result<LineFit> {
    if errs.iter().any(|&e| e <= 0.0) || ns.iter().any(|&n| n <= 0.0) {
        return Err(Error::InvalidArgument("log-log fit needs strictly positive data".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    fit_line(&xs, &ys)
}

/// Total-variation distance between two sub-probability vectors, counting any
/// unassigned tail mass as disagreement: TV = (sum |p_i - q_i| + |tail_p - tail_q|...) / 2.
/// Both inputs are padded with zeros to a common length, then each vector's
/// deficit from 1 is treated as mass the other one cannot match.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let mut acc = 0.0;
    let mut sum_p = 0.0;
    let mut sum_q = 0.0;
    for i in 0..len {
        let pi = p.get(i).copied().unwrap_or(0.0);
        let qi = q.get(i).copied().unwrap_or(0.0);
        acc += (pi - qi).abs();
        sum_p += pi;
        sum_q += qi;
    }
    acc += ((1.0 - sum_p).max(0.0) - (1.0 - sum_q).max(0.0)).abs();
    0.5 * acc
}

/// Poisson probability mass function values 0..=n_top for mean lambda.
pub fn poisson_pmf(lambda: f64, n_top: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_top + 1);
    let mut term = (-lambda).exp();
    out.push(term);
    for n in 1..=n_top {
        term *= lambda / n as f64;
        out.push(term);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_has_unit_r_squared() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -2.0 * x + 0.5).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-14);
        assert!((fit.intercept - 0.5).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_log_recovers_power_law() {
        let ns = [4.0, 8.0, 16.0, 32.0];
        let errs: Vec<f64> = ns.iter().map(|n| 3.0 / n).collect();
        let fit = log_log_slope(&ns, &errs).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tv_counts_missing_tail() {
        // p concentrated on 0, q sub-normalized with hidden tail mass 0.5
        let p = [1.0];
        let q = [0.5];
        assert!((total_variation(&p, &q) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn poisson_pmf_sums_close_to_one() {
        let p = poisson_pmf(0.7, 40);
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
