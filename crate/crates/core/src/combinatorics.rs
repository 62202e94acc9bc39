//! Coincidence combinatorics for vacuum correlation functions.
//!
//! The ensemble average of a normally ordered string
//! <a(f_1) .. a(f_m) a(g_1)^dag .. a(g_m)^dag> at ensemble size N is a sum
//! over permutations sigma (pairing each f_j with g_sigma(j)) and over set
//! partitions P of {1..m} (recording which of the m momentum integrals hit
//! the same oscillator). A partition with b blocks carries the multiplicity
//! weight N (N-1) .. (N-b+1) / N^m, and each block collapses its momenta to
//! a single grid point with a single vacuum factor Z:
//!
//! ```text
//! sum_sigma sum_P weight(P, N) prod_{B in P}
//!     sum_i w_i Z_i prod_{j in B} h_{j, sigma(j)}(i)
//! ```
//!
//! where h_{j,l}(i) = sum_s conj(f_j(k_i,s)) g_l(k_i,s). Only the
//! all-singleton partition survives N -> infinity, leaving the permanent of
//! the Gram matrix G_{jl} = <f_j|g_l>_Z; every coincidence class dies like a
//! power of 1/N. Multiplicity weights are computed in exact rational
//! arithmetic and converted to floats once per partition.

use crate::error::{Error, Result};
use crate::grid::{inner_product_z, PolarizedAmplitude, VacuumProfile};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Ryser's inclusion-exclusion permanent is O(2^m m); beyond this order the
/// desk-scale budget is gone.
pub const PERMANENT_ORDER_CAP: usize = 12;

/// Iterator over all set partitions of {0, .., m-1}, encoded as restricted
/// growth strings: a[0] = 0 and a[j] <= 1 + max(a[0..j]). The string value
/// a[j] is the block index of element j.
pub struct SetPartitions {
    a: Vec<usize>,
    prefix_max: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(m: usize) -> Self {
        SetPartitions { a: vec![0; m], prefix_max: vec![0; m], fresh: true, done: m == 0 }
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.a.clone());
        }
        let m = self.a.len();
        // increment the rightmost digit that still has headroom
        let mut j = m;
        loop {
            if j == 1 {
                self.done = true;
                return None;
            }
            j -= 1;
            if self.a[j] <= self.prefix_max[j - 1] {
                break;
            }
        }
        self.a[j] += 1;
        self.prefix_max[j] = self.prefix_max[j - 1].max(self.a[j]);
        for t in j + 1..m {
            self.a[t] = 0;
            self.prefix_max[t] = self.prefix_max[t - 1];
        }
        Some(self.a.clone())
    }
}

fn block_count(rgs: &[usize]) -> usize {
    rgs.iter().copied().max().map_or(0, |b| b + 1)
}

/// Exact multiplicity weight of a partition with `blocks` blocks:
/// N (N-1) .. (N-blocks+1) / N^m. Zero when blocks > N.
pub fn partition_weight_exact(m: usize, n_osc: usize, blocks: usize) -> BigRational {
    let n = BigInt::from(n_osc);
    let mut num = BigInt::one();
    for t in 0..blocks {
        num *= &n - BigInt::from(t);
    }
    let den = n.pow(m as u32);
    BigRational::new(num, den)
}

/// Probability that a uniform assignment of m integrals to N oscillators
/// shows exactly j coincidences (i.e. lands on m - j distinct oscillators),
/// in exact rational arithmetic. The class probabilities sum to one exactly.
pub fn class_probability_exact(m: usize, n_osc: usize, j: usize) -> Result<BigRational> {
    if n_osc == 0 {
        return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
    }
    if j >= m {
        return Err(Error::InvalidArgument(format!("coincidence count j = {j} needs j < m = {m}")));
    }
    let target_blocks = m - j;
    let mut total = BigRational::zero();
    let weight = partition_weight_exact(m, n_osc, target_blocks);
    for rgs in SetPartitions::new(m) {
        if block_count(&rgs) == target_blocks {
            total += weight.clone();
        }
    }
    Ok(total)
}

pub fn class_probability(m: usize, n_osc: usize, j: usize) -> Result<f64> {
    Ok(class_probability_exact(m, n_osc, j)?.to_f64().unwrap())
}

fn check_family(
    fs: &[PolarizedAmplitude],
    gs: &[PolarizedAmplitude],
    profile: &VacuumProfile,
) -> Result<()> {
    for a in fs.iter().chain(gs) {
        if !a.grid().compatible(profile.grid()) {
            return Err(Error::InvalidArgument("amplitude lives on a different grid than the profile".into()));
        }
    }
    Ok(())
}

/// Gram matrix G_{jl} = <f_j|g_l>_Z, row-major.
pub fn gram_matrix(
    fs: &[PolarizedAmplitude],
    gs: &[PolarizedAmplitude],
    profile: &VacuumProfile,
) -> Result<Vec<Complex64>> {
    check_family(fs, gs, profile)?;
    let mut out = Vec::with_capacity(fs.len() * gs.len());
    for f in fs {
        for g in gs {
            out.push(inner_product_z(f, g, profile)?);
        }
    }
    Ok(out)
}

/// Permanent of an m x m complex matrix by Ryser's formula with Gray-code
/// subset updates: perm(A) = (-1)^m sum_{S nonempty} (-1)^{|S|}
/// prod_i sum_{j in S} A_{ij}.
pub fn permanent(matrix: &[Complex64], m: usize) -> Result<Complex64> {
    if matrix.len() != m * m {
        return Err(Error::ShapeMismatch { expected: m * m, got: matrix.len() });
    }
    if m == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if m > PERMANENT_ORDER_CAP {
        return Err(Error::PermanentTooLarge { m, cap: PERMANENT_ORDER_CAP });
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); m];
    let mut total = Complex64::new(0.0, 0.0);
    let mut prev_gray: u64 = 0;
    for t in 1u64..(1 << m) {
        let gray = t ^ (t >> 1);
        let flipped = (gray ^ prev_gray).trailing_zeros() as usize;
        let added = gray & (1 << flipped) != 0;
        for i in 0..m {
            let a = matrix[i * m + flipped];
            if added {
                row_sums[i] += a;
            } else {
                row_sums[i] -= a;
            }
        }
        prev_gray = gray;
        let product: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total -= product;
        } else {
            total += product;
        }
    }
    // the loop accumulated (-1)^{|S|+1} prod; fold in the global (-1)^m
    if m % 2 == 0 {
        total = -total;
    }
    Ok(total)
}

/// Large-N limit of the normally ordered correlator: the permanent of the
/// Gram matrix. Zero whenever the operator counts differ, because surplus
/// annihilators meet the vacuum.
pub fn limit_correlator(
    fs: &[PolarizedAmplitude],
    gs: &[PolarizedAmplitude],
    profile: &VacuumProfile,
) -> Result<Complex64> {
    check_family(fs, gs, profile)?;
    if fs.len() != gs.len() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let gram = gram_matrix(fs, gs, profile)?;
    permanent(&gram, fs.len())
}

/// Finite-N vacuum correlator by the permutation-partition sum quoted in the
/// module docs. Exact in the untruncated oscillator algebra; the dense brute
/// force over an explicit ensemble is the independent cross-check.
pub fn finite_n_correlator(
    fs: &[PolarizedAmplitude],
    gs: &[PolarizedAmplitude],
    profile: &VacuumProfile,
    n_osc: usize,
) -> Result<Complex64> {
    check_family(fs, gs, profile)?;
    if n_osc == 0 {
        return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
    }
    if fs.len() != gs.len() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let m = fs.len();
    if m == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if m > PERMANENT_ORDER_CAP {
        return Err(Error::PermanentTooLarge { m, cap: PERMANENT_ORDER_CAP });
    }
    let grid = profile.grid();
    let k = grid.len();

    // pairing densities h[j][l][i] = sum_s conj(f_j) g_l at point i
    let mut density = vec![vec![Complex64::new(0.0, 0.0); k]; m * m];
    for (j, f) in fs.iter().enumerate() {
        for (l, g) in gs.iter().enumerate() {
            density[j * m + l] = f.pairing_density(g)?;
        }
    }
    let wz: Vec<f64> = (0..k).map(|i| grid.weight(i) * profile.z(i)).collect();

    let partitions: Vec<(Vec<usize>, f64)> = SetPartitions::new(m)
        .map(|rgs| {
            let b = block_count(&rgs);
            let w = partition_weight_exact(m, n_osc, b).to_f64().unwrap();
            (rgs, w)
        })
        .collect();

    let mut total = Complex64::new(0.0, 0.0);
    let mut sigma: Vec<usize> = (0..m).collect();
    permute(&mut sigma, 0, &mut |sigma| {
        for (rgs, weight) in &partitions {
            if *weight == 0.0 {
                continue;
            }
            let blocks = block_count(rgs);
            let mut product = Complex64::new(1.0, 0.0);
            for block in 0..blocks {
                // merged integral of the block: one grid sum, one Z factor
                let mut block_sum = Complex64::new(0.0, 0.0);
                for i in 0..k {
                    let mut point = Complex64::new(wz[i], 0.0);
                    for (j, &bj) in rgs.iter().enumerate() {
                        if bj == block {
                            point *= density[j * m + sigma[j]][i];
                        }
                    }
                    block_sum += point;
                }
                product *= block_sum;
            }
            total += *weight * product;
        }
    });
    Ok(total)
}

/// Heap's algorithm; visits each permutation of `items` exactly once.
fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    let n = items.len();
    if k == n {
        visit(items);
        return;
    }
    for t in k..n {
        items.swap(k, t);
        permute(items, k + 1, visit);
        items.swap(k, t);
    }
}

/// One row of a convergence study towards the permanent limit.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub n_osc: usize,
    pub finite_value: Complex64,
    pub limit_value: Complex64,
    pub abs_error: f64,
}

/// Finite-N values against the permanent limit for each requested N.
pub fn convergence_study(
    fs: &[PolarizedAmplitude],
    gs: &[PolarizedAmplitude],
    profile: &VacuumProfile,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let limit = limit_correlator(fs, gs, profile)?;
    n_list
        .iter()
        .map(|&n_osc| {
            let finite = finite_n_correlator(fs, gs, profile, n_osc)?;
            Ok(ConvergenceRow { n_osc, finite_value: finite, limit_value: limit, abs_error: (finite - limit).norm() })
        })
        .collect()
}

/// RFC 4180 table with columns N,finite_value_re,finite_value_im,limit_re,limit_im,abs_error.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("N,finite_value_re,finite_value_im,limit_re,limit_im,abs_error\r\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}\r",
            r.n_osc, r.finite_value.re, r.finite_value.im, r.limit_value.re, r.limit_value.im, r.abs_error
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Helicity, MomentumGrid, VacuumProfile};
    use num_traits::FromPrimitive;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partition_counts_match_bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877];
        for (m, &b) in bell.iter().enumerate().skip(1) {
            assert_eq!(SetPartitions::new(m).count(), b, "Bell({m})");
        }
    }

    #[test]
    fn partitions_are_valid_growth_strings_and_distinct() {
        let all: Vec<Vec<usize>> = SetPartitions::new(5).collect();
        for rgs in &all {
            assert_eq!(rgs[0], 0);
            let mut max = 0;
            for &v in rgs {
                assert!(v <= max + 1);
                max = max.max(v);
            }
        }
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
    }

    /// Oracle: enumerate all N^m assignments and count coincidence classes.
    fn class_probability_by_enumeration(m: usize, n_osc: usize, j: usize) -> f64 {
        let total = (n_osc as u64).pow(m as u32);
        let mut hits = 0u64;
        for code in 0..total {
            let mut digits = Vec::with_capacity(m);
            let mut c = code;
            for _ in 0..m {
                digits.push(c % n_osc as u64);
                c /= n_osc as u64;
            }
            let mut seen = digits.clone();
            seen.sort();
            seen.dedup();
            if m - seen.len() == j {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    #[test]
    fn class_probabilities_match_exhaustive_enumeration() {
        for m in 1..=4 {
            for n_osc in 1..=5 {
                for j in 0..m {
                    let exact = class_probability(m, n_osc, j).unwrap();
                    let oracle = class_probability_by_enumeration(m, n_osc, j);
                    assert!(
                        (exact - oracle).abs() < 1e-14,
                        "m={m} N={n_osc} j={j}: {exact} vs oracle {oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn class_probabilities_are_exact_rationals_summing_to_one() {
        // pinned value: no-coincidence probability at m=2, N=4 is exactly 3/4
        let p0 = class_probability_exact(2, 4, 0).unwrap();
        assert_eq!(p0, BigRational::new(BigInt::from(3), BigInt::from(4)));
        for m in 1..=6 {
            for n_osc in [1usize, 2, 3, 7, 64] {
                let total: BigRational = (0..m).map(|j| class_probability_exact(m, n_osc, j).unwrap()).sum();
                assert!(total.is_one(), "sum of class probabilities m={m} N={n_osc}");
            }
        }
    }

    #[test]
    fn permanent_of_identity_and_ones() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for m in 1..=6 {
            let mut eye = vec![zero; m * m];
            for i in 0..m {
                eye[i * m + i] = one;
            }
            assert!((permanent(&eye, m).unwrap() - one).norm() < 1e-12);
            // all-ones matrix has permanent m!
            let ones = vec![one; m * m];
            let fact: f64 = (1..=m).map(|t| t as f64).product();
            assert!((permanent(&ones, m).unwrap().re - fact).abs() < 1e-9 * fact);
        }
    }

    /// Oracle: permanent by direct permutation expansion.
    fn permanent_by_permutations(matrix: &[Complex64], m: usize) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        let mut sigma: Vec<usize> = (0..m).collect();
        permute(&mut sigma, 0, &mut |sigma| {
            let mut prod = Complex64::new(1.0, 0.0);
            for (i, &j) in sigma.iter().enumerate() {
                prod *= matrix[i * m + j];
            }
            total += prod;
        });
        total
    }

    #[test]
    fn ryser_matches_permutation_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for m in 1..=7 {
            let matrix: Vec<Complex64> =
                (0..m * m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let fast = permanent(&matrix, m).unwrap();
            let slow = permanent_by_permutations(&matrix, m);
            assert!((fast - slow).norm() < 1e-10 * slow.norm().max(1.0), "m={m}");
        }
        assert!(matches!(
            permanent(&vec![Complex64::new(1.0, 0.0); 13 * 13], 13),
            Err(Error::PermanentTooLarge { .. })
        ));
    }

    fn fixture() -> (crate::grid::GridHandle, VacuumProfile) {
        let grid =
            MomentumGrid::from_points(&[[1.0, 0.0, 0.2], [0.0, 1.0, -0.3], [0.4, 0.4, 0.9]], &[0.6, 1.1, 0.8])
                .unwrap();
        let profile = VacuumProfile::from_z(&grid, &[0.9, 0.5, 0.2]).unwrap();
        (grid, profile)
    }

    fn random_family(
        grid: &crate::grid::GridHandle,
        rng: &mut impl Rng,
        m: usize,
    ) -> Vec<PolarizedAmplitude> {
        (0..m)
            .map(|_| {
                PolarizedAmplitude::from_fn(grid, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
            })
            .collect()
    }

    #[test]
    fn single_operator_pair_is_n_independent() {
        // m = 1 has only the singleton partition: the correlator equals
        // <f|g>_Z for every ensemble size
        let (grid, profile) = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_family(&grid, &mut rng, 1);
        let g = random_family(&grid, &mut rng, 1);
        let expect = inner_product_z(&f[0], &g[0], &profile).unwrap();
        for n_osc in [1, 2, 3, 10, 1000] {
            let got = finite_n_correlator(&f, &g, &profile, n_osc).unwrap();
            assert!((got - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn mismatched_operator_counts_vanish() {
        let (grid, profile) = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_family(&grid, &mut rng, 2);
        let g = random_family(&grid, &mut rng, 3);
        assert_eq!(finite_n_correlator(&f, &g, &profile, 3).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(limit_correlator(&f, &g, &profile).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn identical_pair_on_one_point_grid_is_exactly_two() {
        // f = g = unit amplitude at helicity + on a single unit-weight point:
        // the coincidence term compensates the multiplicity loss exactly, the
        // correlator is 2 for every N
        let grid = MomentumGrid::from_points(&[[0.0, 0.0, 1.0]], &[1.0]).unwrap();
        let profile = VacuumProfile::from_z(&grid, &[1.0]).unwrap();
        let f = PolarizedAmplitude::from_fn(&grid, |_, h| match h {
            Helicity::Plus => Complex64::new(1.0, 0.0),
            Helicity::Minus => Complex64::new(0.0, 0.0),
        });
        let family = vec![f.clone(), f];
        for n_osc in [1, 2, 5, 64] {
            let got = finite_n_correlator(&family, &family, &profile, n_osc).unwrap();
            assert!((got - Complex64::new(2.0, 0.0)).norm() < 1e-13, "N={n_osc}: {got}");
        }
    }

    #[test]
    fn two_point_equal_z_case_gives_two_plus_two_over_n() {
        // f spread as (sqrt 2, 0) over two unit-weight points with Z = 1/2:
        // <f|f>_Z = 1 but the coincidence term doubles, giving 2 + 2/N
        let grid = MomentumGrid::from_points(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]], &[1.0, 1.0]).unwrap();
        let profile = VacuumProfile::from_z(&grid, &[0.5, 0.5]).unwrap();
        let mut f = PolarizedAmplitude::zero(&grid);
        f.set(0, Helicity::Plus, Complex64::new(2.0f64.sqrt(), 0.0));
        let family = vec![f.clone(), f];
        for n_osc in 1..=6 {
            let got = finite_n_correlator(&family, &family, &profile, n_osc).unwrap();
            let expect = 2.0 + 2.0 / n_osc as f64;
            assert!((got.re - expect).abs() < 1e-12 && got.im.abs() < 1e-14, "N={n_osc}: {got} vs {expect}");
        }
        let limit = limit_correlator(&family, &family, &profile).unwrap();
        assert!((limit - Complex64::new(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn correlator_is_hermitian_under_family_exchange() {
        let (grid, profile) = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fs = random_family(&grid, &mut rng, 3);
        let gs = random_family(&grid, &mut rng, 3);
        for n_osc in [1, 2, 5] {
            let fg = finite_n_correlator(&fs, &gs, &profile, n_osc).unwrap();
            let gf = finite_n_correlator(&gs, &fs, &profile, n_osc).unwrap();
            assert!((fg - gf.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn singleton_restriction_reproduces_ryser_permanent() {
        // two independent routes to the N -> infinity limit: the partition
        // sum restricted to the all-singleton partition with unit weight, and
        // Ryser's formula on the Gram matrix
        let (grid, profile) = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let fs = random_family(&grid, &mut rng, 4);
        let gs = random_family(&grid, &mut rng, 4);
        let m = fs.len();
        let mut density = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; m * m];
        for (j, f) in fs.iter().enumerate() {
            for (l, g) in gs.iter().enumerate() {
                density[j * m + l] = f.pairing_density(g).unwrap();
            }
        }
        let mut singleton_sum = Complex64::new(0.0, 0.0);
        let mut sigma: Vec<usize> = (0..m).collect();
        permute(&mut sigma, 0, &mut |sigma| {
            let mut prod = Complex64::new(1.0, 0.0);
            for j in 0..m {
                let mut pair = Complex64::new(0.0, 0.0);
                for i in 0..grid.len() {
                    pair += grid.weight(i) * profile.z(i) * density[j * m + sigma[j]][i];
                }
                prod *= pair;
            }
            singleton_sum += prod;
        });
        let limit = limit_correlator(&fs, &gs, &profile).unwrap();
        assert!((singleton_sum - limit).norm() < 1e-10 * limit.norm().max(1.0));
    }

    #[test]
    fn finite_n_error_decays_like_one_over_n() {
        let (grid, profile) = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let fs = random_family(&grid, &mut rng, 2);
        let gs = random_family(&grid, &mut rng, 2);
        let ns = [4usize, 8, 16, 32, 64];
        let rows = convergence_study(&fs, &gs, &profile, &ns).unwrap();
        let errs: Vec<f64> = rows.iter().map(|r| r.abs_error).collect();
        let nsf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let fit = crate::stats::log_log_slope(&nsf, &errs).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.05, "slope {}", fit.slope);
    }

    #[test]
    fn convergence_csv_layout() {
        let rows = [ConvergenceRow {
            n_osc: 4,
            finite_value: Complex64::new(2.5, 0.0),
            limit_value: Complex64::new(2.0, 0.0),
            abs_error: 0.5,
        }];
        let csv = convergence_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "N,finite_value_re,finite_value_im,limit_re,limit_im,abs_error");
        assert_eq!(lines.next().unwrap(), "4,2.5,0,2,0,0.5");
    }

    #[test]
    fn weights_use_exact_falling_factorials() {
        // spot check against a hand value: m = 3, N = 3, all merged: 3/27 = 1/9
        let w = partition_weight_exact(3, 3, 1);
        assert_eq!(w, BigRational::from_f64(1.0 / 9.0).map(|_| BigRational::new(BigInt::from(1), BigInt::from(9))).unwrap());
        // blocks > N vanish exactly
        assert!(partition_weight_exact(3, 2, 3).is_zero());
    }
}
