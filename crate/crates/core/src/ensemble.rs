//! Ensembles of N identical oscillators and the collective operators on them.
//!
//! One field mode is carried by all N oscillators at once. The collective
//! ladder operators average with 1/sqrt(N), the central multiplication
//! operator with 1/N, and additive observables (four-momentum, excitation
//! count) are plain sums over oscillators. This normalization asymmetry is
//! load bearing: it makes ladder commutators close on the central multiplier
//! at every finite N, with corrections to the irreducible theory that die
//! like powers of 1/N.
//!
//! Two state representations coexist. [`ProductState`] keeps one factor per
//! oscillator and covers vacua, coherent families, and factor-wise unitaries
//! at O(N D) cost, D the one-oscillator dimension. [`DenseState`] stores the
//! full tensor amplitude (factor-major, D^N entries) and serves as the
//! brute-force oracle that every closed formula in this crate is checked
//! against. Collective operators act on dense states by running the
//! one-oscillator operators fiber by fiber, so both layers share one
//! definition of the elementary ladders.

use crate::error::{Error, Result};
use crate::fourvec::FourVector;
use crate::grid::{GridHandle, Helicity, PolarizedAmplitude, VacuumProfile};
use crate::oscillator::{
    apply_annihilation, apply_creation, apply_multiplier, coherent_state, vacuum_state,
    FockTruncation, OscillatorState, Picture,
};
use num_complex::Complex64;

/// Default ceiling on dense tensor dimension; callers with more memory and
/// patience can pass a larger cap explicitly.
pub const DEFAULT_DENSE_CAP: usize = 2_000_000;

/// Product state over the oscillator ensemble: one factor per oscillator.
#[derive(Clone)]
pub struct ProductState {
    factors: Vec<OscillatorState>,
}

impl ProductState {
    pub fn from_factors(factors: Vec<OscillatorState>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidArgument("ensemble needs at least one oscillator".into()))?;
        for f in &factors[1..] {
            if !first.grid().compatible(f.grid()) || first.truncation() != f.truncation() {
                return Err(Error::InvalidArgument(
                    "all ensemble factors must share one grid and truncation".into(),
                ));
            }
        }
        Ok(ProductState { factors })
    }

    /// N copies of the same factor.
    pub fn uniform(factor: OscillatorState, n_osc: usize) -> Result<Self> {
        if n_osc == 0 {
            return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
        }
        Ok(ProductState { factors: vec![factor; n_osc] })
    }

    pub fn n_osc(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, n: usize) -> &OscillatorState {
        &self.factors[n]
    }

    pub fn factors(&self) -> &[OscillatorState] {
        &self.factors
    }

    pub fn grid(&self) -> &GridHandle {
        self.factors[0].grid()
    }

    pub fn truncation(&self) -> FockTruncation {
        self.factors[0].truncation()
    }

    /// Inner product of two product states: the product of factor inners.
    pub fn inner(&self, other: &ProductState) -> Result<Complex64> {
        if self.n_osc() != other.n_osc() {
            return Err(Error::ShapeMismatch { expected: self.n_osc(), got: other.n_osc() });
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for (a, b) in self.factors.iter().zip(&other.factors) {
            acc *= a.inner(b)?;
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> f64 {
        self.factors.iter().map(OscillatorState::norm_sq).product()
    }

    /// Apply a factor-wise map; the closure sees the oscillator index.
    pub fn map_factors(
        &self,
        mut op: impl FnMut(usize, &OscillatorState) -> Result<OscillatorState>,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(self.factors.len());
        for (n, f) in self.factors.iter().enumerate() {
            out.push(op(n, f)?);
        }
        ProductState::from_factors(out)
    }

    /// Expand into the full tensor amplitude. Fails when D^N exceeds `cap`.
    pub fn densify(&self, cap: usize) -> Result<DenseState> {
        let dim = checked_total_dim(self.factors[0].amplitudes().len(), self.n_osc(), cap)?;
        let mut amp = vec![Complex64::new(1.0, 0.0)];
        for factor in &self.factors {
            let fac = factor.amplitudes();
            let mut next = Vec::with_capacity(amp.len() * fac.len());
            for a in &amp {
                for b in fac {
                    next.push(a * b);
                }
            }
            amp = next;
        }
        debug_assert_eq!(amp.len(), dim);
        Ok(DenseState {
            grid: self.grid().clone(),
            trunc: self.truncation(),
            n_osc: self.n_osc(),
            amp,
        })
    }

    /// <self|dense>, contracted factor by factor without expanding self.
    pub fn inner_dense(&self, dense: &DenseState) -> Result<Complex64> {
        if self.n_osc() != dense.n_osc
            || !self.grid().compatible(&dense.grid)
            || self.truncation() != dense.trunc
        {
            return Err(Error::InvalidArgument(
                "product and dense states live on different ensembles".into(),
            ));
        }
        let d = dense.factor_dim();
        let l = dense.trunc.levels();
        let mut cur = dense.amp.clone();
        // Contract the most significant digit against each factor in turn.
        for factor in &self.factors {
            let fac = factor.amplitudes();
            let tail = cur.len() / d;
            let mut next = vec![Complex64::new(0.0, 0.0); tail];
            for (c, fc) in fac.iter().enumerate() {
                let coeff = dense.grid.weight(c / (l * l)) * fc.conj();
                let base = c * tail;
                for j in 0..tail {
                    next[j] += coeff * cur[base + j];
                }
            }
            cur = next;
        }
        debug_assert_eq!(cur.len(), 1);
        Ok(cur[0])
    }

    /// Probability mass of the total excitation count, as the N-fold
    /// convolution of the per-factor count masses. Entry c is the mass at
    /// count c; the vector sums to the squared norm of the state.
    pub fn excitation_distribution(&self) -> Vec<f64> {
        let l = self.truncation().levels();
        let grid = self.grid();
        let mut total = vec![1.0];
        for factor in &self.factors {
            let mut single = vec![0.0; 2 * l - 1];
            for i in 0..grid.len() {
                let w = grid.weight(i);
                for np in 0..l {
                    for nm in 0..l {
                        single[np + nm] += w * factor.get(i, np, nm).norm_sqr();
                    }
                }
            }
            total = convolve(&total, &single);
        }
        total
    }
}

/// Full tensor state of the ensemble, factor-major: oscillator 0 is the most
/// significant digit of the flat index.
#[derive(Clone)]
pub struct DenseState {
    grid: GridHandle,
    trunc: FockTruncation,
    n_osc: usize,
    amp: Vec<Complex64>,
}

fn checked_total_dim(factor_dim: usize, n_osc: usize, cap: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n_osc {
        dim = dim
            .checked_mul(factor_dim)
            .filter(|&d| d <= cap)
            .ok_or(Error::DenseCapExceeded { dim: usize::MAX, cap })?;
    }
    if dim > cap {
        return Err(Error::DenseCapExceeded { dim, cap });
    }
    Ok(dim)
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl DenseState {
    pub fn zero(grid: &GridHandle, trunc: FockTruncation, n_osc: usize, cap: usize) -> Result<Self> {
        if n_osc == 0 {
            return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
        }
        let dim = checked_total_dim(trunc.factor_dim(grid.len()), n_osc, cap)?;
        Ok(DenseState {
            grid: grid.clone(),
            trunc,
            n_osc,
            amp: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    pub fn grid(&self) -> &GridHandle {
        &self.grid
    }

    pub fn truncation(&self) -> FockTruncation {
        self.trunc
    }

    pub fn n_osc(&self) -> usize {
        self.n_osc
    }

    pub fn factor_dim(&self) -> usize {
        self.trunc.factor_dim(self.grid.len())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    fn check_compatible(&self, other: &DenseState) -> Result<()> {
        if !self.grid.compatible(&other.grid) || self.trunc != other.trunc || self.n_osc != other.n_osc
        {
            return Err(Error::InvalidArgument(
                "dense states live on different ensembles".into(),
            ));
        }
        Ok(())
    }

    /// Quadrature weight of one factor digit: the weight of its grid point.
    fn digit_weights(&self) -> Vec<f64> {
        let l = self.trunc.levels();
        (0..self.factor_dim()).map(|c| self.grid.weight(c / (l * l))).collect()
    }

    /// Total occupation (both helicities) of one factor digit.
    fn digit_counts(&self) -> Vec<usize> {
        let l = self.trunc.levels();
        (0..self.factor_dim())
            .map(|c| {
                let o = c % (l * l);
                o / l + o % l
            })
            .collect()
    }

    /// Weighted inner product: each oscillator contributes its grid weight.
    pub fn inner(&self, other: &DenseState) -> Result<Complex64> {
        self.check_compatible(other)?;
        let wd = self.digit_weights();
        let d = wd.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, (a, b)) in self.amp.iter().zip(&other.amp).enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let mut w = 1.0;
            let mut rest = idx;
            for _ in 0..self.n_osc {
                w *= wd[rest % d];
                rest /= d;
            }
            acc += w * a.conj() * b;
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> f64 {
        let wd = self.digit_weights();
        let d = wd.len();
        let mut acc = 0.0;
        for (idx, a) in self.amp.iter().enumerate() {
            let m = a.norm_sqr();
            if m == 0.0 {
                continue;
            }
            let mut w = 1.0;
            let mut rest = idx;
            for _ in 0..self.n_osc {
                w *= wd[rest % d];
                rest /= d;
            }
            acc += w * m;
        }
        acc
    }

    pub fn scale(&self, s: Complex64) -> Self {
        DenseState {
            grid: self.grid.clone(),
            trunc: self.trunc,
            n_osc: self.n_osc,
            amp: self.amp.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &DenseState) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(DenseState {
            grid: self.grid.clone(),
            trunc: self.trunc,
            n_osc: self.n_osc,
            amp: self.amp.iter().zip(&other.amp).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &DenseState) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(DenseState {
            grid: self.grid.clone(),
            trunc: self.trunc,
            n_osc: self.n_osc,
            amp: self.amp.iter().zip(&other.amp).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &DenseState) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Zero every amplitude in which any oscillator occupies more than
    /// `max_occ` quanta in either helicity. Commutator identities that need
    /// one level of truncation headroom hold exactly on the surviving span.
    pub fn zero_above_occupation(&self, max_occ: usize) -> Self {
        let l = self.trunc.levels();
        let d = self.factor_dim();
        let keep: Vec<bool> = (0..d)
            .map(|c| {
                let o = c % (l * l);
                o / l <= max_occ && o % l <= max_occ
            })
            .collect();
        let mut out = self.clone();
        for (idx, a) in out.amp.iter_mut().enumerate() {
            let mut rest = idx;
            for _ in 0..self.n_osc {
                if !keep[rest % d] {
                    *a = Complex64::new(0.0, 0.0);
                    break;
                }
                rest /= d;
            }
        }
        out
    }

    /// Sum of one operator over all oscillator slots, times `scale`:
    /// scale * sum_n op^(n). The closure receives each tensor fiber as a
    /// one-oscillator state.
    pub fn apply_slotwise_sum(
        &self,
        scale: Complex64,
        mut op: impl FnMut(&OscillatorState) -> Result<OscillatorState>,
    ) -> Result<DenseState> {
        let d = self.factor_dim();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amp.len()];
        let mut stride = self.amp.len() / d;
        for _slot in 0..self.n_osc {
            let block = stride * d;
            for base0 in (0..self.amp.len()).step_by(block) {
                for inner in 0..stride {
                    let base = base0 + inner;
                    let fiber: Vec<Complex64> =
                        (0..d).map(|c| self.amp[base + c * stride]).collect();
                    if fiber.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                        continue;
                    }
                    let st = OscillatorState::from_raw(&self.grid, self.trunc, fiber);
                    let res = op(&st)?;
                    for (c, v) in res.amplitudes().iter().enumerate() {
                        out[base + c * stride] += scale * v;
                    }
                }
            }
            stride /= d;
        }
        Ok(DenseState { grid: self.grid.clone(), trunc: self.trunc, n_osc: self.n_osc, amp: out })
    }

    /// The same operator applied to every slot as a tensor product:
    /// op^(0) op^(1) .. op^(N-1). Slots commute, so order is irrelevant.
    pub fn apply_slotwise_each(
        &self,
        mut op: impl FnMut(&OscillatorState) -> Result<OscillatorState>,
    ) -> Result<DenseState> {
        let d = self.factor_dim();
        let mut cur = self.amp.clone();
        let mut stride = self.amp.len() / d;
        for _slot in 0..self.n_osc {
            let block = stride * d;
            let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
            for base0 in (0..cur.len()).step_by(block) {
                for inner in 0..stride {
                    let base = base0 + inner;
                    let fiber: Vec<Complex64> = (0..d).map(|c| cur[base + c * stride]).collect();
                    if fiber.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                        continue;
                    }
                    let st = OscillatorState::from_raw(&self.grid, self.trunc, fiber);
                    let res = op(&st)?;
                    for (c, v) in res.amplitudes().iter().enumerate() {
                        next[base + c * stride] = *v;
                    }
                }
            }
            cur = next;
            stride /= d;
        }
        Ok(DenseState { grid: self.grid.clone(), trunc: self.trunc, n_osc: self.n_osc, amp: cur })
    }

    /// scale * sum_n diag^(n) for an operator diagonal in the factor basis,
    /// given by its value on each factor digit.
    fn diagonal_slotwise_sum(&self, scale: Complex64, digit_value: &[Complex64]) -> DenseState {
        let d = self.factor_dim();
        debug_assert_eq!(digit_value.len(), d);
        let mut out = self.amp.clone();
        for (idx, a) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut rest = idx;
            for _ in 0..self.n_osc {
                acc += digit_value[rest % d];
                rest /= d;
            }
            *a *= scale * acc;
        }
        DenseState { grid: self.grid.clone(), trunc: self.trunc, n_osc: self.n_osc, amp: out }
    }

    /// Probability mass of the total excitation count over all oscillators.
    /// Sums to the squared norm.
    pub fn excitation_distribution(&self) -> Vec<f64> {
        let wd = self.digit_weights();
        let cd = self.digit_counts();
        let d = wd.len();
        let top = self.n_osc * 2 * self.trunc.n_max();
        let mut mass = vec![0.0; top + 1];
        for (idx, a) in self.amp.iter().enumerate() {
            let m = a.norm_sqr();
            if m == 0.0 {
                continue;
            }
            let mut w = 1.0;
            let mut count = 0;
            let mut rest = idx;
            for _ in 0..self.n_osc {
                let c = rest % d;
                w *= wd[c];
                count += cd[c];
                rest /= d;
            }
            mass[count] += w * m;
        }
        mass
    }
}

/// Vacuum of the whole ensemble: every oscillator in the profile vacuum.
pub fn ensemble_vacuum(
    profile: &VacuumProfile,
    trunc: FockTruncation,
    n_osc: usize,
) -> Result<ProductState> {
    ProductState::uniform(vacuum_state(profile, trunc), n_osc)
}

/// Coherent family with collective displacement parameter `alpha`: every
/// oscillator carries the parameter alpha / sqrt(N), so collective ladder
/// expectations reproduce alpha itself at any N.
pub fn ensemble_coherent(
    profile: &VacuumProfile,
    alpha: &PolarizedAmplitude,
    trunc: FockTruncation,
    n_osc: usize,
) -> Result<ProductState> {
    let per_factor = alpha.scale(Complex64::new(1.0 / (n_osc as f64).sqrt(), 0.0));
    let factor = coherent_state(profile, &per_factor, trunc)?;
    ProductState::uniform(factor, n_osc)
}

/// Collective annihilation (1/sqrt(N)) sum_n a(f)^(n).
pub fn collective_annihilation(state: &DenseState, f: &PolarizedAmplitude) -> Result<DenseState> {
    let scale = Complex64::new(1.0 / (state.n_osc() as f64).sqrt(), 0.0);
    state.apply_slotwise_sum(scale, |st| apply_annihilation(f, st))
}

/// Collective creation (1/sqrt(N)) sum_n a(f)^dag(n); the exact weighted
/// adjoint of [`collective_annihilation`].
pub fn collective_creation(state: &DenseState, f: &PolarizedAmplitude) -> Result<DenseState> {
    let scale = Complex64::new(1.0 / (state.n_osc() as f64).sqrt(), 0.0);
    state.apply_slotwise_sum(scale, |st| apply_creation(f, st))
}

/// Central multiplication operator (1/N) sum_n I(g)^(n), g one value per grid
/// point. Diagonal in the factor basis and commuting with every collective
/// ladder; it is the right hand side the CCR close on.
pub fn collective_multiplier(state: &DenseState, g: &[Complex64]) -> Result<DenseState> {
    if g.len() != state.grid().len() {
        return Err(Error::ShapeMismatch { expected: state.grid().len(), got: g.len() });
    }
    let l = state.truncation().levels();
    let digit_value: Vec<Complex64> = (0..state.factor_dim()).map(|c| g[c / (l * l)]).collect();
    let scale = Complex64::new(1.0 / state.n_osc() as f64, 0.0);
    Ok(state.diagonal_slotwise_sum(scale, &digit_value))
}

/// Four-momentum contracted with x, summed over oscillators with no 1/N:
/// sum_n (k . x) L^(n), where L counts levels according to the picture.
pub fn collective_four_momentum(state: &DenseState, x: FourVector, picture: Picture) -> DenseState {
    let l = state.truncation().levels();
    let digit_value: Vec<Complex64> = (0..state.factor_dim())
        .map(|c| {
            let kx = state.grid().point(c / (l * l)).dot(&x);
            let o = c % (l * l);
            Complex64::new(kx * picture.level_count(o / l, o % l), 0.0)
        })
        .collect();
    state.diagonal_slotwise_sum(Complex64::new(1.0, 0.0), &digit_value)
}

/// Total excitation count sum_n (n_plus + n_minus)^(n), plain sum.
pub fn collective_excitation(state: &DenseState) -> DenseState {
    let digit_value: Vec<Complex64> = state
        .digit_counts()
        .iter()
        .map(|&c| Complex64::new(c as f64, 0.0))
        .collect();
    state.diagonal_slotwise_sum(Complex64::new(1.0, 0.0), &digit_value)
}

/// Vacuum expectation of a normally ordered collective string,
/// <a(f_1) .. a(f_m) a(g_1)^dag .. a(g_m')^dag>, evaluated by brute force on
/// the dense tensor space. Exact (up to rounding) whenever n_max admits the
/// intermediate occupations, i.e. n_max >= number of creations; refuses to
/// run otherwise rather than return silently truncated values.
pub fn multiphoton_overlap_dense(
    profile: &VacuumProfile,
    fs: &[PolarizedAmplitude],
    gs: &[PolarizedAmplitude],
    trunc: FockTruncation,
    n_osc: usize,
    cap: usize,
) -> Result<Complex64> {
    if trunc.n_max() < gs.len() {
        return Err(Error::TruncationInsufficient { needed: gs.len(), n_max: trunc.n_max() });
    }
    let vac = ensemble_vacuum(profile, trunc, n_osc)?;
    let mut state = vac.densify(cap)?;
    for g in gs.iter().rev() {
        state = collective_creation(&state, g)?;
    }
    for f in fs.iter().rev() {
        state = collective_annihilation(&state, f)?;
    }
    vac.inner_dense(&state)
}

/// Coherent family displaced by `beta` along the product path: each factor
/// becomes the coherent state at (alpha + beta)/sqrt(N), times the per-point
/// interference phase exp(i Im(beta conj(alpha)) / N). Exact before
/// truncation; the dense exponential path differs only through the top
/// levels.
pub fn displaced_coherent(
    profile: &VacuumProfile,
    alpha: &PolarizedAmplitude,
    beta: &PolarizedAmplitude,
    trunc: FockTruncation,
    n_osc: usize,
) -> Result<ProductState> {
    let grid = profile.grid();
    let shifted = alpha.add(beta)?;
    let base = ensemble_coherent(profile, &shifted, trunc, n_osc)?;
    let inv_n = 1.0 / n_osc as f64;
    let phase: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let mut im = 0.0;
            for h in Helicity::ALL {
                im += (beta.get(i, h) * alpha.get(i, h).conj()).im;
            }
            Complex64::from_polar(1.0, im * inv_n)
        })
        .collect();
    base.map_factors(|_, f| apply_multiplier(&phase, f))
}

/// Collective displacement exp(a(beta)^dag_bar - a(beta)_bar) on a dense
/// state. The generator splits over slots, so this is the one-factor matrix
/// exponential with parameter beta/sqrt(N) applied to every slot.
pub fn displace_dense(state: &DenseState, beta: &PolarizedAmplitude) -> Result<DenseState> {
    let per_factor = beta.scale(Complex64::new(1.0 / (state.n_osc() as f64).sqrt(), 0.0));
    let d = state.factor_dim();
    let grid = state.grid().clone();
    let trunc = state.truncation();
    // Column c of the one-factor generator a^dag(beta') - a(beta').
    let mut gen = vec![Complex64::new(0.0, 0.0); d * d];
    for c in 0..d {
        let mut basis = vec![Complex64::new(0.0, 0.0); d];
        basis[c] = Complex64::new(1.0, 0.0);
        let st = OscillatorState::from_raw(&grid, trunc, basis);
        let col = apply_creation(&per_factor, &st)?.sub(&apply_annihilation(&per_factor, &st)?)?;
        for (r, v) in col.amplitudes().iter().enumerate() {
            gen[r * d + c] = *v;
        }
    }
    let u = expm(&gen, d);
    state.apply_slotwise_each(|st| {
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        let amp = st.amplitudes();
        for r in 0..d {
            let row = &u[r * d..(r + 1) * d];
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, a) in row.iter().zip(amp) {
                acc += v * a;
            }
            out[r] = acc;
        }
        Ok(OscillatorState::from_raw(&grid, trunc, out))
    })
}

/// Dense matrix exponential by scaling and squaring with a Taylor core.
/// Matrices here are small (one-factor dimension) and anti-Hermitian up to
/// quadrature weights, so this plain scheme is accurate to rounding.
fn expm(m: &[Complex64], d: usize) -> Vec<Complex64> {
    let norm: f64 = (0..d)
        .map(|c| (0..d).map(|r| m[r * d + c].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 1.0 / f64::powi(2.0, s as i32);
    let t: Vec<Complex64> = m.iter().map(|v| v * scale).collect();

    let mut result = identity(d);
    let mut term = identity(d);
    for j in 1..=24 {
        term = mat_mul(&term, &t, d);
        let inv = 1.0 / factorial(j);
        for (r, v) in result.iter_mut().zip(&term) {
            *r += v * inv;
        }
    }
    for _ in 0..s {
        result = mat_mul(&result, &result, d);
    }
    result
}

fn identity(d: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        m[i * d + i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn mat_mul(a: &[Complex64], b: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for k in 0..d {
            let v = a[r * d + k];
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let row = &b[k * d..(k + 1) * d];
            let dst = &mut out[r * d..(r + 1) * d];
            for (o, x) in dst.iter_mut().zip(row) {
                *o += v * x;
            }
        }
    }
    out
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|x| x as f64).product()
}
