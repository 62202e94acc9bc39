//! Single-oscillator states and operators.
//!
//! One oscillator carries psi(i, n_plus, n_minus): a wave function over grid
//! points tensored with two independent harmonic ladders, one per helicity,
//! truncated at occupation n_max. The inner product weighs grid points with
//! the quadrature measure: <phi|psi> = sum_i w_i sum_n conj(phi) psi.
//!
//! Annihilation smeared with f acts as
//!     (a(f) psi)(i, n) = sum_s conj(f_{i,s}) sqrt(n_s + 1) psi(i, n + e_s),
//! creation as its exact adjoint on the truncated space; an amplitude that
//! would land above n_max is dropped, never renormalized. Both operators are
//! therefore adjoint to each other exactly, and all commutation identities
//! hold verbatim on states that keep one level of headroom.
//!
//! The multiplication operator smeared with g scales psi(i, n) by g_i; it is
//! the grid form of the operator family that the CCR produce on their right
//! hand side.
//!
//! Four-momentum acts diagonally as (k_i . x) times the level count, with the
//! zero-point term switched by [`Picture`]: `Physical` counts n_plus + n_minus + 1,
//! `Vacuum` counts n_plus + n_minus. Only the spectrum shifts; commutators
//! with ladder operators are picture independent.

use crate::error::{Error, Result};
use crate::fourvec::FourVector;
use crate::grid::{GridHandle, Helicity, PolarizedAmplitude, VacuumProfile};
use crate::stats::poisson_pmf;
use num_complex::Complex64;

/// Occupation cutoff per helicity ladder; levels run 0..=n_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    n_max: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("truncation needs n_max >= 1".into()));
        }
        Ok(FockTruncation { n_max })
    }

    pub fn n_max(self) -> usize {
        self.n_max
    }

    /// Levels per helicity ladder: n_max + 1.
    pub fn levels(self) -> usize {
        self.n_max + 1
    }

    /// Dense dimension of one oscillator on a grid with k_points points.
    pub fn factor_dim(self, k_points: usize) -> usize {
        k_points * self.levels() * self.levels()
    }
}

/// Dropped coherent tail mass above this bound rejects the construction.
pub const COHERENT_TAIL_TOL: f64 = 1e-10;

/// Which zero-point convention four-momentum uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// Level multiplier n_plus + n_minus + 1; the vacuum carries energy.
    Physical,
    /// Level multiplier n_plus + n_minus; the vacuum is translation invariant.
    Vacuum,
}

impl Picture {
    pub fn level_count(self, n_plus: usize, n_minus: usize) -> f64 {
        let base = (n_plus + n_minus) as f64;
        match self {
            Picture::Physical => base + 1.0,
            Picture::Vacuum => base,
        }
    }
}

/// psi(i, n_plus, n_minus) stored dense, point-major then n_plus then n_minus.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorState {
    grid: GridHandle,
    trunc: FockTruncation,
    amp: Vec<Complex64>,
}

impl OscillatorState {
    pub fn zero(grid: &GridHandle, trunc: FockTruncation) -> Self {
        let len = trunc.factor_dim(grid.len());
        OscillatorState { grid: grid.clone(), trunc, amp: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn from_fn(
        grid: &GridHandle,
        trunc: FockTruncation,
        mut f: impl FnMut(usize, usize, usize) -> Complex64,
    ) -> Self {
        let mut state = Self::zero(grid, trunc);
        for i in 0..grid.len() {
            for np in 0..trunc.levels() {
                for nm in 0..trunc.levels() {
                    let v = f(i, np, nm);
                    state.set(i, np, nm, v);
                }
            }
        }
        state
    }

    /// Wrap an amplitude vector already in index order. Used by the ensemble
    /// machinery to view tensor fibers as one-oscillator states.
    pub(crate) fn from_raw(grid: &GridHandle, trunc: FockTruncation, amp: Vec<Complex64>) -> Self {
        debug_assert_eq!(amp.len(), trunc.factor_dim(grid.len()));
        OscillatorState { grid: grid.clone(), trunc, amp }
    }

    pub fn grid(&self) -> &GridHandle {
        &self.grid
    }

    pub fn truncation(&self) -> FockTruncation {
        self.trunc
    }

    #[inline]
    fn idx(&self, i: usize, n_plus: usize, n_minus: usize) -> usize {
        let l = self.trunc.levels();
        (i * l + n_plus) * l + n_minus
    }

    pub fn get(&self, i: usize, n_plus: usize, n_minus: usize) -> Complex64 {
        self.amp[self.idx(i, n_plus, n_minus)]
    }

    pub fn set(&mut self, i: usize, n_plus: usize, n_minus: usize, v: Complex64) {
        let idx = self.idx(i, n_plus, n_minus);
        self.amp[idx] = v;
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    fn check_compatible(&self, other: &OscillatorState) -> Result<()> {
        if !self.grid.compatible(other.grid()) || self.trunc != other.trunc {
            return Err(Error::InvalidArgument("states live on different grids or truncations".into()));
        }
        Ok(())
    }

    pub fn inner(&self, other: &OscillatorState) -> Result<Complex64> {
        self.check_compatible(other)?;
        let per_point = self.trunc.levels() * self.trunc.levels();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.grid.len() {
            let w = self.grid.weight(i);
            let base = i * per_point;
            let mut point = Complex64::new(0.0, 0.0);
            for o in 0..per_point {
                point += self.amp[base + o].conj() * other.amp[base + o];
            }
            acc += w * point;
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> f64 {
        let per_point = self.trunc.levels() * self.trunc.levels();
        let mut acc = 0.0;
        for i in 0..self.grid.len() {
            let w = self.grid.weight(i);
            let base = i * per_point;
            let mut point = 0.0;
            for o in 0..per_point {
                point += self.amp[base + o].norm_sqr();
            }
            acc += w * point;
        }
        acc
    }

    pub fn scale(&self, s: Complex64) -> Self {
        OscillatorState { grid: self.grid.clone(), trunc: self.trunc, amp: self.amp.iter().map(|a| a * s).collect() }
    }

    pub fn add(&self, other: &OscillatorState) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(OscillatorState {
            grid: self.grid.clone(),
            trunc: self.trunc,
            amp: self.amp.iter().zip(&other.amp).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &OscillatorState) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(OscillatorState {
            grid: self.grid.clone(),
            trunc: self.trunc,
            amp: self.amp.iter().zip(&other.amp).map(|(a, b)| a - b).collect(),
        })
    }

    /// Largest amplitude difference, a cheap operator-equality residual.
    pub fn max_abs_diff(&self, other: &OscillatorState) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Vacuum |O>: the profile amplitude at level (0,0) of every point.
/// Unit norm follows from the profile normalization sum w Z = 1.
pub fn vacuum_state(profile: &VacuumProfile, trunc: FockTruncation) -> OscillatorState {
    let grid = profile.grid();
    let mut state = OscillatorState::zero(grid, trunc);
    for i in 0..grid.len() {
        state.set(i, 0, 0, profile.amplitude(i));
    }
    state
}

/// a(f): lowers one quantum with amplitude conj(f); exact on every level
/// because the source level n_s + 1 never exceeds the stored range.
pub fn apply_annihilation(f: &PolarizedAmplitude, state: &OscillatorState) -> Result<OscillatorState> {
    if !f.grid().compatible(state.grid()) {
        return Err(Error::InvalidArgument("amplitude lives on a different grid".into()));
    }
    let trunc = state.truncation();
    let mut out = OscillatorState::zero(state.grid(), trunc);
    for i in 0..state.grid().len() {
        let fp = f.get(i, Helicity::Plus).conj();
        let fm = f.get(i, Helicity::Minus).conj();
        for np in 0..trunc.levels() {
            for nm in 0..trunc.levels() {
                let mut v = Complex64::new(0.0, 0.0);
                if np + 1 < trunc.levels() {
                    v += fp * ((np + 1) as f64).sqrt() * state.get(i, np + 1, nm);
                }
                if nm + 1 < trunc.levels() {
                    v += fm * ((nm + 1) as f64).sqrt() * state.get(i, np, nm + 1);
                }
                out.set(i, np, nm, v);
            }
        }
    }
    Ok(out)
}

/// a(f)^dagger: raises one quantum with amplitude f. The contribution that
/// would land on level n_max + 1 is dropped (truncation contract), which
/// keeps this operator the exact adjoint of [`apply_annihilation`].
pub fn apply_creation(f: &PolarizedAmplitude, state: &OscillatorState) -> Result<OscillatorState> {
    if !f.grid().compatible(state.grid()) {
        return Err(Error::InvalidArgument("amplitude lives on a different grid".into()));
    }
    let trunc = state.truncation();
    let mut out = OscillatorState::zero(state.grid(), trunc);
    for i in 0..state.grid().len() {
        let fp = f.get(i, Helicity::Plus);
        let fm = f.get(i, Helicity::Minus);
        for np in 0..trunc.levels() {
            for nm in 0..trunc.levels() {
                let mut v = Complex64::new(0.0, 0.0);
                if np > 0 {
                    v += fp * (np as f64).sqrt() * state.get(i, np - 1, nm);
                }
                if nm > 0 {
                    v += fm * (nm as f64).sqrt() * state.get(i, np, nm - 1);
                }
                out.set(i, np, nm, v);
            }
        }
    }
    Ok(out)
}

/// Multiplication operator smeared with g: psi(i, n) -> g_i psi(i, n).
/// Diagonal in the point index, blind to occupation numbers; commutes with
/// creation and annihilation at the same point, which makes its collective
/// form central.
pub fn apply_multiplier(g: &[Complex64], state: &OscillatorState) -> Result<OscillatorState> {
    if g.len() != state.grid().len() {
        return Err(Error::ShapeMismatch { expected: state.grid().len(), got: g.len() });
    }
    let trunc = state.truncation();
    let per_point = trunc.levels() * trunc.levels();
    let mut out = state.clone();
    for i in 0..state.grid().len() {
        let base = i * per_point;
        for o in 0..per_point {
            out.amp[base + o] *= g[i];
        }
    }
    Ok(out)
}

/// Generator P.x: multiplies psi(i, n) by (k_i . x) times the level count of
/// the chosen picture.
pub fn apply_four_momentum(x: FourVector, state: &OscillatorState, picture: Picture) -> OscillatorState {
    let trunc = state.truncation();
    let mut out = state.clone();
    for i in 0..state.grid().len() {
        let kx = state.grid().point(i).dot(&x);
        for np in 0..trunc.levels() {
            for nm in 0..trunc.levels() {
                let idx = out.idx(i, np, nm);
                out.amp[idx] *= kx * picture.level_count(np, nm);
            }
        }
    }
    out
}

/// Exponentiated four-momentum exp(i P.y): the unitary phase
/// exp(i (k_i . y) levels); exact, no series involved.
pub fn apply_translation(y: FourVector, state: &OscillatorState, picture: Picture) -> OscillatorState {
    let trunc = state.truncation();
    let mut out = state.clone();
    for i in 0..state.grid().len() {
        let ky = state.grid().point(i).dot(&y);
        for np in 0..trunc.levels() {
            for nm in 0..trunc.levels() {
                let idx = out.idx(i, np, nm);
                out.amp[idx] *= Complex64::from_polar(1.0, ky * picture.level_count(np, nm));
            }
        }
    }
    out
}

/// Coherent state over the vacuum profile:
///     psi(i, n+, n-) = O_i alpha_+^{n+} alpha_-^{n-}
///                      exp(-(|alpha_+|^2 + |alpha_-|^2)/2) / sqrt(n+! n-!),
/// with alpha_s = alpha(k_i, s). Eigenstate of annihilation up to the stored
/// tail; construction fails when the dropped tail mass, weighted by w Z,
/// exceeds [`COHERENT_TAIL_TOL`].
pub fn coherent_state(
    profile: &VacuumProfile,
    alpha: &PolarizedAmplitude,
    trunc: FockTruncation,
) -> Result<OscillatorState> {
    if !alpha.grid().compatible(profile.grid()) {
        return Err(Error::InvalidArgument("alpha lives on a different grid".into()));
    }
    let grid = profile.grid();
    let mut dropped = 0.0;
    for i in 0..grid.len() {
        let kept: f64 = Helicity::ALL
            .iter()
            .map(|&h| poisson_pmf(alpha.get(i, h).norm_sqr(), trunc.n_max()).iter().sum::<f64>())
            .product();
        dropped += grid.weight(i) * profile.z(i) * (1.0 - kept);
    }
    if dropped > COHERENT_TAIL_TOL {
        return Err(Error::TailMass { dropped, tol: COHERENT_TAIL_TOL });
    }

    let mut state = OscillatorState::zero(grid, trunc);
    let mut inv_sqrt_fact = Vec::with_capacity(trunc.levels());
    let mut fact = 1.0f64;
    for n in 0..trunc.levels() {
        if n > 0 {
            fact *= n as f64;
        }
        inv_sqrt_fact.push(1.0 / fact.sqrt());
    }
    for i in 0..grid.len() {
        let ap = alpha.get(i, Helicity::Plus);
        let am = alpha.get(i, Helicity::Minus);
        let gauss = (-0.5 * (ap.norm_sqr() + am.norm_sqr())).exp();
        let scale = profile.amplitude(i) * gauss;
        let mut pow_p = Complex64::new(1.0, 0.0);
        for np in 0..trunc.levels() {
            let mut pow_m = Complex64::new(1.0, 0.0);
            for nm in 0..trunc.levels() {
                state.set(i, np, nm, scale * pow_p * inv_sqrt_fact[np] * pow_m * inv_sqrt_fact[nm]);
                pow_m *= am;
            }
            pow_p *= ap;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::MomentumGrid;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn two_point_fixture() -> (GridHandle, VacuumProfile) {
        let grid = MomentumGrid::from_points(&[[1.0, 0.0, 0.0], [0.0, 0.5, 1.2]], &[0.7, 1.3]).unwrap();
        let profile = VacuumProfile::from_z(&grid, &[0.8, 0.4]).unwrap();
        (grid, profile)
    }

    fn random_state(grid: &GridHandle, trunc: FockTruncation, rng: &mut impl Rng, top: usize) -> OscillatorState {
        OscillatorState::from_fn(grid, trunc, |_, np, nm| {
            if np <= top && nm <= top {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    fn random_amplitude(grid: &GridHandle, rng: &mut impl Rng) -> PolarizedAmplitude {
        PolarizedAmplitude::from_fn(grid, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn vacuum_has_unit_norm() {
        let (_, profile) = two_point_fixture();
        let vac = vacuum_state(&profile, FockTruncation::new(2).unwrap());
        assert!((vac.norm_sq() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn creation_from_vacuum_on_unit_weight_point() {
        // f = 1 at helicity +, one-point grid with w = 1: the basis ket
        // |k,0,0> has component 1, and creation sends it to |k,1,0>.
        let grid = MomentumGrid::from_points(&[[0.0, 0.0, 1.0]], &[1.0]).unwrap();
        let trunc = FockTruncation::new(2).unwrap();
        let mut ket = OscillatorState::zero(&grid, trunc);
        ket.set(0, 0, 0, Complex64::new(1.0, 0.0));
        let f = PolarizedAmplitude::from_fn(&grid, |_, h| match h {
            Helicity::Plus => Complex64::new(1.0, 0.0),
            Helicity::Minus => Complex64::new(0.0, 0.0),
        });
        let raised = apply_creation(&f, &ket).unwrap();
        assert_eq!(raised.get(0, 1, 0), Complex64::new(1.0, 0.0));
        for (i, np, nm) in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 2, 0)] {
            assert_eq!(raised.get(i, np, nm), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn creation_is_adjoint_of_annihilation() {
        let (grid, _) = two_point_fixture();
        let trunc = FockTruncation::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let phi = random_state(&grid, trunc, &mut rng, trunc.n_max());
            let psi = random_state(&grid, trunc, &mut rng, trunc.n_max());
            let f = random_amplitude(&grid, &mut rng);
            let lhs = phi.inner(&apply_creation(&f, &psi).unwrap()).unwrap();
            let rhs = apply_annihilation(&f, &phi).unwrap().inner(&psi).unwrap();
            assert!((lhs - rhs).norm() < 1e-12, "adjoint defect {}", (lhs - rhs).norm());
        }
    }

    #[test]
    fn truncation_drops_amplitude_without_renormalizing() {
        let grid = MomentumGrid::from_points(&[[0.0, 0.0, 1.0]], &[1.0]).unwrap();
        let trunc = FockTruncation::new(1).unwrap();
        let mut top = OscillatorState::zero(&grid, trunc);
        top.set(0, 1, 0, Complex64::new(1.0, 0.0));
        let f = PolarizedAmplitude::from_fn(&grid, |_, _| Complex64::new(1.0, 0.0));
        let raised = apply_creation(&f, &top).unwrap();
        // the n_plus = 2 part is gone; only the minus-ladder raise survives
        assert_eq!(raised.get(0, 1, 1), Complex64::new(1.0, 0.0));
        assert_eq!(raised.get(0, 0, 0), Complex64::new(0.0, 0.0));
        assert_eq!(raised.get(0, 1, 0), Complex64::new(0.0, 0.0));
        assert!((raised.norm_sq() - 1.0).abs() < 1e-14, "dropped mass is not redistributed");
    }

    #[test]
    fn multiplier_commutes_with_creation_and_fuses() {
        let (grid, _) = two_point_fixture();
        let trunc = FockTruncation::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi = random_state(&grid, trunc, &mut rng, trunc.n_max());
        let f = random_amplitude(&grid, &mut rng);
        let g: Vec<Complex64> =
            (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();

        let m_after = apply_multiplier(&g, &apply_creation(&f, &psi).unwrap()).unwrap();
        let m_before = apply_creation(&f, &apply_multiplier(&g, &psi).unwrap()).unwrap();
        assert!(m_after.max_abs_diff(&m_before).unwrap() < 1e-13, "multiplier acts at the same point, so it commutes");

        // and both equal creation smeared with the pointwise product g*f
        let gf = PolarizedAmplitude::from_fn(&grid, |i, h| g[i] * f.get(i, h));
        let fused = apply_creation(&gf, &psi).unwrap();
        assert!(m_after.max_abs_diff(&fused).unwrap() < 1e-13);
    }

    #[test]
    fn coherent_state_is_annihilation_eigenstate_below_top_level() {
        let (grid, profile) = two_point_fixture();
        let trunc = FockTruncation::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alpha = random_amplitude(&grid, &mut rng).scale(Complex64::new(0.22, 0.0));
        let state = coherent_state(&profile, &alpha, trunc).unwrap();
        let f = random_amplitude(&grid, &mut rng);
        let lowered = apply_annihilation(&f, &state).unwrap();
        let h: Vec<Complex64> = f.pairing_density(&alpha).unwrap();
        let scaled = apply_multiplier(&h, &state).unwrap();
        for i in 0..grid.len() {
            for np in 0..trunc.n_max() {
                for nm in 0..trunc.n_max() {
                    let d = (lowered.get(i, np, nm) - scaled.get(i, np, nm)).norm();
                    assert!(d < 1e-13, "eigenvalue defect {d} at ({i},{np},{nm})");
                }
            }
        }
    }

    #[test]
    fn coherent_overlap_matches_closed_form() {
        // independent oracle: <O_a|O_b> = sum_i w_i Z_i prod_s
        //   exp(conj(a_{i,s}) b_{i,s} - |a_{i,s}|^2/2 - |b_{i,s}|^2/2)
        let (grid, profile) = two_point_fixture();
        let trunc = FockTruncation::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let a = random_amplitude(&grid, &mut rng).scale(Complex64::new(0.4, 0.0));
        let b = random_amplitude(&grid, &mut rng).scale(Complex64::new(0.4, 0.0));
        let sa = coherent_state(&profile, &a, trunc).unwrap();
        let sb = coherent_state(&profile, &b, trunc).unwrap();
        let numeric = sa.inner(&sb).unwrap();
        let mut closed = Complex64::new(0.0, 0.0);
        for i in 0..grid.len() {
            let mut factor = Complex64::new(1.0, 0.0);
            for h in Helicity::ALL {
                let (ai, bi) = (a.get(i, h), b.get(i, h));
                factor *= (ai.conj() * bi - 0.5 * ai.norm_sqr() - 0.5 * bi.norm_sqr()).exp();
            }
            closed += grid.weight(i) * profile.z(i) * factor;
        }
        assert!((numeric - closed).norm() < 1e-10, "overlap defect {}", (numeric - closed).norm());
    }

    #[test]
    fn coherent_tail_violation_is_rejected() {
        let (grid, profile) = two_point_fixture();
        let alpha = PolarizedAmplitude::from_fn(&grid, |_, _| Complex64::new(1.0, 0.0));
        match coherent_state(&profile, &alpha, FockTruncation::new(2).unwrap()) {
            Err(Error::TailMass { dropped, tol }) => {
                assert!(dropped > tol);
            }
            other => panic!("expected tail-mass rejection, got {other:?}"),
        }
    }

    #[test]
    fn four_momentum_pictures_differ_by_zero_point() {
        let (grid, profile) = two_point_fixture();
        let trunc = FockTruncation::new(2).unwrap();
        let vac = vacuum_state(&profile, trunc);
        let x = FourVector::new(0.3, -0.1, 0.2, 0.5);

        let vac_picture = apply_four_momentum(x, &vac, Picture::Vacuum);
        assert!(vac_picture.norm_sq() < 1e-28, "vacuum picture annihilates the vacuum");

        let phys = apply_four_momentum(x, &vac, Picture::Physical);
        for i in 0..grid.len() {
            let expect = grid.point(i).dot(&x) * profile.amplitude(i);
            assert!((phys.get(i, 0, 0) - expect).norm() < 1e-14);
        }

        let translated = apply_translation(x, &vac, Picture::Vacuum);
        assert_eq!(translated, vac, "vacuum-picture translations fix the vacuum exactly");
        let translated_phys = apply_translation(x, &vac, Picture::Physical);
        assert!((translated_phys.norm_sq() - 1.0).abs() < 1e-13, "translations stay unitary");
    }
}
