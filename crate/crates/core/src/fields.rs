//! Field observables built on the oscillator ensembles: one-photon vector
//! waves, the vacuum two-point function, and coherent field-tensor averages.
//!
//! The single-excitation state of the vector potential at a spacetime point
//! x puts -i exp(i k.x) O(k) mbar_a(k) in the one-quantum slot of positive
//! helicity and the same with m_a(k) in the negative one. Contracting two
//! such waves with -g^{ab} collapses the polarization sum through
//! m.mbar = -1 and leaves a profile-weighted plane-wave sum; comparing that
//! closed form against the literal state contraction exercises the whole
//! grid/oscillator/tetrad stack in one number, which equals 2 at coincident
//! arguments because the vacuum profile is normalized.
//!
//! The field-strength observable used here is the negative-frequency
//! component: per tensor slot (a,b) it is the operator
//! a_bar(f) + a_bar(g)^dag with smearings concentrated on one helicity each,
//! so its coherent expectation is linear in the displacement parameters. The
//! closed formula is checked against a brute-force dense expectation in the
//! tests.

use crate::error::{Error, Result};
use crate::fourvec::FourVector;
use crate::grid::{GridHandle, Helicity, PolarizedAmplitude, VacuumProfile};
use crate::oscillator::{FockTruncation, OscillatorState};
use crate::poincare::polarization_frame;
use num_complex::Complex64;

/// The four spacetime components of a one-photon vector wave.
pub struct VectorWave {
    pub components: [OscillatorState; 4],
    pub x: FourVector,
}

/// One-photon state of the vector potential at event x: each component is an
/// oscillator state supported on total occupation one.
pub fn one_photon_vector(
    profile: &VacuumProfile,
    trunc: FockTruncation,
    x: FourVector,
) -> Result<VectorWave> {
    let grid = profile.grid().clone();
    let minus_i = Complex64::new(0.0, -1.0);
    let mut components = Vec::with_capacity(4);
    for a in 0..4 {
        let mut state = OscillatorState::zero(&grid, trunc);
        for i in 0..grid.len() {
            let frame = polarization_frame(grid.point(i))?;
            let plane = Complex64::from_polar(1.0, grid.point(i).dot(&x));
            let common = minus_i * plane * profile.amplitude(i);
            state.set(i, 1, 0, common * frame.m_bar[a]);
            state.set(i, 0, 1, common * frame.m[a]);
        }
        components.push(state);
    }
    let components: [OscillatorState; 4] =
        components.try_into().map_err(|_| Error::InvalidArgument("component count".into()))?;
    Ok(VectorWave { components, x })
}

/// Closed form of the vacuum two-point function:
/// 2 sum_i w_i Z_i exp(i k_i.(x - y)). Equals 2 at x = y.
pub fn two_point_closed_form(profile: &VacuumProfile, x: FourVector, y: FourVector) -> Complex64 {
    let grid = profile.grid();
    let sep = x - y;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid.len() {
        acc += grid.weight(i)
            * profile.z(i)
            * Complex64::from_polar(1.0, grid.point(i).dot(&sep));
    }
    2.0 * acc
}

/// The same two-point function from the states themselves:
/// -g^{ab} <psi_a(y), psi_b(x)>, with the polarization sum collapsing through
/// the tetrad normalization.
pub fn two_point_from_states(
    profile: &VacuumProfile,
    trunc: FockTruncation,
    x: FourVector,
    y: FourVector,
) -> Result<Complex64> {
    let at_x = one_photon_vector(profile, trunc, x)?;
    let at_y = one_photon_vector(profile, trunc, y)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        let overlap = at_y.components[a].inner(&at_x.components[a])?;
        acc += if a == 0 { -overlap } else { overlap };
    }
    Ok(acc)
}

/// Smearings of the negative-frequency field component at slot (a, b):
/// the annihilation partner f lives on negative helicity, the creation
/// partner g on positive helicity, both proportional to the polarization
/// tensor e_ab = mbar_a k_b - k_a mbar_b.
pub fn field_smearings(
    grid: &GridHandle,
    a: usize,
    b: usize,
    x: FourVector,
) -> Result<(PolarizedAmplitude, PolarizedAmplitude)> {
    let mut f = PolarizedAmplitude::zero(grid);
    let mut g = PolarizedAmplitude::zero(grid);
    for i in 0..grid.len() {
        let frame = polarization_frame(grid.point(i))?;
        let e = frame.field_tensor()[a][b];
        let plane = Complex64::from_polar(1.0, grid.point(i).dot(&x));
        f.set(i, Helicity::Minus, e.conj() * plane);
        g.set(i, Helicity::Plus, e * plane);
    }
    Ok((f, g))
}

/// Coherent expectation of the negative-frequency field tensor:
/// F_ab(x) = sum_i w_i Z_i e_ab(k_i) (alpha_-(k_i) e^{-i k_i.x}
///                                    + conj(alpha_+(k_i)) e^{i k_i.x}).
/// Antisymmetric in (a, b) because e_ab is.
pub fn coherent_field_tensor(
    profile: &VacuumProfile,
    alpha: &PolarizedAmplitude,
    x: FourVector,
) -> Result<[[Complex64; 4]; 4]> {
    let grid = profile.grid();
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..grid.len() {
        let frame = polarization_frame(grid.point(i))?;
        let e = frame.field_tensor();
        let kx = grid.point(i).dot(&x);
        let wave = alpha.get(i, Helicity::Minus) * Complex64::from_polar(1.0, -kx)
            + alpha.get(i, Helicity::Plus).conj() * Complex64::from_polar(1.0, kx);
        let scale = grid.weight(i) * profile.z(i) * wave;
        for a in 0..4 {
            for b in 0..4 {
                out[a][b] += scale * e[a][b];
            }
        }
    }
    Ok(out)
}

/// Independent spacetime slots of an antisymmetric tensor, in scan order.
pub const TENSOR_SLOTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Time scan of the coherent field tensor at a fixed spatial point:
/// one row per time, real and imaginary parts of the six independent slots.
pub fn field_scan_csv(
    profile: &VacuumProfile,
    alpha: &PolarizedAmplitude,
    position: [f64; 3],
    times: &[f64],
) -> Result<String> {
    let mut out = String::from("t");
    for (a, b) in TENSOR_SLOTS {
        out.push_str(&format!(",f{a}{b}_re,f{a}{b}_im"));
    }
    out.push_str("\r\n");
    for &t in times {
        let x = FourVector::new(t, position[0], position[1], position[2]);
        let tensor = coherent_field_tensor(profile, alpha, x)?;
        out.push_str(&format!("{t:.12e}"));
        for (a, b) in TENSOR_SLOTS {
            out.push_str(&format!(",{:.12e},{:.12e}", tensor[a][b].re, tensor[a][b].im));
        }
        out.push_str("\r\n");
    }
    Ok(out)
}

/// Largest deviation of the one-photon wave from total occupation one; a
/// structural invariant of [`one_photon_vector`].
pub fn off_shell_mass(wave: &VectorWave) -> f64 {
    let mut worst = 0.0_f64;
    for state in &wave.components {
        let grid = state.grid();
        let l = state.truncation().levels();
        for i in 0..grid.len() {
            for np in 0..l {
                for nm in 0..l {
                    if np + nm != 1 {
                        worst = worst.max(state.get(i, np, nm).norm());
                    }
                }
            }
        }
    }
    worst
}
