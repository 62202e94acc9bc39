//! Soft radiation from classical currents: transverse projection, radiated
//! quanta, vacuum persistence, and the infrared behaviour of both counts.
//!
//! A classical current enters through its Fourier transform on the momentum
//! grid. Projecting onto the null tetrad splits it into helicity amplitudes
//! j_plus = -m.J and j_minus = -mbar.J plus a longitudinal remainder that is
//! pure gauge for conserved currents. The out state is the vacuum displaced
//! by those amplitudes, and everything measurable reduces to profile-weighted
//! quadratic sums:
//!
//! ```text
//! n_reducible = sum_i w_i Z_i (|j_+|^2 + |j_-|^2)
//! n_fock      = sum_i w_i     (|j_+|^2 + |j_-|^2)
//! ```
//!
//! For a kick current |j|^2 falls off like 1/k^2, so the Fock count grows
//! linearly in ln(1/k_min) while the reducible count converges whenever the
//! vacuum profile vanishes at zero momentum; a flat profile reproduces the
//! Fock divergence. The sweep over infrared cutoffs quantifies both
//! behaviours on rebuilt grids and feeds the certification numbers.

use crate::error::{Error, Result};
use crate::fourvec::{CFourVector, FourVector};
use crate::grid::{GridHandle, GridSpec, Helicity, MomentumGrid, PolarizedAmplitude, ProfileTemplate, VacuumProfile};
use crate::poincare::polarization_frame;
use crate::stats::{fit_line, LineFit};
use num_complex::Complex64;

/// Point charge changing four-velocity at the origin, with an optional
/// Gaussian frequency cutoff: J(k) = i q (v/(k.v) - u/(k.u)) cutoff(k0).
#[derive(Clone, Debug)]
pub struct KickCurrent {
    pub charge: f64,
    pub before: FourVector,
    pub after: FourVector,
    pub uv_scale: Option<f64>,
}

impl KickCurrent {
    /// Straight-line kick from rest to velocity v3 along the 3-axis.
    pub fn along_z(charge: f64, v3: f64, uv_scale: Option<f64>) -> Result<Self> {
        if !(v3.abs() < 1.0) {
            return Err(Error::InvalidArgument("kick speed must stay below 1".into()));
        }
        let gamma = 1.0 / (1.0 - v3 * v3).sqrt();
        Ok(KickCurrent {
            charge,
            before: FourVector::new(1.0, 0.0, 0.0, 0.0),
            after: FourVector::new(gamma, 0.0, 0.0, gamma * v3),
            uv_scale,
        })
    }

    pub fn fourier(&self, k: FourVector) -> CFourVector {
        let ku = k.dot(&self.before);
        let kv = k.dot(&self.after);
        let cutoff = match self.uv_scale {
            Some(s) => (-0.5 * (k[0] / s).powi(2)).exp(),
            None => 1.0,
        };
        let iq = Complex64::new(0.0, self.charge * cutoff);
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (a, slot) in out.iter_mut().enumerate() {
            *slot = iq * (self.after[a] / kv - self.before[a] / ku);
        }
        CFourVector(out)
    }
}

/// Helicity content of a current on the grid, plus the per-point norm of the
/// part the transverse frame cannot carry (pure gauge when the current is
/// conserved).
pub struct ProjectedCurrent {
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
    pub gauge_residual: Vec<f64>,
}

impl ProjectedCurrent {
    pub fn to_amplitude(&self, grid: &GridHandle) -> Result<PolarizedAmplitude> {
        if self.plus.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: self.plus.len() });
        }
        let mut out = PolarizedAmplitude::zero(grid);
        for i in 0..grid.len() {
            out.set(i, Helicity::Plus, self.plus[i]);
            out.set(i, Helicity::Minus, self.minus[i]);
        }
        Ok(out)
    }
}

/// Split a four-current into helicity amplitudes along the null tetrad:
/// j_+ = -m.J (the mbar coefficient) and j_- = -mbar.J (the m coefficient).
pub fn project_current(grid: &GridHandle, current: &[CFourVector]) -> Result<ProjectedCurrent> {
    if current.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), got: current.len() });
    }
    let mut plus = Vec::with_capacity(grid.len());
    let mut minus = Vec::with_capacity(grid.len());
    let mut gauge_residual = Vec::with_capacity(grid.len());
    for (i, j) in current.iter().enumerate() {
        let frame = polarization_frame(grid.point(i))?;
        let jp = -frame.m.dot(j);
        let jm = -frame.m_bar.dot(j);
        let rebuilt = frame.m_bar.scale(jp) + frame.m.scale(jm);
        gauge_residual.push((*j - rebuilt).component_norm());
        plus.push(jp);
        minus.push(jm);
    }
    Ok(ProjectedCurrent { plus, minus, gauge_residual })
}

/// Project a kick current over the whole grid.
pub fn project_kick(grid: &GridHandle, kick: &KickCurrent) -> Result<ProjectedCurrent> {
    let values: Vec<CFourVector> = grid.points().iter().map(|&k| kick.fourier(k)).collect();
    project_current(grid, &values)
}

/// Radiated-quanta bookkeeping for one displacement amplitude.
#[derive(Clone, Debug)]
pub struct RadiationReport {
    /// Mean photon number of the displaced vacuum, profile weighted.
    pub n_reducible: f64,
    /// The same sum without the vacuum profile: the regularized Fock count.
    pub n_fock: f64,
    /// No-photon probability at the given ensemble size.
    pub p0_reducible: f64,
    /// Fock vacuum persistence exp(-n_fock).
    pub p0_fock: f64,
    pub n_osc: usize,
}

/// Closed-form expectations of the out state from displacing the vacuum by
/// `beta`. Truncation never enters: every quantity is a quadrature sum.
pub fn radiation_report(
    profile: &VacuumProfile,
    beta: &PolarizedAmplitude,
    n_osc: usize,
) -> Result<RadiationReport> {
    if n_osc == 0 {
        return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
    }
    let grid = profile.grid();
    let mut n_red = 0.0;
    let mut n_fock = 0.0;
    let mut factor_quiet = 0.0;
    for i in 0..grid.len() {
        let intensity: f64 =
            Helicity::ALL.iter().map(|&h| beta.get(i, h).norm_sqr()).sum();
        n_red += grid.weight(i) * profile.z(i) * intensity;
        n_fock += grid.weight(i) * intensity;
        factor_quiet += grid.weight(i) * profile.z(i) * (-intensity / n_osc as f64).exp();
    }
    Ok(RadiationReport {
        n_reducible: n_red,
        n_fock,
        p0_reducible: factor_quiet.powi(n_osc as i32),
        p0_fock: (-n_fock).exp(),
        n_osc,
    })
}

/// One infrared cutoff in a sweep.
#[derive(Clone, Debug)]
pub struct IrRow {
    pub k_min: f64,
    pub n_reducible: f64,
    pub n_fock: f64,
    pub p0_reducible: f64,
    pub p0_fock: f64,
}

/// Rebuild the grid at each infrared cutoff, project the current, and
/// collect the radiated-quanta reports. The profile template is re-applied
/// per grid, so its normalization tracks the cutoff like the physics does.
pub fn ir_sweep(
    base: &GridSpec,
    template: &ProfileTemplate,
    kick: &KickCurrent,
    k_mins: &[f64],
    n_osc: usize,
) -> Result<Vec<IrRow>> {
    let mut rows = Vec::with_capacity(k_mins.len());
    for &k_min in k_mins {
        let spec = GridSpec { k_min, ..*base };
        let grid = MomentumGrid::build(&spec)?;
        let profile = VacuumProfile::from_template(&grid, template)?;
        let beta = project_kick(&grid, kick)?.to_amplitude(&grid)?;
        let report = radiation_report(&profile, &beta, n_osc)?;
        rows.push(IrRow {
            k_min,
            n_reducible: report.n_reducible,
            n_fock: report.n_fock,
            p0_reducible: report.p0_reducible,
            p0_fock: report.p0_fock,
        });
    }
    Ok(rows)
}

/// Certification numbers for an infrared sweep: how straight the Fock count
/// is in ln(1/k_min), and how settled the reducible count is across the
/// final halvings.
#[derive(Clone, Debug)]
pub struct IrCertificate {
    pub fock_fit: LineFit,
    /// max |n_red(step) - n_red(step-1)| / |n_red(last)| over the tail.
    pub reducible_tail_drift: f64,
    pub tail_steps: usize,
}

pub fn ir_certificate(rows: &[IrRow], tail_steps: usize) -> Result<IrCertificate> {
    if rows.len() < tail_steps + 1 || tail_steps == 0 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} sweep rows for {} tail steps",
            tail_steps + 1,
            tail_steps
        )));
    }
    let xs: Vec<f64> = rows.iter().map(|r| (1.0 / r.k_min).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.n_fock).collect();
    let fock_fit = fit_line(&xs, &ys)?;
    let last = rows.last().unwrap().n_reducible;
    let mut drift = 0.0_f64;
    for pair in rows[rows.len() - tail_steps - 1..].windows(2) {
        drift = drift.max((pair[1].n_reducible - pair[0].n_reducible).abs() / last.abs());
    }
    Ok(IrCertificate { fock_fit, reducible_tail_drift: drift, tail_steps })
}

/// CSV export of a sweep, one row per infrared cutoff.
pub fn ir_csv(rows: &[IrRow]) -> String {
    let mut out = String::from("k_min,n_reducible,n_fock,p0_reducible,p0_fock\r\n");
    for r in rows {
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\r\n",
            r.k_min, r.n_reducible, r.n_fock, r.p0_reducible, r.p0_fock
        ));
    }
    out
}
