//! Discretized momentum space for the massless field.
//!
//! The invariant measure dGamma(k) = d^3k / ((2pi)^3 2|k|) is sampled by a
//! finite set of null momenta k_i (k0 = |kvec| exactly) with positive
//! quadrature weights w_i, so that integrals become sums: int dGamma f ~
//! sum_i w_i f(k_i). The kernel delta_Gamma dual to this measure is diagonal
//! with value 1/w_i, which resolves the identity under contraction.
//!
//! The built-in construction is a log-radial grid (midpoint rule in ln|k|)
//! crossed with an equal-area angular layout (midpoint slices in cos theta
//! and phi). Midpoint nodes never touch the poles, so no grid point lies on
//! the negative z-axis, where the spinor section used by the Poincare module
//! is singular. Explicit point lists with per-point weight overrides are
//! accepted for test fixtures, under the same axis exclusion.

use crate::error::{Error, Result};
use crate::fourvec::FourVector;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

pub type GridHandle = Arc<MomentumGrid>;

/// Construction parameters for the quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub n_radial: usize,
    pub n_polar: usize,
    pub n_azimuth: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_min.is_finite() && self.k_max.is_finite()) || self.k_min <= 0.0 || self.k_max <= self.k_min {
            return Err(Error::InvalidGridSpec(format!(
                "need 0 < k_min < k_max, got k_min = {}, k_max = {}",
                self.k_min, self.k_max
            )));
        }
        if self.n_radial == 0 || self.n_polar == 0 || self.n_azimuth == 0 {
            return Err(Error::InvalidGridSpec("all point counts must be at least 1".into()));
        }
        Ok(())
    }

    /// Read `<prefix>.k_min` etc from a key-value configuration.
    pub fn from_key_values(kv: &crate::config::KeyValues, prefix: &str) -> Result<Self> {
        let key = |name: &str| format!("{prefix}.{name}");
        let spec = GridSpec {
            k_min: kv.require_f64(&key("k_min"))?,
            k_max: kv.require_f64(&key("k_max"))?,
            n_radial: kv.usize_or(&key("n_radial"), 16)?,
            n_polar: kv.usize_or(&key("n_polar"), 2)?,
            n_azimuth: kv.usize_or(&key("n_azimuth"), 4)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Null-momentum quadrature: points, weights, and the diagonal delta kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    points: Vec<FourVector>,
    weights: Vec<f64>,
    spec: Option<GridSpec>,
}

impl MomentumGrid {
    /// Log-radial shells crossed with equal-area angular points.
    ///
    /// Point order: radial shell outermost, then polar slice, then azimuth.
    /// Weight of every point in shell j: (k_j^2 / 2) du dOmega / (2pi)^3 with
    /// du the ln|k| cell width and dOmega = (2/n_polar)(2pi/n_azimuth).
    pub fn build(spec: &GridSpec) -> Result<GridHandle> {
        spec.validate()?;
        let du = (spec.k_max / spec.k_min).ln() / spec.n_radial as f64;
        let dcos = 2.0 / spec.n_polar as f64;
        let dphi = 2.0 * PI / spec.n_azimuth as f64;
        let measure_scale = du * dcos * dphi / (2.0 * PI).powi(3);

        let mut points = Vec::with_capacity(spec.n_radial * spec.n_polar * spec.n_azimuth);
        let mut weights = Vec::with_capacity(points.capacity());
        for jr in 0..spec.n_radial {
            let u = spec.k_min.ln() + (jr as f64 + 0.5) * du;
            let k = u.exp();
            let w = 0.5 * k * k * measure_scale;
            for jp in 0..spec.n_polar {
                let cos_t = -1.0 + (jp as f64 + 0.5) * dcos;
                let sin_t = (1.0 - cos_t * cos_t).sqrt();
                for ja in 0..spec.n_azimuth {
                    let phi = (ja as f64 + 0.5) * dphi;
                    points.push(FourVector::null_from_spatial(
                        k * sin_t * phi.cos(),
                        k * sin_t * phi.sin(),
                        k * cos_t,
                    ));
                    weights.push(w);
                }
            }
        }
        let grid = MomentumGrid { points, weights, spec: Some(spec.clone()) };
        grid.check_points()?;
        Ok(Arc::new(grid))
    }

    /// Explicit spatial momenta with per-point weights; k0 is derived.
    /// Intended for fixtures, including unit-weight grids.
    pub fn from_points(spatial: &[[f64; 3]], weights: &[f64]) -> Result<GridHandle> {
        if spatial.is_empty() {
            return Err(Error::InvalidGridSpec("grid needs at least one point".into()));
        }
        if spatial.len() != weights.len() {
            return Err(Error::ShapeMismatch { expected: spatial.len(), got: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidGridSpec(format!("weights must be positive and finite, got {w}")));
        }
        let points: Vec<FourVector> =
            spatial.iter().map(|&[x, y, z]| FourVector::null_from_spatial(x, y, z)).collect();
        let grid = MomentumGrid { points, weights: weights.to_vec(), spec: None };
        grid.check_points()?;
        Ok(Arc::new(grid))
    }

    fn check_points(&self) -> Result<()> {
        for p in &self.points {
            if p[1] == 0.0 && p[2] == 0.0 && p[3] <= 0.0 {
                return Err(Error::SingularRay);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> FourVector {
        self.points[i]
    }

    pub fn points(&self) -> &[FourVector] {
        &self.points
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spec(&self) -> Option<&GridSpec> {
        self.spec.as_ref()
    }

    /// Kernel dual to the quadrature: delta_Gamma(i, j) = delta_ij / w_i,
    /// so that sum_j w_j delta_Gamma(i, j) f_j = f_i.
    pub fn delta_gamma(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0 / self.weights[i]
        } else {
            0.0
        }
    }

    /// Total measure sum_i w_i; approximates (k_max^2 - k_min^2) / (8 pi^2).
    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Two grids are interoperable when they carry identical points and weights.
    pub fn compatible(&self, other: &MomentumGrid) -> bool {
        std::ptr::eq(self, other) || (self.points == other.points && self.weights == other.weights)
    }

    /// RFC 4180 table with columns k0,k1,k2,k3,w,Z.
    pub fn to_csv(&self, profile: &VacuumProfile) -> Result<String> {
        if !self.compatible(profile.grid()) {
            return Err(Error::InvalidArgument("profile built on a different grid".into()));
        }
        let mut out = String::from("k0,k1,k2,k3,w,Z\r\n");
        for (i, (p, w)) in self.points.iter().zip(&self.weights).enumerate() {
            writeln!(out, "{},{},{},{},{},{}\r", p[0], p[1], p[2], p[3], w, profile.z(i)).unwrap();
        }
        Ok(out)
    }
}

/// Photon helicity label; also the second index of polarized amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub const ALL: [Helicity; 2] = [Helicity::Plus, Helicity::Minus];

    pub fn idx(self) -> usize {
        match self {
            Helicity::Plus => 0,
            Helicity::Minus => 1,
        }
    }

    /// Signed helicity +-1; enters Wigner phases as exp(2 i s Theta).
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }
}

/// Name and parameters of a built-in vacuum profile shape.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileTemplate {
    /// Z(k) proportional to |k|^epsilon exp(-(ln|k| / sigma)^2).
    /// epsilon = 1 gives the infrared-regularizing profile vanishing like |k|.
    LogNormalPower { epsilon: f64, sigma: f64 },
    /// Z constant across the grid; no infrared suppression.
    Flat,
}

impl ProfileTemplate {
    pub fn from_key_values(kv: &crate::config::KeyValues, prefix: &str) -> Result<Self> {
        let key = |name: &str| format!("{prefix}.{name}");
        match kv.require(&key("template"))? {
            "lognormal" => Ok(ProfileTemplate::LogNormalPower {
                epsilon: kv.f64_or(&key("epsilon"), 1.0)?,
                sigma: kv.f64_or(&key("sigma"), 2.0)?,
            }),
            "flat" => Ok(ProfileTemplate::Flat),
            other => Err(Error::Config(format!("unknown profile template `{other}`"))),
        }
    }

    fn unnormalized_z(&self, k: f64) -> f64 {
        match *self {
            ProfileTemplate::LogNormalPower { epsilon, sigma } => {
                let l = k.ln() / sigma;
                k.powf(epsilon) * (-l * l).exp()
            }
            ProfileTemplate::Flat => 1.0,
        }
    }
}

/// Vacuum wave function O(k) on the grid together with Z(k) = |O(k)|^2,
/// normalized so that sum_i w_i Z_i = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumProfile {
    grid: GridHandle,
    amp: Vec<Complex64>,
    z: Vec<f64>,
}

impl VacuumProfile {
    pub fn from_template(grid: &GridHandle, template: &ProfileTemplate) -> Result<Self> {
        let z: Vec<f64> = grid.points().iter().map(|p| template.unnormalized_z(p[0])).collect();
        Self::from_z(grid, &z)
    }

    /// Real non-negative Z values; O = sqrt(Z) after normalization.
    pub fn from_z(grid: &GridHandle, z: &[f64]) -> Result<Self> {
        if z.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: z.len() });
        }
        if let Some(bad) = z.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidArgument(format!("Z values must be non-negative and finite, got {bad}")));
        }
        let amp: Vec<Complex64> = z.iter().map(|v| Complex64::new(v.sqrt(), 0.0)).collect();
        Self::from_amplitudes(grid, amp)
    }

    /// Complex vacuum amplitudes; normalized in place.
    pub fn from_amplitudes(grid: &GridHandle, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: amp.len() });
        }
        let mass: f64 = amp.iter().zip(grid.weights()).map(|(a, w)| w * a.norm_sqr()).sum();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NotNormalizable);
        }
        let scale = 1.0 / mass.sqrt();
        let amp: Vec<Complex64> = amp.into_iter().map(|a| a * scale).collect();
        let z: Vec<f64> = amp.iter().map(|a| a.norm_sqr()).collect();
        Ok(VacuumProfile { grid: grid.clone(), amp, z })
    }

    pub fn grid(&self) -> &GridHandle {
        &self.grid
    }

    pub fn amplitude(&self, i: usize) -> Complex64 {
        self.amp[i]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z[i]
    }

    pub fn z_values(&self) -> &[f64] {
        &self.z
    }

    /// sum_i w_i Z_i; 1 up to rounding by construction.
    pub fn total_mass(&self) -> f64 {
        self.z.iter().zip(self.grid.weights()).map(|(z, w)| w * z).sum()
    }
}

/// Complex amplitude with a helicity pair per grid point: f(k_i, s).
/// Smearing functions for creation/annihilation operators, coherent-state
/// displacement parameters, and current amplitudes all take this shape.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedAmplitude {
    grid: GridHandle,
    values: Vec<Complex64>,
}

impl PolarizedAmplitude {
    pub fn zero(grid: &GridHandle) -> Self {
        PolarizedAmplitude { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); 2 * grid.len()] }
    }

    pub fn from_fn(grid: &GridHandle, mut f: impl FnMut(usize, Helicity) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(2 * grid.len());
        for i in 0..grid.len() {
            for h in Helicity::ALL {
                values.push(f(i, h));
            }
        }
        PolarizedAmplitude { grid: grid.clone(), values }
    }

    /// Point-major value list: (i0,+), (i0,-), (i1,+), ...
    pub fn from_values(grid: &GridHandle, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != 2 * grid.len() {
            return Err(Error::ShapeMismatch { expected: 2 * grid.len(), got: values.len() });
        }
        Ok(PolarizedAmplitude { grid: grid.clone(), values })
    }

    /// Indicator at one (point, helicity) scaled by 1/w_i. Smearing with this
    /// amplitude exposes the unsmeared operator at k_i.
    pub fn point_basis(grid: &GridHandle, i: usize, h: Helicity) -> Result<Self> {
        if i >= grid.len() {
            return Err(Error::IndexOutOfRange { index: i, len: grid.len() });
        }
        let mut out = Self::zero(grid);
        out.set(i, h, Complex64::new(1.0 / grid.weight(i), 0.0));
        Ok(out)
    }

    pub fn grid(&self) -> &GridHandle {
        &self.grid
    }

    pub fn get(&self, i: usize, h: Helicity) -> Complex64 {
        self.values[2 * i + h.idx()]
    }

    pub fn set(&mut self, i: usize, h: Helicity, v: Complex64) {
        self.values[2 * i + h.idx()] = v;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scale(&self, s: Complex64) -> Self {
        PolarizedAmplitude { grid: self.grid.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &PolarizedAmplitude) -> Result<Self> {
        check_same_grid(self, other)?;
        Ok(PolarizedAmplitude {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// Pointwise pairing summed over helicity: h_i = sum_s conj(f_{i,s}) g_{i,s}.
    /// This is the density whose Z-weighted integral is the vacuum inner product,
    /// and the multiplication amplitude produced by the CCR commutator.
    pub fn pairing_density(&self, other: &PolarizedAmplitude) -> Result<Vec<Complex64>> {
        check_same_grid(self, other)?;
        Ok((0..self.grid.len())
            .map(|i| {
                Helicity::ALL
                    .iter()
                    .map(|&h| self.get(i, h).conj() * other.get(i, h))
                    .sum()
            })
            .collect())
    }
}

fn check_same_grid(a: &PolarizedAmplitude, b: &PolarizedAmplitude) -> Result<()> {
    if !a.grid().compatible(b.grid()) {
        return Err(Error::InvalidArgument("amplitudes live on different grids".into()));
    }
    Ok(())
}

/// Vacuum-weighted inner product <f|g>_Z = sum_s sum_i w_i Z_i conj(f_{i,s}) g_{i,s}.
/// This is the sesquilinear form whose Gram matrix drives the large-N
/// correlator limit.
pub fn inner_product_z(f: &PolarizedAmplitude, g: &PolarizedAmplitude, profile: &VacuumProfile) -> Result<Complex64> {
    check_same_grid(f, g)?;
    if !f.grid().compatible(profile.grid()) {
        return Err(Error::InvalidArgument("profile built on a different grid".into()));
    }
    let grid = profile.grid();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid.len() {
        let wz = grid.weight(i) * profile.z(i);
        for h in Helicity::ALL {
            acc += wz * f.get(i, h).conj() * g.get(i, h);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(n_radial: usize, n_polar: usize, n_azimuth: usize) -> GridSpec {
        GridSpec { k_min: 0.1, k_max: 10.0, n_radial, n_polar, n_azimuth }
    }

    /// int dGamma 1 over the shell k_min..k_max, done analytically.
    fn exact_measure(k_min: f64, k_max: f64) -> f64 {
        (k_max * k_max - k_min * k_min) / (8.0 * PI * PI)
    }

    #[test]
    fn points_are_null_with_positive_weights() {
        let grid = MomentumGrid::build(&spec(8, 3, 4)).unwrap();
        assert_eq!(grid.len(), 8 * 3 * 4);
        for i in 0..grid.len() {
            let p = grid.point(i);
            // k0 is stored as |kvec| exactly; the float dot still rounds at 1 ulp
            assert!(p.dot(&p).abs() <= 4.0 * f64::EPSILON * p[0] * p[0]);
            assert_eq!(p[0], p.spatial_norm());
            assert!(grid.weight(i) > 0.0);
            assert!(!(p[1] == 0.0 && p[2] == 0.0));
        }
    }

    #[test]
    fn quadrature_converges_at_second_order() {
        // Radial midpoint rule in ln k converges at order du^2; the angular
        // layout integrates radial-only functions exactly, so the measure
        // error must shrink close to 4x when the shell count doubles.
        let exact = exact_measure(0.1, 10.0);
        let coarse = (MomentumGrid::build(&spec(16, 2, 4)).unwrap().total_measure() - exact).abs();
        let fine = (MomentumGrid::build(&spec(32, 2, 4)).unwrap().total_measure() - exact).abs();
        let ratio = coarse / fine;
        assert!((3.4..4.6).contains(&ratio), "radial convergence ratio {ratio}");
    }

    #[test]
    fn angular_quadrature_converges_at_second_order() {
        // integrand cos^2 theta: int dGamma cos^2 theta = measure / 3
        let integrate = |n_polar: usize| {
            let grid = MomentumGrid::build(&spec(16, n_polar, 4)).unwrap();
            (0..grid.len())
                .map(|i| {
                    let p = grid.point(i);
                    let c = p[3] / p.spatial_norm();
                    grid.weight(i) * c * c
                })
                .sum::<f64>()
        };
        let exact = integrate(400); // reference at high polar resolution
        let coarse = (integrate(4) - exact).abs();
        let fine = (integrate(8) - exact).abs();
        let ratio = coarse / fine;
        assert!((3.4..4.6).contains(&ratio), "polar convergence ratio {ratio}");
    }

    #[test]
    fn explicit_points_reject_singular_ray() {
        assert!(matches!(
            MomentumGrid::from_points(&[[0.0, 0.0, -1.0]], &[1.0]),
            Err(Error::SingularRay)
        ));
        assert!(matches!(
            MomentumGrid::from_points(&[[0.0, 0.0, 0.0]], &[1.0]),
            Err(Error::SingularRay)
        ));
        assert!(MomentumGrid::from_points(&[[0.0, 0.0, 1.0]], &[1.0]).is_ok());
        assert!(MomentumGrid::from_points(&[[1.0, 0.0, 0.0]], &[0.0]).is_err());
    }

    #[test]
    fn delta_contraction_resolves_identity() {
        let grid = MomentumGrid::from_points(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.5]], &[1.0, 1.0]).unwrap();
        let f = [2.5, -0.75];
        for i in 0..2 {
            let contracted: f64 = (0..2).map(|j| grid.weight(j) * grid.delta_gamma(i, j) * f[j]).sum();
            assert_eq!(contracted, f[i], "unit weights resolve the delta exactly");
        }
        let grid = MomentumGrid::build(&spec(4, 2, 3)).unwrap();
        for i in [0, 7, grid.len() - 1] {
            let contracted: f64 = (0..grid.len()).map(|j| grid.weight(j) * grid.delta_gamma(i, j) * f[0]).sum();
            assert!((contracted - f[0]).abs() <= 1e-15 * f[0].abs());
        }
    }

    #[test]
    fn profile_normalizes_and_is_idempotent() {
        let grid = MomentumGrid::build(&spec(12, 2, 4)).unwrap();
        let profile =
            VacuumProfile::from_template(&grid, &ProfileTemplate::LogNormalPower { epsilon: 1.0, sigma: 2.0 })
                .unwrap();
        assert!((profile.total_mass() - 1.0).abs() < 1e-12);
        let again = VacuumProfile::from_z(&grid, profile.z_values()).unwrap();
        for i in 0..grid.len() {
            assert!((again.z(i) - profile.z(i)).abs() < 1e-14);
        }
        let flat = VacuumProfile::from_template(&grid, &ProfileTemplate::Flat).unwrap();
        assert!((flat.total_mass() - 1.0).abs() < 1e-12);
        let z0 = flat.z(0);
        assert!(flat.z_values().iter().all(|&z| (z - z0).abs() < 1e-15));
    }

    #[test]
    fn profile_rejects_degenerate_input() {
        let grid = MomentumGrid::from_points(&[[1.0, 0.0, 0.0]], &[1.0]).unwrap();
        assert!(matches!(VacuumProfile::from_z(&grid, &[0.0]), Err(Error::NotNormalizable)));
        assert!(VacuumProfile::from_z(&grid, &[-1.0]).is_err());
        assert!(VacuumProfile::from_z(&grid, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn csv_export_has_header_and_all_rows() {
        let grid = MomentumGrid::build(&spec(2, 1, 2)).unwrap();
        let profile = VacuumProfile::from_template(&grid, &ProfileTemplate::Flat).unwrap();
        let csv = grid.to_csv(&profile).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k0,k1,k2,k3,w,Z");
        assert_eq!(lines.len(), 1 + grid.len());
        // numeric row roundtrip
        let fields: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[0], grid.point(0)[0]);
        assert_eq!(fields[4], grid.weight(0));
    }

    #[test]
    fn point_basis_exposes_unsmeared_normalization() {
        let grid = MomentumGrid::from_points(&[[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]], &[0.25, 2.0]).unwrap();
        let f = PolarizedAmplitude::point_basis(&grid, 1, Helicity::Minus).unwrap();
        assert_eq!(f.get(1, Helicity::Minus), Complex64::new(0.5, 0.0));
        assert_eq!(f.get(1, Helicity::Plus), Complex64::new(0.0, 0.0));
        assert_eq!(f.get(0, Helicity::Minus), Complex64::new(0.0, 0.0));
        assert!(PolarizedAmplitude::point_basis(&grid, 2, Helicity::Plus).is_err());
    }

    proptest! {
        #[test]
        fn inner_product_z_is_hermitian_and_positive(
            re in proptest::collection::vec(-3.0f64..3.0, 8),
            im in proptest::collection::vec(-3.0f64..3.0, 8),
            z in proptest::collection::vec(0.05f64..5.0, 2),
        ) {
            let grid = MomentumGrid::from_points(&[[1.0, 0.0, 0.0], [0.0, 1.5, -0.5]], &[0.7, 1.3]).unwrap();
            let profile = VacuumProfile::from_z(&grid, &z).unwrap();
            let vals: Vec<Complex64> = re.iter().zip(&im).map(|(&r, &i)| Complex64::new(r, i)).collect();
            let f = PolarizedAmplitude::from_values(&grid, vals[..4].to_vec()).unwrap();
            let g = PolarizedAmplitude::from_values(&grid, vals[4..].to_vec()).unwrap();
            let fg = inner_product_z(&f, &g, &profile).unwrap();
            let gf = inner_product_z(&g, &f, &profile).unwrap();
            prop_assert!((fg - gf.conj()).norm() < 1e-12);
            let ff = inner_product_z(&f, &f, &profile).unwrap();
            prop_assert!(ff.im.abs() < 1e-12);
            prop_assert!(ff.re >= 0.0);
        }

        #[test]
        fn profile_mass_normalizes_for_random_z(z in proptest::collection::vec(0.0f64..10.0, 24)) {
            let grid = MomentumGrid::build(&GridSpec { k_min: 0.2, k_max: 5.0, n_radial: 6, n_polar: 2, n_azimuth: 2 }).unwrap();
            prop_assume!(z.iter().any(|&v| v > 0.0));
            let profile = VacuumProfile::from_z(&grid, &z).unwrap();
            prop_assert!((profile.total_mass() - 1.0).abs() < 1e-12);
        }
    }
}
