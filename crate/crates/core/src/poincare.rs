//! Spinor dictionary, null tetrads, and finite Poincaré transformations.
//!
//! Four-vectors map to 2x2 matrices through X(v) = (v0 I + v.sigma)/sqrt(2),
//! so that 2 det X(v) = v.v. A future-pointing null momentum factorizes as
//! X(k) = pi pi^dag; the standard spinor pi(k) is fixed by an explicit
//! formula that is smooth everywhere except the negative 3-axis, which the
//! momentum grid excludes by construction. The companion spinor omega with
//! symplectic pairing <omega, pi> = 1 completes a basis, and X(m) =
//! omega pi^dag defines the circular polarization vector: m.m = 0,
//! m.mbar = -1, k.m = 0.
//!
//! A Poincaré element is an SL(2,C) matrix A plus a translation y, acting on
//! vectors by X(Lambda v) = A X(v) A^dag. Transporting the standard spinor
//! along the action produces the Wigner phase lambda(A, k), a unit complex
//! number obeying the cocycle rule lambda(A1 A2, k) =
//! lambda(A1, k) lambda(A2, Lambda1^{-1} k). States transform factor-wise:
//! grid points permute (the grid must be closed under the rotation),
//! occupation numbers ride along, and each quantum of helicity s picks up
//! lambda^{2s} while translations contribute exp(i k.y) per level, with the
//! zero-point term switched by the picture. Helicity phases only ever enter
//! squared, so the SL(2,C) double cover acts trivially, and the whole map is
//! a true unitary representation rather than a ray representation.

use crate::error::{Error, Result};
use crate::fourvec::{CFourVector, FourVector};
use crate::grid::{GridHandle, Helicity, PolarizedAmplitude};
use crate::oscillator::{FockTruncation, OscillatorState, Picture};
use crate::ensemble::{DenseState, ProductState};
use num_complex::Complex64;

type Mat2 = [[Complex64; 2]; 2];

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// X(v) = (v0 I + v.sigma)/sqrt(2), extended linearly to complex vectors.
pub fn spinor_matrix(v: &CFourVector) -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    [
        [(v[0] + v[3]) * s, (v[1] - i * v[2]) * s],
        [(v[1] + i * v[2]) * s, (v[0] - v[3]) * s],
    ]
}

/// Inverse of [`spinor_matrix`]: the unique v with X(v) = m.
pub fn matrix_vector(m: &Mat2) -> CFourVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    CFourVector([
        (m[0][0] + m[1][1]) * s,
        (m[0][1] + m[1][0]) * s,
        i * (m[0][1] - m[1][0]) * s,
        (m[0][0] - m[1][1]) * s,
    ])
}

fn mat_mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C_ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn mat_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn mat_det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Standard spinor of a future null momentum: X(k) = pi pi^dag. Fails on the
/// negative 3-axis where k0 + k3 vanishes.
pub fn standard_spinor(k: FourVector) -> Result<[Complex64; 2]> {
    let lift = k[0] + k[3];
    if lift <= f64::EPSILON * k[0].max(1.0) {
        return Err(Error::SingularRay);
    }
    let quarter = 2.0_f64.powf(-0.25);
    let root = lift.sqrt();
    Ok([
        Complex64::new(quarter * root, 0.0),
        Complex64::new(k[1], k[2]) * (quarter / root),
    ])
}

/// Companion spinor with symplectic pairing omega0 pi1 - omega1 pi0 = 1.
pub fn companion_spinor(pi: &[Complex64; 2]) -> [Complex64; 2] {
    // |pi0|^2 + |pi1|^2 = sqrt(2) k0, so this normalization closes the pairing.
    let n = pi[0].norm_sqr() + pi[1].norm_sqr();
    [pi[1].conj() / n, -pi[0].conj() / n]
}

/// Null tetrad attached to one momentum: the spinor pair and the circular
/// polarization vector m with X(m) = omega pi^dag.
pub struct PolarizationFrame {
    pub k: FourVector,
    pub pi: [Complex64; 2],
    pub omega: [Complex64; 2],
    pub m: CFourVector,
    pub m_bar: CFourVector,
}

pub fn polarization_frame(k: FourVector) -> Result<PolarizationFrame> {
    let pi = standard_spinor(k)?;
    let omega = companion_spinor(&pi);
    let mut outer = [[C_ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            outer[r][c] = omega[r] * pi[c].conj();
        }
    }
    let m = matrix_vector(&outer);
    let m_bar = m.conj();
    Ok(PolarizationFrame { k, pi, omega, m, m_bar })
}

impl PolarizationFrame {
    /// Polarization tensor e_ab = mbar_a k_b - k_a mbar_b (covariant
    /// components, lowered with the metric signature +---).
    pub fn field_tensor(&self) -> [[Complex64; 4]; 4] {
        let lower = |v: &CFourVector, a: usize| if a == 0 { v[a] } else { -v[a] };
        let kc = self.k.to_complex();
        let mut e = [[C_ZERO; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                e[a][b] = lower(&self.m_bar, a) * lower(&kc, b) - lower(&kc, a) * lower(&self.m_bar, b);
            }
        }
        e
    }
}

/// One finite Poincaré transformation: an SL(2,C) matrix and a translation.
#[derive(Clone)]
pub struct PoincareElement {
    a: Mat2,
    y: FourVector,
}

impl PoincareElement {
    pub fn identity() -> Self {
        PoincareElement { a: [[C_ONE, C_ZERO], [C_ZERO, C_ONE]], y: FourVector::ZERO }
    }

    /// Rotation by phi about the 3-axis: A = diag(e^{-i phi/2}, e^{i phi/2}).
    pub fn rotation_z(phi: f64) -> Self {
        PoincareElement {
            a: [
                [Complex64::from_polar(1.0, -0.5 * phi), C_ZERO],
                [C_ZERO, Complex64::from_polar(1.0, 0.5 * phi)],
            ],
            y: FourVector::ZERO,
        }
    }

    /// Boost of rapidity chi along the 3-axis: A = diag(e^{chi/2}, e^{-chi/2}).
    pub fn boost_z(chi: f64) -> Self {
        PoincareElement {
            a: [
                [Complex64::new((0.5 * chi).exp(), 0.0), C_ZERO],
                [C_ZERO, Complex64::new((-0.5 * chi).exp(), 0.0)],
            ],
            y: FourVector::ZERO,
        }
    }

    pub fn translation(y: FourVector) -> Self {
        PoincareElement { a: [[C_ONE, C_ZERO], [C_ZERO, C_ONE]], y }
    }

    /// Wrap an arbitrary invertible matrix, rescaled to unit determinant.
    pub fn from_matrix(a: Mat2) -> Result<Self> {
        let det = mat_det(&a);
        if det.norm() < 1e-12 {
            return Err(Error::InvalidArgument("transformation matrix is singular".into()));
        }
        let s = det.sqrt().inv();
        let a = [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]];
        Ok(PoincareElement { a, y: FourVector::ZERO })
    }

    pub fn with_translation(mut self, y: FourVector) -> Self {
        self.y = y;
        self
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.a
    }

    pub fn translation_part(&self) -> FourVector {
        self.y
    }

    /// Group law: (A1, y1)(A2, y2) = (A1 A2, y1 + Lambda1 y2).
    pub fn compose(&self, other: &PoincareElement) -> Self {
        PoincareElement {
            a: mat_mul2(&self.a, &other.a),
            y: self.y + self.linear_vector(other.y),
        }
    }

    pub fn inverse(&self) -> Self {
        // det A = 1, so the adjugate inverts A.
        let inv = [[self.a[1][1], -self.a[0][1]], [-self.a[1][0], self.a[0][0]]];
        let back = PoincareElement { a: inv, y: FourVector::ZERO };
        let y = back.linear_vector(self.y);
        PoincareElement { a: inv, y: -y }
    }

    /// Linear part on real vectors: Lambda v from A X(v) A^dag.
    pub fn linear_vector(&self, v: FourVector) -> FourVector {
        let x = spinor_matrix(&v.to_complex());
        let moved = mat_mul2(&mat_mul2(&self.a, &x), &mat_adjoint(&self.a));
        let out = matrix_vector(&moved);
        // Hermitian sandwich of a Hermitian matrix: components are real.
        FourVector::new(out[0].re, out[1].re, out[2].re, out[3].re)
    }

    /// Full affine action on event coordinates: Lambda x + y.
    pub fn apply_point(&self, x: FourVector) -> FourVector {
        self.linear_vector(x) + self.y
    }
}

/// Wigner phase lambda(A, k): the unit complex number with
/// A pi(Lambda^{-1} k) = lambda pi(k). Translations do not enter.
pub fn wigner_phase(elem: &PoincareElement, k: FourVector) -> Result<Complex64> {
    let back = elem.inverse().linear_vector(k);
    let pi_back = standard_spinor(back)?;
    let pi_here = standard_spinor(k)?;
    let moved = [
        elem.a[0][0] * pi_back[0] + elem.a[0][1] * pi_back[1],
        elem.a[1][0] * pi_back[0] + elem.a[1][1] * pi_back[1],
    ];
    // Project onto pi(k); both spinors square to X(k), so the ratio is a
    // phase up to rounding.
    let num = pi_here[0].conj() * moved[0] + pi_here[1].conj() * moved[1];
    let den = pi_here[0].norm_sqr() + pi_here[1].norm_sqr();
    let lambda = num / den;
    let drift = (lambda.norm() - 1.0).abs();
    if drift > 1e-8 {
        return Err(Error::IncompatibleElement(format!(
            "spinor transport lost unitarity by {drift:.3e}"
        )));
    }
    Ok(lambda / lambda.norm())
}

/// For each grid point i, the index of Lambda^{-1} k_i. The grid must be
/// closed under the transformation, with matching quadrature weights; the
/// result is a permutation.
pub fn momentum_permutation(grid: &GridHandle, elem: &PoincareElement) -> Result<Vec<usize>> {
    let inverse = elem.inverse();
    let mut perm = vec![usize::MAX; grid.len()];
    let mut hit = vec![false; grid.len()];
    for i in 0..grid.len() {
        let target = inverse.linear_vector(grid.point(i));
        let tol = 1e-9 * (1.0 + target[0].abs());
        let mut found = None;
        for j in 0..grid.len() {
            if (grid.point(j) - target).component_norm() <= tol {
                found = Some(j);
                break;
            }
        }
        let j = found.ok_or_else(|| {
            Error::IncompatibleElement(format!(
                "grid is not closed under the transformation at point {i}"
            ))
        })?;
        if hit[j] {
            return Err(Error::IncompatibleElement(format!(
                "two grid points map onto point {j}"
            )));
        }
        let wi = grid.weight(i);
        let wj = grid.weight(j);
        if (wi - wj).abs() > 1e-12 * wi.max(wj) {
            return Err(Error::IncompatibleElement(format!(
                "quadrature weights differ along the orbit of point {i}"
            )));
        }
        hit[j] = true;
        perm[i] = j;
    }
    Ok(perm)
}

/// One-oscillator unitary: grid points permute, each quantum of helicity s
/// picks up lambda^{2s}, and the translation contributes exp(i k.y) per
/// level counted by the picture.
pub fn transform_oscillator(
    elem: &PoincareElement,
    state: &OscillatorState,
    picture: Picture,
) -> Result<OscillatorState> {
    let grid = state.grid().clone();
    let perm = momentum_permutation(&grid, elem)?;
    let phases = point_phases(&grid, elem)?;
    let trunc = state.truncation();
    let y = elem.translation_part();
    let mut out = OscillatorState::zero(&grid, trunc);
    for i in 0..grid.len() {
        let ky = grid.point(i).dot(&y);
        let lambda2 = phases[i] * phases[i];
        for np in 0..trunc.levels() {
            for nm in 0..trunc.levels() {
                let translate = Complex64::from_polar(1.0, ky * picture.level_count(np, nm));
                let rotate = lambda2.powi(np as i32) * lambda2.conj().powi(nm as i32);
                out.set(i, np, nm, translate * rotate * state.get(perm[i], np, nm));
            }
        }
    }
    Ok(out)
}

fn point_phases(grid: &GridHandle, elem: &PoincareElement) -> Result<Vec<Complex64>> {
    (0..grid.len()).map(|i| wigner_phase(elem, grid.point(i))).collect()
}

/// Factor-wise transformation of a product state.
pub fn transform_product(
    elem: &PoincareElement,
    state: &ProductState,
    picture: Picture,
) -> Result<ProductState> {
    state.map_factors(|_, f| transform_oscillator(elem, f, picture))
}

/// Factor-wise transformation of a dense state.
pub fn transform_dense(
    elem: &PoincareElement,
    state: &DenseState,
    picture: Picture,
) -> Result<DenseState> {
    state.apply_slotwise_each(|f| transform_oscillator(elem, f, picture))
}

/// Covariance partner of a smearing function: the collective ladders obey
/// U^dag a(f) U = a(f~) with
/// f~(Lambda^{-1}k, s) = f(k, s) exp(-i k.y) lambda(k)^{-2s}.
pub fn transformed_smearing(
    elem: &PoincareElement,
    f: &PolarizedAmplitude,
) -> Result<PolarizedAmplitude> {
    let grid = f.grid().clone();
    let perm = momentum_permutation(&grid, elem)?;
    let phases = point_phases(&grid, elem)?;
    let y = elem.translation_part();
    let mut out = PolarizedAmplitude::zero(&grid);
    for i in 0..grid.len() {
        let ky = grid.point(i).dot(&y);
        let shift = Complex64::from_polar(1.0, -ky);
        let lambda2 = phases[i] * phases[i];
        for h in Helicity::ALL {
            let spin = match h {
                Helicity::Plus => lambda2.conj(),
                Helicity::Minus => lambda2,
            };
            out.set(perm[i], h, f.get(i, h) * shift * spin);
        }
    }
    Ok(out)
}

/// Central-multiplier transport under the same unitary:
/// U^dag I(g) U = I(g~) with g~(Lambda^{-1}k) = g(k).
pub fn transported_multiplier(
    elem: &PoincareElement,
    grid: &GridHandle,
    g: &[Complex64],
) -> Result<Vec<Complex64>> {
    if g.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), got: g.len() });
    }
    let perm = momentum_permutation(grid, elem)?;
    let mut out = vec![C_ZERO; g.len()];
    for i in 0..grid.len() {
        out[perm[i]] = g[i];
    }
    Ok(out)
}

/// Dimension guard shared by the dense covariance drivers in this crate.
pub fn dense_truncation_for(m: usize) -> Result<FockTruncation> {
    FockTruncation::new(m.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{
        collective_annihilation, collective_creation, collective_multiplier, ensemble_vacuum,
        DEFAULT_DENSE_CAP,
    };
    use crate::grid::{MomentumGrid, VacuumProfile};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_null(rng: &mut impl Rng) -> FourVector {
        loop {
            let v = [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
            let k = FourVector::null_from_spatial(v[0], v[1], v[2]);
            if k[0] > 0.1 && k[0] + k[3] > 0.05 {
                return k;
            }
        }
    }

    fn random_element(rng: &mut impl Rng) -> PoincareElement {
        let mut a = [[C_ZERO; 2]; 2];
        loop {
            for row in &mut a {
                for v in row.iter_mut() {
                    *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                }
            }
            if mat_det(&a).norm() > 0.05 {
                break;
            }
        }
        PoincareElement::from_matrix(a).unwrap()
    }

    /// Two shells of three points each, closed under rotation by 2 pi / 3.
    fn rotation_closed_grid() -> GridHandle {
        let mut pts = Vec::new();
        let mut w = Vec::new();
        for (radius, weight) in [(0.7, 0.2), (1.3, 0.35)] {
            for step in 0..3 {
                let phi = 2.0 * std::f64::consts::PI * step as f64 / 3.0;
                let theta: f64 = 0.9;
                pts.push([
                    radius * theta.sin() * phi.cos(),
                    radius * theta.sin() * phi.sin(),
                    radius * theta.cos(),
                ]);
                w.push(weight);
            }
        }
        MomentumGrid::from_points(&pts, &w).unwrap()
    }

    #[test]
    fn spinor_matrix_det_is_half_minkowski_norm() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..10 {
            let v = FourVector::new(
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            );
            let det = mat_det(&spinor_matrix(&v.to_complex()));
            assert!((2.0 * det.re - v.dot(&v)).abs() < 1e-12);
            assert!(det.im.abs() < 1e-14);
            let back = matrix_vector(&spinor_matrix(&v.to_complex()));
            for a in 0..4 {
                assert!((back[a] - Complex64::new(v[a], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn standard_spinor_factorizes_null_momentum() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let k = random_null(&mut rng);
            let pi = standard_spinor(k).unwrap();
            let x = spinor_matrix(&k.to_complex());
            for r in 0..2 {
                for c in 0..2 {
                    let outer = pi[r] * pi[c].conj();
                    assert!((outer - x[r][c]).norm() < 1e-12 * k[0]);
                }
            }
        }
    }

    #[test]
    fn negative_axis_has_no_spinor() {
        let k = FourVector::new(1.0, 0.0, 0.0, -1.0);
        assert!(matches!(standard_spinor(k), Err(Error::SingularRay)));
    }

    #[test]
    fn companion_pairing_is_one() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10 {
            let pi = standard_spinor(random_null(&mut rng)).unwrap();
            let omega = companion_spinor(&pi);
            let pairing = omega[0] * pi[1] - omega[1] * pi[0];
            assert!((pairing - C_ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn polarization_vector_invariants() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..10 {
            let k = random_null(&mut rng);
            let frame = polarization_frame(k).unwrap();
            let kc = k.to_complex();
            assert!(frame.m.dot(&frame.m).norm() < 1e-12);
            assert!((frame.m.dot(&frame.m_bar) + C_ONE).norm() < 1e-12);
            assert!(kc.dot(&frame.m).norm() < 1e-12 * k[0]);
            assert!(kc.dot(&frame.m_bar).norm() < 1e-12 * k[0]);
        }
    }

    #[test]
    fn third_axis_frame_matches_closed_form() {
        let k = FourVector::new(1.0, 0.0, 0.0, 1.0);
        let frame = polarization_frame(k).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [
            Complex64::new(0.0, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, 0.0),
        ];
        for a in 0..4 {
            assert!((frame.m[a] - expect[a]).norm() < 1e-14);
        }
    }

    #[test]
    fn field_tensor_is_antisymmetric_and_transverse() {
        let mut rng = StdRng::seed_from_u64(11);
        let k = random_null(&mut rng);
        let frame = polarization_frame(k).unwrap();
        let e = frame.field_tensor();
        for a in 0..4 {
            for b in 0..4 {
                assert!((e[a][b] + e[b][a]).norm() < 1e-12);
            }
            // Both tensor indices are already lowered, so contracting with
            // the contravariant momentum needs no metric: e_ab k^b = 0.
            let mut contraction = C_ZERO;
            for b in 0..4 {
                contraction += e[a][b] * k[b];
            }
            assert!(contraction.norm() < 1e-12 * k[0] * k[0]);
        }
    }

    #[test]
    fn rotation_and_boost_act_classically() {
        let v = FourVector::new(0.9, 0.4, -0.3, 0.7);
        let phi = 0.83;
        let rotated = PoincareElement::rotation_z(phi).linear_vector(v);
        assert!((rotated[0] - v[0]).abs() < 1e-12);
        assert!((rotated[1] - (phi.cos() * v[1] - phi.sin() * v[2])).abs() < 1e-12);
        assert!((rotated[2] - (phi.sin() * v[1] + phi.cos() * v[2])).abs() < 1e-12);
        assert!((rotated[3] - v[3]).abs() < 1e-12);

        let chi = 0.6;
        let boosted = PoincareElement::boost_z(chi).linear_vector(v);
        assert!((boosted[0] - (chi.cosh() * v[0] + chi.sinh() * v[3])).abs() < 1e-12);
        assert!((boosted[3] - (chi.sinh() * v[0] + chi.cosh() * v[3])).abs() < 1e-12);
        assert!((boosted[1] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn composition_and_inverse_close_the_group() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..10 {
            let g1 = random_element(&mut rng).with_translation(FourVector::new(
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            ));
            let g2 = random_element(&mut rng);
            let x = FourVector::new(0.2, -0.7, 0.4, 1.1);
            let sequential = g1.apply_point(g2.apply_point(x));
            let composed = g1.compose(&g2).apply_point(x);
            assert!((sequential - composed).component_norm() < 1e-10);
            let round_trip = g1.inverse().apply_point(g1.apply_point(x));
            assert!((round_trip - x).component_norm() < 1e-10);
        }
    }

    #[test]
    fn wigner_phase_of_z_rotation_on_axis() {
        let k = FourVector::new(2.0, 0.0, 0.0, 2.0);
        let phi = 0.77;
        let lambda = wigner_phase(&PoincareElement::rotation_z(phi), k).unwrap();
        let expect = Complex64::from_polar(1.0, -0.5 * phi);
        assert!((lambda - expect).norm() < 1e-12);
    }

    #[test]
    fn wigner_phase_is_unimodular() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..20 {
            let elem = random_element(&mut rng);
            let k = random_null(&mut rng);
            let lambda = wigner_phase(&elem, k).unwrap();
            assert!((lambda.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_phase_obeys_the_cocycle_rule() {
        let mut rng = StdRng::seed_from_u64(19);
        let mut checked = 0;
        while checked < 50 {
            let g1 = random_element(&mut rng);
            let g2 = random_element(&mut rng);
            let k = random_null(&mut rng);
            let back = g1.inverse().linear_vector(k);
            // Keep clear of the singular ray along the chain.
            if back[0] + back[3] < 0.05 {
                continue;
            }
            let lhs = wigner_phase(&g1.compose(&g2), k).unwrap();
            let rhs = wigner_phase(&g1, k).unwrap() * wigner_phase(&g2, back).unwrap();
            assert!((lhs - rhs).norm() < 1e-9, "cocycle defect {:.3e}", (lhs - rhs).norm());
            checked += 1;
        }
    }

    #[test]
    fn double_cover_acts_trivially_on_states() {
        let grid = rotation_closed_grid();
        let trunc = FockTruncation::new(2).unwrap();
        let mut rng = StdRng::seed_from_u64(23);
        let psi = OscillatorState::from_fn(&grid, trunc, |_, _, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let full_turn = PoincareElement::rotation_z(2.0 * std::f64::consts::PI);
        let moved = transform_oscillator(&full_turn, &psi, Picture::Vacuum).unwrap();
        assert!(moved.max_abs_diff(&psi).unwrap() < 1e-12);
    }

    #[test]
    fn transformation_is_unitary_and_a_true_representation() {
        let grid = rotation_closed_grid();
        let trunc = FockTruncation::new(2).unwrap();
        let mut rng = StdRng::seed_from_u64(29);
        let random_state = |rng: &mut StdRng| {
            OscillatorState::from_fn(&grid, trunc, |_, _, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            })
        };
        let third = 2.0 * std::f64::consts::PI / 3.0;
        let g1 = PoincareElement::rotation_z(third).with_translation(FourVector::new(0.4, -0.2, 0.8, 0.3));
        let g2 = PoincareElement::rotation_z(2.0 * third).with_translation(FourVector::new(-0.6, 1.0, 0.1, -0.5));
        for picture in [Picture::Vacuum, Picture::Physical] {
            let phi = random_state(&mut rng);
            let psi = random_state(&mut rng);
            let u_phi = transform_oscillator(&g1, &phi, picture).unwrap();
            let u_psi = transform_oscillator(&g1, &psi, picture).unwrap();
            let before = phi.inner(&psi).unwrap();
            let after = u_phi.inner(&u_psi).unwrap();
            assert!((before - after).norm() < 1e-12, "inner product drift");

            let sequential =
                transform_oscillator(&g1, &transform_oscillator(&g2, &psi, picture).unwrap(), picture)
                    .unwrap();
            let composed = transform_oscillator(&g1.compose(&g2), &psi, picture).unwrap();
            assert!(
                sequential.max_abs_diff(&composed).unwrap() < 1e-12,
                "composition defect in {picture:?}"
            );
        }
    }

    #[test]
    fn vacuum_is_invariant_in_the_vacuum_picture() {
        let grid = rotation_closed_grid();
        // Shell-constant profile: rotation orbits carry equal Z.
        let z: Vec<f64> = (0..grid.len()).map(|i| if i < 3 { 2.0 } else { 0.5 }).collect();
        let profile = VacuumProfile::from_z(&grid, &z).unwrap();
        let trunc = FockTruncation::new(2).unwrap();
        let vac = crate::oscillator::vacuum_state(&profile, trunc);
        let g = PoincareElement::rotation_z(2.0 * std::f64::consts::PI / 3.0)
            .with_translation(FourVector::new(0.7, 0.1, -0.4, 0.9));
        let moved = transform_oscillator(&g, &vac, Picture::Vacuum).unwrap();
        assert!(moved.max_abs_diff(&vac).unwrap() < 1e-14);
        // The physical picture shakes the vacuum by zero-point phases.
        let stirred = transform_oscillator(&g, &vac, Picture::Physical).unwrap();
        assert!(stirred.max_abs_diff(&vac).unwrap() > 1e-3);
    }

    #[test]
    fn collective_ladders_transform_covariantly_on_dense_states() {
        let grid = rotation_closed_grid();
        let z: Vec<f64> = (0..grid.len()).map(|i| if i < 3 { 1.4 } else { 0.7 }).collect();
        let profile = VacuumProfile::from_z(&grid, &z).unwrap();
        let trunc = FockTruncation::new(2).unwrap();
        let n_osc = 2;
        let mut rng = StdRng::seed_from_u64(31);
        let g = PoincareElement::rotation_z(2.0 * std::f64::consts::PI / 3.0)
            .with_translation(FourVector::new(0.5, -0.3, 0.2, 1.2));
        let f = PolarizedAmplitude::from_fn(&grid, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });

        let mut psi = ensemble_vacuum(&profile, trunc, n_osc)
            .unwrap()
            .densify(DEFAULT_DENSE_CAP)
            .unwrap();
        for a in psi.amplitudes_mut() {
            *a += Complex64::new(0.3 * (rng.gen::<f64>() - 0.5), 0.3 * (rng.gen::<f64>() - 0.5));
        }
        let psi = psi.zero_above_occupation(trunc.n_max() - 1);

        for picture in [Picture::Vacuum, Picture::Physical] {
            let moved = transform_dense(&g, &psi, picture).unwrap();
            let acted = collective_annihilation(&moved, &f).unwrap();
            let lhs = transform_dense(&g.inverse(), &acted, picture).unwrap();
            let partner = transformed_smearing(&g, &f).unwrap();
            let rhs = collective_annihilation(&psi, &partner).unwrap();
            let resid = lhs.sub(&rhs).unwrap().norm_sq().sqrt() / psi.norm_sq().sqrt();
            assert!(resid < 1e-10, "annihilation covariance {resid:.3e} in {picture:?}");

            let acted_up = collective_creation(&moved, &f).unwrap();
            let lhs_up = transform_dense(&g.inverse(), &acted_up, picture).unwrap();
            let rhs_up = collective_creation(&psi, &partner).unwrap();
            let resid_up = lhs_up.sub(&rhs_up).unwrap().norm_sq().sqrt() / psi.norm_sq().sqrt();
            assert!(resid_up < 1e-10, "creation covariance {resid_up:.3e} in {picture:?}");
        }
    }

    #[test]
    fn central_multiplier_transports_along_the_orbit() {
        let grid = rotation_closed_grid();
        let trunc = FockTruncation::new(2).unwrap();
        let mut rng = StdRng::seed_from_u64(37);
        let g_vals: Vec<Complex64> = (0..grid.len())
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let elem = PoincareElement::rotation_z(2.0 * std::f64::consts::PI / 3.0)
            .with_translation(FourVector::new(0.2, 0.4, -0.1, 0.6));

        let mut psi = DenseState::zero(&grid, trunc, 2, DEFAULT_DENSE_CAP).unwrap();
        for a in psi.amplitudes_mut() {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }

        let moved = transform_dense(&elem, &psi, Picture::Vacuum).unwrap();
        let acted = collective_multiplier(&moved, &g_vals).unwrap();
        let lhs = transform_dense(&elem.inverse(), &acted, Picture::Vacuum).unwrap();
        let transported = transported_multiplier(&elem, &grid, &g_vals).unwrap();
        let rhs = collective_multiplier(&psi, &transported).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }
}
