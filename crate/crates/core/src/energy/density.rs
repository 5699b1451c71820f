//! Pointwise Oseen-Frank densities, generic over [`Real`] so the same code
//! yields values (f64) and exact partial derivatives (dual numbers).

use super::FrankConstants;
use crate::dual::Real;
use crate::error::{Error, Result};
use crate::manifold::{off_manifold, ON_MANIFOLD_TOL};
use crate::vec3::{column, cross, dot, norm2, Mat3, Vec3};

/// The twelve weighted terms `k_i/2 * s_i^2` of the biaxial density and the
/// two raw null-Lagrangian integrands `tr((grad n)^2) - (div n)^2`.
#[derive(Clone, Copy, Debug)]
pub struct DensityTerms<T> {
    pub terms: [T; 12],
    pub null_n: T,
    pub null_m: T,
}

impl<T: Real> DensityTerms<T> {
    /// Unmodified density.
    pub fn frank(&self) -> T {
        let mut s = self.terms[0];
        for t in &self.terms[1..] {
            s += *t;
        }
        s
    }

    /// Density with the null-Lagrangian terms `alpha/2 * (tr(A^2) - tr(A)^2)` added.
    pub fn modified(&self, k: &FrankConstants) -> T {
        self.frank() + self.null_n.scale(0.5 * k.alpha1()) + self.null_m.scale(0.5 * k.alpha2())
    }
}

#[inline]
fn div<T: Real>(d: &[[T; 3]; 3]) -> T {
    d[0][0] + d[1][1] + d[2][2]
}

#[inline]
fn curl<T: Real>(d: &[[T; 3]; 3]) -> [T; 3] {
    [d[2][1] - d[1][2], d[0][2] - d[2][0], d[1][0] - d[0][1]]
}

#[inline]
fn trace_sq<T: Real>(d: &[[T; 3]; 3]) -> T {
    let mut s = T::cst(0.0);
    for i in 0..3 {
        for a in 0..3 {
            s += d[i][a] * d[a][i];
        }
    }
    s
}

/// Evaluate all density terms. No constraint check; callers decide.
pub fn density_terms<T: Real>(
    n: &[T; 3],
    m: &[T; 3],
    dn: &[[T; 3]; 3],
    dm: &[[T; 3]; 3],
    k: &FrankConstants,
) -> DensityTerms<T> {
    let half = |i: usize, s: T| (s * s).scale(0.5 * k.k(i));
    let half_v = |i: usize, v: [T; 3]| norm2(&v).scale(0.5 * k.k(i));

    let div_n = div(dn);
    let div_m = div(dm);
    let curl_n = curl(dn);
    let curl_m = curl(dm);
    let n_x_curl_n = cross(n, &curl_n);
    let m_x_curl_m = cross(m, &curl_m);

    // w = n x m and its Jacobian, column by column
    let mut dw = [[T::cst(0.0); 3]; 3];
    for a in 0..3 {
        let c = cross(&column(dn, a), m);
        let d = cross(n, &column(dm, a));
        for i in 0..3 {
            dw[i][a] = c[i] + d[i];
        }
    }
    let div_w = div(&dw);
    let curl_w = curl(&dw);

    let terms = [
        half(1, div_n),
        half(2, dot(n, &curl_n)),
        half_v(3, n_x_curl_n),
        half(4, div_m),
        half(5, dot(m, &curl_m)),
        half_v(6, m_x_curl_m),
        half(7, dot(n, &m_x_curl_m)),
        half(8, dot(m, &n_x_curl_n)),
        half(9, dot(m, &curl_w)),
        // curl(m x n) = -curl(n x m); the sign squares away
        half(10, dot(n, &curl_w)),
        half_v(11, curl_w),
        half(12, div_w),
    ];
    DensityTerms {
        terms,
        null_n: trace_sq(dn) - div_n * div_n,
        null_m: trace_sq(dm) - div_m * div_m,
    }
}

fn check(n: &Vec3, m: &Vec3) -> Result<()> {
    let off = off_manifold(n, m);
    if off <= ON_MANIFOLD_TOL {
        Ok(())
    } else {
        Err(Error::ConstraintViolated(off))
    }
}

/// Biaxial Oseen-Frank density at one point.
pub fn frank_density(n: &Vec3, m: &Vec3, dn: &Mat3, dm: &Mat3, k: &FrankConstants) -> Result<f64> {
    check(n, m)?;
    Ok(density_terms(n, m, dn, dm, k).frank())
}

/// Modified density (null-Lagrangian terms added) at one point.
pub fn modified_density(n: &Vec3, m: &Vec3, dn: &Mat3, dm: &Mat3, k: &FrankConstants) -> Result<f64> {
    check(n, m)?;
    Ok(density_terms(n, m, dn, dm, k).modified(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::rng::SplitMix64;
    use crate::manifold::random_tangent_sample;
    use crate::vec3::mat_norm2;
    use std::f64::consts::FRAC_PI_2;

    fn random_k(rng: &mut SplitMix64) -> FrankConstants {
        let mut k = [0.0; 12];
        for (i, v) in k.iter_mut().enumerate() {
            *v = if i < 6 {
                0.05 + 3.0 * rng.next_f64()
            } else {
                3.0 * rng.next_f64()
            };
        }
        FrankConstants::new(k).unwrap()
    }

    /// Jacobian of (cos x, sin x, 0) and of m = e3 at x.
    fn circle_point(x: f64) -> (Vec3, Vec3, Mat3, Mat3) {
        let n = [x.cos(), x.sin(), 0.0];
        let mut dn = [[0.0; 3]; 3];
        dn[0][0] = -x.sin();
        dn[1][0] = x.cos();
        (n, [0.0, 0.0, 1.0], dn, [[0.0; 3]; 3])
    }

    fn distinct_k() -> FrankConstants {
        let mut k = [0.0; 12];
        for (i, v) in k.iter_mut().enumerate() {
            *v = 1.0 + i as f64 * 0.37 + (i * i) as f64 * 0.01;
        }
        FrankConstants::new(k).unwrap()
    }

    #[test]
    fn zero_gradient_zero_density() {
        let k = distinct_k();
        let z = [[0.0; 3]; 3];
        let n = [0.0, 0.0, 1.0];
        let m = [1.0, 0.0, 0.0];
        assert_eq!(frank_density(&n, &m, &z, &z, &k).unwrap(), 0.0);
        assert_eq!(modified_density(&n, &m, &z, &z, &k).unwrap(), 0.0);
    }

    #[test]
    fn planar_twist_symbolic_values() {
        let k = distinct_k();
        let (n, m, dn, dm) = circle_point(FRAC_PI_2);
        let w = frank_density(&n, &m, &dn, &dm, &k).unwrap();
        let expect = 0.5 * (k.k(1) + k.k(9) + k.k(11));
        assert!((w - expect).abs() < 1e-13, "{w} vs {expect}");
        let (n, m, dn, dm) = circle_point(0.0);
        let w = frank_density(&n, &m, &dn, &dm, &k).unwrap();
        let expect = 0.5 * (k.k(3) + k.k(12));
        assert!((w - expect).abs() < 1e-13, "{w} vs {expect}");
    }

    #[test]
    fn off_manifold_is_rejected() {
        let z = [[0.0; 3]; 3];
        let r = frank_density(
            &[0.0, 0.0, 1.01],
            &[1.0, 0.0, 0.0],
            &z,
            &z,
            &FrankConstants::one_constant(),
        );
        assert!(matches!(r, Err(Error::ConstraintViolated(_))));
    }

    #[test]
    fn one_constant_reduces_to_dirichlet() {
        let k = FrankConstants::one_constant();
        let mut rng = SplitMix64::new(7);
        for _ in 0..2000 {
            let (n, m, dn, dm) = random_tangent_sample(&mut rng);
            let w = modified_density(&n, &m, &dn, &dm, &k).unwrap();
            let d = 0.5 * (mat_norm2(&dn) + mat_norm2(&dm));
            assert!((w - d).abs() <= 1e-12 * (1.0 + d), "{w} vs {d}");
        }
    }

    #[test]
    fn coercivity_on_random_samples() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..200 {
            let k = random_k(&mut rng);
            for _ in 0..50 {
                let (n, m, dn, dm) = random_tangent_sample(&mut rng);
                let w = modified_density(&n, &m, &dn, &dm, &k).unwrap();
                let lower = 0.5 * (k.alpha1() * mat_norm2(&dn) + k.alpha2() * mat_norm2(&dm));
                assert!(w - lower >= -1e-12 * (1.0 + w.abs()), "slack {}", w - lower);
            }
        }
    }

    #[test]
    fn breakdown_terms_sum_to_density() {
        let mut rng = SplitMix64::new(3);
        let k = random_k(&mut rng);
        let (n, m, dn, dm) = random_tangent_sample(&mut rng);
        let t = density_terms(&n, &m, &dn, &dm, &k);
        let sum: f64 = t.terms.iter().sum();
        assert_eq!(sum, t.frank());
        assert!(t.terms.iter().all(|&v| v >= 0.0));
    }
}
