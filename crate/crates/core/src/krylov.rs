//! Conjugate gradients for symmetric positive (semi-)definite operators.

/// Outcome of [`conjugate_gradient`].
#[derive(Clone, Copy, Debug)]
pub struct CgReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `A x = b` starting from `x`. Stops when `|r| <= tol * max(|b|, 1e-300)`.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> CgReport {
    let target = tol * dot(b, b).sqrt().max(1e-300);
    conjugate_gradient_to(apply, b, x, target, max_iter)
}

/// As [`conjugate_gradient`] with an absolute residual target, for
/// right-hand sides that may be (near) zero relative to the problem scale.
pub fn conjugate_gradient_to(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    target: f64,
    max_iter: usize,
) -> CgReport {
    let n = b.len();
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut it = 0;
    while rr.sqrt() > target && it < max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
        it += 1;
    }
    CgReport {
        iterations: it,
        residual: rr.sqrt(),
        converged: rr.sqrt() <= target,
    }
}
