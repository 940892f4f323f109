//! Minimal 2x2 real matrix helpers: everything the linearized fluctuation
//! analysis needs (Lyapunov solve, exponential, resolvent) in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major 2x2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

pub type Vec2 = [f64; 2];

impl Mat2 {
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 {
            m: [[a11, a12], [a21, a22]],
        }
    }

    pub fn zero() -> Self {
        Mat2::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + other.m[0][0],
            self.m[0][1] + other.m[0][1],
            self.m[1][0] + other.m[1][0],
            self.m[1][1] + other.m[1][1],
        )
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &other.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::numerical(
                "mat2 inverse",
                format!("singular matrix, det = {d:e}"),
            ));
        }
        Ok(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    /// Eigenvalues as (re, im) pairs; complex pairs share re and carry +/- im.
    pub fn eigenvalues(&self) -> [(f64, f64); 2] {
        let mu = 0.5 * self.trace();
        let disc = mu * mu - self.det();
        if disc >= 0.0 {
            let s = disc.sqrt();
            [(mu - s, 0.0), (mu + s, 0.0)]
        } else {
            let s = (-disc).sqrt();
            [(mu, -s), (mu, s)]
        }
    }

    pub fn max_eigenvalue_real_part(&self) -> f64 {
        let [(r1, _), (r2, _)] = self.eigenvalues();
        r1.max(r2)
    }

    /// exp(self * t) via Cayley-Hamilton: with mu = tr/2 and d^2 = mu^2 - det,
    /// exp(At) = e^{mu t} [cosh(dt) I + sinh(dt)/d (A - mu I)]
    /// (cos/sinc when the discriminant is negative).
    pub fn expm(&self, t: f64) -> Mat2 {
        let mu = 0.5 * self.trace();
        let disc = mu * mu - self.det();
        let b = self.add(&Mat2::identity().scale(-mu)); // A - mu I
        let (c, s_over_d) = if disc > 0.0 {
            let d = disc.sqrt();
            let x = d * t;
            (x.cosh(), if x == 0.0 { t } else { x.sinh() / d })
        } else if disc < 0.0 {
            let d = (-disc).sqrt();
            let x = d * t;
            (x.cos(), if x == 0.0 { t } else { x.sin() / d })
        } else {
            (1.0, t)
        };
        Mat2::identity()
            .scale(c)
            .add(&b.scale(s_over_d))
            .scale((mu * t).exp())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Lower-triangular Cholesky factor of a symmetric PSD matrix, tolerant of
    /// zero/rank-1 cases. `tol` is an absolute slack on negative pivots.
    pub fn cholesky_psd(&self, tol: f64) -> Result<Mat2> {
        let a = self.m[0][0];
        let b = self.m[0][1];
        let c = self.m[1][1];
        if a < -tol || c < -tol {
            return Err(Error::numerical(
                "cholesky",
                format!("negative diagonal in covariance: [[{a:e},{b:e}],[.,{c:e}]]"),
            ));
        }
        let a = a.max(0.0);
        let l11 = a.sqrt();
        let l21 = if l11 > 0.0 { b / l11 } else { 0.0 };
        let rem = c - l21 * l21;
        if rem < -tol.max(1e-12 * c.abs()) {
            return Err(Error::numerical(
                "cholesky",
                format!("covariance not positive semidefinite, Schur complement {rem:e}"),
            ));
        }
        let l22 = rem.max(0.0).sqrt();
        Ok(Mat2::new(l11, 0.0, l21, l22))
    }
}

/// Stationary covariance of dx = A x dt + noise with diffusion D:
/// solves A S + S A^T + D = 0 in closed form,
/// S = -[det(A) D + B D B^T] / (2 tr(A) det(A)),   B = A - tr(A) I.
/// Requires a stable A (tr < 0, det > 0).
pub fn lyapunov_2x2(a: &Mat2, d: &Mat2) -> Result<Mat2> {
    let tr = a.trace();
    let det = a.det();
    if !(tr < 0.0 && det > 0.0) {
        return Err(Error::UnstableDrift {
            max_re: a.max_eigenvalue_real_part(),
        });
    }
    let b = a.add(&Mat2::identity().scale(-tr));
    let bdbt = b.mul(d).mul(&b.transpose());
    let num = d.scale(det).add(&bdbt);
    Ok(num.scale(-1.0 / (2.0 * tr * det)))
}

/// Residual ||A S + S A^T + D|| / max(||D||, eps) of a Lyapunov solution.
pub fn lyapunov_residual(a: &Mat2, s: &Mat2, d: &Mat2) -> f64 {
    let r = a.mul(s).add(&s.mul(&a.transpose())).add(d);
    r.norm() / d.norm().max(f64::MIN_POSITIVE)
}

/// (G D G^dagger)_22 and Re(G_22) for G = (i w I - A)^(-1), needed for the
/// intensity spectrum. Returns (quad_nn, re_g_nn).
pub fn resolvent_nn(a: &Mat2, d: &Mat2, w: f64) -> Result<(f64, f64)> {
    // M = iwI - A; invert the complex 2x2 explicitly using real/imag parts.
    // det(M) = (iw - a11)(iw - a22) - a12 a21
    let [[a11, a12], [a21, a22]] = a.m;
    let det_re = a11 * a22 - a12 * a21 - w * w;
    let det_im = -w * (a11 + a22);
    let den = det_re * det_re + det_im * det_im;
    if den == 0.0 {
        return Err(Error::numerical("resolvent", "singular at this frequency"));
    }
    // G = adj(M)/det(M); row 2 of G: [g21, g22]
    // adj(M) = [[iw - a22, a12], [a21, iw - a11]]
    let inv_den = 1.0 / den;
    // complex multiply helper: (re,im) * conj(det)/den
    let cdiv = |re: f64, im: f64| -> (f64, f64) {
        (
            (re * det_re + im * det_im) * inv_den,
            (im * det_re - re * det_im) * inv_den,
        )
    };
    let (g21_re, g21_im) = cdiv(a21, 0.0);
    let (g22_re, g22_im) = cdiv(-a11, w);
    // (G D G^dagger)_22 = sum_{jk} G_{2j} D_{jk} conj(G_{2k})  (real by symmetry)
    let [[d11, d12], [_, d22]] = d.m;
    let quad = d11 * (g21_re * g21_re + g21_im * g21_im)
        + d22 * (g22_re * g22_re + g22_im * g22_im)
        + 2.0 * d12 * (g21_re * g22_re + g21_im * g22_im);
    Ok((quad, g22_re))
}
