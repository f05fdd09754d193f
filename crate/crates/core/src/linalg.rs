//! Fixed-size complex 2-vectors and 2×2 matrices.

pub use num_complex::Complex64 as C64;

pub type Vec2 = [C64; 2];
pub type Mat2 = [[C64; 2]; 2];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

/// Standard scalar product, conjugate-linear in the left argument.
#[inline]
pub fn inner(a: &Vec2, b: &Vec2) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Bilinear (c-product) pairing, no conjugation.
#[inline]
pub fn bilinear(a: &Vec2, b: &Vec2) -> C64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm_sq(a: &Vec2) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr()
}

#[inline]
pub fn norm(a: &Vec2) -> f64 {
    norm_sq(a).sqrt()
}

#[inline]
pub fn scale(k: C64, a: &Vec2) -> Vec2 {
    [k * a[0], k * a[1]]
}

#[inline]
pub fn add(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn axpy(k: C64, x: &Vec2, y: &Vec2) -> Vec2 {
    [k * x[0] + y[0], k * x[1] + y[1]]
}

pub fn is_finite(a: &Vec2) -> bool {
    a.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Normalized overlap `|⟨a, b⟩| / (‖a‖‖b‖)`.
pub fn overlap(a: &Vec2, b: &Vec2) -> f64 {
    inner(a, b).norm() / (norm(a) * norm(b))
}

#[inline]
pub fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn adjoint(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn mat_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

pub fn mat_scale(k: C64, m: &Mat2) -> Mat2 {
    [[k * m[0][0], k * m[0][1]], [k * m[1][0], k * m[1][1]]]
}

/// Frobenius norm.
pub fn frobenius(m: &Mat2) -> f64 {
    m.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &Mat2) -> C64 {
    m[0][0] + m[1][1]
}

pub fn det(m: &Mat2) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Matrix exponential of a 2×2 complex matrix.
///
/// With `μ = tr(M)/2`, `N = M − μ I` and `δ² = −det N`,
/// `exp(M) = e^μ (cosh δ · I + sinh δ / δ · N)`; both functions of δ are
/// even, so the root of δ² does not matter.
pub fn expm2(m: &Mat2) -> Mat2 {
    let mu = trace(m) * 0.5;
    let n = [[m[0][0] - mu, m[0][1]], [m[1][0], m[1][1] - mu]];
    let delta_sq = -det(&n);
    let (cosh, sinhc) = if delta_sq.norm() < 1e-6 {
        // Taylor series, accurate to O(δ^8) for |δ²| < 1e-6
        let d2 = delta_sq;
        (
            ONE + d2 * 0.5 + d2 * d2 / 24.0 + d2 * d2 * d2 / 720.0,
            ONE + d2 / 6.0 + d2 * d2 / 120.0 + d2 * d2 * d2 / 5040.0,
        )
    } else {
        let delta = delta_sq.sqrt();
        (delta.cosh(), delta.sinh() / delta)
    };
    let em = mu.exp();
    [
        [em * (cosh + sinhc * n[0][0]), em * sinhc * n[0][1]],
        [em * sinhc * n[1][0], em * (cosh + sinhc * n[1][1])],
    ]
}
