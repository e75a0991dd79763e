//! Third-order univariate derivative arithmetic.
//!
//! A [`Series`] carries `[f, f', f'', f''']` of a function of one variable at
//! a fixed point. Composition follows Faà di Bruno up to third order.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Series(pub [f64; 4]);

/// A vanishing base of `|y|^n` where the requested derivative does not exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kink {
    pub exponent: f64,
    pub order: usize,
}

impl Series {
    /// The identity map scaled and shifted: `y = c0 + slope * (s - s0)`.
    pub const fn linear(c0: f64, slope: f64) -> Self {
        Series([c0, slope, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn scale(self, k: f64) -> Self {
        let d = self.0;
        Series([k * d[0], k * d[1], k * d[2], k * d[3]])
    }

    /// `f(self)` given `[f(y0), f'(y0), f''(y0), f'''(y0)]`.
    pub fn compose(self, f: [f64; 4]) -> Self {
        let [_, y1, y2, y3] = self.0;
        Series([
            f[0],
            f[1] * y1,
            f[2] * y1 * y1 + f[1] * y2,
            f[3] * y1 * y1 * y1 + 3.0 * f[2] * y1 * y2 + f[1] * y3,
        ])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.0[0].sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.0[0].sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn recip(self) -> Self {
        let y = self.0[0];
        let r = 1.0 / y;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    /// `y^p` for a positive base.
    pub fn powf(self, p: f64) -> Self {
        let y = self.0[0];
        let f0 = y.powf(p);
        self.compose([
            f0,
            p * f0 / y,
            p * (p - 1.0) * f0 / (y * y),
            p * (p - 1.0) * (p - 2.0) * f0 / (y * y * y),
        ])
    }

    /// `|y|^n`, differentiated as `n (n-1) ... |y|^(n-k) sign(y)^k`.
    ///
    /// Only derivatives up to `order` are required to exist; higher ones
    /// are zero-filled. At `y = 0` a derivative whose one-sided limits
    /// agree is assigned by continuity. For odd `k == n >= 3` the two
    /// limits are `±n!` and the midpoint 0 is used. Anything else at zero
    /// is a [`Kink`].
    pub fn abs_pow(self, n: f64, order: usize) -> Result<Self, Kink> {
        let y = self.0[0];
        let mut f = [0.0; 4];
        if y != 0.0 {
            let a = y.abs();
            let sg = y.signum();
            let mut falling = 1.0;
            let mut sign = 1.0;
            for (k, fk) in f.iter_mut().enumerate() {
                *fk = falling * a.powf(n - k as f64) * sign;
                falling *= n - k as f64;
                sign *= sg;
            }
        } else {
            let mut falling = 1.0;
            for (k, fk) in f.iter_mut().enumerate() {
                let kf = k as f64;
                *fk = if k == 0 {
                    if n > 0.0 {
                        0.0
                    } else {
                        return Err(Kink {
                            exponent: n,
                            order: 0,
                        });
                    }
                } else if falling == 0.0 || n > kf {
                    0.0
                } else if n == kf && k % 2 == 0 {
                    falling
                } else if (n == kf && k >= 3) || k > order {
                    // odd k == n: the one-sided values ±n! average to 0.
                    // Past `order` the coefficient is never read.
                    0.0
                } else {
                    return Err(Kink {
                        exponent: n,
                        order: k,
                    });
                };
                falling *= n - kf;
            }
        }
        Ok(self.compose(f))
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, o: Series) -> Series {
        let (a, b) = (self.0, o.0);
        Series([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, o: Series) -> Series {
        self + o.scale(-1.0)
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, o: Series) -> Series {
        let (a, b) = (self.0, o.0);
        Series([
            a[0] * b[0],
            a[1] * b[0] + a[0] * b[1],
            a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
            a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3],
        ])
    }
}
