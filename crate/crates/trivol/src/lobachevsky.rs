//! The Lobachevsky function Lambda(x) = -integral_0^x ln|2 sin u| du.
//!
//! Lambda is odd, pi-periodic, real analytic off pi Z, and attains its
//! maximum at pi/6. It equals half the Clausen function, Lambda(x) =
//! Cl2(2x) / 2, and Cl2 is evaluated from its Fourier series
//! sum sin(n x)/n^2 with the logarithmic singularity split off (Kummer
//! acceleration), which turns the tail into a geometrically convergent
//! power series:
//!
//!   Cl2(x) = x - x ln|x| + x * sum_{n>=1} zeta(2n) / (n (2n+1)) (x/2pi)^{2n}
//!
//! for |x| <= pi. The truncation error is driven below 1e-15, well inside
//! the 1e-13 budget.

use std::f64::consts::PI;
use std::sync::OnceLock;

const ZETA_TERMS: usize = 40;

/// zeta(2n) for n = 1..=ZETA_TERMS.
fn zeta_even() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; ZETA_TERMS];
        t[0] = PI * PI / 6.0;
        t[1] = PI.powi(4) / 90.0;
        t[2] = PI.powi(6) / 945.0;
        t[3] = PI.powi(8) / 9450.0;
        for (n, slot) in t.iter_mut().enumerate().skip(4) {
            let s = 2 * (n + 1) as i32;
            let mut acc = 0.0;
            for k in 1..=64u32 {
                let term = (k as f64).powi(-s);
                acc += term;
                if term < 1e-19 {
                    break;
                }
            }
            *slot = acc;
        }
        t
    })
}

/// Clausen function Cl2 on [0, pi].
fn clausen_principal(x: f64) -> f64 {
    debug_assert!((0.0..=PI + 1e-9).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    let z = x / (2.0 * PI);
    let z2 = z * z;
    let zt = zeta_even();
    let mut sum = 0.0;
    let mut pow = z2;
    for (n, &zeta) in zt.iter().enumerate() {
        let nn = (n + 1) as f64;
        let term = zeta / (nn * (2.0 * nn + 1.0)) * pow;
        sum += term;
        if term < 1e-17 {
            break;
        }
        pow *= z2;
    }
    x - x * x.ln() + x * sum
}

/// Lobachevsky function, evaluated for any finite argument.
pub fn lobachevsky(theta: f64) -> f64 {
    let x = (2.0 * theta).rem_euclid(2.0 * PI);
    if x <= PI {
        clausen_principal(x) / 2.0
    } else {
        -clausen_principal(2.0 * PI - x) / 2.0
    }
}

/// The maximum value Lambda(pi/6), used for volume bounds.
pub fn lambda_max() -> f64 {
    lobachevsky(PI / 6.0)
}
