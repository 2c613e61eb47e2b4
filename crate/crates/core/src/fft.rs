//! Unnormalized discrete Fourier transform for arbitrary lengths: iterative
//! radix-2 for powers of two, Bluestein's chirp-z reduction otherwise.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// Sign of the exponent: `Forward` computes `Σ x_j e^{-2πi jk/N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

pub(crate) fn fft(data: &mut [Complex64], dir: Direction) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, dir);
    } else {
        bluestein(data, dir);
    }
}

fn radix2(data: &mut [Complex64], dir: Direction) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    // twiddles evaluated directly, no recurrence
    let sign = dir.sign();
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / n as f64))
        .collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn bluestein(data: &mut [Complex64], dir: Direction) {
    let n = data.len();
    let m = (2 * n - 1).next_power_of_two();
    let sign = dir.sign();
    // chirp w_k = e^{sign·iπk²/n}; k² reduced mod 2n keeps the angle small
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k2 = (k as u128 * k as u128 % (2 * n as u128)) as f64;
            Complex64::from_polar(1.0, sign * PI * k2 / n as f64)
        })
        .collect();

    let mut a = alloc::vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = data[k] * chirp[k];
    }
    let mut b = alloc::vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    radix2(&mut a, Direction::Forward);
    radix2(&mut b, Direction::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    radix2(&mut a, Direction::Inverse);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        data[k] = a[k] * chirp[k] * scale;
    }
}

/// Signed frequency index of FFT bin `k`: `0..ceil(n/2)` then negative.
pub(crate) fn signed_index(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(x: &[Complex64], dir: Direction) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let ang = dir.sign() * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                        v * Complex64::from_polar(1.0, ang)
                    })
                    .sum()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn matches_naive_dft(
            vals in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..70),
            inverse in any::<bool>(),
        ) {
            let dir = if inverse { Direction::Inverse } else { Direction::Forward };
            let x: Vec<Complex64> = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let mut y = x.clone();
            fft(&mut y, dir);
            let z = naive(&x, dir);
            for (a, b) in y.iter().zip(&z) {
                prop_assert!((a - b).norm() < 1e-11 * x.len() as f64);
            }
        }
    }

    #[test]
    fn round_trip_large_odd_length() {
        let n = 3 * 5 * 7 * 11;
        let x: Vec<Complex64> =
            (0..n).map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos())).collect();
        let mut y = x.clone();
        fft(&mut y, Direction::Forward);
        fft(&mut y, Direction::Inverse);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b / n as f64).norm() < 1e-12);
        }
    }

    #[test]
    fn signed_indices() {
        assert_eq!(signed_index(0, 4), 0);
        assert_eq!(signed_index(1, 4), 1);
        assert_eq!(signed_index(2, 4), -2);
        assert_eq!(signed_index(3, 4), -1);
        assert_eq!(signed_index(2, 5), 2);
        assert_eq!(signed_index(3, 5), -2);
    }
}
