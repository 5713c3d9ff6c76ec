// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13, picked from the 1-norm
//! (Higham 2005).

use nalgebra::DMatrix;

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// True when every column of `a` sums to zero, as for the decay matrix of a
/// closed chain. Then `exp(a)` has unit column sums.
fn is_closed_generator(a: &DMatrix<f64>) -> bool {
    a.column_iter().all(|c| {
        let scale: f64 = c.iter().map(|v| v.abs()).sum();
        c.iter().sum::<f64>().abs() <= 1e-13 * scale
    })
}

/// Resets each diagonal entry so its column sums to exactly one.
fn restore_unit_column_sums(r: &mut DMatrix<f64>) {
    for j in 0..r.ncols() {
        let sum: f64 = r.column(j).iter().sum();
        r[(j, j)] += 1.0 - sum;
    }
}

/// `exp(a)` for a square real matrix.
///
/// For a closed generator the unit column sums are re-imposed after the
/// Padé step and after every squaring; otherwise rounding in the column sums
/// doubles with each squaring and long decay steps lose atoms.
///
/// Panics if `a` is not square. Returns `None` if the Padé denominator is
/// singular, which only happens for non-finite input.
pub fn expm(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.nrows();
    if n == 0 {
        return Some(DMatrix::zeros(0, 0));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let closed = is_closed_generator(a);
    let norm = one_norm(a);
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;

    for &(m, theta) in &THETA {
        if norm <= theta {
            let (u, v) = match m {
                3 => pade_low(a, &a2, &ident, &B3),
                5 => pade_low(a, &a2, &ident, &B5),
                7 => pade_low(a, &a2, &ident, &B7),
                _ => pade_low(a, &a2, &ident, &B9),
            };
            let mut r = solve_pade(u, v)?;
            if closed {
                restore_unit_column_sums(&mut r);
            }
            return Some(r);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(s);
    let a1 = a * scale;
    let a2 = &a2 * (scale * scale);
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;

    let u_inner = &a6 * (b[13] * &a6 + b[11] * &a4 + b[9] * &a2)
        + b[7] * &a6
        + b[5] * &a4
        + b[3] * &a2
        + b[1] * &ident;
    let u = &a1 * u_inner;
    let v = &a6 * (b[12] * &a6 + b[10] * &a4 + b[8] * &a2)
        + b[6] * &a6
        + b[4] * &a4
        + b[2] * &a2
        + b[0] * &ident;

    let mut r = solve_pade(u, v)?;
    if closed {
        restore_unit_column_sums(&mut r);
    }
    for _ in 0..s {
        r = &r * &r;
        if closed {
            restore_unit_column_sums(&mut r);
        }
    }
    Some(r)
}

/// Odd/even parts of a low-degree Padé numerator.
fn pade_low(
    a: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    ident: &DMatrix<f64>,
    b: &[f64],
) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut odd = b[1] * ident;
    let mut even = b[0] * ident;
    let mut power = ident.clone();
    let mut k = 2;
    while k < b.len() {
        power = &power * a2;
        even += b[k] * &power;
        if k + 1 < b.len() {
            odd += b[k + 1] * &power;
        }
        k += 2;
    }
    (a * odd, even)
}

fn solve_pade(u: DMatrix<f64>, v: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let p = &v + &u;
    let q = v - u;
    q.lu().solve(&p)
}
