//! Adaptive Gauss–Kronrod quadrature on a finite interval.
//!
//! Worst-interval-first refinement: the segment with the largest error
//! estimate is split until the summed estimate meets the tolerance. Nodes
//! are interior, so integrable endpoint singularities are handled by the
//! subdivision chain rather than by special casing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::real::Real;

/// 15-point Kronrod abscissae (positive half), Gauss-7 points at odd indices.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_7,
    0.949_107_912_342_758_524_526_189_7,
    0.864_864_423_359_769_072_789_712_8,
    0.741_531_185_599_394_439_863_864_8,
    0.586_087_235_467_691_130_294_144_8,
    0.405_845_151_377_397_166_906_606_4,
    0.207_784_955_007_898_467_600_689_4,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_0,
    0.063_092_092_629_978_553_290_700_7,
    0.104_790_010_322_250_183_839_876_3,
    0.140_653_259_715_525_918_745_189_6,
    0.169_004_726_639_267_902_826_583_4,
    0.190_350_578_064_785_409_913_256_4,
    0.204_432_940_075_298_892_414_162_0,
    0.209_482_141_084_727_828_012_999_2,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_4,
    0.279_705_391_489_276_667_901_467_8,
    0.381_830_050_505_118_944_950_369_8,
    0.417_959_183_673_469_387_755_102_0,
];

const MAX_SEGMENTS: usize = 4096;

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// One Kronrod-15 pass over [a, b]: (integral, |K15 - G7| error estimate).
fn gk15<T: Real, F: Fn(T) -> T + ?Sized>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::of(0.5);
    let center = (a + b) * T::of(0.5);
    let fc = f(center);
    let mut kronrod = T::of(WGK[7]) * fc;
    let mut gauss = T::of(WG[3]) * fc;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let dx = half * T::of(x);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::of(wk) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::of(WG[j / 2]) * pair;
        }
    }
    kronrod = kronrod * half;
    gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs())
}

/// Integrate f over [a, b] to the given relative tolerance.
pub(crate) fn adaptive_gk15<T: Real, F: Fn(T) -> T + ?Sized>(
    f: &F,
    a: T,
    b: T,
    rel_tol: T,
) -> Result<(T, T)> {
    let (value, error) = gk15(f, a, b);
    if !value.is_finite() {
        return Err(Error::NonFinite { at: ((a + b) * T::of(0.5)).as_f64() });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;
    let floor = T::min_positive_value().sqrt();
    loop {
        let tol = rel_tol * total_value.abs() + floor;
        if total_error <= tol {
            return Ok((total_value, total_error));
        }
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure {
                tolerance: tol.as_f64(),
                estimate: total_error.as_f64(),
            });
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = (worst.a + worst.b) * T::of(0.5);
        let (lv, le) = gk15(f, worst.a, mid);
        let (rv, re) = gk15(f, mid, worst.b);
        if !lv.is_finite() || !rv.is_finite() {
            return Err(Error::NonFinite { at: mid.as_f64() });
        }
        total_value = total_value - worst.value + lv + rv;
        total_error = total_error - worst.error + le + re;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
    }
}
