//! Closed floating-point intervals and axis-aligned boxes.
//!
//! Arithmetic is outward rounded by one ULP step per operation, so every
//! produced interval contains the exact real result of the corresponding
//! operation on its operand sets.

use serde::{Deserialize, Serialize};

/// A closed interval `[lo, hi]` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        debug_assert!(lo.is_finite() && hi.is_finite());
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Pad both endpoints outward by one ULP.
    pub fn outward(self) -> Interval {
        Interval {
            lo: next_down(self.lo),
            hi: next_up(self.hi),
        }
    }

    pub fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: next_down(self.lo + rhs.lo),
            hi: next_up(self.hi + rhs.hi),
        }
    }

    pub fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: next_down(self.lo - rhs.hi),
            hi: next_up(self.hi - rhs.lo),
        }
    }

    pub fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn mul(self, rhs: Interval) -> Interval {
        let candidates = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = candidates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: next_down(lo),
            hi: next_up(hi),
        }
    }

    pub fn scale(self, c: f64) -> Interval {
        self.mul(Interval::point(c))
    }

    /// Division; the denominator must not contain zero.
    pub fn div(self, rhs: Interval) -> Option<Interval> {
        if rhs.contains(0.0) {
            return None;
        }
        let candidates = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = candidates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(Interval {
            lo: next_down(lo),
            hi: next_up(hi),
        })
    }

    /// Tight enclosure of `{x^2 : x in self}`; never dips below zero.
    pub fn square(self) -> Interval {
        let (alo, ahi) = (self.lo.abs(), self.hi.abs());
        let hi = next_up((alo.max(ahi)).powi(2));
        let lo = if self.contains(0.0) {
            0.0
        } else {
            next_down(alo.min(ahi).powi(2)).max(0.0)
        };
        Interval { lo, hi }
    }

    /// Enclosure of the square root; requires `hi >= 0`, the negative part
    /// (if any, from outward rounding) is clipped at zero.
    pub fn sqrt(self) -> Interval {
        let lo = self.lo.max(0.0);
        Interval {
            lo: next_down(lo.sqrt()).max(0.0),
            hi: next_up(self.hi.max(0.0).sqrt()),
        }
    }

    pub fn exp(self) -> Interval {
        Interval {
            lo: next_down(self.lo.exp()).max(0.0),
            hi: next_up(self.hi.exp()),
        }
    }

    pub fn sin(self) -> Interval {
        trig_enclosure(self, f64::sin, -std::f64::consts::FRAC_PI_2)
    }

    pub fn cos(self) -> Interval {
        trig_enclosure(self, f64::cos, 0.0)
    }

    pub fn min_i(self, rhs: Interval) -> Interval {
        Interval::new(self.lo.min(rhs.lo), self.hi.min(rhs.hi))
    }

    pub fn max_i(self, rhs: Interval) -> Interval {
        Interval::new(self.lo.max(rhs.lo), self.hi.max(rhs.hi))
    }

    /// Integer power with correct sign handling.
    pub fn powi(self, k: i32) -> Interval {
        if k == 0 {
            return Interval::point(1.0);
        }
        if k < 0 {
            // 1 / x^|k|; caller checks the zero crossing via div.
            return self.powi(-k);
        }
        if k % 2 == 0 {
            let even = self.square();
            let mut acc = even;
            for _ in 1..(k / 2) {
                acc = acc.mul(even);
            }
            acc
        } else {
            let lo = next_down(self.lo.powi(k));
            let hi = next_up(self.hi.powi(k));
            Interval { lo, hi }
        }
    }
}

/// Enclosure for sin/cos: peaks of the wave are located at
/// `phase + k*2pi` (maxima) and `phase + pi + k*2pi` (minima).
fn trig_enclosure(x: Interval, f: fn(f64) -> f64, max_phase: f64) -> Interval {
    use std::f64::consts::PI;
    if x.width() >= 2.0 * PI {
        return Interval::new(-1.0, 1.0);
    }
    let mut lo = f(x.lo).min(f(x.hi));
    let mut hi = f(x.lo).max(f(x.hi));
    // maxima at max_phase + 2k*pi, minima shifted by pi
    let k_lo = ((x.lo - max_phase) / (2.0 * PI)).floor() as i64;
    let k_hi = ((x.hi - max_phase) / (2.0 * PI)).ceil() as i64;
    for k in k_lo..=k_hi {
        let peak = max_phase + 2.0 * PI * k as f64;
        if x.contains(peak) {
            hi = 1.0;
        }
        let trough = peak + PI;
        if x.contains(trough) || x.contains(trough - 2.0 * PI) {
            lo = -1.0;
        }
    }
    Interval {
        lo: next_down(lo).max(-1.0),
        hi: next_up(hi).min(1.0),
    }
}

pub fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    let bits = if x == 0.0 { 1 } else if x > 0.0 { x.to_bits() + 1 } else { x.to_bits() - 1 };
    f64::from_bits(bits)
}

pub fn next_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    let bits = if x == 0.0 {
        1u64 << 63 | 1 // smallest negative subnormal
    } else if x > 0.0 {
        x.to_bits() - 1
    } else {
        x.to_bits() + 1
    };
    f64::from_bits(bits)
}

/// An axis-aligned box: one interval per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalBox {
    pub dims: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(dims: Vec<Interval>) -> Self {
        assert!(!dims.is_empty(), "boxes must have at least one dimension");
        IntervalBox { dims }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Width of the box: the largest edge length.
    pub fn width(&self) -> f64 {
        self.dims.iter().map(|i| i.width()).fold(0.0, f64::max)
    }

    pub fn center(&self) -> Vec<f64> {
        self.dims.iter().map(|i| i.mid()).collect()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.dims.len() == x.len() && self.dims.iter().zip(x).all(|(i, &v)| i.contains(v))
    }

    pub fn contains_box(&self, other: &IntervalBox) -> bool {
        self.dims.len() == other.dims.len()
            && self
                .dims
                .iter()
                .zip(&other.dims)
                .all(|(a, b)| a.contains_interval(b))
    }

    /// Split along the widest axis at its midpoint.
    pub fn bisect(&self) -> (IntervalBox, IntervalBox) {
        let axis = self
            .dims
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.width().total_cmp(&b.width()))
            .map(|(i, _)| i)
            .unwrap();
        let iv = self.dims[axis];
        let m = iv.mid();
        let mut left = self.clone();
        let mut right = self.clone();
        left.dims[axis] = Interval::new(iv.lo, m);
        right.dims[axis] = Interval::new(m, iv.hi);
        (left, right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_contains_exact_results() {
        let a = Interval::new(-1.0, 2.0);
        let b = Interval::new(0.5, 3.0);
        assert!(a.add(b).contains(2.0 + 0.5));
        assert!(a.mul(b).contains(-1.0 * 3.0));
        assert!(a.mul(b).contains(2.0 * 3.0));
        assert!(a.square().contains(4.0));
        assert!(a.square().lo >= 0.0);
    }

    #[test]
    fn division_rejects_zero_crossing() {
        let a = Interval::new(1.0, 2.0);
        assert!(a.div(Interval::new(-1.0, 1.0)).is_none());
        let q = a.div(Interval::new(2.0, 4.0)).unwrap();
        assert!(q.contains(0.25) && q.contains(1.0));
    }

    #[test]
    fn trig_hits_extrema() {
        use std::f64::consts::PI;
        let s = Interval::new(0.0, PI).sin();
        assert!(s.hi >= 1.0 && s.lo <= next_up(0.0));
        let c = Interval::new(0.0, PI).cos();
        assert!((c.lo - -1.0).abs() < 1e-12 && (c.hi - 1.0).abs() < 1e-12);
        let wide = Interval::new(0.0, 10.0).sin();
        assert_eq!((wide.lo, wide.hi), (-1.0, 1.0));
    }

    #[test]
    fn bisect_covers() {
        let b = IntervalBox::new(vec![Interval::new(0.0, 1.0), Interval::new(0.0, 4.0)]);
        let (l, r) = b.bisect();
        assert_eq!(l.dims[1].hi, 2.0);
        assert_eq!(r.dims[1].lo, 2.0);
        assert_eq!(l.dims[0], b.dims[0]);
    }

    #[test]
    fn next_up_down_step_one_ulp() {
        assert!(next_up(1.0) > 1.0);
        assert!(next_down(1.0) < 1.0);
        assert!(next_up(0.0) > 0.0);
        assert!(next_down(0.0) < 0.0);
        assert_eq!(next_up(next_down(1.5)), 1.5);
    }
}
