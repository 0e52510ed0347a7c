//! Deterministic sample points and pointwise evaluation.

use crate::courant::GSection;
use crate::frame::FrameModel;
use crate::scalar::{Scalar, Var};
use num_complex::Complex64;

/// Default number of sample points for rank certificates.
pub const DEFAULT_SAMPLES: usize = 50;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Halton points: periodic coordinates in `[0, 1)`, unbounded ones in `[-2, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    names: Vec<Var>,
    points: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn halton(model: &FrameModel, count: usize) -> Self {
        let coords = model.coordinates();
        assert!(
            coords.len() <= PRIMES.len(),
            "too many coordinates for the Halton bases"
        );
        let points = (1..=count)
            .map(|index| {
                coords
                    .iter()
                    .zip(PRIMES)
                    .map(|(c, base)| {
                        let h = radical_inverse(index as u64, base as u64);
                        if c.periodic {
                            h
                        } else {
                            -2.0 + 4.0 * h
                        }
                    })
                    .collect()
            })
            .collect();
        SampleSet {
            names: coords.iter().map(|c| c.name.clone()).collect(),
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn names(&self) -> &[Var] {
        &self.names
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    /// Value at point `k`; coordinates missing from the model read as zero.
    pub fn eval(&self, f: &Scalar, k: usize) -> Complex64 {
        let p = &self.points[k];
        f.evaluate(|name| {
            Some(
                self.names
                    .iter()
                    .position(|n| &**n == name)
                    .map_or(0.0, |i| p[i]),
            )
        })
        .expect("lookup always succeeds")
    }

    pub fn eval_section(&self, s: &GSection, k: usize) -> Vec<Complex64> {
        s.components().iter().map(|c| self.eval(c, k)).collect()
    }

    /// Number of points where `f` is numerically nonzero.
    pub fn nonvanishing_count(&self, f: &Scalar) -> usize {
        if f.is_zero() {
            return 0;
        }
        if f.as_constant().is_some() {
            return self.len();
        }
        (0..self.len())
            .filter(|&k| self.eval(f, k).norm() > PIVOT_TOL)
            .count()
    }

    /// Renders point `k` as `x=0.5, t=0.25`.
    pub fn describe(&self, k: usize) -> String {
        self.names
            .iter()
            .zip(&self.points[k])
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Magnitude below which a pivot counts as vanishing at a point.
pub const PIVOT_TOL: f64 = 1e-8;

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += f * (index % base) as f64;
        index /= base;
        f /= base as f64;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_ranges_and_determinism() {
        let m = FrameModel::coordinate("m", &[("x", true), ("y", false)]);
        let s = SampleSet::halton(&m, 50);
        assert_eq!(s.len(), 50);
        for k in 0..50 {
            assert!((0.0..1.0).contains(&s.point(k)[0]));
            assert!((-2.0..=2.0).contains(&s.point(k)[1]));
        }
        assert_eq!(s.point(0), &[0.5, -2.0 + 4.0 / 3.0]);
        assert_eq!(s, SampleSet::halton(&m, 50));
    }

    #[test]
    fn evaluation_at_points() {
        let m = FrameModel::coordinate("m", &[("t", true)]);
        let s = SampleSet::halton(&m, 4);
        let c = Scalar::cos("t", 2.0 * std::f64::consts::PI);
        assert!((s.eval(&c, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(s.nonvanishing_count(&Scalar::one()), 4);
        // t = 1/4 and t = 3/4 are among the first four points
        assert_eq!(s.nonvanishing_count(&c), 2);
    }
}
