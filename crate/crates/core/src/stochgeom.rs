//! Poisson fields with fading marks, interference sums and guard-zone tests.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::scalar::Scalar;

/// Path-loss distance clamp, meters.
pub const MIN_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StochError {
    #[error("empirical Laplace transform needs at least one sample")]
    EmptySamples,
    #[error("slot {slot} out of range for a field with {slot_count} slots")]
    SlotOutOfRange { slot: usize, slot_count: usize },
}

/// A location in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }
}

/// Seed plus stream index. Equal pairs reproduce equal draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One realization of a point process on a disc, with `slot_count`
/// independent unit-mean exponential marks per point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointField<T> {
    points: Vec<Point<T>>,
    /// Row-major: `marks[i * slot_count + slot]`.
    marks: Vec<T>,
    slot_count: usize,
}

impl<T: Scalar> PointField<T> {
    pub fn empty(slot_count: usize) -> Self {
        Self {
            points: Vec::new(),
            marks: Vec::new(),
            slot_count,
        }
    }

    /// Builds a field from explicit points and row-major marks.
    ///
    /// Panics if `marks.len() != points.len() * slot_count`.
    pub fn from_parts(points: Vec<Point<T>>, marks: Vec<T>, slot_count: usize) -> Self {
        assert_eq!(marks.len(), points.len() * slot_count, "mark matrix shape");
        Self {
            points,
            marks,
            slot_count,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point<T> {
        self.points[i]
    }

    pub fn mark(&self, i: usize, slot: usize) -> T {
        debug_assert!(slot < self.slot_count);
        self.marks[i * self.slot_count + slot]
    }

    /// All marks of one slot, in point order.
    pub fn slot_marks(&self, slot: usize) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(move |i| self.mark(i, slot))
    }

    /// Splits into the first `k` points and the rest, keeping marks attached.
    pub fn split_at(&self, k: usize) -> (Self, Self) {
        let cut = k * self.slot_count;
        (
            Self::from_parts(
                self.points[..k].to_vec(),
                self.marks[..cut].to_vec(),
                self.slot_count,
            ),
            Self::from_parts(
                self.points[k..].to_vec(),
                self.marks[cut..].to_vec(),
                self.slot_count,
            ),
        )
    }

    /// Writes `index,x,y,mark_0,...` rows for debugging.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "index,x,y")?;
        for s in 0..self.slot_count {
            write!(out, ",mark_{s}")?;
        }
        writeln!(out)?;
        for (i, p) in self.points.iter().enumerate() {
            write!(out, "{i},{},{}", p.x, p.y)?;
            for s in 0..self.slot_count {
                write!(out, ",{}", self.mark(i, s))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let n: f64 = Poisson::new(mean)
        .expect("positive finite Poisson mean")
        .sample(rng);
    n as usize
}

/// Homogeneous PPP of `density` on the disc of `radius` around `center`.
///
/// Draw order: count, then `(r, θ)` per point, then marks point by point.
pub fn sample_disc_ppp<T: Scalar, R: Rng + ?Sized>(
    density: T,
    radius: T,
    center: Point<T>,
    slot_count: usize,
    rng: &mut R,
) -> PointField<T> {
    let mean = (density * T::PI() * radius * radius).as_f64();
    let n = poisson_count(mean, rng);
    let two_pi = T::TAU();
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let r = radius * T::sample_unit(rng).sqrt();
        let theta = two_pi * T::sample_unit(rng);
        let (s, c) = theta.sin_cos();
        points.push(Point::new(center.x + r * c, center.y + r * s));
    }
    let marks = (0..n * slot_count).map(|_| T::sample_exp1(rng)).collect();
    PointField {
        points,
        marks,
        slot_count,
    }
}

/// PPP over the plane, truncated to the disc of radius `r_max`.
pub fn sample_plane_ppp<T: Scalar, R: Rng + ?Sized>(
    density: T,
    r_max: T,
    center: Point<T>,
    slot_count: usize,
    rng: &mut R,
) -> PointField<T> {
    sample_disc_ppp(density, r_max, center, slot_count, rng)
}

/// `tx_power · Σ_i mark_i(slot) · max(‖X_i − at‖, ε)^(−α)`, summed in point order.
pub fn aggregate_interference<T: Scalar>(
    field: &PointField<T>,
    slot: usize,
    at: Point<T>,
    tx_power: T,
    alpha: T,
) -> Result<T, StochError> {
    if field.is_empty() {
        return Ok(T::zero());
    }
    if slot >= field.slot_count {
        return Err(StochError::SlotOutOfRange {
            slot,
            slot_count: field.slot_count,
        });
    }
    Ok(tx_power * path_gain_sum(field, slot, at, alpha))
}

/// `Σ_i mark_i(slot) · max(d_i, ε)^(−α)` without bounds checks.
pub(crate) fn path_gain_sum<T: Scalar>(
    field: &PointField<T>,
    slot: usize,
    at: Point<T>,
    alpha: T,
) -> T {
    let eps = T::lit(MIN_DISTANCE);
    let four = alpha == T::lit(4.0);
    let mut acc = T::zero();
    for (i, p) in field.points.iter().enumerate() {
        let dx = p.x - at.x;
        let dy = p.y - at.y;
        let d2 = (dx * dx + dy * dy).max(eps * eps);
        let loss = if four {
            T::one() / (d2 * d2)
        } else {
            d2.powf(-alpha / T::lit(2.0))
        };
        acc = acc + field.marks[i * field.slot_count + slot] * loss;
    }
    acc
}

/// True iff every PR lies strictly farther than `r_gz` from `at`.
pub fn is_clear_of_guard_zones<T: Scalar>(at: Point<T>, pr_field: &PointField<T>, r_gz: T) -> bool {
    let r2 = r_gz * r_gz;
    pr_field.points.iter().all(|p| {
        let dx = p.x - at.x;
        let dy = p.y - at.y;
        dx * dx + dy * dy > r2
    })
}

/// Sample mean of `exp(−s·x)`.
pub fn empirical_laplace<T: Scalar>(samples: &[T], s: T) -> Result<T, StochError> {
    if samples.is_empty() {
        return Err(StochError::EmptySamples);
    }
    let n = T::from_usize(samples.len()).expect("sample count");
    Ok(samples.iter().map(|&x| (-s * x).exp()).sum::<T>() / n)
}
