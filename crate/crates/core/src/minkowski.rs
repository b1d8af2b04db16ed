//! Minkowski four-vectors with the diagonal metric `(1, -1, -1, -1)`.
//!
//! Components are stored contravariant. [`FourVector::lower`] applies the
//! metric when a covariant set of components is needed, e.g. for gradients.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoostError {
    #[error("boost speed {0} is not below the speed of light")]
    Superluminal(f64),
}

/// Contravariant four-vector `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector { t: 0.0, x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    /// Time component plus spatial part.
    pub fn from_parts(t: f64, spatial: [f64; 3]) -> Self {
        Self::new(t, spatial[0], spatial[1], spatial[2])
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// `a^μ b_μ`.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    /// Minkowski square `a^μ a_μ`.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn spatial_norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Covariant components `a_μ = g_μν a^ν`. The metric is its own inverse, so
    /// this also raises an index.
    pub fn lower(&self) -> FourVector {
        FourVector::new(self.t, -self.x, -self.y, -self.z)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Pure Lorentz boost into a frame moving with `velocity` relative to the
    /// current one.
    pub fn boost(&self, velocity: [f64; 3]) -> Result<FourVector, BoostError> {
        Boost::new(velocity).map(|b| b.apply(self))
    }
}

/// A pure boost, precomputed so it can be applied to many vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boost {
    velocity: [f64; 3],
    gamma: f64,
    speed_sq: f64,
}

impl Boost {
    pub fn new(velocity: [f64; 3]) -> Result<Self, BoostError> {
        let speed_sq = velocity.iter().map(|v| v * v).sum::<f64>();
        if !(speed_sq < 1.0) {
            return Err(BoostError::Superluminal(speed_sq.sqrt()));
        }
        Ok(Self { velocity, gamma: 1.0 / (1.0 - speed_sq).sqrt(), speed_sq })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn velocity(&self) -> [f64; 3] {
        self.velocity
    }

    pub fn inverse(&self) -> Boost {
        let v = self.velocity;
        Boost { velocity: [-v[0], -v[1], -v[2]], ..*self }
    }

    /// `t' = γ(t - v·r)`, `r' = r + ((γ-1)(v·r)/v² - γt) v`.
    pub fn apply(&self, a: &FourVector) -> FourVector {
        if self.speed_sq == 0.0 {
            return *a;
        }
        let v = self.velocity;
        let vr = v[0] * a.x + v[1] * a.y + v[2] * a.z;
        let g = self.gamma;
        let coeff = (g - 1.0) * vr / self.speed_sq - g * a.t;
        FourVector::new(
            g * (a.t - vr),
            a.x + coeff * v[0],
            a.y + coeff * v[1],
            a.z + coeff * v[2],
        )
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, o: FourVector) {
        *self = *self + o;
    }
}

impl SubAssign for FourVector {
    fn sub_assign(&mut self, o: FourVector) {
        *self = *self - o;
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, a: FourVector) -> FourVector {
        FourVector::new(self * a.t, self * a.x, self * a.y, self * a.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        s * self
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        -1.0 * self
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, mu: usize) -> &f64 {
        match mu {
            0 => &self.t,
            1 => &self.x,
            2 => &self.y,
            3 => &self.z,
            _ => panic!("four-vector index {mu} out of range"),
        }
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, mu: usize) -> &mut f64 {
        match mu {
            0 => &mut self.t,
            1 => &mut self.x,
            2 => &mut self.y,
            3 => &mut self.z,
            _ => panic!("four-vector index {mu} out of range"),
        }
    }
}

/// Relativistic addition of collinear speeds.
pub fn add_collinear_speeds(u: f64, v: f64) -> f64 {
    (u + v) / (1.0 + u * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn metric_signs() {
        let e0 = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let e1 = FourVector::new(0.0, 1.0, 0.0, 0.0);
        assert_eq!(e0.dot(&e0), 1.0);
        assert_eq!(e1.dot(&e1), -1.0);
        assert_eq!(e0.dot(&e1), 0.0);
    }

    #[test]
    fn rest_frame_contraction_picks_time_component() {
        let m = 2.5;
        let p = FourVector::new(m, 0.0, 0.0, 0.0);
        let q = FourVector::new(3.0, -1.0, 4.0, 7.0);
        assert_eq!(p.dot(&q), m * 3.0);
    }

    #[test]
    fn identity_boost() {
        let a = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(a.boost([0.0; 3]).unwrap(), a);
    }

    #[test]
    fn boost_of_rest_mass() {
        let m = 3.0;
        let p = FourVector::new(m, 0.0, 0.0, 0.0).boost([0.6, 0.0, 0.0]).unwrap();
        // the frame moves along +x, so the particle moves along -x in it
        assert!((p.t - 1.25 * m).abs() < 1e-14);
        assert!((p.x.abs() - 1.25 * m * 0.6).abs() < 1e-14);
        assert!((p.norm_sq() - m * m).abs() < 1e-12);
        let back = Boost::new([0.6, 0.0, 0.0]).unwrap().inverse().apply(&p);
        assert!((back.t - m).abs() < 1e-14 && back.x.abs() < 1e-14);
    }

    #[test]
    fn superluminal_boost_rejected() {
        assert!(matches!(FourVector::ZERO.boost([0.6, 0.8, 0.0]), Err(BoostError::Superluminal(_))));
        assert!(FourVector::ZERO.boost([1.2, 0.0, 0.0]).is_err());
    }

    #[test]
    fn collinear_composition() {
        let a = FourVector::new(1.3, 0.2, -0.7, 0.1);
        for &(u, v) in &[(0.3, 0.5), (-0.9, 0.95), (0.99, 0.99)] {
            let two = Boost::new([v, 0.0, 0.0]).unwrap().apply(&Boost::new([u, 0.0, 0.0]).unwrap().apply(&a));
            let one = Boost::new([add_collinear_speeds(u, v), 0.0, 0.0]).unwrap().apply(&a);
            for mu in 0..4 {
                assert!(close(two[mu], one[mu], 1e-10), "{two:?} vs {one:?}");
            }
        }
    }

    fn vec4() -> impl Strategy<Value = FourVector> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(FourVector::from_array)
    }

    fn velocity() -> impl Strategy<Value = [f64; 3]> {
        (prop::array::uniform3(-1.0f64..1.0), 0.0f64..0.99).prop_filter_map("nonzero direction", |(d, s)| {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            (n > 1e-3).then(|| [d[0] / n * s, d[1] / n * s, d[2] / n * s])
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn dot_invariant_under_boost(a in vec4(), b in vec4(), v in velocity()) {
            let boost = Boost::new(v).unwrap();
            let before = a.dot(&b);
            let after = boost.apply(&a).dot(&boost.apply(&b));
            // cancellation at γ ≈ 7 costs a few digits relative to the component scale
            let scale = boost.gamma().powi(2) * (a.spatial_norm_sq() + a.t * a.t).sqrt()
                * (b.spatial_norm_sq() + b.t * b.t).sqrt();
            prop_assert!((before - after).abs() <= 1e-13 * scale.max(1.0));
        }

        #[test]
        fn dot_is_bilinear_and_symmetric(a in vec4(), b in vec4(), c in vec4(), s in -5.0f64..5.0) {
            prop_assert_eq!(a.dot(&b), b.dot(&a));
            let lhs = (s * a + c).dot(&b);
            let rhs = s * a.dot(&b) + c.dot(&b);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()) * 100.0);
        }
    }
}
