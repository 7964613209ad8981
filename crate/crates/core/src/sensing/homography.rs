use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEGENERATE_EPS: f64 = 1e-12;

/// Projective pixel-to-pixel map, stored with the bottom-right entry at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Homography {
    m: [[f64; 3]; 3],
}

impl Default for Homography {
    fn default() -> Self {
        Self::identity()
    }
}

impl TryFrom<[[f64; 3]; 3]> for Homography {
    type Error = Error;

    fn try_from(m: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(m)
    }
}

impl From<Homography> for [[f64; 3]; 3] {
    fn from(h: Homography) -> Self {
        h.m
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl Homography {
    /// Normalize and validate a 3x3 matrix.
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("homography entries must be finite".into()));
        }
        let s = m[2][2];
        if s.abs() < DEGENERATE_EPS {
            return Err(Error::Parameter(
                "homography bottom-right entry is zero; cannot normalize".into(),
            ));
        }
        let mut n = m;
        n.iter_mut().flatten().for_each(|v| *v /= s);
        if det3(&n).abs() <= DEGENERATE_EPS {
            return Err(Error::Parameter("homography is not invertible".into()));
        }
        Ok(Self { m: n })
    }

    pub fn identity() -> Self {
        Self {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self {
            m: [[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]],
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn determinant(&self) -> f64 {
        det3(&self.m)
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = &self.m;
        let d = det3(m);
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
            [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
            [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
        ];
        let mut inv = adj;
        inv.iter_mut().flatten().for_each(|v| *v /= d);
        Self::new(inv)
    }

    /// Homogeneous multiply followed by the perspective divide.
    pub fn apply(&self, (u, v): (f64, f64)) -> Result<(f64, f64)> {
        let m = &self.m;
        let x = m[0][0] * u + m[0][1] * v + m[0][2];
        let y = m[1][0] * u + m[1][1] * v + m[1][2];
        let w = m[2][0] * u + m[2][1] * v + m[2][2];
        if w.abs() < DEGENERATE_EPS {
            return Err(Error::DegeneratePoint(w));
        }
        Ok((x / w, y / w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_translation() {
        assert_eq!(Homography::identity().apply((12.5, 7.0)).unwrap(), (12.5, 7.0));
        assert_eq!(Homography::translation(5.0, -3.0).apply((100.0, 100.0)).unwrap(), (105.0, 97.0));
    }

    #[test]
    fn normalizes_scale() {
        let h = Homography::new([[2.0, 0.0, 4.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]]).unwrap();
        assert_eq!(h.matrix()[2][2], 1.0);
        assert_eq!(h.apply((1.0, 1.0)).unwrap(), (3.0, 1.0));
    }

    #[test]
    fn rejects_singular() {
        assert!(Homography::new([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        assert!(Homography::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn degenerate_point() {
        let h = Homography::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.01, 0.0, 1.0]]).unwrap();
        assert!(matches!(h.apply((-100.0, 3.0)), Err(Error::DegeneratePoint(_))));
    }

    #[test]
    fn serde_round_trip() {
        let h = Homography::new([[1.1, 0.02, 3.0], [-0.01, 0.98, -2.0], [1e-5, 2e-5, 1.0]]).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<Homography>(&s).unwrap(), h);
        assert!(serde_json::from_str::<Homography>("[[0,0,0],[0,0,0],[0,0,1]]").is_err());
    }

    proptest! {
        #[test]
        fn inverse_round_trip(
            a in 0.8f64..1.2, b in -0.2f64..0.2, c in -20.0f64..20.0,
            d in -0.2f64..0.2, e in 0.8f64..1.2, f in -20.0f64..20.0,
            g in -1e-4f64..1e-4, h in -1e-4f64..1e-4,
            u in 0.0f64..346.0, v in 0.0f64..260.0,
        ) {
            let hm = Homography::new([[a, b, c], [d, e, f], [g, h, 1.0]]).unwrap();
            let p = hm.apply((u, v)).unwrap();
            let back = hm.inverse().unwrap().apply(p).unwrap();
            prop_assert!((back.0 - u).abs() <= 1e-9 && (back.1 - v).abs() <= 1e-9);
        }
    }
}
