use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{invalid, Error, Result};

/// Speed of light used to derive the carrier wavelength, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Maximum number of rejected user draws before giving up on a placement.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(self, other: Point3) -> f64 {
        self.to(other).length()
    }

    /// Vector from `self` to `other`.
    pub fn to(self, other: Point3) -> Point3 {
        Point3::new(other.x - self.x, other.y - self.y, other.z - self.z)
    }

    pub fn length(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn unit(self) -> Point3 {
        let l = self.length();
        Point3::new(self.x / l, self.y / l, self.z / l)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Node placement and array geometry.
///
/// The transmitter carries a uniform linear array along the x-axis; the IRS is
/// a planar array in the x–z plane (a wall at constant y).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub tx_center: Point3,
    pub irs_center: Point3,
    pub user_area_center: Point3,
    pub user_area_radius: f64,
    pub carrier_hz: f64,
    pub element_spacing: f64,
    pub min_user_separation: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let wavelength = SPEED_OF_LIGHT / 2.0e9;
        Self {
            tx_center: Point3::new(0.0, 20.0, 10.0),
            irs_center: Point3::new(30.0, 0.0, 5.0),
            user_area_center: Point3::new(350.0, 50.0, 2.0),
            user_area_radius: 20.0,
            carrier_hz: 2.0e9,
            element_spacing: wavelength / 2.0,
            min_user_separation: 2.0 * wavelength,
        }
    }
}

impl GeometryConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.user_area_radius > 0.0) || !self.user_area_radius.is_finite() {
            return Err(invalid("user_area_radius", "must be finite and positive"));
        }
        if !(self.element_spacing > 0.0) || !self.element_spacing.is_finite() {
            return Err(invalid("element_spacing", "must be finite and positive"));
        }
        if !(self.carrier_hz > 0.0) || !self.carrier_hz.is_finite() {
            return Err(invalid("carrier_hz", "must be finite and positive"));
        }
        if !(self.min_user_separation >= 0.0) {
            return Err(invalid("min_user_separation", "must be nonnegative"));
        }
        for p in [self.tx_center, self.irs_center, self.user_area_center] {
            if !p.is_finite() {
                return Err(invalid("geometry", "coordinates must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePositions {
    pub tx: Point3,
    pub irs: Point3,
    /// Users in group order.
    pub users: Vec<Point3>,
}

/// Places the users of all groups uniformly on the user disk, seeded.
pub fn place_nodes(geom: &GeometryConfig, group_sizes: &[usize], seed: u64) -> Result<NodePositions> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    place_with(geom, group_sizes.iter().sum(), &mut rng)
}

pub(crate) fn place_with(geom: &GeometryConfig, users: usize, rng: &mut impl Rng) -> Result<NodePositions> {
    geom.validate()?;
    let c = geom.user_area_center;
    let mut placed: Vec<Point3> = Vec::with_capacity(users);
    let mut attempts = 0usize;
    while placed.len() < users {
        if attempts >= MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::Config(format!(
                "could not place {users} users {} m apart within {MAX_PLACEMENT_ATTEMPTS} draws",
                geom.min_user_separation
            )));
        }
        attempts += 1;
        let r = geom.user_area_radius * rng.random::<f64>().sqrt();
        let a = std::f64::consts::TAU * rng.random::<f64>();
        let p = Point3::new(c.x + r * a.cos(), c.y + r * a.sin(), c.z);
        if placed.iter().all(|q| q.distance(p) >= geom.min_user_separation) {
            placed.push(p);
        }
    }
    Ok(NodePositions {
        tx: geom.tx_center,
        irs: geom.irs_center,
        users: placed,
    })
}
