//! Coordinates on the unrolled pipe surface.
//!
//! The cylinder is cut along an arbitrary angle and unrolled into a flat
//! sheet: axial position `z` runs along the sheet, circumferential arc
//! length across it. Circumferential distances wrap, taking the shorter
//! of the two ways around the pipe.
//!
//! All lengths are SI metres, angles are degrees.

use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("pipe outer_diameter ({outer_diameter} m) must exceed twice wall_thickness ({wall_thickness} m), both positive")]
    InvalidWall {
        outer_diameter: f64,
        wall_thickness: f64,
    },
    #[error("pipe length must be positive, got {0} m")]
    InvalidLength(f64),
    #[error("ring element count must be at least 1")]
    EmptyRing,
    #[error("rx ring (z = {rx_z} m) must sit at larger z than tx ring (z = {tx_z} m)")]
    RingOrder { tx_z: f64, rx_z: f64 },
}

/// Cylinder geometry plus optional material metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PipeSpec {
    /// Outer diameter in metres.
    pub outer_diameter: f64,
    /// Wall thickness in metres.
    pub wall_thickness: f64,
    /// Total pipe length in metres.
    pub length: f64,
    /// Density in kg/m³ (metadata only).
    pub density: Option<f64>,
    /// Young's modulus in Pa (metadata only).
    pub youngs_modulus: Option<f64>,
    /// Poisson's ratio (metadata only).
    pub poisson_ratio: Option<f64>,
}

impl PipeSpec {
    pub fn new(outer_diameter: f64, wall_thickness: f64, length: f64) -> Result<Self, GeometryError> {
        if !(wall_thickness > 0.0) || !(outer_diameter > 2.0 * wall_thickness) {
            return Err(GeometryError::InvalidWall {
                outer_diameter,
                wall_thickness,
            });
        }
        if !(length > 0.0) {
            return Err(GeometryError::InvalidLength(length));
        }
        Ok(Self {
            outer_diameter,
            wall_thickness,
            length,
            density: None,
            youngs_modulus: None,
            poisson_ratio: None,
        })
    }

    pub fn with_material(mut self, density: f64, youngs_modulus: f64, poisson_ratio: f64) -> Self {
        self.density = Some(density);
        self.youngs_modulus = Some(youngs_modulus);
        self.poisson_ratio = Some(poisson_ratio);
        self
    }

    /// Outer-surface circumference, `π · outer_diameter`.
    ///
    /// This is the height of the unrolled sheet and the wrap period of
    /// all circumferential arithmetic.
    pub fn circumference(&self) -> f64 {
        PI * self.outer_diameter
    }
}

/// A point on the pipe surface: axial position `z` (metres, measured from
/// the transmitter ring plane) and angular position (degrees).
///
/// The angle is normalized into `[0, 360)` on construction, so `θ` and
/// `θ + 360k` denote the same point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    z: f64,
    theta: f64,
}

impl SurfacePoint {
    pub fn new(z: f64, theta_deg: f64) -> Self {
        // `+ 0.0` turns a possible -0.0 remainder into +0.0.
        let mut theta = theta_deg.rem_euclid(360.0) + 0.0;
        if theta >= 360.0 {
            theta = 0.0;
        }
        Self { z, theta }
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Angular position in degrees, in `[0, 360)`.
    pub fn theta_deg(&self) -> f64 {
        self.theta
    }
}

/// One transducer ring: axial plane and element count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSpec {
    /// Axial position of the ring plane in metres.
    pub z: f64,
    /// Number of elements, spaced uniformly at `360/count` degrees.
    pub count: usize,
}

/// Transmitter ring + receiver ring. Element `k` of a ring sits at
/// `θ = 360·k/count` degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayLayout {
    pub tx_ring: RingSpec,
    pub rx_ring: RingSpec,
}

impl ArrayLayout {
    pub fn new(tx_ring: RingSpec, rx_ring: RingSpec) -> Result<Self, GeometryError> {
        if tx_ring.count == 0 || rx_ring.count == 0 {
            return Err(GeometryError::EmptyRing);
        }
        if !(rx_ring.z > tx_ring.z) {
            return Err(GeometryError::RingOrder {
                tx_z: tx_ring.z,
                rx_z: rx_ring.z,
            });
        }
        Ok(Self { tx_ring, rx_ring })
    }

    /// Axial separation between the rings in metres.
    pub fn separation(&self) -> f64 {
        self.rx_ring.z - self.tx_ring.z
    }

    /// Angular position of receiver element `k` in degrees.
    pub fn rx_angle_deg(&self, k: usize) -> f64 {
        360.0 * k as f64 / self.rx_ring.count as f64
    }

    /// Surface positions of all receiver elements, in element order.
    pub fn rx_positions(&self) -> Vec<SurfacePoint> {
        (0..self.rx_ring.count)
            .map(|k| SurfacePoint::new(self.rx_ring.z, self.rx_angle_deg(k)))
            .collect()
    }

    /// 32-bit FNV-1a digest of the layout configuration, quantized to
    /// whole micrometres so that equal layouts hash equally regardless
    /// of how their floats were produced. Stored in capture headers to
    /// detect captures recorded under a different array configuration.
    pub fn digest(&self) -> u32 {
        let mut hash: u32 = 0x811c_9dc5;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= u32::from(b);
                hash = hash.wrapping_mul(0x0100_0193);
            }
        };
        eat(&((self.tx_ring.z * 1e6).round() as i64).to_le_bytes());
        eat(&(self.tx_ring.count as u32).to_le_bytes());
        eat(&((self.rx_ring.z * 1e6).round() as i64).to_le_bytes());
        eat(&(self.rx_ring.count as u32).to_le_bytes());
        hash
    }
}

/// Distance from a pixel to the transmitter ring plane.
///
/// All transmitters fire together, so only the axial offset matters; the
/// pixel's angle is irrelevant.
pub fn tx_distance(pixel: &SurfacePoint, layout: &ArrayLayout) -> f64 {
    (pixel.z - layout.tx_ring.z).abs()
}

/// Distance between two surface points on the unrolled sheet, with
/// circumferential wrap: `sqrt(Δz² + min(|Δy|, circumference − |Δy|)²)`
/// where `Δy` is the circumferential arc offset.
fn unrolled_distance(a: &SurfacePoint, b: &SurfacePoint, pipe: &PipeSpec) -> f64 {
    let circumference = pipe.circumference();
    let dz = a.z - b.z;
    let dy = (a.theta - b.theta).abs() / 360.0 * circumference;
    let dy = dy.min(circumference - dy);
    (dz * dz + dy * dy).sqrt()
}

/// Distance from a pixel to a single receiver element, wrap-aware.
///
/// Waves reach a receiver both ways around the cylinder; the shorter
/// circumferential image is taken so the field is continuous across the
/// (arbitrary) unroll cut.
pub fn rx_distance(pixel: &SurfacePoint, rx_element: &SurfacePoint, pipe: &PipeSpec) -> f64 {
    unrolled_distance(pixel, rx_element, pipe)
}

/// Surface distance between two points, used as the localization error
/// metric. Same wrap-aware metric as [`rx_distance`]: symmetric, zero
/// iff the points coincide (mod 360°).
pub fn surface_error(a: &SurfacePoint, b: &SurfacePoint, pipe: &PipeSpec) -> f64 {
    unrolled_distance(a, b, pipe)
}
