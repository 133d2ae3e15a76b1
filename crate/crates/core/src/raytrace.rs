//! Exact meridional ray tracing and wavefront retardance at a mirror surface.
//!
//! Coordinates are `(z, r)`: `z` along the optical axis, `r` the signed
//! transverse height in the meridional plane. All surfaces are rotationally
//! symmetric, so a 2D trace is exact.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, CavityError, Result};
use crate::numerics::MonotoneCubic;
use crate::scalar::Scalar;

/// Default number of traced ray heights per profile.
pub const DEFAULT_SAMPLES: usize = 256;
/// Smallest accepted fan size.
pub const MIN_SAMPLES: usize = 16;

const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub z: T,
    pub r: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(z: T, r: T) -> Self {
        Self { z, r }
    }

    pub fn dot(self, other: Self) -> T {
        self.z * other.z + self.r * other.r
    }

    pub fn norm(self) -> T {
        self.z.hypot(self.r)
    }

    pub fn normalized(self) -> Self {
        self * self.norm().recip()
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.z + o.z, self.r + o.r)
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.z - o.z, self.r - o.r)
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.z * s, self.r * s)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.z, -self.r)
    }
}

/// A meridional ray with its accumulated optical path length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray<T> {
    pub origin: Vec2<T>,
    pub direction: Vec2<T>,
    pub opl: T,
    pub id: usize,
}

impl<T: Scalar> Ray<T> {
    /// New ray; `direction` is normalized.
    pub fn new(origin: Vec2<T>, direction: Vec2<T>, id: usize) -> Self {
        Self {
            origin,
            direction: direction.normalized(),
            opl: T::zero(),
            id,
        }
    }

    pub fn at(&self, t: T) -> Vec2<T> {
        self.origin + self.direction * t
    }

    /// Moves the ray a geometric distance `t` through a medium of index `n`.
    pub fn advance(&self, t: T, n: T) -> Self {
        Self {
            origin: self.at(t),
            opl: self.opl + n * t,
            ..*self
        }
    }

    /// Axial coordinate where the ray (extended both ways) crosses `r = 0`.
    pub fn axis_crossing(&self) -> Option<T> {
        if self.direction.r == T::zero() {
            return None;
        }
        Some(self.origin.z - self.origin.r * self.direction.z / self.direction.r)
    }
}

/// Surface shape. The vertex is the on-axis point of the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind<T> {
    Plane {
        vertex_z: T,
    },
    /// Center of curvature at `vertex_z + roc`.
    Sphere {
        roc: T,
        vertex_z: T,
    },
    /// `(1 - (z - vertex_z)/a)² + (r/b)² = 1`: the vertex half of an
    /// ellipsoid of revolution with axial half-axis `a` and radial half-axis `b`.
    Ellipsoid {
        a: T,
        b: T,
        vertex_z: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceProfile<T> {
    pub kind: SurfaceKind<T>,
    /// Largest `|r|` a ray may hit the surface at.
    pub aperture: T,
}

/// Intersection point, unit normal facing the incoming ray, and path length to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit<T> {
    pub point: Vec2<T>,
    pub normal: Vec2<T>,
    pub distance: T,
}

impl<T: Scalar> SurfaceProfile<T> {
    pub fn plane(vertex_z: T, aperture: T) -> Result<Self> {
        Self::checked(SurfaceKind::Plane { vertex_z }, aperture)
    }

    pub fn sphere(roc: T, vertex_z: T, aperture: T) -> Result<Self> {
        if roc == T::zero() || !roc.is_finite() {
            return domain(format!(
                "sphere radius of curvature must be finite and nonzero, got {roc}"
            ));
        }
        Self::checked(SurfaceKind::Sphere { roc, vertex_z }, aperture)
    }

    pub fn ellipsoid(a: T, b: T, vertex_z: T, aperture: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero()) {
            return domain(format!("ellipsoid half-axes must be positive, got a = {a}, b = {b}"));
        }
        if aperture > b {
            return domain(format!(
                "ellipsoid sag is single-valued only for r <= b = {b}, got aperture {aperture}"
            ));
        }
        Self::checked(SurfaceKind::Ellipsoid { a, b, vertex_z }, aperture)
    }

    fn checked(kind: SurfaceKind<T>, aperture: T) -> Result<Self> {
        if !(aperture > T::zero()) {
            return domain(format!("surface aperture must be positive, got {aperture}"));
        }
        Ok(Self { kind, aperture })
    }

    pub fn vertex_z(&self) -> T {
        match self.kind {
            SurfaceKind::Plane { vertex_z }
            | SurfaceKind::Sphere { vertex_z, .. }
            | SurfaceKind::Ellipsoid { vertex_z, .. } => vertex_z,
        }
    }

    /// Axial sag `z(r) - vertex_z` on the vertex half, `None` outside the shape.
    pub fn sag(&self, r: T) -> Option<T> {
        match self.kind {
            SurfaceKind::Plane { .. } => Some(T::zero()),
            SurfaceKind::Sphere { roc, .. } => {
                let q = roc * roc - r * r;
                (q >= T::zero()).then(|| r * r / (roc + roc.signum() * q.sqrt()))
            }
            SurfaceKind::Ellipsoid { a, b, .. } => {
                let q = T::one() - (r / b).sq();
                (q >= T::zero()).then(|| a * (r / b).sq() / (T::one() + q.sqrt()))
            }
        }
    }

    /// Nearest forward intersection of `ray` with the surface inside the aperture.
    pub fn intersect(&self, ray: &Ray<T>) -> Result<Hit<T>> {
        let miss = |reason: &str| CavityError::RayMiss {
            ray_id: ray.id,
            reason: reason.to_string(),
        };
        let o = ray.origin;
        let d = ray.direction;
        let eps = T::epsilon() * T::lit(64.0) * (o.norm() + T::one());
        let (t, normal) = match self.kind {
            SurfaceKind::Plane { vertex_z } => {
                if d.z == T::zero() {
                    return Err(miss("ray parallel to plane"));
                }
                let t = (vertex_z - o.z) / d.z;
                if !(t > eps) {
                    return Err(miss("plane lies behind the ray"));
                }
                (t, Vec2::new(T::one(), T::zero()))
            }
            SurfaceKind::Sphere { roc, vertex_z } => {
                let center = Vec2::new(vertex_z + roc, T::zero());
                let oc = o - center;
                let on_vertex_half = |t: T| (ray.at(t).z - center.z) * roc <= T::zero();
                let t = nearest_root(
                    T::one(),
                    T::two() * oc.dot(d),
                    oc.dot(oc) - roc * roc,
                    eps,
                    on_vertex_half,
                )
                .ok_or_else(|| miss("no real intersection with sphere"))?;
                (t, (ray.at(t) - center).normalized())
            }
            SurfaceKind::Ellipsoid { a, b, vertex_z } => {
                let cz = vertex_z + a;
                let (a2, b2) = (a * a, b * b);
                let oz = o.z - cz;
                let qa = d.z * d.z / a2 + d.r * d.r / b2;
                let qb = T::two() * (oz * d.z / a2 + o.r * d.r / b2);
                let qc = oz * oz / a2 + o.r * o.r / b2 - T::one();
                let t = nearest_root(qa, qb, qc, eps, |t| ray.at(t).z <= cz)
                    .ok_or_else(|| miss("no real intersection with ellipsoid"))?;
                let p = ray.at(t);
                (t, Vec2::new((p.z - cz) / a2, p.r / b2).normalized())
            }
        };
        let point = ray.at(t);
        if point.r.abs() > self.aperture {
            return Err(miss(&format!(
                "hit at r = {} outside aperture {}",
                point.r, self.aperture
            )));
        }
        let normal = if normal.dot(d) > T::zero() { -normal } else { normal };
        Ok(Hit {
            point,
            normal,
            distance: t,
        })
    }
}

/// Smallest root `t > eps` of `qa t² + qb t + qc` accepted by `keep`.
fn nearest_root<T: Scalar>(qa: T, qb: T, qc: T, eps: T, keep: impl Fn(T) -> bool) -> Option<T> {
    let disc = qb * qb - T::lit(4.0) * qa * qc;
    if disc < T::zero() || qa == T::zero() {
        return None;
    }
    // Numerically stable pair.
    let q = -T::half() * (qb + qb.signum() * disc.sqrt());
    let (mut t1, mut t2) = (q / qa, if q == T::zero() { T::zero() } else { qc / q });
    if t1 > t2 {
        std::mem::swap(&mut t1, &mut t2);
    }
    [t1, t2].into_iter().find(|&t| t > eps && keep(t))
}

/// Vector Snell refraction at a surface point.
///
/// `normal` is the unit surface normal facing the incoming ray. The returned
/// ray starts at the same point with the same accumulated path.
pub fn refract<T: Scalar>(ray: &Ray<T>, normal: Vec2<T>, n1: T, n2: T) -> Result<Ray<T>> {
    if !(n1 > T::zero() && n2 > T::zero()) {
        return domain(format!("refractive indices must be positive, got {n1} and {n2}"));
    }
    let eta = n1 / n2;
    let cos_i = -normal.dot(ray.direction);
    let sin2_t = eta * eta * (T::one() - cos_i * cos_i).max(T::zero());
    if sin2_t > T::one() {
        return Err(CavityError::TotalInternalReflection { ray_id: ray.id });
    }
    let cos_t = (T::one() - sin2_t).sqrt();
    let direction = (ray.direction * eta + normal * (eta * cos_i - cos_t)).normalized();
    Ok(Ray { direction, ..*ray })
}

/// Sampled phase retardance `φ(r)` in radians, referenced to the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefrontProfile<T> {
    r: Vec<T>,
    phase: Vec<T>,
}

impl<T: Scalar> WavefrontProfile<T> {
    /// Builds a profile; `r` must start at 0 and increase strictly.
    /// The phase is shifted so that `φ(0) = 0`.
    pub fn new(r: Vec<T>, phase: Vec<T>) -> Result<Self> {
        if r.len() != phase.len() || r.len() < 2 {
            return domain("wavefront profile needs at least two (r, phase) samples of equal length");
        }
        if r[0] != T::zero() || !r.windows(2).all(|w| w[0] < w[1]) {
            return domain("wavefront radii must start at 0 and increase strictly");
        }
        let offset = phase[0];
        let phase = phase.into_iter().map(|p| p - offset).collect();
        Ok(Self { r, phase })
    }

    /// Profile with `φ ≡ 0` out to `r_max`.
    pub fn flat(r_max: T) -> Result<Self> {
        Self::new(vec![T::zero(), r_max], vec![T::zero(), T::zero()])
    }

    pub fn radii(&self) -> &[T] {
        &self.r
    }

    pub fn phases(&self) -> &[T] {
        &self.phase
    }

    pub fn r_max(&self) -> T {
        self.r[self.r.len() - 1]
    }

    pub fn max_abs(&self) -> T {
        self.phase.iter().fold(T::zero(), |m, p| m.max(p.abs()))
    }

    /// Monotone cubic interpolant of `φ(r)`, clamped beyond the last sample.
    pub fn interpolator(&self) -> MonotoneCubic<T> {
        MonotoneCubic::new(self.r.clone(), self.phase.clone()).expect("profile invariants hold")
    }

    /// Adds a constant phase; `φ(0)` becomes `offset`.
    pub fn with_offset(&self, offset: T) -> Self {
        Self {
            r: self.r.clone(),
            phase: self.phase.iter().map(|&p| p + offset).collect(),
        }
    }

    /// Two-column CSV, header `r_m,phase_rad`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r_m,phase_rad\n");
        for (r, p) in self.r.iter().zip(&self.phase) {
            let _ = writeln!(out, "{:.11e},{:.11e}", r.as_f64(), p.as_f64());
        }
        out
    }
}

/// Plano-concave mirror substrate, entered through its plane face.
///
/// The mirror vertex sits at `z = 0`, the plane face at `z = -thickness` and
/// the concave (reflective) surface curves toward `+z` with its center at
/// `z = mirror_roc`. An infinite `mirror_roc` makes the mirror flat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanoConcaveSubstrate<T> {
    pub mirror_roc: T,
    pub thickness: T,
    pub index: T,
    pub aperture: T,
}

impl<T: Scalar> PlanoConcaveSubstrate<T> {
    pub fn plane_z(&self) -> T {
        -self.thickness
    }

    fn mirror(&self) -> Result<SurfaceProfile<T>> {
        if self.mirror_roc.is_infinite() {
            SurfaceProfile::plane(T::zero(), self.aperture)
        } else {
            SurfaceProfile::sphere(self.mirror_roc, T::zero(), self.aperture)
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.thickness > T::zero() && self.index >= T::one() && self.aperture > T::zero()) {
            return domain(format!(
                "substrate needs thickness > 0, index >= 1 and aperture > 0, got t = {}, n = {}, a = {}",
                self.thickness, self.index, self.aperture
            ));
        }
        if self.mirror_roc.is_finite() && !(self.mirror_roc > self.aperture) {
            return domain(format!(
                "mirror radius {} must exceed the aperture {}",
                self.mirror_roc, self.aperture
            ));
        }
        Ok(())
    }
}

/// Wavefront arriving at the plane face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputWavefront<T> {
    /// Spherical wave that, after the plane face, converges paraxially to
    /// `target_z` on axis inside the glass.
    Converging { target_z: T },
    /// Plane wave travelling along `+z`.
    Collimated,
}

/// Radii `r_max sin(π/2 · i/(N-1))`, dense toward the edge.
fn fan_radii<T: Scalar>(r_max: T, n: usize) -> Vec<T> {
    let last = T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| {
            if i + 1 == n {
                r_max
            } else {
                r_max * (T::FRAC_PI_2() * T::from_usize_lossy(i) / last).sin()
            }
        })
        .collect()
}

/// Finds the launch parameter whose ray lands at height `target` and returns its path length.
///
/// `trace(s)` maps a launch parameter `s >= 0` to `(hit height, opl)` and must
/// be increasing in `s`. Any error is treated as overshooting the target.
fn solve_launch<T: Scalar>(trace: &(impl Fn(T) -> Result<(T, T)> + Sync), target: T, guess: T) -> Result<T> {
    if target == T::zero() {
        return Ok(trace(T::zero())?.1);
    }
    let mut lo = T::zero();
    let mut hi = guess;
    let mut expansions = 0;
    loop {
        match trace(hi) {
            Ok((h, _)) if h < target => {
                lo = hi;
                hi *= T::two();
            }
            _ => break,
        }
        expansions += 1;
        if expansions > 60 {
            return domain(format!("no launch reaches height {target}"));
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = T::half() * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        match trace(mid) {
            Ok((h, _)) if h < target => lo = mid,
            _ => hi = mid,
        }
    }
    // Prefer the side that traces successfully.
    let (height, opl) = match trace(hi) {
        Ok(v) => v,
        Err(_) => trace(lo)?,
    };
    let tol = T::lit(1e-9) * target.abs() + T::epsilon() * T::lit(1e3);
    if (height - target).abs() > tol {
        return domain(format!("no launch reaches height {target}; the fan stops at {height}"));
    }
    Ok(opl)
}

fn profile_from_fan<T: Scalar>(
    trace: impl Fn(T) -> Result<(T, T)> + Sync,
    r_max: T,
    n_samples: usize,
    guess: T,
    wavenumber: T,
) -> Result<WavefrontProfile<T>> {
    if n_samples < MIN_SAMPLES {
        return domain(format!(
            "at least {MIN_SAMPLES} ray heights are required, got {n_samples}"
        ));
    }
    if !(r_max > T::zero()) {
        return domain(format!("fan radius must be positive, got {r_max}"));
    }
    let radii = fan_radii(r_max, n_samples);
    let opl: Vec<T> = radii
        .par_iter()
        .map(|&r| {
            solve_launch(&trace, r, guess).map_err(|e| CavityError::Trace {
                launch: r.as_f64(),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let phase = opl.iter().map(|&o| wavenumber * (o - opl[0])).collect();
    WavefrontProfile::new(radii, phase)
}

/// Traces one ray of the plano-concave input fan.
///
/// For a converging input, `s` is the launch angle (radians) measured at the
/// air-side focus; for a collimated input it is the launch height. Returns
/// the ray at the mirror surface.
pub fn trace_planoconcave_ray<T: Scalar>(
    substrate: &PlanoConcaveSubstrate<T>,
    input: InputWavefront<T>,
    s: T,
    id: usize,
) -> Result<Ray<T>> {
    let plane = SurfaceProfile::plane(substrate.plane_z(), T::infinity())?;
    let mirror = substrate.mirror()?;
    let start = match input {
        InputWavefront::Converging { target_z } => {
            let focus = air_focus(substrate, target_z);
            let launch = T::lit(4.0) * (focus - substrate.plane_z()).abs().max(substrate.thickness);
            let dir = Vec2::new(s.cos(), -s.sin());
            Ray::new(Vec2::new(focus, T::zero()) - dir * launch, dir, id)
        }
        InputWavefront::Collimated => Ray::new(
            Vec2::new(substrate.plane_z() - substrate.thickness, s),
            Vec2::new(T::one(), T::zero()),
            id,
        ),
    };
    let hit = plane.intersect(&start)?;
    let inside = refract(
        &start.advance(hit.distance, T::one()),
        hit.normal,
        T::one(),
        substrate.index,
    )?;
    let hit = mirror.intersect(&inside)?;
    Ok(inside.advance(hit.distance, substrate.index))
}

/// Air-side focus whose paraxial image through the plane face is `target_z`.
fn air_focus<T: Scalar>(substrate: &PlanoConcaveSubstrate<T>, target_z: T) -> T {
    substrate.plane_z() + (target_z - substrate.plane_z()) / substrate.index
}

/// Retardance of an input wave at the concave mirror surface of a plano-concave substrate.
///
/// Heights are sampled on the mirror surface out to `r_max`; `φ(r)` is `k`
/// times the optical path from the input wavefront, relative to the axial ray.
pub fn retardance_planoconcave<T: Scalar>(
    substrate: &PlanoConcaveSubstrate<T>,
    input: InputWavefront<T>,
    r_max: T,
    n_samples: usize,
    wavenumber: T,
) -> Result<WavefrontProfile<T>> {
    substrate.validate()?;
    if r_max > substrate.aperture {
        return domain(format!(
            "fan radius {r_max} exceeds the mirror aperture {}",
            substrate.aperture
        ));
    }
    let guess = match input {
        InputWavefront::Converging { target_z } => {
            let focus = air_focus(substrate, target_z);
            if !(focus > T::zero()) {
                return domain(format!(
                    "converging input must focus beyond the mirror vertex, got z = {target_z}"
                ));
            }
            (r_max / focus).atan() * T::half()
        }
        InputWavefront::Collimated => r_max * T::half(),
    };
    let trace = |s: T| {
        let ray = trace_planoconcave_ray(substrate, input, s, 0)?;
        Ok((ray.origin.r, ray.opl))
    };
    profile_from_fan(trace, r_max, n_samples, guess, wavenumber)
}

/// Collimated-input lens: a refracting front face followed by a spherical
/// mirror surface centered on the axis at `mirror_center_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensTrain<T> {
    pub front: SurfaceProfile<T>,
    pub index: T,
    pub mirror_roc: T,
    pub mirror_center_z: T,
    pub mirror_aperture: T,
}

impl<T: Scalar> LensTrain<T> {
    fn mirror(&self) -> Result<SurfaceProfile<T>> {
        SurfaceProfile::sphere(
            self.mirror_roc,
            self.mirror_center_z - self.mirror_roc,
            self.mirror_aperture,
        )
    }

    /// Ray entering parallel to the axis at height `h`, stopped just after the front face.
    pub fn refracted(&self, h: T, id: usize) -> Result<Ray<T>> {
        let start_z = self.front.vertex_z() - self.mirror_roc;
        let start = Ray::new(Vec2::new(start_z, h), Vec2::new(T::one(), T::zero()), id);
        let hit = self.front.intersect(&start)?;
        refract(&start.advance(hit.distance, T::one()), hit.normal, T::one(), self.index)
    }

    /// Ray entering at height `h`, stopped at the mirror surface.
    pub fn trace(&self, h: T, id: usize) -> Result<Ray<T>> {
        let inside = self.refracted(h, id)?;
        let hit = self.mirror()?.intersect(&inside)?;
        Ok(inside.advance(hit.distance, self.index))
    }
}

/// Retardance of a collimated input at the mirror surface of `lens`, out to mirror height `r_max`.
pub fn retardance_anaclastic<T: Scalar>(
    lens: &LensTrain<T>,
    r_max: T,
    n_samples: usize,
    wavenumber: T,
) -> Result<WavefrontProfile<T>> {
    if !(lens.index > T::one()) {
        return domain(format!("lens index must exceed 1, got {}", lens.index));
    }
    if r_max > lens.mirror_aperture {
        return domain(format!(
            "fan radius {r_max} exceeds the mirror aperture {}",
            lens.mirror_aperture
        ));
    }
    let trace = |h: T| {
        let ray = lens.trace(h, 0)?;
        Ok((ray.origin.r, ray.opl))
    };
    profile_from_fan(trace, r_max, n_samples, r_max * T::half(), wavenumber)
}

/// Largest `|φ|` over a uniform fan of entrance heights `[0, h_max]`.
///
/// Unlike [`retardance_anaclastic`] this does not target mirror heights, so it
/// also works when an aberrated lens folds the fan over. Rays that miss or
/// are totally reflected are dropped as clipped.
pub fn fan_max_retardance<T: Scalar>(lens: &LensTrain<T>, h_max: T, n_rays: usize, wavenumber: T) -> Result<T> {
    if n_rays < MIN_SAMPLES {
        return domain(format!("at least {MIN_SAMPLES} rays are required, got {n_rays}"));
    }
    let axial = lens.trace(T::zero(), 0)?;
    let last = T::from_usize_lossy(n_rays - 1);
    let worst = (1..n_rays)
        .into_par_iter()
        .filter_map(|i| {
            let h = h_max * T::from_usize_lossy(i) / last;
            lens.trace(h, i)
                .ok()
                .map(|ray| (wavenumber * (ray.opl - axial.opl)).abs())
        })
        .reduce(T::zero, |a, b| a.max(b));
    Ok(worst)
}
