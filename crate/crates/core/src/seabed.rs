//! The real factor `S(z)` multiplying every pole strength.
//!
//! A seabed is stored as explicit geometry: each variant splits the plane into
//! regions on which `S` is given by one smooth formula, and the loci between
//! regions are lines, circles or a circular arc. The integrator freezes the
//! region of every pole between events, so the formulas are defined (and
//! smoothly extended) on the whole plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::ComplexNumber;

/// One affine piece `slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPiece {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearPiece {
    pub fn constant(value: f64) -> Self {
        Self {
            slope: 0.0,
            intercept: value,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Integral of the piece over `[a, b]`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        0.5 * self.slope * (b * b - a * a) + self.intercept * (b - a)
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawProfile {
    #[serde(default)]
    breakpoints: Vec<f64>,
    pieces: Vec<LinearPiece>,
}

/// Piecewise affine function of one real variable.
///
/// `pieces[k]` applies between `breakpoints[k - 1]` and `breakpoints[k]`;
/// the first and last pieces extend to infinity. Values may jump at a
/// breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct PiecewiseLinearProfile {
    breakpoints: Vec<f64>,
    pieces: Vec<LinearPiece>,
}

impl TryFrom<RawProfile> for PiecewiseLinearProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        Self::new(raw.breakpoints, raw.pieces)
    }
}

impl PiecewiseLinearProfile {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<LinearPiece>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "profile with {} breakpoints needs {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite())
            || pieces
                .iter()
                .any(|p| !p.slope.is_finite() || !p.intercept.is_finite())
        {
            return Err(Error::NonFinite("profile"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "profile breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            pieces,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            breakpoints: Vec::new(),
            pieces: vec![LinearPiece::constant(value)],
        }
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self {
            breakpoints: Vec::new(),
            pieces: vec![LinearPiece { slope, intercept }],
        }
    }

    /// `below` for `x < at`, `above` for `x >= at`.
    pub fn step(at: f64, below: f64, above: f64) -> Self {
        Self {
            breakpoints: vec![at],
            pieces: vec![LinearPiece::constant(below), LinearPiece::constant(above)],
        }
    }

    /// Constant `from` below `start`, constant `to` above `end`, linear in between.
    pub fn ramp(start: f64, end: f64, from: f64, to: f64) -> Result<Self> {
        if !(end > start) {
            return Err(Error::InvalidInput("ramp needs end > start".into()));
        }
        let slope = (to - from) / (end - start);
        Self::new(
            vec![start, end],
            vec![
                LinearPiece::constant(from),
                LinearPiece {
                    slope,
                    intercept: from - slope * start,
                },
                LinearPiece::constant(to),
            ],
        )
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[LinearPiece] {
        &self.pieces
    }

    /// Index of the piece containing `x`. A breakpoint belongs to the piece
    /// above it when `closed_above`, to the piece below otherwise.
    pub fn piece_index(&self, x: f64, closed_above: bool) -> usize {
        if closed_above {
            self.breakpoints.partition_point(|&b| b <= x)
        } else {
            self.breakpoints.partition_point(|&b| b < x)
        }
    }

    pub fn eval(&self, x: f64, closed_above: bool) -> f64 {
        self.pieces[self.piece_index(x, closed_above)].value(x)
    }

    /// Size of the jump `value_above - value_below` at breakpoint `k`.
    pub fn jump(&self, k: usize) -> f64 {
        let b = self.breakpoints[k];
        self.pieces[k + 1].value(b) - self.pieces[k].value(b)
    }

    /// `∫_0^x` of the profile: continuous, zero at the origin.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let (lo, hi, sign) = if x >= 0.0 {
            (0.0, x, 1.0)
        } else {
            (x, 0.0, -1.0)
        };
        let mut total = 0.0;
        for (k, piece) in self.pieces.iter().enumerate() {
            let start = if k == 0 {
                f64::NEG_INFINITY
            } else {
                self.breakpoints[k - 1]
            };
            let end = self.breakpoints.get(k).copied().unwrap_or(f64::INFINITY);
            let a = lo.max(start);
            let b = hi.min(end);
            if b > a {
                total += piece.integral(a, b);
            }
        }
        sign * total
    }

    pub fn negated(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| LinearPiece {
                    slope: -p.slope,
                    intercept: -p.intercept,
                })
                .collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].slope == 0.0
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| LinearPiece {
                    slope: factor * p.slope,
                    intercept: factor * p.intercept,
                })
                .collect(),
        }
    }
}

/// Position-dependent strength factor.
///
/// Boundary convention: a horizontal (vertical) breakpoint line belongs to the
/// region above (to the right of) it; a circle of a radial seabed belongs to
/// the inside; the arc of an arc mirror belongs to the upper side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Seabed {
    Constant {
        value: f64,
    },
    /// `S(z) = slope * Im z + offset`.
    LinearOfIm {
        slope: f64,
        offset: f64,
    },
    /// `S(z) = p(Im z)`.
    ProfileOfIm {
        profile: PiecewiseLinearProfile,
    },
    /// `S(z) = p(Re z)`.
    ProfileOfRe {
        profile: PiecewiseLinearProfile,
    },
    /// `S(z) = p(|Im z|)`.
    ProfileOfAbsIm {
        profile: PiecewiseLinearProfile,
    },
    /// `inside` on the closed disk `|z| <= radius`, `outside` elsewhere.
    RadialStep {
        radius: f64,
        inside: f64,
        outside: f64,
    },
    /// `S(z) = p(|z|^2)`.
    RadialProfile {
        profile: PiecewiseLinearProfile,
    },
    /// `above` on the set `|z - center| >= radius, Im(z - center) >= 0`,
    /// `below` elsewhere: a mirror along the upper half of the circle.
    ArcMirror {
        center: ComplexNumber,
        radius: f64,
        below: f64,
        above: f64,
    },
}

/// Index of the region of a seabed that contains a point.
pub type RegionId = usize;

/// Euclidean motion leaving a seabed invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryTag {
    Translation { direction: ComplexNumber },
    Rotation { center: ComplexNumber },
    None,
}

/// The variable a seabed antiderivative is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentCoordinate {
    Im,
    Re,
    /// `|z - center|^2` about the rotation center.
    SquaredRadius,
}

/// `σ` with `σ' = S` in the seabed's symmetry coordinate and `σ(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Antiderivative {
    coordinate: MomentCoordinate,
    center: ComplexNumber,
    profile: PiecewiseLinearProfile,
    odd_extension: bool,
}

impl Antiderivative {
    pub fn coordinate(&self) -> MomentCoordinate {
        self.coordinate
    }

    /// `σ(s)` for a value `s` of the symmetry coordinate.
    pub fn eval(&self, s: f64) -> f64 {
        if self.odd_extension {
            s.signum() * self.profile.antiderivative(s.abs())
        } else {
            self.profile.antiderivative(s)
        }
    }

    /// The symmetry coordinate of a point.
    pub fn coordinate_of(&self, z: ComplexNumber) -> f64 {
        match self.coordinate {
            MomentCoordinate::Im => z.im,
            MomentCoordinate::Re => z.re,
            MomentCoordinate::SquaredRadius => (z - self.center).norm_sqr(),
        }
    }

    /// `σ` evaluated at the symmetry coordinate of `z`.
    pub fn at(&self, z: ComplexNumber) -> f64 {
        self.eval(self.coordinate_of(z))
    }
}

impl Seabed {
    pub fn constant(value: f64) -> Self {
        Seabed::Constant { value }
    }

    /// `below` for `Im z < at`, `above` for `Im z >= at`.
    pub fn horizontal_step(at: f64, below: f64, above: f64) -> Self {
        Seabed::ProfileOfIm {
            profile: PiecewiseLinearProfile::step(at, below, above),
        }
    }

    /// `left` for `Re z < at`, `right` for `Re z >= at`.
    pub fn vertical_step(at: f64, left: f64, right: f64) -> Self {
        Seabed::ProfileOfRe {
            profile: PiecewiseLinearProfile::step(at, left, right),
        }
    }

    /// Checks finiteness and geometric sanity of the parameters.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite("seabed parameter"))
            }
        };
        match self {
            Seabed::Constant { value } => finite(*value),
            Seabed::LinearOfIm { slope, offset } => finite(*slope).and(finite(*offset)),
            Seabed::ProfileOfIm { .. }
            | Seabed::ProfileOfRe { .. }
            | Seabed::ProfileOfAbsIm { .. }
            | Seabed::RadialProfile { .. } => Ok(()),
            Seabed::RadialStep {
                radius,
                inside,
                outside,
            } => {
                finite(*radius)?;
                finite(*inside)?;
                finite(*outside)?;
                if *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidInput(
                        "radial step radius must be positive".into(),
                    ))
                }
            }
            Seabed::ArcMirror {
                center,
                radius,
                below,
                above,
            } => {
                finite(center.re)?;
                finite(center.im)?;
                finite(*below)?;
                finite(*above)?;
                if radius.is_finite() && *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidInput("arc radius must be positive".into()))
                }
            }
        }
    }

    /// `S(z)`, with loci resolved by the boundary convention.
    pub fn eval(&self, z: ComplexNumber) -> f64 {
        self.region_value(self.region_of(z), z)
    }

    /// The region containing `z`.
    pub fn region_of(&self, z: ComplexNumber) -> RegionId {
        match self {
            Seabed::Constant { .. } | Seabed::LinearOfIm { .. } => 0,
            Seabed::ProfileOfIm { profile } => profile.piece_index(z.im, true),
            Seabed::ProfileOfRe { profile } => profile.piece_index(z.re, true),
            Seabed::ProfileOfAbsIm { profile } => {
                2 * profile.piece_index(z.im.abs(), true) + usize::from(z.im < 0.0)
            }
            Seabed::RadialStep { radius, .. } => usize::from(z.norm_sqr() > radius * radius),
            Seabed::RadialProfile { profile } => profile.piece_index(z.norm_sqr(), false),
            Seabed::ArcMirror { center, radius, .. } => {
                let w = z - center;
                usize::from(w.im >= 0.0 && w.norm_sqr() >= radius * radius)
            }
        }
    }

    /// The smooth formula of `region`, evaluated at any `z` (also outside the region).
    pub fn region_value(&self, region: RegionId, z: ComplexNumber) -> f64 {
        match self {
            Seabed::Constant { value } => *value,
            Seabed::LinearOfIm { slope, offset } => slope * z.im + offset,
            Seabed::ProfileOfIm { profile } => profile.pieces[region].value(z.im),
            Seabed::ProfileOfRe { profile } => profile.pieces[region].value(z.re),
            Seabed::ProfileOfAbsIm { profile } => {
                let s = if region % 2 == 1 { -z.im } else { z.im };
                profile.pieces[region / 2].value(s)
            }
            Seabed::RadialStep {
                inside, outside, ..
            } => {
                if region == 0 {
                    *inside
                } else {
                    *outside
                }
            }
            Seabed::RadialProfile { profile } => profile.pieces[region].value(z.norm_sqr()),
            Seabed::ArcMirror { below, above, .. } => {
                if region == 0 {
                    *below
                } else {
                    *above
                }
            }
        }
    }

    /// Whether `S` is constant on every region (no sloping parts).
    pub fn is_piecewise_constant(&self) -> bool {
        match self {
            Seabed::Constant { .. } | Seabed::RadialStep { .. } | Seabed::ArcMirror { .. } => true,
            Seabed::LinearOfIm { slope, .. } => *slope == 0.0,
            Seabed::ProfileOfIm { profile }
            | Seabed::ProfileOfRe { profile }
            | Seabed::ProfileOfAbsIm { profile }
            | Seabed::RadialProfile { profile } => profile.pieces.iter().all(|p| p.slope == 0.0),
        }
    }

    /// Whether the seabed has a single region.
    pub fn is_smooth(&self) -> bool {
        match self {
            Seabed::Constant { .. } | Seabed::LinearOfIm { .. } => true,
            Seabed::ProfileOfIm { profile }
            | Seabed::ProfileOfRe { profile }
            | Seabed::RadialProfile { profile } => profile.breakpoints.is_empty(),
            _ => false,
        }
    }

    /// `-S`: equivalent to reversing all vorticity, or time.
    pub fn negated(&self) -> Self {
        match self {
            Seabed::Constant { value } => Seabed::Constant { value: -value },
            Seabed::LinearOfIm { slope, offset } => Seabed::LinearOfIm {
                slope: -slope,
                offset: -offset,
            },
            Seabed::ProfileOfIm { profile } => Seabed::ProfileOfIm {
                profile: profile.negated(),
            },
            Seabed::ProfileOfRe { profile } => Seabed::ProfileOfRe {
                profile: profile.negated(),
            },
            Seabed::ProfileOfAbsIm { profile } => Seabed::ProfileOfAbsIm {
                profile: profile.negated(),
            },
            Seabed::RadialStep {
                radius,
                inside,
                outside,
            } => Seabed::RadialStep {
                radius: *radius,
                inside: -inside,
                outside: -outside,
            },
            Seabed::RadialProfile { profile } => Seabed::RadialProfile {
                profile: profile.negated(),
            },
            Seabed::ArcMirror {
                center,
                radius,
                below,
                above,
            } => Seabed::ArcMirror {
                center: *center,
                radius: *radius,
                below: -below,
                above: -above,
            },
        }
    }

    /// `factor * S`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Seabed::Constant { value } => Seabed::Constant {
                value: factor * value,
            },
            Seabed::LinearOfIm { slope, offset } => Seabed::LinearOfIm {
                slope: factor * slope,
                offset: factor * offset,
            },
            Seabed::ProfileOfIm { profile } => Seabed::ProfileOfIm {
                profile: profile.scaled(factor),
            },
            Seabed::ProfileOfRe { profile } => Seabed::ProfileOfRe {
                profile: profile.scaled(factor),
            },
            Seabed::ProfileOfAbsIm { profile } => Seabed::ProfileOfAbsIm {
                profile: profile.scaled(factor),
            },
            Seabed::RadialStep {
                radius,
                inside,
                outside,
            } => Seabed::RadialStep {
                radius: *radius,
                inside: factor * inside,
                outside: factor * outside,
            },
            Seabed::RadialProfile { profile } => Seabed::RadialProfile {
                profile: profile.scaled(factor),
            },
            Seabed::ArcMirror {
                center,
                radius,
                below,
                above,
            } => Seabed::ArcMirror {
                center: *center,
                radius: *radius,
                below: factor * below,
                above: factor * above,
            },
        }
    }

    pub fn symmetry(&self) -> SymmetryTag {
        let real = ComplexNumber::new(1.0, 0.0);
        match self {
            Seabed::Constant { .. }
            | Seabed::LinearOfIm { .. }
            | Seabed::ProfileOfIm { .. }
            | Seabed::ProfileOfAbsIm { .. } => SymmetryTag::Translation { direction: real },
            Seabed::ProfileOfRe { .. } => SymmetryTag::Translation {
                direction: ComplexNumber::new(0.0, 1.0),
            },
            Seabed::RadialStep { .. } | Seabed::RadialProfile { .. } => SymmetryTag::Rotation {
                center: ComplexNumber::new(0.0, 0.0),
            },
            // the straight rays continuing the arc break the rotation symmetry
            Seabed::ArcMirror { .. } => SymmetryTag::None,
        }
    }

    /// `σ` with `σ' = S` along the seabed's symmetry coordinate, `σ(0) = 0`.
    ///
    /// Fails with [`Error::NoSymmetry`] for the arc mirror.
    pub fn antiderivative(&self) -> Result<Antiderivative> {
        let origin = ComplexNumber::new(0.0, 0.0);
        let make = |coordinate, profile, odd_extension| Antiderivative {
            coordinate,
            center: origin,
            profile,
            odd_extension,
        };
        match self {
            Seabed::Constant { value } => Ok(make(
                MomentCoordinate::Im,
                PiecewiseLinearProfile::constant(*value),
                false,
            )),
            Seabed::LinearOfIm { slope, offset } => Ok(make(
                MomentCoordinate::Im,
                PiecewiseLinearProfile::affine(*slope, *offset),
                false,
            )),
            Seabed::ProfileOfIm { profile } => {
                Ok(make(MomentCoordinate::Im, profile.clone(), false))
            }
            Seabed::ProfileOfRe { profile } => {
                Ok(make(MomentCoordinate::Re, profile.clone(), false))
            }
            Seabed::ProfileOfAbsIm { profile } => {
                Ok(make(MomentCoordinate::Im, profile.clone(), true))
            }
            Seabed::RadialStep {
                radius,
                inside,
                outside,
            } => Ok(make(
                MomentCoordinate::SquaredRadius,
                PiecewiseLinearProfile::step(radius * radius, *inside, *outside),
                false,
            )),
            Seabed::RadialProfile { profile } => Ok(make(
                MomentCoordinate::SquaredRadius,
                profile.clone(),
                false,
            )),
            Seabed::ArcMirror { .. } => Err(Error::NoSymmetry),
        }
    }

    /// Smallest fraction `f` in `(0, 1]` at which the segment `z0 -> z1`
    /// meets a discontinuity locus of `S`.
    pub fn crossing_fraction(&self, z0: ComplexNumber, z1: ComplexNumber) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut offer = |f: f64| {
            if f > 0.0 && f <= 1.0 && best.is_none_or(|b| f < b) {
                best = Some(f);
            }
        };
        let jumps = |profile: &PiecewiseLinearProfile| -> Vec<f64> {
            (0..profile.breakpoints.len())
                .filter(|&k| profile.jump(k) != 0.0)
                .map(|k| profile.breakpoints[k])
                .collect()
        };
        match self {
            Seabed::Constant { .. } | Seabed::LinearOfIm { .. } => {}
            Seabed::ProfileOfIm { profile } => {
                for b in jumps(profile) {
                    line_fraction(z0.im, z1.im, b).map(&mut offer);
                }
            }
            Seabed::ProfileOfRe { profile } => {
                for b in jumps(profile) {
                    line_fraction(z0.re, z1.re, b).map(&mut offer);
                }
            }
            Seabed::ProfileOfAbsIm { profile } => {
                for b in jumps(profile).into_iter().filter(|&b| b > 0.0) {
                    line_fraction(z0.im, z1.im, b).map(&mut offer);
                    line_fraction(z0.im, z1.im, -b).map(&mut offer);
                }
            }
            Seabed::RadialStep {
                radius,
                inside,
                outside,
            } => {
                if inside != outside {
                    for f in circle_fractions(z0, z1, ComplexNumber::new(0.0, 0.0), *radius) {
                        offer(f);
                    }
                }
            }
            Seabed::RadialProfile { profile } => {
                for u in jumps(profile).into_iter().filter(|&u| u > 0.0) {
                    for f in circle_fractions(z0, z1, ComplexNumber::new(0.0, 0.0), u.sqrt()) {
                        offer(f);
                    }
                }
            }
            Seabed::ArcMirror {
                center,
                radius,
                below,
                above,
            } => {
                if below != above {
                    for f in circle_fractions(z0, z1, *center, *radius) {
                        let p = z0 + (z1 - z0) * f;
                        if p.im >= center.im {
                            offer(f);
                        }
                    }
                    if let Some(f) = line_fraction(z0.im, z1.im, center.im) {
                        let p = z0 + (z1 - z0) * f;
                        if (p.re - center.re).abs() >= *radius {
                            offer(f);
                        }
                    }
                }
            }
        }
        best
    }

    /// Discontinuity and kink loci, for drawing.
    pub fn loci(&self) -> Vec<Locus> {
        match self {
            Seabed::Constant { .. } | Seabed::LinearOfIm { .. } => Vec::new(),
            Seabed::ProfileOfIm { profile } => profile
                .breakpoints
                .iter()
                .map(|&b| Locus::Horizontal(b))
                .collect(),
            Seabed::ProfileOfRe { profile } => profile
                .breakpoints
                .iter()
                .map(|&b| Locus::Vertical(b))
                .collect(),
            Seabed::ProfileOfAbsIm { profile } => {
                let mut out = vec![Locus::Horizontal(0.0)];
                for &b in profile.breakpoints.iter().filter(|&&b| b > 0.0) {
                    out.push(Locus::Horizontal(b));
                    out.push(Locus::Horizontal(-b));
                }
                out
            }
            Seabed::RadialStep { radius, .. } => vec![Locus::Circle {
                center: ComplexNumber::new(0.0, 0.0),
                radius: *radius,
            }],
            Seabed::RadialProfile { profile } => profile
                .breakpoints
                .iter()
                .filter(|&&u| u > 0.0)
                .map(|&u| Locus::Circle {
                    center: ComplexNumber::new(0.0, 0.0),
                    radius: u.sqrt(),
                })
                .collect(),
            Seabed::ArcMirror { center, radius, .. } => vec![Locus::UpperArc {
                center: *center,
                radius: *radius,
            }],
        }
    }
}

/// Geometry of a region boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Locus {
    Horizontal(f64),
    Vertical(f64),
    Circle {
        center: ComplexNumber,
        radius: f64,
    },
    /// Upper half circle plus the horizontal rays continuing it.
    UpperArc {
        center: ComplexNumber,
        radius: f64,
    },
}

fn line_fraction(a: f64, b: f64, level: f64) -> Option<f64> {
    let crosses = (a < level && b >= level) || (a >= level && b < level);
    if !crosses || a == b {
        return None;
    }
    Some(((level - a) / (b - a)).clamp(f64::MIN_POSITIVE, 1.0))
}

fn circle_fractions(
    z0: ComplexNumber,
    z1: ComplexNumber,
    center: ComplexNumber,
    radius: f64,
) -> Vec<f64> {
    let d = z1 - z0;
    let w = z0 - center;
    let a = d.norm_sqr();
    if a == 0.0 {
        return Vec::new();
    }
    let b = 2.0 * (w.re * d.re + w.im * d.im);
    let c = w.norm_sqr() - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // numerically stable pair of roots
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = Vec::with_capacity(2);
    if q != 0.0 {
        roots.push(q / a);
        roots.push(c / q);
    } else {
        roots.push(0.0);
    }
    roots.retain(|f| *f > 0.0 && *f <= 1.0);
    roots.sort_by(f64::total_cmp);
    roots
}

/// Named seabeds used by the shipped experiment presets.
pub fn preset(name: &str) -> Option<Seabed> {
    let ramp = |start, end, from, to| {
        PiecewiseLinearProfile::ramp(start, end, from, to).expect("preset ramp is valid")
    };
    Some(match name {
        "snell-step" | "abrupt-step" => Seabed::horizontal_step(0.0, 1.0, 2.0),
        "mirror-step" => Seabed::horizontal_step(0.0, -1.0, 1.0),
        "leapfrog-step" => Seabed::vertical_step(0.0, 1.0, 3.0),
        "leapfrog-bump" => Seabed::RadialProfile {
            profile: ramp(0.81, 1.21, 2.0, 1.0),
        },
        "rainbow-disk" => Seabed::RadialStep {
            radius: 0.5,
            inside: 2.0,
            outside: 1.0,
        },
        "linear-seabed" => Seabed::LinearOfIm {
            slope: 1.0,
            offset: 0.0,
        },
        "sloped-step" => Seabed::ProfileOfIm {
            profile: ramp(0.0, 1.0, 1.0, 2.0),
        },
        "gentle-step" => Seabed::ProfileOfIm {
            profile: ramp(0.0, 2.0, 1.0, 2.0),
        },
        "soft-mirror" => Seabed::ProfileOfIm {
            profile: ramp(0.0, 2.0, -1.0, 1.0),
        },
        "trough" => Seabed::ProfileOfAbsIm {
            profile: PiecewiseLinearProfile::affine(1.0, -2.0),
        },
        "caustic-arc" => Seabed::ArcMirror {
            center: ComplexNumber::new(0.0, 0.0),
            radius: 2.0,
            below: -1.0,
            above: 1.0,
        },
        _ => return None,
    })
}
