//! Preset coefficient functions h and k with the pointwise and asymptotic
//! data the theory queries, plus hypothesis checkers.
//!
//! Coefficients are finite sums of atoms, each radially symmetric about its
//! own center, over a constant baseline; every integral against bubble
//! fields then reduces to the cross-center quadrature. Flat-top peak atoms
//! are built as height·(1-(r/w)^θ)₊², so the flatness exponent θ is a
//! constructor parameter rather than an estimated quantity and peak supports
//! stay compact and disjoint.

mod hypotheses;

pub use hypotheses::{check_h_hypotheses, check_k_hypotheses, HypothesisEntry, HypothesisReport};

use crate::error::{Error, Result};
use crate::fields::ground_state;
use crate::quadrature::{distance, integrate_structured, RadialGrid, Structure};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radial atom shapes. `value` and the radial derivative are analytic.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AtomKind {
    /// amp · r^p / (1 + r^{2p}): grows like r^p near 0, decays like r^{-p}.
    PowerBump { amplitude: f64, exponent: f64 },
    /// amp · r^p / (1 + r^p): bounded, strictly increasing.
    PowerRamp { amplitude: f64, exponent: f64 },
    /// amp · exp(-r²/2w²).
    Gaussian { amplitude: f64, width: f64 },
    /// amp · max(0, 1 - (r/w)^θ)²: compact support, C¹, flat-top order θ.
    FlatTop {
        amplitude: f64,
        width: f64,
        theta: f64,
    },
    /// η(r)(1 - |sin(1/(r-1/2))|^θ) on (0,1], exponential decay beyond 1;
    /// maxima accumulate at r = 1/2.
    OscillatoryShell { theta: f64, decay: f64 },
}

impl AtomKind {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            AtomKind::PowerBump {
                amplitude,
                exponent,
            } => {
                let y = r.powf(exponent);
                amplitude * y / (1.0 + y * y)
            }
            AtomKind::PowerRamp {
                amplitude,
                exponent,
            } => {
                let y = r.powf(exponent);
                amplitude * y / (1.0 + y)
            }
            AtomKind::Gaussian { amplitude, width } => {
                amplitude * (-r * r / (2.0 * width * width)).exp()
            }
            AtomKind::FlatTop {
                amplitude,
                width,
                theta,
            } => {
                let s = r / width;
                if s >= 1.0 {
                    0.0
                } else {
                    let b = 1.0 - s.powf(theta);
                    amplitude * b * b
                }
            }
            AtomKind::OscillatoryShell { theta, decay } => oscillatory_shell(r, theta, decay),
        }
    }

    /// d(value)/dr.
    pub fn dvalue(&self, r: f64) -> f64 {
        match *self {
            AtomKind::PowerBump {
                amplitude,
                exponent,
            } => {
                if r == 0.0 {
                    return if exponent > 1.0 { 0.0 } else { f64::NAN };
                }
                let y = r.powf(exponent);
                let q = 1.0 + y * y;
                amplitude * exponent * y / r * (1.0 - y * y) / (q * q)
            }
            AtomKind::PowerRamp {
                amplitude,
                exponent,
            } => {
                if r == 0.0 {
                    return if exponent > 1.0 { 0.0 } else { f64::NAN };
                }
                let y = r.powf(exponent);
                let q = 1.0 + y;
                amplitude * exponent * y / (r * q * q)
            }
            AtomKind::Gaussian { amplitude, width } => {
                let w2 = width * width;
                -amplitude * r / w2 * (-r * r / (2.0 * w2)).exp()
            }
            AtomKind::FlatTop {
                amplitude,
                width,
                theta,
            } => {
                let s = r / width;
                if s >= 1.0 || r == 0.0 {
                    0.0
                } else {
                    let b = 1.0 - s.powf(theta);
                    -2.0 * amplitude * b * theta * s.powf(theta - 1.0) / width
                }
            }
            AtomKind::OscillatoryShell { .. } => f64::NAN,
        }
    }

    pub fn differentiable(&self) -> bool {
        !matches!(self, AtomKind::OscillatoryShell { .. })
    }

    /// Upper bound for |value| at all radii ≥ r.
    pub fn tail_bound(&self, r: f64) -> f64 {
        match *self {
            AtomKind::PowerBump { amplitude, .. } => {
                if r <= 1.0 {
                    amplitude.abs() * 0.5
                } else {
                    self.value(r).abs()
                }
            }
            AtomKind::PowerRamp { amplitude, .. } => amplitude.abs(),
            AtomKind::Gaussian { .. } => self.value(r).abs(),
            AtomKind::FlatTop {
                amplitude, width, ..
            } => {
                if r >= width {
                    0.0
                } else {
                    amplitude.abs()
                }
            }
            AtomKind::OscillatoryShell { theta, decay } => {
                if r <= 1.0 {
                    1.0
                } else {
                    oscillatory_envelope(theta) * (-decay * (r - 1.0)).exp()
                }
            }
        }
    }
}

/// Smoothstep cutoff η with η(0) = 0, η(r) = 1 for r ≥ 1/2.
fn eta(r: f64) -> f64 {
    let t = (2.0 * r).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

fn oscillatory_shell(r: f64, theta: f64, decay: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if r > 1.0 {
        // Continuous extension: value at r = 1 with exponential decay.
        return oscillatory_envelope(theta) * (-decay * (r - 1.0)).exp();
    }
    if (r - 0.5).abs() < 1e-300 {
        return 0.0;
    }
    eta(r) * (1.0 - (1.0 / (r - 0.5)).sin().abs().powf(theta))
}

/// Value of the oscillatory shell at r = 1: 1 - |sin 2|^θ.
fn oscillatory_envelope(theta: f64) -> f64 {
    1.0 - 2.0_f64.sin().abs().powf(theta)
}

/// Where the sup of a coefficient is attained.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaximaSet {
    /// Finitely many points (hypothesis (K1) setting).
    Finite { points: Vec<Vec<f64>> },
    /// A sphere of maxima (radial profiles); a representative point is given.
    Sphere { radius: f64 },
    /// Infinitely many maxima accumulating at finite distance (k₁-type);
    /// representative radii r_n = 1/2 + 1/(nπ).
    InfiniteShells { representative_radii: Vec<f64> },
    /// Constant profile: attained everywhere.
    Everywhere,
}

impl MaximaSet {
    pub fn finite_points(&self) -> Option<&[Vec<f64>]> {
        match self {
            MaximaSet::Finite { points } => Some(points),
            _ => None,
        }
    }
}

/// A preset coefficient function: constant baseline plus radial atoms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientProfile {
    pub dimension: u32,
    pub preset: String,
    baseline: f64,
    atoms: Vec<(Vec<f64>, AtomKind)>,
    value_at_zero: f64,
    limit_at_infinity: f64,
    sup_norm: f64,
    sup_value: f64,
    inf_value: f64,
    maxima: MaximaSet,
    radial: bool,
    differentiable: bool,
    theta: Option<f64>,
}

impl CoefficientProfile {
    pub fn value_at(&self, x: &[f64]) -> f64 {
        let mut v = self.baseline;
        for (c, kind) in &self.atoms {
            v += kind.value(distance(x, c));
        }
        v
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    /// limsup of the coefficient as |x| → ∞.
    pub fn limsup_at_infinity(&self) -> f64 {
        self.limit_at_infinity
    }

    /// sup |value|.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// sup of the value (equals `sup_norm` for nonnegative coefficients).
    pub fn sup_value(&self) -> f64 {
        self.sup_value
    }

    pub fn inf_value(&self) -> f64 {
        self.inf_value
    }

    pub fn maxima_set(&self) -> &MaximaSet {
        &self.maxima
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn is_differentiable(&self) -> bool {
        self.differentiable
    }

    pub fn is_constant(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn atoms(&self) -> &[(Vec<f64>, AtomKind)] {
        &self.atoms
    }

    /// Flat-top exponent θ when the preset declares one.
    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// ⟨∇coeff(x), x⟩ for differentiable presets.
    pub fn pohozaev_density(&self, x: &[f64]) -> Result<f64> {
        if !self.differentiable {
            return Err(Error::NondifferentiablePreset(self.preset.clone()));
        }
        let mut total = 0.0;
        for (c, kind) in &self.atoms {
            let r = distance(x, c);
            if r < 1e-14 {
                continue;
            }
            // ∇ of a radial atom about c, dotted with x:
            // atom'(r) (x-c)·x / r.
            let dot: f64 = x.iter().zip(c).map(|(xi, ci)| (xi - ci) * xi).sum();
            total += kind.dvalue(r) * dot / r;
        }
        Ok(total)
    }

    /// Upper bound for sup_{|x|>r} |value|.
    pub fn tail_bound(&self, r: f64) -> f64 {
        let mut bound = self.baseline.abs();
        for (c, kind) in &self.atoms {
            let center_norm = crate::quadrature::distance(c, &vec![0.0; c.len()]);
            let beyond = (r - center_norm).max(0.0);
            bound += kind.tail_bound(beyond);
        }
        bound
    }
}

/// h-coefficient presets (perturbation of the Hardy term).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum HPreset {
    Constant {
        value: f64,
    },
    Zero,
    /// h(0) + c₁|x|^p capped smoothly, with an optional negative dip at
    /// unit scale (exponent must exceed p so the near-zero growth wins).
    BumpNearZero {
        h0: f64,
        c1: f64,
        exponent: f64,
        #[serde(default)]
        dip_amplitude: f64,
        #[serde(default = "default_dip_exponent")]
        dip_exponent: f64,
    },
    /// h(∞) + c₂|x|^{-p} for large |x|.
    BumpAtInfinity {
        h_inf: f64,
        c2: f64,
        exponent: f64,
    },
    /// Bounded, strictly increasing radial profile (Pohozaev tests).
    RadialPower {
        amplitude: f64,
        exponent: f64,
    },
    GaussianBump {
        center: Vec<f64>,
        width: f64,
        height: f64,
    },
}

fn default_dip_exponent() -> f64 {
    1.5
}

/// k-coefficient presets (perturbation of the critical nonlinearity).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum KPreset {
    ConstantOne,
    /// Two flat-top peaks of equal height at ±(distance, 0, …).
    TwoPeak {
        #[serde(default = "default_peak_distance")]
        distance: f64,
        #[serde(default = "default_peak_width")]
        width: f64,
        #[serde(default = "default_peak_height")]
        height: f64,
        theta: f64,
        #[serde(default)]
        floor: f64,
    },
    /// `count` flat-top peaks on a regular polygon of the given radius in
    /// the first two coordinates.
    MPeak {
        count: usize,
        #[serde(default = "default_peak_distance")]
        radius: f64,
        #[serde(default = "default_peak_width")]
        width: f64,
        #[serde(default = "default_peak_height")]
        height: f64,
        theta: f64,
        #[serde(default)]
        floor: f64,
    },
    /// The oscillatory example with infinitely many maxima r_n = 1/2 + 1/(nπ).
    K1Example {
        theta: f64,
        #[serde(default = "default_k1_decay")]
        decay: f64,
    },
    /// Sign-changing: flat-top peaks plus a negative flat-top well at the
    /// origin over a positive floor.
    SignChanging {
        #[serde(default = "default_peak_distance")]
        distance: f64,
        #[serde(default = "default_peak_width")]
        width: f64,
        #[serde(default = "default_peak_height")]
        height: f64,
        theta: f64,
        well_depth: f64,
        #[serde(default = "default_peak_width")]
        well_width: f64,
        floor: f64,
    },
    /// k(0) + c₁|x|^p capped smoothly (radial existence condition tests).
    BumpNearZero {
        k0: f64,
        c1: f64,
        exponent: f64,
    },
}

fn default_peak_distance() -> f64 {
    2.0
}
fn default_peak_width() -> f64 {
    1.0
}
fn default_peak_height() -> f64 {
    1.0
}
fn default_k1_decay() -> f64 {
    1.0
}

/// Radial 1-D maximization of the atom sum on a dense log grid with golden
/// refinement; returns (argmax radius, max value).
fn radial_scan_max(profile_value: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut best = (0.0, profile_value(1e-12));
    let m = 4000;
    for i in 0..=m {
        let r = 10f64.powf(-8.0 + 16.0 * i as f64 / m as f64);
        let v = profile_value(r);
        if v > best.1 {
            best = (r, v);
        }
    }
    // Golden-section refinement around the best sample.
    let ratio = 10f64.powf(16.0 / m as f64);
    let (mut a, mut b) = (best.0 / ratio, best.0 * ratio);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..120 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if profile_value(c) >= profile_value(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let r = 0.5 * (a + b);
    let v = profile_value(r);
    if v >= best.1 {
        (r, v)
    } else {
        best
    }
}

fn radial_scan_min(profile_value: impl Fn(f64) -> f64) -> f64 {
    -radial_scan_max(|r| -profile_value(r)).1
}

fn build_profile(
    dimension: u32,
    preset: String,
    baseline: f64,
    atoms: Vec<(Vec<f64>, AtomKind)>,
    maxima: MaximaSet,
    theta: Option<f64>,
    limits: (f64, f64),
) -> CoefficientProfile {
    let radial = atoms.iter().all(|(c, _)| c.iter().all(|v| *v == 0.0));
    let differentiable = atoms.iter().all(|(_, k)| k.differentiable());
    let origin = vec![0.0; dimension as usize];
    let value_at_zero = {
        let mut v = baseline;
        for (c, kind) in &atoms {
            v += kind.value(distance(&origin, c));
        }
        v
    };
    // sup over the atoms' joint landscape.
    let (sup_value, inf_value) = if radial {
        let f = |r: f64| {
            let mut v = baseline;
            for (_, kind) in &atoms {
                v += kind.value(r);
            }
            v
        };
        let (_, sup) = radial_scan_max(f);
        (sup.max(limits.0).max(limits.1), radial_scan_min(f))
    } else {
        // Disjoint compact atoms: extremes are at atom centers or baseline.
        let mut sup = baseline.max(value_at_zero);
        let mut inf = baseline.min(value_at_zero);
        for (c, _) in &atoms {
            let v = {
                let mut v = baseline;
                for (c2, kind) in &atoms {
                    v += kind.value(distance(c, c2));
                }
                v
            };
            sup = sup.max(v);
            inf = inf.min(v);
        }
        (sup, inf)
    };
    CoefficientProfile {
        dimension,
        preset,
        baseline,
        atoms,
        value_at_zero,
        limit_at_infinity: limits.1,
        sup_norm: sup_value.abs().max(inf_value.abs()),
        sup_value,
        inf_value,
        maxima,
        radial,
        differentiable,
        theta,
    }
}

/// Build an h preset.
pub fn make_h_preset(preset: &HPreset, dimension: u32) -> Result<CoefficientProfile> {
    if dimension < 3 {
        return Err(Error::DimensionTooSmall { dimension });
    }
    let origin = vec![0.0; dimension as usize];
    match preset {
        HPreset::Constant { value } => Ok(build_profile(
            dimension,
            "constant".into(),
            *value,
            vec![],
            MaximaSet::Everywhere,
            None,
            (*value, *value),
        )),
        HPreset::Zero => Ok(build_profile(
            dimension,
            "zero".into(),
            0.0,
            vec![],
            MaximaSet::Everywhere,
            None,
            (0.0, 0.0),
        )),
        HPreset::BumpNearZero {
            h0,
            c1,
            exponent,
            dip_amplitude,
            dip_exponent,
        } => {
            if *c1 <= 0.0 || *exponent <= 0.0 {
                return Err(Error::InvalidParams(
                    "bump_near_zero needs c1 > 0 and exponent > 0".into(),
                ));
            }
            if *dip_amplitude != 0.0 && *dip_exponent <= *exponent {
                return Err(Error::InvalidParams(
                    "dip_exponent must exceed the near-zero exponent".into(),
                ));
            }
            let mut atoms = vec![(
                origin.clone(),
                AtomKind::PowerBump {
                    amplitude: *c1,
                    exponent: *exponent,
                },
            )];
            if *dip_amplitude != 0.0 {
                atoms.push((
                    origin.clone(),
                    AtomKind::PowerBump {
                        amplitude: -*dip_amplitude,
                        exponent: *dip_exponent,
                    },
                ));
            }
            let f = {
                let atoms = atoms.clone();
                let h0 = *h0;
                move |r: f64| {
                    let mut v = h0;
                    for (_, kind) in &atoms {
                        v += kind.value(r);
                    }
                    v
                }
            };
            let (rmax, _) = radial_scan_max(f);
            Ok(build_profile(
                dimension,
                "bump_near_zero".into(),
                *h0,
                atoms,
                MaximaSet::Sphere { radius: rmax },
                None,
                (*h0, *h0),
            ))
        }
        HPreset::BumpAtInfinity { h_inf, c2, exponent } => {
            if *c2 <= 0.0 || *exponent <= 0.0 {
                return Err(Error::InvalidParams(
                    "bump_at_infinity needs c2 > 0 and exponent > 0".into(),
                ));
            }
            let atoms = vec![(
                origin.clone(),
                AtomKind::PowerBump {
                    amplitude: *c2,
                    exponent: *exponent,
                },
            )];
            Ok(build_profile(
                dimension,
                "bump_at_infinity".into(),
                *h_inf,
                atoms,
                MaximaSet::Sphere { radius: 1.0 },
                None,
                (*h_inf, *h_inf),
            ))
        }
        HPreset::RadialPower {
            amplitude,
            exponent,
        } => {
            if *exponent < 0.0 {
                return Err(Error::InvalidParams("exponent must be >= 0".into()));
            }
            let atoms = vec![(
                origin.clone(),
                AtomKind::PowerRamp {
                    amplitude: *amplitude,
                    exponent: *exponent,
                },
            )];
            let hinf = *amplitude;
            Ok(build_profile(
                dimension,
                "radial_power".into(),
                0.0,
                atoms,
                MaximaSet::Sphere { radius: f64::INFINITY },
                None,
                (0.0, hinf),
            ))
        }
        HPreset::GaussianBump {
            center,
            width,
            height,
        } => {
            if *width <= 0.0 {
                return Err(Error::InvalidParams("width must be positive".into()));
            }
            let mut c = center.clone();
            c.resize(dimension as usize, 0.0);
            let atoms = vec![(
                c.clone(),
                AtomKind::Gaussian {
                    amplitude: *height,
                    width: *width,
                },
            )];
            Ok(build_profile(
                dimension,
                "gaussian_bump".into(),
                0.0,
                atoms,
                MaximaSet::Finite { points: vec![c] },
                None,
                (0.0, 0.0),
            ))
        }
    }
}

/// Build a k preset.
pub fn make_k_preset(preset: &KPreset, dimension: u32) -> Result<CoefficientProfile> {
    if dimension < 3 {
        return Err(Error::DimensionTooSmall { dimension });
    }
    let nf = dimension as f64;
    let check_theta = |theta: f64| -> Result<()> {
        if theta <= 2.0 || theta >= nf {
            Err(Error::ThetaOutOfRange {
                theta,
                dimension,
            })
        } else {
            Ok(())
        }
    };
    match preset {
        KPreset::ConstantOne => Ok(build_profile(
            dimension,
            "constant_one".into(),
            1.0,
            vec![],
            MaximaSet::Everywhere,
            None,
            (1.0, 1.0),
        )),
        KPreset::TwoPeak {
            distance,
            width,
            height,
            theta,
            floor,
        } => {
            check_theta(*theta)?;
            if !(*distance > *width && *width > 0.0 && *height > 0.0 && *floor >= 0.0) {
                return Err(Error::InvalidParams(
                    "two_peak needs distance > width > 0, height > 0, floor >= 0".into(),
                ));
            }
            let mut a1 = vec![0.0; dimension as usize];
            let mut a2 = vec![0.0; dimension as usize];
            a1[0] = *distance;
            a2[0] = -*distance;
            let kind = AtomKind::FlatTop {
                amplitude: *height,
                width: *width,
                theta: *theta,
            };
            let atoms = vec![(a1.clone(), kind.clone()), (a2.clone(), kind)];
            Ok(build_profile(
                dimension,
                "two_peak".into(),
                *floor,
                atoms,
                MaximaSet::Finite {
                    points: vec![a1, a2],
                },
                Some(*theta),
                (*floor, *floor),
            ))
        }
        KPreset::MPeak {
            count,
            radius,
            width,
            height,
            theta,
            floor,
        } => {
            check_theta(*theta)?;
            if *count < 1 {
                return Err(Error::InvalidParams("count must be >= 1".into()));
            }
            let min_sep = if *count > 1 {
                2.0 * radius * (PI / *count as f64).sin()
            } else {
                f64::INFINITY
            };
            if !(*radius > *width && min_sep > 2.0 * *width && *width > 0.0 && *height > 0.0) {
                return Err(Error::InvalidParams(
                    "m_peak peaks must be disjoint and exclude the origin".into(),
                ));
            }
            let kind = AtomKind::FlatTop {
                amplitude: *height,
                width: *width,
                theta: *theta,
            };
            let mut atoms = Vec::new();
            let mut points = Vec::new();
            for j in 0..*count {
                let ang = 2.0 * PI * j as f64 / *count as f64;
                let mut c = vec![0.0; dimension as usize];
                c[0] = radius * ang.cos();
                c[1] = radius * ang.sin();
                atoms.push((c.clone(), kind.clone()));
                points.push(c);
            }
            Ok(build_profile(
                dimension,
                "m_peak".into(),
                *floor,
                atoms,
                MaximaSet::Finite { points },
                Some(*theta),
                (*floor, *floor),
            ))
        }
        KPreset::K1Example { theta, decay } => {
            check_theta(*theta)?;
            if *decay <= 0.0 {
                return Err(Error::InvalidParams("decay must be positive".into()));
            }
            let origin = vec![0.0; dimension as usize];
            let atoms = vec![(
                origin,
                AtomKind::OscillatoryShell {
                    theta: *theta,
                    decay: *decay,
                },
            )];
            let representative_radii: Vec<f64> =
                (1..=8).map(|n| 0.5 + 1.0 / (n as f64 * PI)).collect();
            Ok(build_profile(
                dimension,
                "k1_example".into(),
                0.0,
                atoms,
                MaximaSet::InfiniteShells {
                    representative_radii,
                },
                Some(*theta),
                (0.0, 0.0),
            ))
        }
        KPreset::SignChanging {
            distance,
            width,
            height,
            theta,
            well_depth,
            well_width,
            floor,
        } => {
            check_theta(*theta)?;
            if !(*distance > width + well_width && *well_depth > *floor && *floor > 0.0) {
                return Err(Error::InvalidParams(
                    "sign_changing needs disjoint well/peaks, well_depth > floor > 0".into(),
                ));
            }
            let mut a1 = vec![0.0; dimension as usize];
            let mut a2 = vec![0.0; dimension as usize];
            a1[0] = *distance;
            a2[0] = -*distance;
            let peak = AtomKind::FlatTop {
                amplitude: *height,
                width: *width,
                theta: *theta,
            };
            let well = AtomKind::FlatTop {
                amplitude: -*well_depth,
                width: *well_width,
                theta: *theta,
            };
            let atoms = vec![
                (a1.clone(), peak.clone()),
                (a2.clone(), peak),
                (vec![0.0; dimension as usize], well),
            ];
            Ok(build_profile(
                dimension,
                "sign_changing".into(),
                *floor,
                atoms,
                MaximaSet::Finite {
                    points: vec![a1, a2],
                },
                Some(*theta),
                (*floor - *well_depth, *floor),
            ))
        }
        KPreset::BumpNearZero { k0, c1, exponent } => {
            if *c1 <= 0.0 || *exponent <= 0.0 || *k0 < 0.0 {
                return Err(Error::InvalidParams(
                    "bump_near_zero needs k0 >= 0, c1 > 0, exponent > 0".into(),
                ));
            }
            let origin = vec![0.0; dimension as usize];
            let atoms = vec![(
                origin,
                AtomKind::PowerBump {
                    amplitude: *c1,
                    exponent: *exponent,
                },
            )];
            Ok(build_profile(
                dimension,
                "bump_near_zero".into(),
                *k0,
                atoms,
                MaximaSet::Sphere { radius: 1.0 },
                None,
                (*k0, *k0),
            ))
        }
    }
}

/// ∫ (h(x) - H) w_μ²/|x|² dx with H = max{h(0), h(∞)} and w_μ the ground
/// state at coupling A + H; a positive value certifies the mountain-pass
/// existence condition at this μ.
pub fn condition_h_integral(
    h: &CoefficientProfile,
    coupling: f64,
    dimension: u32,
    mu: f64,
    grid: &RadialGrid,
    angular_order: usize,
) -> Result<f64> {
    let big_h = h.value_at_zero().max(h.limsup_at_infinity());
    let lam = (dimension as f64 - 2.0).powi(2) / 4.0;
    let shifted = coupling + big_h;
    if !(shifted > 0.0 && shifted < lam) {
        return Err(Error::CouplingOutOfRange {
            value: shifted,
            lo: 0.0,
            hi: lam,
        });
    }
    let w = ground_state(dimension, shifted, mu)?;
    let profile = w.bubbles[0].profile.clone();
    let origin = vec![0.0; dimension as usize];

    let mut st = Structure::new(dimension);
    st.point(&origin, true);
    for (c, _) in h.atoms() {
        st.point(c, false);
    }
    let integrand = move |x: &[f64]| {
        let r = distance(x, &origin);
        let wv = profile.value(r);
        (h.value_at(x) - big_h) * wv * wv / (r * r)
    };
    integrate_structured(grid, angular_order, &st, &integrand)
}

/// ∫ (k(x) - max{k(0), k(∞)}) w_μ^{2*} dx with w_μ the ground state of the
/// unperturbed problem at coupling λ.
pub fn condition_k_integral(
    k: &CoefficientProfile,
    lambda: f64,
    dimension: u32,
    mu: f64,
    grid: &RadialGrid,
    angular_order: usize,
) -> Result<f64> {
    let lam = (dimension as f64 - 2.0).powi(2) / 4.0;
    if !(lambda > 0.0 && lambda < lam) {
        return Err(Error::CouplingOutOfRange {
            value: lambda,
            lo: 0.0,
            hi: lam,
        });
    }
    let w = ground_state(dimension, lambda, mu)?;
    let profile = w.bubbles[0].profile.clone();
    let origin = vec![0.0; dimension as usize];
    let m = k.value_at_zero().max(k.limsup_at_infinity());
    let p = crate::critical_exponent(dimension);

    let mut st = Structure::new(dimension);
    st.point(&origin, true);
    for (c, _) in k.atoms() {
        st.point(c, false);
    }
    let integrand = move |x: &[f64]| {
        let r = distance(x, &origin);
        (k.value_at(x) - m) * profile.value(r).powf(p)
    };
    integrate_structured(grid, angular_order, &st, &integrand)
}
