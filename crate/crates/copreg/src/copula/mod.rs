//! Parametric bivariate copula families: densities, CDFs, conditional
//! (h-)functions and their inverses, sampling by conditional inversion,
//! and population Kendall's tau.
//!
//! Rotations follow the convention of the vine-copula software ecosystem:
//! the 180 degree rotation is the survival copula with density
//! `c(1-u, 1-v)`, the 90 degree rotation has density `c(1-u, v)` and the
//! 270 degree rotation `c(u, 1-v)`.

mod bb;
mod families;
mod tau;

use crate::error::{Error, Result};
use crate::rng::SeedStream;

use bb::{BbGenerator, BbKind};
use families::{BaseCopula, UNIT_EPS};

pub use tau::{empirical_tau, spec_from_tau};

/// Tag for every supported parametric family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    Independence,
    Gaussian,
    StudentT,
    Clayton,
    Gumbel,
    Frank,
    Joe,
    Amh,
    /// Clayton-Gumbel.
    Bb1,
    /// Joe-Gumbel.
    Bb6,
    /// Joe-Clayton.
    Bb7,
    /// Joe-Frank.
    Bb8,
    /// Mixture of two Gaussian copulas with estimated mixing weight.
    GaussMix2,
}

impl FamilyId {
    pub const ALL: [FamilyId; 13] = [
        FamilyId::Independence,
        FamilyId::Gaussian,
        FamilyId::StudentT,
        FamilyId::Clayton,
        FamilyId::Gumbel,
        FamilyId::Frank,
        FamilyId::Joe,
        FamilyId::Amh,
        FamilyId::Bb1,
        FamilyId::Bb6,
        FamilyId::Bb7,
        FamilyId::Bb8,
        FamilyId::GaussMix2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Independence => "indep",
            FamilyId::Gaussian => "gaussian",
            FamilyId::StudentT => "t",
            FamilyId::Clayton => "clayton",
            FamilyId::Gumbel => "gumbel",
            FamilyId::Frank => "frank",
            FamilyId::Joe => "joe",
            FamilyId::Amh => "amh",
            FamilyId::Bb1 => "bb1",
            FamilyId::Bb6 => "bb6",
            FamilyId::Bb7 => "bb7",
            FamilyId::Bb8 => "bb8",
            FamilyId::GaussMix2 => "gaussmix2",
        }
    }

    pub fn n_params(self) -> usize {
        match self {
            FamilyId::Independence => 0,
            FamilyId::Gaussian
            | FamilyId::Clayton
            | FamilyId::Gumbel
            | FamilyId::Frank
            | FamilyId::Joe
            | FamilyId::Amh => 1,
            FamilyId::StudentT | FamilyId::Bb1 | FamilyId::Bb6 | FamilyId::Bb7 | FamilyId::Bb8 => 2,
            FamilyId::GaussMix2 => 3,
        }
    }

    /// Finite numeric parameter box used for validation and optimization.
    pub fn param_space(self) -> ParamSpace {
        let (lower, upper): (Vec<f64>, Vec<f64>) = match self {
            FamilyId::Independence => (vec![], vec![]),
            FamilyId::Gaussian => (vec![-0.9999], vec![0.9999]),
            FamilyId::StudentT => (vec![-0.9999, 2.001], vec![0.9999, 30.0]),
            FamilyId::Clayton => (vec![1e-4], vec![28.0]),
            FamilyId::Gumbel => (vec![1.0 + 1e-6], vec![17.0]),
            FamilyId::Frank => (vec![-35.0], vec![35.0]),
            FamilyId::Joe => (vec![1.0 + 1e-6], vec![30.0]),
            FamilyId::Amh => (vec![-1.0 + 1e-6], vec![1.0 - 1e-6]),
            FamilyId::Bb1 => (vec![1e-4, 1.0 + 1e-6], vec![7.0, 7.0]),
            FamilyId::Bb6 => (vec![1.0 + 1e-6, 1.0 + 1e-6], vec![6.0, 6.0]),
            FamilyId::Bb7 => (vec![1.0 + 1e-6, 1e-4], vec![6.0, 25.0]),
            FamilyId::Bb8 => (vec![1.0 + 1e-6, 1e-4], vec![8.0, 1.0 - 1e-6]),
            FamilyId::GaussMix2 => (
                vec![-0.9999, -0.9999, 1e-3],
                vec![0.9999, 0.9999, 1.0 - 1e-3],
            ),
        };
        ParamSpace { lower, upper }
    }

    pub fn parse(name: &str) -> Result<FamilyId> {
        FamilyId::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| {
                let valid: Vec<&str> = FamilyId::ALL.iter().map(|f| f.name()).collect();
                Error::Config(format!(
                    "unknown copula family '{name}'; valid families: {}",
                    valid.join(", ")
                ))
            })
    }
}

impl std::fmt::Display for FamilyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Counter-clockwise rotation applied to a base family. 180 degrees is the
/// survival copula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Rotation {
    #[default]
    R0,
    R90,
    R180,
    R270,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];

    pub fn degrees(self) -> u16 {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 90,
            Rotation::R180 => 180,
            Rotation::R270 => 270,
        }
    }

    pub fn parse(s: &str) -> Result<Rotation> {
        match s {
            "0" => Ok(Rotation::R0),
            "90" => Ok(Rotation::R90),
            "180" => Ok(Rotation::R180),
            "270" => Ok(Rotation::R270),
            _ => Err(Error::Config(format!(
                "unknown rotation '{s}'; valid rotations: 0, 90, 180, 270"
            ))),
        }
    }

    /// Sign carried over to Kendall's tau: 90/270 degree rotations flip
    /// the sign of the dependence, the survival rotation preserves it.
    fn tau_sign(self) -> f64 {
        match self {
            Rotation::R0 | Rotation::R180 => 1.0,
            Rotation::R90 | Rotation::R270 => -1.0,
        }
    }
}

impl std::fmt::Display for Rotation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.degrees())
    }
}

/// Open box of admissible parameters (clamped to finite numeric bounds).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParamSpace {
    pub fn contains(&self, params: &[f64]) -> bool {
        params.len() == self.lower.len()
            && params
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(p, (lo, hi))| p.is_finite() && *p >= *lo && *p <= *hi)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    pub fn clamp(&self, params: &mut [f64]) {
        for (p, (lo, hi)) in params.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *p = p.clamp(*lo, *hi);
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }
}

/// A fully specified parametric bivariate copula.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaSpec {
    family: FamilyId,
    rotation: Rotation,
    params: Vec<f64>,
}

impl CopulaSpec {
    /// Validate parameters against the family box and construct the spec.
    /// The Gaussian mixture is canonicalized to `rho1 <= rho2`.
    pub fn new(family: FamilyId, rotation: Rotation, mut params: Vec<f64>) -> Result<CopulaSpec> {
        let space = family.param_space();
        if params.len() != space.dim() {
            return Err(Error::InvalidParams {
                family: family.name().to_string(),
                detail: format!("expected {} parameters, got {}", space.dim(), params.len()),
            });
        }
        if family == FamilyId::GaussMix2 && params[0] > params[1] {
            params.swap(0, 1);
            params[2] = 1.0 - params[2];
        }
        if !space.contains(&params) {
            return Err(Error::InvalidParams {
                family: family.name().to_string(),
                detail: format!(
                    "parameters {params:?} outside the box {:?}..{:?}",
                    space.lower, space.upper
                ),
            });
        }
        Ok(CopulaSpec {
            family,
            rotation,
            params,
        })
    }

    pub fn independence() -> CopulaSpec {
        CopulaSpec {
            family: FamilyId::Independence,
            rotation: Rotation::R0,
            params: vec![],
        }
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn rotation(&self) -> Rotation {
        self.rotation
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Serialized label, e.g. `clayton@180` or `gaussian`.
    pub fn label(&self) -> String {
        match self.rotation {
            Rotation::R0 => self.family.name().to_string(),
            r => format!("{}@{}", self.family.name(), r.degrees()),
        }
    }

    /// Parse a `family[@rotation]` label into family and rotation tags.
    pub fn parse_label(label: &str) -> Result<(FamilyId, Rotation)> {
        match label.split_once('@') {
            None => Ok((FamilyId::parse(label)?, Rotation::R0)),
            Some((fam, rot)) => Ok((FamilyId::parse(fam)?, Rotation::parse(rot)?)),
        }
    }

    pub(crate) fn base(&self) -> BaseCopula {
        base_from(self.family, &self.params)
    }

    /// Copula density `c(u, v)` for interior points.
    pub fn density(&self, u: f64, v: f64) -> Result<f64> {
        check_interior(u)?;
        check_interior(v)?;
        let d = self.log_density(u, v).exp();
        if d.is_nan() {
            return Err(Error::Numeric(format!(
                "density of {} returned NaN at ({u}, {v})",
                self.label()
            )));
        }
        Ok(d)
    }

    /// Log density without domain checks; arguments must be interior.
    #[inline]
    pub fn log_density(&self, u: f64, v: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0);
        let (bu, bv) = rotate_point(self.rotation, u, v);
        self.base().log_density(bu, bv)
    }

    /// Joint CDF `C(u, v)` on the closed unit square.
    pub fn cdf(&self, u: f64, v: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "cdf arguments ({u}, {v}) outside [0,1]^2"
            )));
        }
        if u <= 0.0 || v <= 0.0 {
            return Ok(0.0);
        }
        if u >= 1.0 {
            return Ok(v);
        }
        if v >= 1.0 {
            return Ok(u);
        }
        let base = self.base();
        let c = match self.rotation {
            Rotation::R0 => base.cdf(u, v),
            Rotation::R90 => v - base.cdf(1.0 - u, v),
            Rotation::R180 => u + v - 1.0 + base.cdf(1.0 - u, 1.0 - v),
            Rotation::R270 => u - base.cdf(u, 1.0 - v),
        };
        Ok(c.clamp(0.0, 1.0))
    }

    /// Conditional CDF of `v` given the first coordinate `u`:
    /// `h(v | u) = dC(u, v)/du`.
    pub fn h_function(&self, v: f64, u: f64) -> Result<f64> {
        check_interior(u)?;
        check_interior(v)?;
        Ok(self.h_unchecked(v, u))
    }

    #[inline]
    pub(crate) fn h_unchecked(&self, v: f64, u: f64) -> f64 {
        let base = self.base();
        let h = match self.rotation {
            Rotation::R0 => base.h(v, u),
            Rotation::R90 => base.h(v, 1.0 - u),
            Rotation::R180 => 1.0 - base.h(1.0 - v, 1.0 - u),
            Rotation::R270 => 1.0 - base.h(1.0 - v, u),
        };
        h.clamp(0.0, 1.0)
    }

    /// Conditional CDF of `u` given the second coordinate `v`:
    /// `dC(u, v)/dv`. The base families are exchangeable, so this only
    /// differs from [`CopulaSpec::h_function`] for 90/270 degree rotations.
    pub fn h_given_second(&self, u: f64, v: f64) -> Result<f64> {
        check_interior(u)?;
        check_interior(v)?;
        let base = self.base();
        let h = match self.rotation {
            Rotation::R0 => base.h(u, v),
            Rotation::R90 => 1.0 - base.h(1.0 - u, v),
            Rotation::R180 => 1.0 - base.h(1.0 - u, 1.0 - v),
            Rotation::R270 => base.h(u, 1.0 - v),
        };
        Ok(h.clamp(0.0, 1.0))
    }

    /// Inverse of [`CopulaSpec::h_given_second`] in its first argument:
    /// the `u` with `dC(u, v)/dv = p` for fixed `v`.
    pub fn h_inverse_given_second(&self, p: f64, v: f64) -> Result<f64> {
        check_interior(p)?;
        check_interior(v)?;
        let (bp, bv, flip) = match self.rotation {
            Rotation::R0 => (p, v, false),
            Rotation::R90 => (1.0 - p, v, true),
            Rotation::R180 => (1.0 - p, 1.0 - v, true),
            Rotation::R270 => (p, 1.0 - v, false),
        };
        let base = self.base();
        let bu = base_h_inverse(&base, bp, bv)?;
        Ok(if flip { 1.0 - bu } else { bu })
    }

    /// Inverse of the h-function in its first argument: the `v` with
    /// `h(v | u) = p`, to an absolute tolerance of 1e-10 on the residual.
    pub fn h_inverse(&self, p: f64, u: f64) -> Result<f64> {
        check_interior(p)?;
        check_interior(u)?;
        let (bp, bu, flip) = match self.rotation {
            Rotation::R0 => (p, u, false),
            Rotation::R90 => (p, 1.0 - u, false),
            Rotation::R180 => (1.0 - p, 1.0 - u, true),
            Rotation::R270 => (1.0 - p, u, true),
        };
        let base = self.base();
        let bv = base_h_inverse(&base, bp, bu)?;
        Ok(if flip { 1.0 - bv } else { bv })
    }

    /// Draw `n` pairs by conditional inversion: `U ~ Uniform(0,1)`,
    /// `V = h^{-1}(W | U)` with `W ~ Uniform(0,1)`. Deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<(f64, f64)> {
        let mut stream = SeedStream::new(seed);
        (0..n)
            .map(|_| {
                let u = stream.uniform();
                let w = stream.uniform();
                let v = self
                    .h_inverse(w, u)
                    .expect("h_inverse converges for interior uniforms");
                (u, v)
            })
            .collect()
    }

    /// Population Kendall's tau.
    pub fn kendall_tau(&self) -> f64 {
        self.rotation.tau_sign() * tau::base_tau(&self.base())
    }

    /// Sum of log densities over a set of interior points.
    pub fn log_likelihood(&self, pairs: &[(f64, f64)]) -> Result<f64> {
        for &(u, v) in pairs {
            check_interior(u)?;
            check_interior(v)?;
        }
        let mut acc = 0.0;
        for &(u, v) in pairs {
            let l = self.log_density(u, v);
            if l.is_nan() {
                return Err(Error::Numeric(format!(
                    "log-density of {} is NaN at ({u}, {v})",
                    self.label()
                )));
            }
            acc += l;
        }
        Ok(acc)
    }
}

impl std::fmt::Display for CopulaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(", self.label())?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Map a point of the rotated copula to the base copula's coordinates.
#[inline]
fn rotate_point(rotation: Rotation, u: f64, v: f64) -> (f64, f64) {
    match rotation {
        Rotation::R0 => (u, v),
        Rotation::R90 => (1.0 - u, v),
        Rotation::R180 => (1.0 - u, 1.0 - v),
        Rotation::R270 => (u, 1.0 - v),
    }
}

#[inline]
fn check_interior(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "argument {x} not strictly inside (0,1)"
        )))
    }
}

pub(crate) fn base_from(family: FamilyId, params: &[f64]) -> BaseCopula {
    match family {
        FamilyId::Independence => BaseCopula::Independence,
        FamilyId::Gaussian => BaseCopula::Gaussian { rho: params[0] },
        FamilyId::StudentT => BaseCopula::StudentT {
            rho: params[0],
            nu: params[1],
        },
        FamilyId::Clayton => BaseCopula::Clayton { theta: params[0] },
        FamilyId::Gumbel => BaseCopula::Gumbel { theta: params[0] },
        FamilyId::Frank => BaseCopula::Frank { theta: params[0] },
        FamilyId::Joe => BaseCopula::Joe { theta: params[0] },
        FamilyId::Amh => BaseCopula::Amh { theta: params[0] },
        FamilyId::Bb1 => BaseCopula::Bb(BbGenerator {
            kind: BbKind::Bb1,
            theta: params[0],
            delta: params[1],
        }),
        FamilyId::Bb6 => BaseCopula::Bb(BbGenerator {
            kind: BbKind::Bb6,
            theta: params[0],
            delta: params[1],
        }),
        FamilyId::Bb7 => BaseCopula::Bb(BbGenerator {
            kind: BbKind::Bb7,
            theta: params[0],
            delta: params[1],
        }),
        FamilyId::Bb8 => BaseCopula::Bb(BbGenerator {
            kind: BbKind::Bb8,
            theta: params[0],
            delta: params[1],
        }),
        FamilyId::GaussMix2 => BaseCopula::GaussMix2 {
            rho1: params[0],
            rho2: params[1],
            pi: params[2],
        },
    }
}

/// Invert the base-family h-function: closed form where available, with a
/// residual check, otherwise safeguarded bisection (h is strictly
/// increasing in v).
fn base_h_inverse(base: &BaseCopula, p: f64, u: f64) -> Result<f64> {
    if let Some(v) = base.h_inv_closed(p, u) {
        let v = v.clamp(UNIT_EPS, 1.0 - UNIT_EPS);
        if v.is_finite() && (base.h(v, u) - p).abs() <= 1e-9 {
            return Ok(v);
        }
    }
    let mut lo = UNIT_EPS;
    let mut hi = 1.0 - UNIT_EPS;
    let h_lo = base.h(lo, u);
    let h_hi = base.h(hi, u);
    if !h_lo.is_finite() || !h_hi.is_finite() {
        return Err(Error::Numeric(format!(
            "h-function not finite while inverting at p={p}, u={u}"
        )));
    }
    // Roots outside the representable open interval saturate at the clamp.
    if p <= h_lo {
        return Ok(lo);
    }
    if p >= h_hi {
        return Ok(hi);
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let hm = base.h(mid, u);
        if !hm.is_finite() {
            return Err(Error::Numeric(format!(
                "h-function not finite while inverting at v={mid}, u={u}"
            )));
        }
        if (hm - p).abs() <= 1e-12 || hi - lo <= 1e-14 {
            return Ok(mid);
        }
        if hm < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let residual = (base.h(mid, u) - p).abs();
    if residual <= 1e-10 {
        Ok(mid)
    } else {
        Err(Error::Numeric(format!(
            "h-inverse did not converge: residual {residual} at p={p}, u={u}"
        )))
    }
}
