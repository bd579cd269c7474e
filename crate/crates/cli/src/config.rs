//! Run configuration, read from TOML.

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Solve1d,
    Solve2d,
    Convergence,
    Oracle,
    VerifyComposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc {
        #[serde(default = "one")]
        radius: f64,
    },
    Kite,
    Annulus {
        inner: f64,
        outer: f64,
    },
    Interval {
        a: f64,
        b: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl DomainSpec {
    pub fn is_1d(&self) -> bool {
        matches!(self, DomainSpec::Interval { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GSpec {
    RadiusSquared,
    Kite,
    AnnulusRadial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RhsSpec {
    /// `2^{2s} Γ(s+k+1)²/(k!)² (-1)^k P_k^{(s,0)}(2g - 1)`.
    Jacobi { k: usize, g: GSpec },
    Constant { value: f64 },
    /// Expression in `x` (1D) or `x`, `y` (2D).
    Expression { expr: String },
}

/// One discretization level. 1D runs use `n`; 2D runs use the other three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_rho: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_boundary: Option<usize>,
}

impl Resolution {
    /// Total unknowns without hole constants, used for ordering.
    pub fn size_hint(&self) -> usize {
        match self.n {
            Some(n) => n + 2,
            None => self.n_rho.unwrap_or(0) * self.n_theta.unwrap_or(0) + self.n_boundary.unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Closed-form solution (unit disc with the radius-squared family).
    Exact,
    /// The last resolution of the list.
    Finest,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on `eps_inf` of the last report row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_inf: Option<f64>,
    /// Bound on the relative residual of the linear solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// Bound on the scaled residual of the composition check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<f64>,
    /// Bound on `|oracle - f|` relative to `max |f|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slice {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<Slice>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// `φ` as an expression in `x` (1D) or `r` (radial 2D); `u = d^s φ`.
    /// Defaults to the exact solution of the disc family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    /// Evaluation points: `x` in 1D, radii in 2D.
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionSpec {
    pub targets: Vec<[f64; 2]>,
    #[serde(default = "default_h")]
    pub h: f64,
}

fn default_h() -> f64 {
    1e-2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Kind,
    pub s: f64,
    /// Multiplies `d`; the solution `u` does not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_scale: Option<f64>,
    pub domain: DomainSpec,
    pub rhs: RhsSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolutions: Vec<Resolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Output,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<CompositionSpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let c: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The closed-form reference is available.
    pub fn has_exact(&self) -> bool {
        matches!(self.domain, DomainSpec::Disc { radius } if radius == 1.0)
            && matches!(self.rhs, RhsSpec::Jacobi { g: GSpec::RadiusSquared, .. })
    }

    pub fn reference(&self) -> Reference {
        self.reference.unwrap_or(if self.has_exact() { Reference::Exact } else { Reference::Finest })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s must lie in (0, 1), got {}", self.s));
        }
        if let Some(c) = self.d_scale {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("d_scale must be positive, got {c}"));
            }
        }
        let one_d = self.domain.is_1d();
        if one_d && self.d_scale.is_some() {
            return bad("d_scale applies to 2D domains only".into());
        }
        if one_d && matches!(self.rhs, RhsSpec::Jacobi { .. }) {
            return bad("the Jacobi family is two-dimensional; use a constant or expression rhs on intervals".into());
        }
        for r in &self.resolutions {
            let ok = if one_d {
                r.n.is_some() && r.n_rho.is_none() && r.n_theta.is_none() && r.n_boundary.is_none()
            } else {
                r.n.is_none() && r.n_rho.is_some() && r.n_theta.is_some() && r.n_boundary.is_some()
            };
            if !ok {
                return bad(format!(
                    "resolution {r:?} does not fit the domain: intervals take `n`, 2D domains take `n_rho`, `n_theta`, `n_boundary`"
                ));
            }
        }
        if self.resolutions.windows(2).any(|w| w[0].size_hint() >= w[1].size_hint()) {
            return bad("resolution list must be strictly increasing".into());
        }
        match self.kind {
            Kind::Solve1d if !one_d => return bad("solve1d needs an interval domain".into()),
            Kind::Solve2d if one_d => return bad("solve2d needs a 2D domain".into()),
            Kind::Solve1d | Kind::Solve2d if self.resolutions.len() != 1 => {
                return bad("solve runs take exactly one resolution".into())
            }
            Kind::Convergence => {
                let need = if self.reference() == Reference::Exact { 1 } else { 3 };
                if self.resolutions.len() < need {
                    return bad(format!("convergence runs need at least {need} resolutions with this reference"));
                }
                if self.reference() == Reference::Exact && !self.has_exact() {
                    return bad("an exact reference is only available for the unit disc radius-squared family".into());
                }
            }
            Kind::Oracle => {
                let Some(o) = &self.oracle else { return bad("oracle runs need an [oracle] block".into()) };
                if o.points.is_empty() {
                    return bad("oracle points are empty".into());
                }
                if o.phi.is_none() && !self.has_exact() {
                    return bad("oracle phi is required unless the rhs is the disc family".into());
                }
                if !one_d && !matches!(self.domain, DomainSpec::Disc { .. } | DomainSpec::Annulus { .. }) {
                    return bad("the 2D oracle needs a radial domain (disc or annulus)".into());
                }
            }
            Kind::VerifyComposition => {
                if one_d {
                    return bad("verify-composition is two-dimensional".into());
                }
                let Some(c) = &self.composition else {
                    return bad("verify-composition runs need a [composition] block".into());
                };
                if c.targets.is_empty() {
                    return bad("composition targets are empty".into());
                }
                if !self.has_exact() && self.resolutions.is_empty() {
                    return bad("without an exact solution verify-composition needs a resolution to solve at".into());
                }
            }
            _ => {}
        }
        if let Some(sl) = &self.output.slice {
            let dim = if one_d { 1 } else { 2 };
            if sl.from.len() != dim || sl.to.len() != dim || sl.points < 2 {
                return bad(format!("slice needs {dim}-component endpoints and at least 2 points"));
            }
        }
        Ok(())
    }
}
