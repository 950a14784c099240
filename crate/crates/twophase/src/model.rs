//! Physical parameters and the constants of the linearized system.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Physical constants of the two-phase model.
///
/// The Euler phase has background density `rho_bar`; the viscous phase has
/// background density `n_bar`, pressure `a_coef * n^gamma` and Lamé
/// viscosities `mu`, `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub rho_bar: f64,
    pub n_bar: f64,
    pub a_coef: f64,
    pub gamma: f64,
    pub mu: f64,
    pub lambda: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::canonical()
    }
}

impl ModelParams {
    /// rho_bar = n_bar = A = 1, gamma = 2, mu = 1, lambda = 0.
    pub fn canonical() -> Self {
        Self { rho_bar: 1.0, n_bar: 1.0, a_coef: 1.0, gamma: 2.0, mu: 1.0, lambda: 0.0 }
    }

    /// Checks every admissibility condition and reports the first one violated.
    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, &str); 6] = [
            (self.rho_bar > 0.0, "rho_bar must be > 0"),
            (self.n_bar > 0.0, "n_bar must be > 0"),
            (self.a_coef > 0.0, "a_coef must be > 0"),
            (self.gamma >= 1.0, "gamma must be >= 1"),
            (self.mu > 0.0, "mu must be > 0"),
            (2.0 / 3.0 * self.mu + self.lambda >= 0.0, "(2/3)*mu + lambda must be >= 0"),
        ];
        let all = [self.rho_bar, self.n_bar, self.a_coef, self.gamma, self.mu, self.lambda];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::InvalidParams((*msg).into())),
            None => Ok(()),
        }
    }

    /// Pressure P(n) = A n^gamma.
    pub fn pressure(&self, n: f64) -> f64 {
        self.a_coef * n.powf(self.gamma)
    }

    /// P'(n).
    pub fn pressure_prime(&self, n: f64) -> f64 {
        self.a_coef * self.gamma * n.powf(self.gamma - 1.0)
    }

    /// Parses a TOML document with keys `rho_bar`, `n_bar`, `a_coef`,
    /// `gamma`, `mu`, `lambda`. Missing keys take canonical values.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Partial {
            rho_bar: Option<f64>,
            n_bar: Option<f64>,
            a_coef: Option<f64>,
            gamma: Option<f64>,
            mu: Option<f64>,
            lambda: Option<f64>,
        }
        let p: Partial = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        let d = Self::canonical();
        let out = Self {
            rho_bar: p.rho_bar.unwrap_or(d.rho_bar),
            n_bar: p.n_bar.unwrap_or(d.n_bar),
            a_coef: p.a_coef.unwrap_or(d.a_coef),
            gamma: p.gamma.unwrap_or(d.gamma),
            mu: p.mu.unwrap_or(d.mu),
            lambda: p.lambda.unwrap_or(d.lambda),
        };
        out.validate()?;
        Ok(out)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("plain float record serializes")
    }
}

/// Validated parameters together with the derived linearization constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    pub params: ModelParams,
    /// P'(n_bar).
    pub alpha1: f64,
    /// rho_bar / n_bar.
    pub alpha2: f64,
    pub mu_bar: f64,
    pub lambda_bar: f64,
    /// 2 mu_bar + lambda_bar.
    pub nu: f64,
    /// Sound speed of the coupled system.
    pub c: f64,
}

/// Validates `params` and computes the derived constants.
pub fn derive(params: ModelParams) -> Result<DerivedParams> {
    params.validate()?;
    let alpha1 = params.pressure_prime(params.n_bar);
    let alpha2 = params.rho_bar / params.n_bar;
    let mu_bar = params.mu / params.n_bar;
    let lambda_bar = params.lambda / params.n_bar;
    let nu = 2.0 * mu_bar + lambda_bar;
    let c = ((alpha1 + alpha2) / (alpha2 + 1.0)).sqrt();
    if !(nu > 0.0) {
        return Err(Error::InvalidParams("2*mu + lambda must be > 0".into()));
    }
    Ok(DerivedParams { params, alpha1, alpha2, mu_bar, lambda_bar, nu, c })
}

impl DerivedParams {
    pub fn canonical() -> Self {
        derive(ModelParams::canonical()).expect("canonical parameters are admissible")
    }

    /// Sound speed written in the physical variables,
    /// sqrt((n_bar P'(n_bar) + rho_bar) / (n_bar + rho_bar)).
    pub fn sound_speed_physical(&self) -> f64 {
        let p = &self.params;
        ((p.n_bar * p.pressure_prime(p.n_bar) + p.rho_bar) / (p.n_bar + p.rho_bar)).sqrt()
    }

    /// Speed of the viscous phase alone, sqrt(P'(n_bar)).
    pub fn single_phase_speed(&self) -> f64 {
        self.alpha1.sqrt()
    }
}
