//! Problem library: quiescent fluid, two manufactured cases and a
//! Rayleigh–Taylor-style setup.

use std::f64::consts::PI;
use std::sync::Arc;

use macflow::fields::Point;
use macflow::operators::ViscosityLaw;
use macflow::solver::{Forcing, Problem};
use serde::Deserialize;

use crate::config::ConfigError;

fn one() -> f64 {
    1.0
}
fn mms_a_mu() -> f64 {
    0.1
}
fn three() -> f64 {
    3.0
}
fn blob_center() -> [f64; 2] {
    [0.5, 0.65]
}
fn blob_width() -> f64 {
    0.15
}
fn half() -> f64 {
    0.5
}
fn two() -> f64 {
    2.0
}
fn interface_thickness() -> f64 {
    0.05
}
fn interface_amplitude() -> f64 {
    0.05
}
fn down() -> [f64; 2] {
    [0.0, -1.0]
}

/// Named problem with its parameters, selected by `"name"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Fluid at rest with uniform density.
    Quiescent {
        #[serde(default = "one")]
        rho: f64,
    },
    /// Constant density, stream-function velocity, closed-form forcing.
    MmsA {
        #[serde(default = "one")]
        rho: f64,
        #[serde(default = "mms_a_mu")]
        mu: f64,
    },
    /// Gaussian density blob in a decaying vortex, no analytic solution.
    MmsB {
        #[serde(default = "one")]
        rho_min: f64,
        #[serde(default = "three")]
        rho_max: f64,
        #[serde(default = "blob_center")]
        center: [f64; 2],
        #[serde(default = "blob_width")]
        width: f64,
        #[serde(default = "half")]
        vortex: f64,
    },
    /// Heavy fluid above light under gravity, perturbed interface.
    RayleighTaylor {
        #[serde(default = "one")]
        rho_light: f64,
        #[serde(default = "two")]
        rho_heavy: f64,
        #[serde(default = "interface_thickness")]
        thickness: f64,
        #[serde(default = "interface_amplitude")]
        amplitude: f64,
        #[serde(default = "down")]
        gravity: [f64; 2],
        /// Amplitude of an initial stream-function vortex.
        #[serde(default)]
        vortex: f64,
    },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Quiescent { .. } => "quiescent",
            ProblemSpec::MmsA { .. } => "mms-a",
            ProblemSpec::MmsB { .. } => "mms-b",
            ProblemSpec::RayleighTaylor { .. } => "rayleigh-taylor",
        }
    }

    pub(crate) fn check(&self, dim: usize) -> Result<(), ConfigError> {
        if !matches!(self, ProblemSpec::Quiescent { .. }) && dim != 2 {
            return Err(ConfigError::invalid("mesh", format!("{} is two-dimensional", self.name())));
        }
        let positive = |k: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::invalid(format!("problem.{k}"), "must be positive"))
            }
        };
        match self {
            ProblemSpec::Quiescent { rho } => positive("rho", *rho),
            ProblemSpec::MmsA { rho, mu } => positive("rho", *rho).and(positive("mu", *mu)),
            ProblemSpec::MmsB {
                rho_min, rho_max, width, ..
            } => {
                positive("rho_min", *rho_min)?;
                positive("width", *width)?;
                if rho_max < rho_min {
                    return Err(ConfigError::invalid("problem.rho_max", "below rho_min"));
                }
                Ok(())
            }
            ProblemSpec::RayleighTaylor {
                rho_light,
                rho_heavy,
                thickness,
                ..
            } => {
                positive("rho_light", *rho_light)?;
                positive("rho_heavy", *rho_heavy)?;
                positive("thickness", *thickness)
            }
        }
    }

    pub fn default_domain(&self, dim: usize) -> Vec<(f64, f64)> {
        match self {
            ProblemSpec::RayleighTaylor { .. } => vec![(0.0, 1.0), (0.0, 2.0)],
            _ => vec![(0.0, 1.0); dim],
        }
    }

    pub(crate) fn check_domain(&self, domain: &[(f64, f64)]) -> Result<(), ConfigError> {
        if matches!(self, ProblemSpec::MmsA { .. }) && domain.iter().any(|d| *d != (0.0, 1.0)) {
            return Err(ConfigError::invalid("domain", "mms-a is posed on the unit square"));
        }
        Ok(())
    }

    pub fn default_viscosity(&self) -> ViscosityLaw {
        match self {
            ProblemSpec::Quiescent { .. } => ViscosityLaw::Constant(0.1),
            ProblemSpec::MmsA { mu, .. } => ViscosityLaw::Constant(*mu),
            ProblemSpec::MmsB { .. } => ViscosityLaw::Linear { a: 0.01, b: 0.005 },
            ProblemSpec::RayleighTaylor { .. } => ViscosityLaw::Linear { a: 0.002, b: 0.004 },
        }
    }

    /// Whether a `viscosity` section may replace the default law.
    pub fn allows_viscosity_override(&self) -> bool {
        !matches!(self, ProblemSpec::MmsA { .. })
    }

    /// `[min ρ₀, max ρ₀]`.
    pub fn density_bounds(&self) -> (f64, f64) {
        match self {
            ProblemSpec::Quiescent { rho } | ProblemSpec::MmsA { rho, .. } => (*rho, *rho),
            ProblemSpec::MmsB { rho_min, rho_max, .. } => (*rho_min, *rho_max),
            ProblemSpec::RayleighTaylor {
                rho_light, rho_heavy, ..
            } => (rho_light.min(*rho_heavy), rho_light.max(*rho_heavy)),
        }
    }

    /// Analytic solution, when there is one.
    pub fn analytic(&self) -> Option<MmsA> {
        match self {
            ProblemSpec::MmsA { rho, mu } => Some(MmsA { rho: *rho, mu: *mu }),
            _ => None,
        }
    }

    pub fn build(&self, law: ViscosityLaw) -> Box<dyn Problem> {
        match self.clone() {
            ProblemSpec::Quiescent { rho } => Box::new(Quiescent { rho, law }),
            ProblemSpec::MmsA { rho, mu } => Box::new(MmsA { rho, mu }),
            ProblemSpec::MmsB {
                rho_min,
                rho_max,
                center,
                width,
                vortex,
            } => Box::new(MmsB {
                rho_min,
                rho_max,
                center,
                width,
                vortex,
                law,
            }),
            ProblemSpec::RayleighTaylor {
                rho_light,
                rho_heavy,
                thickness,
                amplitude,
                gravity,
                vortex,
            } => Box::new(RayleighTaylor {
                rho_light,
                rho_heavy,
                thickness,
                amplitude,
                gravity,
                vortex,
                law,
            }),
        }
    }
}

pub struct Quiescent {
    pub rho: f64,
    pub law: ViscosityLaw,
}

impl Problem for Quiescent {
    fn rho0(&self, _: Point) -> f64 {
        self.rho
    }
    fn u0(&self, _: usize, _: Point) -> f64 {
        0.0
    }
    fn viscosity(&self) -> ViscosityLaw {
        self.law.clone()
    }
}

/// `g(s) = s²(1-s)²` and its first three derivatives.
fn g(s: f64) -> [f64; 4] {
    [
        s * s * (1.0 - s) * (1.0 - s),
        2.0 * s * (1.0 - s) * (1.0 - 2.0 * s),
        2.0 - 12.0 * s + 12.0 * s * s,
        -12.0 + 24.0 * s,
    ]
}

/// `ψ = g(x) g(y) cos t`, `u = (∂_y ψ, -∂_x ψ)`,
/// `p = sin(πx) cos(πy)` (zero mean), constant `ρ` and `μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmsA {
    pub rho: f64,
    pub mu: f64,
}

impl MmsA {
    pub fn velocity(&self, i: usize, t: f64, x: Point) -> f64 {
        let (gx, gy) = (g(x[0]), g(x[1]));
        match i {
            0 => gx[0] * gy[1] * t.cos(),
            _ => -gx[1] * gy[0] * t.cos(),
        }
    }

    pub fn pressure(&self, _t: f64, x: Point) -> f64 {
        (PI * x[0]).sin() * (PI * x[1]).cos()
    }

    /// `ρ(∂_t u + (u·∇)u) - div(μ D(u)) + ∇p`, with
    /// `div(μ D(u)) = (μ/2) Δu` for constant `μ` and solenoidal `u`.
    pub fn forcing(&self, i: usize, t: f64, x: Point) -> f64 {
        let (gx, gy) = (g(x[0]), g(x[1]));
        let (c, s) = (t.cos(), t.sin());
        let u = gx[0] * gy[1] * c;
        let v = -gx[1] * gy[0] * c;
        let (px, py) = (PI * x[0], PI * x[1]);
        if i == 0 {
            let dt = -gx[0] * gy[1] * s;
            let ux = gx[1] * gy[1] * c;
            let uy = gx[0] * gy[2] * c;
            let lap = (gx[2] * gy[1] + gx[0] * gy[3]) * c;
            self.rho * (dt + u * ux + v * uy) - 0.5 * self.mu * lap + PI * px.cos() * py.cos()
        } else {
            let dt = gx[1] * gy[0] * s;
            let vx = -gx[2] * gy[0] * c;
            let vy = -gx[1] * gy[1] * c;
            let lap = -(gx[3] * gy[0] + gx[1] * gy[2]) * c;
            self.rho * (dt + u * vx + v * vy) - 0.5 * self.mu * lap - PI * px.sin() * py.sin()
        }
    }
}

impl Problem for MmsA {
    fn rho0(&self, _: Point) -> f64 {
        self.rho
    }
    fn u0(&self, i: usize, x: Point) -> f64 {
        self.velocity(i, 0.0, x)
    }
    fn forcing(&self) -> Forcing {
        let me = *self;
        Forcing::Analytic(Arc::new(move |i, t, x| me.forcing(i, t, x)))
    }
    fn viscosity(&self) -> ViscosityLaw {
        ViscosityLaw::Constant(self.mu)
    }
}

/// Stream function `sin²(πx) sin²(πy/L)` on `[0,1]×[0,L]` and its velocity.
fn vortex_velocity(amp: f64, len: f64, i: usize, x: Point) -> f64 {
    let k = PI / len;
    let (sx, cx) = ((PI * x[0]).sin(), (PI * x[0]).cos());
    let (sy, cy) = ((k * x[1]).sin(), (k * x[1]).cos());
    if i == 0 {
        amp * sx * sx * 2.0 * k * sy * cy
    } else {
        -amp * 2.0 * PI * sx * cx * sy * sy
    }
}

pub struct MmsB {
    pub rho_min: f64,
    pub rho_max: f64,
    pub center: [f64; 2],
    pub width: f64,
    pub vortex: f64,
    pub law: ViscosityLaw,
}

impl Problem for MmsB {
    fn rho0(&self, x: Point) -> f64 {
        let r2 = (x[0] - self.center[0]).powi(2) + (x[1] - self.center[1]).powi(2);
        self.rho_min + (self.rho_max - self.rho_min) * (-r2 / (self.width * self.width)).exp()
    }
    fn u0(&self, i: usize, x: Point) -> f64 {
        vortex_velocity(self.vortex, 1.0, i, x)
    }
    fn viscosity(&self) -> ViscosityLaw {
        self.law.clone()
    }
}

pub struct RayleighTaylor {
    pub rho_light: f64,
    pub rho_heavy: f64,
    pub thickness: f64,
    pub amplitude: f64,
    pub gravity: [f64; 2],
    pub vortex: f64,
    pub law: ViscosityLaw,
}

impl Problem for RayleighTaylor {
    fn rho0(&self, x: Point) -> f64 {
        let y0 = 1.0 + self.amplitude * (2.0 * PI * x[0]).cos();
        let s = 0.5 * (1.0 + ((x[1] - y0) / self.thickness).tanh());
        self.rho_light + (self.rho_heavy - self.rho_light) * s
    }
    fn u0(&self, i: usize, x: Point) -> f64 {
        vortex_velocity(self.vortex, 2.0, i, x)
    }
    fn forcing(&self) -> Forcing {
        if self.gravity == [0.0, 0.0] {
            Forcing::None
        } else {
            Forcing::Gravity([self.gravity[0], self.gravity[1], 0.0])
        }
    }
    fn viscosity(&self) -> ViscosityLaw {
        self.law.clone()
    }
}
