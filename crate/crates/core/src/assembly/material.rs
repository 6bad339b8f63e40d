use super::AssemblyError;

/// Spatial dimension of the model.
pub const DIM: f64 = 2.0;

/// Physical constants of the poroelastic medium, SI units throughout.
///
/// Lamé parameters, the stabilization thresholds and the benchmark constants
/// (undrained Poisson ratio, consolidation coefficient) are derived on demand
/// and never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Young's modulus E [Pa]
    pub youngs_modulus: f64,
    /// Poisson ratio ν
    pub poisson_ratio: f64,
    /// Biot coefficient α
    pub biot_coefficient: f64,
    /// Biot modulus β [Pa]; `1/β` multiplies the pressure rate
    pub biot_modulus: f64,
    /// scalar permeability κ [m²]
    pub permeability: f64,
    /// fluid viscosity μ_f [Pa·s]
    pub fluid_viscosity: f64,
    /// bulk density ρ [kg/m³]
    pub bulk_density: f64,
    /// fluid density ρ_f [kg/m³]
    pub fluid_density: f64,
    pub porosity: f64,
    /// gravity vector [m/s²]
    pub gravity: [f64; 2],
    /// Skempton coefficient B
    pub skempton: f64,
}

impl MaterialParams {
    pub fn validate(&self) -> Result<(), AssemblyError> {
        let bad = |what: &str, v: f64| Err(AssemblyError::InvalidParameter(format!("{what} = {v}")));
        let nu = self.poisson_ratio;
        if !(nu > 0.0 && nu < 0.5) {
            return bad("Poisson ratio must lie in (0, 0.5), got", nu);
        }
        if !(self.youngs_modulus > 0.0) {
            return bad("Young's modulus must be positive, got", self.youngs_modulus);
        }
        if !(self.biot_modulus > 0.0) {
            return bad("Biot modulus must be positive, got", self.biot_modulus);
        }
        if !(self.permeability > 0.0) {
            return bad("permeability must be positive, got", self.permeability);
        }
        if !(self.fluid_viscosity > 0.0) {
            return bad("fluid viscosity must be positive, got", self.fluid_viscosity);
        }
        // α = 0 is admitted: it decouples flow from mechanics
        if !(0.0..=1.0).contains(&self.biot_coefficient) {
            return bad("Biot coefficient must lie in [0, 1], got", self.biot_coefficient);
        }
        if !(self.skempton > 0.0 && self.skempton <= 1.0) {
            return bad("Skempton coefficient must lie in (0, 1], got", self.skempton);
        }
        Ok(())
    }

    /// λ = Eν / ((1 − 2ν)(1 + ν))
    pub fn lame_lambda(&self) -> f64 {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        e * nu / ((1.0 - 2.0 * nu) * (1.0 + nu))
    }

    /// G = E / (2 + 2ν)
    pub fn shear_modulus(&self) -> f64 {
        self.youngs_modulus / (2.0 + 2.0 * self.poisson_ratio)
    }

    /// λ + 2G/d, the constant in the divergence bound of the mechanics step.
    pub fn drained_bulk_modulus(&self) -> f64 {
        self.lame_lambda() + 2.0 * self.shear_modulus() / DIM
    }

    /// Three-dimensional drained bulk modulus E / (3(1 − 2ν)).
    pub fn bulk_modulus_3d(&self) -> f64 {
        self.youngs_modulus / (3.0 * (1.0 - 2.0 * self.poisson_ratio))
    }

    /// κ / μ_f
    pub fn mobility(&self) -> f64 {
        self.permeability / self.fluid_viscosity
    }

    pub fn storage(&self) -> f64 {
        1.0 / self.biot_modulus
    }

    /// The "physical" stabilization α² / (2G/d + λ).
    pub fn l_phys(&self) -> f64 {
        self.biot_coefficient.powi(2) / self.drained_bulk_modulus()
    }

    /// Smallest stabilization for which the splitting is a contraction.
    pub fn l_min(&self) -> f64 {
        self.biot_coefficient.powi(2) / (2.0 * self.drained_bulk_modulus())
    }

    /// ν_u = (3ν + B(1 − 2ν)) / (3 − B(1 − 2ν))
    pub fn undrained_poisson_ratio(&self) -> f64 {
        let nu = self.poisson_ratio;
        let k = self.skempton * (1.0 - 2.0 * nu);
        (3.0 * nu + k) / (3.0 - k)
    }

    /// Consolidation coefficient c = (κ/μ_f) / (1/β + α² / (K + 4G/3)).
    pub fn diffusivity(&self) -> f64 {
        let confined = self.bulk_modulus_3d() + 4.0 * self.shear_modulus() / 3.0;
        self.mobility() / (self.storage() + self.biot_coefficient.powi(2) / confined)
    }
}
