//! Linear-fractional closure factors.
//!
//! Material factors close the low-order equations for each material:
//! `C^± = J^± / phi^±` and `E^± = K^± / phi^±`, where `K^±` is the second
//! half-range moment. Ensemble ("double bracket") coefficients are flux
//! weighted averages of material data over the mixture. Prolongation factors
//! recover ensemble partial fluxes and currents from `<phi>` and `<J>`:
//!
//! ```text
//! <phi^±> = beta^± (<J> - Ctilde^∓ <phi>),   <J^±> = gamma^± (<J> - Ctilde^∓ <phi>)
//! ```
//!
//! Every quotient falls back to its isotropic value when the denominator is
//! negligible against the local flux scale.

use crate::highorder::{angular_moments, HalfMoments, MaterialFlux, MomentField};
use crate::problem::MaterialSpec;
use crate::quadrature::{AngularQuadrature, Half};

/// Relative size below which a denominator counts as zero.
pub const DEGENERATE_TOL: f64 = 1e-13;

pub const ISOTROPIC_C: f64 = 0.5;
pub const ISOTROPIC_E: f64 = 1.0 / 3.0;

fn ratio_or(num: f64, den: f64, scale: f64, fallback: f64) -> f64 {
    if den.abs() <= DEGENERATE_TOL * scale || den.abs() < f64::MIN_POSITIVE {
        fallback
    } else {
        num / den
    }
}

/// Material factors at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeFactors {
    pub c_plus: f64,
    pub c_minus: f64,
    pub e_plus: f64,
    pub e_minus: f64,
}

impl NodeFactors {
    pub const ISOTROPIC: NodeFactors = NodeFactors {
        c_plus: ISOTROPIC_C,
        c_minus: -ISOTROPIC_C,
        e_plus: ISOTROPIC_E,
        e_minus: ISOTROPIC_E,
    };

    pub fn from_moments(m: &HalfMoments) -> Self {
        let scale = m.phi_plus.abs() + m.phi_minus.abs();
        Self {
            c_plus: ratio_or(m.j_plus, m.phi_plus, scale, ISOTROPIC_C),
            c_minus: ratio_or(m.j_minus, m.phi_minus, scale, -ISOTROPIC_C),
            e_plus: ratio_or(m.k_plus, m.phi_plus, scale, ISOTROPIC_E),
            e_minus: ratio_or(m.k_minus, m.phi_minus, scale, ISOTROPIC_E),
        }
    }

    pub fn c(&self, half: Half) -> f64 {
        match half {
            Half::Positive => self.c_plus,
            Half::Negative => self.c_minus,
        }
    }

    pub fn e(&self, half: Half) -> f64 {
        match half {
            Half::Positive => self.e_plus,
            Half::Negative => self.e_minus,
        }
    }
}

/// Nodal factors of one material.
pub type MaterialFactors = Vec<[NodeFactors; 2]>;

pub fn factors_from_moments(moments: &MomentField) -> MaterialFactors {
    moments
        .iter()
        .map(|m| [NodeFactors::from_moments(&m[0]), NodeFactors::from_moments(&m[1])])
        .collect()
}

/// Nodal `C^±`, `E^±` of an angular flux.
pub fn material_factors(quad: &AngularQuadrature, psi: &MaterialFlux) -> MaterialFactors {
    factors_from_moments(&angular_moments(quad, psi))
}

/// Nodal partial fluxes of both materials, the input of every ensemble
/// average below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub p: [f64; 2],
    pub phi_plus: [f64; 2],
    pub phi_minus: [f64; 2],
    pub factors: [NodeFactors; 2],
}

impl NodeState {
    fn scale(&self) -> f64 {
        (0..2)
            .map(|l| self.p[l] * (self.phi_plus[l].abs() + self.phi_minus[l].abs()))
            .sum()
    }

    fn sum(&self, f: impl Fn(usize) -> f64) -> f64 {
        f(0) + f(1)
    }

    pub fn ensemble_phi(&self) -> f64 {
        self.sum(|l| self.p[l] * (self.phi_plus[l] + self.phi_minus[l]))
    }

    pub fn ensemble_current(&self) -> f64 {
        self.sum(|l| {
            let f = &self.factors[l];
            self.p[l] * (f.c_plus * self.phi_plus[l] + f.c_minus * self.phi_minus[l])
        })
    }

    pub fn ensemble_partial_phi(&self, half: Half) -> f64 {
        self.sum(|l| self.p[l] * self.partial(l, half))
    }

    pub fn ensemble_partial_current(&self, half: Half) -> f64 {
        self.sum(|l| self.p[l] * self.factors[l].c(half) * self.partial(l, half))
    }

    fn partial(&self, l: usize, half: Half) -> f64 {
        match half {
            Half::Positive => self.phi_plus[l],
            Half::Negative => self.phi_minus[l],
        }
    }
}

/// Ensemble coefficients of the quasidiffusion equations at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleCoefficients {
    pub sigma_a: f64,
    pub sigma_t: f64,
    pub eta: f64,
    pub eddington: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

pub fn ensemble_coefficients(state: &NodeState, materials: &[MaterialSpec; 2]) -> EnsembleCoefficients {
    let s = state;
    let scale = s.scale();
    let phi_l = |l: usize| s.phi_plus[l] + s.phi_minus[l];
    let cur_l = |l: usize| s.factors[l].c_plus * s.phi_plus[l] + s.factors[l].c_minus * s.phi_minus[l];
    let den_phi = s.sum(|l| s.p[l] * phi_l(l));
    let plain = |f: &dyn Fn(&MaterialSpec) -> f64| s.sum(|l| s.p[l] * f(&materials[l]));

    let sigma_a = ratio_or(
        s.sum(|l| materials[l].sigma_a() * s.p[l] * phi_l(l)),
        den_phi,
        scale,
        plain(&|m| m.sigma_a()),
    );
    let abs_cur = s.sum(|l| s.p[l] * cur_l(l).abs());
    let sigma_t = ratio_or(
        s.sum(|l| materials[l].sigma_t * s.p[l] * cur_l(l).abs()),
        abs_cur,
        scale,
        plain(&|m| m.sigma_t),
    );
    let eta = ratio_or(
        s.sum(|l| (materials[l].sigma_t - sigma_t) * s.p[l] * cur_l(l)),
        den_phi,
        scale,
        0.0,
    );
    let eddington = ratio_or(
        s.sum(|l| s.p[l] * (s.factors[l].e_plus * s.phi_plus[l] + s.factors[l].e_minus * s.phi_minus[l])),
        den_phi,
        scale,
        ISOTROPIC_E,
    );
    let c_pm = |half: Half, iso: f64| {
        ratio_or(
            s.sum(|l| s.factors[l].c(half) * s.p[l] * s.partial(l, half)),
            s.ensemble_partial_phi(half),
            scale,
            iso,
        )
    };
    EnsembleCoefficients {
        sigma_a,
        sigma_t,
        eta,
        eddington,
        c_plus: c_pm(Half::Positive, ISOTROPIC_C),
        c_minus: c_pm(Half::Negative, -ISOTROPIC_C),
    }
}

/// Flux-weighted half-range Eddington factors `(<<E^+>>, <<E^->>)`.
pub fn ensemble_half_eddington(state: &NodeState) -> (f64, f64) {
    let s = state;
    let scale = s.scale();
    let e = |half: Half| {
        ratio_or(
            s.sum(|l| s.factors[l].e(half) * s.p[l] * s.partial(l, half)),
            s.ensemble_partial_phi(half),
            scale,
            ISOTROPIC_E,
        )
    };
    (e(Half::Positive), e(Half::Negative))
}

/// Prolongation factors at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProlongationFactors {
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub c_tilde_plus: f64,
    pub c_tilde_minus: f64,
    /// `<<E^+>>`, `<<E^->>`, carried along for the edge closures.
    pub e_plus: f64,
    pub e_minus: f64,
}

impl ProlongationFactors {
    pub const ISOTROPIC: ProlongationFactors = ProlongationFactors {
        beta_plus: 1.0,
        beta_minus: -1.0,
        gamma_plus: 0.5,
        gamma_minus: 0.5,
        c_tilde_plus: ISOTROPIC_C,
        c_tilde_minus: -ISOTROPIC_C,
        e_plus: ISOTROPIC_E,
        e_minus: ISOTROPIC_E,
    };

    /// Ensemble partial flux `beta^± (<J> - Ctilde^∓ <phi>)`.
    pub fn partial_phi(&self, half: Half, phi: f64, current: f64) -> f64 {
        match half {
            Half::Positive => self.beta_plus * (current - self.c_tilde_minus * phi),
            Half::Negative => self.beta_minus * (current - self.c_tilde_plus * phi),
        }
    }

    /// Ensemble partial current `gamma^± (<J> - Ctilde^∓ <phi>)`.
    pub fn partial_current(&self, half: Half, phi: f64, current: f64) -> f64 {
        match half {
            Half::Positive => self.gamma_plus * (current - self.c_tilde_minus * phi),
            Half::Negative => self.gamma_minus * (current - self.c_tilde_plus * phi),
        }
    }

    /// Coefficients `(a, b)` with `partial_phi = a <phi> + b <J>`.
    pub fn partial_phi_coeffs(&self, half: Half) -> (f64, f64) {
        match half {
            Half::Positive => (-self.beta_plus * self.c_tilde_minus, self.beta_plus),
            Half::Negative => (-self.beta_minus * self.c_tilde_plus, self.beta_minus),
        }
    }

    /// Coefficients `(a, b)` with `partial_current = a <phi> + b <J>`.
    pub fn partial_current_coeffs(&self, half: Half) -> (f64, f64) {
        match half {
            Half::Positive => (-self.gamma_plus * self.c_tilde_minus, self.gamma_plus),
            Half::Negative => (-self.gamma_minus * self.c_tilde_plus, self.gamma_minus),
        }
    }

    pub fn e(&self, half: Half) -> f64 {
        match half {
            Half::Positive => self.e_plus,
            Half::Negative => self.e_minus,
        }
    }
}

pub fn prolongation_factors(state: &NodeState) -> ProlongationFactors {
    let s = state;
    let scale = s.scale();
    let iso = ProlongationFactors::ISOTROPIC;
    let spread = |half: Half| {
        let other = match half {
            Half::Positive => Half::Negative,
            Half::Negative => Half::Positive,
        };
        s.sum(|l| (s.factors[l].c(half) - s.factors[l].c(other)) * s.p[l] * s.partial(l, half))
    };
    let (sp, sm) = (spread(Half::Positive), spread(Half::Negative));
    let den_phi = s.ensemble_phi();
    let c_tilde = |half: Half, fallback: f64| {
        ratio_or(
            s.sum(|l| s.factors[l].c(half) * s.p[l] * (s.phi_plus[l] + s.phi_minus[l])),
            den_phi,
            scale,
            fallback,
        )
    };
    let (e_plus, e_minus) = ensemble_half_eddington(s);
    ProlongationFactors {
        beta_plus: ratio_or(s.ensemble_partial_phi(Half::Positive), sp, scale, iso.beta_plus),
        beta_minus: ratio_or(s.ensemble_partial_phi(Half::Negative), sm, scale, iso.beta_minus),
        gamma_plus: ratio_or(s.ensemble_partial_current(Half::Positive), sp, scale, iso.gamma_plus),
        gamma_minus: ratio_or(s.ensemble_partial_current(Half::Negative), sm, scale, iso.gamma_minus),
        c_tilde_plus: c_tilde(Half::Positive, iso.c_tilde_plus),
        c_tilde_minus: c_tilde(Half::Negative, iso.c_tilde_minus),
        e_plus,
        e_minus,
    }
}
