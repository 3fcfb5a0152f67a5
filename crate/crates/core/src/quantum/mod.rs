//! Quantum extension on finite-difference grids (`N = 1` seeds).
//!
//! For a seed `L₀` on a circle-like coordinate `q` and `γ = 1/(cu)`:
//!
//! ```text
//! Ĥ = -(ħ²/2)(∂²_u + (N/u)∂_u) + (k²/(cu²))L̂₀ + (ω²/2)c²u² + c_N(k²+1)/(cu²)
//! ```
//!
//! with the factors `Ĝ±_ε`, `Â^{σ,τ}_μ`, `D̂±_E` and the warped symmetry
//! `X̂ = (Ĝ⁺_ε)^{2n}(Â^{1,1}_{kε})^{2m}(D̂⁺_E)^m`. Operators are symbolic
//! ([`OperatorSpec`]); they act either in closed form on separated functions
//! ([`Separated`]) or by finite differences on a grid ([`GridFunction`]).

mod grid;
mod operator;
mod operators;
mod separated;
mod warped;

pub use grid::{apply_on_grid, h_m_spectrum, l_hat_spectrum, GridFunction, GridSpec, Stencil};
pub use operator::OperatorSpec;
pub use operators::{build_l_hat, c_n, compose_chain, QuantumSystem, Sign};
pub use separated::{sample_fourier, split_coefficient, Fourier, Radial, Separated, SeparatedOp};
pub use warped::{
    composition_identities, describe, shift_ladder_classify, ChainMode, Classification,
    ClassifyResult, Family, Mode, WarpedConfig, CONTROL_MIN, EXACT_TOL, LEAKAGE_TOL, RATIO_RANGE,
    WARPED_TOL,
};

#[cfg(test)]
mod tests;
