#pragma once

#include "tripartite/hilbert.hpp"

namespace tripartite {

/// Rotating-frame constants, all in units of ω_b.
struct ModelParams {
  double delta_a = 1.6;      ///< cavity–laser detuning Δ_a
  double delta_sigma = 0.0;  ///< atom–laser detuning Δ_σ
  double omega_b = 1.0;      ///< mechanical frequency, sets the unit
  double lambda = 0.15;      ///< tripartite coupling λ
  double omega_drive = 1.3;  ///< atomic drive amplitude Ω
  double kappa_a = 0.0;      ///< single-photon loss
  double kappa_a2 = 0.0;     ///< two-photon loss
  double kappa_b = 0.0;      ///< phonon loss
  double gamma = 0.0;        ///< atomic decay

  /// Throws InvalidArgument when omega_b ≤ 0, λ < 0 or any rate < 0.
  void validate() const;
};

/// Lab-frame quantities feeding the squeezing-enhanced coupling.
struct PhysicalParams {
  double lambda_a_sigma = 0.0;  ///< atom–cavity coupling λ_{aσ}
  double wavenumber_k = 0.0;
  double zpm = 0.0;   ///< zero-point motion √(ħ/2Mω_b)
  double mass = 0.0;  ///< informational; zpm is taken as given
  double omega_p_drive = 0.0;  ///< parametric drive Ω_p
  double delta_aL = 0.0;       ///< ω_a − ω_L
  double delta_sigmaL = 0.0;   ///< ω_σ − ω_L
  double omega_L = 0.0;
  double omega_a = 0.0;
  double omega_sigma = 0.0;
  double atom_position_x0 = 0.0;
};

struct EffectiveDerivation {
  double r = 0.0;                ///< squeezing parameter
  double lambda_abc = 0.0;       ///< bare tripartite coupling λ_{aσ} k x_ZPM
  double lambda_enhanced = 0.0;  ///< λ_{abσ} cosh 2r
  double lambda_prime = 0.0;     ///< −λ_{abσ} sinh 2r (counter-rotating, dropped)
  double delta_a_eff = 0.0;      ///< √(Δ_{aL}² − 4Ω_p²)
  double rwa_ratio = 0.0;        ///< |λ′|/(Δ_a + Δ_σ)
};

/// Squeezing transformation with tanh(4r) = 2Ω_p/Δ_{aL}.
EffectiveDerivation derive_effective_params(const PhysicalParams& phys);

/// Δ_a a†a + Δ_σ σ_z/2 + ω_b b†b + λ(a†σ + aσ†)(b† + b) + Ω(σ + σ†)
Operator build_h_eff(const ModelParams& params, const HilbertSpace& space);

/// The same Hamiltonian written in the resonant (Δ_σ = 0) dressed basis:
/// Δ_a a†a + ω_b b†b + Ωσ̃_z
///   + (λ/2)[(a†b† + a†b + ab† + ab)σ̃_z + (a†b† + a†b − ab† − ab)(σ̃† − σ̃)]
Operator build_h_dressed(const ModelParams& params, const HilbertSpace& space);

/// The λ-coupling part of build_h_dressed.
Operator dressed_interaction(const ModelParams& params, const HilbertSpace& space);

/// Zeroth-order dressed energy n_aΔ_a + n_bω_b ± Ω.
double bare_energy(const ModelParams& params, const Label& label);

struct Resonance {
  double omega_drive = 0.0;
  bool parity_allowed = true;  ///< n_a + n_b even and ≥ 2
};

/// Ω at which |00+⟩ is degenerate with |n_a n_b −⟩: (n_aΔ_a + n_bω_b)/2.
Resonance resonance_drive(int n_a, int n_b, const ModelParams& params);

struct DressedBasis {
  double c_plus;
  double c_minus;
  double e_plus;
  double e_minus;
};

/// Eigenbasis of Δ_σσ_z/2 + Ω(σ + σ†) in the form |+⟩ = c₊|g⟩ + c₋|e⟩,
/// |−⟩ = c₋|g⟩ − c₊|e⟩ with E_± = ±√(Δ_σ² + 4Ω²)/2.
DressedBasis dressed_basis(double delta_sigma, double omega_drive);

/// Diagonal (−1)^{n_a+n_b}.
Operator boson_parity_operator(const HilbertSpace& space);

}  // namespace tripartite
