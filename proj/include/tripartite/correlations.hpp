#pragma once

#include <vector>

#include "tripartite/dynamics.hpp"

namespace tripartite {

/// ⟨A†(0)A(τ)⟩ at stationarity.
struct CorrelationSeries {
  RealVector tau;
  Vector values;
};

struct SpectrumSeries {
  RealVector omega;
  RealVector values;
};

/// Quantum regression: Tr[A · e^{Lτ}(ρ_ss A†)] on a nondecreasing τ grid
/// starting at 0. Rejects ρ_ss whose residual ‖L(ρ_ss)‖₁ exceeds
/// stationarity_tol.
CorrelationSeries two_time_correlation(const Superoperator& l, const DensityMatrix& rho_ss,
                                       const Operator& op, const std::vector<double>& tau,
                                       IntegratorOptions options = {},
                                       double stationarity_tol = 1e-8);

/// S(ω) = 2 Re ∫₀^{τ_max} dτ e^{iωτ} C(τ), trapezoidal on the τ grid of corr.
/// Throws NumericalError when |C(τ_max)| ≥ decay_tol·|C(0)|.
SpectrumSeries emission_spectrum(const CorrelationSeries& corr, const RealVector& omega,
                                 double decay_tol = 1e-4);

/// ⟨a†b†ba⟩ / (⟨a†a⟩⟨b†b⟩); throws InvalidArgument when either occupation
/// is below 1e-14.
double cross_g2(const DensityMatrix& rho);

struct SpectralPeak {
  double omega = 0.0;
  double value = 0.0;
  Eigen::Index index = 0;
};

/// Grid maximum of the spectrum within [lo, hi].
SpectralPeak spectral_peak(const SpectrumSeries& s, double lo, double hi);

/// Uniform τ grid on [0, tau_max] with at least min_points samples and a step
/// no larger than max_step.
std::vector<double> tau_grid(double tau_max, int min_points = 4096, double max_step = 0.1);

}  // namespace tripartite
