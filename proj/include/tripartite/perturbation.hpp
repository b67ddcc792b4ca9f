#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tripartite/spectrum.hpp"

namespace tripartite {

struct TransitionSpec {
  Label initial;
  Label final;
  int order = 1;  ///< 1, 2 or 3
};

/// Effective coupling between two dressed product states from the
/// perturbative series in the λ-coupling of the dressed Hamiltonian.
///   order 1: V_fi
///   order 2: Σ_n V_fn V_ni / (E_i − E_n)
///   order 3: Σ_{m,n} V_fn V_nm V_mi / ((E_i − E_n)(E_i − E_m))
/// Intermediate states run over every dressed label of the truncation except
/// i and f; path amplitudes below 1e-14 are pruned. When no space is given a
/// truncation large enough for every path of the requested order is used.
/// The sign follows the dressed-operator convention; only |V| is physical.
double effective_coupling(const ModelParams& params, const TransitionSpec& spec,
                          std::optional<HilbertSpace> space = std::nullopt);

/// πλ²/2
double w11_analytic(double lambda);

/// (π/2)λ⁴[1/(2Ω − Δ_a − ω_b) + 1/(Δ_a + ω_b)]²
double w22_analytic(double lambda, double omega_drive, double delta_a, double omega_b);

/// 2π(gap/2)²: the rate W = 2π|V|² of a two-level splitting gap = 2|V|.
double rate_from_gap(double gap);

struct RateComparison {
  std::vector<double> lambda_grid;
  std::vector<double> analytic;
  std::vector<double> numeric;
  std::vector<double> omega_star;  ///< located anticrossing per λ
  std::vector<double> gap;
};

/// Numeric rates from the (0,0,+)/(n,n,−) anticrossing (n = 1 or 2) against
/// the closed forms. The W₂₂ closed form is evaluated at the located Ω*.
RateComparison compare_rates(const ModelParams& params, const HilbertSpace& space, int quanta,
                             const std::vector<double>& lambda_grid,
                             std::pair<double, double> bracket,
                             const AnticrossingOptions& options = {});

}  // namespace tripartite
