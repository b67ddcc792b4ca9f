#include "tripartite/perturbation.hpp"

#include <cmath>
#include <numbers>

namespace tripartite {

namespace {

constexpr double kPrune = 1e-14;
constexpr double kResonant = 1e-6;

// V and the bare energies in the basis of dressed product labels.
struct LabelBasis {
  std::vector<Label> labels;
  RealVector energy;
  Matrix v;

  int find(const Label& l) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == l) return int(k);
    throw InvalidArgument("label " + l.str() + " lies outside the truncation");
  }
};

LabelBasis label_basis(const ModelParams& params, const HilbertSpace& space) {
  LabelBasis out;
  for (int na = 0; na <= space.photon_trunc; ++na)
    for (int nb = 0; nb <= space.phonon_trunc; ++nb)
      for (int sign : {+1, -1}) out.labels.push_back({na, nb, sign});
  const int n = space.total_dim();
  Matrix u(n, n);
  out.energy.resize(n);
  for (int k = 0; k < n; ++k) {
    u.col(k) = dressed_state(space, out.labels[std::size_t(k)]).amplitudes();
    out.energy(k) = bare_energy(params, out.labels[std::size_t(k)]);
  }
  out.v = u.adjoint() * (dressed_interaction(params, space).matrix() * u);
  return out;
}

double denominator(double e_i, double e_n, const Label& n) {
  const double d = e_i - e_n;
  if (std::abs(d) < kResonant)
    throw NumericalError("resonant intermediate state " + n.str() +
                         " makes the perturbative sum singular");
  return d;
}

}  // namespace

double effective_coupling(const ModelParams& params, const TransitionSpec& spec,
                          std::optional<HilbertSpace> space) {
  params.validate();
  if (spec.initial == spec.final) throw InvalidArgument("initial and final labels must differ");
  if (spec.order < 1 || spec.order > 3)
    throw InvalidArgument("effective_coupling supports orders 1 to 3");
  for (const Label* l : {&spec.initial, &spec.final})
    if (l->n_a < 0 || l->n_b < 0 || (l->sign != 1 && l->sign != -1))
      throw InvalidArgument("malformed label " + l->str());
  if (!space) {
    const int reach = spec.order;
    space = build_space(std::max(spec.initial.n_a, spec.final.n_a) + reach,
                        std::max(spec.initial.n_b, spec.final.n_b) + reach);
  }

  const LabelBasis basis = label_basis(params, *space);
  const int i = basis.find(spec.initial), f = basis.find(spec.final);
  const Matrix& v = basis.v;
  const double e_i = basis.energy(i);
  const int n = int(basis.labels.size());
  auto real = [](Scalar z) { return z.real(); };

  if (spec.order == 1) return real(v(f, i));

  double sum = 0.0;
  if (spec.order == 2) {
    for (int k = 0; k < n; ++k) {
      if (k == i || k == f) continue;
      const double amp = real(v(f, k) * v(k, i));
      if (std::abs(amp) < kPrune) continue;
      sum += amp / denominator(e_i, basis.energy(k), basis.labels[std::size_t(k)]);
    }
    return sum;
  }

  for (int m = 0; m < n; ++m) {
    if (m == i || m == f || std::abs(v(m, i)) < kPrune) continue;
    for (int k = 0; k < n; ++k) {
      if (k == i || k == f) continue;
      const double amp = real(v(f, k) * v(k, m) * v(m, i));
      if (std::abs(amp) < kPrune) continue;
      sum += amp / (denominator(e_i, basis.energy(k), basis.labels[std::size_t(k)]) *
                    denominator(e_i, basis.energy(m), basis.labels[std::size_t(m)]));
    }
  }
  return sum;
}

double w11_analytic(double lambda) {
  if (lambda < 0) throw InvalidArgument("lambda must be non-negative");
  return std::numbers::pi * lambda * lambda / 2.0;
}

double w22_analytic(double lambda, double omega_drive, double delta_a, double omega_b) {
  if (lambda < 0) throw InvalidArgument("lambda must be non-negative");
  const double d1 = 2.0 * omega_drive - delta_a - omega_b;
  const double d2 = delta_a + omega_b;
  if (std::abs(d1) < kResonant || std::abs(d2) < kResonant)
    throw InvalidArgument("w22_analytic: singular denominator");
  const double s = 1.0 / d1 + 1.0 / d2;
  return std::numbers::pi / 2.0 * std::pow(lambda, 4) * s * s;
}

double rate_from_gap(double gap) {
  if (gap < 0) throw InvalidArgument("gap must be non-negative");
  return 2.0 * std::numbers::pi * (gap / 2.0) * (gap / 2.0);
}

RateComparison compare_rates(const ModelParams& params, const HilbertSpace& space, int quanta,
                             const std::vector<double>& lambda_grid,
                             std::pair<double, double> bracket,
                             const AnticrossingOptions& options) {
  if (quanta != 1 && quanta != 2) throw InvalidArgument("rate comparison supports n = 1 or 2");
  const std::pair<Label, Label> pair{{0, 0, +1}, {quanta, quanta, -1}};
  RateComparison out;
  out.lambda_grid = lambda_grid;
  for (double lambda : lambda_grid) {
    if (!(lambda > 0)) throw InvalidArgument("rate comparison needs lambda > 0");
    ModelParams p = params;
    p.lambda = lambda;
    const Anticrossing ac = locate_anticrossing(p, space, pair, bracket, options);
    out.omega_star.push_back(ac.omega_star);
    out.gap.push_back(ac.gap);
    out.numeric.push_back(rate_from_gap(ac.gap));
    out.analytic.push_back(quanta == 1 ? w11_analytic(lambda)
                                       : w22_analytic(lambda, ac.omega_star, p.delta_a, p.omega_b));
  }
  return out;
}

}  // namespace tripartite
