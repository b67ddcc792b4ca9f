#include "tripartite/model.hpp"

#include <cmath>
#include <limits>

namespace tripartite {

void ModelParams::validate() const {
  if (!(omega_b > 0.0)) throw InvalidArgument("omega_b must be positive");
  if (lambda < 0.0) throw InvalidArgument("lambda must be non-negative");
  if (kappa_a < 0.0 || kappa_a2 < 0.0 || kappa_b < 0.0 || gamma < 0.0)
    throw InvalidArgument("decay rates must be non-negative");
}

EffectiveDerivation derive_effective_params(const PhysicalParams& phys) {
  if (!(phys.zpm > 0.0)) throw InvalidArgument("zero-point motion must be positive");
  if (!(std::abs(2.0 * phys.omega_p_drive) < std::abs(phys.delta_aL)))
    throw InvalidArgument("singular squeezing: |2 Omega_p| must be below |Delta_aL|");

  EffectiveDerivation out;
  out.r = std::atanh(2.0 * phys.omega_p_drive / phys.delta_aL) / 4.0;
  out.lambda_abc = phys.lambda_a_sigma * phys.wavenumber_k * phys.zpm;
  out.lambda_enhanced = out.lambda_abc * std::cosh(2.0 * out.r);
  out.lambda_prime = -out.lambda_abc * std::sinh(2.0 * out.r);
  out.delta_a_eff = std::sqrt(phys.delta_aL * phys.delta_aL -
                              4.0 * phys.omega_p_drive * phys.omega_p_drive);
  const double denom = out.delta_a_eff + phys.delta_sigmaL;
  out.rwa_ratio = denom > 0.0 ? std::abs(out.lambda_prime) / denom
                              : std::numeric_limits<double>::infinity();
  return out;
}

Operator build_h_eff(const ModelParams& params, const HilbertSpace& space) {
  params.validate();
  const Operator a = ladder_operator(space, Mode::photon);
  const Operator b = ladder_operator(space, Mode::phonon);
  const Operator sm = atom_operator(space, AtomKind::lowering);
  const Operator sz = atom_operator(space, AtomKind::sigma_z);
  const Operator ad = a.adjoint(), bd = b.adjoint(), sp = sm.adjoint();

  Operator h = params.delta_a * (ad * a) + (params.delta_sigma / 2.0) * sz +
               params.omega_b * (bd * b);
  h += params.lambda * ((ad * sm + a * sp) * (bd + b));
  h += params.omega_drive * (sm + sp);
  return h;
}

Operator dressed_interaction(const ModelParams& params, const HilbertSpace& space) {
  const Operator a = ladder_operator(space, Mode::photon);
  const Operator b = ladder_operator(space, Mode::phonon);
  const Operator ad = a.adjoint(), bd = b.adjoint();
  const Operator sz = atom_operator(space, AtomKind::dressed_sigma_z);
  const Operator s = atom_operator(space, AtomKind::dressed_lowering);

  const Operator even = ad * bd + ad * b + a * bd + a * b;
  const Operator odd = ad * bd + ad * b - a * bd - a * b;
  return (params.lambda / 2.0) * (even * sz + odd * (s.adjoint() - s));
}

Operator build_h_dressed(const ModelParams& params, const HilbertSpace& space) {
  params.validate();
  if (params.delta_sigma != 0.0)
    throw InvalidArgument("the dressed-frame Hamiltonian requires delta_sigma = 0");
  Operator h = params.delta_a * number_operator(space, Mode::photon) +
               params.omega_b * number_operator(space, Mode::phonon) +
               params.omega_drive * atom_operator(space, AtomKind::dressed_sigma_z);
  h += dressed_interaction(params, space);
  return h;
}

double bare_energy(const ModelParams& params, const Label& label) {
  return label.n_a * params.delta_a + label.n_b * params.omega_b +
         label.sign * params.omega_drive;
}

Resonance resonance_drive(int n_a, int n_b, const ModelParams& params) {
  if (n_a < 0 || n_b < 0) throw InvalidArgument("quanta numbers must be non-negative");
  const int total = n_a + n_b;
  return {(n_a * params.delta_a + n_b * params.omega_b) / 2.0, total % 2 == 0 && total >= 2};
}

DressedBasis dressed_basis(double delta_sigma, double omega_drive) {
  if (!(omega_drive > 0.0)) throw InvalidArgument("drive amplitude must be positive");
  const double root = std::sqrt(delta_sigma * delta_sigma + 4.0 * omega_drive * omega_drive);
  const double num = 2.0 * omega_drive * omega_drive;
  return {std::sqrt(num / (root * root + delta_sigma * root)),
          std::sqrt(num / (root * root - delta_sigma * root)), root / 2.0, -root / 2.0};
}

Operator boson_parity_operator(const HilbertSpace& space) {
  const int n = space.total_dim();
  SparseMatrix m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) {
    auto s = space.decode(i);
    m.insert(i, i) = (s.n_a + s.n_b) % 2 == 0 ? 1.0 : -1.0;
  }
  return {space, std::move(m)};
}

}  // namespace tripartite
