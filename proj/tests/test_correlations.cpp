#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "tripartite/correlations.hpp"

using namespace tripartite;
using doctest::Approx;

namespace {

constexpr double kAnyState = std::numeric_limits<double>::infinity();

ModelParams fig3a() {
  ModelParams p;
  p.delta_a = 1.6;
  p.lambda = 0.15;
  p.omega_drive = 1.3;
  p.kappa_a = p.kappa_b = 0.25;
  p.gamma = 0.025;
  return p;
}

// Damped oscillator H = ω₀a†a with loss κ on a photon-only subspace.
Superoperator damped_mode(const HilbertSpace& s, double w0, double kappa) {
  const auto a = ladder_operator(s, Mode::photon);
  return Superoperator(w0 * number_operator(s, Mode::photon), {{a, kappa, ChannelKind::photon}});
}

// 2 Re ∫₀^T e^{iωτ} e^{(−iω₀−κ/2)τ} dτ in closed form.
double lorentzian_window(double w, double w0, double kappa, double T) {
  const Scalar z(-kappa / 2, w - w0);
  return 2.0 * ((std::exp(z * T) - 1.0) / z).real();
}

}  // namespace

TEST_CASE("vacuum has no emission") {
  const auto s = build_space(3, 1);
  const auto l = damped_mode(s, 1.0, 0.5);
  const auto vac = DensityMatrix::pure(basis_state(s, 0, 0, 0));
  const auto corr = two_time_correlation(l, vac, ladder_operator(s, Mode::photon), tau_grid(20, 64));
  CHECK(corr.values.cwiseAbs().maxCoeff() == 0.0);
  const auto spec = emission_spectrum(corr, RealVector::LinSpaced(11, 0, 2));
  CHECK(spec.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("damped oscillator correlation and lineshape") {
  const auto s = build_space(3, 1);
  const double w0 = 1.2, kappa = 0.2;
  const auto l = damped_mode(s, w0, kappa);
  const auto one = DensityMatrix::pure(basis_state(s, 0, 1, 0));
  const auto tau = tau_grid(120.0, 4096, 0.02);
  const auto corr = two_time_correlation(l, one, ladder_operator(s, Mode::photon), tau, {1e-11, 1e-13}, kAnyState);
  for (Eigen::Index k = 0; k < corr.tau.size(); k += 97) {
    const Scalar want = std::exp(Scalar(-kappa / 2, -w0) * corr.tau(k));
    CHECK(std::abs(corr.values(k) - want) < 1e-8);
  }
  const RealVector omega = RealVector::LinSpaced(401, 0.2, 2.2);
  const auto spec = emission_spectrum(corr, omega);
  for (Eigen::Index j = 0; j < omega.size(); j += 10) {
    const double want = lorentzian_window(omega(j), w0, kappa, corr.tau(corr.tau.size() - 1));
    CHECK(spec.values(j) == Approx(want).epsilon(1e-4));
  }
  const auto peak = spectral_peak(spec, 0.2, 2.2);
  CHECK(std::abs(peak.omega - w0) <= 0.5 * (omega(1) - omega(0)) + 1e-12);
  // Half maximum at ω₀ ± κ/2.
  CHECK(spec.values(peak.index + 20) == Approx(peak.value / 2).epsilon(1e-3));
  CHECK(spec.values(peak.index - 20) == Approx(peak.value / 2).epsilon(1e-3));
}

TEST_CASE("undecayed correlation is rejected") {
  const auto s = build_space(3, 1);
  const auto l = damped_mode(s, 1.0, 0.01);
  const auto one = DensityMatrix::pure(basis_state(s, 0, 1, 0));
  const auto corr = two_time_correlation(l, one, ladder_operator(s, Mode::photon), tau_grid(10, 101), {}, kAnyState);
  CHECK_THROWS_AS(emission_spectrum(corr, RealVector::LinSpaced(5, 0, 2)), NumericalError);
}

TEST_CASE("non-stationary input is rejected") {
  const auto s = build_space(3, 1);
  const auto l = damped_mode(s, 1.0, 0.5);
  const auto one = DensityMatrix::pure(basis_state(s, 0, 1, 0));
  CHECK_THROWS_AS(two_time_correlation(l, one, ladder_operator(s, Mode::photon), tau_grid(5, 11)),
                  InvalidArgument);
}

TEST_CASE("zero-delay correlation equals the equal-time moment") {
  const auto s = build_space(3, 3);
  const ModelParams p = fig3a();
  const Superoperator l(build_h_eff(p, s), model_channels(p, s));
  const auto rho = steady_state(l);
  for (Mode m : {Mode::photon, Mode::phonon}) {
    const auto op = ladder_operator(s, m);
    const auto corr = two_time_correlation(l, rho, op, tau_grid(4, 41));
    const Scalar moment = expectation(number_operator(s, m), rho);
    CHECK(std::abs(corr.values(0) - moment) < 1e-10);
    CHECK(std::abs(corr.values(0).imag()) < 1e-10);
  }
}

TEST_CASE("spectrum is converged in the delay step") {
  const auto s = build_space(3, 3);
  const ModelParams p = fig3a();
  const Superoperator l(build_h_eff(p, s), model_channels(p, s));
  const auto rho = steady_state(l);
  const auto op = ladder_operator(s, Mode::photon);
  const RealVector omega = RealVector::LinSpaced(9, 1.58, 1.62);
  const double tmax = 40.0 / 0.25;
  const auto coarse = emission_spectrum(two_time_correlation(l, rho, op, tau_grid(tmax, 2, 0.01)), omega);
  const auto fine = emission_spectrum(two_time_correlation(l, rho, op, tau_grid(tmax, 2, 0.005)), omega);
  const auto peak = spectral_peak(fine, 1.58, 1.62);
  CHECK(std::abs(coarse.values(peak.index) - peak.value) < 1e-6 * std::abs(peak.value));
}

TEST_CASE("cross correlation") {
  SUBCASE("product states give one") {
    const auto s = build_space(3, 2);
    const Matrix ra = ref::random_density(4, 11), rb = ref::random_density(3, 12);
    const Matrix rs = ref::random_density(2, 13);
    const DensityMatrix rho(s, ref::embed(rs, ra, rb));
    CHECK(cross_g2(rho) == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("pair mixture") {
    const auto s = build_space(2, 2);
    const double p = 0.1;
    Matrix m = Matrix::Zero(s.total_dim(), s.total_dim());
    m(s.index(0, 1, 1), s.index(0, 1, 1)) = p;
    m(s.index(0, 0, 0), s.index(0, 0, 0)) = 1 - p;
    CHECK(cross_g2(DensityMatrix(s, m)) == Approx(1.0 / p).epsilon(1e-12));
  }
  SUBCASE("invariant under mode phase rotations") {
    const auto s = build_space(3, 3);
    const ModelParams p = fig3a();
    const auto rho = steady_state(Superoperator(build_h_eff(p, s), model_channels(p, s)));
    Vector phase(s.total_dim());
    for (int i = 0; i < s.total_dim(); ++i) {
      const auto d = s.decode(i);
      phase(i) = std::exp(kI * (0.7 * d.n_a - 1.9 * d.n_b));
    }
    const Matrix u = phase.asDiagonal();
    const DensityMatrix rotated(s, u * rho.matrix() * u.adjoint());
    CHECK(cross_g2(rotated) == Approx(cross_g2(rho)).epsilon(1e-12));
    CHECK(cross_g2(rho) > 1.0);
  }
  SUBCASE("undefined without occupation") {
    const auto s = build_space(2, 2);
    CHECK_THROWS_AS(cross_g2(DensityMatrix::pure(basis_state(s, 0, 0, 0))), InvalidArgument);
    CHECK_THROWS_AS(cross_g2(DensityMatrix::pure(basis_state(s, 0, 1, 0))), InvalidArgument);
  }
}

TEST_CASE("delay grid") {
  const auto a = tau_grid(160.0);
  CHECK(a.size() == 4096);
  CHECK(a.front() == 0.0);
  CHECK(a.back() == Approx(160.0));
  const auto b = tau_grid(1600.0);
  CHECK(b.size() == 16001);
  CHECK(b[1] - b[0] <= 0.1 + 1e-12);
}

TEST_CASE("peak search window") {
  SpectrumSeries s{RealVector::LinSpaced(5, 0, 4), RealVector(5)};
  s.values << 1, 5, 2, 7, 3;
  CHECK(spectral_peak(s, 0, 2).omega == 1.0);
  CHECK(spectral_peak(s, 0, 4).index == 3);
}
