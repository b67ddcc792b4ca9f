#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tripartite/trajectories.hpp"

using namespace tripartite;
using doctest::Approx;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[std::size_t(i)] = lo + (hi - lo) * i / (n - 1);
  return t;
}

Operator zero_h(const HilbertSpace& s) { return Operator(s, SparseMatrix(s.total_dim(), s.total_dim())); }

ModelParams fig3a() {
  ModelParams p;
  p.delta_a = 1.6;
  p.lambda = 0.15;
  p.omega_drive = 1.3;
  p.kappa_a = p.kappa_b = 0.25;
  p.gamma = 0.025;
  return p;
}

TrajectoryRecord synthetic(std::vector<JumpEvent> events) {
  TrajectoryRecord r;
  r.events = std::move(events);
  return r;
}

}  // namespace

TEST_CASE("first-jump statistics of a decaying mode") {
  const auto s = build_space(1, 1);
  const double kappa = 0.5, t = 2.0;
  const std::vector<CollapseChannel> ch{{ladder_operator(s, Mode::photon), kappa, ChannelKind::photon}};
  TrajectoryOptions opt;
  opt.sample_times = {0.0, t};
  const int n = 2000;
  const auto recs = run_trajectories(zero_h(s), ch, basis_state(s, 0, 1, 0), t, n, 17, opt);
  int jumped = 0;
  for (const auto& r : recs) {
    CHECK(r.events.size() <= 1);
    if (!r.events.empty() && r.events.front().time <= t) ++jumped;
  }
  const double p = 1 - std::exp(-kappa * t);
  const double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(double(jumped) / n - p) < 3 * sigma);
}

TEST_CASE("no channels reproduces closed evolution") {
  const auto s = build_space(3, 3);
  const auto h = build_h_eff(fig3a(), s);
  const auto psi0 = dressed_state(s, {0, 0, 1});
  TrajectoryOptions opt;
  opt.sample_times = linspace(0, 40, 41);
  opt.observables = {true, true, {{0, 0, 1}, {1, 1, -1}}};
  for (Propagator prop : {Propagator::spectral, Propagator::runge_kutta}) {
    opt.propagator = prop;
    const auto recs = run_trajectories(h, {}, psi0, 40, 2, 5, opt);
    const auto closed = evolve_closed(h, psi0, opt.sample_times, opt.observables);
    for (const auto& r : recs) {
      CHECK(r.events.empty());
      for (const auto& name : {"P_00+", "P_11-", "n_a", "n_b"})
        for (std::size_t i = 0; i < opt.sample_times.size(); ++i)
          CHECK(std::abs(r.samples.at(name)[i] - closed.series(name)[i]) < 1e-7);
    }
  }
}

TEST_CASE("two-photon loss removes photons in pairs") {
  const auto s = build_space(3, 1);
  const auto a = ladder_operator(s, Mode::photon);
  const std::vector<CollapseChannel> ch{{a * a, 0.3, ChannelKind::photon_pair}};
  TrajectoryOptions opt;
  opt.sample_times = linspace(0, 30, 301);
  const auto recs = run_trajectories(zero_h(s), ch, basis_state(s, 0, 2, 0), 30, 50, 3, opt);
  int events = 0;
  for (const auto& r : recs) {
    for (const auto& e : r.events) {
      ++events;
      CHECK(e.channel == ChannelKind::photon_pair);
      CHECK(e.quanta_removed == 2);
    }
    const auto& n = r.samples.at("n_a");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const bool after = !r.events.empty() && opt.sample_times[i] > r.events.front().time;
      CHECK(n[i] == Approx(after ? 0.0 : 2.0).epsilon(1e-9));
    }
  }
  CHECK(events > 40);
}

TEST_CASE("model with two-photon dissipation emits no single photons") {
  ModelParams p = fig3a();
  p.kappa_a = 0.0;
  p.kappa_a2 = 0.25;
  const auto s = build_space(3, 3);
  TrajectoryOptions opt;
  opt.sample_times = linspace(0, 200, 201);
  const auto recs = run_trajectories(build_h_eff(p, s), model_channels(p, s), dressed_state(s, {0, 0, 1}), 200, 10, 9, opt);
  for (const auto& r : recs)
    for (const auto& e : r.events) {
      CHECK(e.channel != ChannelKind::photon);
      if (e.channel == ChannelKind::photon_pair) CHECK(e.quanta_removed == 2);
    }
}

TEST_CASE("determinism and seeding") {
  const auto s = build_space(3, 3);
  const ModelParams p = fig3a();
  TrajectoryOptions opt;
  opt.sample_times = linspace(0, 100, 11);
  const auto h = build_h_eff(p, s);
  const auto ch = model_channels(p, s);
  const auto psi0 = dressed_ground(s);
  const auto a = run_trajectories(h, ch, psi0, 100, 3, 42, opt);
  const auto b = run_trajectories(h, ch, psi0, 100, 3, 42, opt);
  const auto c = run_trajectories(h, ch, psi0, 100, 2, 43, opt);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(a[j].seed == 42 + j);
    REQUIRE(a[j].events.size() == b[j].events.size());
    for (std::size_t k = 0; k < a[j].events.size(); ++k) {
      CHECK(a[j].events[k].time == b[j].events[k].time);
      CHECK(a[j].events[k].channel == b[j].events[k].channel);
    }
  }
  // Trajectory j of base seed 43 is trajectory j + 1 of base seed 42.
  REQUIRE(c[0].events.size() == a[1].events.size());
  for (std::size_t k = 0; k < c[0].events.size(); ++k) CHECK(c[0].events[k].time == a[1].events[k].time);
}

TEST_CASE("propagators agree on jump times") {
  const auto s = build_space(3, 3);
  const ModelParams p = fig3a();
  TrajectoryOptions opt;
  opt.sample_times = linspace(0, 150, 16);
  opt.integrator = {1e-11, 1e-13};
  const auto h = build_h_eff(p, s);
  const auto ch = model_channels(p, s);
  opt.propagator = Propagator::spectral;
  const auto a = run_trajectories(h, ch, dressed_ground(s), 150, 2, 7, opt);
  opt.propagator = Propagator::runge_kutta;
  const auto b = run_trajectories(h, ch, dressed_ground(s), 150, 2, 7, opt);
  for (std::size_t j = 0; j < 2; ++j) {
    REQUIRE(a[j].events.size() == b[j].events.size());
    for (std::size_t k = 0; k < a[j].events.size(); ++k) {
      CHECK(a[j].events[k].time == Approx(b[j].events[k].time).epsilon(1e-6));
      CHECK(a[j].events[k].channel == b[j].events[k].channel);
    }
  }
}

TEST_CASE("kept states are normalized and populations are complete") {
  const auto s = build_space(2, 2);
  const ModelParams p = fig3a();
  TrajectoryOptions opt;
  opt.sample_times = linspace(0, 80, 81);
  opt.keep_states = true;
  const auto recs = run_trajectories(build_h_eff(p, s), model_channels(p, s), dressed_ground(s), 80, 3, 1, opt);
  std::vector<Label> all;
  for (int na = 0; na <= 2; ++na)
    for (int nb = 0; nb <= 2; ++nb)
      for (int sg : {1, -1}) all.push_back({na, nb, sg});
  for (const auto& r : recs) {
    for (const auto& v : r.states) CHECK(std::abs(v.norm() - 1.0) < 1e-10);
    const auto pops = trajectory_populations(r, s, all);
    for (std::size_t i = 0; i < opt.sample_times.size(); ++i) {
      double sum = 0;
      for (const auto& [name, series] : pops) sum += series[i];
      CHECK(sum == Approx(1.0).epsilon(1e-8));
    }
    CHECK_THROWS_AS(trajectory_populations(r, s, {{3, 0, 1}}), InvalidArgument);
  }
  for (std::size_t k = 1; k < recs[0].events.size(); ++k) CHECK(recs[0].events[k].time >= recs[0].events[k - 1].time);
}

TEST_CASE("ensemble statistics") {
  const auto s = build_space(2, 2);
  const ModelParams p = fig3a();
  TrajectoryOptions opt;
  opt.sample_times = linspace(0, 40, 21);
  const auto h = build_h_eff(p, s);
  const auto recs = run_trajectories(h, model_channels(p, s), dressed_ground(s), 40, 400, 1000, opt);

  SUBCASE("single trajectory has undefined error") {
    const auto one = ensemble_average({recs[0]}, "n_a");
    CHECK_FALSE(one.stderr_defined);
    CHECK(one.mean == recs[0].samples.at("n_a"));
    CHECK_THROWS_AS(ensemble_average(std::vector<TrajectoryRecord>{}, "n_a"), InvalidArgument);
    CHECK_THROWS_AS(ensemble_average(recs, "missing"), InvalidArgument);
  }
  SUBCASE("disjoint halves agree") {
    const std::vector<TrajectoryRecord> first(recs.begin(), recs.begin() + 200), second(recs.begin() + 200, recs.end());
    for (const auto& name : {"n_a", "n_b"}) {
      const auto x = ensemble_average(first, name), y = ensemble_average(second, name);
      for (std::size_t i = 0; i < x.times.size(); ++i) {
        const double sigma = std::hypot(x.stderr_[i], y.stderr_[i]);
        CHECK(std::abs(x.mean[i] - y.mean[i]) <= 3 * sigma + 1e-12);
      }
    }
  }
  SUBCASE("operator average needs kept states") {
    CHECK_THROWS_AS(ensemble_average(recs, number_operator(s, Mode::photon)), InvalidArgument);
  }
}

TEST_CASE("correlated emission counting") {
  using K = ChannelKind;
  CHECK(count_correlated_emissions({synthetic({})}, 100, 1).mean_events == 0.0);
  const auto pair = synthetic({{10.0, K::photon, 1}, {10.5, K::phonon, 1}});
  CHECK(count_correlated_emissions({pair}, 100, 1.0).mean_events == 1.0);
  CHECK(count_correlated_emissions({pair}, 100, 0.4).mean_events == 0.0);
  CHECK(count_correlated_emissions({pair}, 10.2, 1.0).mean_events == 0.0);
  const auto atom_between = synthetic({{10.0, K::photon, 1}, {10.4, K::atom, 1}, {10.8, K::phonon, 1}});
  CHECK(count_correlated_emissions({atom_between}, 100, 1.0).mean_events == 1.0);
  const auto photons_only = synthetic({{1.0, K::photon, 1}, {1.5, K::photon, 1}});
  CHECK(count_correlated_emissions({photons_only}, 100, 1.0).mean_events == 0.0);
  const auto chain = synthetic({{1.0, K::photon_pair, 2}, {1.8, K::phonon, 1}, {2.6, K::phonon, 1}, {9.0, K::phonon, 1},
                                {9.5, K::photon, 1}});
  const auto stats = count_correlated_emissions({chain, pair}, 100, 1.0);
  CHECK(stats.per_trajectory == std::vector<int>{2, 1});
  CHECK(stats.mean_events == 1.5);
  CHECK(stats.stderr_ == Approx(0.5));
  CHECK(stats.n_trajectories == 2);
}

TEST_CASE("default coincidence window") {
  ModelParams p;
  p.kappa_a = 0.25;
  CHECK(default_coincidence(p) == Approx(8.0));
  p.kappa_a = 0.0;
  p.kappa_a2 = 0.5;
  CHECK(default_coincidence(p) == Approx(4.0));
}
