#include "tripartite/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

namespace tripartite {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt(values[i]);
    out_ << '\n';
  }
  void row(const std::string& lead, const std::vector<double>& values) {
    out_ << lead;
    for (double v : values) out_ << ',' << fmt(v);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError(name + ": " + e.what());
  }
}

std::pair<Label, Label> pair_of(const json& v) {
  return {parse_label(v.at(0).get<std::string>()), parse_label(v.at(1).get<std::string>())};
}

std::vector<Label> labels_of(const json& arr) {
  std::vector<Label> out;
  for (const auto& v : arr) out.push_back(parse_label(v.get<std::string>()));
  return out;
}

std::vector<double> time_grid(double t_max, double dt) {
  const long n = long(std::floor(t_max / dt + 1e-9));
  std::vector<double> t;
  for (long k = 0; k <= n; ++k) t.push_back(double(k) * dt);
  if (t_max - t.back() > 1e-9 * t_max) t.push_back(t_max);
  return t;
}

// Lowest order with a nonvanishing coupling, searched up to 3.
std::pair<int, double> leading_coupling(const ModelParams& p, const Label& i, const Label& f) {
  for (int order = 1; order <= 3; ++order) {
    const double v = effective_coupling(p, {i, f, order});
    if (std::abs(v) > 1e-14) return {order, v};
  }
  return {0, 0.0};
}

json event_json(std::uint64_t seed, const JumpEvent& e) {
  return {{"seed", seed}, {"time", e.time}, {"channel", to_string(e.channel)},
          {"quanta_removed", e.quanta_removed}};
}

struct Context {
  const CaseConfig& c;
  std::ostream& log;
  CaseOutcome& out;

  fs::path file(const std::string& name) {
    out.files.push_back((c.output_dir / name).string());
    return c.output_dir / name;
  }
  const json& knob(const char* key) const { return c.knobs.at(key); }
  void set_auto(const char* key, const json& value) { out.resolved[c.experiment][key] = value; }
};

ModelParams with_drive(Context& ctx) {
  ModelParams p = ctx.c.model;
  const json& res = ctx.c.knobs.contains("resonance") ? ctx.knob("resonance") : json();
  p.omega_drive = stage("resonance", [&] { return resolve_drive(p, ctx.c.space, res); });
  ctx.out.resolved["model"]["omega_drive"] = p.omega_drive;
  return p;
}

void run_scan(Context& ctx) {
  const auto& k = ctx.c.knobs;
  const RealVector grid = uniform_grid(k["omega_min"], k["omega_max"], k["omega_step"]);
  const int n = k["n_levels"];
  ctx.log << "scan: " << grid.size() << " drive values, " << n << " levels\n";
  const LevelScan scan = stage("scan", [&] { return scan_drive(ctx.c.model, ctx.c.space, grid, n + 1); });

  std::vector<std::string> header{"omega"};
  for (int i = 1; i <= n; ++i) header.push_back("E_" + std::to_string(i));
  Csv csv(ctx.file("levels.csv"), header);
  json labels = json::array();
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    std::vector<double> row{grid(g)};
    json at = json::array();
    for (int i = 0; i <= n; ++i) {
      if (i > 0) row.push_back(scan.levels(i, g));
      const auto& ll = scan.labels[std::size_t(g)][std::size_t(i)];
      at.push_back({{"label", ll.label.str()}, {"weight", ll.weight}});
    }
    csv.row(row);
    labels.push_back({{"omega", grid(g)}, {"levels", at}});
  }
  write_json(ctx.file("labels.json"), labels);

  json found = json::array();
  for (const auto& spec : k["anticrossings"]) {
    const auto pair = pair_of(spec["pair"]);
    const std::pair<double, double> bracket{spec["bracket"][0], spec["bracket"][1]};
    const Anticrossing ac = stage("anticrossing " + pair.first.str() + "/" + pair.second.str(),
                                  [&] { return locate_anticrossing(ctx.c.model, ctx.c.space, pair, bracket); });
    found.push_back({{"pair", {pair.first.str(), pair.second.str()}},
                     {"bracket", spec["bracket"]},
                     {"omega_star", ac.omega_star},
                     {"gap", ac.gap},
                     {"rate_from_gap", rate_from_gap(ac.gap)},
                     {"overlaps", {{ac.overlaps(0, 0), ac.overlaps(0, 1)}, {ac.overlaps(1, 0), ac.overlaps(1, 1)}}}});
    ctx.log << "  anticrossing " << pair.first.str() << "/" << pair.second.str()
            << ": omega* = " << fmt(ac.omega_star) << ", gap = " << fmt(ac.gap) << '\n';
  }
  write_json(ctx.file("anticrossings.json"), found);
  ctx.out.summary = {{"anticrossings", found}};
}

void run_rabi(Context& ctx) {
  const ModelParams p = with_drive(ctx);
  const Label init = parse_label(ctx.knob("initial").get<std::string>());
  const Label target = parse_label(ctx.knob("target").get<std::string>());
  std::vector<Label> pops = labels_of(ctx.knob("populations"));
  for (const Label& l : {init, target})
    if (std::find(pops.begin(), pops.end(), l) == pops.end()) pops.push_back(l);
  const auto times = time_grid(ctx.knob("t_max"), ctx.knob("dt"));
  ctx.log << "rabi: " << init.str() << " -> " << target.str() << " at omega = " << fmt(p.omega_drive) << '\n';

  const Operator h = build_h_eff(p, ctx.c.space);
  const EvolutionResult r = stage("closed evolution", [&] {
    return evolve_closed(h, dressed_state(ctx.c.space, init), times, {true, true, pops});
  });

  std::vector<std::string> header{"t", "norm", "n_a", "n_b", "parity"};
  for (const auto& l : pops) header.push_back("P_" + l.str());
  Csv csv(ctx.file("populations.csv"), header);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row;
    for (const auto& name : header) row.push_back(name == "t" ? times[i] : r.series(name)[i]);
    csv.row(row);
  }

  const auto& target_series = r.series("P_" + target.str());
  const Peak peak = first_peak(times, target_series);
  const auto [order, v] = stage("effective coupling", [&] { return leading_coupling(p, init, target); });
  double norm_drift = 0.0, odd = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    norm_drift = std::max(norm_drift, std::abs(r.series("norm")[i] - 1.0));
    const double n2 = r.series("norm")[i] * r.series("norm")[i];
    odd = std::max(odd, (n2 - r.series("parity")[i]) / 2.0);
  }
  json s = {{"omega_drive", p.omega_drive},
            {"coupling_order", order},
            {"effective_coupling", v},
            {"predicted_peak_time", order ? json(std::numbers::pi / (2.0 * std::abs(v))) : json(nullptr)},
            {"first_peak_found", peak.found},
            {"first_peak_time", peak.time},
            {"first_peak_population", peak.value},
            {"max_population", *std::max_element(target_series.begin(), target_series.end())},
            {"max_norm_drift", norm_drift},
            {"max_parity_leakage", odd}};
  write_json(ctx.file("summary.json"), s);
  ctx.out.summary = s;
}

void run_evolve(Context& ctx) {
  const ModelParams p = with_drive(ctx);
  const auto times = time_grid(ctx.knob("t_max"), ctx.knob("dt"));
  const auto pops = labels_of(ctx.knob("populations"));
  const Superoperator l = liouvillian(build_h_eff(p, ctx.c.space), model_channels(p, ctx.c.space));
  const StateVector psi0 = initial_state(ctx.c.space, ctx.knob("initial"));
  ctx.log << "evolve: " << times.size() << " samples to t = " << fmt(times.back()) << '\n';
  const EvolutionResult r = stage("open evolution", [&] {
    return evolve_open(l, DensityMatrix::pure(psi0), times, {true, true, pops});
  });

  std::vector<std::string> header{"t", "trace", "hermiticity", "n_a", "n_b", "parity"};
  for (const auto& lab : pops) header.push_back("P_" + lab.str());
  Csv csv(ctx.file("timeseries.csv"), header);
  double trace_drift = 0.0, herm = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row;
    for (const auto& name : header) row.push_back(name == "t" ? times[i] : r.series(name)[i]);
    csv.row(row);
    trace_drift = std::max(trace_drift, std::abs(r.series("trace")[i] - 1.0));
    herm = std::max(herm, r.series("hermiticity")[i]);
  }
  json s = {{"omega_drive", p.omega_drive},
            {"max_trace_drift", trace_drift},
            {"max_hermiticity_error", herm},
            {"final_residual", residual_norm(l, *r.final_density)}};
  write_json(ctx.file("summary.json"), s);
  ctx.out.summary = s;
}

json steady_report(const Superoperator& l, const DensityMatrix& rho, const std::vector<Label>& pops) {
  const HilbertSpace& space = rho.space();
  json j = {{"n_a", expectation(number_operator(space, Mode::photon), rho).real()},
            {"n_b", expectation(number_operator(space, Mode::phonon), rho).real()},
            {"residual", residual_norm(l, rho)},
            {"min_eigenvalue", rho.min_eigenvalue()}};
  try {
    j["g2_ab"] = cross_g2(rho);
  } catch (const InvalidArgument&) {
    j["g2_ab"] = nullptr;
  }
  json p = json::object();
  for (const auto& lab : pops) p[lab.str()] = population(rho, lab);
  j["populations"] = p;
  return j;
}

void run_steady(Context& ctx) {
  const ModelParams p = with_drive(ctx);
  const Superoperator l = liouvillian(build_h_eff(p, ctx.c.space), model_channels(p, ctx.c.space));
  ctx.log << "steady: Liouvillian of dimension " << l.matrix().rows() << '\n';
  const DensityMatrix rho = stage("steady state", [&] { return steady_state(l); });
  json s = steady_report(l, rho, labels_of(ctx.knob("populations")));
  s["omega_drive"] = p.omega_drive;
  write_json(ctx.file("steady.json"), s);
  ctx.out.summary = s;
}

void run_spectrum(Context& ctx) {
  const ModelParams p = with_drive(ctx);
  const auto& k = ctx.c.knobs;
  const double tau_max = k["tau_max"].is_null() ? default_tau_max(p) : k["tau_max"].get<double>();
  ctx.set_auto("tau_max", tau_max);
  const auto tau = tau_grid(tau_max, k["tau_points"], k["tau_max_step"]);
  const RealVector omega = uniform_grid(k["omega_min"], k["omega_max"], k["omega_step"]);
  const Superoperator l = liouvillian(build_h_eff(p, ctx.c.space), model_channels(p, ctx.c.space));
  ctx.log << "spectrum: steady state, then " << tau.size() << " lag samples to tau = " << fmt(tau_max) << '\n';
  const DensityMatrix rho = stage("steady state", [&] { return steady_state(l); });

  const Operator a = ladder_operator(ctx.c.space, Mode::photon);
  const Operator b = ladder_operator(ctx.c.space, Mode::phonon);
  const CorrelationSeries ca = stage("photon correlation", [&] { return two_time_correlation(l, rho, a, tau); });
  const CorrelationSeries cb = stage("phonon correlation", [&] { return two_time_correlation(l, rho, b, tau); });
  const SpectrumSeries sa = stage("photon spectrum", [&] { return emission_spectrum(ca, omega); });
  const SpectrumSeries sb = stage("phonon spectrum", [&] { return emission_spectrum(cb, omega); });

  Csv csv(ctx.file("spectrum.csv"), {"omega", "S_a", "S_b"});
  for (Eigen::Index j = 0; j < omega.size(); ++j) csv.row({omega(j), sa.values(j), sb.values(j)});

  const SpectralPeak pa = spectral_peak(sa, omega(0), omega(omega.size() - 1));
  const SpectralPeak pb = spectral_peak(sb, omega(0), omega(omega.size() - 1));
  json s = {{"omega_drive", p.omega_drive},
            {"omega_step", k["omega_step"]},
            {"tau_max", tau_max},
            {"tau_samples", tau.size()},
            {"photon_peak", pa.omega},
            {"phonon_peak", pb.omega},
            {"photon_peak_offset_steps", (pa.omega - p.delta_a) / k["omega_step"].get<double>()},
            {"phonon_peak_offset_steps", (pb.omega - p.omega_b) / k["omega_step"].get<double>()},
            {"photon_decay_ratio", std::abs(ca.values(ca.values.size() - 1)) / std::abs(ca.values(0))},
            {"phonon_decay_ratio", std::abs(cb.values(cb.values.size() - 1)) / std::abs(cb.values(0))},
            {"steady", steady_report(l, rho, {})}};
  write_json(ctx.file("peaks.json"), s);
  ctx.out.summary = s;
}

void run_g2_sweep(Context& ctx) {
  Csv csv(ctx.file("g2.csv"), {"lambda", "omega_drive", "n_a", "n_b", "g2_ab"});
  json rows = json::array();
  for (const auto& lv : ctx.knob("lambda_grid")) {
    ModelParams p = ctx.c.model;
    p.lambda = lv.get<double>();
    p.omega_drive = stage("resonance", [&] { return resolve_drive(p, ctx.c.space, ctx.knob("resonance")); });
    const Superoperator l = liouvillian(build_h_eff(p, ctx.c.space), model_channels(p, ctx.c.space));
    const DensityMatrix rho = stage("steady state", [&] { return steady_state(l); });
    json r = steady_report(l, rho, {});
    const double g2 = r["g2_ab"].is_null() ? std::nan("") : r["g2_ab"].get<double>();
    csv.row({p.lambda, p.omega_drive, r["n_a"], r["n_b"], g2});
    rows.push_back({{"lambda", p.lambda}, {"omega_drive", p.omega_drive}, {"g2_ab", r["g2_ab"]}});
    ctx.log << "  lambda " << fmt(p.lambda) << ": g2_ab = " << fmt(g2) << '\n';
  }
  ctx.out.summary = {{"points", rows}};
  write_json(ctx.file("summary.json"), ctx.out.summary);
}

void run_rates(Context& ctx) {
  const int quanta = ctx.knob("quanta");
  const auto grid = ctx.knob("lambda_grid").get<std::vector<double>>();
  const std::pair<double, double> bracket{ctx.knob("bracket")[0], ctx.knob("bracket")[1]};
  const RateComparison rc = stage("rate comparison", [&] {
    return compare_rates(ctx.c.model, ctx.c.space, quanta, grid, bracket);
  });
  Csv csv(ctx.file("rates.csv"), {"lambda", "omega_star", "gap", "W_analytic", "W_numeric", "rel_error"});
  json rows = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double rel = (rc.numeric[i] - rc.analytic[i]) / rc.analytic[i];
    csv.row({grid[i], rc.omega_star[i], rc.gap[i], rc.analytic[i], rc.numeric[i], rel});
    rows.push_back({{"lambda", grid[i]}, {"W_analytic", rc.analytic[i]}, {"W_numeric", rc.numeric[i]},
                    {"rel_error", rel}});
  }
  ctx.out.summary = {{"quanta", quanta}, {"points", rows}};
  write_json(ctx.file("summary.json"), ctx.out.summary);
}

void write_events(std::ofstream& out, const std::vector<TrajectoryRecord>& records, const json& extra) {
  for (const auto& rec : records)
    for (const auto& e : rec.events) {
      json j = event_json(rec.seed, e);
      for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
      out << j.dump() << '\n';
    }
}

void run_trajectory_set(Context& ctx) {
  const ModelParams p = with_drive(ctx);
  const auto& k = ctx.c.knobs;
  TrajectoryOptions opt;
  opt.sample_times = time_grid(k["t_max"], k["dt"]);
  opt.observables = {true, true, labels_of(k["populations"])};
  const auto channels = model_channels(p, ctx.c.space);
  ctx.log << "trajectories: " << k["n_traj"] << " runs to t = " << fmt(k["t_max"]) << '\n';
  const auto records = stage("trajectories", [&] {
    return run_trajectories(build_h_eff(p, ctx.c.space), channels, initial_state(ctx.c.space, k["initial"]),
                            k["t_max"], k["n_traj"], k["seed"].get<std::uint64_t>(), opt);
  });

  std::ofstream ev(ctx.file("events.jsonl"));
  write_events(ev, records, json::object());

  std::vector<std::string> header{"seed", "t", "n_a", "n_b"};
  for (const auto& l : opt.observables.populations) header.push_back("P_" + l.str());
  Csv csv(ctx.file("populations.csv"), header);
  const std::size_t n_write = std::min<std::size_t>(records.size(), k["write_populations"].get<std::size_t>());
  for (std::size_t j = 0; j < n_write; ++j) {
    const auto& rec = records[j];
    for (std::size_t i = 0; i < rec.sample_times.size(); ++i) {
      std::vector<double> row{rec.sample_times[i]};
      for (std::size_t h = 2; h < header.size(); ++h) row.push_back(rec.samples.at(header[h])[i]);
      csv.row(std::to_string(rec.seed), row);
    }
  }

  json counts = {{"photon", 0}, {"photon_pair", 0}, {"phonon", 0}, {"atom", 0}};
  int photon_first = 0, phonon_first = 0, pair_not_two = 0, transient = 0;
  for (const auto& rec : records) {
    for (const auto& e : rec.events) {
      counts[to_string(e.channel)] = counts[to_string(e.channel)].get<int>() + 1;
      if (e.channel == ChannelKind::photon_pair && e.quanta_removed != 2) ++pair_not_two;
    }
    // Order of photon and phonon emission within each coincidence cluster.
    const JumpEvent* prev = nullptr;
    for (const auto& e : rec.events) {
      if (e.channel == ChannelKind::atom) continue;
      if (prev && prev->channel != e.channel &&
          (prev->channel == ChannelKind::phonon || e.channel == ChannelKind::phonon))
        (prev->channel == ChannelKind::phonon ? phonon_first : photon_first)++;
      prev = &e;
    }
    if (rec.samples.count("P_21-") && transient_between_phonon_and_pair(rec, "P_21-", 0.1)) ++transient;
  }
  json s = {{"omega_drive", p.omega_drive},
            {"n_traj", records.size()},
            {"event_counts", counts},
            {"photon_then_phonon", photon_first},
            {"phonon_then_photon", phonon_first},
            {"pair_events_not_removing_two", pair_not_two},
            {"trajectories_with_transient_21-", transient}};
  write_json(ctx.file("summary.json"), s);
  ctx.out.summary = s;
}

void run_events(Context& ctx) {
  const auto& k = ctx.c.knobs;
  const int quanta = k["quanta"];
  const double window = k["window_T"];
  const double coincidence =
      k["coincidence"].is_null() ? default_coincidence(ctx.c.model) : k["coincidence"].get<double>();
  ctx.set_auto("coincidence", coincidence);
  Csv csv(ctx.file("events.csv"), {"lambda", "omega_drive", "W_eff", "mean_events", "stderr", "total_jumps"});
  std::ofstream ev(ctx.file("events.jsonl"));
  std::vector<double> w, n;
  json rows = json::array(), drives = json::array();
  for (const auto& lv : k["lambda_grid"]) {
    ModelParams p = ctx.c.model;
    p.lambda = lv.get<double>();
    p.omega_drive = stage("resonance", [&] { return resolve_drive(p, ctx.c.space, k["resonance"]); });
    drives.push_back(p.omega_drive);
    const double w_eff = quanta == 1 ? w11_analytic(p.lambda)
                                     : w22_analytic(p.lambda, p.omega_drive, p.delta_a, p.omega_b);
    TrajectoryOptions opt;
    opt.observables = {false, false, {}};
    const auto records = stage("trajectories", [&] {
      return run_trajectories(build_h_eff(p, ctx.c.space), model_channels(p, ctx.c.space),
                              initial_state(ctx.c.space, k["initial"]), window, k["n_traj"],
                              k["seed"].get<std::uint64_t>(), opt);
    });
    const EmissionStats st = count_correlated_emissions(records, window, coincidence);
    std::size_t jumps = 0;
    for (const auto& r : records) jumps += r.events.size();
    write_events(ev, records, {{"lambda", p.lambda}});
    csv.row({p.lambda, p.omega_drive, w_eff, st.mean_events, st.stderr_, double(jumps)});
    w.push_back(w_eff);
    n.push_back(st.mean_events);
    rows.push_back({{"lambda", p.lambda}, {"W_eff", w_eff}, {"mean_events", st.mean_events},
                    {"stderr", st.stderr_}, {"per_trajectory", st.per_trajectory}});
    ctx.log << "  lambda " << fmt(p.lambda) << ": N_T = " << fmt(st.mean_events) << " +- " << fmt(st.stderr_) << '\n';
  }
  ctx.out.resolved["model"]["omega_drive"] = drives;
  const double rho = spearman(w, n);
  ctx.out.summary = {{"points", rows}, {"spearman", std::isnan(rho) ? json(nullptr) : json(rho)},
                     {"window_T", window}, {"coincidence", coincidence}};
  write_json(ctx.file("summary.json"), ctx.out.summary);
}

}  // namespace

double resolve_drive(const ModelParams& params, const HilbertSpace& space, const json& resonance) {
  if (resonance.is_null()) return params.omega_drive;
  const auto pair = pair_of(resonance.at("pair"));
  const std::pair<double, double> bracket{resonance.at("bracket")[0], resonance.at("bracket")[1]};
  return locate_anticrossing(params, space, pair, bracket).omega_star;
}

StateVector initial_state(const HilbertSpace& space, const json& spec) {
  const std::string s = spec.get<std::string>();
  if (s == "dressed_ground") return dressed_ground(space);
  return dressed_state(space, parse_label(s));
}

double default_tau_max(const ModelParams& p) {
  double slowest = 0.0;
  for (double r : {p.kappa_a, p.kappa_a2, p.kappa_b})
    if (r > 0 && (slowest == 0.0 || r < slowest)) slowest = r;
  if (slowest == 0.0) throw InvalidArgument("default tau_max needs a positive bosonic loss rate");
  return 40.0 / slowest;
}

Peak first_peak(const std::vector<double>& t, const std::vector<double>& y, double fraction) {
  Peak out;
  if (y.empty() || t.size() != y.size()) return out;
  const double level = fraction * *std::max_element(y.begin(), y.end());
  std::size_t i = 0;
  while (i < y.size() && y[i] < level) ++i;
  if (i == 0 || i == y.size()) return out;  // starts high or never rises
  std::size_t best = i;
  // Exit at half the entry level so ripples near the threshold do not end the excursion.
  for (; i < y.size() && y[i] >= 0.5 * level; ++i)
    if (y[i] > y[best]) best = i;
  if (i == y.size()) return out;  // excursion not finished inside the window
  return {true, t[best], y[best]};
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("spearman needs two equal series of length ≥ 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t m = i; m <= j; ++m) r[idx[m]] = 0.5 * double(i + j) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = double(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nan("");
  return sxy / std::sqrt(sxx * syy);
}

bool transient_between_phonon_and_pair(const TrajectoryRecord& record, const std::string& series,
                                       double threshold) {
  const auto it = record.samples.find(series);
  if (it == record.samples.end()) throw InvalidArgument("record has no series '" + series + "'");
  std::vector<const JumpEvent*> bosonic;
  for (const auto& e : record.events)
    if (e.channel != ChannelKind::atom) bosonic.push_back(&e);
  for (std::size_t i = 0; i < record.sample_times.size(); ++i) {
    if (it->second[i] <= threshold) continue;
    const double t = record.sample_times[i];
    auto next = std::upper_bound(bosonic.begin(), bosonic.end(), t,
                                 [](double v, const JumpEvent* e) { return v < e->time; });
    if (next == bosonic.begin() || next == bosonic.end()) continue;
    const ChannelKind before = (*(next - 1))->channel, after = (*next)->channel;
    if ((before == ChannelKind::phonon && after == ChannelKind::photon_pair) ||
        (before == ChannelKind::photon_pair && after == ChannelKind::phonon))
      return true;
  }
  return false;
}

RealVector uniform_grid(double lo, double hi, double step) {
  if (!(hi > lo) || !(step > 0)) throw InvalidArgument("grid needs lo < hi and step > 0");
  const long n = long(std::floor((hi - lo) / step + 0.5));
  RealVector g(n + 1);
  for (long k = 0; k <= n; ++k) g(k) = lo + double(k) * step;
  return g;
}

CaseOutcome run_case(const CaseConfig& config, std::ostream& log) {
  CaseOutcome out;
  out.resolved = config.resolved;
  fs::create_directories(config.output_dir);
  Context ctx{config, log, out};
  const std::string& e = config.experiment;
  if (e == "scan") run_scan(ctx);
  else if (e == "rabi") run_rabi(ctx);
  else if (e == "evolve") run_evolve(ctx);
  else if (e == "steady") run_steady(ctx);
  else if (e == "spectrum") run_spectrum(ctx);
  else if (e == "g2-sweep") run_g2_sweep(ctx);
  else if (e == "rates") run_rates(ctx);
  else if (e == "trajectories") run_trajectory_set(ctx);
  else if (e == "events") run_events(ctx);
  else throw InvalidArgument("unknown experiment '" + e + "'");
  return out;
}

json run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(config.output_dir);
  json cases = json::array(), summaries = json::array(), files = json::array();
  for (const auto& c : config.cases) {
    if (!c.name.empty()) log << "[" << c.name << "] ";
    CaseOutcome o = run_case(c, log);
    cases.push_back(o.resolved);
    summaries.push_back(o.summary);
    for (const auto& f : o.files) files.push_back(fs::relative(f, config.output_dir).string());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"version", TRIPARTITE_VERSION},
                   {"config", config.source.string()},
                   {"resolved", cases},
                   {"summaries", summaries},
                   {"artifacts", files},
                   {"wall_time_seconds", wall}};
  write_json(config.output_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace tripartite
