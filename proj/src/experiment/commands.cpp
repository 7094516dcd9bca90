#include "ktop/experiment/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

#include "ktop/entanglement.hpp"
#include "ktop/floquet.hpp"

namespace ktop::experiment {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SpinQuantum spin_of(const ExperimentConfig& c) { return SpinQuantum::from_j(c.j); }

CoupledState initial_state(SpinQuantum spin, const InitialCondition& ic) {
  return CoupledState::product(coherent_state(spin, ic.theta1, ic.phi1),
                               coherent_state(spin, ic.theta2, ic.phi2));
}

std::string eps_tag(double eps) { return "eps_" + format_short(eps); }

double scaled(double value, double s0) { return s0 > 0.0 ? value / s0 : 0.0; }

}  // namespace

CommandOutput cmd_evolve(const ExperimentConfig& c) {
  const SpinQuantum spin = spin_of(c);
  const CoupledState initial = initial_state(spin, c.initial);
  const auto series = parallel_map<EntropySeries>(
      c.epsilons.size(), c.workers, [&](std::size_t i) {
        return entropy_series(initial, build_coupled(spin, c.k1, c.k2, c.epsilons[i]), c.steps);
      });

  CommandOutput out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    CsvTable csv({"t", "s_vn", "s_lin", "s_lin_scaled"});
    for (const auto& s : series[i].samples) {
      csv.add_row({std::to_string(s.t), format_number(s.s_vn), format_number(s.s_lin),
                   format_number(scaled(s.s_lin, series[i].s0))});
    }
    const std::string tag = eps_tag(c.epsilons[i]);
    out.files.emplace_back("evolve_" + tag + ".csv", csv.str());
    out.metrics.emplace_back(tag + ".s0", format_number(series[i].s0));
    out.metrics.emplace_back(tag + ".final_s_lin", format_number(series[i].samples.back().s_lin));
  }
  return out;
}

CommandOutput cmd_correlate(const ExperimentConfig& c) {
  const SpinQuantum spin = spin_of(c);
  const auto tops = parallel_map<CMatrix>(2, c.workers, [&](std::size_t i) {
    const double k = i == 0 ? c.k1 : c.k2;
    const auto psi = i == 0 ? coherent_state(spin, c.initial.theta1, c.initial.phi1)
                            : coherent_state(spin, c.initial.theta2, c.initial.phi2);
    return heisenberg_correlation(build_single_top(spin, k), psi, c.window);
  });
  const CorrelationTable table = d_kernel(tops[0], tops[1]);

  CsvTable kernel({"t_ref", "tau", "abs_d", "re_d", "im_d"});
  CsvTable fits({"t_ref", "status", "d0", "gamma", "r_squared", "lags_used"});
  CommandOutput out;
  std::vector<double> ratios_at_two;
  for (int t_ref : c.t_refs) {
    for (int tau = 0; t_ref + tau <= table.window(); ++tau) {
      const Complex d = table.d(t_ref + tau, t_ref);
      kernel.add_row({std::to_string(t_ref), std::to_string(tau), format_number(std::abs(d)),
                      format_number(d.real()), format_number(d.imag())});
    }
    if (t_ref + 2 <= table.window()) {
      ratios_at_two.push_back(std::abs(table.d(t_ref + 2, t_ref)) / std::abs(table.d(t_ref, t_ref)));
    }
    if (t_ref + 5 <= table.window()) {
      const DecayFit fit = fit_exponential_decay(table, t_ref);
      const bool ok = fit.status == DecayStatus::fitted;
      fits.add_row({std::to_string(t_ref), to_string(fit.status), format_number(ok ? fit.d0 : kNaN),
                    format_number(ok ? fit.gamma : kNaN), format_number(ok ? fit.r_squared : kNaN),
                    std::to_string(fit.lags_used)});
    }
  }
  out.files.emplace_back("correlate.csv", kernel.str());
  out.files.emplace_back("correlate_fit.csv", fits.str());
  if (!ratios_at_two.empty()) {
    std::sort(ratios_at_two.begin(), ratios_at_two.end());
    const std::size_t n = ratios_at_two.size();
    const double median = n % 2 ? ratios_at_two[n / 2]
                                : 0.5 * (ratios_at_two[n / 2 - 1] + ratios_at_two[n / 2]);
    out.metrics.emplace_back("median_ratio_tau2", format_number(median));
  }
  return out;
}

CommandOutput cmd_husimi(const ExperimentConfig& c) {
  const SpinQuantum spin = spin_of(c);
  const double eps = c.epsilons.front();
  const CoupledState state =
      evolve(initial_state(spin, c.initial), build_coupled(spin, c.k1, c.k2, eps), c.t_snapshot);
  const ReducedDensity rho = reduce_first(state);
  const HusimiGrid grid = husimi(rho, c.husimi_theta, c.husimi_phi);

  CsvTable csv({"theta", "phi", "q"});
  for (Index it = 0; it < grid.q.rows(); ++it) {
    for (Index ip = 0; ip < grid.q.cols(); ++ip) {
      csv.add_row({format_number(grid.grid.theta[static_cast<std::size_t>(it)]),
                   format_number(grid.grid.phi[static_cast<std::size_t>(ip)]),
                   format_number(grid.q(it, ip))});
    }
  }
  const double uniform = 1.0 / static_cast<double>(spin.dim());
  CommandOutput out;
  out.files.emplace_back("husimi.csv", csv.str());
  out.metrics.emplace_back("t", std::to_string(c.t_snapshot));
  out.metrics.emplace_back("epsilon", format_number(eps));
  out.metrics.emplace_back("normalization", format_number(grid.normalization()));
  out.metrics.emplace_back("area_fraction_above_tenth_uniform",
                           format_number(grid.area_fraction_above(0.1 * uniform)));
  out.metrics.emplace_back("s_lin", format_number(linear_entropy(rho)));
  out.metrics.emplace_back("s0", format_number(entropy_prefactor(eps, spin)));
  return out;
}

std::vector<InitialCondition> rate_scan_initial_conditions(const ExperimentConfig& c) {
  if (!c.initial_conditions.empty()) return c.initial_conditions;
  const auto candidates = spiral_points(c.ic_candidates);
  const auto picked = pick_chaotic_sea(candidates, c.k_grid, c.num_initial, c.chaotic_threshold,
                                       c.lyapunov_steps);
  if (static_cast<int>(picked.size()) < c.num_initial) {
    throw std::runtime_error("only " + std::to_string(picked.size()) + " of " +
                             std::to_string(c.ic_candidates) +
                             " candidates lie in the chaotic sea of every k; raise ic_candidates");
  }
  std::vector<InitialCondition> out;
  for (const SpherePoint& p : picked) out.push_back({p.theta(), p.phi(), p.theta(), p.phi()});
  return out;
}

std::vector<RateScanRow> rate_scan(const ExperimentConfig& c,
                                   const std::vector<InitialCondition>& ics) {
  const SpinQuantum spin = spin_of(c);
  const double eps = c.epsilons.front();
  const std::size_t n_ic = ics.size();
  return parallel_map<RateScanRow>(c.k_grid.size() * n_ic, c.workers, [&](std::size_t i) {
    const double k = c.k_grid[i / n_ic];
    const InitialCondition& ic = ics[i % n_ic];
    RateScanRow row;
    row.k = k;
    row.init_id = static_cast<int>(i % n_ic);
    row.lambda_classical =
        lyapunov(SpherePoint::from_angles(ic.theta1, ic.phi1), k, c.lyapunov_steps).lambda;
    const EntropySeries series =
        entropy_series(initial_state(spin, ic), build_coupled(spin, k, k, eps), c.steps, false);
    WindowPolicy policy;
    policy.t_start = c.t_start;
    policy.t_end = c.t_end;
    policy.k = k;
    try {
      const RateFit fit = fit_linear_region(series, policy);
      row.gamma_raw = fit.gamma_raw;
      row.gamma_scaled = fit.gamma_scaled;
      row.quality = fit.quality;
      row.t_start = fit.t_start;
      row.t_end = fit.t_end;
    } catch (const WindowNotFound&) {
      row.gamma_raw = row.gamma_scaled = row.quality = kNaN;
      row.t_start = row.t_end = -1;
    }
    return row;
  });
}

CommandOutput cmd_rate_scan(const ExperimentConfig& c) {
  const auto ics = rate_scan_initial_conditions(c);
  const auto rows = rate_scan(c, ics);

  CsvTable csv({"k", "init_id", "gamma_raw", "gamma_scaled", "quality", "lambda_classical"});
  for (const auto& r : rows) {
    csv.add_row({format_number(r.k), std::to_string(r.init_id), format_number(r.gamma_raw),
                 format_number(r.gamma_scaled), format_number(r.quality),
                 format_number(r.lambda_classical)});
  }
  CsvTable init_csv({"init_id", "theta1", "phi1", "theta2", "phi2"});
  for (std::size_t i = 0; i < ics.size(); ++i) {
    init_csv.add_row({std::to_string(i), format_number(ics[i].theta1), format_number(ics[i].phi1),
                      format_number(ics[i].theta2), format_number(ics[i].phi2)});
  }
  CommandOutput out;
  out.files.emplace_back("rate_scan.csv", csv.str());
  out.files.emplace_back("rate_scan_initial_conditions.csv", init_csv.str());
  int missing = 0;
  for (const auto& r : rows) missing += std::isnan(r.gamma_raw) ? 1 : 0;
  out.metrics.emplace_back("rows", std::to_string(rows.size()));
  out.metrics.emplace_back("rows_without_window", std::to_string(missing));
  return out;
}

CommandOutput cmd_pt_compare(const ExperimentConfig& c) {
  const SpinQuantum spin = spin_of(c);
  const int horizon = std::max(c.steps, 1);
  const CorrelationTable table =
      correlation_table(build_single_top(spin, c.k1), coherent_state(spin, c.initial.theta1, c.initial.phi1),
                        build_single_top(spin, c.k2), coherent_state(spin, c.initial.theta2, c.initial.phi2),
                        horizon);
  const CoupledState initial = initial_state(spin, c.initial);
  const auto series = parallel_map<EntropySeries>(
      c.epsilons.size(), c.workers, [&](std::size_t i) {
        return entropy_series(initial, build_coupled(spin, c.k1, c.k2, c.epsilons[i]), c.steps, false);
      });

  CommandOutput out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const PtPrediction pt = pt_prediction(table, c.epsilons[i], spin);
    CsvTable csv({"t", "s_lin_exact_scaled", "s_lin_pt_scaled", "rel_dev"});
    double max_dev = 0.0;
    for (const auto& s : series[i].samples) {
      const double exact = scaled(s.s_lin, pt.s0);
      const double predicted = scaled(pt.series[static_cast<std::size_t>(s.t)], pt.s0);
      const double dev = predicted != 0.0 ? std::abs(exact - predicted) / std::abs(predicted)
                                          : (exact == 0.0 ? 0.0 : kNaN);
      if (s.t >= 5 && s.t <= 100 && !std::isnan(dev)) max_dev = std::max(max_dev, dev);
      csv.add_row({std::to_string(s.t), format_number(exact), format_number(predicted),
                   format_number(dev)});
    }
    const std::string tag = eps_tag(c.epsilons[i]);
    out.files.emplace_back("pt_compare_" + tag + ".csv", csv.str());
    out.metrics.emplace_back(tag + ".max_rel_dev_t5_100", format_number(max_dev));
  }
  return out;
}

CommandOutput cmd_classical_scan(const ExperimentConfig& c) {
  RegimeScanOptions options;
  options.samples = c.samples;
  options.steps = c.lyapunov_steps;
  options.chaotic_threshold = c.chaotic_threshold;
  options.seed = c.seed;
  const auto stats = parallel_map<RegimeStats>(c.k_grid.size(), c.workers, [&](std::size_t i) {
    return regime_scan(std::span(&c.k_grid[i], 1), options).front();
  });
  CsvTable csv({"k", "mean_lambda", "max_lambda", "chaotic_fraction", "samples", "regime"});
  for (const auto& s : stats) {
    csv.add_row({format_number(s.k), format_number(s.mean_lambda), format_number(s.max_lambda),
                 format_number(s.chaotic_fraction), std::to_string(s.samples), regime_label(s)});
  }
  CommandOutput out;
  out.files.emplace_back("classical_scan.csv", csv.str());
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"evolve",    "correlate",  "husimi",
                                              "rate-scan", "pt-compare", "classical-scan"};
  return names;
}

int run_command(std::string_view name, const ExperimentConfig& config) {
  try {
    validate(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  using Runner = CommandOutput (*)(const ExperimentConfig&);
  Runner runner = nullptr;
  if (name == "evolve") runner = cmd_evolve;
  else if (name == "correlate") runner = cmd_correlate;
  else if (name == "husimi") runner = cmd_husimi;
  else if (name == "rate-scan") runner = cmd_rate_scan;
  else if (name == "pt-compare") runner = cmd_pt_compare;
  else if (name == "classical-scan") runner = cmd_classical_scan;
  if (!runner) {
    std::cerr << "unknown command '" << name << "'\n";
    return kExitConfigError;
  }

  ManifestInfo info{std::string(name), echo(config), 0.0};
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    const CommandOutput output = runner(config);
    info.wall_seconds = elapsed();
    commit_outputs(config.out_dir, info, output);
    return kExitOk;
  } catch (const NumericalInvariantError& e) {
    info.wall_seconds = elapsed();
    std::cerr << "numerical invariant violated: " << e.what() << '\n';
    write_failure_manifest(config.out_dir, info, "numerical_invariant", e.what());
    return kExitInvariantViolation;
  } catch (const std::exception& e) {
    info.wall_seconds = elapsed();
    std::cerr << "error: " << e.what() << '\n';
    try {
      write_failure_manifest(config.out_dir, info, "runtime", e.what());
    } catch (const std::exception&) {
    }
    return kExitFailure;
  }
}

}  // namespace ktop::experiment
