#include "ktop/correlation.hpp"

#include <algorithm>
#include <cmath>

namespace ktop {

namespace {

void check_residue(Complex value, const char* what) {
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw NumericalInvariantError(std::string(what) + " has imaginary residue " +
                                  std::to_string(value.imag()));
  }
}

// Sum of d over the square block [lo, hi] x [lo, hi].
Complex block_sum(const CMatrix& d, int lo, int hi) {
  const Index n = hi - lo + 1;
  return d.block(lo, lo, n, n).sum();
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  if (syy > 0.0) {
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  } else {
    fit.r_squared = ss_res == 0.0 ? 1.0 : 0.0;
  }
  return fit;
}

}  // namespace

CMatrix heisenberg_correlation(const SingleTopFloquet& top, const SubsystemState& psi0, int window) {
  if (window < 1) throw std::invalid_argument("correlation window must be at least 1");
  const Index d = top.u.rows();
  if (psi0.dim() != d) throw std::invalid_argument("initial state does not match the top");
  const SpinQuantum spin = top.spin;
  const Index cols = window + 1;

  Eigen::VectorXd m(d);
  for (Index i = 0; i < d; ++i) m[i] = spin.m(i);

  // phi_n = U^n psi0 in column n, w_n = Jz phi_n
  CMatrix phi(d, cols);
  phi.col(0) = psi0.amplitudes();
  for (Index n = 1; n < cols; ++n) phi.col(n).noalias() = top.u * phi.col(n - 1);
  const CMatrix w = m.asDiagonal() * phi;

  Eigen::VectorXd mean(cols);
  for (Index n = 0; n < cols; ++n) mean[n] = phi.col(n).dot(w.col(n)).real();

  const double scale = spin.j() > 0.0 ? 1.0 / (spin.j() * spin.j()) : 0.0;
  CMatrix c(cols, cols);

  // propagated.col(n) = U^tau w_n; only the first cols - tau columns are needed at lag tau
  CMatrix propagated = w;
  CMatrix scratch;
  for (Index tau = 0; tau < cols; ++tau) {
    const Index count = cols - tau;
    for (Index n = 0; n < count; ++n) {
      const Complex second = w.col(n + tau).dot(propagated.col(n));
      c(n + tau, n) = scale * (second - mean[n + tau] * mean[n]);
    }
    if (count > 1) {
      scratch.noalias() = top.u * propagated.leftCols(count - 1);
      propagated.leftCols(count - 1) = scratch;
    }
  }
  for (Index a = 0; a < cols; ++a) {
    c(a, a) = Complex(c(a, a).real(), 0.0);
    for (Index b = a + 1; b < cols; ++b) c(a, b) = std::conj(c(b, a));
  }
  return c;
}

CorrelationTable d_kernel(CMatrix c1, CMatrix c2) {
  if (c1.rows() != c1.cols() || c2.rows() != c2.cols()) {
    throw std::invalid_argument("correlation kernels must be square");
  }
  if (c1.rows() != c2.rows()) throw std::invalid_argument("correlation windows differ");
  if (c1.rows() < 1) throw std::invalid_argument("empty correlation kernel");
  CMatrix d = c1.cwiseProduct(c2);
  return {std::move(c1), std::move(c2), std::move(d)};
}

CorrelationTable correlation_table(const SingleTopFloquet& top1, const SubsystemState& psi1,
                                   const SingleTopFloquet& top2, const SubsystemState& psi2,
                                   int window) {
  return d_kernel(heisenberg_correlation(top1, psi1, window),
                  heisenberg_correlation(top2, psi2, window));
}

double entropy_prefactor(double epsilon, SpinQuantum spin) {
  return 2.0 * epsilon * epsilon * spin.j() * spin.j();
}

double pt_entropy(const CorrelationTable& table, double epsilon, SpinQuantum spin, int t) {
  if (t < 0 || t > table.window()) {
    throw std::out_of_range("pt_entropy: t = " + std::to_string(t) + " outside window " +
                            std::to_string(table.window()));
  }
  if (t == 0) return 0.0;
  const Complex sum = block_sum(table.d, 1, t);
  check_residue(sum, "perturbative double sum");
  return entropy_prefactor(epsilon, spin) * sum.real();
}

PtPrediction pt_prediction(const CorrelationTable& table, double epsilon, SpinQuantum spin) {
  PtPrediction out;
  out.s0 = entropy_prefactor(epsilon, spin);
  const int window = table.window();
  out.series.assign(static_cast<std::size_t>(window) + 1, 0.0);
  // S(t) = S(t-1) + S0 [d(t,t) + 2 Re sum_{n=1}^{t-1} d(t,n)]
  double running = 0.0;
  for (int t = 1; t <= window; ++t) {
    double row = table.d(t, t).real();
    for (int n = 1; n < t; ++n) row += 2.0 * table.d(t, n).real();
    running += row;
    out.series[static_cast<std::size_t>(t)] = out.s0 * running;
  }
  return out;
}

double pt_rate(const CorrelationTable& table, double s0, int t_start, int t_end) {
  if (t_start < 0 || t_start >= t_end || t_end > table.window()) {
    throw std::invalid_argument("pt_rate: need 0 <= t_start < t_end <= window");
  }
  const Complex sum = block_sum(table.d, t_start, t_end);
  check_residue(sum, "rate double sum");
  return s0 / static_cast<double>(t_end - t_start) * sum.real();
}

double coth_rate(double s0, double d0, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("coth_rate: gamma must be positive");
  return s0 * d0 / std::tanh(0.5 * gamma);
}

RateFit fit_linear_region(const EntropySeries& series, const WindowPolicy& policy) {
  const auto& samples = series.samples;
  if (samples.size() < 10) {
    throw std::invalid_argument("fit_linear_region: need at least 10 samples, got " +
                                std::to_string(samples.size()));
  }
  auto index_of = [&](int t) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].t == t) return i;
    return std::nullopt;
  };

  std::optional<std::size_t> first;
  if (policy.t_start) {
    first = index_of(*policy.t_start);
    if (!first) throw WindowNotFound("t_start override is outside the series");
  } else if (policy.k && *policy.k >= policy.chaotic_k) {
    first = index_of(policy.chaotic_t_start);
    if (!first) throw WindowNotFound("default chaotic t_start is outside the series");
  } else {
    const double tol = policy.moment_tolerance;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (std::abs(samples[i].jz_mean) <= tol &&
          std::abs(samples[i].jz2_mean - 1.0 / 3.0) <= tol / 3.0) {
        first = i;
        break;
      }
    }
    if (!first) throw WindowNotFound("single-top moments never reach the uniform values");
  }

  std::size_t last = *first;
  if (policy.t_end) {
    const auto idx = index_of(*policy.t_end);
    if (!idx) throw WindowNotFound("t_end override is outside the series");
    last = *idx;
  } else {
    const double dim = static_cast<double>(series.subsystem_dim);
    const double cap = policy.saturation_fraction * (dim > 0.0 ? 1.0 - 1.0 / dim : 1.0);
    if (samples[*first].s_lin > cap) throw WindowNotFound("entropy is saturated at t_start");
    while (last + 1 < samples.size() && samples[last + 1].s_lin <= cap) ++last;
  }
  if (last < *first + 2) {
    throw WindowNotFound("window [" + std::to_string(samples[*first].t) + ", " +
                         std::to_string(samples[last].t) + "] holds fewer than 3 samples");
  }

  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = *first; i <= last; ++i) {
    x.push_back(static_cast<double>(samples[i].t));
    y.push_back(samples[i].s_lin);
  }
  const LineFit line = least_squares(x, y);
  RateFit fit;
  fit.t_start = samples[*first].t;
  fit.t_end = samples[last].t;
  fit.gamma_raw = line.slope;
  fit.gamma_scaled = series.s0 > 0.0 ? line.slope / series.s0 : 0.0;
  fit.quality = line.r_squared;
  return fit;
}

std::string to_string(DecayStatus status) {
  switch (status) {
    case DecayStatus::fitted:
      return "fitted";
    case DecayStatus::faster_than_resolvable:
      return "faster_than_resolvable";
    case DecayStatus::not_decaying:
      return "not_decaying";
  }
  return "unknown";
}

DecayFit fit_exponential_decay(const CorrelationTable& table, int t_ref,
                               const DecayFitOptions& options) {
  const int window = table.window();
  if (t_ref < 0 || window < t_ref + 5) {
    throw std::invalid_argument("fit_exponential_decay: window must reach t_ref + 5");
  }
  const int max_lag = std::min(options.max_lag.value_or(window - t_ref), window - t_ref);
  const double zero_lag = std::abs(table.d(t_ref, t_ref));
  if (!(zero_lag > 0.0)) throw std::domain_error("zero-lag kernel vanishes at t_ref");

  std::vector<double> ratio(static_cast<std::size_t>(max_lag) + 1);
  for (int tau = 0; tau <= max_lag; ++tau) {
    ratio[static_cast<std::size_t>(tau)] = std::abs(table.d(t_ref + tau, t_ref)) / zero_lag;
  }

  std::size_t run = 1;
  while (run < ratio.size() && ratio[run] >= options.noise_floor && ratio[run] < ratio[run - 1]) {
    ++run;
  }
  const double revival =
      run < ratio.size() ? *std::max_element(ratio.begin() + static_cast<std::ptrdiff_t>(run), ratio.end())
                         : 0.0;

  DecayFit fit;
  fit.lags_used = static_cast<int>(run);
  if (revival >= options.revival_ratio) {
    fit.status = DecayStatus::not_decaying;
    return fit;
  }
  if (run < 3) {
    fit.status = DecayStatus::faster_than_resolvable;
    return fit;
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t tau = 0; tau < run; ++tau) {
    x.push_back(static_cast<double>(tau));
    y.push_back(std::log(ratio[tau] * zero_lag));
  }
  const LineFit line = least_squares(x, y);
  fit.d0 = std::exp(line.intercept);
  fit.gamma = -line.slope;
  fit.r_squared = line.r_squared;
  return fit;
}

}  // namespace ktop
