#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ktop/entanglement.hpp"
#include "ktop/floquet.hpp"
#include "ktop/spin.hpp"

namespace ktop {

/// Normalized Jz covariance kernel of an uncoupled top,
///   c(m, n) = j^-2 (<Jz^m Jz^n> - <Jz^m><Jz^n>),   0 <= m, n <= window,
/// with Jz^n = (U^dagger)^n Jz U^n and expectations in psi0.
///
/// Uses phi_n = U^n psi0, w_n = Jz phi_n and <Jz^m Jz^n> = <w_m|U^(m-n)|w_n>
/// for m >= n; the upper triangle is filled by exact conjugation. Cost is
/// O(window^2) single-top matrix-vector products.
CMatrix heisenberg_correlation(const SingleTopFloquet& top, const SubsystemState& psi0, int window);

/// c1, c2 and their elementwise product d(m, n) = c1(m, n) c2(m, n).
struct CorrelationTable {
  CMatrix c1;
  CMatrix c2;
  CMatrix d;

  int window() const { return static_cast<int>(d.rows()) - 1; }
};

/// Throws std::invalid_argument on mismatched or non-square kernels.
CorrelationTable d_kernel(CMatrix c1, CMatrix c2);

/// Runs heisenberg_correlation for both tops of an uncoupled pair.
CorrelationTable correlation_table(const SingleTopFloquet& top1, const SubsystemState& psi1,
                                   const SingleTopFloquet& top2, const SubsystemState& psi2,
                                   int window);

double entropy_prefactor(double epsilon, SpinQuantum spin);  // S0 = 2 eps^2 j^2

/// S0 sum_{m=1}^t sum_{n=1}^t d(m, n). Throws std::out_of_range if t exceeds
/// the window and NumericalInvariantError on an imaginary residue > 1e-10.
double pt_entropy(const CorrelationTable& table, double epsilon, SpinQuantum spin, int t);

/// Second-order prediction for every t = 0..window.
struct PtPrediction {
  double s0 = 0.0;
  std::vector<double> series;
};

PtPrediction pt_prediction(const CorrelationTable& table, double epsilon, SpinQuantum spin);

/// S0 / (t_end - t_start) * sum_{m,n = t_start}^{t_end} d(m, n).
double pt_rate(const CorrelationTable& table, double s0, int t_start, int t_end);

/// Gamma = S0 d0 coth(gamma / 2); throws std::invalid_argument for gamma <= 0.
double coth_rate(double s0, double d0, double gamma);

/// How the stationary [T', T''] window of an entropy series is chosen.
///
/// T' is the override if given; otherwise 5 when k >= 6, else the first step
/// whose <Jz>/j and <Jz^2>/j^2 are within moment_tolerance of the uniform
/// sphere values 0 and 1/3 (|<Jz>/j| <= tol, |<Jz^2>/j^2 - 1/3| <= tol / 3).
/// T'' is the override if given; otherwise the last step, contiguous from T',
/// with S_lin <= saturation_fraction * (1 - 1/dim).
struct WindowPolicy {
  std::optional<int> t_start;
  std::optional<int> t_end;
  std::optional<double> k;
  double moment_tolerance = 0.2;
  double chaotic_k = 6.0;
  int chaotic_t_start = 5;
  double saturation_fraction = 0.3;
};

struct RateFit {
  int t_start = 0;
  int t_end = 0;
  double gamma_raw = 0.0;     // slope of S_lin per step
  double gamma_scaled = 0.0;  // slope of S_lin / S0 per step (0 when S0 = 0)
  double quality = 0.0;       // coefficient of determination, clamped to [0, 1]
};

/// No window satisfies the policy (e.g. the moments never equilibrate).
class WindowNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares slope over the policy window. Throws std::invalid_argument for
/// series shorter than 10 samples and WindowNotFound when no window qualifies.
RateFit fit_linear_region(const EntropySeries& series, const WindowPolicy& policy = {});

enum class DecayStatus {
  fitted,
  /// fewer than three lags in the initial drop and no later revival
  faster_than_resolvable,
  /// the kernel returns close to its zero-lag magnitude; no exponential law
  not_decaying,
};

std::string to_string(DecayStatus status);

struct DecayFit {
  DecayStatus status = DecayStatus::fitted;
  double d0 = 0.0;         // fitted magnitude at zero lag (fitted only)
  double gamma = 0.0;      // decay rate per step (fitted only)
  double r_squared = 0.0;  // of ln|d| vs lag (fitted only)
  int lags_used = 0;
};

struct DecayFitOptions {
  /// lags with |d| below noise_floor * |d(t_ref, t_ref)| are not fitted
  double noise_floor = 1e-3;
  /// a ratio this large after the drop marks the kernel as not decaying
  double revival_ratio = 0.5;
  std::optional<int> max_lag;
};

/// Fits ln|d(t_ref + tau, t_ref)| = ln d0 - gamma tau over the initial drop:
/// lags from 0 while |d| stays above the noise floor and keeps decreasing.
/// Throws std::invalid_argument if the window is shorter than t_ref + 5.
DecayFit fit_exponential_decay(const CorrelationTable& table, int t_ref,
                               const DecayFitOptions& options = {});

}  // namespace ktop
