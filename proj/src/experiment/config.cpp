#include "ktop/experiment/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "ktop/experiment/output.hpp"
#include "ktop/spin.hpp"

namespace ktop::experiment {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view separators) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find_first_of(separators, pos);
    const auto piece = trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
    if (!piece.empty()) parts.push_back(piece);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) + "' is not a number");
  }
  return value;
}

long long parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                      "' is not an integer");
  }
  return value;
}

int parse_int(std::string_view key, std::string_view text) {
  const long long v = parse_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("key '" + std::string(key) + "' is out of range");
  }
  return static_cast<int>(v);
}

std::optional<int> parse_optional_int(std::string_view key, std::string_view text) {
  if (trim(text) == "auto") return std::nullopt;
  return parse_int(key, text);
}

// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding)
std::vector<double> parse_double_list(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ":");
    if (parts.size() != 3) throw ConfigError("key '" + std::string(key) + "': range needs start:stop:step");
    const double start = parse_double(key, parts[0]);
    const double stop = parse_double(key, parts[1]);
    const double stride = parse_double(key, parts[2]);
    if (!(stride > 0.0) || stop < start) {
      throw ConfigError("key '" + std::string(key) + "': range needs start <= stop and step > 0");
    }
    std::vector<double> out;
    const auto count = static_cast<long long>(std::floor((stop - start) / stride + 1e-9));
    for (long long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * stride);
    return out;
  }
  std::vector<double> out;
  for (auto piece : split(text, ",")) out.push_back(parse_double(key, piece));
  if (out.empty()) throw ConfigError("key '" + std::string(key) + "' needs at least one value");
  return out;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  std::vector<int> out;
  for (auto piece : split(text, ",")) out.push_back(parse_int(key, piece));
  if (out.empty()) throw ConfigError("key '" + std::string(key) + "' needs at least one value");
  return out;
}

InitialCondition parse_initial(std::string_view key, std::string_view text) {
  const auto parts = split(text, " ,\t");
  if (parts.size() == 2) {
    const double theta = parse_double(key, parts[0]);
    const double phi = parse_double(key, parts[1]);
    return {theta, phi, theta, phi};
  }
  if (parts.size() == 4) {
    return {parse_double(key, parts[0]), parse_double(key, parts[1]), parse_double(key, parts[2]),
            parse_double(key, parts[3])};
  }
  throw ConfigError("key '" + std::string(key) + "': an initial condition is 'theta phi' or "
                    "'theta1 phi1 theta2 phi2'");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_number(values[i]);
  }
  return out;
}

std::string format_initial(const InitialCondition& ic) {
  return format_number(ic.theta1) + ' ' + format_number(ic.phi1) + ' ' + format_number(ic.theta2) +
         ' ' + format_number(ic.phi2);
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_theta(double theta, const char* name) {
  check(theta >= 0.0 && theta <= std::numbers::pi, std::string(name) + " must lie in [0, pi]");
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (int i = 0; i <= 14; ++i) k_grid.push_back(3.0 + 0.5 * i);
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "j") c.j = parse_double(key, value);
  else if (key == "k1") c.k1 = parse_double(key, value);
  else if (key == "k2") c.k2 = parse_double(key, value);
  else if (key == "k") c.k1 = c.k2 = parse_double(key, value);
  else if (key == "epsilon") c.epsilons = parse_double_list(key, value);
  else if (key == "theta1") c.initial.theta1 = parse_double(key, value);
  else if (key == "phi1") c.initial.phi1 = parse_double(key, value);
  else if (key == "theta2") c.initial.theta2 = parse_double(key, value);
  else if (key == "phi2") c.initial.phi2 = parse_double(key, value);
  else if (key == "initial") c.initial = parse_initial(key, value);
  else if (key == "steps") c.steps = parse_int(key, value);
  else if (key == "t_start") c.t_start = parse_optional_int(key, value);
  else if (key == "t_end") c.t_end = parse_optional_int(key, value);
  else if (key == "husimi_theta") c.husimi_theta = parse_int(key, value);
  else if (key == "husimi_phi") c.husimi_phi = parse_int(key, value);
  else if (key == "t_snapshot") c.t_snapshot = parse_int(key, value);
  else if (key == "window") c.window = parse_int(key, value);
  else if (key == "t_refs") c.t_refs = parse_int_list(key, value);
  else if (key == "k_grid") c.k_grid = parse_double_list(key, value);
  else if (key == "initial_conditions") {
    c.initial_conditions.clear();
    if (value != "auto") {
      for (auto item : split(value, ";")) c.initial_conditions.push_back(parse_initial(key, item));
    }
  }
  else if (key == "num_initial") c.num_initial = parse_int(key, value);
  else if (key == "ic_candidates") c.ic_candidates = parse_int(key, value);
  else if (key == "chaotic_threshold") c.chaotic_threshold = parse_double(key, value);
  else if (key == "lyapunov_steps") c.lyapunov_steps = parse_int(key, value);
  else if (key == "samples") c.samples = parse_int(key, value);
  else if (key == "seed") {
    const long long s = parse_integer(key, value);
    check(s >= 0, "seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  else if (key == "out") c.out_dir = std::string(value);
  else if (key == "workers") c.workers = parse_int(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_assignment(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  apply_setting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void apply_config_text(ExperimentConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos <= text.size();) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      try {
        apply_assignment(config, line);
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  apply_config_text(config, body.str());
}

void validate(const ExperimentConfig& c) {
  try {
    SpinQuantum::from_j(c.j);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  check(c.j > 0.0, "j must be positive");
  check(!c.epsilons.empty(), "epsilon list is empty");
  for (double eps : c.epsilons) check(eps >= 0.0, "epsilon must be nonnegative");
  check_theta(c.initial.theta1, "theta1");
  check_theta(c.initial.theta2, "theta2");
  for (const auto& ic : c.initial_conditions) {
    check_theta(ic.theta1, "initial_conditions theta1");
    check_theta(ic.theta2, "initial_conditions theta2");
  }
  check(c.steps >= 0, "steps must be nonnegative");
  if (c.t_start) check(*c.t_start >= 0, "t_start must be nonnegative");
  if (c.t_start && c.t_end) check(*c.t_start < *c.t_end, "t_start must be below t_end");
  if (c.t_end) check(*c.t_end <= c.steps, "t_end exceeds steps");
  check(c.husimi_theta >= 2 && c.husimi_phi >= 2, "Husimi grid needs at least 2 nodes per axis");
  check(c.t_snapshot >= 0, "t_snapshot must be nonnegative");
  check(c.window >= 1, "window must be at least 1");
  for (int t : c.t_refs) check(t >= 0 && t <= c.window, "t_refs must lie in [0, window]");
  check(!c.k_grid.empty(), "k_grid is empty");
  check(c.num_initial >= 1, "num_initial must be at least 1");
  check(c.ic_candidates >= 1, "ic_candidates must be at least 1");
  check(c.lyapunov_steps >= 1000, "lyapunov_steps must be at least 1000");
  check(c.samples >= 1, "samples must be at least 1");
  check(c.workers >= 1, "workers must be at least 1");
}

std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("auto"); };
  out.emplace_back("j", format_number(c.j));
  out.emplace_back("k1", format_number(c.k1));
  out.emplace_back("k2", format_number(c.k2));
  out.emplace_back("epsilon", join(c.epsilons));
  out.emplace_back("initial", format_initial(c.initial));
  out.emplace_back("steps", std::to_string(c.steps));
  out.emplace_back("t_start", opt(c.t_start));
  out.emplace_back("t_end", opt(c.t_end));
  out.emplace_back("husimi_theta", std::to_string(c.husimi_theta));
  out.emplace_back("husimi_phi", std::to_string(c.husimi_phi));
  out.emplace_back("t_snapshot", std::to_string(c.t_snapshot));
  out.emplace_back("window", std::to_string(c.window));
  std::string refs;
  for (std::size_t i = 0; i < c.t_refs.size(); ++i) refs += (i ? "," : "") + std::to_string(c.t_refs[i]);
  out.emplace_back("t_refs", refs);
  out.emplace_back("k_grid", join(c.k_grid));
  std::string ics = "auto";
  if (!c.initial_conditions.empty()) {
    ics.clear();
    for (std::size_t i = 0; i < c.initial_conditions.size(); ++i) {
      ics += (i ? ";" : "") + format_initial(c.initial_conditions[i]);
    }
  }
  out.emplace_back("initial_conditions", ics);
  out.emplace_back("num_initial", std::to_string(c.num_initial));
  out.emplace_back("ic_candidates", std::to_string(c.ic_candidates));
  out.emplace_back("chaotic_threshold", format_number(c.chaotic_threshold));
  out.emplace_back("lyapunov_steps", std::to_string(c.lyapunov_steps));
  out.emplace_back("samples", std::to_string(c.samples));
  out.emplace_back("seed", std::to_string(c.seed));
  out.emplace_back("workers", std::to_string(c.workers));
  return out;
}

}  // namespace ktop::experiment
