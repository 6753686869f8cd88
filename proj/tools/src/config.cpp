#include "fhn/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fhn/errors.hpp"

namespace fhn::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view text, std::string_view key) {
  const std::string_view t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw usage_error("invalid number for '" + std::string(key) + "': " + std::string(text));
  return v;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"a", "0", "parameter a"},
      {"b", "0", "parameter b"},
      {"c", "1", "parameter c"},
      {"gamma", "0.1", "parameter gamma"},
      {"delta", "0", "parameter delta"},
      {"stage", "full", "full, reversible_quadratic, rotated_quadratic, hopf_quadratic, cubic_lienard"},
      {"out", ".", "output directory"},
      {"jobs", "0", "sweep threads (0: FHN_BIFURC_JOBS or hardware)"},
      {"seed", "1", "seed of every random sample"},
      {"anchor", "O", "section anchor: O, A or x,y"},
      {"direction", "0", "section direction angle in radians"},
      {"s_min", "0.02", "cycle scan start"},
      {"s_max", "3", "cycle scan end"},
      {"n_scan", "60", "cycle scan samples"},
      {"tol", "1e-12", "integrator tolerance"},
      {"max_return_time", "500", "longest return considered"},
      {"cycle", "0", "index of the starting cycle for continue"},
      {"param", "gamma", "continuation parameter"},
      {"range_lo", "0", "continuation range start"},
      {"range_hi", "1", "continuation range end"},
      {"cont_direction", "1", "+1 or -1"},
      {"step", "0.01", "initial continuation step"},
      {"step_max", "0.05", "largest continuation step"},
      {"max_points", "400", "continuation point budget"},
      {"period_cap", "500", "period treated as a separatrix approach"},
      {"x_min", "-3", "portrait window"},
      {"x_max", "3", "portrait window"},
      {"y_min", "-3", "portrait window"},
      {"y_max", "3", "portrait window"},
      {"trajectories", "16", "portrait seed count"},
      {"traj_time", "30", "portrait integration time each way"},
      {"p1", "a", "first surface grid parameter"},
      {"p1_range", "0.298:0.306:3", "lo:hi:n of p1"},
      {"p2", "c", "second surface grid parameter"},
      {"p2_range", "0.143:0.147:3", "lo:hi:n of p2"},
      {"fold_param", "gamma", "fold parameter of the surface"},
      {"fold_s", "0.58", "section coordinate guess of the seed fold"},
      {"fold_mu", "0.5", "parameter guess of the seed fold"},
      {"loop", "small_O", "small_O, small_A, big or eight_loop"},
      {"gamma_lo", "0", "homoclinic search start"},
      {"gamma_hi", "1", "homoclinic search end"},
      {"offset", "1e-7", "separatrix launch offset"},
      {"n_samples", "41", "homoclinic fate samples"},
      {"grid", "config", "default (the standard grid) or config (sweep_* keys)"},
      {"sweep_a", "0:1:11", "lo:hi:n of a"},
      {"sweep_c", "0.1:1.1:11", "lo:hi:n of c"},
      {"sweep_gamma", "0:1:21", "lo:hi:n of gamma"},
      {"slices", "1:0.2,3:0.2", "b:delta pairs"},
      {"sweep_n_scan", "40", "samples per sweep section"},
      {"sweep_s_min", "1e-3", "innermost sweep scan point"},
      {"sweep_outer", "50", "outer scan radius (at least 5x the equilibrium spread)"},
      {"cycle_bound", "2", "largest admissible cycle count per nest"},
      {"suite", "all", "rotation, index, infinity, hopf, section, cusp, twocycle or all"},
      {"samples", "100000", "rotation suite sample count"},
      {"multistarts", "200", "cusp search starts"},
      {"search_budget", "400", "two-cycle search candidates"},
  };
  return keys;
}

std::string valid_keys_message() {
  std::string msg = "valid keys:";
  bool first = true;
  for (const auto& k : config_keys()) {
    msg += first ? " " : ", ";
    msg += k.name;
    first = false;
  }
  return msg;
}

Config::Config() {
  for (const auto& k : config_keys()) values_.emplace(std::string(k.name), std::string(k.fallback));
}

void Config::set(std::string_view key, std::string value) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw usage_error("unknown key '" + std::string(key) + "'; " + valid_keys_message());
  it->second = std::move(value);
}

void Config::load_text(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos)
      throw usage_error(std::string(origin) + ":" + std::to_string(number) +
                        ": expected key=value");
    set(trim(l.substr(0, eq)), std::string(trim(l.substr(eq + 1))));
  }
}

void Config::load_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw usage_error("cannot read config file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  load_text(ss.str(), file.string());
}

const std::string& Config::str(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw usage_error("unknown key '" + std::string(key) + "'");
  return it->second;
}

double Config::num(std::string_view key) const { return to_double(str(key), key); }

long Config::integer(std::string_view key) const {
  const std::string_view t = trim(str(key));
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw usage_error("invalid integer for '" + std::string(key) + "': " + std::string(t));
  return v;
}

FhnParams Config::params() const {
  return {num("a"), num("b"), num("c"), num("gamma"), num("delta")};
}

Stage Config::stage() const {
  const auto s = parse_stage(str("stage"));
  if (!s) throw usage_error("unknown stage '" + str("stage") + "'");
  return *s;
}

Param Config::param(std::string_view key) const {
  const auto p = parse_param(str(key));
  if (!p) throw usage_error("unknown parameter '" + str(key) + "' for " + std::string(key));
  return *p;
}

Span parse_span(std::string_view text, std::string_view key) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos)
    throw usage_error("expected lo:hi:n for '" + std::string(key) + "'");
  Span s;
  s.lo = to_double(text.substr(0, c1), key);
  s.hi = to_double(text.substr(c1 + 1, c2 - c1 - 1), key);
  const double n = to_double(text.substr(c2 + 1), key);
  if (!(n >= 1.0) || n != static_cast<int>(n) || !(s.lo <= s.hi) || !std::isfinite(s.lo) ||
      !std::isfinite(s.hi))
    throw usage_error("invalid span for '" + std::string(key) + "': " + std::string(text));
  s.n = static_cast<int>(n);
  return s;
}

std::vector<std::pair<double, double>> parse_slices(std::string_view text, std::string_view key) {
  std::vector<std::pair<double, double>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    const auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw usage_error("expected b:delta pairs for '" + std::string(key) + "'");
    out.emplace_back(to_double(item.substr(0, colon), key), to_double(item.substr(colon + 1), key));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace fhn::cli
