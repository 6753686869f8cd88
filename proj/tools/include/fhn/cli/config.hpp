#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fhn/vectorfield.hpp"

namespace fhn::cli {

struct ConfigKey {
  std::string_view name;
  std::string_view fallback;
  std::string_view help;
};

/// Every key accepted in config files and as --key flags.
const std::vector<ConfigKey>& config_keys();

/// "valid keys: a, b, ..." for usage messages.
std::string valid_keys_message();

/// Flat key=value settings. Values are kept as text and converted on read;
/// conversions that fail throw usage_error naming the key.
class Config {
 public:
  Config();

  void set(std::string_view key, std::string value);
  /// Lines of key=value; '#' starts a comment, blank lines are skipped.
  void load_file(const std::filesystem::path& file);
  void load_text(std::string_view text, std::string_view origin = "config");

  const std::string& str(std::string_view key) const;
  double num(std::string_view key) const;
  long integer(std::string_view key) const;

  FhnParams params() const;
  Stage stage() const;
  Param param(std::string_view key) const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

/// lo:hi:n
struct Span {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;
  double at(int i) const noexcept { return n > 1 ? lo + (hi - lo) * i / (n - 1) : lo; }
};
Span parse_span(std::string_view text, std::string_view key);

/// b:delta pairs separated by commas.
std::vector<std::pair<double, double>> parse_slices(std::string_view text, std::string_view key);

}  // namespace fhn::cli
