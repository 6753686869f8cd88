#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fhn/equilibria.hpp"
#include "fhn/geometry.hpp"

namespace fhn::cli {

/// 17 significant digits, '.' decimal separator; nan and inf spelled out.
std::string format_double(double v);

/// RFC-4180 field: quoted when it holds a comma, quote, CR or LF, with
/// embedded quotes doubled.
std::string csv_field(std::string_view s);

/// Header plus rows, CRLF line ends.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& file, std::string_view text);

/// Phase portrait in world coordinates over a fixed window.
class SvgPortrait {
 public:
  SvgPortrait(Interval x, Interval y, int width_px = 800);

  void trajectory(const std::vector<Vec2>& pts);
  void nullcline(const std::vector<Vec2>& pts);
  void cycle(const std::vector<Vec2>& pts, bool stable);
  void equilibrium(Vec2 p, EquilibriumKind kind);
  std::size_t elements() const noexcept { return body_.size(); }
  std::string str() const;

 private:
  void polyline(const std::vector<Vec2>& pts, std::string_view cls, bool closed);
  Vec2 px(Vec2 p) const;
  bool inside(Vec2 p) const;

  Interval x_, y_;
  int w_, h_;
  std::vector<std::string> body_;
};

}  // namespace fhn::cli
