#include "fhn/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fhn/errors.hpp"

namespace fhn::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw std::logic_error("csv row has " + std::to_string(row.size()) + " cells, header has " +
                           std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_text(const std::filesystem::path& file, std::string_view text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw usage_error("cannot write " + file.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw usage_error("write failed for " + file.string());
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

SvgPortrait::SvgPortrait(Interval x, Interval y, int width_px) : x_(x), y_(y), w_(width_px) {
  if (!(x.width() > 0.0) || !(y.width() > 0.0) || width_px <= 0)
    throw usage_error("portrait window must have positive extent");
  h_ = std::max(1, static_cast<int>(std::lround(width_px * y.width() / x.width())));
}

Vec2 SvgPortrait::px(Vec2 p) const {
  return {(p.x - x_.lo) / x_.width() * w_, (y_.hi - p.y) / y_.width() * h_};
}

bool SvgPortrait::inside(Vec2 p) const {
  return is_finite(p) && p.x >= x_.lo && p.x <= x_.hi && p.y >= y_.lo && p.y <= y_.hi;
}

void SvgPortrait::polyline(const std::vector<Vec2>& pts, std::string_view cls, bool closed) {
  // Split into runs inside the window.
  std::vector<std::vector<Vec2>> runs(1);
  for (const auto& p : pts) {
    if (inside(p)) {
      runs.back().push_back(px(p));
    } else if (!runs.back().empty()) {
      runs.emplace_back();
    }
  }
  const bool whole = closed && runs.size() == 1;
  for (const auto& r : runs) {
    if (r.size() < 2) continue;
    std::string e = whole ? "<polygon class=\"" : "<polyline class=\"";
    e += cls;
    e += "\" points=\"";
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) e += ' ';
      e += fmt(r[i].x) + "," + fmt(r[i].y);
    }
    e += "\"/>";
    body_.push_back(std::move(e));
  }
}

void SvgPortrait::trajectory(const std::vector<Vec2>& pts) { polyline(pts, "orbit", false); }
void SvgPortrait::nullcline(const std::vector<Vec2>& pts) { polyline(pts, "nullcline", false); }
void SvgPortrait::cycle(const std::vector<Vec2>& pts, bool stable) {
  polyline(pts, stable ? "cycle stable" : "cycle unstable", true);
}

void SvgPortrait::equilibrium(Vec2 p, EquilibriumKind kind) {
  if (!inside(p)) return;
  const Vec2 q = px(p);
  const std::string cx = fmt(q.x), cy = fmt(q.y);
  const double r = 5.0;
  std::string e;
  switch (kind) {
    case EquilibriumKind::saddle:
      e = "<path class=\"eq saddle\" d=\"M" + fmt(q.x - r) + "," + fmt(q.y - r) + "L" +
          fmt(q.x + r) + "," + fmt(q.y + r) + "M" + fmt(q.x - r) + "," + fmt(q.y + r) + "L" +
          fmt(q.x + r) + "," + fmt(q.y - r) + "\"/>";
      break;
    case EquilibriumKind::stable_node:
    case EquilibriumKind::unstable_node:
      e = "<circle class=\"eq " + std::string(to_string(kind)) + "\" cx=\"" + cx + "\" cy=\"" + cy +
          "\" r=\"" + fmt(r) + "\"/>";
      break;
    case EquilibriumKind::stable_focus:
    case EquilibriumKind::unstable_focus:
      e = "<rect class=\"eq " + std::string(to_string(kind)) + "\" x=\"" + fmt(q.x - r) +
          "\" y=\"" + fmt(q.y - r) + "\" width=\"" + fmt(2 * r) + "\" height=\"" + fmt(2 * r) +
          "\"/>";
      break;
    case EquilibriumKind::center_candidate:
      e = "<circle class=\"eq center_candidate\" cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"" +
          fmt(r) + "\"/>";
      break;
    default:
      e = "<path class=\"eq " + std::string(to_string(kind)) + "\" d=\"M" + cx + "," +
          fmt(q.y - r) + "L" + fmt(q.x + r) + "," + fmt(q.y + r) + "L" + fmt(q.x - r) + "," +
          fmt(q.y + r) + "Z\"/>";
      break;
  }
  body_.push_back(std::move(e));
}

std::string SvgPortrait::str() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w_) +
         "\" height=\"" + std::to_string(h_) + "\" viewBox=\"0 0 " + std::to_string(w_) + " " +
         std::to_string(h_) + "\">\n";
  out +=
      "<style>"
      ".orbit{fill:none;stroke:#6a7f99;stroke-width:0.8}"
      ".nullcline{fill:none;stroke:#b05a00;stroke-width:1;stroke-dasharray:6 4}"
      ".cycle{fill:none;stroke-width:2.6}"
      ".stable{stroke:#0b3d91}"
      ".unstable{stroke:#b2182b;stroke-dasharray:8 3}"
      ".eq{stroke:#111;stroke-width:1.5}"
      ".saddle{fill:none}"
      ".stable_node,.stable_focus{fill:#111}"
      ".unstable_node,.unstable_focus,.center_candidate,.saddle_node,.degenerate{fill:#fff}"
      "</style>\n";
  for (const auto& e : body_) {
    out += e;
    out += '\n';
  }
  out += "</svg>\n";
  return out;
}

}  // namespace fhn::cli
