#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fhn/cli/app.hpp"
#include "fhn/cli/config.hpp"
#include "fhn/cli/report.hpp"
#include "fhn/cli/sweep.hpp"
#include "fhn/errors.hpp"

using namespace fhn;
using namespace fhn::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fhn_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// RFC-4180 reader, enough for round trips.
std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1);
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      rows.back().push_back(field);
      field.clear();
    } else if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      rows.back().push_back(field);
      field.clear();
      rows.emplace_back();
      ++i;
    } else {
      field += ch;
    }
  }
  if (rows.back().empty()) rows.pop_back();
  return rows;
}

// Tag balance and attribute quoting, no external parser.
bool well_formed_xml(const std::string& s, std::string& why) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while ((i = s.find('<', i)) != std::string::npos) {
    const auto j = s.find('>', i);
    if (j == std::string::npos) return why = "unterminated tag", false;
    std::string tag = s.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.empty()) return why = "empty tag", false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return why = "mismatched </" + tag, false;
      stack.pop_back();
      continue;
    }
    const bool self = tag.back() == '/';
    if (self) tag.pop_back();
    const auto sp = tag.find_first_of(" \n\t");
    const std::string name = tag.substr(0, sp);
    int quotes = 0;
    for (char ch : tag) quotes += ch == '"';
    if (quotes % 2) return why = "odd quotes in <" + name, false;
    if (stack.empty()) {
      if (root_seen) return why = "second root", false;
      root_seen = true;
    }
    if (!self) stack.push_back(name);
  }
  if (!stack.empty()) return why = "unclosed <" + stack.back(), false;
  return root_seen || (why = "no root", false);
}

std::vector<std::string> one_node(const std::string& out) {
  return {"sweep", "--sweep_a", "0.302:0.302:1", "--sweep_c", "0.1:0.1:1", "--sweep_gamma",
          "0.5:0.5:1", "--slices", "1:0.2", "--out", out};
}

}  // namespace

TEST_CASE("equilibria of the three point example") {
  const auto dir = scratch("eq");
  const auto r = invoke({"equilibria", "--a", "0", "--b", "3", "--c", "1", "--gamma", "0", "--delta",
                      "1", "--out", dir.string()});
  REQUIRE(r.code == exit_ok);
  const auto rows = read_csv(slurp(dir / "equilibria.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "index");
  CHECK(rows[1][1] == "O");
  CHECK(rows[2][1] == "S");
  CHECK(rows[3][1] == "A");
  CHECK(std::stod(rows[2][3]) == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(std::stod(rows[3][3]) == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(rows[2][11] == "-1");
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  SUBCASE("help") { CHECK(invoke({"--help"}).code == exit_ok); }
  SUBCASE("unknown key lists the valid ones") {
    const auto r = invoke({"cycles", "--gama", "0.3"});
    CHECK(r.code == exit_usage);
    CHECK(r.err.find("valid keys") != std::string::npos);
    CHECK(r.err.find("gamma") != std::string::npos);
  }
  SUBCASE("missing subcommand") { CHECK(invoke({}).code == exit_usage); }
  SUBCASE("bad values") {
    CHECK(invoke({"equilibria", "--a", "abc", "--out", dir.string()}).code == exit_usage);
    CHECK(invoke({"equilibria", "--stage", "quartic", "--out", dir.string()}).code == exit_usage);
    CHECK(invoke({"verify", "--suite", "nope", "--out", dir.string()}).code == exit_usage);
    CHECK(invoke({"cycles", "--anchor", "A", "--out", dir.string()}).code == exit_usage);
  }
  SUBCASE("numerical failure") {
    const auto r = invoke({"surface", "--a", "0", "--b", "0", "--c", "1", "--gamma", "0.3", "--out",
                        dir.string()});
    CHECK(r.code == exit_numerical);
    CHECK(invoke({"continue", "--cycle", "5", "--stage", "cubic_lienard", "--gamma", "0.3", "--out",
               dir.string()})
              .code == exit_numerical);
  }
  SUBCASE("violated bound") {
    auto args = one_node(dir.string());
    args.insert(args.end(), {"--cycle_bound", "1"});
    CHECK(invoke(args).code == exit_violation);
  }
}

TEST_CASE("config file with flag override") {
  const auto dir = scratch("cfg");
  {
    std::ofstream f(dir / "run.cfg");
    f << "# example\na = 5\nb=3\nc = 1\n\ndelta = 1\ngamma = 0\nout = " << dir.string() << "\n";
  }
  // a = 5 leaves only the origin.
  auto r = invoke({"equilibria", "--config", (dir / "run.cfg").string()});
  REQUIRE(r.code == exit_ok);
  CHECK(read_csv(slurp(dir / "equilibria.csv")).size() == 2);
  r = invoke({"equilibria", "--config", (dir / "run.cfg").string(), "--a", "0"});
  REQUIRE(r.code == exit_ok);
  CHECK(read_csv(slurp(dir / "equilibria.csv")).size() == 4);

  Config c;
  CHECK_THROWS_AS(c.load_text("nokey = 1\n"), usage_error);
  CHECK_THROWS_AS(c.load_text("a 1\n"), usage_error);
  CHECK(invoke({"equilibria", "--config", (dir / "missing.cfg").string()}).code == exit_usage);
}

TEST_CASE("sweep output does not depend on the thread count") {
  const auto d1 = scratch("sweep1"), d3 = scratch("sweep3");
  const std::vector<std::string> grid{"sweep", "--sweep_a", "0:1:3", "--sweep_c", "0.1:1.1:3",
                                      "--sweep_gamma", "0:1:4"};
  auto a1 = grid, a3 = grid;
  a1.insert(a1.end(), {"--jobs", "1", "--out", d1.string()});
  a3.insert(a3.end(), {"--jobs", "3", "--out", d3.string()});
  const auto r1 = invoke(a1), r3 = invoke(a3);
  REQUIRE(r1.code == exit_ok);
  REQUIRE(r3.code == exit_ok);
  const auto s1 = slurp(d1 / "sweep.jsonl");
  CHECK(s1 == slurp(d3 / "sweep.jsonl"));
  CHECK(r1.out == r3.out);
  std::istringstream lines(s1);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j.contains("summary")) {
      CHECK(j["summary"]["nodes"] == 72);
    } else {
      CHECK(j["index"] == n);
      ++n;
    }
  }
  CHECK(n == 72);
}

TEST_CASE("two-cycle node counts two cycles around O") {
  const auto dir = scratch("two");
  REQUIRE(invoke(one_node(dir.string())).code == exit_ok);
  std::istringstream lines(slurp(dir / "sweep.jsonl"));
  std::string line;
  std::getline(lines, line);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["around_O"] == 2);
  CHECK(j["count"] == 2);
  const double m0 = j["multipliers_O"][0], m1 = j["multipliers_O"][1];
  CHECK(m0 * m1 < 0.0);
}

TEST_CASE("reversible quadratic slice reports no isolated cycles") {
  const auto dir = scratch("rev");
  const auto r = invoke({"sweep", "--stage", "reversible_quadratic", "--sweep_a", "0:1:2", "--sweep_c",
                      "0.1:1:2", "--sweep_gamma", "0:1:3", "--slices", "1:0.2", "--out",
                      dir.string()});
  REQUIRE(r.code == exit_ok);
  std::istringstream lines(slurp(dir / "sweep.jsonl"));
  std::string line;
  int nodes = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j.contains("summary")) continue;
    ++nodes;
    CHECK(j["count"] == 0);
    CHECK(j["failed"] == false);
  }
  CHECK(nodes == 12);
}

TEST_CASE("csv fields") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CsvTable t({"x", "y"});
  CHECK_THROWS(t.add({"1"}));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  CsvTable r({"value", "label"});
  std::vector<double> vals;
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), expo(rng));
    vals.push_back(v);
    r.add({format_double(v), i % 3 == 0 ? "odd, \"quoted\"\r\nlabel" : "k"});
  }
  const auto rows = read_csv(r.str());
  REQUIRE(rows.size() == vals.size() + 1);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    CHECK(std::strtod(rows[i + 1][0].c_str(), nullptr) == vals[i]);
    CHECK(rows[i + 1][1] == (i % 3 == 0 ? "odd, \"quoted\"\r\nlabel" : "k"));
  }
}

TEST_CASE("portrait is well formed svg") {
  const auto dir = scratch("svg");
  const auto r = invoke({"portrait", "--a", "0.302", "--b", "1", "--c", "0.1", "--gamma", "0.5",
                      "--delta", "0.2", "--s_min", "0.005", "--x_min", "-2", "--x_max", "4",
                      "--y_min", "-3", "--y_max", "3", "--out", dir.string()});
  REQUIRE(r.code == exit_ok);
  CHECK(r.out.find("2 cycles") != std::string::npos);
  const auto svg = slurp(dir / "portrait.svg");
  std::string why;
  CHECK_MESSAGE(well_formed_xml(svg, why), why);
  CHECK(svg.find("class=\"cycle stable\"") != std::string::npos);
  CHECK(svg.find("class=\"cycle unstable\"") != std::string::npos);
  CHECK(svg.find("nullcline") != std::string::npos);

  std::string bad = "<svg><g></svg>";
  CHECK_FALSE(well_formed_xml(bad, why));

  SvgPortrait p({-1, 1}, {-1, 1});
  p.trajectory({{-5, 0}, {0, 0}, {0.5, 0.5}, {5, 5}});
  p.equilibrium({0, 0}, EquilibriumKind::saddle);
  CHECK(well_formed_xml(p.str(), why));
}

TEST_CASE("cycles, branch, homoclinic and verify outputs") {
  const auto dir = scratch("out");
  const std::string o = dir.string();
  auto r = invoke({"cycles", "--a", "0.302", "--b", "1", "--c", "0.1", "--gamma", "0.5", "--delta",
                "0.2", "--s_min", "0.005", "--out", o});
  REQUIRE(r.code == exit_ok);
  auto rows = read_csv(slurp(dir / "cycles.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][5] == "unstable");
  CHECK(rows[2][5] == "stable");

  r = invoke({"continue", "--stage", "cubic_lienard", "--gamma", "0.3", "--cont_direction", "-1",
           "--out", o});
  REQUIRE(r.code == exit_ok);
  rows = read_csv(slurp(dir / "branch.csv"));
  CHECK(rows.size() > 5);
  CHECK(slurp(dir / "events.jsonl").find("\"termination\":\"amplitude_to_zero\"") !=
        std::string::npos);

  r = invoke({"homoclinic", "--a", "0", "--b", "3", "--c", "0.3", "--delta", "0.2", "--gamma_lo",
           "0.12", "--gamma_hi", "0.13", "--n_samples", "11", "--out", o});
  REQUIRE(r.code == exit_ok);
  const auto ev = nlohmann::json::parse(slurp(dir / "events.jsonl"));
  CHECK(ev["kind"] == "small_O");
  CHECK(ev["gamma_lo"].get<double>() <= 0.1237704214 + 1e-8);
  CHECK(ev["gamma_hi"].get<double>() >= 0.1237704214 - 1e-8);
  CHECK(read_csv(slurp(dir / "homoclinic.csv")).size() >= 12);

  r = invoke({"verify", "--suite", "hopf", "--out", o});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("hopf: pass") != std::string::npos);
}
