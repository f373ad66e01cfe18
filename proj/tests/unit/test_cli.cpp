// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"

using namespace cellperm;
using namespace cellperm::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("cellperm_unit_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::string& command, const RunConfig& cfg) {
  ::unsetenv("CELLPERM_OUTPUT_DIR");
  std::ostringstream out, err;
  const int code = run_command(command, cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig base(const fs::path& dir) {
  RunConfig cfg;
  cfg.output_dir = dir.string();
  cfg.levels = {1};
  return cfg;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("level lists") {
  CHECK(parse_levels("1-5") == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(parse_levels("3") == std::vector<int>{3});
  CHECK(parse_levels(" 5,1,3,3 ") == std::vector<int>{1, 3, 5});
  CHECK_THROWS(parse_levels(""));
  CHECK_THROWS(parse_levels("0"));
  CHECK_THROWS(parse_levels("4-2"));
  CHECK_THROWS(parse_levels("a"));
}

TEST_CASE("complex lists") {
  CHECK(parse_complex("2.5") == cplx(2.5, 0.0));
  CHECK(parse_complex("1,-2") == cplx(1.0, -2.0));
  const auto v = parse_complex_list("1e-4; 1, 2  100 3 , -1");
  REQUIRE(v.size() == 4);
  CHECK(v[0] == cplx(1e-4, 0.0));
  CHECK(v[1] == cplx(1.0, 2.0));
  CHECK(v[2] == cplx(100.0, 0.0));
  CHECK(v[3] == cplx(3.0, -1.0));
  CHECK(parse_complex_list("  ").empty());
  CHECK_THROWS(parse_complex("1,2,3"));
}

TEST_CASE("number formatting") {
  CHECK(fmt_fortran(0.0130) == "0.130000000E-01");
  CHECK(fmt_fortran(-0.570e-4) == "-0.570000000E-04");
  CHECK(fmt_fortran(12.5) == "0.125000000E+02");
  CHECK(fmt_fortran(0.0) == "0.000000000E+00");
  CHECK(fmt_g9(0.1) == "0.1");
  CHECK(run_id(CaseKind::TwoFluid, 3, cplx(100.0)) == "two_fluid_L3_z100");
  CHECK(run_id(CaseKind::TwoFluid, 2, cplx(1.0, -0.5)) == "two_fluid_L2_z1_-0.5");
  CHECK(run_id(CaseKind::Solid, 4, std::nullopt) == "solid_L4");
}

TEST_CASE("config files") {
  const RunConfig cfg = parse_config(R"(# sample
[run]
case = bubble
levels = 1-3
mu1 = 2
methods = energy

[geometry]
inclusion_lo = 0.125, 0.125
inclusion_hi = 0.875, 0.875

[spectral]
s = 2; -2
)");
  CHECK(cfg.kind == CaseKind::Bubble);
  CHECK(cfg.levels == std::vector<int>{1, 2, 3});
  CHECK(cfg.mu1 == 2.0);
  CHECK(cfg.methods == std::vector<Method>{Method::Energy});
  CHECK(cfg.geometry.inclusion_lo == Point2{0.125, 0.125});
  CHECK(cfg.s.size() == 2);
  CHECK(cfg.assignments.size() == 7);

  auto key_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("[run]\ncolour = red\n") == "run.colour");
  CHECK(key_of("[run]\nz = -1\n") == "run.z");
  CHECK(key_of("[run]\nmu1 = 0\n") == "run.mu1");
  CHECK(key_of("[spectral]\ns = 0\n") == "spectral.s");
  CHECK(key_of("levels = 1\n") == "levels");
  CHECK(key_of("[geometry]\ninclusion_hi = 1.5, 0.5\n") == "geometry.inclusion_hi");
  CHECK_THROWS_AS(load_config("/nonexistent/cellperm.ini"), ConfigError);
}

TEST_CASE("output directory override") {
  RunConfig cfg;
  cfg.output_dir = "from_config";
  ::unsetenv("CELLPERM_OUTPUT_DIR");
  CHECK(resolve_output_dir(cfg) == "from_config");
  ::setenv("CELLPERM_OUTPUT_DIR", "from_env", 1);
  CHECK(resolve_output_dir(cfg) == "from_env");
  ::unsetenv("CELLPERM_OUTPUT_DIR");
}

TEST_CASE("exit codes") {
  TempDir dir("codes");
  RunConfig cfg = base(dir.path);

  cfg.kind = CaseKind::TwoFluid;
  CHECK(run("solve", cfg).code == kConfigError);  // no z

  RunConfig series = base(dir.path);
  series.s = {cplx(0.5)};
  series.max_order = 4;
  CHECK(run("series", series).code == kNonConvergent);

  RunConfig exp = base(dir.path);
  exp.run_id = "solid_L9";
  CHECK(run("export-field", exp).code == kUnknownRun);

  RunConfig geom = base(dir.path);
  geom.kind = CaseKind::Solid;
  geom.geometry.inclusion_lo = {0.3, 0.3};
  geom.geometry.inclusion_hi = {0.7, 0.7};
  CHECK(run("solve", geom).code == kConfigError);

  CHECK(run("frobnicate", base(dir.path)).code == kConfigError);
}

TEST_CASE("solve output is reproducible and the manifest round-trips") {
  TempDir a("repro_a"), b("repro_b");
  for (const TempDir* d : {&a, &b}) {
    RunConfig cfg = base(d->path);
    cfg.kind = CaseKind::TwoFluid;
    cfg.levels = {1, 2};
    cfg.z = {cplx(0.5), cplx(2.0, 1.0)};
    REQUIRE(run("solve", cfg).code == kOk);
  }
  CHECK(slurp(a.path / "permeability.csv") == slurp(b.path / "permeability.csv"));
  CHECK(slurp(a.path / "manifest.json") == slurp(b.path / "manifest.json"));

  const auto rows = read_csv(a.path / "permeability.csv");
  CHECK(rows[0].size() == 10);
  CHECK(rows.size() == 1 + 2 * 2 * 2);

  std::ifstream in(a.path / "manifest.json");
  const nlohmann::json m = nlohmann::json::parse(in);
  const auto& run2 = m["runs"]["two_fluid_L2_z2_1"];
  CellProblems problems;
  const PermeabilityTensor t =
      permeability(solve_pair(problems, CaseKind::TwoFluid, 2, cplx(2.0, 1.0)), Method::Energy);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      CHECK(run2["tensors"]["energy"][k][l][0].get<double>() == t.k[k][l].real());
      CHECK(run2["tensors"]["energy"][k][l][1].get<double>() == t.k[k][l].imag());
    }
  CHECK_FALSE(run2.contains("seconds"));
}

TEST_CASE("energy, moments, series and asymptotics write their tables") {
  TempDir dir("tables");
  RunConfig cfg = base(dir.path);
  cfg.z = {cplx(100.0)};
  REQUIRE(run("energy", cfg).code == kOk);
  const auto energy = read_csv(dir.path / "energy.csv");
  REQUIRE(energy.size() == 2);
  CHECK(energy[1][3].find('E') != std::string::npos);

  cfg.max_order = 6;
  REQUIRE(run("moments", cfg).code == kOk);
  CHECK(read_csv(dir.path / "moments_L1.csv").size() == 8);

  cfg.s = {cplx(2.0), cplx(-3.0)};
  REQUIRE(run("series", cfg).code == kOk);
  const auto series = read_csv(dir.path / "series_L1.csv");
  REQUIRE(series.size() == 3);
  CHECK(std::stod(series[1][5]) <= 1e-3 * std::abs(std::stod(series[1][4])));

  cfg.z = {cplx(50.0)};
  cfg.kmax = 6;
  REQUIRE(run("asymptotics", cfg).code == kOk);
  CHECK(read_csv(dir.path / "ledger_large_z_L1.csv").size() == 8);
  CHECK(read_csv(dir.path / "asymptotics_large_z_L1.csv").size() == 2);

  std::ifstream in(dir.path / "manifest.json");
  const nlohmann::json m = nlohmann::json::parse(in);
  for (const char* c : {"energy", "moments", "series", "asymptotics"}) CHECK(m["commands"].contains(c));
}

TEST_CASE("exported fields respect the interface conditions") {
  TempDir dir("fields");
  RunConfig cfg = base(dir.path);
  cfg.levels = {2};
  cfg.samples = 17;
  for (CaseKind kind : {CaseKind::Solid, CaseKind::Bubble}) {
    cfg.kind = kind;
    cfg.z.clear();
    REQUIRE(run("solve", cfg).code == kOk);
  }
  cfg.kind = CaseKind::TwoFluid;
  cfg.z = {cplx(100.0)};
  REQUIRE(run("solve", cfg).code == kOk);

  auto field = [&](const std::string& id) {
    RunConfig e = cfg;
    e.run_id = id;
    REQUIRE(run("export-field", e).code == kOk);
    return read_csv(dir.path / ("field_" + id + "_e1.csv"));
  };
  auto in_inclusion = [](double x, double y) { return x > 0.25 && x < 0.75 && y > 0.25 && y < 0.75; };

  const auto solid = field("solid_L2");
  REQUIRE(solid.size() == 1 + 17 * 17);
  for (std::size_t r = 1; r < solid.size(); ++r) {
    const double x = std::stod(solid[r][0]), y = std::stod(solid[r][1]);
    if (in_inclusion(x, y)) {
      CHECK(std::stod(solid[r][2]) == 0.0);
      CHECK(solid[r][8] == "inclusion");
    }
  }

  const auto bubble = field("bubble_L2");
  int on_vertical = 0;
  for (std::size_t r = 1; r < bubble.size(); ++r) {
    const double x = std::stod(bubble[r][0]), y = std::stod(bubble[r][1]);
    if ((x == 0.25 || x == 0.75) && y >= 0.25 && y <= 0.75) {
      ++on_vertical;
      CHECK(std::abs(std::stod(bubble[r][2])) <= 1e-12);  // u1 is the normal component
      CHECK(bubble[r][8] == "interface");
    }
  }
  CHECK(on_vertical == 2 * 9);

  const auto two = field("two_fluid_L2_z100");
  double inner = 0.0, outer = 0.0;
  for (std::size_t r = 1; r < two.size(); ++r) {
    double& slot = two[r][8] == "inclusion" ? inner : outer;
    slot = std::max(slot, std::stod(two[r][9]));
  }
  CHECK(inner < 0.1 * outer);
}
