#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kwl/config.hpp"
#include "kwl/pipeline.hpp"
#include "kwl/report.hpp"

using namespace kwl;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

const char* kSmallDefinite = R"(
[domain]
dim = 1
halfwidth = 4.7123889803846897
points = 95

[well]
well_halfwidth = 1.5707963267948966
ramp_width = 1.0
cap = 2.0
tail_floor = 1.0
offset = 1.0
coupling = 10.0

[problem]
p = 5.0
alpha = 0.01

[solver]
method = nehari

[output]
dir = out/smoke

[run]
seed = 7
)";

}  // namespace

TEST_CASE("sha256 matches the reference vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("number formatting round-trips and spells infinities") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  const double v = 0.49999999999871234;
  CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("config: full parse of a valid file") {
  const auto cfg = parse_config_text(kSmallDefinite, "inline.cfg");
  CHECK(cfg.dim == 1);
  CHECK(cfg.points == 95);
  CHECK(cfg.offset == 1.0);
  CHECK(cfg.coupling == 10.0);
  CHECK(cfg.method == "nehari");
  CHECK(cfg.seed == 7);
  CHECK(cfg.sweep_couplings.empty());
}

TEST_CASE("config: line-precise diagnostics") {
  const auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_config_text(text, "bad.cfg");
      FAIL("expected a ConfigError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      CHECK(std::string(e.what()).find("bad.cfg:") != std::string::npos);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("[domain]\ndim = one\n", "expected an integer");
  expect_error("[domain]\nhalfwidth = 1.x\n", "expected a number");
  expect_error("[domain]\ndim = 1\nwidgets = 3\n", "unknown key");
  expect_error("[gizmos]\n", "unknown section");
  expect_error("dim = 1\n", "before any section");
  expect_error("[domain]\ndim = 1\ndim = 2\n", "duplicate key");
  expect_error("[domain]\ndim 1\n", "expected 'key = value'");
  expect_error("[domain]\ndim = 1\nhalfwidth = 2\npoints = 16\n",
               "missing required key well.well_halfwidth");

  // The reported line number points at the offending line.
  try {
    parse_config_text("[domain]\ndim = 1\nhalfwidth = oops\n", "bad.cfg");
    FAIL("expected a ConfigError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bad.cfg:3:") != std::string::npos);
  }
}

TEST_CASE("config: coupling range expansion") {
  std::string text = kSmallDefinite;
  text += "\n[sweep]\ncoupling_min = 1e2\ncoupling_max = 1e6\ncoupling_count = 5\n";
  const auto cfg = parse_config_text(text, "inline.cfg");
  REQUIRE(cfg.sweep_couplings.size() == 5);
  CHECK(cfg.sweep_couplings.front() == doctest::Approx(1e2));
  CHECK(cfg.sweep_couplings.back() == doctest::Approx(1e6));
  CHECK(cfg.sweep_couplings[2] == doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("pipeline: definite smoke run emits tables, plots and manifest") {
  auto cfg = parse_config_text(kSmallDefinite, "inline.cfg");
  RunOptions opts;
  opts.out_dir = "cli_test_out/smoke";
  std::filesystem::remove_all(opts.out_dir);
  CHECK(run_experiment(cfg, opts) == 0);
  CHECK(std::filesystem::exists("cli_test_out/smoke/manifest.txt"));
  CHECK(std::filesystem::exists("cli_test_out/smoke/spectrum.csv"));
  CHECK(std::filesystem::exists("cli_test_out/smoke/solution.csv"));
  CHECK_FALSE(std::filesystem::exists("cli_test_out/smoke/FAILED"));

  const std::string csv = slurp("cli_test_out/smoke/solution.csv");
  CHECK(csv.rfind("method,alpha,lambda,p,energy,grad_norm,nehari_defect", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);
  CHECK(csv.find("nehari") != std::string::npos);

  const std::string manifest = slurp("cli_test_out/smoke/manifest.txt");
  CHECK(manifest.find("config_sha256") != std::string::npos);
  CHECK(manifest.find("[constants]") != std::string::npos);
  CHECK(manifest.find("FAIL") == std::string::npos);
}

TEST_CASE("pipeline: reruns are byte-identical") {
  auto cfg = parse_config_text(kSmallDefinite, "inline.cfg");
  RunOptions first, second;
  first.out_dir = "cli_test_out/rerun_a";
  second.out_dir = "cli_test_out/rerun_b";
  std::filesystem::remove_all(first.out_dir);
  std::filesystem::remove_all(second.out_dir);
  REQUIRE(run_experiment(cfg, first) == 0);
  REQUIRE(run_experiment(cfg, second) == 0);
  for (const char* name : {"solution.csv", "spectrum.csv", "manifest.txt"})
    CHECK(slurp(std::filesystem::path(first.out_dir) / name) ==
          slurp(std::filesystem::path(second.out_dir) / name));
}

TEST_CASE("pipeline: stage gating stops early") {
  auto cfg = parse_config_text(kSmallDefinite, "inline.cfg");
  RunOptions opts;
  opts.out_dir = "cli_test_out/staged";
  opts.stage = "dirichlet";
  std::filesystem::remove_all(opts.out_dir);
  CHECK(run_experiment(cfg, opts) == 0);
  CHECK(std::filesystem::exists("cli_test_out/staged/spectrum.csv"));
  CHECK_FALSE(std::filesystem::exists("cli_test_out/staged/solution.csv"));
}

TEST_CASE("pipeline: svg plots are emitted for sweeps") {
  std::string text = kSmallDefinite;
  text += "\n[sweep]\ncouplings = 10,100\n";
  auto cfg = parse_config_text(text, "inline.cfg");
  RunOptions opts;
  opts.out_dir = "cli_test_out/svg";
  std::filesystem::remove_all(opts.out_dir);
  CHECK(run_experiment(cfg, opts) == 0);
  CHECK(std::filesystem::exists("cli_test_out/svg/sweep.csv"));
  const std::string svg = slurp("cli_test_out/svg/concentration.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"") !=
        std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("pipeline: unknown stage is a config error") {
  auto cfg = parse_config_text(kSmallDefinite, "inline.cfg");
  RunOptions opts;
  opts.out_dir = "cli_test_out/badstage";
  opts.stage = "frobnicate";
  CHECK_THROWS_WITH_AS(run_experiment(cfg, opts), doctest::Contains("ConfigError"), Error);
}
