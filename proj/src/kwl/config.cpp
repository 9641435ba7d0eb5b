#include "kwl/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace kwl {

namespace {

struct Cursor {
  const std::string& path;
  int line = 0;
  int column = 0;

  [[noreturn]] void error(const std::string& message) const {
    std::ostringstream oss;
    oss << path << ":" << line << ":" << column << ": " << message;
    fail(ErrorCode::ConfigError, oss.str());
  }
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const Cursor& at, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    at.error("expected a number, got '" + t + "'");
  if (!std::isfinite(v)) at.error("number out of range: '" + t + "'");
  return v;
}

long parse_long(const Cursor& at, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    at.error("expected an integer, got '" + t + "'");
  return v;
}

bool parse_bool(const Cursor& at, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  at.error("expected true/false, got '" + t + "'");
}

std::vector<double> parse_double_list(const Cursor& at, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(at, item));
  if (out.empty()) at.error("expected a comma-separated list of numbers");
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& display_path) {
  ExperimentConfig cfg;
  cfg.source_path = display_path;
  cfg.source_text = text;

  std::set<std::string> seen;
  std::string section;
  std::istringstream stream(text);
  std::string raw;
  Cursor at{display_path, 0, 1};

  // Sweep log-range accumulation (resolved after the parse loop).
  bool have_range = false;
  double range_min = 0.0, range_max = 0.0;
  long range_count = 0;

  while (std::getline(stream, raw)) {
    ++at.line;
    std::string line = raw;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        at.column = static_cast<int>(raw.find('[')) + 1;
        at.error("unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {"domain",  "well",      "problem", "spectrum",
                                                  "sweep",   "solver",    "constants",
                                                  "output",  "run"};
      if (!known.count(section)) {
        at.column = 1;
        at.error("unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      at.column = 1;
      at.error("expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    at.column = static_cast<int>(raw.find('=')) + 2;
    if (key.empty()) at.error("empty key");
    if (value.empty()) at.error("empty value for key '" + key + "'");
    if (section.empty()) at.error("key '" + key + "' appears before any section");
    const std::string qual = section + "." + key;
    if (!seen.insert(qual).second) at.error("duplicate key '" + qual + "'");

    if (qual == "domain.dim") cfg.dim = static_cast<int>(parse_long(at, value));
    else if (qual == "domain.halfwidth") cfg.halfwidth = parse_double(at, value);
    else if (qual == "domain.points") cfg.points = static_cast<int>(parse_long(at, value));
    else if (qual == "well.well_halfwidth") cfg.well_halfwidth = parse_double(at, value);
    else if (qual == "well.ramp_width") cfg.ramp_width = parse_double(at, value);
    else if (qual == "well.cap") cfg.cap = parse_double(at, value);
    else if (qual == "well.tail_floor") cfg.tail_floor = parse_double(at, value);
    else if (qual == "well.offset") cfg.offset = parse_double(at, value);
    else if (qual == "well.coupling") cfg.coupling = parse_double(at, value);
    else if (qual == "problem.p") cfg.p = parse_double(at, value);
    else if (qual == "problem.alpha") {
      if (value == "auto_half_cap") cfg.alpha_auto_half_cap = true;
      else cfg.alpha = parse_double(at, value);
    } else if (qual == "spectrum.count") cfg.count = static_cast<int>(parse_long(at, value));
    else if (qual == "spectrum.m_max") cfg.m_max = static_cast<int>(parse_long(at, value));
    else if (qual == "sweep.couplings") cfg.sweep_couplings = parse_double_list(at, value);
    else if (qual == "sweep.coupling_min") { range_min = parse_double(at, value); have_range = true; }
    else if (qual == "sweep.coupling_max") { range_max = parse_double(at, value); have_range = true; }
    else if (qual == "sweep.coupling_count") { range_count = parse_long(at, value); have_range = true; }
    else if (qual == "solver.tol") cfg.tol = parse_double(at, value);
    else if (qual == "solver.max_iters") cfg.max_iters = parse_long(at, value);
    else if (qual == "solver.method") {
      static const std::set<std::string> methods = {"auto",    "nehari", "mountain_pass",
                                                    "linking", "limit",  "none"};
      if (!methods.count(value)) at.error("unknown solver method '" + value + "'");
      cfg.method = value;
    } else if (qual == "constants.sobolev_mode") {
      static const std::set<std::string> modes = {"discrete", "talenti", "value"};
      if (!modes.count(value)) at.error("unknown sobolev_mode '" + value + "'");
      cfg.sobolev_mode = value;
    } else if (qual == "constants.sobolev_value") cfg.sobolev_value = parse_double(at, value);
    else if (qual == "constants.sobolev_p_mode") {
      static const std::set<std::string> modes = {"discrete", "value"};
      if (!modes.count(value)) at.error("unknown sobolev_p_mode '" + value + "'");
      cfg.sobolev_p_mode = value;
    } else if (qual == "constants.sobolev_p_value") cfg.sobolev_p_value = parse_double(at, value);
    else if (qual == "output.dir") cfg.out_dir = value;
    else if (qual == "output.emit_svg") cfg.emit_svg = parse_bool(at, value);
    else if (qual == "output.dump_matrices") cfg.dump_matrices = parse_bool(at, value);
    else if (qual == "run.seed") cfg.seed = static_cast<unsigned>(parse_long(at, value));
    else if (qual == "run.threads") cfg.threads = static_cast<int>(parse_long(at, value));
    else {
      at.column = 1;
      at.error("unknown key '" + qual + "'");
    }
  }

  at.column = 1;
  if (have_range) {
    if (!cfg.sweep_couplings.empty())
      at.error("give either sweep.couplings or a coupling_min/max/count range, not both");
    if (!(range_count >= 2) || !(range_min > 0.0) || !(range_max > range_min))
      at.error("coupling range requires 0 < coupling_min < coupling_max and count >= 2");
    for (long i = 0; i < range_count; ++i)
      cfg.sweep_couplings.push_back(range_min * std::pow(range_max / range_min,
                                                         static_cast<double>(i) /
                                                             static_cast<double>(range_count - 1)));
  }

  // Required blocks.
  if (cfg.points == 0) at.error("missing required key domain.points");
  if (cfg.halfwidth == 0.0) at.error("missing required key domain.halfwidth");
  if (cfg.well_halfwidth == 0.0) at.error("missing required key well.well_halfwidth");
  if (cfg.ramp_width == 0.0) at.error("missing required key well.ramp_width");
  if (cfg.cap == 0.0) at.error("missing required key well.cap");
  if (cfg.tail_floor == 0.0) at.error("missing required key well.tail_floor");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, path + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

Grid ExperimentConfig::make_grid() const { return Grid(dim, halfwidth, points); }

PotentialWell ExperimentConfig::make_well() const {
  return PotentialWell(dim, well_halfwidth, ramp_width, cap, tail_floor, offset, coupling);
}

}  // namespace kwl
