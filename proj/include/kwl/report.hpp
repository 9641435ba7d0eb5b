#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kwl {

/// SHA-256 digest of a byte string, lowercase hex.
std::string sha256_hex(std::string_view data);

/// Shortest round-trip decimal form of a double; "inf"/"-inf"/"nan" spelled
/// out. Used everywhere numbers reach an output file so reruns are
/// byte-identical.
std::string format_number(double value);

/// Minimal RFC-4180-style writer: comma separation, LF line ends, header row
/// first. Fields are numbers or plain identifiers, so quoting never triggers.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& fields);

 private:
  struct Impl;
  Impl* impl_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG 1.1 polyline plot, one plot per file. Axes are linear;
/// pass log10-transformed data for log scales and label accordingly.
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series);

/// Run manifest: config echo, input content hash, every derived constant with
/// its provenance, and the pass/fail record of each invariant check.
class Manifest {
 public:
  void set_config(const std::string& path, const std::string& content);
  void add_constant(const std::string& name, double value, const std::string& provenance);
  void add_check(const std::string& name, bool passed, const std::string& detail = "");
  void add_note(const std::string& note);

  bool all_passed() const;
  void write(const std::string& path) const;

 private:
  std::string config_path_;
  std::string config_content_;
  struct Constant {
    std::string name;
    double value;
    std::string provenance;
  };
  struct Check {
    std::string name;
    bool passed;
    std::string detail;
  };
  std::vector<Constant> constants_;
  std::vector<Check> checks_;
  std::vector<std::string> notes_;
};

}  // namespace kwl
