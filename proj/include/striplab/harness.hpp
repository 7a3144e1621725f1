#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "striplab/numeric.hpp"

// Experiment harness: flat key = value configuration, the named experiment
// suites behind the command-line tool, and deterministic CSV reporting.

namespace striplab {

// flat `key = value` text with `[section]` headers; keys before the first
// header land in the "" section.  `#` and `;` start comments.  Parse errors
// throw ConfigError naming the file and line.
class Config {
 public:
  Config() = default;
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text, const std::string& origin = "<config>");

  bool has(const std::string& section, const std::string& key) const;
  // typed getters; the *_or forms fall back when section/key is absent,
  // the plain forms throw ConfigError.  Malformed numbers always throw.
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::uint64_t integer_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::string origin_ = "<empty>";
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

// constants frozen by designated calibration runs (see the repository notes
// in each experiment) and re-verified by the stability experiments
struct Calibration {
  double equivalence = 2.2;       // smoothness-norm vs interpolation-norm interval
  double multiplier_ceiling = 1.2;  // averaged-operator vs multiplier-norm bound
  double calculus_ceiling = 1.2;    // strip-calculus vs analytic-Mikhlin bound
  double transfer_ceiling = 1.7;    // transference ratio ceiling
};
Calibration default_calibration();
// flat key = value file with keys equivalence, multiplier_ceiling,
// calculus_ceiling, transfer_ceiling; missing keys keep defaults, junk throws
Calibration load_calibration(const std::string& path);

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  int refine = 0;  // each level halves the lattice spacing
  Calibration calibration;
  Config overrides;  // knobs read from the section named after the experiment

  double knob(const std::string& key, double fallback) const;
  int knob_int(const std::string& key, int fallback) const;
  std::string knob_str(const std::string& key, const std::string& fallback) const;
};

struct ReportRow {
  std::string experiment;
  std::string case_id;
  double lhs = 0.0;        // measured quantity (residual for identity checks)
  double rhs = 0.0;        // comparison quantity (tolerance for identity checks)
  double ratio = 0.0;      // lhs / rhs
  double tolerance = 0.0;  // slack on the ratio (identity rows: absolute on lhs)
  bool pass = false;
  int refine = 0;
};

// fixed experiment order; every acceptance item appears exactly once
const std::vector<std::string>& experiment_names();

// runs one named experiment; deterministic given (seed, refine, overrides)
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg);

struct SuiteSummary {
  std::vector<ReportRow> rows;
  bool all_pass = false;
};

// every experiment at the given refinement, rows gathered in experiment order
SuiteSummary suite_all(std::uint64_t seed, int refine = 0,
                       const Calibration& cal = default_calibration(),
                       const Config& overrides = {});

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_csv_file(const std::string& path, const std::vector<ReportRow>& rows);
std::string format_summary(const std::vector<ReportRow>& rows);

}  // namespace striplab
