#pragma once
// Run artifacts: time-ordered field snapshots plus scalar diagnostic series
// and a config echo, with CSV/JSON emission. CSV output is deterministic
// (17-significant-digit round-trip formatting, fixed column order) so that
// re-running a configuration reproduces files byte for byte; the JSON
// manifest additionally carries provenance that may vary (wall time).

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pgas/grid.hpp"
#include "pgas/util.hpp"

namespace pgas {

struct FieldSnapshot {
  double t{0};
  Grid1D grid;
  std::vector<std::string> names;
  std::vector<ArrayXd> fields;

  bool has(const std::string& name) const;
  const ArrayXd& field(const std::string& name) const;
  void validate() const;
};

struct RunRecord {
  // Flat config echo; must include gamma, p_star, v_star, delta, seed before
  // any file is emitted (every file header carries them plus the hash).
  std::map<std::string, std::string> config;
  std::vector<FieldSnapshot> snapshots;
  // name -> series of (t, value)
  std::map<std::string, std::vector<std::pair<double, double>>> scalars;
  double wall_time_sec{0};
  bool aborted{false};
  std::string abort_reason;

  void add_snapshot(FieldSnapshot snap);  // enforces time ordering
  void add_scalar(const std::string& name, double t, double value);
  const FieldSnapshot& nearest_snapshot(double t) const;
  std::string config_hash() const;

  // Emission. Returns the list of files written (relative to out_dir).
  std::vector<std::string> write_files(const std::string& out_dir,
                                       const std::string& stem) const;
};

// Lines starting with "# key=value" carrying hash, gamma, p*, v*, delta, seed.
std::string csv_header(const RunRecord& rec);

// Sorted, deduplicated output targets restricted to (t0, t_end], with t_end
// always present as the final entry. Shared by all time integrators.
std::vector<double> output_schedule(double t0, double t_end,
                                    const std::vector<double>& requested);

}  // namespace pgas
