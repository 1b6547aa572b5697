#include "pgas/run_record.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pgas {

bool FieldSnapshot::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const ArrayXd& FieldSnapshot::field(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return fields[i];
  throw std::invalid_argument("snapshot has no field named '" + name + "'");
}

void FieldSnapshot::validate() const {
  PGAS_CHECK_ARG(!names.empty() && names.size() == fields.size(),
                 "snapshot: names and fields must pair up");
  grid.validate();
  for (const auto& f : fields)
    PGAS_CHECK_ARG(f.size() == grid.n, "snapshot: field size != grid size");
}

void RunRecord::add_snapshot(FieldSnapshot snap) {
  snap.validate();
  if (!snapshots.empty())
    PGAS_CHECK_ARG(snap.t > snapshots.back().t - 1e-12,
                   "record: snapshots must be time-ordered");
  snapshots.push_back(std::move(snap));
}

void RunRecord::add_scalar(const std::string& name, double t, double value) {
  scalars[name].emplace_back(t, value);
}

const FieldSnapshot& RunRecord::nearest_snapshot(double t) const {
  PGAS_CHECK_ARG(!snapshots.empty(), "record: no snapshots");
  std::size_t best = 0;
  double dist = std::abs(snapshots[0].t - t);
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    const double d = std::abs(snapshots[i].t - t);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return snapshots[best];
}

std::string RunRecord::config_hash() const {
  std::ostringstream os;
  for (const auto& [k, v] : config) os << k << '=' << v << ';';
  return hash_hex(fnv1a64(os.str()));
}

std::vector<double> output_schedule(double t0, double t_end,
                                    const std::vector<double>& requested) {
  PGAS_CHECK_ARG(t_end > t0, "schedule: t_end must exceed the start time");
  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  std::vector<double> targets;
  for (double t : requested) {
    PGAS_CHECK_ARG(std::isfinite(t), "schedule: output times must be finite");
    if (t > t0 + eps && t <= t_end + eps) targets.push_back(std::min(t, t_end));
  }
  targets.push_back(t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end(),
                            [eps](double a, double b) { return std::abs(a - b) <= eps; }),
                targets.end());
  return targets;
}

std::string csv_header(const RunRecord& rec) {
  for (const char* key : {"gamma", "p_star", "v_star", "delta", "seed"})
    PGAS_CHECK_ARG(rec.config.count(key),
                   "record: config must carry gamma, p_star, v_star, delta, seed");
  std::ostringstream os;
  os << "# config_hash=" << rec.config_hash() << "\n";
  os << "# gamma=" << rec.config.at("gamma") << "\n";
  os << "# p_star=" << rec.config.at("p_star") << "\n";
  os << "# v_star=" << rec.config.at("v_star") << "\n";
  os << "# delta=" << rec.config.at("delta") << "\n";
  os << "# seed=" << rec.config.at("seed") << "\n";
  return os.str();
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> RunRecord::write_files(const std::string& out_dir,
                                                const std::string& stem) const {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  const std::string header = csv_header(*this);

  // Snapshot CSVs: coordinate column named by frame, then the fields.
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const FieldSnapshot& s = snapshots[i];
    char name[128];
    std::snprintf(name, sizeof name, "%s_snapshot_%03zu.csv", stem.c_str(), i);
    std::ofstream out(fs::path(out_dir) / name);
    PGAS_CHECK_INTERNAL(out.good(), "record: cannot open snapshot file");
    out << header;
    out << "# t=" << fmt_g17(s.t) << "\n";
    const char* coord =
        (s.grid.kind == CoordKind::lagrangian_x) ? "x" : "chi";
    out << coord;
    for (const auto& n : s.names) out << ',' << n;
    out << '\n';
    for (int j = 0; j < s.grid.n; ++j) {
      out << fmt_g17(s.grid.center(j));
      for (const auto& f : s.fields) out << ',' << fmt_g17(f[j]);
      out << '\n';
    }
    written.push_back(name);
  }

  // Scalar series CSVs.
  for (const auto& [sname, series] : scalars) {
    const std::string name = stem + "_series_" + sname + ".csv";
    std::ofstream out(fs::path(out_dir) / name);
    PGAS_CHECK_INTERNAL(out.good(), "record: cannot open series file");
    out << header << "t," << sname << '\n';
    for (const auto& [t, v] : series)
      out << fmt_g17(t) << ',' << fmt_g17(v) << '\n';
    written.push_back(name);
  }

  // JSON manifest (provenance may vary run to run; CSVs never do).
  {
    const std::string name = stem + "_manifest.json";
    std::ofstream out(fs::path(out_dir) / name);
    PGAS_CHECK_INTERNAL(out.good(), "record: cannot open manifest");
    out << "{\n  \"config_hash\": \"" << config_hash() << "\",\n";
    out << "  \"config\": {";
    bool first = true;
    for (const auto& [k, v] : config) {
      if (!first) out << ',';
      first = false;
      out << "\n    \"" << json_escape(k) << "\": \"" << json_escape(v)
          << "\"";
    }
    out << "\n  },\n";
    out << "  \"aborted\": " << (aborted ? "true" : "false") << ",\n";
    if (aborted)
      out << "  \"abort_reason\": \"" << json_escape(abort_reason) << "\",\n";
    out << "  \"wall_time_sec\": " << fmt_g17(wall_time_sec) << ",\n";
    out << "  \"snapshot_times\": [";
    for (std::size_t i = 0; i < snapshots.size(); ++i)
      out << (i ? "," : "") << fmt_g17(snapshots[i].t);
    out << "],\n  \"files\": [";
    for (std::size_t i = 0; i < written.size(); ++i)
      out << (i ? "," : "") << "\"" << json_escape(written[i]) << "\"";
    out << "]\n}\n";
    written.push_back(name);
  }
  return written;
}

}  // namespace pgas
