#include "rvd/run_outputs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rvd/errors.hpp"

namespace rvd {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open output file: " + path);
  }
  return out;
}

/// JSON has no infinity; settling times that never happen serialize as -1.
double json_time(double t) { return std::isfinite(t) ? t : -1.0; }

constexpr const char* kComponentNames[12] = {"px", "py", "pz", "rx", "ry", "rz",
                                             "q1", "q2", "q3", "wx", "wy", "wz"};

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record) {
  std::ofstream out = open_out(path);
  out << kTrajectoryCsvHeader << "\n";
  for (const auto& s : record.samples) {
    out << fmt(s.t);
    for (int i = 0; i < 12; ++i) {
      out << ',' << fmt(s.x(i));
    }
    for (int i = 0; i < 6; ++i) {
      out << ',' << fmt(s.f_a(i));
    }
    out << ',' << fmt(s.max_re_eig) << ',' << fmt(s.det_X) << ',' << fmt(s.kappa) << "\n";
  }
}

void write_metrics_json(const std::string& path, const RunMetrics& metrics,
                        const TrajectoryRecord& record) {
  json j;
  j["max_thrust_N"] = metrics.max_abs_thrust;
  j["per_thruster_max_N"] = std::vector<double>(metrics.per_thruster_max.data(),
                                                metrics.per_thruster_max.data() + 6);
  j["final_p_norm_m"] = metrics.final_p_norm;
  j["final_q_norm"] = metrics.final_q_norm;
  j["final_time_s"] = metrics.final_time;
  j["failed"] = record.failed;
  if (record.failed) {
    j["failure_reason"] = record.failure_reason;
  }
  j["max_re_eig_overall"] = record.max_re_eig_overall;
  j["sup_closed_loop_norm"] = record.sup_closed_norm;

  json comps;
  for (int c = 0; c < 12; ++c) {
    const auto& cm = metrics.components[static_cast<std::size_t>(c)];
    comps[kComponentNames[c]] = {{"overshoot_ratio", cm.overshoot_ratio},
                                 {"zero_crossings", cm.zero_crossings},
                                 {"settling_time_s", json_time(cm.settling_time)}};
  }
  j["components"] = comps;

  open_out(path) << j.dump(2) << "\n";
}

void write_manifest_json(const std::string& path, const ScenarioConfig& cfg,
                         const std::string& command, const std::vector<std::string>& outputs,
                         double wall_seconds, const std::string& extra_digest) {
  json j;
  std::string digest_input = canonical_text(cfg);
  if (!extra_digest.empty()) {
    digest_input += extra_digest;
  }
  j["config_digest"] = fnv1a_hex(digest_input);
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["outputs"] = outputs;
  j["wall_clock_s"] = wall_seconds;
  open_out(path) << j.dump(2) << "\n";
}

void write_montecarlo_runs_csv(const std::string& path, const MonteCarloResult& result) {
  std::ofstream out = open_out(path);
  out << "run,seed,failed,converged,final_p_norm_m,final_q_norm,max_thrust_N\n";
  for (const auto& r : result.runs) {
    out << r.index << ',' << r.seed << ',' << (r.failed ? 1 : 0) << ','
        << (r.converged ? 1 : 0) << ',' << fmt(r.metrics.final_p_norm) << ','
        << fmt(r.metrics.final_q_norm) << ',' << fmt(r.metrics.max_abs_thrust) << "\n";
  }
}

void write_montecarlo_summary_json(const std::string& path, const MonteCarloResult& result) {
  json j;
  j["runs"] = result.runs.size();
  j["converged_count"] = result.converged_count;
  j["failed_count"] =
      static_cast<int>(std::count_if(result.runs.begin(), result.runs.end(),
                                     [](const auto& r) { return r.failed; }));
  j["median_kappa_robpole"] = result.median_kappa_robpole;
  j["median_kappa_random"] = result.median_kappa_random;
  j["kappa_samples_robpole"] = result.kappa_robpole.size();
  j["kappa_samples_random"] = result.kappa_random.size();
  j["wall_seconds"] = result.wall_seconds;

  json env;
  env["t"] = result.times;
  for (int pass = 0; pass < 2; ++pass) {
    const auto& e = pass == 0 ? result.p_norm_envelope : result.q_norm_envelope;
    std::vector<double> lo, med, hi;
    lo.reserve(e.size());
    med.reserve(e.size());
    hi.reserve(e.size());
    for (const auto& a : e) {
      lo.push_back(a[0]);
      med.push_back(a[1]);
      hi.push_back(a[2]);
    }
    env[pass == 0 ? "p_norm" : "q_norm"] = {{"min", lo}, {"median", med}, {"max", hi}};
  }
  j["envelopes"] = env;
  open_out(path) << j.dump(2) << "\n";
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read CSV: " + path);
  }
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("empty CSV: " + path);
  }
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) {
    t.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (row.size() != t.header.size()) {
      throw ConfigError("ragged CSV row in " + path);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Minimal multi-series line plot as a standalone SVG.
void write_svg(const std::string& path, const std::string& title, const CsvTable& t,
               const std::vector<int>& columns, const std::vector<std::string>& labels,
               const std::string& y_label) {
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#9467bd", "#ff7f0e", "#8c564b"};
  const double W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = W - ml - mr, ph = H - mt - mb;

  double tmin = 1e300, tmax = -1e300, vmin = 1e300, vmax = -1e300;
  for (const auto& row : t.rows) {
    tmin = std::min(tmin, row[0]);
    tmax = std::max(tmax, row[0]);
    for (const int c : columns) {
      vmin = std::min(vmin, row[static_cast<std::size_t>(c)]);
      vmax = std::max(vmax, row[static_cast<std::size_t>(c)]);
    }
  }
  if (vmax - vmin < 1e-12) {
    vmax += 1.0;
    vmin -= 1.0;
  }
  const double pad = 0.05 * (vmax - vmin);
  vmin -= pad;
  vmax += pad;

  auto sx = [&](double x) { return ml + pw * (x - tmin) / (tmax - tmin); };
  auto sy = [&](double v) { return mt + ph * (1.0 - (v - vmin) / (vmax - vmin)); };

  std::ofstream out = open_out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
      << "' viewBox='0 0 " << W << " " << H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n"
      << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
      << "' fill='none' stroke='black'/>\n";

  for (int g = 0; g <= 4; ++g) {
    const double v = vmin + g * (vmax - vmin) / 4.0;
    const double x = tmin + g * (tmax - tmin) / 4.0;
    out << "<line x1='" << ml << "' y1='" << sy(v) << "' x2='" << W - mr << "' y2='" << sy(v)
        << "' stroke='#dddddd'/>\n"
        << "<text x='" << ml - 6 << "' y='" << sy(v) + 4
        << "' text-anchor='end' font-size='11'>" << fmt(std::round(v * 1e4) / 1e4)
        << "</text>\n"
        << "<text x='" << sx(x) << "' y='" << H - mb + 18
        << "' text-anchor='middle' font-size='11'>" << fmt(std::round(x * 100) / 100)
        << "</text>\n";
  }
  out << "<text x='" << W / 2 << "' y='" << H - 12
      << "' text-anchor='middle' font-size='12'>t [s]</text>\n"
      << "<text x='16' y='" << mt + ph / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << mt + ph / 2
      << ")'>" << y_label << "</text>\n";

  for (std::size_t k = 0; k < columns.size(); ++k) {
    out << "<polyline fill='none' stroke='" << kColors[k % 6] << "' stroke-width='1.2' points='";
    const std::size_t stride = std::max<std::size_t>(1, t.rows.size() / 2000);
    for (std::size_t i = 0; i < t.rows.size(); i += stride) {
      const auto& row = t.rows[i];
      out << sx(row[0]) << ',' << sy(row[static_cast<std::size_t>(columns[k])]) << ' ';
    }
    const auto& last = t.rows.back();
    out << sx(last[0]) << ',' << sy(last[static_cast<std::size_t>(columns[k])]);
    out << "'/>\n";
    out << "<text x='" << W - mr - 60 << "' y='" << mt + 16 + 14 * static_cast<double>(k)
        << "' font-size='11' fill='" << kColors[k % 6] << "'>" << labels[k] << "</text>\n";
  }
  out << "</svg>\n";
}

int column_index(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) {
      return static_cast<int>(i);
    }
  }
  throw ConfigError("CSV is missing column '" + name + "'");
}

}  // namespace

void write_svg_plots_from_csv(const std::string& csv_path, const std::string& out_dir) {
  const CsvTable t = read_csv(csv_path);
  if (t.rows.empty()) {
    throw ConfigError("trajectory CSV has no rows: " + csv_path);
  }
  write_svg(out_dir + "/position.svg", "Relative position response", t,
            {column_index(t, "px"), column_index(t, "py"), column_index(t, "pz")},
            {"px", "py", "pz"}, "p [m]");
  write_svg(out_dir + "/attitude.svg", "Relative attitude response", t,
            {column_index(t, "q1"), column_index(t, "q2"), column_index(t, "q3")},
            {"q1", "q2", "q3"}, "q");
  write_svg(out_dir + "/forces.svg", "Thruster forces", t,
            {column_index(t, "f1"), column_index(t, "f2"), column_index(t, "f3"),
             column_index(t, "f4"), column_index(t, "f5"), column_index(t, "f6")},
            {"f1", "f2", "f3", "f4", "f5", "f6"}, "f [N]");
}

}  // namespace rvd
