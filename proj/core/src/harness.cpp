#include "isac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace isac {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct CsvRow {
  std::string preset, sweep_name;
  double sweep_value = 0.0;
  int draw = 0;
  std::uint64_t seed = 0;
  std::string status;
  std::string metric_name;
  double metric_x = 0.0;
  double metric_y = 0.0;
};

constexpr const char* kCsvHeader =
    "preset,sweep_name,sweep_value,draw,seed,status,metric_name,metric_x,metric_y";

// p_fa grid used when resampling ROC curves into CSV rows
std::vector<double> roc_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 49; ++i) g.push_back(0.02 * i);
  return g;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (sweep_values.empty()) {
    throw std::invalid_argument("ExperimentSpec: sweep_values must be non-empty");
  }
  if (n_channel_draws < 1 || n_detection_trials < 1) {
    throw std::invalid_argument("ExperimentSpec: counts must be >= 1");
  }
  base.validate();
  mm.validate();
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "roc_sweep", "accuracy_vs_caprx", "sinr_vs_user_angle", "custom"};
  return names;
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.n_tx = 2;
  c.n_rx = 2;
  c.n_users = 2;
  c.n_antennas = 3;
  c.tx_positions = {{0, 500}, {500, 500}};
  c.rx_positions = {{0, 250}, {500, 250}};
  c.user_regions = {{{200, 200}, 30}, {{300, 300}, 30}};
  c.eve_region = {{250, 250}, 30};
  c.rician_factor = 5.0;
  c.var_scatter = 1e-3;
  c.var_clutter = 1e-3;
  c.var_noise_user = 0.1;
  c.var_noise_eve = 0.1;
  c.var_noise_rx = 0.1;
  c.power_budget = 6.0;
  c.cap_tx = 6.0;
  c.cap_rx = 4.0;
  c.secrecy_floor = 0.5;
  c.n_symbols = 30;
  c.seed = 0;
  return c;
}

ExperimentSpec make_preset(const std::string& name, const ScenarioConfig& base) {
  ExperimentSpec spec;
  spec.preset = name;
  spec.base = base;
  if (name == "roc_sweep") {
    spec.base.n_antennas = 3;
    spec.base.power_budget = 6.0;
    // generous fronthaul so the 2-bit secrecy floor stays feasible for most
    // channel draws and the sweep isolates the secrecy/sensing trade-off
    spec.base.cap_tx = 10.0;
    spec.base.cap_rx = 8.0;
    spec.sweep_name = "secrecy_floor";
    spec.sweep_values = {0.5, 2.0};
  } else if (name == "accuracy_vs_caprx") {
    spec.base.n_antennas = 2;
    spec.base.power_budget = 5.0;
    spec.base.cap_tx = 5.0;
    spec.sweep_name = "cap_rx";
    spec.sweep_values = {1, 2, 3, 4, 5};
  } else if (name == "sinr_vs_user_angle") {
    spec.base.n_antennas = 6;
    spec.base.power_budget = 5.0;
    spec.base.n_rx = 1;
    spec.base.rx_positions.resize(1);
    spec.base.n_users = 1;
    spec.base.user_regions.resize(1);
    spec.base.eve_region.side = 0.0;
    spec.sweep_name = "user_angle_deg";
    for (int a = 0; a < 360; a += 10) spec.sweep_values.push_back(a);
  } else if (name == "custom") {
    spec.sweep_name = "none";
    spec.sweep_values = {0.0};
  } else {
    std::string valid;
    for (const auto& n : preset_names()) valid += " " + n;
    throw std::invalid_argument("unknown preset '" + name + "'; valid presets:" +
                                valid);
  }
  return spec;
}

namespace {

void assign_scalar(ScenarioConfig& cfg, const std::string& key,
                   const nlohmann::json& v) {
  if (key == "n_tx") cfg.n_tx = v.get<int>();
  else if (key == "n_rx") cfg.n_rx = v.get<int>();
  else if (key == "n_users") cfg.n_users = v.get<int>();
  else if (key == "n_antennas") cfg.n_antennas = v.get<int>();
  else if (key == "rician_factor") cfg.rician_factor = v.get<double>();
  else if (key == "var_scatter") cfg.var_scatter = v.get<double>();
  else if (key == "var_clutter") cfg.var_clutter = v.get<double>();
  else if (key == "var_noise_user") cfg.var_noise_user = v.get<double>();
  else if (key == "var_noise_eve") cfg.var_noise_eve = v.get<double>();
  else if (key == "var_noise_rx") cfg.var_noise_rx = v.get<double>();
  else if (key == "power_budget") cfg.power_budget = v.get<double>();
  else if (key == "cap_tx") cfg.cap_tx = v.get<double>();
  else if (key == "cap_rx") cfg.cap_rx = v.get<double>();
  else if (key == "secrecy_floor") cfg.secrecy_floor = v.get<double>();
  else if (key == "n_symbols") cfg.n_symbols = v.get<int>();
  else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
  else throw std::invalid_argument("unknown scenario key '" + key + "'");
}

Point2D parse_point(const nlohmann::json& v) {
  if (!v.is_array() || v.size() != 2) {
    throw std::invalid_argument("point must be a [x, y] array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Region parse_region(const nlohmann::json& v) {
  if (!v.is_object()) throw std::invalid_argument("region must be an object");
  Region r;
  bool have_center = false, have_side = false;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (it.key() == "center") {
      r.center = parse_point(it.value());
      have_center = true;
    } else if (it.key() == "side") {
      r.side = it.value().get<double>();
      have_side = true;
    } else {
      throw std::invalid_argument("unknown region key '" + it.key() + "'");
    }
  }
  if (!have_center || !have_side) {
    throw std::invalid_argument("region requires 'center' and 'side'");
  }
  return r;
}

}  // namespace

ScenarioConfig scenario_from_json(const std::string& json_text,
                                  const ScenarioConfig& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  ScenarioConfig cfg = base;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "tx_positions" || key == "rx_positions") {
      std::vector<Point2D> pts;
      for (const auto& p : it.value()) pts.push_back(parse_point(p));
      (key == "tx_positions" ? cfg.tx_positions : cfg.rx_positions) = pts;
    } else if (key == "user_regions") {
      cfg.user_regions.clear();
      for (const auto& r : it.value()) cfg.user_regions.push_back(parse_region(r));
    } else if (key == "eve_region") {
      cfg.eve_region = parse_region(it.value());
    } else {
      assign_scalar(cfg, key, it.value());
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

ScenarioConfig apply_sweep(const ExperimentSpec& spec, double value) {
  ScenarioConfig cfg = spec.base;
  if (spec.sweep_name == "secrecy_floor") cfg.secrecy_floor = value;
  else if (spec.sweep_name == "cap_rx") cfg.cap_rx = value;
  // user_angle_deg and none leave the config unchanged
  return cfg;
}

void emit_roc_rows(std::vector<CsvRow>& rows, const CsvRow& proto,
                   const ROCCurve* roc) {
  for (const double fa : roc_grid()) {
    CsvRow r = proto;
    r.metric_name = "roc";
    r.metric_x = fa;
    r.metric_y = roc ? detection_at_fa(*roc, fa)
                     : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(std::move(r));
  }
}

struct Aggregator {
  std::map<std::pair<double, std::string>, std::pair<double, int>> acc;
  void add(double sweep_value, const std::string& metric, double v) {
    auto& slot = acc[{sweep_value, metric}];
    slot.first += v;
    slot.second += 1;
  }
};

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  const fs::path csv_path = fs::path(spec.out_dir) / "results.csv";
  const fs::path summary_path = fs::path(spec.out_dir) / "summary.json";

  std::vector<CsvRow> rows;
  Aggregator agg;
  int failed = 0, total = 0;

  const bool angle_preset = spec.preset == "sinr_vs_user_angle";
  const bool accuracy_preset = spec.preset == "accuracy_vs_caprx";

  for (std::size_t sv = 0; sv < spec.sweep_values.size(); ++sv) {
    const double value = spec.sweep_values[sv];
    const ScenarioConfig cfg = apply_sweep(spec, value);
    const Budgets budgets = Budgets::from(cfg);
    const NoiseLevels noise = NoiseLevels::from(cfg);

    for (int d = 0; d < spec.n_channel_draws; ++d) {
      ++total;
      const std::uint64_t draw_seed = substream_seed(cfg.seed, 0xC4A11, d);
      Rng ch_rng(draw_seed);

      CsvRow proto;
      proto.preset = spec.preset;
      proto.sweep_name = spec.sweep_name;
      proto.sweep_value = value;
      proto.draw = d;
      proto.seed = draw_seed;
      proto.status = "ok";

      ChannelSet ch;
      DesignPoint design;
      bool ok = true;
      try {
        if (angle_preset) {
          const double rad = value * M_PI / 180.0;
          const Point2D center = cfg.eve_region.center;
          const std::vector<Point2D> users = {
              {center.x + 400.0 * std::cos(rad), center.y + 400.0 * std::sin(rad)}};
          ch = draw_channels_los(cfg, users, ch_rng);
        } else {
          ch = draw_channels(cfg, ch_rng);
        }
        Rng opt_rng(substream_seed(cfg.seed, 0x0A7, d));
        auto [dsn, trace] = mm_optimize(ch, budgets, noise, spec.mm, opt_rng);
        design = std::move(dsn);
      } catch (const std::exception& e) {
        ok = false;
        ++failed;
        proto.status = std::string("infeasible: ") + e.what();
        // collapse newlines so the CSV stays one-line-per-row
        std::replace(proto.status.begin(), proto.status.end(), '\n', ' ');
        std::replace(proto.status.begin(), proto.status.end(), ',', ';');
      }

      if (angle_preset) {
        CsvRow r = proto;
        r.metric_name = "sinr";
        r.metric_x = value;
        r.metric_y = ok ? sensing_sinr(design, ch, noise.rx)
                        : std::numeric_limits<double>::quiet_NaN();
        if (ok) agg.add(value, "sinr", r.metric_y);
        rows.push_back(std::move(r));
      } else if (accuracy_preset) {
        auto emit_acc = [&](const std::string& metric, double p_sa) {
          CsvRow r = proto;
          r.metric_name = metric;
          r.metric_x = value;
          r.metric_y = p_sa;
          if (!std::isnan(p_sa)) agg.add(value, metric, p_sa);
          rows.push_back(std::move(r));
        };
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (ok) {
          Rng det_rng(substream_seed(cfg.seed, 0xDE7, d));
          const ROCCurve roc_c =
              simulate_roc(design, ch, noise.rx, DetectionMode::Centralized,
                           cfg.n_symbols, spec.n_detection_trials, det_rng);
          emit_acc("accuracy_proposed",
                   sensing_accuracy(detection_at_fa(roc_c, 0.1), 0.1));
          Rng dist_rng(substream_seed(cfg.seed, 0xD157, d));
          const ROCCurve roc_d = simulate_roc_distributed(
              design, ch, noise.rx, cfg.n_symbols, spec.n_detection_trials,
              dist_rng);
          emit_acc("accuracy_distributed",
                   sensing_accuracy(detection_at_fa(roc_d, 0.1), 0.1));
        } else {
          emit_acc("accuracy_proposed", nan);
          emit_acc("accuracy_distributed", nan);
        }
        // random beamforming ignores the optimizer, so it runs either way
        Rng bf_rng(substream_seed(cfg.seed, 0xBF0, d));
        const DesignPoint random_design =
            random_beamforming_design(ch, budgets, noise, bf_rng);
        Rng det_rng(substream_seed(cfg.seed, 0xDE8, d));
        const ROCCurve roc_r =
            simulate_roc(random_design, ch, noise.rx, DetectionMode::Centralized,
                         cfg.n_symbols, spec.n_detection_trials, det_rng);
        emit_acc("accuracy_random",
                 sensing_accuracy(detection_at_fa(roc_r, 0.1), 0.1));
      } else {  // roc_sweep and custom
        if (ok) {
          Rng det_rng(substream_seed(cfg.seed, 0xDE7, d));
          const ROCCurve roc =
              simulate_roc(design, ch, noise.rx, DetectionMode::Centralized,
                           cfg.n_symbols, spec.n_detection_trials, det_rng);
          emit_roc_rows(rows, proto, &roc);
          agg.add(value, "p_de_at_fa_0.1", detection_at_fa(roc, 0.1));
        } else {
          emit_roc_rows(rows, proto, nullptr);
        }
      }
    }
  }

  if (failed == total) {
    throw std::runtime_error("run_experiment: every draw failed");
  }

  std::ofstream csv(csv_path);
  if (!csv) {
    throw std::runtime_error("run_experiment: cannot write " + csv_path.string());
  }
  csv << kCsvHeader << "\n";
  for (const auto& r : rows) {
    csv << r.preset << ',' << r.sweep_name << ',' << fmt_double(r.sweep_value)
        << ',' << r.draw << ',' << r.seed << ',' << r.status << ','
        << r.metric_name << ',' << fmt_double(r.metric_x) << ','
        << fmt_double(r.metric_y) << "\n";
  }
  csv.close();

  ordered_json summary;
  summary["preset"] = spec.preset;
  summary["sweep_name"] = spec.sweep_name;
  summary["n_channel_draws"] = spec.n_channel_draws;
  summary["n_detection_trials"] = spec.n_detection_trials;
  summary["seed"] = spec.base.seed;
  summary["n_rows"] = rows.size();
  summary["n_failed_draws"] = failed;
  summary["n_total_draws"] = total;
  ordered_json aggregates = ordered_json::array();
  for (const auto& [key, slot] : agg.acc) {
    ordered_json entry;
    entry["sweep_value"] = key.first;
    entry["metric"] = key.second;
    entry["mean"] = slot.first / slot.second;
    entry["count"] = slot.second;
    aggregates.push_back(std::move(entry));
  }
  summary["aggregates"] = std::move(aggregates);
  std::ofstream sj(summary_path);
  sj << summary.dump(2) << "\n";
  sj.close();

  return {csv_path.string(), summary_path.string(), static_cast<int>(rows.size()),
          failed, total};
}

// ---------------------------------------------------------------------------
// SVG emission

namespace {

struct ParsedCsv {
  std::vector<CsvRow> rows;
};

ParsedCsv parse_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("emit_plot: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("emit_plot: malformed CSV header in " + path);
  }
  ParsedCsv out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 9) {
      throw std::runtime_error("emit_plot: malformed CSV row: " + line);
    }
    CsvRow r;
    r.preset = f[0];
    r.sweep_name = f[1];
    r.sweep_value = std::stod(f[2]);
    r.draw = std::stoi(f[3]);
    r.seed = std::stoull(f[4]);
    r.status = f[5];
    r.metric_name = f[6];
    r.metric_x = f[7] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                               : std::stod(f[7]);
    r.metric_y = f[8] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                               : std::stod(f[8]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

struct Curve {
  std::string label;
  std::vector<std::pair<double, double>> pts;  // sorted by x
};

void write_svg(const std::string& path, const std::vector<Curve>& curves,
               const std::string& x_label, const std::string& y_label) {
  if (curves.empty()) throw std::runtime_error("emit_plot: no data rows");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& c : curves) {
    for (const auto& [x, y] : c.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  const double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << fmt_double(ml) << "\" y1=\"" << fmt_double(h - mb)
      << "\" x2=\"" << fmt_double(w - mr) << "\" y2=\"" << fmt_double(h - mb)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fmt_double(ml) << "\" y1=\"" << fmt_double(mt)
      << "\" x2=\"" << fmt_double(ml) << "\" y2=\"" << fmt_double(h - mb)
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    svg << "<text x=\"" << fmt_double(px(xv)) << "\" y=\"" << fmt_double(h - mb + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_double(xv)
        << "</text>\n";
    svg << "<text x=\"" << fmt_double(ml - 8) << "\" y=\"" << fmt_double(py(yv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_double(yv)
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt_double((ml + w - mr) / 2) << "\" y=\""
      << fmt_double(h - 12) << "\" font-size=\"13\" text-anchor=\"middle\">"
      << x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fmt_double((mt + h - mb) / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt_double((mt + h - mb) / 2) << ")\">" << y_label << "</text>\n";

  int ci = 0;
  for (const auto& c : curves) {
    const char* color = palette[ci % 8];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : c.pts) {
      svg << fmt_double(px(x)) << "," << fmt_double(py(y)) << " ";
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << fmt_double(w - mr - 5) << "\" y=\""
        << fmt_double(mt + 16 + 16 * ci) << "\" font-size=\"12\" text-anchor=\"end\" "
        << "fill=\"" << color << "\">" << c.label << "</text>\n";
    ++ci;
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_plot: cannot write " + path);
  out << svg.str();
}

}  // namespace

void emit_plot(const std::string& csv_path, const std::string& kind,
               const std::string& out_svg) {
  const ParsedCsv csv = parse_results_csv(csv_path);
  std::map<std::string, std::map<double, std::pair<double, int>>> grouped;

  if (kind == "roc") {
    // one curve per sweep value, p_de averaged over draws at each grid p_fa
    for (const auto& r : csv.rows) {
      if (r.metric_name != "roc" || std::isnan(r.metric_y)) continue;
      auto& slot = grouped[fmt_double(r.sweep_value)][r.metric_x];
      slot.first += r.metric_y;
      slot.second += 1;
    }
  } else if (kind == "accuracy" || kind == "sinr") {
    for (const auto& r : csv.rows) {
      if (std::isnan(r.metric_y)) continue;
      if (kind == "accuracy" && r.metric_name.rfind("accuracy", 0) != 0) continue;
      if (kind == "sinr" && r.metric_name != "sinr") continue;
      auto& slot = grouped[r.metric_name][r.metric_x];
      slot.first += r.metric_y;
      slot.second += 1;
    }
  } else {
    throw std::invalid_argument("emit_plot: unknown kind '" + kind +
                                "' (expected roc|accuracy|sinr)");
  }

  std::vector<Curve> curves;
  for (const auto& [label, pts] : grouped) {
    Curve c;
    c.label = label;
    for (const auto& [x, slot] : pts) c.pts.push_back({x, slot.first / slot.second});
    curves.push_back(std::move(c));
  }
  const std::string x_label = kind == "roc"          ? "false-alarm probability"
                              : kind == "accuracy"   ? "RX fronthaul capacity (bits/symbol)"
                                                     : "user angle (deg)";
  const std::string y_label = kind == "roc"          ? "detection probability"
                              : kind == "accuracy"   ? "sensing accuracy"
                                                     : "sensing SINR (dB)";
  if (kind == "sinr") {
    for (auto& c : curves) {
      for (auto& [x, y] : c.pts) y = 10.0 * std::log10(std::max(y, 1e-12));
    }
  }
  write_svg(out_svg, curves, x_label, y_label);
}

}  // namespace isac
