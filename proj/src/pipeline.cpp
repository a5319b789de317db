#include "rrm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "rrm/dh_benchmark.hpp"
#include "rrm/errors.hpp"
#include "rrm/logging.hpp"
#include "rrm/parallel.hpp"
#include "rrm/seeding.hpp"
#include "rrm/text.hpp"

#ifndef RRM_VERSION
#define RRM_VERSION "0.0.0"
#endif

namespace rrm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kMaxFailedFraction = 0.05;

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  for (auto field : text::split(value, ',')) {
    if (field.empty()) continue;
    const auto v = text::to_double(field);
    if (!v) throw std::invalid_argument("not a number: '" + std::string(field) + "'");
    out.push_back(*v);
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& value) {
  const auto v = text::to_integer<Int>(value);
  if (!v) throw std::invalid_argument(key + ": not an integer: '" + value + "'");
  return *v;
}

double parse_real(const std::string& key, const std::string& value) {
  const auto v = text::to_double(value);
  if (!v) throw std::invalid_argument(key + ": not a number: '" + value + "'");
  return *v;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string file_stem(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  for (const char* suffix : {".gz", ".csv", ".txt"}) {
    const std::string s(suffix);
    if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) {
      name.resize(name.size() - s.size());
    }
  }
  return name;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string method_suffix(RiskMethod method) {
  switch (method) {
    case RiskMethod::Cf: return "cf";
    case RiskMethod::Mc: return "mc";
    case RiskMethod::Ensemble: return "ens";
    case RiskMethod::Dh: return "dh";
  }
  return "?";
}

std::vector<RiskMethod> output_methods(RiskMethod method) {
  if (method == RiskMethod::Ensemble) return {RiskMethod::Cf, RiskMethod::Mc, RiskMethod::Ensemble};
  return {method};
}

std::string manifest_path_for(const std::string& csv_path) {
  fs::path p(csv_path);
  p.replace_extension(".manifest.json");
  return p.string();
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string format_theta(double theta) { return text::format_double(theta); }

}  // namespace

std::string library_version() { return RRM_VERSION; }

void RunConfig::validate() const {
  if (thetas.empty()) throw std::invalid_argument("theta list must not be empty");
  for (double t : thetas) RiskSpec{t, es_grid_size, es_rule}.validate();
  SubordinationSpec{subordinator, c}.validate();
  if (drift.kind == DriftKind::Ema && drift.beta < 1) throw std::invalid_argument("EMA beta must be >= 1");
  if (method != RiskMethod::Dh && c < 10) throw std::invalid_argument("model fitting needs c >= 10");
  mc.validate();
  DhConfig{hurst}.validate();
  forecaster.validate();
  if (ema_init_window < 1) throw std::invalid_argument("ema_init_window must be >= 1");
  if (n_boot == 0) throw std::invalid_argument("n_boot must be positive");
  if (jobs == 0) throw std::invalid_argument("jobs must be positive");
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "input") {
    inputs.clear();
    for (auto f : text::split(value, ',')) {
      if (!f.empty()) inputs.emplace_back(f);
    }
  } else if (key == "subordinator") {
    subordinator = parse_subordinator_kind(value);
  } else if (key == "c") {
    c = parse_int<int>(key, value);
  } else if (key == "drift") {
    drift = DriftSpec::parse(value);
  } else if (key == "filter") {
    filter = parse_filter_mode(value);
  } else if (key == "theta") {
    thetas = parse_double_list(value);
  } else if (key == "method") {
    method = parse_risk_method(value);
  } else if (key == "es_rule") {
    if (value == "tail") {
      es_rule = EsRule::TailIntegral;
    } else if (value == "grid") {
      es_rule = EsRule::QuantileGrid;
    } else {
      throw std::invalid_argument("es_rule must be tail or grid");
    }
  } else if (key == "es_grid_size") {
    es_grid_size = parse_int<int>(key, value);
  } else if (key == "mc_batch") {
    mc.batch_size = parse_int<std::size_t>(key, value);
  } else if (key == "hurst") {
    hurst = parse_real(key, value);
  } else if (key == "ema_init_window") {
    ema_init_window = parse_int<int>(key, value);
  } else if (key == "forecaster") {
    forecaster.kind = parse_forecaster_kind(value);
  } else if (key == "alpha") {
    forecaster.alpha = parse_real(key, value);
  } else if (key == "train_years") {
    forecaster.train_years = parse_int<int>(key, value);
  } else if (key == "test_years") {
    forecaster.test_years = parse_int<int>(key, value);
  } else if (key == "days_per_year") {
    forecaster.days_per_year = parse_int<int>(key, value);
  } else if (key == "n_boot") {
    n_boot = parse_int<std::size_t>(key, value);
  } else if (key == "output_dir") {
    output_dir = value;
  } else if (key == "seed") {
    seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "jobs") {
    jobs = parse_int<unsigned>(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

std::string RunConfig::canonical() const {
  std::vector<std::string> thetas_text;
  for (double t : thetas) thetas_text.push_back(format_theta(t));
  std::map<std::string, std::string> kv{
      {"input", join(inputs, ',')},
      {"subordinator", std::string(to_string(subordinator))},
      {"c", std::to_string(c)},
      {"drift", drift.name()},
      {"filter", std::string(to_string(filter))},
      {"theta", join(thetas_text, ',')},
      {"method", std::string(to_string(method))},
      {"es_rule", es_rule == EsRule::TailIntegral ? "tail" : "grid"},
      {"es_grid_size", std::to_string(es_grid_size)},
      {"mc_batch", std::to_string(mc.batch_size)},
      {"hurst", text::format_double(hurst)},
      {"ema_init_window", std::to_string(ema_init_window)},
      {"forecaster", std::string(to_string(forecaster.kind))},
      {"alpha", text::format_double(forecaster.alpha)},
      {"train_years", std::to_string(forecaster.train_years)},
      {"test_years", std::to_string(forecaster.test_years)},
      {"days_per_year", std::to_string(forecaster.days_per_year)},
      {"n_boot", std::to_string(n_boot)},
      {"output_dir", output_dir},
      {"seed", std::to_string(seed)},
      {"jobs", std::to_string(jobs)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

std::string RunConfig::method_label() const {
  if (method == RiskMethod::Dh) return "dh";
  return std::string(to_string(method)) + "-" + std::string(to_string(filter)) + "-" + drift.name();
}

RunConfig parse_config(const std::string& content, RunConfig base) {
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    const auto body = text::trim(std::string_view(line).substr(0, hash_pos));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string value(text::trim(body.substr(eq + 1)));
    try {
      base.set(key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

DayPanel load_panel(const std::string& path) {
  const std::string content = read_text_file(path);
  const auto first_break = content.find('\n');
  const std::string header = text::lower(text::trim(std::string_view(content).substr(0, first_break)));
  std::istringstream in(content);
  if (header == "date,minute,log_price,volume") return read_panel_csv(in, file_stem(path));
  return parse_minute_csv(in, SessionSpec{}, file_stem(path));
}

const RiskPair& DayEstimate::reported(RiskMethod method, std::size_t k) const {
  switch (method) {
    case RiskMethod::Cf: return cf.at(k);
    case RiskMethod::Mc: return mc.at(k);
    case RiskMethod::Ensemble: return ensemble.at(k);
    case RiskMethod::Dh: return dh.at(k);
  }
  throw std::logic_error("unknown method");
}

EstimateResult estimate_panel(const DayPanel& panel, const RunConfig& config) {
  config.validate();
  const std::size_t n = panel.days.size();
  EstimateResult result;
  result.days_total = n;
  if (n == 0) return result;

  std::vector<double> daily(n);
  for (std::size_t t = 0; t < n; ++t) daily[t] = daily_return(panel.days[t]);
  std::vector<double> drift(n, 0.0);
  // dh ignores the drift but still skips the burn-in days, so its rows line up
  // with a model run on the same config
  if (config.drift.kind == DriftKind::Ema) {
    drift = ema_drift(daily, config.drift.beta, config.ema_init_window);
  }
  std::vector<RiskSpec> specs;
  for (double theta : config.thetas) specs.push_back({theta, config.es_grid_size, config.es_rule});

  enum class Status { Ok, Failed, BurnIn };
  std::vector<Status> status(n, Status::Ok);
  std::vector<DayEstimate> slots(n);
  const SubordinationSpec sub{config.subordinator, config.c};

  parallel_for(n, config.jobs, [&](std::size_t t) {
    const IntradayDay& day = panel.days[t];
    DayEstimate& est = slots[t];
    est.date = day.date;
    est.y = daily[t];
    if (std::isnan(drift[t])) {
      status[t] = Status::BurnIn;
      return;
    }
    try {
      const SubordinatedSeries series = subordinate(day, sub);
      if (config.method == RiskMethod::Dh) {
        for (const auto& spec : specs) est.dh.push_back(dh_risk_pair(series.returns, spec, {config.hurst}));
        return;
      }
      const double mu_fixed = drift[t] / config.c;
      TailModel model = config.filter == FilterMode::Iid ? fit_iid_t(series.returns, mu_fixed)
                                                         : fit_ma1_t(series.returns, mu_fixed);
      model.c = config.c;
      est.model = model;
      if (config.method != RiskMethod::Mc) est.cf = cf_risk_pairs(model, specs);
      if (config.method != RiskMethod::Cf) {
        McConfig mc = config.mc;
        mc.seed = derive_seed(config.seed, format_date(day.date));
        est.mc = mc_risk_pairs(model, specs, mc);
      }
      if (config.method == RiskMethod::Ensemble) {
        for (std::size_t k = 0; k < specs.size(); ++k) est.ensemble.push_back(ensemble_risk_pair(est.cf[k], est.mc[k]));
      }
    } catch (const std::exception& e) {
      status[t] = Status::Failed;
      log_warning("day " + format_date(day.date) + " failed: " + e.what());
    }
  });

  for (std::size_t t = 0; t < n; ++t) {
    switch (status[t]) {
      case Status::Ok: result.days.push_back(std::move(slots[t])); break;
      case Status::Failed: ++result.days_failed; break;
      case Status::BurnIn: ++result.days_burn_in; break;
    }
  }
  const std::size_t attempted = n - result.days_burn_in;
  if (static_cast<double>(result.days_failed) > kMaxFailedFraction * static_cast<double>(attempted)) {
    throw NumericalError(std::to_string(result.days_failed) + " of " + std::to_string(attempted) +
                             " days failed (limit 5%)",
                         static_cast<double>(result.days_failed) / static_cast<double>(attempted));
  }
  return result;
}

std::string estimate_csv(const EstimateResult& result, const RunConfig& config) {
  const auto methods = output_methods(config.method);
  const bool with_model = config.method != RiskMethod::Dh;
  std::string out = "date,theta,y";
  if (with_model) out += ",mu,sigma,nu,phi";
  for (RiskMethod m : methods) out += ",var_" + method_suffix(m) + ",es_" + method_suffix(m);
  out += '\n';
  for (const auto& day : result.days) {
    const std::string date = format_date(day.date);
    for (std::size_t k = 0; k < config.thetas.size(); ++k) {
      out += date + "," + format_theta(config.thetas[k]) + "," + text::format_double(day.y);
      if (with_model) {
        const TailModel& m = *day.model;
        out += "," + text::format_double(m.mu) + "," + text::format_double(m.sigma) + "," +
               text::format_double(m.nu) + "," + (m.phi ? text::format_double(*m.phi) : std::string());
      }
      for (RiskMethod m : methods) {
        const RiskPair& p = day.reported(m, k);
        out += "," + text::format_double(p.var) + "," + text::format_double(p.es);
      }
      out += '\n';
    }
  }
  return out;
}

RealizedPanel realized_panel(const EstimateResult& result, RiskMethod method, std::size_t theta_index,
                             double theta) {
  RealizedPanel panel;
  panel.theta = theta;
  for (const auto& day : result.days) {
    const RiskPair& p = day.reported(method, theta_index);
    panel.dates.push_back(day.date);
    panel.y.push_back(day.y);
    panel.q_hat.push_back(p.var);
    panel.e_hat.push_back(p.es);
  }
  return panel;
}

std::string truth_sidecar_path(const std::string& panel_path) {
  fs::path p(panel_path);
  const std::string name = file_stem(panel_path);
  return (p.parent_path() / (name + ".truth.json")).string();
}

RunOutputs run_estimate(const RunConfig& config) {
  config.validate();
  if (config.inputs.empty()) throw std::invalid_argument("no input files given");
  fs::create_directories(config.output_dir);
  RunOutputs outputs;
  for (const auto& input : config.inputs) {
    const DayPanel panel = load_panel(input);
    if (panel.days.empty()) throw DataError(input + ": no usable trading days");
    const EstimateResult result = estimate_panel(panel, config);
    const std::string stem = panel.asset_id + "_" + config.method_label() + "_" +
                             std::string(to_string(config.subordinator)) + "_c" + std::to_string(config.c);
    const fs::path csv = fs::path(config.output_dir) / (stem + ".csv");
    write_file(csv, estimate_csv(result, config));

    const std::string truth = truth_sidecar_path(input);
    json manifest;
    manifest["version"] = library_version();
    manifest["config_hash"] = config.hash();
    manifest["seed"] = config.seed;
    manifest["input"] = input;
    manifest["asset_id"] = panel.asset_id;
    manifest["method"] = std::string(to_string(config.method));
    manifest["method_label"] = config.method_label();
    manifest["subordinator"] = std::string(to_string(config.subordinator));
    manifest["c"] = config.c;
    manifest["filter"] = std::string(to_string(config.filter));
    manifest["drift"] = config.drift.name();
    manifest["theta"] = config.thetas;
    manifest["days_total"] = result.days_total;
    manifest["days_estimated"] = result.days.size();
    manifest["days_failed"] = result.days_failed;
    manifest["days_burn_in"] = result.days_burn_in;
    manifest["truth"] = fs::exists(truth) ? json(truth) : json(nullptr);
    manifest["config"] = config.canonical();
    const std::string manifest_path = manifest_path_for(csv.string());
    write_file(manifest_path, manifest.dump(2) + "\n");
    log_info("wrote " + csv.string() + " (" + std::to_string(result.days.size()) + " days, " +
             std::to_string(result.days_failed) + " failed)");
    outputs.csv_paths.push_back(csv.string());
    outputs.manifest_paths.push_back(manifest_path);
  }
  return outputs;
}

namespace {

struct RunFile {
  json manifest;
  std::vector<RealizedPanel> panels;  // one per theta
};

RunFile read_run(const std::string& csv_path) {
  RunFile run;
  run.manifest = read_json(manifest_path_for(csv_path));
  const auto method = parse_risk_method(run.manifest.at("method").get<std::string>());
  const std::vector<double> thetas = run.manifest.at("theta").get<std::vector<double>>();
  const std::string suffix = method_suffix(method);

  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, csv_path + ": empty file");
  const auto header = text::split(line, ',');
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(csv_path + ": missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_date = column("date");
  const std::size_t c_theta = column("theta");
  const std::size_t c_y = column("y");
  const std::size_t c_var = column("var_" + suffix);
  const std::size_t c_es = column("es_" + suffix);

  run.panels.resize(thetas.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) run.panels[k].theta = thetas[k];
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() != header.size()) throw ParseError(line_no, csv_path + ": wrong field count");
    const auto theta = text::to_double(f[c_theta]);
    const auto y = text::to_double(f[c_y]);
    const auto q = text::to_double(f[c_var]);
    const auto e = text::to_double(f[c_es]);
    if (!theta || !y || !q || !e) throw ParseError(line_no, csv_path + ": malformed number");
    const auto it = std::find(thetas.begin(), thetas.end(), *theta);
    if (it == thetas.end()) throw ParseError(line_no, csv_path + ": theta not in manifest");
    auto& p = run.panels[static_cast<std::size_t>(it - thetas.begin())];
    p.dates.push_back(parse_date(f[c_date]));
    p.y.push_back(*y);
    p.q_hat.push_back(*q);
    p.e_hat.push_back(*e);
  }
  return run;
}

struct Table {
  std::set<std::pair<int, double>> columns;  // (c, theta)
  std::map<std::string, std::map<std::pair<int, double>, double>> cells;
};

std::string table_csv(const Table& table) {
  // Columns ordered by c, then theta from largest to smallest.
  std::vector<std::pair<int, double>> cols(table.columns.begin(), table.columns.end());
  std::sort(cols.begin(), cols.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  });
  std::string out = "row";
  for (const auto& [c, theta] : cols) out += ",theta=" + format_theta(theta) + ";c=" + std::to_string(c);
  out += '\n';
  for (const auto& [row, cells] : table.cells) {
    out += row;
    for (const auto& col : cols) {
      out += ',';
      const auto it = cells.find(col);
      if (it != cells.end() && std::isfinite(it->second)) out += text::format_double(it->second);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::vector<std::string> run_backtest(const RunConfig& config, const std::vector<std::string>& run_csvs) {
  config.forecaster.validate();
  if (run_csvs.empty()) throw std::invalid_argument("backtest needs at least one estimate output");
  std::map<std::string, Table> tables;
  for (const auto& path : run_csvs) {
    const RunFile run = read_run(path);
    const std::string row = run.manifest.at("method_label").get<std::string>() + "/" +
                            run.manifest.at("subordinator").get<std::string>();
    const int c = run.manifest.at("c").get<int>();
    std::optional<json> truth;
    if (!run.manifest.at("truth").is_null()) {
      truth = read_json(run.manifest.at("truth").get<std::string>());
    }
    for (std::size_t k = 0; k < run.panels.size(); ++k) {
      const RealizedPanel& panel = run.panels[k];
      if (panel.size() == 0) continue;
      panel.validate();
      const std::pair<int, double> col{c, panel.theta};
      auto put = [&](const std::string& metric, double value) {
        tables[metric].columns.insert(col);
        tables[metric].cells[row][col] = value;
      };
      put("hits", hits_frequency(panel));
      const auto yearly = as_tests_by_year(panel, config.n_boot,
                                           derive_seed(config.seed, path + "#" + format_theta(panel.theta)));
      put("as1_rejection", yearly.as1_rejection_rate);
      put("as2_rejection", yearly.as2_rejection_rate);
      const std::size_t need = static_cast<std::size_t>(config.forecaster.train_years + config.forecaster.test_years) *
                               static_cast<std::size_t>(config.forecaster.days_per_year);
      if (panel.size() >= need) {
        const auto folds = rolling_forecast_eval(panel, config.forecaster);
        double pin = 0.0;
        double joint = 0.0;
        std::size_t joint_n = 0;
        for (const auto& f : folds) {
          pin += f.pinball_mean;
          if (std::isfinite(f.joint_mean)) {
            joint += f.joint_mean;
            ++joint_n;
          }
        }
        put("pinball_oos", pin / static_cast<double>(folds.size()));
        put("joint_oos", joint_n ? joint / static_cast<double>(joint_n) : std::nan(""));
      } else {
        log_warning(path + ": too short for rolling out-of-sample evaluation");
      }
      if (truth) {
        const auto thetas = truth->at("theta").get<std::vector<double>>();
        const auto it = std::find(thetas.begin(), thetas.end(), panel.theta);
        if (it != thetas.end()) {
          const auto idx = static_cast<std::size_t>(it - thetas.begin());
          const double var_true = truth->at("var_true").at(idx).get<double>();
          const double es_true = truth->at("es_true").at(idx).get<double>();
          put("rmse_var", rmse_vs_truth(panel.q_hat, std::vector<double>(panel.size(), var_true)));
          put("rmse_es", rmse_vs_truth(panel.e_hat, std::vector<double>(panel.size(), es_true)));
        }
      }
    }
  }
  fs::create_directories(config.output_dir);
  std::vector<std::string> written;
  for (const auto& [metric, table] : tables) {
    const fs::path out = fs::path(config.output_dir) / ("backtest_" + metric + ".csv");
    write_file(out, table_csv(table));
    written.push_back(out.string());
  }
  return written;
}

std::vector<std::string> run_synthetic(const RunConfig& config, const SyntheticRequest& request) {
  request.spec.validate();
  for (double t : request.thetas) RiskSpec{t}.validate();
  fs::create_directories(config.output_dir);
  const SyntheticPanel panel = generate(request.spec);
  const DayPanel days = to_day_panel(panel, request.name);
  const fs::path csv = fs::path(config.output_dir) / (request.name + ".csv");
  {
    std::ostringstream out;
    write_panel_csv(out, days);
    write_file(csv, out.str());
  }
  const GroundTruth truth = ground_truth(request.spec, request.thetas, request.oracle_n);
  const auto& s = request.spec;
  json sidecar;
  sidecar["family"] = std::string(to_string(s.family));
  sidecar["dependence"] = std::string(to_string(s.dependence));
  sidecar["c"] = s.c;
  sidecar["phi"] = s.phi_or_zero();
  sidecar["mu"] = s.mu;
  sidecar["sigma"] = s.sigma;
  if (s.family == Family::StudentT) sidecar["nu"] = s.nu;
  sidecar["n_days"] = s.n_days;
  sidecar["seed"] = s.seed;
  sidecar["theta"] = truth.theta;
  sidecar["var_true"] = truth.var_true;
  sidecar["es_true"] = truth.es_true;
  sidecar["var_se"] = truth.var_se;
  sidecar["es_se"] = truth.es_se;
  sidecar["truth_method"] = truth.method == TruthMethod::Analytic ? "analytic" : "mc_oracle";
  sidecar["oracle_n"] = truth.oracle_n;
  sidecar["version"] = library_version();
  const std::string sidecar_path = truth_sidecar_path(csv.string());
  write_file(sidecar_path, sidecar.dump(2) + "\n");
  return {csv.string(), sidecar_path};
}

std::vector<std::string> run_diagnose(const RunConfig& config, int lags, StructureAggregation aggregation) {
  if (config.inputs.empty()) throw std::invalid_argument("no input files given");
  SubordinationSpec{config.subordinator, config.c}.validate();
  fs::create_directories(config.output_dir);
  std::vector<std::string> written;
  for (const auto& input : config.inputs) {
    const DayPanel panel = load_panel(input);
    if (panel.days.empty()) throw DataError(input + ": no usable trading days");
    const SubordinationSpec sub{config.subordinator, config.c};
    StructureFunctionOptions options;
    options.aggregation = aggregation;
    const auto report = structure_function(panel, sub, options);
    const std::string stem = panel.asset_id + "_" + std::string(to_string(config.subordinator)) + "_c" +
                             std::to_string(config.c);
    std::string sf = "q,H,log_A,r2\n";
    for (std::size_t i = 0; i < report.q_grid.size(); ++i) {
      sf += text::format_double(report.q_grid[i]) + "," + text::format_double(report.Hq[i]) + "," +
            text::format_double(report.Aq_log[i]) + "," + text::format_double(report.r2[i]) + "\n";
    }
    const fs::path sf_path = fs::path(config.output_dir) / (stem + "_structure.csv");
    write_file(sf_path, sf);

    std::string lb = "date,statistic,lags,p_value\n";
    std::size_t rejected = 0;
    std::size_t tested = 0;
    for (const auto& day : panel.days) {
      const auto series = subordinate(day, sub);
      try {
        const auto r = ljung_box(series.returns, lags);
        lb += format_date(day.date) + "," + text::format_double(r.statistic) + "," + std::to_string(r.lags) + "," +
              text::format_double(r.p_value) + "\n";
        ++tested;
        rejected += r.p_value < 0.05 ? 1 : 0;
      } catch (const DataError& e) {
        log_warning(format_date(day.date) + ": Ljung-Box skipped: " + e.what());
      }
    }
    const fs::path lb_path = fs::path(config.output_dir) / (stem + "_ljung_box.csv");
    write_file(lb_path, lb);
    if (tested) {
      log_info(stem + ": Ljung-Box rejects at 5% on " + std::to_string(rejected) + " of " +
               std::to_string(tested) + " days");
    }
    written.push_back(sf_path.string());
    written.push_back(lb_path.string());
  }
  return written;
}

}  // namespace rrm
