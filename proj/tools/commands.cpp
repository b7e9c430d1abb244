#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "encompass/dgp.hpp"
#include "encompass/links.hpp"
#include "encompass/mcstudy.hpp"
#include "encompass/rng.hpp"

namespace enc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::set<std::string> encompass_keys() {
  return {"input", "output", "fitted", "link",  "mode",  "horizon",    "kind",
          "cov",   "c_T",    "m_T",    "n_draws", "level", "seed",     "alpha",
          "box_bound", "n_starts", "ils_rounds"};
}

std::set<std::string> mc_keys() {
  return {"design", "pi_grid", "T_grid", "h",     "kind",    "links",    "modes",
          "directions", "n_reps", "level", "cov", "n_draws", "paths",   "burn",
          "alpha",  "seed",    "threads", "out_dir", "n_starts", "ils_rounds"};
}

std::set<std::string> backtest_keys() { return {"input", "output", "alpha"}; }

std::set<std::string> simulate_keys() {
  return {"design", "pi", "T", "h", "kind", "paths", "burn", "alpha", "seed", "output"};
}

namespace {

double config_alpha(const RunConfig& c) {
  const double alpha = c.real("alpha", 0.025);
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorCode::ConfigError, "alpha must lie in (0, 0.5): lower-tail convention");
  }
  return alpha;
}

double config_level(const RunConfig& c) {
  const double level = c.real("level", 0.05);
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::ConfigError, "level must lie in (0,1)");
  return level;
}

std::size_t positive(const RunConfig& c, const std::string& key, long long fallback) {
  const long long v = c.integer(key, fallback);
  if (v < 1) throw Error(ErrorCode::ConfigError, key + " must be positive");
  return static_cast<std::size_t>(v);
}

std::string required(const RunConfig& c, const std::string& key) {
  const auto v = c.find(key);
  if (!v || v->empty()) throw Error(ErrorCode::ConfigError, "missing required key '" + key + "'");
  return *v;
}

template <class F>
auto token(const std::string& key, const std::string& value, F parse) {
  try {
    return parse(value);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, key + ": " + e.what());
  }
}

std::uint64_t resolve_seed(const RunConfig& c) {
  const auto v = c.find("seed");
  if (!v) return fresh_seed();
  try {
    std::size_t pos = 0;
    const unsigned long long s = std::stoull(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing");
    return s;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "seed: '" + *v + "' is not an unsigned integer");
  }
}

FitOptions config_fit(const RunConfig& c) {
  FitOptions f;
  f.n_random_starts = static_cast<int>(c.integer("n_starts", f.n_random_starts));
  f.max_ils_rounds = static_cast<int>(c.integer("ils_rounds", f.max_ils_rounds));
  try {
    f.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return f;
}

json config_json(const RunConfig& c) {
  json out = json::object();
  for (const auto& [k, v] : c.values()) out[k] = v;
  return out;
}

json meta(const RunConfig& c, std::uint64_t seed) {
  return {{"version", kVersion}, {"seed", seed}, {"config", config_json(c)}};
}

}  // namespace

int cmd_encompass(const RunConfig& c, bool force) {
  const fs::path input = required(c, "input");
  const fs::path output = required(c, "output");
  const double alpha = config_alpha(c);
  const double level = config_level(c);
  const int horizon = static_cast<int>(c.integer("horizon", 1));
  if (horizon < 1) throw Error(ErrorCode::ConfigError, "horizon must be >= 1");
  const auto kind = token("kind", c.str("kind", "ahead"), forecast_kind_from_string);
  const auto link = token("link", c.str("link", "convex"), link_kind_from_string);
  const auto mode = token("mode", c.str("mode", "joint"), test_mode_from_string);

  TestOptions opt;
  opt.alpha = alpha;
  if (auto v = c.find("cov")) opt.cov_variant = token("cov", *v, cov_variant_from_string);
  if (c.has("c_T")) {
    opt.c_T = c.real("c_T", 0.0);
    if (!(*opt.c_T > 0.0)) throw Error(ErrorCode::ConfigError, "c_T must be positive");
  }
  if (c.has("m_T")) {
    opt.m_T = static_cast<int>(c.integer("m_T", 0));
    if (*opt.m_T < 0) throw Error(ErrorCode::ConfigError, "m_T must be nonnegative");
  }
  if (c.has("box_bound")) opt.box_bound = c.real("box_bound", 0.0);
  opt.n_draws = positive(c, "n_draws", 10000);
  opt.fit = config_fit(c);
  opt.levels = {0.10, 0.05, 0.01};
  if (std::find(opt.levels.begin(), opt.levels.end(), level) == opt.levels.end()) {
    opt.levels.push_back(level);
  }
  const std::uint64_t seed = resolve_seed(c);

  const auto table = read_csv(input, {"y", "q1", "e1", "q2", "e2"});
  const ForecastPanel panel =
      build_panel(table.columns.at("y"), table.columns.at("q1"), table.columns.at("e1"),
                  table.columns.at("q2"), table.columns.at("e2"), horizon, kind);

  std::vector<TestReport> reports;
  const Direction dirs[] = {Direction::one_encompasses_two, Direction::two_encompasses_one};
  for (std::size_t i = 0; i < 2; ++i) {
    TestOptions o = opt;
    o.seed = derive_seed(seed, {i, 0});
    o.fit.seed = derive_seed(seed, {i, 1});
    reports.push_back(run_encompassing_test(panel, link, mode, dirs[i], o));
  }
  const auto cls = classify_pair(reports[0], reports[1], level);

  json doc;
  doc["meta"] = meta(c, seed);
  doc["reports"] = json::array({to_json(reports[0]), to_json(reports[1])});
  doc["classification"] = to_json(cls);

  std::string fitted_text;
  if (auto fitted = c.find("fitted")) {
    const LinkSpec spec = make_link(link, default_box_bound(panel), mode);
    const auto d1 = make_design(spec, panel), d2 = make_design(spec, panel.swapped());
    const Vector gq1 = d1.gq(reports[0].theta_hat), ge1 = d1.ge(reports[0].theta_hat);
    const Vector gq2 = d2.gq(reports[1].theta_hat), ge2 = d2.ge(reports[1].theta_hat);
    std::ostringstream out;
    out << "t,gq_forecast1,ge_forecast1,gq_forecast2,ge_forecast2\n";
    for (std::size_t t = 0; t < panel.size(); ++t) {
      const auto i = static_cast<Eigen::Index>(t);
      out << table.labels[t] << ',' << format_real(gq1(i)) << ',' << format_real(ge1(i)) << ','
          << format_real(gq2(i)) << ',' << format_real(ge2(i)) << '\n';
    }
    fitted_text = out.str();
    if (fs::exists(*fitted) && !force) {
      throw Error(ErrorCode::ConfigError, "refusing to overwrite " + *fitted + " (use --force)");
    }
  }
  write_atomic(output, dump_json(doc), force);
  if (auto fitted = c.find("fitted")) write_atomic(*fitted, fitted_text, force);

  std::cout << to_string(cls.outcome) << " (p1=" << format_real(cls.p1)
            << ", p2=" << format_real(cls.p2) << ")\n";
  return ok;
}

int cmd_mc(const RunConfig& c, bool force) {
  ExperimentDesign d;
  d.dgp.kind = token("design", c.str("design", "garch_normal"), design_kind_from_string);
  d.dgp.h = static_cast<int>(c.integer("h", 1));
  d.dgp.forecast_kind = token("kind", c.str("kind", "ahead"), forecast_kind_from_string);
  d.dgp.paths = static_cast<int>(c.integer("paths", 10000));
  d.dgp.burn = static_cast<std::size_t>(c.integer("burn", 1000));
  d.dgp.alpha = config_alpha(c);
  d.pi_grid.clear();
  for (const auto& s : c.list("pi_grid", "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")) {
    d.pi_grid.push_back(parse_real(s, "pi_grid"));
  }
  d.T_grid.clear();
  for (const auto& s : c.list("T_grid", "1000")) {
    const long long T = parse_integer(s, "T_grid");
    if (T < 1) throw Error(ErrorCode::ConfigError, "T_grid entries must be positive");
    d.T_grid.push_back(static_cast<std::size_t>(T));
  }
  d.links.clear();
  for (const auto& s : c.list("links", "convex")) d.links.push_back(token("links", s, link_kind_from_string));
  d.modes.clear();
  for (const auto& s : c.list("modes", "joint")) d.modes.push_back(token("modes", s, test_mode_from_string));
  d.directions.clear();
  for (const auto& s : c.list("directions", "forecast1,forecast2")) {
    d.directions.push_back(token("directions", s, direction_from_string));
  }
  d.n_reps = positive(c, "n_reps", 500);
  d.level = config_level(c);
  if (auto v = c.find("cov")) d.cov_variant = token("cov", *v, cov_variant_from_string);
  d.n_draws = positive(c, "n_draws", 10000);
  d.fit = config_fit(c);
  d.threads = static_cast<unsigned>(c.integer("threads", 0));
  d.master_seed = resolve_seed(c);
  try {
    d.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }

  const fs::path out_dir = required(c, "out_dir");
  const fs::path files[] = {out_dir / "size.csv", out_dir / "power.csv",
                            out_dir / "adjusted_power.csv", out_dir / "manifest.json"};
  if (!force) {
    for (const auto& f : files) {
      if (fs::exists(f)) {
        throw Error(ErrorCode::ConfigError, "refusing to overwrite " + f.string() + " (use --force)");
      }
    }
  }

  const auto table = size_power_experiment(d);
  std::ostringstream size, power, adjusted;
  write_size_csv(size, table);
  write_power_csv(power, table);
  write_adjusted_power_csv(adjusted, table);

  json failures = json::array();
  std::size_t n_failed = 0;
  for (const auto& cell : table.cells) {
    n_failed += cell.failures;
    if (cell.failures == 0) continue;
    failures.push_back({{"T", cell.key.T},
                        {"link", to_string(cell.key.link)},
                        {"mode", to_string(cell.key.mode)},
                        {"direction", to_string(cell.key.direction)},
                        {"pi", cell.key.pi},
                        {"failures", cell.failures},
                        {"messages", cell.failure_messages}});
  }
  json manifest;
  manifest["meta"] = meta(c, d.master_seed);
  manifest["warnings"] = d.warnings();
  manifest["failed_replications"] = n_failed;
  manifest["failures"] = failures;
  manifest["files"] = {"size.csv", "power.csv", "adjusted_power.csv"};

  write_atomic(files[0], size.str(), force);
  write_atomic(files[1], power.str(), force);
  write_atomic(files[2], adjusted.str(), force);
  write_atomic(files[3], dump_json(manifest), force);
  for (const auto& w : d.warnings()) std::cerr << "warning: " << w << '\n';
  return ok;
}

int cmd_backtest(const RunConfig& c, bool force) {
  const fs::path input = required(c, "input");
  const fs::path output = required(c, "output");
  const double alpha = config_alpha(c);
  const auto table = read_csv(input, {"y", "q1", "e1"}, {"q2", "e2"});
  const bool has_two = table.columns.count("q2") > 0;
  if (has_two != (table.columns.count("e2") > 0)) {
    throw Error(ErrorCode::SchemaError,
                std::string("missing column '") + (has_two ? "e2" : "q2") + "'");
  }
  const auto& y = table.columns.at("y");
  json reports = json::array();
  auto one = [&](const char* name, const char* q, const char* e) {
    auto r = to_json(run_backtest(y, table.columns.at(q), table.columns.at(e), alpha));
    r["forecast"] = name;
    reports.push_back(r);
    std::cout << name << ": violation ratio " << format_real(r["violation_ratio"].get<double>())
              << ", UC p=" << format_real(r["uc_pvalue"].get<double>())
              << ", CC p=" << format_real(r["cc_pvalue"].get<double>()) << '\n';
  };
  one("forecast1", "q1", "e1");
  if (has_two) one("forecast2", "q2", "e2");

  json doc;
  doc["meta"] = {{"version", kVersion}, {"config", config_json(c)}};
  doc["reports"] = reports;
  write_atomic(output, dump_json(doc), force);
  return ok;
}

int cmd_simulate(const RunConfig& c, bool force) {
  PanelDesign d;
  d.kind = token("design", c.str("design", "garch_normal"), design_kind_from_string);
  d.pi = c.real("pi", 0.0);
  if (!(d.pi >= 0.0 && d.pi <= 1.0)) throw Error(ErrorCode::ConfigError, "pi must lie in [0,1]");
  d.T = positive(c, "T", 1000);
  d.h = static_cast<int>(c.integer("h", 1));
  if (d.h < 1) throw Error(ErrorCode::ConfigError, "h must be >= 1");
  d.forecast_kind = token("kind", c.str("kind", "ahead"), forecast_kind_from_string);
  d.paths = static_cast<int>(c.integer("paths", 10000));
  d.burn = static_cast<std::size_t>(c.integer("burn", 1000));
  d.alpha = config_alpha(c);
  const fs::path output = required(c, "output");
  const std::uint64_t seed = resolve_seed(c);

  const auto panel = simulate_panel(d, seed);
  std::ostringstream out;
  out << "t,y,q1,e1,q2,e2\n";
  for (std::size_t t = 0; t < panel.size(); ++t) {
    out << t << ',' << format_real(panel.y()[t]) << ',' << format_real(panel.q1()[t]) << ','
        << format_real(panel.e1()[t]) << ',' << format_real(panel.q2()[t]) << ','
        << format_real(panel.e2()[t]) << '\n';
  }
  write_atomic(output, out.str(), force);
  std::cerr << "seed " << seed << '\n';
  return ok;
}

}  // namespace enc::cli
