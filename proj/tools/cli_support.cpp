#include "cli_support.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "encompass/covariance.hpp"
#include "encompass/links.hpp"

namespace enc::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidHorizon:
      return usage;
    case ErrorCode::LengthMismatch:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::SeriesTooShort:
    case ErrorCode::EmptyInput:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
      return data;
    default:
      return numerical;
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError,
                  path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (allowed_.count(key) == 0) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
  values_[key] = value;
}

std::optional<std::string> RunConfig::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double parse_real(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw Error(ErrorCode::ConfigError, what + ": '" + text + "' is not a number");
  }
  return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw Error(ErrorCode::ConfigError, what + ": '" + text + "' is not an integer");
  }
  return v;
}

double RunConfig::real(const std::string& key, double fallback) const {
  const auto v = find(key);
  return v ? parse_real(*v, key) : fallback;
}

long long RunConfig::integer(const std::string& key, long long fallback) const {
  const auto v = find(key);
  return v ? parse_integer(*v, key) : fallback;
}

std::vector<std::string> RunConfig::list(const std::string& key,
                                         const std::string& fallback) const {
  std::vector<std::string> out;
  std::stringstream ss(str(key, fallback));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, key + " must not be empty");
  return out;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::vector<std::string>& required,
                   const std::vector<std::string>& optional) {
  std::stringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_row(line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, "line 1: empty file, header expected");

  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < header.size(); ++j) index[header[j]] = j;
  if (index.count("t") == 0) throw Error(ErrorCode::SchemaError, "missing column 't'");
  for (const auto& name : required) {
    if (index.count(name) == 0) throw Error(ErrorCode::SchemaError, "missing column '" + name + "'");
  }
  std::vector<std::string> wanted = required;
  for (const auto& name : optional) {
    if (index.count(name) > 0) wanted.push_back(name);
  }

  CsvTable table;
  for (const auto& name : wanted) table.columns[name];
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(header.size()) + " fields, found " +
                                             std::to_string(cells.size()));
    }
    table.labels.push_back(cells[index["t"]]);
    for (const auto& name : wanted) {
      const std::size_t col = index[name];
      const std::string& cell = cells[col];
      double v = 0.0;
      const auto* end = cell.data() + cell.size();
      const auto res = std::from_chars(cell.data(), end, v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != end) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ", column " +
                                               std::to_string(col + 1) + " (" + name +
                                               "): cannot parse '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue, "line " + std::to_string(lineno) + ", column " +
                                                   std::to_string(col + 1) + ": non-finite value");
      }
      table.columns[name].push_back(v);
    }
  }
  if (table.labels.empty()) throw Error(ErrorCode::ParseError, "no data rows after the header");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), required, optional);
}

std::string format_real(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void dump_impl(const nlohmann::json& v, int indent, int depth, std::string& out) {
  const auto pad = [&](int d) {
    if (indent >= 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(d * indent), ' ');
    }
  };
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent >= 0 ? ": " : ":";
        dump_impl(it.value(), indent, depth + 1, out);
      }
      pad(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        pad(depth + 1);
        dump_impl(v[i], indent, depth + 1, out);
      }
      pad(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_real(v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& value, int indent) {
  std::string out;
  dump_impl(value, indent, 0, out);
  out += '\n';
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(path) && !force) {
    throw Error(ErrorCode::ConfigError,
                "refusing to overwrite " + path.string() + " (use --force)");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::ConfigError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::ConfigError, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

namespace {

nlohmann::json vec_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

nlohmann::json to_json(const TestReport& r) {
  nlohmann::json crit = nlohmann::json::array();
  for (const auto& [level, value] : r.crit) crit.push_back({{"level", level}, {"value", value}});
  return {
      {"link", to_string(r.link)},
      {"mode", to_string(r.mode)},
      {"direction", to_string(r.direction)},
      {"T", r.T},
      {"horizon", r.horizon},
      {"alpha", r.alpha},
      {"theta_hat", vec_json(r.theta_hat)},
      {"beta1_star", vec_json(r.beta1_star)},
      {"objective", r.objective},
      {"W", r.W},
      {"pvalue", r.pvalue},
      {"crit", crit},
      {"cov_variant", to_string(r.cov_variant)},
      {"c_T", r.c_T},
      {"m_T", r.m_T},
      {"n_draws", r.n_draws},
      {"seed", r.seed},
      {"cone_rows", r.cone_rows},
      {"cone_plugin_rows", r.cone_plugin_rows},
      {"point_mass_at_zero", r.point_mass_at_zero},
      {"bread_condition", r.bread_condition},
      {"fit_converged", r.fit_converged},
      {"fit_flat", r.fit_flat},
      {"warnings", r.warnings},
  };
}

nlohmann::json to_json(const PairClassification& c) {
  return {{"outcome", to_string(c.outcome)},
          {"p1", c.p1},
          {"p2", c.p2},
          {"level", c.level},
          {"note", c.note}};
}

nlohmann::json to_json(const BacktestReport& r) {
  return {{"T", r.T},
          {"alpha", r.alpha},
          {"violation_ratio", r.violation_ratio},
          {"es_ratio", r.es_ratio ? nlohmann::json(*r.es_ratio) : nlohmann::json(nullptr)},
          {"es_ratio_missing", !r.es_ratio.has_value()},
          {"n_violations", r.n_violations},
          {"uc_pvalue", r.uc_pvalue},
          {"cc_pvalue", r.cc_pvalue}};
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace enc::cli
