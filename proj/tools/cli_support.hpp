#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "encompass/backtest.hpp"
#include "encompass/enctest.hpp"
#include "encompass/error.hpp"
#include "encompass/types.hpp"

namespace enc::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, usage = 2, data = 3, numerical = 4 };

int exit_code_for(ErrorCode code);

/// Flat key=value configuration. Later sources override earlier ones.
class RunConfig {
 public:
  explicit RunConfig(std::set<std::string> allowed) : allowed_(std::move(allowed)) {}

  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string str(const std::string& key, const std::string& fallback) const;
  std::optional<std::string> find(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  std::vector<std::string> list(const std::string& key, const std::string& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::set<std::string>& allowed() const { return allowed_; }

 private:
  std::set<std::string> allowed_;
  std::map<std::string, std::string> values_;
};

double parse_real(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);

struct CsvTable {
  std::vector<std::string> labels;  // column t
  std::map<std::string, std::vector<double>> columns;
};

/// Reads a headed CSV. `required` columns must exist; `optional` columns are
/// read when present. Column t is kept as an opaque label.
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {});
CsvTable parse_csv(const std::string& text, const std::vector<std::string>& required,
                   const std::vector<std::string>& optional = {});

/// JSON text with every floating-point number printed with 17 significant digits.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// Writes via a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& contents, bool force);

std::string format_real(double v);

nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const PairClassification& c);
nlohmann::json to_json(const BacktestReport& report);

std::uint64_t fresh_seed();

}  // namespace enc::cli
