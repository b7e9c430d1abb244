#include "encompass/mcstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "encompass/error.hpp"
#include "encompass/rng.hpp"

namespace enc {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> default_pi_grid() {
  std::vector<double> grid(11);
  for (int i = 0; i <= 10; ++i) grid[static_cast<std::size_t>(i)] = i / 10.0;
  return grid;
}

void ExperimentDesign::validate() const {
  if (pi_grid.empty() || T_grid.empty() || links.empty() || modes.empty() || directions.empty()) {
    throw Error(ErrorCode::InvalidArgument, "experiment grids must be nonempty");
  }
  for (double pi : pi_grid) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw Error(ErrorCode::InvalidArgument, "pi must lie in [0,1]");
  }
  for (auto T : T_grid) {
    if (T < 50) throw Error(ErrorCode::SeriesTooShort, "T below 50 in T_grid");
  }
  if (n_reps < 1) throw Error(ErrorCode::InvalidArgument, "n_reps must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level not in (0,1)");
  if (dgp.h < 1) throw Error(ErrorCode::InvalidHorizon, "h must be >= 1");
  ProbabilityLevel{dgp.alpha};
  fit.validate();
}

std::vector<std::string> ExperimentDesign::warnings() const {
  std::vector<std::string> out;
  for (auto T : T_grid) {
    if (T < 250) {
      out.push_back("T=" + std::to_string(T) + " is below 250; size-adjusted power is nearly flat");
    }
    if (dgp.h >= 5 && T < 1000) {
      out.push_back("h=" + std::to_string(dgp.h) + " with T=" + std::to_string(T) +
                    " gives unreliable test decisions");
    }
  }
  return out;
}

std::vector<double> Cell::valid_pvalues() const {
  std::vector<double> out;
  out.reserve(n_ok);
  for (double p : pvalues) {
    if (!std::isnan(p)) out.push_back(p);
  }
  return out;
}

const Cell* RejectionTable::find(std::size_t T, LinkKind link, TestMode mode, Direction direction,
                                 std::size_t pi_index) const {
  for (const auto& c : cells) {
    if (c.key.T == T && c.key.link == link && c.key.mode == mode && c.key.direction == direction &&
        c.key.pi_index == pi_index) {
      return &c;
    }
  }
  return nullptr;
}

const Cell* RejectionTable::null_cell(std::size_t T, LinkKind link, TestMode mode,
                                      Direction direction) const {
  const double target = direction == Direction::one_encompasses_two ? 0.0 : 1.0;
  for (std::size_t i = 0; i < design.pi_grid.size(); ++i) {
    if (design.pi_grid[i] == target) return find(T, link, mode, direction, i);
  }
  return nullptr;
}

namespace {

constexpr std::size_t kMaxMessages = 5;

struct TestSlot {
  LinkKind link;
  TestMode mode;
  Direction direction;
};

}  // namespace

RejectionTable size_power_experiment(const ExperimentDesign& design) {
  design.validate();
  std::vector<TestSlot> slots;
  for (auto link : design.links) {
    for (auto mode : design.modes) {
      for (auto dir : design.directions) slots.push_back({link, mode, dir});
    }
  }
  const std::size_t n_T = design.T_grid.size(), n_pi = design.pi_grid.size();
  const std::size_t n_slots = slots.size(), n_reps = design.n_reps;

  RejectionTable table;
  table.design = design;
  table.cells.reserve(n_T * n_pi * n_slots);
  for (std::size_t ti = 0; ti < n_T; ++ti) {
    for (std::size_t pi_idx = 0; pi_idx < n_pi; ++pi_idx) {
      for (const auto& s : slots) {
        Cell c;
        c.key = {design.T_grid[ti], s.link, s.mode, s.direction, pi_idx, design.pi_grid[pi_idx]};
        c.pvalues.assign(n_reps, std::numeric_limits<double>::quiet_NaN());
        table.cells.push_back(std::move(c));
      }
    }
  }

  std::vector<std::string> messages(table.cells.size() * n_reps);
  const std::size_t n_jobs = n_T * n_pi * n_reps;
  parallel_for(n_jobs, design.threads, [&](std::size_t job) {
    const std::size_t rep = job % n_reps;
    const std::size_t pi_idx = (job / n_reps) % n_pi;
    const std::size_t ti = job / (n_reps * n_pi);
    const std::size_t T = design.T_grid[ti];
    const std::size_t base = (ti * n_pi + pi_idx) * n_slots;
    const std::uint64_t seed = derive_seed(design.master_seed, {T, pi_idx, rep});

    std::optional<ForecastPanel> panel;
    std::string panel_error;
    try {
      PanelDesign pd = design.dgp;
      pd.T = T;
      pd.pi = design.pi_grid[pi_idx];
      panel.emplace(simulate_panel(pd, seed));
    } catch (const std::exception& ex) {
      panel_error = std::string("simulation: ") + ex.what();
    }
    for (std::size_t si = 0; si < n_slots; ++si) {
      auto& cell = table.cells[base + si];
      auto& msg = messages[(base + si) * n_reps + rep];
      if (!panel) {
        msg = panel_error;
        continue;
      }
      TestOptions opt;
      opt.alpha = design.dgp.alpha;
      opt.cov_variant = design.cov_variant;
      opt.fit = design.fit;
      opt.fit.seed = derive_seed(seed, {0xF17u, si});
      opt.n_draws = design.n_draws;
      opt.seed = derive_seed(seed, {0x5EEDu, si});
      opt.levels = {design.level};
      try {
        const auto& s = slots[si];
        cell.pvalues[rep] = run_encompassing_test(*panel, s.link, s.mode, s.direction, opt).pvalue;
      } catch (const std::exception& ex) {
        msg = ex.what();
      }
    }
  });

  for (std::size_t ci = 0; ci < table.cells.size(); ++ci) {
    auto& c = table.cells[ci];
    std::size_t rejected = 0;
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
      const double p = c.pvalues[rep];
      if (std::isnan(p)) {
        ++c.failures;
        if (c.failure_messages.size() < kMaxMessages) {
          c.failure_messages.push_back("rep " + std::to_string(rep) + ": " +
                                       messages[ci * n_reps + rep]);
        }
        continue;
      }
      ++c.n_ok;
      if (p < design.level) ++rejected;
    }
    if (c.n_ok > 0) {
      c.rejection = static_cast<double>(rejected) / static_cast<double>(c.n_ok);
      c.stderr_ = std::sqrt(c.rejection * (1.0 - c.rejection) / static_cast<double>(c.n_ok));
    } else {
      c.rejection = std::numeric_limits<double>::quiet_NaN();
      c.stderr_ = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return table;
}

AdjustedPower size_adjusted_power(const std::vector<double>& null_pvals,
                                  const std::vector<double>& alt_pvals, double level) {
  if (null_pvals.empty() || alt_pvals.empty()) {
    throw Error(ErrorCode::EmptyInput, "size adjustment needs null and alternative p-values");
  }
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level not in (0,1)");
  std::vector<double> sorted = null_pvals;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto k = static_cast<std::size_t>(std::floor(level * static_cast<double>(n)));
  AdjustedPower out;
  out.critical_pvalue = k < n ? sorted[k] : 1.0 + std::numeric_limits<double>::epsilon();
  // null rejection rate at the cut; ties straddling it leave the rate below level
  const auto below = static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), out.critical_pvalue) - sorted.begin());
  out.exact = below == k;
  std::size_t hits = 0;
  for (double p : alt_pvals) {
    if (p < out.critical_pvalue) ++hits;
  }
  out.power = static_cast<double>(hits) / static_cast<double>(alt_pvals.size());
  return out;
}

namespace {

void write_key(std::ostream& out, const RejectionTable& table, const CellKey& k) {
  const auto& d = table.design.dgp;
  out << to_string(d.kind) << ',' << k.T << ',' << d.h << ',' << to_string(d.forecast_kind) << ','
      << to_string(k.link) << ',' << to_string(k.mode) << ',' << to_string(k.direction) << ',';
}

constexpr const char* kKeyHeader = "design,T,h,kind,link,mode,direction,";

void write_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "NA";
  } else {
    out << v;
  }
}

}  // namespace

void write_size_csv(std::ostream& out, const RejectionTable& table) {
  const auto saved = out.precision(17);
  out << kKeyHeader << "pi,size,stderr,n_ok,failures\n";
  for (const auto& c : table.cells) {
    const bool null_one = c.key.direction == Direction::one_encompasses_two && c.key.pi == 0.0;
    const bool null_two = c.key.direction == Direction::two_encompasses_one && c.key.pi == 1.0;
    if (!null_one && !null_two) continue;
    write_key(out, table, c.key);
    out << c.key.pi << ',';
    write_number(out, c.rejection);
    out << ',';
    write_number(out, c.stderr_);
    out << ',' << c.n_ok << ',' << c.failures << '\n';
  }
  out.precision(saved);
}

void write_power_csv(std::ostream& out, const RejectionTable& table) {
  const auto saved = out.precision(17);
  out << kKeyHeader << "pi,rejection,stderr\n";
  for (const auto& c : table.cells) {
    write_key(out, table, c.key);
    out << c.key.pi << ',';
    write_number(out, c.rejection);
    out << ',';
    write_number(out, c.stderr_);
    out << '\n';
  }
  out.precision(saved);
}

void write_adjusted_power_csv(std::ostream& out, const RejectionTable& table) {
  const auto saved = out.precision(17);
  out << kKeyHeader << "pi,adjusted_power,critical_pvalue,exact\n";
  for (const auto& c : table.cells) {
    const Cell* null = table.null_cell(c.key.T, c.key.link, c.key.mode, c.key.direction);
    if (null == nullptr) continue;
    const auto np = null->valid_pvalues(), ap = c.valid_pvalues();
    if (np.empty() || ap.empty()) continue;
    const auto adj = size_adjusted_power(np, ap, table.design.level);
    write_key(out, table, c.key);
    out << c.key.pi << ',' << adj.power << ',' << adj.critical_pvalue << ','
        << (adj.exact ? "true" : "false") << '\n';
  }
  out.precision(saved);
}

}  // namespace enc
