#include "bsinfer/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "bsinfer/distribution.hpp"
#include "bsinfer/rng.hpp"

namespace bsinfer {

namespace {

struct Accumulator {
  std::vector<std::uint64_t> rejections;  // kind-major, level-minor
  std::uint64_t valid = 0;
  std::uint64_t excluded = 0;
  std::uint64_t clamped = 0;
  std::uint64_t unavailable = 0;

  explicit Accumulator(std::size_t cells) : rejections(cells, 0) {}

  void merge(const Accumulator& other) {
    for (std::size_t i = 0; i < rejections.size(); ++i) {
      rejections[i] += other.rejections[i];
    }
    valid += other.valid;
    excluded += other.excluded;
    clamped += other.clamped;
    unavailable += other.unavailable;
  }
};

struct StudyContext {
  const StudyConfig& config;
  BsParams truth;
  std::size_t m;
  std::vector<TestKind> kinds;
  std::vector<double> critical_values;  // one per nominal level

  std::size_t cell_count() const {
    return kinds.size() * critical_values.size();
  }
};

void run_replication(const StudyContext& ctx, std::uint64_t r,
                     Accumulator& acc) {
  RngStream stream = RngStream::for_replication(ctx.config.seed, r);
  const CensoredSample sample =
      sample_type2(ctx.truth, ctx.config.sample_size, ctx.m, stream);

  const std::size_t levels = ctx.critical_values.size();
  const auto count = [&](std::size_t kind_index, double statistic) {
    for (std::size_t l = 0; l < levels; ++l) {
      if (statistic > ctx.critical_values[l]) {
        ++acc.rejections[kind_index * levels + l];
      }
    }
  };

  try {
    // Compute everything first; only count once no fit can fail anymore.
    const FitResult full = fit_full(sample);
    std::optional<AlphaTestSet> alpha_set;
    std::optional<BetaTestSet> beta_set;
    if (ctx.config.null_alpha) {
      alpha_set = alpha_tests(sample, *ctx.config.null_alpha, full);
    }
    if (ctx.config.null_beta) {
      beta_set = beta_tests(sample, *ctx.config.null_beta, full);
    }

    ++acc.valid;
    std::size_t kind_index = 0;  // in lockstep with ctx.kinds
    if (alpha_set) {
      count(kind_index++, alpha_set->lr.statistic);
      count(kind_index++, alpha_set->gradient.statistic);
      if (alpha_set->adjusted) {
        count(kind_index, alpha_set->adjusted->statistic);
        if (alpha_set->adjusted_raw < 0.0) ++acc.clamped;
      } else {
        ++acc.unavailable;  // never rejects
      }
      ++kind_index;
    }
    if (beta_set) {
      count(kind_index++, beta_set->lr.statistic);
      count(kind_index++, beta_set->gradient.statistic);
    }
  } catch (const FitFailure&) {
    ++acc.excluded;
  }
}

RejectionTable run_study(const StudyConfig& config, std::size_t workers) {
  config.validate();

  StudyContext ctx{config,
                   BsParams(config.true_alpha, config.true_beta),
                   config.failures_per_sample(),
                   {},
                   {}};
  if (config.null_alpha) {
    ctx.kinds.insert(ctx.kinds.end(),
                     {TestKind::lr_alpha, TestKind::gradient_alpha,
                      TestKind::adjusted_gradient_alpha});
  }
  if (config.null_beta) {
    ctx.kinds.insert(ctx.kinds.end(),
                     {TestKind::lr_beta, TestKind::gradient_beta});
  }
  ctx.critical_values.reserve(config.nominal_levels.size());
  for (double level : config.nominal_levels) {
    ctx.critical_values.push_back(chi2_critical_value(level));
  }

  const std::uint64_t total = config.replications;
  std::size_t n_workers = workers != 0
                              ? workers
                              : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<std::size_t>(n_workers, total);

  Accumulator result(ctx.cell_count());
  if (n_workers <= 1) {
    for (std::uint64_t r = 0; r < total; ++r) {
      run_replication(ctx, r, result);
    }
  } else {
    std::vector<Accumulator> partials(n_workers, Accumulator(ctx.cell_count()));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      const std::uint64_t lo = total * w / n_workers;
      const std::uint64_t hi = total * (w + 1) / n_workers;
      pool.emplace_back([&ctx, &partials, w, lo, hi] {
        for (std::uint64_t r = lo; r < hi; ++r) {
          run_replication(ctx, r, partials[w]);
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& p : partials) result.merge(p);
  }

  RejectionTable table;
  table.config = config;
  table.valid = result.valid;
  table.excluded_nonconverged = result.excluded;
  table.adjusted_clamped = result.clamped;
  table.adjusted_unavailable = result.unavailable;
  const std::size_t levels = ctx.critical_values.size();
  for (std::size_t k = 0; k < ctx.kinds.size(); ++k) {
    for (std::size_t l = 0; l < levels; ++l) {
      const std::uint64_t rej = result.rejections[k * levels + l];
      const double rate =
          result.valid == 0
              ? 0.0
              : static_cast<double>(rej) / static_cast<double>(result.valid);
      table.cells.push_back(
          {ctx.kinds[k], config.nominal_levels[l], rej, rate});
    }
  }
  return table;
}

// Shortest decimal string that parses back to exactly x.
std::string compact(double x) {
  for (int precision = 1; precision <= 17; ++precision) {
    std::ostringstream out;
    out << std::setprecision(precision) << x;
    if (std::stod(out.str()) == x) return out.str();
  }
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

nlohmann::json config_to_json(const StudyConfig& c) {
  nlohmann::json j{
      {"n", c.sample_size},
      {"censoring_fraction", c.censoring_fraction},
      {"m", c.failures_per_sample()},
      {"true_alpha", c.true_alpha},
      {"true_beta", c.true_beta},
      {"nominal_levels", c.nominal_levels},
      {"replications", c.replications},
      {"seed", c.seed},
  };
  j["null_alpha"] = c.null_alpha ? nlohmann::json(*c.null_alpha)
                                 : nlohmann::json(nullptr);
  j["null_beta"] =
      c.null_beta ? nlohmann::json(*c.null_beta) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::size_t StudyConfig::failures_per_sample() const {
  return static_cast<std::size_t>(std::llround(
      static_cast<double>(sample_size) * (1.0 - censoring_fraction)));
}

void StudyConfig::validate() const {
  if (sample_size < 2) {
    throw std::invalid_argument("study: sample size must be at least 2");
  }
  if (!(censoring_fraction >= 0.0 && censoring_fraction < 1.0)) {
    throw std::invalid_argument(
        "study: censoring fraction must lie in [0, 1)");
  }
  if (!(std::isfinite(true_alpha) && true_alpha > 0.0) ||
      !(std::isfinite(true_beta) && true_beta > 0.0)) {
    throw std::invalid_argument("study: true parameters must be positive");
  }
  for (auto null : {null_alpha, null_beta}) {
    if (null && !(std::isfinite(*null) && *null > 0.0)) {
      throw std::invalid_argument("study: null values must be positive");
    }
  }
  if (nominal_levels.empty()) {
    throw std::invalid_argument("study: at least one nominal level required");
  }
  for (double level : nominal_levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw std::invalid_argument("study: nominal levels must lie in (0, 1)");
    }
  }
  if (replications < 1) {
    throw std::invalid_argument("study: at least one replication required");
  }
  const std::size_t m = failures_per_sample();
  if (m < 2) {
    throw std::invalid_argument(
        "study: censoring this heavy leaves fewer than two observed "
        "failures");
  }
  if (m > sample_size) {
    throw std::invalid_argument("study: inconsistent censoring fraction");
  }
}

double RejectionTable::rate(TestKind kind, double level) const {
  for (const TableCell& cell : cells) {
    if (cell.kind == kind && cell.level == level) return cell.rate;
  }
  throw std::out_of_range("rejection table has no such (statistic, level)");
}

std::string RejectionTable::to_csv() const {
  std::ostringstream out;
  const auto& c = config;
  out << "# n=" << c.sample_size << " doc=" << compact(c.censoring_fraction)
      << " m=" << c.failures_per_sample()
      << " true_alpha=" << compact(c.true_alpha)
      << " true_beta=" << compact(c.true_beta);
  out << " null_alpha=";
  if (c.null_alpha) out << compact(*c.null_alpha); else out << "none";
  out << " null_beta=";
  if (c.null_beta) out << compact(*c.null_beta); else out << "none";
  out << " replications=" << c.replications << " seed=" << c.seed << "\n";
  out << "# valid=" << valid
      << " excluded_nonconverged=" << excluded_nonconverged
      << " adjusted_clamped=" << adjusted_clamped
      << " adjusted_unavailable=" << adjusted_unavailable << "\n";
  out << "statistic,level,rejections,valid,rate\n";
  for (const TableCell& cell : cells) {
    out << test_kind_name(cell.kind) << ',' << compact(cell.level) << ','
        << cell.rejections << ',' << valid << ',' << compact(cell.rate)
        << "\n";
  }
  return out.str();
}

std::string RejectionTable::to_json() const {
  nlohmann::json j;
  j["config"] = config_to_json(config);
  j["counts"] = {
      {"requested", config.replications},
      {"valid", valid},
      {"excluded_nonconverged", excluded_nonconverged},
      {"adjusted_clamped", adjusted_clamped},
      {"adjusted_unavailable", adjusted_unavailable},
  };
  nlohmann::json results = nlohmann::json::array();
  for (const TableCell& cell : cells) {
    results.push_back({{"statistic", test_kind_name(cell.kind)},
                       {"level", cell.level},
                       {"rejections", cell.rejections},
                       {"rate", cell.rate}});
  }
  j["results"] = results;
  return j.dump(2) + "\n";
}

std::string RejectionTable::to_text() const {
  std::ostringstream out;
  const auto& c = config;
  out << "n=" << c.sample_size << "  m=" << c.failures_per_sample()
      << "  doc=" << std::fixed << std::setprecision(0)
      << 100.0 * c.censoring_fraction << "%"
      << "  truth=(" << std::setprecision(4) << c.true_alpha << ", "
      << c.true_beta << ")";
  if (c.null_alpha) out << "  null alpha=" << *c.null_alpha;
  if (c.null_beta) out << "  null beta=" << *c.null_beta;
  out << "  replications=" << c.replications << "  seed=" << c.seed << "\n";
  out << "valid=" << valid << "  excluded=" << excluded_nonconverged
      << "  adjusted clamped=" << adjusted_clamped
      << "  adjusted unavailable=" << adjusted_unavailable << "\n\n";
  out << std::left << std::setw(26) << "statistic";
  for (double level : c.nominal_levels) {
    std::ostringstream head;
    head << "rate@" << std::setprecision(4) << std::defaultfloat << level;
    out << std::right << std::setw(12) << head.str();
  }
  out << "\n";
  const std::size_t levels = c.nominal_levels.size();
  for (std::size_t i = 0; i < cells.size(); i += levels) {
    out << std::left << std::setw(26) << test_kind_name(cells[i].kind);
    for (std::size_t l = 0; l < levels; ++l) {
      out << std::right << std::setw(12) << std::fixed << std::setprecision(4)
          << cells[i + l].rate;
    }
    out << "\n";
  }
  return out.str();
}

RejectionTable run_size_study(const StudyConfig& config, std::size_t workers) {
  StudyConfig c = config;
  if (!c.null_alpha && !c.null_beta) {
    c.null_alpha = c.true_alpha;
    c.null_beta = c.true_beta;
  }
  return run_study(c, workers);
}

RejectionTable run_power_study(const StudyConfig& config,
                               std::size_t workers) {
  if (!config.null_alpha && !config.null_beta) {
    throw std::invalid_argument(
        "power study: supply at least one null value to test against");
  }
  return run_study(config, workers);
}

}  // namespace bsinfer
