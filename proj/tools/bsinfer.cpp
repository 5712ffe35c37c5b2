// Command-line front end: fit and test censored lifetime data, run Monte
// Carlo size/power studies, emit text, CSV or JSON reports.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsinfer/estimation.hpp"
#include "bsinfer/hypothesis_tests.hpp"
#include "bsinfer/likelihood.hpp"
#include "bsinfer/simulation.hpp"

namespace {

using nlohmann::json;

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  std::string path;
  std::vector<double> values;
  std::size_t total_units;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// One lifetime per line; '#' starts a comment; blank lines are skipped.
Dataset load_dataset(const std::string& path,
                     std::optional<std::size_t> total_units) {
  std::ifstream in(path);
  if (!in) {
    throw CliError("cannot open data file '" + path + "'");
  }
  Dataset data{path, {}, 0};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string token = trim(line);
    if (token.empty()) continue;
    std::istringstream parse(token);
    double value = 0.0;
    std::string rest;
    if (!(parse >> value) || (parse >> rest)) {
      throw CliError(path + ":" + std::to_string(lineno) +
                     ": expected one lifetime per line, got '" + token + "'");
    }
    if (!std::isfinite(value) || value <= 0.0) {
      throw CliError(path + ":" + std::to_string(lineno) +
                     ": lifetimes must be positive, got '" + token + "'");
    }
    data.values.push_back(value);
  }
  if (data.values.size() < 2) {
    throw CliError(path + ": need at least two lifetimes, found " +
                   std::to_string(data.values.size()));
  }
  data.total_units = total_units.value_or(data.values.size());
  if (data.total_units < data.values.size()) {
    throw CliError(path + ": --total-units (" +
                   std::to_string(data.total_units) +
                   ") is smaller than the number of observed lifetimes (" +
                   std::to_string(data.values.size()) + ")");
  }
  return data;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw CliError("cannot write output file '" + out_path + "'");
  }
  out << text;
}

json fit_to_json(const bsinfer::FitResult& fit) {
  return json{{"alpha", fit.params.alpha()},
              {"beta", fit.params.beta()},
              {"loglik", fit.loglik_value},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"grad_norm", fit.grad_norm}};
}

json input_to_json(const Dataset& data, const bsinfer::CensoredSample& s) {
  return json{{"path", data.path},
              {"observed", std::vector<double>(s.observed().begin(),
                                               s.observed().end())},
              {"total_units", data.total_units}};
}

json outcome_to_json(const bsinfer::TestOutcome& t) {
  return json{{"statistic", bsinfer::test_kind_name(t.kind)},
              {"null_value", t.null_value},
              {"value", t.statistic},
              {"p_value", t.p_value},
              {"df", t.df},
              {"available", true}};
}

std::size_t workers_from_env() {
  const char* env = std::getenv("BSINFER_THREADS");
  if (env == nullptr || *env == '\0') return 0;  // auto
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || value < 1) {
    throw CliError("BSINFER_THREADS must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

int run_fit(const Dataset& data, const std::string& format,
            const std::string& out_path) {
  const bsinfer::CensoredSample sample(data.values, data.total_units);
  const bsinfer::FitResult fit = bsinfer::fit_full(sample);

  std::optional<double> corrected;
  std::string correction_note;
  try {
    corrected = bsinfer::bias_corrected_alpha(
        fit.params.alpha(), sample.total_units(), sample.failures());
  } catch (const std::domain_error& e) {
    correction_note = e.what();
  }

  if (format == "json") {
    json j{{"command", "fit"},
           {"input", input_to_json(data, sample)},
           {"fit", fit_to_json(fit)}};
    j["bias_corrected_alpha"] = corrected ? json(*corrected) : json(nullptr);
    if (!correction_note.empty()) j["bias_correction_note"] = correction_note;
    emit(j.dump(2) + "\n", out_path);
  } else {
    std::ostringstream text;
    text << std::fixed << std::setprecision(4);
    text << "data: " << data.path << "  (m=" << sample.failures()
         << " observed of n=" << sample.total_units() << " units)\n";
    text << "alpha               " << fit.params.alpha() << "\n";
    text << "beta                " << fit.params.beta() << "\n";
    if (corrected) {
      text << "alpha (bias-adj.)   " << *corrected << "\n";
    } else {
      text << "alpha (bias-adj.)   unavailable: " << correction_note << "\n";
    }
    text << "log-likelihood      " << fit.loglik_value << "\n";
    text << std::defaultfloat << std::setprecision(3);
    text << (fit.converged ? "converged" : "NOT CONVERGED") << " after "
         << fit.iterations << " iterations, grad norm " << fit.grad_norm
         << "\n";
    emit(text.str(), out_path);
  }
  if (!fit.converged) {
    std::cerr << "error: fit did not converge\n";
    return 3;
  }
  return 0;
}

int run_test(const Dataset& data, std::optional<double> null_alpha,
             std::optional<double> null_beta, const std::string& format,
             const std::string& out_path) {
  if (!null_alpha && !null_beta) {
    throw CliError("supply --null-alpha and/or --null-beta");
  }
  const bsinfer::CensoredSample sample(data.values, data.total_units);
  const bsinfer::FitResult fit = bsinfer::fit_full(sample);

  std::optional<bsinfer::AlphaTestSet> alpha_set;
  std::optional<bsinfer::BetaTestSet> beta_set;
  try {
    if (null_alpha) alpha_set = bsinfer::alpha_tests(sample, *null_alpha, fit);
    if (null_beta) beta_set = bsinfer::beta_tests(sample, *null_beta, fit);
  } catch (const bsinfer::FitFailure& e) {
    throw CliError(std::string("cannot compute test statistics: ") + e.what());
  }

  std::vector<bsinfer::TestOutcome> outcomes;
  bool adjusted_unavailable = false;
  if (alpha_set) {
    outcomes.push_back(alpha_set->lr);
    outcomes.push_back(alpha_set->gradient);
    if (alpha_set->adjusted) {
      outcomes.push_back(*alpha_set->adjusted);
    } else {
      adjusted_unavailable = true;
    }
  }
  if (beta_set) {
    outcomes.push_back(beta_set->lr);
    outcomes.push_back(beta_set->gradient);
  }

  if (format == "json") {
    json tests = json::array();
    for (const auto& outcome : outcomes) tests.push_back(outcome_to_json(outcome));
    if (adjusted_unavailable) {
      tests.push_back(json{{"statistic", "adjusted_gradient_alpha"},
                           {"null_value", *null_alpha},
                           {"available", false},
                           {"note", "bias correction undefined for this n, m"}});
    }
    json j{{"command", "test"},
           {"input", input_to_json(data, sample)},
           {"fit", fit_to_json(fit)},
           {"tests", tests}};
    emit(j.dump(2) + "\n", out_path);
  } else {
    std::ostringstream text;
    text << std::fixed << std::setprecision(4);
    text << "data: " << data.path << "  (m=" << sample.failures()
         << " observed of n=" << sample.total_units() << " units)\n";
    text << "fit: alpha=" << fit.params.alpha() << "  beta="
         << fit.params.beta() << "  loglik=" << fit.loglik_value << "\n\n";
    text << std::left << std::setw(26) << "statistic" << std::right
         << std::setw(10) << "null" << std::setw(12) << "value"
         << std::setw(12) << "p-value" << "\n";
    for (const auto& outcome : outcomes) {
      text << std::left << std::setw(26) << bsinfer::test_kind_name(outcome.kind)
           << std::right << std::setw(10) << outcome.null_value
           << std::setw(12) << outcome.statistic << std::setw(12)
           << outcome.p_value << "\n";
    }
    if (adjusted_unavailable) {
      text << std::left << std::setw(26) << "adjusted_gradient_alpha"
           << "  unavailable (bias correction undefined for this n, m)\n";
    }
    emit(text.str(), out_path);
  }
  return 0;
}

int run_simulate(bool power, const bsinfer::StudyConfig& config,
                 const std::string& format, const std::string& out_path) {
  const std::size_t workers = workers_from_env();
  const bsinfer::RejectionTable table =
      power ? bsinfer::run_power_study(config, workers)
            : bsinfer::run_size_study(config, workers);
  if (format == "csv") {
    emit(table.to_csv(), out_path);
  } else if (format == "json") {
    emit(table.to_json(), out_path);
  } else {
    emit(table.to_text(), out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Maximum-likelihood fitting and hypothesis tests for the "
      "Birnbaum-Saunders lifetime distribution under type-II right "
      "censoring"};
  app.require_subcommand(1);

  // fit ----------------------------------------------------------------
  std::string fit_file, fit_format = "text", fit_out;
  std::optional<std::size_t> fit_units;
  auto* fit_cmd = app.add_subcommand(
      "fit", "Fit (alpha, beta) to a censored dataset by maximum likelihood");
  fit_cmd->add_option("file", fit_file, "dataset, one lifetime per line")
      ->required();
  fit_cmd->add_option("--total-units", fit_units,
                      "units on test n (default: number of lifetimes)");
  fit_cmd->add_option("--format", fit_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  fit_cmd->add_option("--out", fit_out, "write the report here (default: stdout)");

  // test ---------------------------------------------------------------
  std::string test_file, test_format = "text", test_out;
  std::optional<std::size_t> test_units;
  std::optional<double> test_null_alpha, test_null_beta;
  auto* test_cmd = app.add_subcommand(
      "test",
      "Likelihood-ratio, gradient and adjusted gradient tests on a dataset");
  test_cmd->add_option("file", test_file, "dataset, one lifetime per line")
      ->required();
  test_cmd->add_option("--total-units", test_units,
                       "units on test n (default: number of lifetimes)");
  test_cmd->add_option("--null-alpha", test_null_alpha,
                       "null value for the shape parameter");
  test_cmd->add_option("--null-beta", test_null_beta,
                       "null value for the scale parameter");
  test_cmd->add_option("--format", test_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  test_cmd->add_option("--out", test_out, "write the report here");

  // simulate-size / simulate-power --------------------------------------
  bsinfer::StudyConfig config;
  config.true_beta = 1.0;
  std::string sim_format = "text", sim_out;
  std::optional<double> sim_null_alpha, sim_null_beta;

  const auto add_sim_options = [&](CLI::App* cmd, bool power) {
    cmd->add_option("--n", config.sample_size, "units on test per replication")
        ->required();
    cmd->add_option("--doc", config.censoring_fraction,
                    "degree of censoring in [0,1)");
    cmd->add_option("--alpha", config.true_alpha, "true shape")->required();
    cmd->add_option("--beta", config.true_beta, "true scale (default 1)");
    cmd->add_option("--null-alpha", sim_null_alpha,
                    power ? "shape null to test against"
                          : "shape null (default: the true shape)");
    cmd->add_option("--null-beta", sim_null_beta,
                    power ? "scale null to test against"
                          : "scale null (default: the true scale)");
    cmd->add_option("--levels", config.nominal_levels,
                    "nominal levels (default 0.10,0.05)")
        ->delimiter(',');
    cmd->add_option("--replications", config.replications,
                    "Monte Carlo replications (default 10000)");
    cmd->add_option("--seed", config.seed, "random seed (default 0)");
    cmd->add_option("--format", sim_format, "text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    cmd->add_option("--out", sim_out, "write the table here");
  };
  auto* size_cmd = app.add_subcommand(
      "simulate-size", "Null rejection rates under the true parameters");
  add_sim_options(size_cmd, false);
  auto* power_cmd = app.add_subcommand(
      "simulate-power",
      "Rejection rates when the tested null differs from the truth");
  add_sim_options(power_cmd, true);

  try {
    app.parse(argc, argv);
    if (fit_cmd->parsed()) {
      return run_fit(load_dataset(fit_file, fit_units), fit_format, fit_out);
    }
    if (test_cmd->parsed()) {
      return run_test(load_dataset(test_file, test_units), test_null_alpha,
                      test_null_beta, test_format, test_out);
    }
    config.null_alpha = sim_null_alpha;
    config.null_beta = sim_null_beta;
    return run_simulate(power_cmd->parsed(), config, sim_format, sim_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
