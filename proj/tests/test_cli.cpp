#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "bsinfer/hypothesis_tests.hpp"
#include "subprocess.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kCli = BSINFER_CLI_PATH;

const std::string kMiceFile =
    "# survival times in days, first seven failures of ten units\n"
    "41\n44\n46\n54\n55\n58\n60\n";

struct TempDir {
  fs::path dir;
  TempDir() : dir(subprocess::fresh_dir("cli")) {}
  ~TempDir() { std::error_code ec; fs::remove_all(dir, ec); }
  fs::path file(const std::string& name) const { return dir / name; }
};

}  // namespace

TEST_CASE("cli: fit reports the estimate and the bias-corrected shape") {
  TempDir tmp;
  subprocess::write_file(tmp.file("mice.txt"), kMiceFile);
  const auto r = subprocess::run(std::string(kCli) + " fit " +
                                 tmp.file("mice.txt").string() +
                                 " --total-units 10 --format json");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "fit");
  CHECK(j["input"]["total_units"] == 10);
  CHECK(j["fit"]["converged"] == true);
  const double alpha = j["fit"]["alpha"];
  CHECK(alpha > 0.0);
  CHECK(j["bias_corrected_alpha"].get<double>() ==
        doctest::Approx(alpha / 0.825).epsilon(1e-12));
}

TEST_CASE("cli: total units defaults to the number of lifetimes") {
  TempDir tmp;
  subprocess::write_file(tmp.file("mice.txt"), kMiceFile);
  const auto r = subprocess::run(std::string(kCli) + " fit " +
                                 tmp.file("mice.txt").string() +
                                 " --format json");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["input"]["total_units"] == 7);
}

TEST_CASE("cli: malformed data is rejected with the offending line") {
  TempDir tmp;
  subprocess::write_file(tmp.file("bad.txt"), "41\n44\n-3\n54\n");
  const auto r = subprocess::run(std::string(kCli) + " fit " +
                                 tmp.file("bad.txt").string());
  CHECK(r.exit_code != 0);
  CHECK(r.err.find(":3:") != std::string::npos);
  CHECK(r.out.empty());

  subprocess::write_file(tmp.file("junk.txt"), "41\nabc\n50\n");
  const auto r2 = subprocess::run(std::string(kCli) + " fit " +
                                  tmp.file("junk.txt").string());
  CHECK(r2.exit_code != 0);
  CHECK(r2.err.find(":2:") != std::string::npos);

  subprocess::write_file(tmp.file("short.txt"), "41\n");
  const auto r3 = subprocess::run(std::string(kCli) + " fit " +
                                  tmp.file("short.txt").string());
  CHECK(r3.exit_code != 0);

  const auto r4 = subprocess::run(std::string(kCli) + " fit " +
                                  tmp.file("mice.txt").string() +
                                  " --total-units 3");
  CHECK(r4.exit_code != 0);
}

TEST_CASE("cli: test statistics match the library") {
  TempDir tmp;
  subprocess::write_file(tmp.file("mice.txt"), kMiceFile);
  const auto r = subprocess::run(
      std::string(kCli) + " test " + tmp.file("mice.txt").string() +
      " --total-units 10 --null-alpha 0.1 --null-beta 54 --format json");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["tests"].size() == 5);

  const bsinfer::CensoredSample s({41, 44, 46, 54, 55, 58, 60}, 10);
  const auto at = bsinfer::alpha_tests(s, 0.1);
  const auto bt = bsinfer::beta_tests(s, 54.0);
  const auto expected = {at.lr.statistic, at.gradient.statistic,
                         at.adjusted->statistic, bt.lr.statistic,
                         bt.gradient.statistic};
  std::size_t i = 0;
  for (double want : expected) {
    CHECK(j["tests"][i]["value"].get<double>() ==
          doctest::Approx(want).epsilon(1e-12));
    CHECK(j["tests"][i]["available"] == true);
    ++i;
  }
}

TEST_CASE("cli: fit json re-read as data reproduces the test statistics") {
  TempDir tmp;
  subprocess::write_file(tmp.file("mice.txt"), kMiceFile);
  const auto fit = subprocess::run(std::string(kCli) + " fit " +
                                   tmp.file("mice.txt").string() +
                                   " --total-units 10 --format json");
  REQUIRE(fit.exit_code == 0);
  const json fit_json = json::parse(fit.out);

  // Rebuild a dataset from the JSON echo at full precision.
  std::string rebuilt;
  for (const auto& v : fit_json["input"]["observed"]) {
    rebuilt += json(v).dump() + "\n";
  }
  subprocess::write_file(tmp.file("rebuilt.txt"), rebuilt);
  const std::string args = " --total-units " +
                           std::to_string(fit_json["input"]["total_units"]
                                              .get<std::size_t>()) +
                           " --null-alpha 0.1 --null-beta 54 --format json";
  const auto direct = subprocess::run(std::string(kCli) + " test " +
                                      tmp.file("mice.txt").string() + args);
  const auto roundtrip = subprocess::run(std::string(kCli) + " test " +
                                         tmp.file("rebuilt.txt").string() +
                                         args);
  REQUIRE(direct.exit_code == 0);
  REQUIRE(roundtrip.exit_code == 0);
  const json a = json::parse(direct.out);
  const json b = json::parse(roundtrip.out);
  CHECK(a["tests"] == b["tests"]);
  CHECK(a["fit"] == b["fit"]);
}

TEST_CASE("cli: test without any null value fails") {
  TempDir tmp;
  subprocess::write_file(tmp.file("mice.txt"), kMiceFile);
  const auto r = subprocess::run(std::string(kCli) + " test " +
                                 tmp.file("mice.txt").string());
  CHECK(r.exit_code != 0);
}

TEST_CASE("cli: truncated mice data still tests cleanly") {
  TempDir tmp;
  subprocess::write_file(tmp.file("mice6.txt"), "41\n44\n46\n54\n55\n58\n");
  const auto r = subprocess::run(
      std::string(kCli) + " test " + tmp.file("mice6.txt").string() +
      " --total-units 10 --null-alpha 0.1 --null-beta 54 --format json");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  for (const auto& t : j["tests"]) {
    if (t["available"] == true) {
      CHECK(std::isfinite(t["value"].get<double>()));
      CHECK(t["p_value"].get<double>() >= 0.0);
      CHECK(t["p_value"].get<double>() <= 1.0);
    }
  }
}

TEST_CASE("cli: simulation validation and determinism") {
  TempDir tmp;
  const auto bad = subprocess::run(std::string(kCli) +
                                   " simulate-size --n 20 --doc 0.95 "
                                   "--alpha 0.5 --replications 5");
  CHECK(bad.exit_code != 0);

  const std::string base = std::string(kCli) +
                           " simulate-size --n 20 --doc 0.2 --alpha 0.5 "
                           "--replications 40 --seed 7 --format csv --out ";
  const auto one = tmp.file("one.csv");
  const auto two = tmp.file("two.csv");
  REQUIRE(subprocess::run(base + one.string()).exit_code == 0);
  REQUIRE(subprocess::run(base + two.string()).exit_code == 0);
  CHECK(subprocess::slurp(one) == subprocess::slurp(two));
  CHECK(!subprocess::slurp(one).empty());

  // Worker count must not change the bytes.
  const auto serial = tmp.file("serial.csv");
  const auto wide = tmp.file("wide.csv");
  REQUIRE(subprocess::run("BSINFER_THREADS=1 " + base + serial.string())
              .exit_code == 0);
  REQUIRE(subprocess::run("BSINFER_THREADS=8 " + base + wide.string())
              .exit_code == 0);
  CHECK(subprocess::slurp(serial) == subprocess::slurp(wide));
  CHECK(subprocess::slurp(serial) == subprocess::slurp(one));
}

TEST_CASE("cli: power simulation emits json with config echo") {
  const auto r = subprocess::run(std::string(kCli) +
                                 " simulate-power --n 20 --doc 0 --alpha 0.6 "
                                 "--null-alpha 0.5 --levels 0.10 "
                                 "--replications 30 --seed 3 --format json");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["config"]["n"] == 20);
  CHECK(j["config"]["seed"] == 3);
  CHECK(j["config"]["null_alpha"].get<double>() == 0.5);
  CHECK(j["counts"]["requested"] == 30);
  CHECK(j["results"].size() == 3);  // three alpha statistics at one level
}
