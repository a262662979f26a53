#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "qts/cli.hpp"
#include "test_util.hpp"

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = qts::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// A CSV fixture written to the temp directory and removed on scope exit.
class TempCsv {
 public:
  TempCsv(const std::string& name, const std::string& body)
      : path_(std::filesystem::temp_directory_path() / name) {
    std::ofstream f(path_);
    f << body;
  }
  ~TempCsv() { std::filesystem::remove(path_); }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

std::string scrub_timing(const std::string& report) {
  static const std::regex timing("\"wall_clock_ms\":[^,}]*");
  return std::regex_replace(report, timing, "\"wall_clock_ms\":0");
}

const std::string kRamp = "time,value\n0,1\n1,2\n2,3\n3,4\n";

}  // namespace

TEST_CASE("diff report structure and frozen values") {
  TempCsv csv("qts_cli_ramp.csv", kRamp);
  const auto res = run_cli({"diff", "--input", csv.str(), "--time-col", "time",
                            "--d", "1", "--seed", "7"});
  REQUIRE(res.code == 0);

  const auto report = nlohmann::json::parse(res.out);
  CHECK(report["command"] == "diff");
  CHECK(report["version"] == "0.1.0");
  CHECK(report["seed"] == 7);
  CHECK(report["input"]["n"] == 4);
  CHECK(report["input"]["d"] == 1);
  CHECK(report["input"]["pad_len"] == 0);

  const auto& stage = report["stages"][0];
  CHECK(stage["name"] == "difference");
  CHECK(stage["order"] == "first");
  CHECK(stage["postselect_prob"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));

  const double inv = 1.0 / std::sqrt(12.0);
  const std::vector<double> expect = {-3 * inv, inv, inv, inv};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(stage["difference_part"][i]["re"].get<double>() ==
          doctest::Approx(expect[i]).epsilon(1e-12));
    CHECK(stage["difference_part"][i]["im"].get<double>() == 0.0);
  }

  // The emitted document parses back to an equal structure.
  CHECK(nlohmann::json::parse(report.dump()) == report);
}

TEST_CASE("amplitudes serialize with full double precision") {
  TempCsv csv("qts_cli_half.csv", "v\n1\n1\n");
  const auto res = run_cli({"encode", "--input", csv.str()});
  REQUIRE(res.code == 0);
  CHECK(res.out.find("0.7071067811865476") != std::string::npos);
}

TEST_CASE("haar stage compresses the encoded state, not the transform") {
  TempCsv csv("qts_cli_haar.csv", kRamp);
  const auto res = run_cli({"haar", "--input", csv.str(), "--time-col", "time",
                            "--keep", "2"});
  REQUIRE(res.code == 0);

  const auto stage = nlohmann::json::parse(res.out)["stages"][0];
  const double inv30 = 1.0 / std::sqrt(30.0);
  CHECK(stage["transform"][0]["re"].get<double>() ==
        doctest::Approx(5 * inv30).epsilon(1e-12));

  // Kept entries are the largest Haar coefficients of the series itself.
  REQUIRE(stage["kept"].size() == 2);
  CHECK(stage["kept"][0]["index"] == 0);
  CHECK(stage["kept"][0]["re"].get<double>() ==
        doctest::Approx(5 * inv30).epsilon(1e-12));
  CHECK(stage["kept"][1]["index"] == 1);
  CHECK(stage["kept"][1]["re"].get<double>() ==
        doctest::Approx(-2 * inv30).epsilon(1e-12));
  CHECK(stage["dropped_energy"].get<double>() ==
        doctest::Approx(1.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("identical invocations produce identical reports") {
  TempCsv csv("qts_cli_det.csv", kRamp);
  const std::vector<std::string> args = {"fit",  "--input", csv.str(),
                                         "--time-col", "time", "--p", "0",
                                         "--q", "1",  "--seed",  "21"};
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  REQUIRE(first.code == 0);
  CHECK(scrub_timing(first.out) == scrub_timing(second.out));
  CHECK(scrub_timing(first.out) != first.out);  // the timing field is present
}

TEST_CASE("usage failures exit 2 and name the flag") {
  TempCsv csv("qts_cli_usage.csv", kRamp);

  auto res = run_cli({"smooth", "--input", csv.str(), "--alpha", "1.5"});
  CHECK(res.code == 2);
  CHECK(res.err.find("--alpha") != std::string::npos);

  res = run_cli({"bin", "--input", csv.str(), "--time-col", "time", "--k", "3"});
  CHECK(res.code == 2);
  CHECK(res.err.find("--k") != std::string::npos);

  res = run_cli({"diff", "--input", csv.str(), "--time-col", "time", "--d", "1",
                 "--s", "2"});
  CHECK(res.code == 2);

  res = run_cli({"qft-dist", "--input", csv.str(), "--time-col", "time"});
  CHECK(res.code == 2);
  CHECK(res.err.find("--value-cols") != std::string::npos);

  res = run_cli({"fit", "--input", csv.str(), "--time-col", "time", "--p", "9"});
  CHECK(res.code == 2);

  res = run_cli({"diff", "--no-such-flag"});
  CHECK(res.code == 2);

  res = run_cli({});
  CHECK(res.code == 2);
}

TEST_CASE("data failures exit 3 with row-numbered diagnostics") {
  auto res = run_cli({"diff", "--input", "/definitely/not/here.csv"});
  CHECK(res.code == 3);

  TempCsv bad("qts_cli_bad.csv", "t,v\n0,1\n1,abc\n");
  res = run_cli({"diff", "--input", bad.str(), "--time-col", "t"});
  CHECK(res.code == 3);
  CHECK(res.err.find("row 3") != std::string::npos);
  CHECK(res.err.find("'v'") != std::string::npos);

  TempCsv ragged("qts_cli_ragged.csv", "t,v\n0,1\n1\n");
  res = run_cli({"diff", "--input", ragged.str(), "--time-col", "t"});
  CHECK(res.code == 3);
  CHECK(res.err.find("row 3") != std::string::npos);

  TempCsv unsorted("qts_cli_unsorted.csv", "t,v\n1,1\n0,2\n");
  res = run_cli({"diff", "--input", unsorted.str(), "--time-col", "t"});
  CHECK(res.code == 3);

  TempCsv plain("qts_cli_plain.csv", "t,v\n0,1\n1,2\n");
  res = run_cli({"diff", "--input", plain.str(), "--time-col", "t",
                 "--value-cols", "nope"});
  CHECK(res.code == 3);
  CHECK(res.err.find("nope") != std::string::npos);
}

TEST_CASE("execution failures exit 4 with stage name and hint") {
  TempCsv constant("qts_cli_const.csv", "t,v\n0,5\n1,5\n2,5\n3,5\n");
  const auto res = run_cli({"diff", "--input", constant.str(), "--time-col", "t"});
  CHECK(res.code == 4);
  CHECK(res.err.find("stage 'diff'") != std::string::npos);
  CHECK(res.err.find("vary the input") != std::string::npos);
}

TEST_CASE("fit recovers the autoregressive coefficient") {
  const auto y = testutil::ar1_series(0.7, 0.0, 0.1, 0.5, 200, 99);
  std::ostringstream body;
  body << "t,y\n";
  for (std::size_t i = 0; i < y.size(); ++i) body << i << "," << y[i] << "\n";
  TempCsv csv("qts_cli_ar1.csv", body.str());

  const auto res = run_cli({"fit", "--input", csv.str(), "--time-col", "t",
                            "--p", "1", "--d", "0", "--q", "0", "--seed", "11"});
  REQUIRE(res.code == 0);
  const auto report = nlohmann::json::parse(res.out);
  const double a0 = report["stages"][0]["a"][0].get<double>();
  CHECK(a0 > 0.6);
  CHECK(a0 < 0.8);
}

TEST_CASE("column selection controls the ingested width") {
  TempCsv csv("qts_cli_cols.csv", "t,a,b\n0,1,5\n1,2,6\n2,3,7\n3,4,8\n");

  auto res = run_cli({"stationarity", "--input", csv.str(), "--time-col", "t",
                      "--value-cols", "a"});
  REQUIRE(res.code == 0);
  CHECK(nlohmann::json::parse(res.out)["input"]["d"] == 1);

  res = run_cli({"qft-dist", "--input", csv.str(), "--time-col", "t",
                 "--value-cols", "b,a", "--strategy", "stacked"});
  REQUIRE(res.code == 0);
  CHECK(nlohmann::json::parse(res.out)["input"]["d"] == 2);
}

TEST_CASE("--output writes the report to a file") {
  TempCsv csv("qts_cli_outsrc.csv", kRamp);
  const auto out_path =
      std::filesystem::temp_directory_path() / "qts_cli_report.json";
  std::filesystem::remove(out_path);

  const auto res = run_cli({"diff", "--input", csv.str(), "--time-col", "time",
                            "--output", out_path.string()});
  REQUIRE(res.code == 0);
  CHECK(res.out.empty());

  std::ifstream f(out_path);
  REQUIRE(f.good());
  nlohmann::json report;
  f >> report;
  CHECK(report["command"] == "diff");
  std::filesystem::remove(out_path);
}

TEST_CASE("help exits 0") {
  const auto res = run_cli({"--help"});
  CHECK(res.code == 0);
  CHECK(res.out.find("qft-dist") != std::string::npos);
}
