#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "wavedamp/cli.hpp"

using namespace wavedamp;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Data rows of a CSV with '#' comments and a header.
std::vector<std::vector<std::string>> rows(const std::string& csv, std::string* header = nullptr) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      if (header) *header = line;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    out.push_back(fields);
  }
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("format_double") {
  CHECK(cli::format_double(0.1) == "0.1");
  CHECK(cli::format_double(8.0) == "8");
  CHECK(cli::format_double(INFINITY) == "inf");
  CHECK(cli::format_double(-INFINITY) == "-inf");
  CHECK(std::stod(cli::format_double(100.0 / 12.0)) == 100.0 / 12.0);
}

TEST_CASE("timestamp honors SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(cli::utc_timestamp() == "1970-01-01T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
  CHECK(cli::utc_timestamp().size() == 20);
}

TEST_CASE("bode") {
  const Outcome r = run({"bode", "--omega-min", "1e-2", "--omega-max", "1e2", "--points", "50",
                         "--log-freq"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# manifest: ", 0) == 0);
  std::string header;
  const auto data = rows(r.out, &header);
  CHECK(header == "omega,magnitude,phase");
  REQUIRE(data.size() == 50);
  CHECK(std::stod(data[0][0]) == doctest::Approx(0.01));
  CHECK(std::stod(data.back()[0]) == 100.0);
  CHECK(std::stod(data[0][1]) == doctest::Approx(100.0 / 12.0).epsilon(0.03));
  const Outcome low = run({"bode", "--omega-min", "1e-4", "--omega-max", "1e-3", "--points", "2"});
  CHECK(std::stod(rows(low.out)[0][1]) == doctest::Approx(100.0 / 12.0).epsilon(1e-4));

  const Outcome a = run({"bode", "--forcing", "boundary", "--pos", "0.5", "--gain", "0"});
  const Outcome b = run({"bode", "--forcing", "boundary", "--pos", "0.5", "--gain", "100"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const auto ra = rows(a.out), rb = rows(b.out);
  REQUIRE(ra.size() == rb.size());
  bool magnitudes_differ = false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra[i][0] == rb[i][0]);
    magnitudes_differ = magnitudes_differ || ra[i][1] != rb[i][1];
  }
  CHECK(magnitudes_differ);
}

TEST_CASE("bode errors") {
  CHECK(run({"bode", "--points", "0"}).code == cli::kUsage);
  CHECK(run({"bode", "--forcing", "left"}).code == cli::kUsage);
  CHECK(run({"bode", "--no-such-flag"}).code == cli::kUsage);
  CHECK(run({"bode", "--pos", "12"}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);

  const std::string pole = cli::format_double(3.0 * std::numbers::pi / 10.0);
  const Outcome r = run({"bode", "--damping", "0", "--gain", "0", "--omega-min", pole,
                         "--omega-max", pole, "--points", "1"});
  CHECK(r.code == cli::kPole);
  CHECK(r.err.find("omega = " + pole) != std::string::npos);
}

TEST_CASE("norm") {
  const Outcome hinf = run({"norm", "hinf", "--forcing", "boundary", "--pos", "3", "--gain", "2"});
  REQUIRE(hinf.code == 0);
  const json h = json::parse(hinf.out);
  CHECK(h["criterion"] == "hinf");
  CHECK(h["value"].get<double>() >= 0.5);
  CHECK(h.contains("argmax_omega"));
  CHECK(h["config"]["tail_decay"] == "inverse_omega");
  CHECK(h["manifest"]["command"] == "norm");
  CHECK(h["manifest"]["tool_version"] == cli::kToolVersion);
  CHECK(h["manifest"]["parameters"]["pos"] == "3");

  const Outcome h2 = run({"norm", "h2", "--pos", "4.388", "--gain", "9.695"});
  REQUIRE(h2.code == 0);
  const double analytic = json::parse(h2.out)["value"].get<double>();
  CHECK(analytic == doctest::Approx(2.4195).epsilon(0.02));

  const Outcome disc = run({"norm", "h2", "--backend", "discrete:100"});
  const Outcome cont = run({"norm", "h2"});
  REQUIRE(disc.code == 0);
  const double d = json::parse(disc.out)["value"].get<double>();
  const double c = json::parse(cont.out)["value"].get<double>();
  CHECK(std::abs(d - c) < 0.01 * c);
}

TEST_CASE("norm errors") {
  const Outcome r = run({"norm", "hinf", "--damping", "0", "--gain", "0"});
  CHECK(r.code == cli::kNormDiverged);
  const json echoed = json::parse(r.err);
  CHECK(echoed["error"] == "NormDiverged");
  CHECK(echoed["config"].contains("omega_max"));
  CHECK(run({"norm", "h3"}).code == cli::kUsage);
  CHECK(run({"norm"}).code == cli::kUsage);
  CHECK(run({"norm", "h2", "--backend", "discrete:2"}).code == cli::kUsage);
  CHECK(run({"norm", "h2", "--quad-rel-tol", "0.5"}).code == cli::kUsage);
}

TEST_CASE("sweep") {
  const Outcome r = run({"sweep", "--p-count", "2", "--g-count", "2", "--p-min", "1", "--p-max",
                         "4"});
  REQUIRE(r.code == 0);
  std::string header;
  const auto data = rows(r.out, &header);
  CHECK(header == "p,g,value");
  CHECK(data.size() == 4);

  const auto dir = std::filesystem::temp_directory_path() / "wavedamp_cli_test";
  std::filesystem::create_directories(dir);
  const auto csv = dir / "sweep.csv";
  const Outcome f = run({"sweep", "--criterion", "hinf", "--damping", "0", "--p-min", "2",
                         "--p-max", "3.3", "--p-count", "2", "--g-min", "1e-12", "--g-max", "1",
                         "--g-count", "2", "--out", csv.string()});
  REQUIRE(f.code == 0);
  const auto frows = rows(slurp(csv));
  REQUIRE(frows.size() == 4);
  CHECK(frows[0][2] == "inf");
  const json side = json::parse(slurp(csv.string() + ".json"));
  CHECK(side["max_cell"]["value"] == "inf");
  CHECK(side["min_cell"]["value"].get<double>() > 0.0);
  CHECK(side["manifest"]["command"] == "sweep");
  std::filesystem::remove_all(dir);
}

TEST_CASE("optimize") {
  const Outcome point = run({"optimize", "--p-min", "3", "--p-max", "3", "--g-min", "2",
                             "--g-max", "2"});
  REQUIRE(point.code == 0);
  const json j = json::parse(point.out);
  CHECK(j["converged"] == true);
  CHECK(j["p_star"].get<double>() == 3.0);
  const Outcome norm = run({"norm", "h2", "--pos", "3", "--gain", "2"});
  CHECK(j["value"].get<double>() ==
        doctest::Approx(json::parse(norm.out)["value"].get<double>()).epsilon(1e-12));

  const Outcome stuck = run({"optimize", "--max-iter", "1", "--start", "1,1"});
  CHECK(stuck.code == cli::kNoConvergence);
  CHECK(json::parse(stuck.out)["converged"] == false);
  CHECK(run({"optimize", "--start", "1;1"}).code == cli::kUsage);

  const Outcome floor = run({"optimize", "--criterion", "hinf", "--forcing", "boundary",
                             "--p-min", "0.2", "--p-max", "9.8", "--starts-per-axis", "3"});
  REQUIRE(floor.code == 0);
  CHECK(json::parse(floor.out)["value"].get<double>() == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("compare") {
  const Outcome one = run({"compare", "--gain", "0", "--n", "50"});
  REQUIRE(one.code == 0);
  CHECK(rows(one.out).size() == 1);
  CHECK(one.out.find("fitted_order") == std::string::npos);

  const Outcome many = run({"compare", "--gain", "0", "--n", "25,50,100,200"});
  REQUIRE(many.code == 0);
  std::string header;
  const auto data = rows(many.out, &header);
  CHECK(header.rfind("n,h,abs_error", 0) == 0);
  REQUIRE(data.size() == 4);
  for (const auto& row : data) {
    CHECK(row[3] == data[0][3]);
    CHECK(row[4] == data[0][4]);
  }
  const auto pos = many.out.find("# fitted_order: ");
  REQUIRE(pos != std::string::npos);
  const double order = std::stod(many.out.substr(pos + 16));
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
  CHECK(run({"compare", "--n", "3"}).code == cli::kUsage);
}

TEST_CASE("identical flags give byte-identical output") {
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const std::vector<std::string> args = {"sweep", "--criterion", "hinf", "--p-count", "3",
                                         "--g-count", "3"};
  const Outcome a = run(args);
  const Outcome b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const Outcome c = run({"norm", "h2", "--gain", "3"});
  const Outcome d = run({"norm", "h2", "--gain", "3"});
  CHECK(c.out == d.out);
  unsetenv("SOURCE_DATE_EPOCH");
}
