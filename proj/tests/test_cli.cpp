#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mobsense/cli.hpp"
#include "mobsense/json_io.hpp"

using namespace mobsense;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(MOBSENSE_CONFIG_DIR) + "/" + name + ".json"; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mobsense_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("design reproduces the quartic scenario") {
    const auto r = invoke({"design", "--config", config("design")});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(std::abs(j["sensitivity"].get<double>() - 0.00390625) <= 1e-6);
    CHECK(j["schedule"]["switch_times"].size() == 4);
    CHECK(j["cancellation"]["passed"].get<bool>());
  }

  TEST_CASE("design output verifies and reruns are byte identical") {
    const fs::path sched = scratch("schedule.json");
    REQUIRE(invoke({"design", "--config", config("design"), "--out", sched.string()}).code == 0);
    std::ifstream in(sched);
    std::stringstream first;
    first << in.rdbuf();
    REQUIRE(invoke({"design", "--config", config("design"), "--out", sched.string()}).code == 0);
    std::ifstream again(sched);
    std::stringstream second;
    second << again.rdbuf();
    CHECK(first.str() == second.str());

    const fs::path cfg = scratch("verify.json");
    write(cfg, R"({"noise": ["1", "x1", "x1^2", "x1^3"], "path": {"T": 1, "coords": ["t"]},
                  "verify": {"schedule_file": "schedule.json"}})");
    const auto v = invoke({"verify", "--config", cfg.string()});
    CHECK(v.code == 0);
    const auto j = Json::parse(v.out);
    CHECK(j["passed"].get<bool>());
    for (const auto& r : j["residues"]) CHECK(r.get<double>() <= 1e-7);
  }

  TEST_CASE("failed verification exits 2") {
    const fs::path cfg = scratch("verify_bad.json");
    write(cfg, R"({"noise": ["1"], "path": {"T": 1, "coords": ["t"]},
                  "verify": {"schedule": {"initial_sign": 1, "switch_times": []}}})");
    const auto r = invoke({"verify", "--config", cfg.string()});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  }

  TEST_CASE("spatial frequency bound") {
    const auto r = invoke({"qfi", "--config", config("qfi")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"bound\": 16,") != std::string::npos);
    CHECK(Json::parse(r.out)["numeric_bound"].get<double>() == doctest::Approx(16.0).epsilon(1e-12));
  }

  TEST_CASE("network comparison") {
    const auto r = invoke({"network", "--config", config("network")});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["dfs_qfi"].get<double>() == doctest::Approx(4.0));
    CHECK(j["moving_qfi"].get<double>() == doctest::Approx(9.0));
    CHECK(j["enhancement"].get<double>() == doctest::Approx(2.25));
  }

  TEST_CASE("basis controls") {
    const auto r = invoke({"basis", "--config", config("basis")});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["gain"].get<double>() == 0.00390625);
  }

  TEST_CASE("simulate sweep is seeded") {
    const auto a = invoke({"simulate", "--config", config("simulate"), "--seed", "3"});
    const auto b = invoke({"simulate", "--config", config("simulate"), "--seed", "3"});
    const auto c = invoke({"simulate", "--config", config("simulate"), "--seed", "4"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(a.out.rfind("m,variance,crb,ratio\n", 0) == 0);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 4);
  }

  TEST_CASE("plot data") {
    const auto r = invoke({"plotdata", "--config", config("plotdata"), "--grid-panels", "32", "--grid-points", "6"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("t,f_gamma,l_star,control\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 12);
  }

  TEST_CASE("errors map to exit codes") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"bogus"}).code == 1);
    CHECK(invoke({"design"}).code == 1);
    CHECK(invoke({"design", "--config", "/nonexistent/file.json"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);

    const fs::path bad_json = scratch("bad.json");
    write(bad_json, "{ not json");
    CHECK(invoke({"design", "--config", bad_json.string()}).code == 1);

    const fs::path bad_expr = scratch("bad_expr.json");
    write(bad_expr, R"({"signal": "x1 + ", "noise": [], "path": {"T": 1, "coords": ["t"]}})");
    const auto pe = invoke({"design", "--config", bad_expr.string()});
    CHECK(pe.code == 1);
    CHECK(pe.err.find("offset 5") != std::string::npos);

    const fs::path dependent = scratch("dependent.json");
    write(dependent, R"({"signal": "x1^2", "noise": ["2*x1^2"], "path": {"T": 1, "coords": ["t"]}})");
    CHECK(invoke({"design", "--config", dependent.string()}).code == 2);

    const fs::path missing = scratch("missing.json");
    write(missing, R"({"qfi": {"kind": "spatial_frequency", "B": 1}})");
    CHECK(invoke({"qfi", "--config", missing.string()}).code == 1);
  }

  TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(16.0) == "16");
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(std::nan("")) == "null");
  }
}
