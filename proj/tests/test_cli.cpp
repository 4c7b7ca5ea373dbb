#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "sid/core.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sid::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "sid_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_data() {
  const fs::path p = scratch() / "data.csv";
  std::ofstream f(p);
  f << "t1,d1,z1,z2\n";
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> ex(1.0);
  std::normal_distribution<double> z;
  for (int i = 0; i < 40; ++i) f << ex(rng) + 0.01 << ',' << (i % 4 == 0 ? 0 : 1) << ',' << z(rng) << ',' << z(rng) << '\n';
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream f(p);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

std::size_t count_lines(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("test command") {
  const std::string data = write_data().string();
  const std::vector<std::string> args{"test", "-i", data, "--time", "t1", "--status", "d1", "--cov", "z1",
                                      "--kernel", "gauss", "--B", "300", "--alpha", "0.05", "--seed", "7"};
  const Run a = run(args);
  REQUIRE(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  for (const char *key : {"statistic", "scaled_statistic", "critical_value", "p_value", "reject", "h", "gamma", "B",
                          "alpha", "seed"})
    CHECK(j.contains(key));
  CHECK(j["p_value"].get<double>() > 0.0);
  CHECK(j["p_value"].get<double>() <= 1.0);
  CHECK(j["seed"].get<std::uint64_t>() == 7);
  CHECK(j["B"].get<int>() == 300);
  CHECK(run(args).out == a.out);

  // numbers round-trip exactly through the printed text
  const double stat = j["scaled_statistic"].get<double>();
  CHECK(nlohmann::json(stat).dump() == nlohmann::json::parse(a.out)["scaled_statistic"].dump());

  // default seed is printed
  const Run d = run({"test", "-i", data, "--time", "t1", "--status", "d1", "--cov", "z1,z2", "--B", "50"});
  CHECK(d.code == 0);
  CHECK(nlohmann::json::parse(d.out)["seed"].get<std::uint64_t>() == 20240229);

  const Run beta = run({"test", "-i", data, "--time", "t1", "--status", "d1", "--cov", "z1", "--kernel", "beta",
                        "--beta", "0.5", "--B", "50", "--variant", "uwild", "--h", "0.3"});
  CHECK(beta.code == 0);
  CHECK(nlohmann::json::parse(beta.out)["gamma"].is_null());
  CHECK(nlohmann::json::parse(beta.out)["h"].get<double>() == 0.3);

  const fs::path out = scratch() / "result.json";
  CHECK(run({"test", "-i", data, "--time", "t1", "--status", "d1", "--cov", "z1", "--B", "50", "--output", out.string()})
            .code == 0);
  CHECK(nlohmann::json::parse(slurp(out))["B"].get<int>() == 50);
}

TEST_CASE("censoring-test flips the status column") {
  const fs::path data = write_data();
  const fs::path flipped = scratch() / "flipped.csv";
  {
    std::ifstream in(data);
    std::ofstream out(flipped);
    std::string line;
    std::getline(in, line);
    out << line << '\n';
    while (std::getline(in, line)) {
      auto parts = line;
      const auto c1 = parts.find(',');
      const auto c2 = parts.find(',', c1 + 1);
      const char d = parts[c1 + 1] == '1' ? '0' : '1';
      out << parts.substr(0, c1 + 1) << d << parts.substr(c2) << '\n';
    }
  }
  const std::vector<std::string> tail{"--time", "t1", "--status", "d1", "--cov", "z1", "--B", "80", "--seed", "3"};
  auto with = [&](const std::string &cmd, const fs::path &p) {
    std::vector<std::string> a{cmd, "-i", p.string()};
    a.insert(a.end(), tail.begin(), tail.end());
    return run(a);
  };
  CHECK(with("censoring-test", data).out == with("test", flipped).out);
  CHECK(with("censoring-test", flipped).out == with("test", data).out);
}

TEST_CASE("usage and data errors") {
  const std::string data = write_data().string();
  CHECK(run({"test", "-i", data, "--time", "t1", "--cov", "z1"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"test", "-i", data, "--time", "t1", "--status", "d1", "--cov", "z1", "--kernel", "beta"}).code == 2);
  CHECK(run({"test", "-i", data, "--time", "t1", "--status", "d1", "--cov", "z1", "--alpha", "1.5"}).code == 2);
  CHECK(run({"test", "-i", data, "--time", "t1", "--status", "d1", "--cov", "z1", "--B", "0"}).code == 2);
  CHECK(run({"test", "-i", data, "--time", "t1", "--status", "d1", "--cov", "nope"}).code == 1);
  CHECK(run({"test", "-i", "/nonexistent.csv", "--time", "t1", "--status", "d1", "--cov", "z1"}).code == 1);
  CHECK(run({"simulate", "--scenario", "ex9-case9", "--censoring", "0.3", "--seed", "1"}).code == 2);
  CHECK(run({"simulate", "--scenario", "ex1-case1", "--censoring", "0.3"}).code == 2);
  CHECK(run({"simulate", "--scenario", "ex1-case1", "--seed", "1"}).code == 2);
  CHECK(run({"sweep", "--family", "ex6-case1", "--grid", "gamma=1,2", "--seed", "1"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate writes 12 rate rows") {
  const fs::path prefix = scratch() / "sim";
  const Run r = run({"simulate", "--scenario", "ex1-case1", "--n", "30", "--censoring", "0.3", "--reps", "5", "--B",
                     "40", "--alphas", "0.01,0.05,0.1", "--methods", "sid-gauss,sid-lap,sid-1,sid-0.5", "--seed", "42",
                     "--output", prefix.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("sid-lap") != std::string::npos);
  const std::string csv = slurp(prefix.string() + ".csv");
  CHECK(csv.rfind("scenario,method,alpha,n,censoring,reps,B,rate,seed\n", 0) == 0);
  CHECK(count_lines(csv) == 13);
  const auto j = nlohmann::json::parse(slurp(prefix.string() + ".json"));
  CHECK(j["rejection_rates"].size() == 12);
  CHECK(j["seed"].get<int>() == 42);
  CHECK(j["scenario"]["id"] == "ex1-case1");
}

TEST_CASE("sweep emits one row per grid point per method") {
  const Run r = run({"sweep", "--family", "ex6-case1", "--grid", "theta=0:0.6:0.2", "--n", "30", "--reps", "3", "--B",
                     "30", "--alphas", "0.05", "--methods", "sid-gauss,sid-1", "--seed", "9"});
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("grid_key,grid_value,scenario");
  REQUIRE(pos != std::string::npos);
  const std::string csv = r.out.substr(pos);
  CHECK(count_lines(csv) == 1 + 4 * 2);
  CHECK(csv.find("theta,0.6,ex6-case1,sid-1,0.05") != std::string::npos);
  CHECK(csv.find("fixed") != std::string::npos);
}
