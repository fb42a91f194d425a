#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "prophet/families.hpp"
#include "prophet/io.hpp"
#include "tools/cli.hpp"

using namespace prophet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
    json doc() const { return json::parse(out); }
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "prophet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("prophet_tests_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_json(const fs::path& dir, const std::string& name, const json& doc) {
    const fs::path path = dir / name;
    io::write_file(path, doc.dump());
    return path;
}

const json kCoin = json::parse(R"({"boxes": [{"support": [[0, 0.5], [2, 0.5]]}, {"support": [[1, 1.0]]}]})");

}  // namespace

TEST_CASE("instance json round trip") {
    const Instance inst = io::parse_instance(kCoin);
    CHECK(inst.size() == 2);
    const Instance again = io::parse_instance(io::instance_json(inst));
    CHECK(again.box(0) == inst.box(0));
    CHECK(again.box(1) == inst.box(1));
    CHECK_THROWS_AS(io::parse_instance(json::parse(R"({"boxes": [{"support": [[1, 0.5]]}]})")), ValidationError);
    CHECK_THROWS_AS(io::parse_instance(json::parse(R"({"box": []})")), ValidationError);
    CHECK_THROWS_AS(io::parse_instance(json::parse(R"({"boxes": [{"support": [[1]]}]})")), ValidationError);
}

TEST_CASE("orders inline and from json") {
    CHECK(io::resolve_order("1,0", 2) == Order({1, 0}, 2));
    CHECK(io::resolve_order(" 2, 0 ,1", 3) == Order({2, 0, 1}, 3));
    const auto many = io::resolve_orders("0,1;1,0", 2);
    REQUIRE(many.size() == 2);
    CHECK(many[1] == Order({1, 0}, 2));
    CHECK_THROWS_AS(io::resolve_order("0,x", 2), ValidationError);
    CHECK_THROWS_AS(io::resolve_order("0,0", 2), ValidationError);
    CHECK(io::parse_order(io::order_json(Order({1, 0}, 2)), 2) == Order({1, 0}, 2));
    CHECK_THROWS_AS(io::parse_order(json::parse(R"({"order": [0, -1]})"), 2), ValidationError);

    const auto dir = scratch_dir("orders");
    const auto file = write_json(dir, "orders.json", json{{"orders", {{0, 1}, {1, 0}}}});
    CHECK(io::resolve_orders(file.string(), 2).size() == 2);
}

TEST_CASE("ratio csv columns") {
    const auto fam = example1(1e-3);
    const auto report = order_ratio_sweep(fam.instance, Policy::golden(fam.instance), Objective::expectation(),
                                          BenchmarkKind::opt_expectation);
    const std::string csv = io::ratio_csv(report);
    CHECK(csv.rfind("order,alg,opt,ratio,method\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    const json doc = io::ratio_json(report);
    CHECK(doc["per_order"].size() == 6);
    CHECK(doc["min_ratio"].get<double>() == report.min_ratio);
}

TEST_CASE("cli: constants") {
    const auto r = run_cli({"constants"});
    REQUIRE(r.code == cli::kExitOk);
    const auto doc = r.doc();
    CHECK(doc["lambda"].get<double>() == doctest::Approx(0.4464329784282796).epsilon(1e-12));
    CHECK(std::abs(doc["lambda_residual"].get<double>()) <= 1e-14);
    CHECK(run_cli({"constants", "--format", "csv"}).out.rfind("name,value\n", 0) == 0);
}

TEST_CASE("cli: validate and evaluate") {
    const auto dir = scratch_dir("evaluate");
    const auto coin = write_json(dir, "coin.json", kCoin).string();
    CHECK(run_cli({"validate", "-i", coin}).code == cli::kExitOk);

    const auto bad = write_json(dir, "bad.json", json::parse(R"({"boxes": [{"support": [[1, 0.5], [2, 0.6]]}]})"));
    const auto invalid = run_cli({"validate", "-i", bad.string()});
    CHECK(invalid.code == cli::kExitInput);
    CHECK_FALSE(invalid.doc()["valid"].get<bool>());

    const auto shared = write_json(dir, "shared.json",
                                   json::parse(R"({"boxes": [{"support": [[1, 1]]}, {"support": [[1, 1]]}]})"));
    CHECK(run_cli({"validate", "-i", shared.string()}).code == cli::kExitOk);
    CHECK(run_cli({"validate", "-i", shared.string(), "--unique-max"}).code == cli::kExitInput);
    CHECK(run_cli({"evaluate", "-i", shared.string(), "-o", "0,1", "-p", "maxprob", "--obj", "winprob"}).code ==
          cli::kExitInput);

    const auto golden = run_cli({"evaluate", "-i", coin, "-o", "0,1", "-p", "golden", "--obj", "expectation"});
    REQUIRE(golden.code == cli::kExitOk);
    CHECK(golden.doc()["value"].get<double>() == doctest::Approx(1.5));
    CHECK(golden.doc()["method"] == "exact-dp");

    const auto brute = run_cli({"evaluate", "-i", coin, "-o", "0,1", "-p", "opt-exp", "--obj", "expectation",
                                "--method", "brute"});
    CHECK(brute.doc()["method"] == "brute-force");
    CHECK(brute.doc()["value"].get<double>() == doctest::Approx(1.5));

    const std::vector<std::string> mc{"evaluate", "-i", coin, "-o", "1,0", "-p", "threshold:1.5",
                                      "--obj", "winprob", "--mc", "5000", "--seed", "7"};
    const auto first = run_cli(mc);
    CHECK(first.code == cli::kExitOk);
    CHECK(first.out == run_cli(mc).out);
    CHECK(first.doc()["samples"] == 5000);

    CHECK(run_cli({"evaluate", "-i", coin, "-o", "0,1", "-p", "nope", "--obj", "expectation"}).code ==
          cli::kExitInput);
    CHECK(run_cli({"evaluate", "-i", (dir / "missing.json").string(), "-o", "0,1", "-p", "golden", "--obj",
                   "expectation"})
              .code == cli::kExitInput);
    CHECK(run_cli({"evaluate", "-i", coin, "-o", "0,1", "-p", "golden", "--obj", "expectation", "--state-cap", "1"})
              .code == cli::kExitCap);
    CHECK(run_cli({"evaluate", "-i", coin}).code == cli::kExitInput);
}

TEST_CASE("cli: ratio") {
    const auto dir = scratch_dir("ratio");
    const auto coin = write_json(dir, "coin.json", kCoin).string();
    const auto r = run_cli({"ratio", "-i", coin, "-p", "golden", "--obj", "expectation"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.doc()["per_order"].size() == 2);
    CHECK(run_cli({"ratio", "-i", coin, "-p", "golden", "--obj", "expectation", "--orders", "1,0"})
              .doc()["per_order"]
              .size() == 1);
    CHECK(run_cli({"ratio", "-i", coin, "-p", "opt-exp", "--obj", "expectation"}).code == cli::kExitInput);
    CHECK(run_cli({"ratio", "-i", coin, "-p", "golden", "--obj", "expectation", "--perm-cap", "1"}).code ==
          cli::kExitCap);
    const auto csv = run_cli({"ratio", "-i", coin, "-p", "golden", "--obj", "expectation", "--format", "csv"});
    CHECK(csv.out.rfind("order,alg,opt,ratio,method\n", 0) == 0);
}

TEST_CASE("cli: reproduce and emitted files round-trip") {
    const auto dir = scratch_dir("reproduce");
    const auto r = run_cli({"reproduce", "example1", "--emit-dir", dir.string()});
    REQUIRE(r.code == cli::kExitOk);
    const auto doc = r.doc();
    CHECK(doc["min_ratio"].get<double>() == doctest::Approx(0.7074605).epsilon(1e-6));

    const auto inst_path = (dir / "example1_instance.json").string();
    const auto orders_path = (dir / "example1_orders.json").string();
    REQUIRE(fs::exists(inst_path));
    REQUIRE(fs::exists(orders_path));
    const auto ratio = run_cli({"ratio", "-i", inst_path, "-p", "golden", "--obj", "expectation", "--orders",
                                orders_path});
    REQUIRE(ratio.code == cli::kExitOk);
    CHECK(ratio.doc()["min_ratio"].get<double>() == doctest::Approx(doc["min_ratio"].get<double>()).epsilon(1e-12));

    const auto mp = run_cli({"reproduce", "maxprob-lb", "--n", "30"});
    REQUIRE(mp.code == cli::kExitOk);
    CHECK(mp.doc()["accept_branch_winprob"].get<double>() == doctest::Approx(mp.doc()["lambda"].get<double>()));

    const auto st = run_cli({"reproduce", "single-threshold"});
    REQUIRE(st.code == cli::kExitOk);
    CHECK(st.doc()["alpha_star"].get<double>() == doctest::Approx(1.232435).epsilon(1e-6));

    CHECK(run_cli({"reproduce", "unknown"}).code == cli::kExitInput);
}
