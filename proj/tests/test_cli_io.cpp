#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toricsym/cli.hpp"
#include "toricsym/errors.hpp"
#include "toricsym/zoo.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace toricsym;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
    auto p = std::filesystem::temp_directory_path() / ("toricsym_cli_io_" + name);
    std::ofstream(p) << text;
    return p.string();
}

std::string schema_message(const json& j) {
    try {
        descriptor_from_json(j);
    } catch (const Error& e) {
        CHECK(e.kind() == "SchemaError");
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("schema errors name the field") {
    json ok = json::parse(R"({"coords": ["x", "y"], "integrals": [{"expr": "x*y", "kind": "hyperbolic"}]})");
    CHECK_NOTHROW(descriptor_from_json(ok));
    auto bad = ok;
    bad.erase("coords");
    CHECK(schema_message(bad).find("coords") != std::string::npos);
    bad = ok;
    bad["coords"] = {"x", "y", "z"};
    CHECK(schema_message(bad).find("coords") != std::string::npos);
    bad = ok;
    bad["integrals"][0]["kind"] = "sideways";
    CHECK(schema_message(bad).find("integrals.kind") != std::string::npos);
    bad = ok;
    bad["point"] = {0.0};
    CHECK(schema_message(bad).find("point") != std::string::npos);
    bad = ok;
    bad["omega"] = "weird";
    CHECK(schema_message(bad).find("omega") != std::string::npos);
    bad = ok;
    bad["gamma"] = json::array({json{{"order", 0}, {"rotations", json::array({json{{"num", 1}, {"den", 2}}})}}});
    CHECK(schema_message(bad).find("gamma") != std::string::npos);
}

TEST_CASE("emitted descriptors reproduce the report") {
    for (auto& n : zoo_names()) {
        INFO(n);
        auto emitted = run({"zoo", "emit", n});
        REQUIRE(emitted.code == 0);
        auto path = temp_file(n + ".json", emitted.out);
        auto from_file = run({"classify", path, "--format", "json"});
        auto from_zoo = run({"classify", "--zoo", n, "--format", "json"});
        CHECK(from_file.code == from_zoo.code);
        if (from_zoo.code == 0) CHECK(from_file.out == from_zoo.out);
        CHECK(run({"zoo", "emit", n}).out == emitted.out);
    }
}

TEST_CASE("zero system gives the trivial report") {
    auto path = temp_file("zero.json", R"({"name": "zero", "coords": ["x", "y"], "integrals": [{"expr": "0"}]})");
    auto r = run({"classify", path, "--format", "json"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["williamson"] == json::array({0, 0, 0}));
    CHECK(j["kappa_e"] == 0);
    CHECK(j["kappa_h"] == 0);
}

TEST_CASE("exit codes") {
    CHECK(run({"classify", "--zoo", "hopf-resonance", "--p", "1", "--q", "2"}).code == 0);
    CHECK(run({}).code == 1);
    CHECK(run({"classify", "--zoo", "no-such-model"}).code == 1);
    CHECK(run({"classify", "--zoo", "hopf-resonance", "--p", "2", "--q", "4"}).code == 1);
    CHECK(run({"classify", "--zoo", "elliptic-basic", "--format", "xml"}).code == 1);
    CHECK(run({"classify", "/nonexistent/system.json"}).code == 1);
    CHECK(run({"classify", temp_file("broken.json", "{ not json")}).code == 1);
    CHECK(run({"action", "--zoo", "elliptic-basic", "--grid", "0:0.2"}).code == 1);
    CHECK(run({"scale", "--s", "4", "--a", "1"}).code == 1);
    // An irrational frequency ratio is a mathematical negative, not an input error.
    auto path = temp_file("irrational.json",
                          R"({"coords": ["x", "y"], "integrals": [{"expr": "x^2 + 2*y^2", "kind": "elliptic"}]})");
    auto r = run({"classify", path});
    CHECK(r.code == 2);
    CHECK(r.err.find("NonResonantSpectrum") != std::string::npos);
}

TEST_CASE("conjugation leaves the canonical report unchanged") {
    for (auto& n : zoo_names()) {
        auto e = zoo(n);
        if (!e.has_expected) continue;
        INFO(n);
        auto plain = json::parse(run({"classify", "--zoo", n, "--format", "json"}).out);
        auto r = run({"classify", "--zoo", n, "--format", "json", "--conjugate-seed", "7"});
        REQUIRE(r.code == 0);
        auto conj = json::parse(r.out);
        CHECK(conj["canonical"] == plain["canonical"]);
        CHECK(conj["williamson"] == plain["williamson"]);
        CHECK(conj["conjugate_seed"] == 7);
    }
}

TEST_CASE("table row of the Hopf resonance") {
    auto r = run({"classify", "--zoo", "hopf-resonance", "--p", "1", "--q", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("(2,0,0)") != std::string::npos);
    CHECK(r.out.find("(1:2)") != std::string::npos);
    CHECK(r.out.find("(0,0)") != std::string::npos);
}

TEST_CASE("action CSV and determinism") {
    std::vector<std::string> args = {"action", "--zoo", "elliptic-basic", "--grid", "0:0.2:21"};
    auto a = run(args);
    REQUIRE(a.code == 0);
    std::istringstream is(a.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "z1,I,residual");
    int rows = 0;
    while (std::getline(is, line)) {
        double z = std::stod(line.substr(0, line.find(',')));
        double I = std::stod(line.substr(line.find(',') + 1));
        CHECK(std::abs(I - z) <= 1e-6);
        ++rows;
    }
    CHECK(rows == 21);
    CHECK(run(args).out == a.out);
    args.insert(args.end(), {"--format", "json"});
    CHECK(run(args).out == run(args).out);
}

TEST_CASE("witness verdicts through the CLI") {
    auto c = run({"witness", "--zoo", "cusp-negative"});
    REQUIRE(c.code == 0);
    CHECK(json::parse(c.out)["verdict"] == "fails");
    auto f = run({"witness", "--zoo", "focus-focus", "--eps", "1e-6"});
    REQUIRE(f.code == 0);
    CHECK(json::parse(f.out)["verdict"] == "holds");
}

TEST_CASE("scale command") {
    auto r = run({"scale", "--s", "3", "--b1", "2"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["verified"] == true);
    CHECK(j["u"]["exponent"] == json{{"num", -1}, {"den", 1}});
    CHECK(j["u"]["value"].get<double>() == doctest::Approx(0.5));
    CHECK(run({"scale", "--s", "4", "--a", "1/2", "--a-target", "2"}).code == 1);
}
