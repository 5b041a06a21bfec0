#include "sumscale/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

using namespace sumscale;

namespace {

RunSpec spec_for(const std::string& problem, Index n, const std::string& method) {
    RunSpec s;
    s.problem = problem;
    s.n = n;
    s.method = method;
    return s;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text) lines += c == '\n';
    return lines;
}

}  // namespace

TEST_CASE("SplitMix64 reference sequence") {
    SplitMix64 rng(1234567);
    CHECK(rng.next() == 6457827717110365317ULL);
    CHECK(rng.next() == 3203168211198807973ULL);
    SplitMix64 a(9);
    SplitMix64 b(9);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("scalar formatting") {
    CHECK(format_scalar(460.51700001) == "460.517");
    CHECK(format_scalar(6907.755278982137) == "6907.755");
    CHECK(format_scalar(-0.00032) == "-0.00032");
}

TEST_CASE("CSV header and row") {
    RunSpec s = spec_for("nll", 5, "vm");
    s.bounds = std::make_pair(0.0, 1.0);
    BenchmarkTable t;
    t.rows.push_back(run(s));
    const std::string csv = emit(t, Format::csv);
    CHECK(first_line(csv) ==
          "problem,n,reformulation,method,gradient,bounds,value,fevals,gevals,hevals,conv,kkt1,kkt2,time_s,canonical_"
          "error");
    CHECK(count_lines(csv) == 2);
    CHECK(csv.find("nll,5,identity,vm,analytic,\"0,1\",8.04719,") != std::string::npos);
    CHECK(t.rows[0].conv == 0);
    CHECK(t.all_converged());
}

TEST_CASE("JSON carries full-precision parameters") {
    BenchmarkTable t;
    t.rows.push_back(run(spec_for("enll", 10, "cg")));
    const std::string json = emit(t, Format::json);
    CHECK(json.find("\"parameters\"") != std::string::npos);
    const auto pos = json.find("\"value\": ");
    REQUIRE(pos != std::string::npos);
    const std::string number = json.substr(pos + 9, json.find_first_of(",\n}", pos + 9) - pos - 9);
    CHECK(std::strtod(number.c_str(), nullptr) == t.rows[0].value);
}

TEST_CASE("markdown table") {
    BenchmarkTable t;
    t.rows.push_back(run(spec_for("nll", 5, "cg")));
    const std::string md = emit(t, Format::markdown);
    CHECK(md.rfind("| problem |", 0) == 0);
    CHECK(md.find("|---") != std::string::npos);
    CHECK_THROWS_AS(format_from_string("xml"), InvalidArgument);
}

TEST_CASE("misnamed method becomes an error row") {
    const Row row = run_contained(spec_for("nll", 5, "Rvmmin"));
    CHECK(row.conv == 9999);
    CHECK_FALSE(row.status.empty());
    CHECK_THROWS_AS(run(spec_for("nll", 5, "Rvmmin")), InvalidArgument);
    CHECK(run_contained(spec_for("no-such-problem", 5, "vm")).conv == 9999);
}

TEST_CASE("empty suite") {
    const auto specs = parse_suite(R"({"runs": []})");
    CHECK(specs.empty());
    const auto t = run_suite(specs);
    CHECK(t.rows.empty());
    CHECK(t.all_converged());
    CHECK(count_lines(emit(t, Format::csv)) == 1);
}

TEST_CASE("suite parse errors carry a line number") {
    const std::string bad = "{\n  \"runs\": [\n    {\"problem\": \"nll\", \"n\": 5, \"method\": \"vm\"},\n"
                            "    {\"problem\": \"nll\" \"n\": 5}\n  ]\n}\n";
    try {
        parse_suite(bad);
        FAIL("no exception");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    const std::string unknown = "{\"runs\": [\n{\"problem\": \"nll\", \"n\": 5, \"method\": \"vm\"},\n"
                                "{\"problem\": \"nll\", \"n\": 5, \"method\": \"vm\", \"colour\": 1}\n]}";
    try {
        parse_suite(unknown);
        FAIL("no exception");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_suite(R"({"runs": [{"problem": "nll", "n": 5}]})"), ConfigError);
    CHECK_THROWS_AS(parse_suite(R"({"jobs": []})"), ConfigError);
    CHECK_THROWS_AS(load_suite("/nonexistent/suite.json"), ConfigError);
}

TEST_CASE("suite keeps config order and reproduces byte-identical CSV") {
    const std::string text = R"({"runs": [
        {"problem": "nll", "n": 5, "method": "cg", "bounds": [0, 1]},
        {"problem": "nllrv", "n": 5, "method": "spg"},
        {"problem": "nll", "n": 5, "method": "Rvmmin"},
        {"problem": "rq-moler-max", "n": 10, "method": "spg"},
        {"problem": "nll", "n": 6, "method": "vm", "seed": 11, "start_range": [0.05, 0.15]}
    ]})";
    const auto specs = parse_suite(text);
    REQUIRE(specs.size() == 5);
    const auto t1 = run_suite(specs, {}, 4);
    const auto t2 = run_suite(specs, {}, 1);
    CHECK(t1.rows[0].method == "cg");
    CHECK(t1.rows[2].conv == 9999);
    CHECK_FALSE(t1.all_converged());
    CHECK(t1.rows[3].value == doctest::Approx(-31.58981).epsilon(1e-6));
    const EmitOptions stable{false};
    CHECK(emit(t1, Format::csv, stable) == emit(t2, Format::csv, stable));
}

TEST_CASE("seeded starts are reproducible") {
    RunSpec s = spec_for("rosbkext-ball", 6, "spg");
    s.start.kind = StartSpec::Kind::seeded_uniform;
    s.start.seed = 5;
    const Row a = run(s);
    const Row b = run(s);
    CHECK(a.value == b.value);
    CHECK(a.fevals == b.fevals);
}

TEST_CASE("sort by value") {
    BenchmarkTable t;
    t.rows.resize(3);
    t.rows[0].value = 3;
    t.rows[1].value = 1;
    t.rows[2].value = 2;
    t.sort_by_value();
    CHECK(t.rows[0].value == 1);
    CHECK(t.rows[2].value == 3);
}

TEST_CASE("worker count honors SUMSCALE_THREADS") {
    setenv("SUMSCALE_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    setenv("SUMSCALE_THREADS", "0", 1);
    CHECK(worker_count() >= 1);
    unsetenv("SUMSCALE_THREADS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("QP method on the help-list example") {
    const Row row = run(spec_for("rhelp-ssq", 3, "qp"));
    CHECK(row.conv == 0);
    CHECK(row.value == doctest::Approx(6.0 / 11).epsilon(1e-12));
}

TEST_CASE("verify set names") {
    CHECK(verify_set_names() == std::vector<std::string>{"paper"});
    CHECK_THROWS_AS(verify("nonsense"), InvalidArgument);
}
