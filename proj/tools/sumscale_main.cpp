#include "sumscale/harness.hpp"
#include "sumscale/oracle.hpp"
#include "sumscale/problems.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace sumscale;

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kUsage = 2;

std::pair<double, double> parse_bounds(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InvalidArgument("--bounds expects lo,hi");
    std::size_t used = 0;
    const double lo = std::stod(text.substr(0, comma), &used);
    if (used != comma) throw InvalidArgument("--bounds: bad lower bound");
    const std::string rest = text.substr(comma + 1);
    const double hi = std::stod(rest, &used);
    if (used != rest.size()) throw InvalidArgument("--bounds: bad upper bound");
    return {lo, hi};
}

Vector parse_vector(const std::string& text) {
    std::vector<double> xs;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) xs.push_back(std::stod(tok));
    return Eigen::Map<Vector>(xs.data(), static_cast<Index>(xs.size()));
}

void print_eigen(Index n) {
    const EigenDecomposition eig = jacobi_eigen(moler_matrix(n));
    std::printf("moler(%ld): %d sweeps\n", static_cast<long>(n), eig.sweeps);
    std::printf("values:\n");
    for (double v : eig.values) std::printf("  %.10g\n", v);
    auto vec = [](const char* label, double value, const Vector& v) {
        std::printf("%s eigenvalue = %.10g\n  vector:", label, value);
        for (Index i = 0; i < v.size(); ++i) std::printf(" %.7g", v[i]);
        std::printf("\n");
    };
    vec("Maximal", eig.values.back(), eig.vectors.back());
    vec("Minimal", eig.values.front(), eig.vectors.front());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sumscale: optimization under sum and scale constraints"};
    app.require_subcommand(1);

    std::string format = "csv";
    bool no_time = false;

    auto* run_cmd = app.add_subcommand("run", "Run one problem/reformulation/method combination");
    std::string problem, reform = "identity", method, gradient = "analytic", bounds, projection, start;
    long n = 0;
    std::uint64_t seed = 0;
    int maxit = 0;
    double ftol = 0.0;
    double gtol = 0.0;
    run_cmd->add_option("--problem", problem, "Problem name")->required();
    run_cmd->add_option("--n", n, "Dimension")->required();
    run_cmd->add_option("--reform", reform, "Reformulation chain, outermost first (a+b)");
    run_cmd->add_option("--method", method, "spg, vm, cg, nm or qp")->required();
    run_cmd->add_option("--gradient", gradient, "analytic, forward or central")
        ->check(CLI::IsMember({"analytic", "forward", "central"}));
    run_cmd->add_option("--bounds", bounds, "Box on the optimized parameters, lo,hi");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Seeded uniform start (SplitMix64)");
    run_cmd->add_option("--projection", projection, "spg projection override");
    auto* start_opt = run_cmd->add_option("--start", start, "Explicit start, comma separated");
    run_cmd->add_option("--maxit", maxit, "Iteration limit");
    run_cmd->add_option("--ftol", ftol, "Relative function-change tolerance");
    run_cmd->add_option("--gtol", gtol, "Projected-gradient tolerance, relative to 1 + |f|");
    run_cmd->add_option("--format", format, "csv, markdown or json")
        ->check(CLI::IsMember({"csv", "markdown", "md", "json"}));
    run_cmd->add_flag("--no-time", no_time, "Print time_s as 0");
    seed_opt->excludes(start_opt);

    auto* suite_cmd = app.add_subcommand("suite", "Run every entry of a JSON config");
    std::string config_path;
    bool sort = false;
    suite_cmd->add_option("config", config_path, "Config file with a top-level \"runs\" array")->required();
    suite_cmd->add_option("--format", format, "csv, markdown or json")
        ->check(CLI::IsMember({"csv", "markdown", "md", "json"}));
    suite_cmd->add_flag("--sort", sort, "Order rows by value");
    suite_cmd->add_flag("--no-time", no_time, "Print time_s as 0");

    auto* eigen_cmd = app.add_subcommand("eigen", "Reference eigensolution of a test matrix");
    long moler_n = 0;
    eigen_cmd->add_option("--moler", moler_n, "Order of the Moler matrix")->required()->check(CLI::Range(1L, 2000L));

    auto* verify_cmd = app.add_subcommand("verify", "Run a named acceptance check set");
    std::string set_name;
    bool broken_simplex = false;
    bool quiet = false;
    verify_cmd->add_option("set", set_name, "Check set name (paper)")->required();
    verify_cmd->add_flag("--broken-simplex", broken_simplex, "Swap in a faulty simplex projection");
    verify_cmd->add_flag("--quiet", quiet, "Only the per-criterion lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const EmitOptions emit_opts{!no_time};
    try {
        if (*run_cmd) {
            RunSpec spec;
            spec.problem = problem;
            spec.n = n;
            spec.reformulation = reform;
            spec.method = method;
            spec.gradient = gradient_mode_from_string(gradient);
            spec.projection = projection;
            if (!bounds.empty()) spec.bounds = parse_bounds(bounds);
            if (*seed_opt) {
                spec.start.kind = StartSpec::Kind::seeded_uniform;
                spec.start.seed = seed;
            }
            if (*start_opt) {
                spec.start.kind = StartSpec::Kind::explicit_vector;
                spec.start.values = parse_vector(start);
            }
            if (maxit > 0) spec.config.max_iterations = maxit;
            if (ftol > 0.0) spec.config.f_tolerance = ftol;
            if (gtol > 0.0) spec.config.g_tolerance = gtol;
            const Format fmt = format_from_string(format);
            BenchmarkTable table;
            table.rows.push_back(run_contained(spec));
            emit(table, fmt, std::cout, emit_opts);
            if (!table.rows[0].status.empty() && table.rows[0].conv != convergence::converged) {
                std::cerr << table.rows[0].status << '\n';
            }
            return table.all_converged() ? kOk : kRunFailure;
        }
        if (*suite_cmd) {
            const auto specs = load_suite(config_path);
            BenchmarkTable table = run_suite(specs);
            if (sort) table.sort_by_value();
            emit(table, format_from_string(format), std::cout, emit_opts);
            for (const Row& r : table.rows) {
                if (r.conv != convergence::converged) std::cerr << r.problem << ": " << r.status << '\n';
            }
            return table.all_converged() ? kOk : kRunFailure;
        }
        if (*eigen_cmd) {
            print_eigen(moler_n);
            return kOk;
        }
        if (*verify_cmd) {
            VerifyOptions opts;
            if (broken_simplex) {
                opts.simplex_override = Projection{"simplex", [](const Vector& x) {
                                                       Vector y = x.cwiseMax(0.0);
                                                       return Vector(y / (y.sum() + 1.0));
                                                   }};
            }
            const auto results = verify(set_name, opts);
            print_verify_report(results, std::cout, !quiet);
            for (const auto& r : results) {
                if (!r.pass) return kRunFailure;
            }
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad number: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRunFailure;
    }
    return kUsage;
}
