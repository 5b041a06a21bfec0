#ifndef SUMSCALE_HARNESS_HPP
#define SUMSCALE_HARNESS_HPP

#include "sumscale/projections.hpp"
#include "sumscale/solvers.hpp"
#include "sumscale/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sumscale {

/// SplitMix64. Seeded starts draw from this so ports can replicate them.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform on [0, 1) from the top 53 bits.
    double uniform();

private:
    std::uint64_t state_;
};

struct StartSpec {
    enum class Kind { default_start, explicit_vector, seeded_uniform };
    Kind kind = Kind::default_start;
    Vector values;
    std::uint64_t seed = 0;
    double lower = 0.0;  // seeded_uniform range
    double upper = 1.0;
};

struct RunSpec {
    std::string problem;
    Index n = 0;
    std::string reformulation = "identity";
    std::string method = "vm";
    GradientMode gradient = GradientMode::analytic;
    std::optional<std::pair<double, double>> bounds;
    std::string projection;  // spg only; empty picks the problem's natural one
    SolverConfig config;     // method and gradient_mode are taken from the fields above
    StartSpec start;
    std::optional<bool> compute_kkt;  // unset: only for internal dim <= kKktMaxDim
};

inline constexpr Index kKktMaxDim = 300;

struct Row {
    std::string problem;
    Index n = 0;
    std::string reformulation;
    std::string method;
    std::string gradient;
    std::string bounds;  // "lo,hi" or empty
    Vector parameters;   // internal space
    Vector raw;          // problem raw space
    double value = 0.0;
    long fevals = 0;
    long gevals = 0;
    long hevals = 0;
    int conv = convergence::not_run;
    std::optional<bool> kkt1;
    std::optional<bool> kkt2;
    double time_s = 0.0;
    std::optional<double> canonical_error;
    std::string status;
};

struct BenchmarkTable {
    std::vector<Row> rows;

    /// Stable ascending sort by value; failed rows keep their values.
    void sort_by_value();
    bool all_converged() const;
};

/// Resolves projection names for spg runs. Replaceable so a test can swap in a
/// faulty projection.
using ProjectionResolver = std::function<Projection(const std::string& name, const Bounds* bounds)>;

struct RunContext {
    ProjectionResolver resolve_projection;  // empty: projection_from_name
};

/// Validates names and lengths; throws InvalidArgument.
void validate(const RunSpec& spec);

/// Executes one run. Solver failures become rows with conv != 0 and a status
/// line; only unresolvable names throw (InvalidArgument).
Row run(const RunSpec& spec, const RunContext& context = {});

/// Like run, but an invalid RunSpec also becomes an error row.
Row run_contained(const RunSpec& spec, const RunContext& context = {});

/// Parses {"runs": [...]}. Throws ConfigError with a line number.
class ConfigError : public Error {
public:
    using Error::Error;
};
std::vector<RunSpec> parse_suite(const std::string& text);
std::vector<RunSpec> load_suite(const std::string& path);

/// Worker count: min(hardware threads, SUMSCALE_THREADS if set), at least 1.
unsigned worker_count();

/// Rows come back in input order whatever the completion order.
BenchmarkTable run_suite(const std::vector<RunSpec>& specs, const RunContext& context = {}, unsigned workers = 0);

enum class Format { csv, markdown, json };
Format format_from_string(const std::string& name);

struct EmitOptions {
    bool include_time = true;  // false renders time_s as 0 for byte-stable output
};

void emit(const BenchmarkTable& table, Format format, std::ostream& out, const EmitOptions& options = {});
std::string emit(const BenchmarkTable& table, Format format, const EmitOptions& options = {});

/// 7 significant digits, the table precision.
std::string format_scalar(double v);

// ---- verification ------------------------------------------------------

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    bool uses_simplex = false;
    std::vector<std::string> details;  // measured vs expected
};

struct VerifyOptions {
    /// Replaces project_simplex everywhere the checks use it.
    std::optional<Projection> simplex_override;
};

/// Runs the named check set ("paper"). Throws InvalidArgument on unknown names.
std::vector<CriterionResult> verify(const std::string& set, const VerifyOptions& options = {});
std::vector<std::string> verify_set_names();

/// One "PASS|FAIL [id] title" line per criterion, details indented beneath.
void print_verify_report(const std::vector<CriterionResult>& results, std::ostream& out, bool with_details = true);

}  // namespace sumscale

#endif  // SUMSCALE_HARNESS_HPP
