#include "sumscale/harness.hpp"

#include "sumscale/oracle.hpp"
#include "sumscale/problems.hpp"
#include "sumscale/transforms.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace sumscale {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

void BenchmarkTable::sort_by_value() {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (std::isnan(a.value)) return false;
        if (std::isnan(b.value)) return true;
        return a.value < b.value;
    });
}

bool BenchmarkTable::all_converged() const {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.conv == convergence::converged; });
}

namespace {

const std::set<std::string> kMethods{"spg", "vm", "cg", "nm", "nelder-mead", "qp"};

bool is_simplex_problem(const std::string& name) {
    return name == "nllrv" || name == "rhelp-ssq" || name == "rhelp-ssq-scaled";
}

bool is_sphere_problem(const std::string& name) {
    return name == "rq-moler-max" || name == "rq-moler-min" || name == "rosbkext-ball";
}

std::string bounds_label(const std::optional<std::pair<double, double>>& b) {
    if (!b) return "";
    return format_scalar(b->first) + "," + format_scalar(b->second);
}

// Rayleigh problems get the reference eigenvector as their known solution.
void attach_oracle_solution(Problem& p, Index n) {
    if (p.name != "rq-moler-max" && p.name != "rq-moler-min") return;
    const EigenDecomposition eig = jacobi_eigen(moler_matrix(n));
    if (p.name == "rq-moler-max") {
        p.known_solution = eig.vectors.back();
        p.known_value = -eig.values.back();
    } else {
        p.known_solution = eig.vectors.front();
        p.known_value = eig.values.front();
    }
    p.canonical = CanonicalMode::sphere_signed;
}

Vector make_start(const RunSpec& spec, const Problem& p) {
    switch (spec.start.kind) {
        case StartSpec::Kind::default_start:
            return p.default_start;
        case StartSpec::Kind::explicit_vector:
            if (spec.start.values.size() != p.dim) {
                throw InvalidArgument("start has length " + std::to_string(spec.start.values.size()) +
                                      ", expected " + std::to_string(p.dim));
            }
            return spec.start.values;
        case StartSpec::Kind::seeded_uniform: {
            const double lo = spec.bounds ? spec.bounds->first : spec.start.lower;
            const double hi = spec.bounds ? spec.bounds->second : spec.start.upper;
            SplitMix64 rng(spec.start.seed);
            Vector x(p.dim);
            for (Index i = 0; i < p.dim; ++i) x[i] = lo + (hi - lo) * rng.uniform();
            return x;
        }
    }
    return p.default_start;
}

Row skeleton(const RunSpec& spec) {
    Row row;
    row.problem = spec.problem;
    row.n = spec.n;
    row.reformulation = spec.reformulation;
    row.method = spec.method;
    row.gradient = to_string(spec.gradient);
    row.bounds = bounds_label(spec.bounds);
    row.value = std::numeric_limits<double>::quiet_NaN();
    return row;
}

Projection pick_projection(const RunSpec& spec, const Problem& p, const RunContext& ctx) {
    const ProjectionResolver resolve =
        ctx.resolve_projection ? ctx.resolve_projection
                               : ProjectionResolver([](const std::string& name, const Bounds* b) {
                                     return projection_from_name(name, b);
                                 });
    const Bounds* b = p.bounds ? &*p.bounds : nullptr;
    std::string name = spec.projection;
    if (name.empty()) {
        const bool identity = spec.reformulation == "identity" || spec.reformulation == "none";
        if (identity && is_simplex_problem(spec.problem)) {
            name = "simplex";
        } else if (identity && is_sphere_problem(spec.problem)) {
            name = "sphere-signed";
        } else if (b) {
            name = "box";
        } else {
            name = "none";
        }
    }
    if (name == "none") return {"none", [](const Vector& x) { return x; }};
    return resolve(name, b);
}

Row run_qp(const RunSpec& spec, Row row) {
    if (spec.problem != "rhelp-ssq" && spec.problem != "rhelp-ssq-scaled") {
        throw InvalidArgument("method qp applies only to rhelp-ssq problems");
    }
    const Index n = spec.n;
    std::vector<double> w(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = static_cast<double>(i + 1);
    const auto t0 = std::chrono::steady_clock::now();
    const QpSolution qp =
        solve_eq_qp(SymmetricMatrix::diagonal(w), Vector::Zero(n), Eigen::MatrixXd::Ones(n, 1), Vector::Ones(1));
    row.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.parameters = qp.solution;
    row.raw = qp.solution;
    row.value = qp.problem_value;
    row.conv = convergence::converged;
    const Problem p = make_problem(spec.problem, n);
    if (p.known_solution) row.canonical_error = canonical_error(row.raw, *p.known_solution, p.canonical);
    std::ostringstream status;
    status.precision(17);
    status << "multiplier " << qp.multipliers[0] << ", kkt residual " << qp.kkt_residual;
    row.status = status.str();
    return row;
}

}  // namespace

void validate(const RunSpec& spec) {
    if (spec.n < 1) throw InvalidArgument("n must be positive");
    if (!kMethods.count(spec.method)) throw InvalidArgument("unknown method '" + spec.method + "'");
    const auto names = problem_names();
    if (std::find(names.begin(), names.end(), spec.problem) == names.end()) {
        throw InvalidArgument("unknown problem '" + spec.problem + "'");
    }
    if (spec.bounds && !(spec.bounds->first <= spec.bounds->second)) {
        throw InvalidArgument("bounds lower exceeds upper");
    }
    spec.config.validate();
}

Row run(const RunSpec& spec, const RunContext& context) {
    validate(spec);
    Row row = skeleton(spec);
    if (spec.method == "qp") return run_qp(spec, row);

    Problem base = make_problem(spec.problem, spec.n);
    attach_oracle_solution(base, spec.n);
    const Reformulation reform = reformulation_from_name(spec.reformulation, base.dim);
    Problem p = reformulate(base, reform);
    if (spec.bounds) p.bounds = Bounds::uniform(p.dim, spec.bounds->first, spec.bounds->second);

    SolverConfig cfg = spec.config;
    cfg.gradient_mode = spec.gradient;
    const Gradient grad = spec.gradient == GradientMode::analytic ? p.gradient : Gradient{};
    if (spec.gradient == GradientMode::analytic && !p.gradient && spec.method != "nm" &&
        spec.method != "nelder-mead") {
        row.status = "no analytic gradient; using central differences";
    }

    SolveReport rep;
    bool projected = false;
    try {
        const Vector x0 = make_start(spec, p);
        if (spec.method == "spg") {
            cfg.method = Method::spg;
            const Projection proj = pick_projection(spec, p, context);
            projected = proj.name != "none" && proj.name != "box";
            rep = spg(p.objective, grad, proj, x0, cfg);
        } else if (spec.method == "vm") {
            cfg.method = Method::vm;
            rep = vm(p.objective, grad, x0, cfg, p.bounds);
        } else if (spec.method == "cg") {
            cfg.method = Method::cg;
            rep = cg(p.objective, grad, x0, cfg, p.bounds);
        } else {
            cfg.method = Method::nelder_mead;
            rep = nelder_mead(p.objective, x0, cfg);
        }
    } catch (const InvalidArgument&) {
        throw;
    } catch (const std::exception& e) {
        row.conv = convergence::not_run;
        row.status = "Method  " + spec.method + "  failed: " + e.what();
        return row;
    }

    row.parameters = rep.parameters;
    row.value = rep.value;
    row.fevals = rep.fevals;
    row.gevals = rep.gevals;
    row.hevals = rep.hevals;
    row.conv = rep.convergence_code;
    row.time_s = rep.wall_time_seconds;
    if (row.status.empty()) row.status = rep.message;
    try {
        row.raw = p.raw(rep.parameters);
        if (p.known_solution) row.canonical_error = canonical_error(row.raw, *p.known_solution, p.canonical);
    } catch (const std::exception& e) {
        row.status += std::string("; no canonical error: ") + e.what();
    }

    const bool want_kkt = spec.compute_kkt.value_or(p.dim <= kKktMaxDim) && !projected;
    if (want_kkt && std::isfinite(rep.value)) {
        try {
            const KktResult k = kkt_check(p.objective, rep.parameters, grad, p.bounds);
            row.kkt1 = k.kkt1;
            row.kkt2 = k.kkt2;
        } catch (const std::exception&) {
            // left as NA
        }
    }
    return row;
}

Row run_contained(const RunSpec& spec, const RunContext& context) {
    try {
        return run(spec, context);
    } catch (const std::exception& e) {
        Row row = skeleton(spec);
        row.conv = convergence::not_run;
        row.status = "Method  " + spec.method + "  failed: " + e.what();
        return row;
    }
}

// ---- suite config --------------------------------------------------------

namespace {

using nlohmann::json;

int line_of(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Byte offsets of the objects inside the top-level "runs" array.
std::vector<std::size_t> run_offsets(const std::string& text) {
    std::vector<std::size_t> out;
    int depth = 0;
    bool in_runs = false;
    int runs_depth = -1;
    std::string last_key;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '"') {
            std::size_t j = i + 1;
            std::string s;
            while (j < text.size() && text[j] != '"') {
                if (text[j] == '\\') ++j;
                if (j < text.size()) s += text[j];
                ++j;
            }
            if (depth == 1) last_key = s;
            i = j;
            continue;
        }
        if (c == '{' || c == '[') {
            if (in_runs && depth == runs_depth && c == '{') out.push_back(i);
            ++depth;
            if (c == '[' && depth == 2 && last_key == "runs" && runs_depth < 0) {
                in_runs = true;
                runs_depth = 2;
            }
        } else if (c == '}' || c == ']') {
            --depth;
            if (in_runs && depth < runs_depth) in_runs = false;
        }
    }
    return out;
}

double number_of(const json& v, const char* key) {
    if (!v.is_number()) throw InvalidArgument(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

long integer_of(const json& v, const char* key) {
    if (!v.is_number_integer()) throw InvalidArgument(std::string("'") + key + "' must be an integer");
    return v.get<long>();
}

std::string string_of(const json& v, const char* key) {
    if (!v.is_string()) throw InvalidArgument(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

std::pair<double, double> pair_of(const json& v, const char* key) {
    if (!v.is_array() || v.size() != 2) throw InvalidArgument(std::string("'") + key + "' must be [lo, hi]");
    return {number_of(v[0], key), number_of(v[1], key)};
}

RunSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw InvalidArgument("run entry must be an object");
    RunSpec spec;
    bool have_problem = false;
    bool have_n = false;
    bool have_method = false;
    for (const auto& [key, v] : j.items()) {
        if (key == "problem") {
            spec.problem = string_of(v, "problem");
            have_problem = true;
        } else if (key == "n") {
            spec.n = integer_of(v, "n");
            have_n = true;
        } else if (key == "reform" || key == "reformulation") {
            spec.reformulation = string_of(v, "reform");
        } else if (key == "method") {
            spec.method = string_of(v, "method");
            have_method = true;
        } else if (key == "gradient") {
            spec.gradient = gradient_mode_from_string(string_of(v, "gradient"));
        } else if (key == "bounds") {
            if (!v.is_null()) spec.bounds = pair_of(v, "bounds");
        } else if (key == "projection") {
            spec.projection = string_of(v, "projection");
        } else if (key == "seed") {
            spec.start.kind = StartSpec::Kind::seeded_uniform;
            const long s = integer_of(v, "seed");
            spec.start.seed = static_cast<std::uint64_t>(s);
        } else if (key == "start") {
            if (v.is_string() && v.get<std::string>() == "default") continue;
            if (!v.is_array()) throw InvalidArgument("'start' must be \"default\" or an array");
            spec.start.kind = StartSpec::Kind::explicit_vector;
            spec.start.values.resize(static_cast<Index>(v.size()));
            for (std::size_t i = 0; i < v.size(); ++i) spec.start.values[static_cast<Index>(i)] = number_of(v[i], "start");
        } else if (key == "start_range") {
            const auto r = pair_of(v, "start_range");
            spec.start.lower = r.first;
            spec.start.upper = r.second;
        } else if (key == "maxit") {
            spec.config.max_iterations = static_cast<int>(integer_of(v, "maxit"));
        } else if (key == "maxfeval") {
            spec.config.max_function_evals = integer_of(v, "maxfeval");
        } else if (key == "ftol") {
            spec.config.f_tolerance = number_of(v, "ftol");
        } else if (key == "gtol") {
            spec.config.g_tolerance = number_of(v, "gtol");
        } else if (key == "memory") {
            spec.config.step_memory = static_cast<int>(integer_of(v, "memory"));
        } else if (key == "kkt") {
            if (!v.is_boolean()) throw InvalidArgument("'kkt' must be true or false");
            spec.compute_kkt = v.get<bool>();
        } else {
            throw InvalidArgument("unknown key '" + key + "'");
        }
    }
    if (!have_problem) throw InvalidArgument("missing 'problem'");
    if (!have_n) throw InvalidArgument("missing 'n'");
    if (!have_method) throw InvalidArgument("missing 'method'");
    if (spec.n < 1) throw InvalidArgument("'n' must be positive");
    return spec;
}

}  // namespace

std::vector<RunSpec> parse_suite(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw ConfigError("line " + std::to_string(line_of(text, at)) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("line 1: config must be a JSON object");
    if (!doc.contains("runs")) throw ConfigError("line 1: missing top-level \"runs\" array");
    const json& runs = doc["runs"];
    if (!runs.is_array()) throw ConfigError("line 1: \"runs\" must be an array");
    const std::vector<std::size_t> offsets = run_offsets(text);
    std::vector<RunSpec> specs;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        try {
            specs.push_back(spec_from_json(runs[i]));
        } catch (const std::exception& e) {
            const int line = i < offsets.size() ? line_of(text, offsets[i]) : 1;
            throw ConfigError("line " + std::to_string(line) + ": runs[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return specs;
}

std::vector<RunSpec> load_suite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_suite(ss.str());
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SUMSCALE_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

BenchmarkTable run_suite(const std::vector<RunSpec>& specs, const RunContext& context, unsigned workers) {
    BenchmarkTable table;
    table.rows.resize(specs.size());
    if (specs.empty()) return table;
    if (workers == 0) workers = worker_count();
    workers = std::min<unsigned>(workers, static_cast<unsigned>(specs.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) table.rows[i] = run_contained(specs[i], context);
    };
    if (workers <= 1) {
        work();
        return table;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return table;
}

// ---- emit ----------------------------------------------------------------

Format format_from_string(const std::string& name) {
    if (name == "csv") return Format::csv;
    if (name == "markdown" || name == "md") return Format::markdown;
    if (name == "json") return Format::json;
    throw InvalidArgument("unknown format '" + name + "'");
}

namespace {

std::string render_number(double v, int digits) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string render_flag(const std::optional<bool>& b) {
    if (!b) return "NA";
    return *b ? "TRUE" : "FALSE";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> cells(const Row& r, const EmitOptions& opt) {
    return {r.problem,
            std::to_string(r.n),
            r.reformulation,
            r.method,
            r.gradient,
            r.bounds,
            format_scalar(r.value),
            std::to_string(r.fevals),
            std::to_string(r.gevals),
            std::to_string(r.hevals),
            std::to_string(r.conv),
            render_flag(r.kkt1),
            render_flag(r.kkt2),
            format_scalar(opt.include_time ? r.time_s : 0.0),
            r.canonical_error ? format_scalar(*r.canonical_error) : "NA"};
}

const std::vector<std::string> kColumns{"problem", "n",    "reformulation", "method", "gradient",
                                         "bounds",  "value", "fevals",       "gevals", "hevals",
                                         "conv",    "kkt1",  "kkt2",         "time_s", "canonical_error"};

std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    return render_number(v, 17);
}

std::string json_vector(const Vector& v) {
    std::string out = "[";
    for (Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += json_number(v[i]);
    }
    return out + "]";
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_flag(const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : "null"; }

}  // namespace

std::string format_scalar(double v) { return render_number(v, 7); }

void emit(const BenchmarkTable& table, Format format, std::ostream& out, const EmitOptions& options) {
    switch (format) {
        case Format::csv: {
            for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
            out << '\n';
            for (const Row& r : table.rows) {
                const auto c = cells(r, options);
                for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << csv_field(c[i]);
                out << '\n';
            }
            break;
        }
        case Format::markdown: {
            out << '|';
            for (const auto& c : kColumns) out << ' ' << c << " |";
            out << " status |\n|";
            for (std::size_t i = 0; i <= kColumns.size(); ++i) out << "---|";
            out << '\n';
            for (const Row& r : table.rows) {
                out << '|';
                for (const auto& c : cells(r, options)) out << ' ' << c << " |";
                std::string status = r.status;
                std::replace(status.begin(), status.end(), '|', '/');
                out << ' ' << status << " |\n";
            }
            break;
        }
        case Format::json: {
            out << "{\n  \"rows\": [";
            for (std::size_t k = 0; k < table.rows.size(); ++k) {
                const Row& r = table.rows[k];
                out << (k ? ",\n" : "\n") << "    {";
                out << "\"problem\": " << json_string(r.problem) << ", \"n\": " << r.n
                    << ", \"reformulation\": " << json_string(r.reformulation)
                    << ", \"method\": " << json_string(r.method) << ", \"gradient\": " << json_string(r.gradient)
                    << ", \"bounds\": " << json_string(r.bounds) << ", \"value\": " << json_number(r.value)
                    << ", \"fevals\": " << r.fevals << ", \"gevals\": " << r.gevals << ", \"hevals\": " << r.hevals
                    << ", \"conv\": " << r.conv << ", \"kkt1\": " << json_flag(r.kkt1)
                    << ", \"kkt2\": " << json_flag(r.kkt2)
                    << ", \"time_s\": " << json_number(options.include_time ? r.time_s : 0.0)
                    << ", \"canonical_error\": " << (r.canonical_error ? json_number(*r.canonical_error) : "null")
                    << ", \"status\": " << json_string(r.status) << ", \"parameters\": " << json_vector(r.parameters)
                    << ", \"raw\": " << json_vector(r.raw) << "}";
            }
            out << (table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
            break;
        }
    }
}

std::string emit(const BenchmarkTable& table, Format format, const EmitOptions& options) {
    std::ostringstream out;
    emit(table, format, out, options);
    return out.str();
}

}  // namespace sumscale
