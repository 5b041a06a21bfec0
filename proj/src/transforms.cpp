#include "sumscale/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sumscale {
namespace {

Vector identity_map(const Vector& x) { return x; }

Vector sum_scaled(const Vector& x) {
    const double s = x.sum();
    if (s == 0.0) throw DegenerateInput("sum-scale canonicalization of a zero-sum vector");
    return x / s;
}

Vector sphere_signed(const Vector& x) {
    const double norm = x.norm();
    if (norm == 0.0) throw DegenerateInput("sphere canonicalization of the zero vector");
    double sign = 1.0;
    for (Index i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) {
            sign = x[i] > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    return sign * x / norm;
}

std::vector<Index> iota(Index n) {
    std::vector<Index> out(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
}

void require_dim(Index n, Index minimum, const char* what) {
    if (n < minimum) {
        throw InvalidArgument(std::string(what) + ": dimension must be at least " + std::to_string(minimum));
    }
}

void require_size(const Vector& v, Index n, const char* what) {
    if (v.size() != n) {
        throw InvalidArgument(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                              std::to_string(v.size()));
    }
}

Vector positive_log(const Vector& x, const char* what) {
    if ((x.array() <= 0.0).any()) throw InvalidArgument(std::string(what) + ": log of a non-positive start");
    return x.array().log().matrix();
}

}  // namespace

Reformulation identity_reformulation(Index n) {
    Reformulation r;
    r.name = "identity";
    r.internal_dim = n;
    r.raw_dim = n;
    r.forward = identity_map;
    r.pullback_gradient = [](const Vector&, const Vector& g) { return g; };
    r.inverse = identity_map;
    r.canonicalize = identity_map;
    r.kept_coordinates = iota(n);
    return r;
}

Reformulation leave_one_out(Index n) {
    require_dim(n, 2, "leave_one_out");
    Reformulation r;
    r.name = "loo";
    r.internal_dim = n - 1;
    r.raw_dim = n;
    r.forward = [n](const Vector& y) -> Vector {
        require_size(y, n - 1, "leave_one_out");
        Vector x(n);
        x.head(n - 1) = y;
        x[n - 1] = 1.0 - y.sum();
        return x;
    };
    r.pullback_gradient = [n](const Vector&, const Vector& g) -> Vector {
        return (g.head(n - 1).array() - g[n - 1]).matrix();
    };
    r.inverse = [n](const Vector& x) -> Vector { return x.head(n - 1); };
    r.canonicalize = identity_map;
    return r;
}

Reformulation log_params(Index n) {
    require_dim(n, 1, "log_params");
    Reformulation r;
    r.name = "log";
    r.internal_dim = n;
    r.raw_dim = n;
    r.forward = [](const Vector& lx) -> Vector { return lx.array().exp().matrix(); };
    r.pullback_gradient = [](const Vector& lx, const Vector& g) -> Vector {
        return (g.array() * lx.array().exp()).matrix();
    };
    r.inverse = [](const Vector& x) { return positive_log(x, "log_params"); };
    r.canonicalize = sum_scaled;
    r.canonical_mode = CanonicalMode::sum_scale;
    return r;
}

Reformulation log_leave_one_out(Index n) {
    require_dim(n, 2, "log_leave_one_out");
    Reformulation r;
    r.name = "log-loo";
    r.internal_dim = n - 1;
    r.raw_dim = n;
    r.forward = [n](const Vector& lx) -> Vector {
        require_size(lx, n - 1, "log_leave_one_out");
        Vector x(n);
        x.head(n - 1) = lx.array().exp().matrix();
        x[n - 1] = 1.0 - x.head(n - 1).sum();
        return x;
    };
    r.pullback_gradient = [n](const Vector& lx, const Vector& g) -> Vector {
        return ((g.head(n - 1).array() - g[n - 1]) * lx.array().exp()).matrix();
    };
    r.inverse = [n](const Vector& x) { return positive_log(x.head(n - 1), "log_leave_one_out"); };
    r.canonicalize = sum_scaled;
    r.canonical_mode = CanonicalMode::sum_scale;
    return r;
}

Reformulation scale_embed(Index n) {
    require_dim(n, 1, "scale_embed");
    Reformulation r;
    r.name = "scale-embed";
    r.internal_dim = n;
    r.raw_dim = n;
    r.forward = sum_scaled;
    // d(x_i/s)/dx_j = delta_ij/s - x_i/s^2
    r.pullback_gradient = [](const Vector& x, const Vector& g) -> Vector {
        const double s = x.sum();
        if (s == 0.0) throw DegenerateInput("scale_embed pullback at a zero-sum point");
        return ((g.array() - g.dot(x) / s) / s).matrix();
    };
    r.inverse = identity_map;
    r.canonicalize = sum_scaled;
    r.canonical_mode = CanonicalMode::sum_scale;
    return r;
}

Vector spherical_to_cartesian(const Vector& ax) {
    if (ax.size() < 1) throw InvalidArgument("spherical_to_cartesian: need at least one angle");
    const Index n = ax.size() + 1;
    Vector z(n);
    z[0] = std::cos(ax[0]);
    double sines = 1.0;
    for (Index k = 1; k + 1 < n; ++k) {
        sines *= std::sin(ax[k - 1]);
        z[k] = sines * std::cos(ax[k]);
    }
    z[n - 1] = ax.array().sin().prod();
    return z;
}

Vector cartesian_to_spherical(const Vector& z) {
    if (z.size() < 2) throw InvalidArgument("cartesian_to_spherical: need at least two coordinates");
    if (z.norm() == 0.0) throw DegenerateInput("cartesian_to_spherical: zero vector");
    const Index n = z.size();
    Vector ax(n - 1);
    for (Index k = 0; k + 2 < n; ++k) ax[k] = std::atan2(z.tail(n - k - 1).norm(), z[k]);
    ax[n - 2] = std::atan2(z[n - 1], z[n - 2]);
    return ax;
}

Reformulation spherical(Index n, bool angle_bounds) {
    require_dim(n, 2, "spherical");
    Reformulation r;
    r.name = angle_bounds ? "spherical-bounded" : "spherical";
    r.internal_dim = n - 1;
    r.raw_dim = n;
    r.forward = spherical_to_cartesian;
    // J' g with J from central differences of the angle map.
    r.pullback_gradient = [](const Vector& ax, const Vector& g) -> Vector {
        Vector out(ax.size());
        Vector probe = ax;
        for (Index j = 0; j < ax.size(); ++j) {
            const double h = 1e-6 * (1.0 + std::abs(ax[j]));
            probe[j] = ax[j] + h;
            const Vector up = spherical_to_cartesian(probe);
            probe[j] = ax[j] - h;
            const Vector down = spherical_to_cartesian(probe);
            probe[j] = ax[j];
            out[j] = g.dot(up - down) / (2.0 * h);
        }
        return out;
    };
    r.inverse = cartesian_to_spherical;
    if (angle_bounds) r.internal_bounds = Bounds::uniform(n - 1, -std::numbers::pi, std::numbers::pi);
    r.canonicalize = sphere_signed;
    r.canonical_mode = CanonicalMode::sphere_signed;
    return r;
}

Reformulation mask(Index n, const MaskSpec& spec) {
    if (spec.fixed_indices.size() != spec.fixed_values.size()) {
        throw InvalidArgument("mask: indices and values differ in length");
    }
    std::vector<bool> fixed(static_cast<std::size_t>(n), false);
    Vector values = Vector::Zero(n);
    for (std::size_t k = 0; k < spec.fixed_indices.size(); ++k) {
        const Index idx = spec.fixed_indices[k];
        if (idx < 0 || idx >= n) {
            throw InvalidArgument("mask: index " + std::to_string(idx) + " out of range for dimension " +
                                  std::to_string(n));
        }
        if (fixed[static_cast<std::size_t>(idx)]) throw InvalidArgument("mask: duplicate index");
        fixed[static_cast<std::size_t>(idx)] = true;
        values[idx] = spec.fixed_values[k];
    }
    std::vector<Index> free;
    for (Index i = 0; i < n; ++i) {
        if (!fixed[static_cast<std::size_t>(i)]) free.push_back(i);
    }
    const auto m = static_cast<Index>(free.size());

    std::ostringstream name;
    name << "mask:";
    for (std::size_t k = 0; k < spec.fixed_indices.size(); ++k) {
        if (k) name << ',';
        name << spec.fixed_indices[k] << '=' << spec.fixed_values[k];
    }

    Reformulation r;
    r.name = name.str();
    r.internal_dim = m;
    r.raw_dim = n;
    r.forward = [values, free, m](const Vector& z) -> Vector {
        require_size(z, m, "mask");
        Vector x = values;
        for (Index k = 0; k < m; ++k) x[free[static_cast<std::size_t>(k)]] = z[k];
        return x;
    };
    r.pullback_gradient = [free, m](const Vector&, const Vector& g) -> Vector {
        Vector out(m);
        for (Index k = 0; k < m; ++k) out[k] = g[free[static_cast<std::size_t>(k)]];
        return out;
    };
    r.inverse = [free, m](const Vector& x) -> Vector {
        Vector out(m);
        for (Index k = 0; k < m; ++k) out[k] = x[free[static_cast<std::size_t>(k)]];
        return out;
    };
    r.canonicalize = identity_map;
    r.kept_coordinates = free;
    return r;
}

Reformulation compose(const Reformulation& outer, const Reformulation& inner) {
    if (inner.raw_dim != outer.internal_dim) {
        throw InvalidArgument("compose: '" + inner.name + "' produces " + std::to_string(inner.raw_dim) +
                              " parameters but '" + outer.name + "' expects " +
                              std::to_string(outer.internal_dim));
    }
    Reformulation r;
    r.name = outer.name + "+" + inner.name;
    r.internal_dim = inner.internal_dim;
    r.raw_dim = outer.raw_dim;
    r.forward = [outer, inner](const Vector& z) { return outer.forward(inner.forward(z)); };
    r.pullback_gradient = [outer, inner](const Vector& z, const Vector& g) {
        return inner.pullback_gradient(z, outer.pullback_gradient(inner.forward(z), g));
    };
    r.inverse = [outer, inner](const Vector& x) { return inner.inverse(outer.inverse(x)); };
    r.internal_bounds = inner.internal_bounds;
    r.canonicalize = outer.canonicalize;
    r.canonical_mode = outer.canonical_mode ? outer.canonical_mode : inner.canonical_mode;
    if (!inner.kept_coordinates.empty() && !outer.kept_coordinates.empty()) {
        for (Index k : inner.kept_coordinates) {
            r.kept_coordinates.push_back(outer.kept_coordinates[static_cast<std::size_t>(k)]);
        }
    }
    return r;
}

Problem reformulate(const Problem& problem, const Reformulation& reform) {
    if (reform.raw_dim != problem.dim) {
        throw InvalidArgument("reformulation '" + reform.name + "' expects dimension " +
                              std::to_string(reform.raw_dim) + " but problem '" + problem.name + "' has " +
                              std::to_string(problem.dim));
    }
    Problem p;
    p.name = problem.name;
    p.dim = reform.internal_dim;
    const auto f = problem.objective;
    const auto forward = reform.forward;
    p.objective = [f, forward](const Vector& z) { return f(forward(z)); };
    if (problem.gradient) {
        const auto g = problem.gradient;
        const auto pullback = reform.pullback_gradient;
        p.gradient = [g, forward, pullback](const Vector& z) { return pullback(z, g(forward(z))); };
    }
    if (reform.internal_bounds) {
        p.bounds = reform.internal_bounds;
    } else if (problem.bounds && !reform.kept_coordinates.empty()) {
        Bounds b{Vector(p.dim), Vector(p.dim)};
        for (Index k = 0; k < p.dim; ++k) {
            const Index src = reform.kept_coordinates[static_cast<std::size_t>(k)];
            b.lower[k] = problem.bounds->lower[src];
            b.upper[k] = problem.bounds->upper[src];
        }
        p.bounds = b;
    }
    p.known_solution = problem.known_solution;
    p.known_value = problem.known_value;
    p.default_start = reform.inverse(problem.default_start);
    if (problem.to_raw) {
        const auto to_raw = problem.to_raw;
        p.to_raw = [to_raw, forward](const Vector& z) { return to_raw(forward(z)); };
    } else {
        p.to_raw = forward;
    }
    p.canonical = reform.canonical_mode.value_or(problem.canonical);
    if (problem.canonical != CanonicalMode::none && p.canonical == CanonicalMode::none) {
        p.canonical = problem.canonical;
    }
    return p;
}

Problem apply_mask(const Problem& problem, const MaskSpec& spec) {
    return reformulate(problem, mask(problem.dim, spec));
}

Vector canonicalize(const Vector& raw, CanonicalMode mode) {
    switch (mode) {
        case CanonicalMode::sum_scale:
            return sum_scaled(raw);
        case CanonicalMode::sphere_signed:
            return sphere_signed(raw);
        case CanonicalMode::none:
            break;
    }
    return raw;
}

double canonical_error(const Vector& raw, const Vector& known, CanonicalMode mode) {
    if (raw.size() != known.size()) {
        throw InvalidArgument("canonical_error: length mismatch (" + std::to_string(raw.size()) + " vs " +
                              std::to_string(known.size()) + ")");
    }
    if (raw.size() == 0) return 0.0;
    return (canonicalize(raw, mode) - canonicalize(known, mode)).cwiseAbs().maxCoeff();
}

MaskSpec parse_mask(const std::string& text) {
    // "<idx>=<val>[,<idx>=<val>...]"; idx may be "last" (resolved by caller as -1)
    MaskSpec spec;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidArgument("mask entry '" + item + "' lacks '='");
        const std::string idx = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        try {
            spec.fixed_indices.push_back(idx == "last" ? Index{-1} : static_cast<Index>(std::stoll(idx)));
            std::size_t used = 0;
            spec.fixed_values.push_back(std::stod(val, &used));
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::logic_error&) {
            throw InvalidArgument("mask entry '" + item + "' is not <index>=<value>");
        }
    }
    if (spec.fixed_indices.empty()) throw InvalidArgument("empty mask");
    return spec;
}

namespace {

Reformulation single_reformulation(const std::string& token, Index n) {
    if (token == "identity" || token == "none") return identity_reformulation(n);
    if (token == "scale-embed") return scale_embed(n);
    if (token == "loo") return leave_one_out(n);
    if (token == "log") return log_params(n);
    if (token == "log-loo") return log_leave_one_out(n);
    if (token == "spherical") return spherical(n, false);
    if (token == "spherical-bounded") return spherical(n, true);
    if (token.rfind("mask:", 0) == 0) {
        MaskSpec spec = parse_mask(token.substr(5));
        for (auto& idx : spec.fixed_indices) {
            if (idx == -1) idx = n - 1;
        }
        return mask(n, spec);
    }
    throw InvalidArgument("unknown reformulation '" + token + "'");
}

}  // namespace

Reformulation reformulation_from_name(const std::string& name, Index n) {
    std::stringstream ss(name);
    std::string token;
    std::optional<Reformulation> chain;
    while (std::getline(ss, token, '+')) {
        const Index dim = chain ? chain->internal_dim : n;
        Reformulation next = single_reformulation(token, dim);
        chain = chain ? compose(*chain, next) : next;
    }
    if (!chain) throw InvalidArgument("empty reformulation name");
    return *chain;
}

}  // namespace sumscale
