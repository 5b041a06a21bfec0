#include "sumscale/projections.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace sumscale {

Vector project_unit_sum(const Vector& x) {
    const double s = x.sum();
    if (s == 0.0) throw DegenerateInput("project_unit_sum: zero sum");
    return x / s;
}

Vector project_simplex(const Vector& y) {
    const Index n = y.size();
    if (n == 0) return y;
    std::vector<double> sorted(y.data(), y.data() + n);
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Index k = 0; k < n; ++k) {
        cumsum += sorted[static_cast<std::size_t>(k)];
        const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (sorted[static_cast<std::size_t>(k)] > candidate) theta = candidate;
    }
    return (y.array() - theta).max(0.0).matrix();
}

Vector project_sphere_signed(const Vector& x) {
    const double norm = x.norm();
    if (norm == 0.0) throw DegenerateInput("project_sphere_signed: zero vector");
    double sign = 1.0;
    for (Index i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) {
            sign = x[i] > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    return (sign / norm) * x;
}

Vector project_sphere_unsigned(const Vector& x) {
    const double norm = x.norm();
    if (norm == 0.0) throw DegenerateInput("project_sphere_unsigned: zero vector");
    return x / norm;
}

Vector project_box(const Vector& x, const Vector& lower, const Vector& upper) {
    if (lower.size() != x.size() || upper.size() != x.size()) {
        throw InvalidArgument("project_box: bounds length mismatch");
    }
    if ((lower.array() > upper.array()).any()) throw InvalidArgument("project_box: lower exceeds upper");
    return x.cwiseMax(lower).cwiseMin(upper);
}

Projection box_projection(const Bounds& bounds) {
    if ((bounds.lower.array() > bounds.upper.array()).any()) {
        throw InvalidArgument("box projection: lower exceeds upper");
    }
    return {"box", [bounds](const Vector& x) { return project_box(x, bounds.lower, bounds.upper); }};
}

Projection projection_from_name(const std::string& name, const Bounds* bounds) {
    if (name == "unit-sum") return {name, project_unit_sum};
    if (name == "simplex") return {name, project_simplex};
    if (name == "sphere-signed") return {name, project_sphere_signed};
    if (name == "sphere") return {name, project_sphere_unsigned};
    if (name == "box") {
        if (!bounds) throw InvalidArgument("box projection requires bounds");
        return box_projection(*bounds);
    }
    throw InvalidArgument("unknown projection '" + name + "'");
}

std::vector<std::string> projection_names() { return {"unit-sum", "simplex", "sphere-signed", "sphere", "box"}; }

}  // namespace sumscale
