#ifndef SUMSCALE_PROJECTIONS_HPP
#define SUMSCALE_PROJECTIONS_HPP

#include "sumscale/types.hpp"

#include <string>
#include <vector>

namespace sumscale {

/// Idempotent map onto a feasible set.
struct Projection {
    std::string name;
    VectorMap apply;

    Vector operator()(const Vector& x) const { return apply(x); }
};

/// x / sum(x).
Vector project_unit_sum(const Vector& x);

/// Euclidean projection onto {x : x >= 0, sum(x) = 1}.
///
/// Sort descending, find the last index rho with
/// sorted[rho] > (cumsum[rho] - 1) / (rho + 1), shift by
/// theta = (cumsum[rho] - 1) / (rho + 1) and clip at zero. Ties in the sort
/// cannot change theta.
Vector project_simplex(const Vector& y);

/// x / ||x|| with the sign chosen so the first nonzero component is positive.
Vector project_sphere_signed(const Vector& x);
Vector project_sphere_unsigned(const Vector& x);
Vector project_box(const Vector& x, const Vector& lower, const Vector& upper);

/// Named projection: "unit-sum", "simplex", "sphere-signed", "sphere", or "box"
/// (the latter needs bounds).
Projection projection_from_name(const std::string& name, const Bounds* bounds = nullptr);
Projection box_projection(const Bounds& bounds);
std::vector<std::string> projection_names();

}  // namespace sumscale

#endif  // SUMSCALE_PROJECTIONS_HPP
