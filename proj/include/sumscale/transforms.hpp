#ifndef SUMSCALE_TRANSFORMS_HPP
#define SUMSCALE_TRANSFORMS_HPP

#include "sumscale/problems.hpp"
#include "sumscale/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sumscale {

using Pullback = std::function<Vector(const Vector& internal, const Vector& raw_gradient)>;

/// Parameter map from an internal space into a problem's parameter space.
///
/// `inverse` is a left inverse of `forward` used to carry starting points
/// inward; `canonicalize` acts on the outer (raw) side.
struct Reformulation {
    std::string name;
    Index internal_dim = 0;
    Index raw_dim = 0;
    VectorMap forward;
    Pullback pullback_gradient;
    VectorMap inverse;
    std::optional<Bounds> internal_bounds;
    VectorMap canonicalize;
    /// Comparison mode the map implies on the raw side, if it introduces one.
    std::optional<CanonicalMode> canonical_mode;
    /// For pure coordinate selections (identity, masks): raw index of each
    /// internal coordinate. Lets raw-side bounds carry over.
    std::vector<Index> kept_coordinates;
};

struct MaskSpec {
    std::vector<Index> fixed_indices;
    std::vector<double> fixed_values;
};

Reformulation identity_reformulation(Index n);
Reformulation leave_one_out(Index n);
Reformulation log_params(Index n);
/// Log parameters for the first n-1 coordinates, last one implied by the unit sum.
Reformulation log_leave_one_out(Index n);
/// Replaces x by x / sum(x) before it reaches the objective.
Reformulation scale_embed(Index n);
Reformulation spherical(Index n, bool angle_bounds = false);
Reformulation mask(Index n, const MaskSpec& spec);

/// outer(inner(.)); inner's raw side must match outer's internal side.
Reformulation compose(const Reformulation& outer, const Reformulation& inner);

/// Unit vector of length ax.size() + 1 from hyperspherical angles.
Vector spherical_to_cartesian(const Vector& ax);
/// Angles reproducing a nonzero vector's direction.
Vector cartesian_to_spherical(const Vector& z);

/// The problem seen through `reform`; reports re-inflate through `to_raw`.
Problem reformulate(const Problem& problem, const Reformulation& reform);
Problem apply_mask(const Problem& problem, const MaskSpec& spec);

Vector canonicalize(const Vector& raw, CanonicalMode mode);
/// Inf-norm distance after canonicalizing both vectors.
double canonical_error(const Vector& raw, const Vector& known, CanonicalMode mode);

/// Parses "name" or "a+b+c" chains (outermost first) for a problem of dimension n.
/// Names: identity|none, scale-embed, loo, log, log-loo, spherical,
/// spherical-bounded, mask:<idx>=<val>[,<idx>=<val>...].
Reformulation reformulation_from_name(const std::string& name, Index n);
MaskSpec parse_mask(const std::string& text);

}  // namespace sumscale

#endif  // SUMSCALE_TRANSFORMS_HPP
