#ifndef SUMSCALE_TYPES_HPP
#define SUMSCALE_TYPES_HPP

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sumscale {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;
using VectorMap = std::function<Vector(const Vector&)>;

/// Per-coordinate box. Both vectors have the dimension of the space they bound.
struct Bounds {
    Vector lower;
    Vector upper;

    static Bounds uniform(Index dim, double lo, double hi) {
        return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
    }
};

/// How raw parameters are brought to a comparable normal form.
enum class CanonicalMode { none, sum_scale, sphere_signed };

std::string to_string(CanonicalMode mode);
CanonicalMode canonical_mode_from_string(const std::string& name);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scale or norm that must be nonzero was zero.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Point lies outside the domain where a formula is defined.
class InfeasiblePoint : public Error {
public:
    using Error::Error;
};

/// An evaluation produced NaN or an infinity where a finite value was required.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

/// Bad argument shape, index or name.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Dense symmetric matrix stored in full, row-major.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(Index order);

    /// Builds from a full square array; throws InvalidArgument unless exactly symmetric.
    static SymmetricMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static SymmetricMatrix diagonal(const std::vector<double>& diag);
    static SymmetricMatrix identity(Index order);

    Index order() const noexcept { return order_; }
    double operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(i * order_ + j)]; }

    /// Writes both (i, j) and (j, i).
    void set(Index i, Index j, double value);

    Vector multiply(const Vector& x) const;
    double quadratic_form(const Vector& x) const;
    SymmetricMatrix negated() const;
    double max_abs() const;
    double trace() const;

private:
    Index order_ = 0;
    std::vector<double> data_;
};

}  // namespace sumscale

#endif  // SUMSCALE_TYPES_HPP
