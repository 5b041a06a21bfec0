#include "sumscale/types.hpp"

#include <cmath>

namespace sumscale {

std::string to_string(CanonicalMode mode) {
    switch (mode) {
        case CanonicalMode::none:
            return "none";
        case CanonicalMode::sum_scale:
            return "sum-scale";
        case CanonicalMode::sphere_signed:
            return "sphere-signed";
    }
    return "none";
}

CanonicalMode canonical_mode_from_string(const std::string& name) {
    if (name == "none") return CanonicalMode::none;
    if (name == "sum-scale") return CanonicalMode::sum_scale;
    if (name == "sphere-signed") return CanonicalMode::sphere_signed;
    throw InvalidArgument("unknown canonical mode '" + name + "'");
}

SymmetricMatrix::SymmetricMatrix(Index order)
    : order_(order), data_(static_cast<std::size_t>(order * order), 0.0) {
    if (order < 0) throw InvalidArgument("matrix order must be non-negative");
}

SymmetricMatrix SymmetricMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Index>(rows.size());
    SymmetricMatrix m(n);
    for (Index i = 0; i < n; ++i) {
        if (static_cast<Index>(rows[i].size()) != n) throw InvalidArgument("matrix rows must be square");
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (rows[i][j] != rows[j][i]) throw InvalidArgument("matrix is not symmetric");
            m.data_[static_cast<std::size_t>(i * n + j)] = rows[i][j];
        }
    }
    return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(const std::vector<double>& diag) {
    SymmetricMatrix m(static_cast<Index>(diag.size()));
    for (Index i = 0; i < m.order_; ++i) m.set(i, i, diag[static_cast<std::size_t>(i)]);
    return m;
}

SymmetricMatrix SymmetricMatrix::identity(Index order) {
    return diagonal(std::vector<double>(static_cast<std::size_t>(order), 1.0));
}

void SymmetricMatrix::set(Index i, Index j, double value) {
    data_[static_cast<std::size_t>(i * order_ + j)] = value;
    data_[static_cast<std::size_t>(j * order_ + i)] = value;
}

Vector SymmetricMatrix::multiply(const Vector& x) const {
    if (x.size() != order_) throw InvalidArgument("matrix-vector size mismatch");
    Vector y = Vector::Zero(order_);
    for (Index i = 0; i < order_; ++i) {
        double acc = 0.0;
        for (Index j = 0; j < order_; ++j) acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

double SymmetricMatrix::quadratic_form(const Vector& x) const { return x.dot(multiply(x)); }

SymmetricMatrix SymmetricMatrix::negated() const {
    SymmetricMatrix m = *this;
    for (auto& v : m.data_) v = -v;
    return m;
}

double SymmetricMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double SymmetricMatrix::trace() const {
    double t = 0.0;
    for (Index i = 0; i < order_; ++i) t += (*this)(i, i);
    return t;
}

}  // namespace sumscale
