#include "sumscale/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sumscale {
namespace {

class Dense {
public:
    explicit Dense(Index n) : n_(n), data_(static_cast<std::size_t>(n * n), 0.0) {}
    double& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i * n_ + j)]; }
    double operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(i * n_ + j)]; }

private:
    Index n_;
    std::vector<double> data_;
};

double off_diagonal_norm(const Dense& a, Index n) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i != j) s += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(const SymmetricMatrix& matrix, double tolerance, int max_sweeps) {
    const Index n = matrix.order();
    Dense a(n);
    Dense v(n);
    double frob = 0.0;
    for (Index i = 0; i < n; ++i) {
        v(i, i) = 1.0;
        for (Index j = 0; j < n; ++j) {
            a(i, j) = matrix(i, j);
            frob += a(i, j) * a(i, j);
        }
    }
    frob = std::sqrt(frob);

    EigenDecomposition out;
    bool done = false;
    for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
        if (off_diagonal_norm(a, n) <= tolerance * frob) {
            out.sweeps = sweep;
            done = true;
            break;
        }
        if (sweep == max_sweeps) break;
        int rotations = 0;
        for (Index p = 0; p < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Negligible against both diagonal entries: drop it.
                const double scaled = 100.0 * std::abs(apq);
                if (std::abs(a(p, p)) + scaled == std::abs(a(p, p)) && std::abs(a(q, q)) + scaled == std::abs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                ++rotations;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                            : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        if (rotations == 0) {
            out.sweeps = sweep + 1;
            done = true;
            break;
        }
    }
    if (!done) throw NonConvergence("jacobi_eigen: no convergence within the sweep limit");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return a(x, x) < a(y, y); });
    for (Index k : order) {
        out.values.push_back(a(k, k));
        Vector col(n);
        for (Index i = 0; i < n; ++i) col[i] = v(i, k);
        out.vectors.push_back(col.normalized());
    }
    return out;
}

double eigvec_error(const Vector& x, const Vector& v) {
    if (x.size() != v.size()) throw InvalidArgument("eigvec_error: length mismatch");
    const double nx = x.norm();
    const double nv = v.norm();
    if (nx == 0.0 || nv == 0.0) throw DegenerateInput("eigvec_error: zero vector");
    Vector xs = x / nx;
    const Vector vs = v / nv;
    if (xs.dot(vs) < 0.0) xs = -xs;
    return (xs - vs).cwiseAbs().maxCoeff();
}

}  // namespace sumscale
