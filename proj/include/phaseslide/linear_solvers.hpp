#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace phaseslide {

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    std::vector<double> history;
};

/// Preconditioned conjugate gradients for an operator that is self-adjoint and
/// positive definite with respect to `dot`. `x` holds the initial guess on entry.
template <class Apply, class Precond, class Dot>
CgResult pcg(Apply&& apply, Precond&& precond, std::span<const double> b, std::vector<double>& x,
             Dot&& dot, double rtol, int max_iter) {
    const std::size_t n = b.size();
    CgResult res;
    std::vector<double> r(n), z(n), p(n), ap(n);
    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }
    double rnorm = std::sqrt(dot(r, r));
    res.history.push_back(rnorm / bnorm);
    if (rnorm <= rtol * bnorm) {
        res.converged = true;
        res.relative_residual = rnorm / bnorm;
        return res;
    }
    precond(r, z);
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        apply(p, ap);
        const double alpha = rz / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rnorm = std::sqrt(dot(r, r));
        res.iterations = it;
        res.history.push_back(rnorm / bnorm);
        if (rnorm <= rtol * bnorm) {
            res.converged = true;
            break;
        }
        precond(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    res.relative_residual = rnorm / bnorm;
    return res;
}

/// Thomas algorithm. lower[0] and upper[n-1] are ignored. No pivoting: the
/// callers only pass diagonally dominant systems.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

} // namespace phaseslide
