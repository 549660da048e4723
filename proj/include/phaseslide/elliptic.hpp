#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phaseslide/core.hpp"

namespace phaseslide {

enum class BoundaryKind { neumann, dirichlet };

/// Second-order discrete -Laplacian (3-point in 1D, 5-point in 2D).
///
/// Neumann: homogeneous, via mirrored ghost nodes; annihilates constants and is
/// self-adjoint for the trapezoid inner product. Dirichlet: output vanishes on
/// boundary nodes, interior rows read the stored boundary values.
class LaplacianOperator {
public:
    LaplacianOperator(const Grid& grid, BoundaryKind kind) : grid_(grid), kind_(kind) {}

    const Grid& grid() const noexcept { return grid_; }
    BoundaryKind kind() const noexcept { return kind_; }

    void apply(std::span<const double> in, std::span<double> out) const;
    ScalarField apply(const ScalarField& f) const;
    /// Diagonal entry of row `idx`.
    double diagonal(std::size_t idx) const;

private:
    Grid grid_;
    BoundaryKind kind_;
};

/// -Delta_h f for the given operator.
ScalarField apply_laplacian(const LaplacianOperator& op, const ScalarField& f);

/// u with -Delta_h u = f on interior nodes and u = 0 on the boundary.
/// Boundary values of f are ignored.
ScalarField solve_dirichlet(const Grid& grid, const ScalarField& f);
void solve_dirichlet(const Grid& grid, std::span<const double> f, std::span<double> u);

/// Integral of |grad u|^2 with edge differences. Matches <u, -Delta_h u> exactly
/// for the Neumann operator, and for the Dirichlet one when u vanishes on the boundary.
double gradient_energy(const ScalarField& u);

/// Discrete H^-1 norm ||grad D f||.
double hminus1_norm(const Grid& grid, const ScalarField& f);

/// Boundary data mu_Gamma(t, node): a constant, or a(t) * b(node) with a tabulated
/// in time (piecewise linear, held constant outside the table) and b tabulated on
/// the boundary nodes in increasing index order.
struct BoundaryData {
    enum class Kind { constant, separable };
    Kind kind = Kind::constant;
    double value = 0.0;
    std::vector<double> times;
    std::vector<double> amplitude;
    std::vector<double> profile;

    static BoundaryData constant(double c) { return BoundaryData{Kind::constant, c, {}, {}, {}}; }

    double amplitude_at(double t) const;
    std::vector<double> values(const Grid& grid, double t) const;
    /// Supremum over all tabulated samples.
    double sup_norm() const;
    void validate(const Grid& grid) const;

    bool operator==(const BoundaryData&) const = default;
};

/// Discrete harmonic function with the given boundary values (one per boundary node).
ScalarField harmonic_extension(const Grid& grid, std::span<const double> boundary_values);
ScalarField harmonic_extension(const Grid& grid, const BoundaryData& data, double t);

struct EmbeddingCandidate {
    ScalarField field;
    /// Dirichlet candidates are scored against the pure-Laplacian inequality.
    bool dirichlet = false;
};

struct EmbeddingOptions {
    int max_frequency = 4;
    int random_count = 1000;
    std::uint64_t seed = 20180611;
};

/// ||v||_inf / (|Omega|^{-1/2} ||v|| + |Omega|^{1/6} ||Delta v||) for Neumann fields,
/// ||v||_inf / (|Omega|^{1/6} ||Delta v||) for fields vanishing on the boundary.
double embedding_ratio(const EmbeddingCandidate& c);

/// Cosine products, point-source responses and random smooth fields.
std::vector<EmbeddingCandidate> embedding_candidates(const Grid& grid, const EmbeddingOptions& opt = {});

/// Largest ratio over a candidate family. This is a lower bound on the true constant.
double estimate_embedding_constant(std::span<const EmbeddingCandidate> candidates);
double estimate_embedding_constant(const Grid& grid, const EmbeddingOptions& opt = {});

} // namespace phaseslide
