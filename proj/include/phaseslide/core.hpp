#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phaseslide/errors.hpp"

namespace phaseslide {

/// Uniform vertex-centered tensor mesh of a box [0, L_x] (x [0, L_y]).
///
/// Nodes include the boundary, so each axis carries cells + 1 nodes. Node
/// (i, j) has linear index j * nodes(0) + i (x fastest).
struct Grid {
    int dim = 1;
    std::array<int, 2> cells{1, 1};
    std::array<double, 2> extent{1.0, 1.0};
    std::array<double, 2> spacing{1.0, 1.0};
    double measure = 1.0;

    std::size_t nodes(int axis) const {
        return axis < dim ? static_cast<std::size_t>(cells[axis]) + 1 : 1;
    }
    std::size_t node_count() const { return nodes(0) * nodes(1); }
    std::size_t index(std::size_t i, std::size_t j = 0) const { return j * nodes(0) + i; }
    std::size_t ix(std::size_t idx) const { return idx % nodes(0); }
    std::size_t jy(std::size_t idx) const { return idx / nodes(0); }

    double coordinate(std::size_t idx, int axis) const {
        return axis == 0 ? ix(idx) * spacing[0] : jy(idx) * spacing[1];
    }
    bool is_boundary(std::size_t idx) const;

    /// Composite trapezoid weight of a node (product over axes, halved at the ends).
    double weight(std::size_t idx) const;

    /// Boundary node indices in increasing order.
    std::vector<std::size_t> boundary_nodes() const;

    bool operator==(const Grid& other) const = default;
};

Grid build_grid(int dim, const std::vector<int>& cells_per_axis,
                const std::vector<double>& extent_per_axis);

/// Nodal samples on a grid.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0)
        : grid_(grid), values_(grid.node_count(), value) {}
    ScalarField(const Grid& grid, std::vector<double> values);

    /// Samples f(x, y) at every node (y = 0 in 1D).
    static ScalarField sample(const Grid& grid, const std::function<double(double, double)>& f);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool all_finite() const;
    double min() const;
    double max() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double c);

    bool operator==(const ScalarField& other) const = default;

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);

void require_same_grid(const ScalarField& a, const ScalarField& b);

double sup_norm(const ScalarField& f);
double l2_norm(const ScalarField& f);
/// Quadrature-weighted inner product.
double inner(const ScalarField& a, const ScalarField& b);
double integral(const ScalarField& f);

struct TimeConfig {
    double horizon = 1.0;
    double dt = 1e-3;
    long steps = 1000;
};

TimeConfig make_time_config(double horizon, double dt);

struct PotentialSpec;

struct Violation {
    std::string field;
    std::size_t node = 0;
    double value = 0.0;
    std::string reason;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string summary(std::size_t max_lines = 10) const;
};

/// Checks admissibility of the initial data and the target against the potential.
///
/// phi0 must have a finite minimal section at every node (for the logarithmic
/// potential: |phi0| <= 1 - domain_margin), phistar must lie strictly inside the
/// domain of beta with positive margin, and sigma0 must be finite.
ValidationReport validate_initial_data(const ScalarField& phi0, const ScalarField& sigma0,
                                       const ScalarField& phistar, const PotentialSpec& pot,
                                       double domain_margin = 1e-6);

} // namespace phaseslide
