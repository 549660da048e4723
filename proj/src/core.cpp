#include "phaseslide/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaseslide/potentials.hpp"

namespace phaseslide {

bool Grid::is_boundary(std::size_t idx) const {
    const std::size_t i = ix(idx);
    if (i == 0 || i + 1 == nodes(0)) return true;
    if (dim == 2) {
        const std::size_t j = jy(idx);
        if (j == 0 || j + 1 == nodes(1)) return true;
    }
    return false;
}

double Grid::weight(std::size_t idx) const {
    const std::size_t i = ix(idx);
    double w = spacing[0];
    if (i == 0 || i + 1 == nodes(0)) w *= 0.5;
    if (dim == 2) {
        const std::size_t j = jy(idx);
        w *= spacing[1];
        if (j == 0 || j + 1 == nodes(1)) w *= 0.5;
    }
    return w;
}

std::vector<std::size_t> Grid::boundary_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < node_count(); ++k)
        if (is_boundary(k)) out.push_back(k);
    return out;
}

Grid build_grid(int dim, const std::vector<int>& cells_per_axis,
                const std::vector<double>& extent_per_axis) {
    if (dim != 1 && dim != 2)
        throw ConfigError("grid.dim", "dimension must be 1 or 2, got " + std::to_string(dim));
    if (cells_per_axis.size() != static_cast<std::size_t>(dim) ||
        extent_per_axis.size() != static_cast<std::size_t>(dim))
        throw ConfigError("grid", "need exactly one cell count and one extent per axis");
    Grid g;
    g.dim = dim;
    g.measure = 1.0;
    for (int a = 0; a < dim; ++a) {
        if (cells_per_axis[a] < 4)
            throw ConfigError("grid.cells", "at least 4 cells per axis required");
        if (!(extent_per_axis[a] > 0.0) || !std::isfinite(extent_per_axis[a]))
            throw ConfigError("grid.extent", "extents must be positive and finite");
        g.cells[a] = cells_per_axis[a];
        g.extent[a] = extent_per_axis[a];
        g.spacing[a] = extent_per_axis[a] / cells_per_axis[a];
        g.measure *= extent_per_axis[a];
    }
    return g;
}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw GridMismatch("field has " + std::to_string(values_.size()) + " values, grid has " +
                           std::to_string(grid_.node_count()) + " nodes");
}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(double, double)>& f) {
    ScalarField out(grid);
    for (std::size_t k = 0; k < grid.node_count(); ++k)
        out[k] = f(grid.coordinate(k, 0), grid.dim == 2 ? grid.coordinate(k, 1) : 0.0);
    return out;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid()) || a.size() != b.size())
        throw GridMismatch("fields live on different grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double inner(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    const Grid& g = a.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += g.weight(k) * a[k] * b[k];
    return s;
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double integral(const ScalarField& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += g.weight(k) * f[k];
    return s;
}

TimeConfig make_time_config(double horizon, double dt) {
    if (!(horizon > 0.0)) throw ConfigError("time.T", "final time must be positive");
    if (!(dt > 0.0)) throw ConfigError("time.dt", "time step must be positive");
    const double ratio = horizon / dt;
    const long steps = std::lround(ratio);
    if (steps < 1 || std::abs(steps * dt - horizon) > 1e-12 * horizon)
        throw ConfigError("time.dt", "time step must divide the horizon exactly");
    return TimeConfig{horizon, dt, steps};
}

std::string ValidationReport::summary(std::size_t max_lines) const {
    std::ostringstream os;
    os << violations.size() << " violation(s)";
    for (std::size_t k = 0; k < violations.size() && k < max_lines; ++k) {
        const auto& v = violations[k];
        os << "\n  " << v.field << "[" << v.node << "] = " << v.value << ": " << v.reason;
    }
    if (violations.size() > max_lines) os << "\n  ...";
    return os.str();
}

ValidationReport validate_initial_data(const ScalarField& phi0, const ScalarField& sigma0,
                                       const ScalarField& phistar, const PotentialSpec& pot,
                                       double domain_margin) {
    require_same_grid(phi0, sigma0);
    require_same_grid(phi0, phistar);
    ValidationReport report;
    const double lo = pot.domain_lower();
    const double hi = pot.domain_upper();

    for (std::size_t k = 0; k < phi0.size(); ++k) {
        const double v = phi0[k];
        if (!std::isfinite(v)) {
            report.violations.push_back({"phi0", k, v, "not finite"});
        } else if (pot.kind == PotentialKind::logarithmic) {
            if (std::abs(v) > 1.0 - domain_margin)
                report.violations.push_back(
                    {"phi0", k, v, "minimal section undefined: |phi0| must be <= 1 - margin"});
        } else if (!pot.in_domain(v)) {
            report.violations.push_back({"phi0", k, v, "outside the domain of beta"});
        }
    }

    // The target must stay strictly inside D(beta): inf D < inf phistar <= sup phistar < sup D.
    const double margin = pot.kind == PotentialKind::logarithmic ? domain_margin : 0.0;
    for (std::size_t k = 0; k < phistar.size(); ++k) {
        const double v = phistar[k];
        if (!std::isfinite(v)) {
            report.violations.push_back({"phistar", k, v, "not finite"});
        } else if (!(v > lo + margin && v < hi - margin)) {
            report.violations.push_back(
                {"phistar", k, v, "target must lie strictly inside the domain of beta"});
        }
    }

    for (std::size_t k = 0; k < sigma0.size(); ++k)
        if (!std::isfinite(sigma0[k])) report.violations.push_back({"sigma0", k, sigma0[k], "not finite"});
    return report;
}

} // namespace phaseslide
