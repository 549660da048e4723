#include "phaseslide/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "phaseslide/linear_solvers.hpp"

namespace phaseslide {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    c[0] = n > 1 ? upper[0] / diag[0] : 0.0;
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double m = diag[i] - lower[i] * c[i - 1];
        c[i] = i + 1 < n ? upper[i] / m : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

void LaplacianOperator::apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t nx = grid_.nodes(0);
    const std::size_t ny = grid_.nodes(1);
    const double ihx2 = 1.0 / (grid_.spacing[0] * grid_.spacing[0]);
    const double ihy2 = grid_.dim == 2 ? 1.0 / (grid_.spacing[1] * grid_.spacing[1]) : 0.0;
    const bool neumann = kind_ == BoundaryKind::neumann;

    // One axis of the stencil; ghosts mirror the first interior neighbour.
    auto axis = [&](std::size_t i, std::size_t n, std::size_t k, std::size_t stride) {
        const double c = in[k];
        const double left = i == 0 ? in[k + stride] : in[k - stride];
        const double right = i + 1 == n ? in[k - stride] : in[k + stride];
        return 2.0 * c - left - right;
    };

    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = j * nx + i;
            if (!neumann && grid_.is_boundary(k)) {
                out[k] = 0.0;
                continue;
            }
            double v = axis(i, nx, k, 1) * ihx2;
            if (grid_.dim == 2) v += axis(j, ny, k, nx) * ihy2;
            out[k] = v;
        }
    }
}

ScalarField LaplacianOperator::apply(const ScalarField& f) const {
    if (!(f.grid() == grid_)) throw GridMismatch("Laplacian applied to a field on another grid");
    ScalarField out(grid_);
    apply(f.values(), out.values());
    return out;
}

double LaplacianOperator::diagonal(std::size_t idx) const {
    if (kind_ == BoundaryKind::dirichlet && grid_.is_boundary(idx)) return 0.0;
    double d = 2.0 / (grid_.spacing[0] * grid_.spacing[0]);
    if (grid_.dim == 2) d += 2.0 / (grid_.spacing[1] * grid_.spacing[1]);
    return d;
}

ScalarField apply_laplacian(const LaplacianOperator& op, const ScalarField& f) { return op.apply(f); }

namespace {

struct SineBasis {
    int cells = 0;
    double h = 0.0;
    std::size_t m = 0;           // interior nodes
    std::vector<double> S;       // S[k][i] = sin(pi (k+1)(i+1) / cells)
    std::vector<double> lambda;  // eigenvalues of the 3-point -d2/dx2
};

std::shared_ptr<const SineBasis> sine_basis(int cells, double h) {
    thread_local std::vector<std::shared_ptr<const SineBasis>> cache;
    for (const auto& b : cache)
        if (b->cells == cells && b->h == h) return b;
    SineBasis b;
    b.cells = cells;
    b.h = h;
    b.m = static_cast<std::size_t>(cells - 1);
    b.S.resize(b.m * b.m);
    b.lambda.resize(b.m);
    const double pi = std::acos(-1.0);
    for (std::size_t k = 0; k < b.m; ++k) {
        const double s = std::sin(pi * (k + 1) / (2.0 * cells));
        b.lambda[k] = 4.0 * s * s / (h * h);
        for (std::size_t i = 0; i < b.m; ++i) b.S[k * b.m + i] = std::sin(pi * (k + 1) * (i + 1) / cells);
    }
    if (cache.size() >= 4) cache.erase(cache.begin());
    cache.push_back(std::make_shared<const SineBasis>(std::move(b)));
    return cache.back();
}

} // namespace

void solve_dirichlet(const Grid& grid, std::span<const double> f, std::span<double> u) {
    const std::size_t n = grid.node_count();
    if (grid.dim == 1) {
        const std::size_t m = n - 2;
        const double ih2 = 1.0 / (grid.spacing[0] * grid.spacing[0]);
        std::vector<double> lo(m, -ih2), di(m, 2.0 * ih2), up(m, -ih2);
        const auto x = solve_tridiagonal(lo, di, up, f.subspan(1, m));
        u[0] = 0.0;
        u[n - 1] = 0.0;
        std::copy(x.begin(), x.end(), u.begin() + 1);
        return;
    }

    // 5-point Dirichlet Laplacian on a rectangle: diagonal in the discrete sine basis.
    const auto px = sine_basis(grid.cells[0], grid.spacing[0]);
    const auto py = sine_basis(grid.cells[1], grid.spacing[1]);
    const SineBasis& sx = *px;
    const SineBasis& sy = *py;
    const std::size_t mx = sx.m, my = sy.m, nx = grid.nodes(0);
    std::vector<double> a(mx * my), b(mx * my);
    // a(l, i) = f interior; transform along x then y
    for (std::size_t l = 0; l < my; ++l)
        for (std::size_t i = 0; i < mx; ++i) a[l * mx + i] = f[(l + 1) * nx + i + 1];
    auto along_x = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t l = 0; l < my; ++l)
            for (std::size_t k = 0; k < mx; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < mx; ++i) s += sx.S[k * mx + i] * in[l * mx + i];
                out[l * mx + k] = s;
            }
    };
    auto along_y = [&](const std::vector<double>& in, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t q = 0; q < my; ++q)
            for (std::size_t l = 0; l < my; ++l) {
                const double c = sy.S[q * my + l];
                const double* src = &in[l * mx];
                double* dst = &out[q * mx];
                for (std::size_t k = 0; k < mx; ++k) dst[k] += c * src[k];
            }
    };
    along_x(a, b);
    along_y(b, a);
    const double scale = (2.0 / (mx + 1)) * (2.0 / (my + 1));
    for (std::size_t q = 0; q < my; ++q)
        for (std::size_t k = 0; k < mx; ++k) a[q * mx + k] *= scale / (sx.lambda[k] + sy.lambda[q]);
    along_x(a, b);
    along_y(b, a);
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t l = 0; l < my; ++l)
        for (std::size_t i = 0; i < mx; ++i) u[(l + 1) * nx + i + 1] = a[l * mx + i];
}

ScalarField solve_dirichlet(const Grid& grid, const ScalarField& f) {
    if (!(f.grid() == grid)) throw GridMismatch("Dirichlet solve: right-hand side on another grid");
    ScalarField u(grid);
    solve_dirichlet(grid, f.values(), u.values());
    return u;
}

double gradient_energy(const ScalarField& u) {
    const Grid& g = u.grid();
    const std::size_t nx = g.nodes(0);
    const std::size_t ny = g.nodes(1);
    const double hx = g.spacing[0];
    const double hy = g.dim == 2 ? g.spacing[1] : 1.0;
    double s = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        const double wy = g.dim == 2 ? ((j == 0 || j + 1 == ny) ? 0.5 * hy : hy) : 1.0;
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double d = u[j * nx + i + 1] - u[j * nx + i];
            s += wy * d * d / hx;
        }
    }
    if (g.dim == 2) {
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                const double wx = (i == 0 || i + 1 == nx) ? 0.5 * hx : hx;
                const double d = u[(j + 1) * nx + i] - u[j * nx + i];
                s += wx * d * d / hy;
            }
        }
    }
    return s;
}

double hminus1_norm(const Grid& grid, const ScalarField& f) {
    return std::sqrt(gradient_energy(solve_dirichlet(grid, f)));
}

double BoundaryData::amplitude_at(double t) const {
    if (kind == Kind::constant) return value;
    if (times.size() == 1 || t <= times.front()) return amplitude.front();
    if (t >= times.back()) return amplitude.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return (1.0 - s) * amplitude[k - 1] + s * amplitude[k];
}

std::vector<double> BoundaryData::values(const Grid& grid, double t) const {
    const std::size_t nb = grid.boundary_nodes().size();
    if (kind == Kind::constant) return std::vector<double>(nb, value);
    const double a = amplitude_at(t);
    std::vector<double> out(nb);
    for (std::size_t k = 0; k < nb; ++k) out[k] = a * profile[k];
    return out;
}

double BoundaryData::sup_norm() const {
    if (kind == Kind::constant) return std::abs(value);
    double a = 0.0, b = 0.0;
    for (double v : amplitude) a = std::max(a, std::abs(v));
    for (double v : profile) b = std::max(b, std::abs(v));
    return a * b;
}

void BoundaryData::validate(const Grid& grid) const {
    if (kind == Kind::constant) {
        if (!std::isfinite(value)) throw ConfigError("mu_gamma.value", "must be finite");
        return;
    }
    if (times.empty() || times.size() != amplitude.size())
        throw ConfigError("mu_gamma.times", "times and amplitude tables must be nonempty and of equal length");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw ConfigError("mu_gamma.times", "times must be strictly increasing");
    if (profile.size() != grid.boundary_nodes().size())
        throw ConfigError("mu_gamma.profile", "need one profile value per boundary node (" +
                                                  std::to_string(grid.boundary_nodes().size()) + ")");
    for (double v : amplitude)
        if (!std::isfinite(v)) throw ConfigError("mu_gamma.amplitude", "must be finite");
    for (double v : profile)
        if (!std::isfinite(v)) throw ConfigError("mu_gamma.profile", "must be finite");
}

ScalarField harmonic_extension(const Grid& grid, std::span<const double> boundary_values) {
    const auto nodes = grid.boundary_nodes();
    if (boundary_values.size() != nodes.size())
        throw GridMismatch("harmonic extension: one value per boundary node required");
    ScalarField lift(grid);
    for (std::size_t k = 0; k < nodes.size(); ++k) lift[nodes[k]] = boundary_values[k];
    // u = lift + D(Delta_h lift) is harmonic inside and matches the data on the boundary.
    ScalarField rhs = apply_laplacian(LaplacianOperator(grid, BoundaryKind::dirichlet), lift);
    rhs *= -1.0;
    ScalarField u = solve_dirichlet(grid, rhs);
    for (std::size_t k = 0; k < nodes.size(); ++k) u[nodes[k]] = boundary_values[k];
    return u;
}

ScalarField harmonic_extension(const Grid& grid, const BoundaryData& data, double t) {
    if (data.kind == BoundaryData::Kind::constant) return ScalarField(grid, data.value);
    const auto values = data.values(grid, t);
    return harmonic_extension(grid, values);
}

double embedding_ratio(const EmbeddingCandidate& c) {
    const Grid& g = c.field.grid();
    const double vinf = sup_norm(c.field);
    if (vinf == 0.0) return 0.0;
    const LaplacianOperator op(g, c.dirichlet ? BoundaryKind::dirichlet : BoundaryKind::neumann);
    const double lap = l2_norm(op.apply(c.field));
    const double scale = std::pow(g.measure, 1.0 / 6.0) * lap;
    if (c.dirichlet) return vinf / scale;
    return vinf / (l2_norm(c.field) / std::sqrt(g.measure) + scale);
}

std::vector<EmbeddingCandidate> embedding_candidates(const Grid& grid, const EmbeddingOptions& opt) {
    using std::numbers::pi;
    std::vector<EmbeddingCandidate> out;
    const int kmax = opt.max_frequency;
    const int lmax = grid.dim == 2 ? opt.max_frequency : 0;
    const double lx = grid.extent[0];
    const double ly = grid.extent[1];

    for (int k = 0; k <= kmax; ++k) {
        for (int l = 0; l <= lmax; ++l) {
            out.push_back({ScalarField::sample(grid, [&](double x, double y) {
                               return std::cos(k * pi * x / lx) * std::cos(l * pi * y / ly);
                           }),
                           false});
        }
    }

    // Responses to discrete point loads at interior quarter points.
    const std::size_t nx = grid.nodes(0);
    const std::size_t ny = grid.nodes(1);
    std::vector<std::size_t> xs{nx / 4, nx / 2, 3 * nx / 4};
    std::vector<std::size_t> ys = grid.dim == 2 ? std::vector<std::size_t>{ny / 4, ny / 2, 3 * ny / 4}
                                                : std::vector<std::size_t>{0};
    for (std::size_t j : ys) {
        for (std::size_t i : xs) {
            const std::size_t k = grid.index(i, j);
            if (grid.is_boundary(k)) continue;
            ScalarField load(grid);
            load[k] = 1.0 / grid.weight(k);
            out.push_back({solve_dirichlet(grid, load), true});
        }
    }

    // Random smooth fields: offset plus decaying low-frequency cosine modes.
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> coef;
    for (int n = 0; n < opt.random_count; ++n) {
        coef.assign(static_cast<std::size_t>((kmax + 1) * (lmax + 1)), 0.0);
        for (int k = 0; k <= kmax; ++k)
            for (int l = 0; l <= lmax; ++l)
                coef[static_cast<std::size_t>(k * (lmax + 1) + l)] = normal(rng) / (1.0 + k * k + l * l);
        out.push_back({ScalarField::sample(grid,
                                           [&](double x, double y) {
                                               double v = 0.0;
                                               for (int k = 0; k <= kmax; ++k)
                                                   for (int l = 0; l <= lmax; ++l)
                                                       v += coef[static_cast<std::size_t>(k * (lmax + 1) + l)] *
                                                            std::cos(k * pi * x / lx) * std::cos(l * pi * y / ly);
                                               return v;
                                           }),
                       false});
    }
    return out;
}

double estimate_embedding_constant(std::span<const EmbeddingCandidate> candidates) {
    double best = 0.0;
    for (const auto& c : candidates) best = std::max(best, embedding_ratio(c));
    return best;
}

double estimate_embedding_constant(const Grid& grid, const EmbeddingOptions& opt) {
    const auto candidates = embedding_candidates(grid, opt);
    return estimate_embedding_constant(candidates);
}

} // namespace phaseslide
