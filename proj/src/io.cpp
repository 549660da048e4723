#include "phaseslide/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace phaseslide {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    return is;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw Error("write failed: " + path.string());
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
        // from_chars rejects "inf"/"nan" spellings produced by printf
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan" || s == "-nan") return NAN;
        throw Error("malformed number '" + s + "' in " + where);
    }
    return v;
}

long parse_long(const std::string& s, const std::string& where) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("malformed integer '" + s + "' in " + where);
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_timeseries(const TimeSeries& series, std::ostream& os) {
    os << kTimeSeriesHeader << '\n';
    for (const auto& r : series.rows) {
        os << r.step << ',' << format_double(r.t) << ',' << format_double(r.sup_dev) << ','
           << format_double(r.l2_dev) << ',' << format_double(r.mu_inf) << ',' << format_double(r.sigma_min)
           << ',' << format_double(r.sigma_max) << ',' << format_double(r.energy) << ',' << r.newton_iters
           << ',' << (r.w_bound ? format_double(*r.w_bound) : std::string()) << ','
           << format_double(r.max_principle_margin) << '\n';
    }
}

void emit_timeseries(const TimeSeries& series, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_timeseries(series, os);
    finish(os, path);
}

TimeSeries read_timeseries(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error("time series: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTimeSeriesHeader) throw Error("time series: unexpected header '" + line + "'");
    TimeSeries series;
    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto c = split_csv(line);
        const std::string where = "time series line " + std::to_string(lineno);
        if (c.size() != 11) throw Error(where + ": expected 11 columns");
        TimeSeriesRow r;
        r.step = parse_long(c[0], where);
        r.t = parse_double(c[1], where);
        r.sup_dev = parse_double(c[2], where);
        r.l2_dev = parse_double(c[3], where);
        r.mu_inf = parse_double(c[4], where);
        r.sigma_min = parse_double(c[5], where);
        r.sigma_max = parse_double(c[6], where);
        r.energy = parse_double(c[7], where);
        r.newton_iters = static_cast<int>(parse_long(c[8], where));
        if (!c[9].empty()) r.w_bound = parse_double(c[9], where);
        r.max_principle_margin = parse_double(c[10], where);
        series.rows.push_back(r);
    }
    return series;
}

TimeSeries read_timeseries(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_timeseries(is);
}

void write_snapshot(const ScalarField& field, std::ostream& os) {
    const Grid& g = field.grid();
    if (g.dim == 1) {
        os << "x,value\n";
        for (std::size_t k = 0; k < field.size(); ++k)
            os << format_double(g.coordinate(k, 0)) << ',' << format_double(field[k]) << '\n';
        return;
    }
    const std::size_t nx = g.nodes(0), ny = g.nodes(1);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            if (i) os << ',';
            os << format_double(field[g.index(i, j)]);
        }
        os << '\n';
    }
}

void emit_snapshot(const ScalarField& field, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_snapshot(field, os);
    finish(os, path);
}

ScalarField read_snapshot(std::istream& is, const Grid& grid) {
    std::vector<double> v;
    v.reserve(grid.node_count());
    std::string line;
    long lineno = 0;
    if (grid.dim == 1) {
        if (!std::getline(is, line)) throw Error("snapshot: empty input");
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != "x,value") throw Error("snapshot: expected header 'x,value'");
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty() || line == "\r") continue;
            const auto c = split_csv(line);
            const std::string where = "snapshot line " + std::to_string(lineno);
            if (c.size() != 2) throw Error(where + ": expected 2 columns");
            v.push_back(parse_double(c[1], where));
        }
    } else {
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty() || line == "\r") continue;
            const auto c = split_csv(line);
            const std::string where = "snapshot line " + std::to_string(lineno);
            if (c.size() != grid.nodes(0))
                throw Error(where + ": expected " + std::to_string(grid.nodes(0)) + " columns");
            for (const auto& s : c) v.push_back(parse_double(s, where));
        }
    }
    if (v.size() != grid.node_count())
        throw GridMismatch("snapshot has " + std::to_string(v.size()) + " values, grid has " +
                           std::to_string(grid.node_count()) + " nodes");
    return ScalarField(grid, std::move(v));
}

ScalarField read_snapshot(const std::filesystem::path& path, const Grid& grid) {
    auto is = open_in(path);
    return read_snapshot(is, grid);
}

void write_pgm(const ScalarField& field, std::ostream& os) {
    const Grid& g = field.grid();
    const double lo = field.min(), hi = field.max();
    const std::size_t nx = g.nodes(0), ny = g.nodes(1);
    os << "P2\n# min=" << format_double(lo) << " max=" << format_double(hi) << '\n'
       << nx << ' ' << ny << "\n255\n";
    const double span = hi - lo;
    for (std::size_t row = 0; row < ny; ++row) {
        const std::size_t j = ny - 1 - row;
        for (std::size_t i = 0; i < nx; ++i) {
            int px = 0;
            if (span > 0.0) px = static_cast<int>(std::lround(255.0 * (field[g.index(i, j)] - lo) / span));
            if (i) os << ' ';
            os << px;
        }
        os << '\n';
    }
}

void emit_pgm(const ScalarField& field, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_pgm(field, os);
    finish(os, path);
}

std::string snapshot_name(const std::string& field, long step, const std::string& extension) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%06ld.", step);
    return field + buf + extension;
}

} // namespace phaseslide
