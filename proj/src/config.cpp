#include "phaseslide/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "phaseslide/io.hpp"

namespace phaseslide {

namespace {

struct Value {
    enum class Type { number, boolean, string, array };
    Type type = Type::number;
    double number = 0.0;
    bool boolean = false;
    std::string text;
    std::vector<double> array;
};

const char* type_name(Value::Type t) {
    switch (t) {
    case Value::Type::number: return "number";
    case Value::Type::boolean: return "boolean";
    case Value::Type::string: return "string";
    case Value::Type::array: return "array";
    }
    return "?";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '\\' && quoted) {
            ++i;
        } else if (c == '"') {
            quoted = !quoted;
        } else if (c == '#' && !quoted) {
            return line.substr(0, i);
        }
    }
    return line;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

Value parse_value(const std::string& key, const std::string& raw) {
    Value v;
    if (raw.empty()) throw ConfigError(key, "missing value");
    if (raw.front() == '"') {
        v.type = Value::Type::string;
        std::size_t i = 1;
        for (; i < raw.size() && raw[i] != '"'; ++i) {
            if (raw[i] == '\\' && i + 1 < raw.size()) ++i;
            v.text.push_back(raw[i]);
        }
        if (i != raw.size() - 1) throw ConfigError(key, "malformed string " + raw);
        return v;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') throw ConfigError(key, "unterminated array");
        v.type = Value::Type::array;
        const std::string body = trim(raw.substr(1, raw.size() - 2));
        if (body.empty()) return v;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            double x = 0.0;
            if (!parse_number(trim(item), x)) throw ConfigError(key, "array entries must be numbers, got '" + trim(item) + "'");
            v.array.push_back(x);
        }
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.type = Value::Type::boolean;
        v.boolean = raw == "true";
        return v;
    }
    if (!parse_number(raw, v.number)) throw ConfigError(key, "cannot parse value '" + raw + "'");
    return v;
}

void expect(const std::string& key, const Value& v, Value::Type t) {
    if (v.type != t)
        throw ConfigError(key, std::string("expected ") + type_name(t) + ", got " + type_name(v.type));
}

using Setter = std::function<void(RunConfig&, const Value&)>;

Setter number(double RunConfig::*field, const std::string& key) {
    return [=](RunConfig& c, const Value& v) {
        expect(key, v, Value::Type::number);
        c.*field = v.number;
    };
}

long as_integer(const std::string& key, double x) {
    if (!(std::floor(x) == x) || std::abs(x) > 1e15) throw ConfigError(key, "expected an integer");
    return static_cast<long>(x);
}

FieldSpec::Kind field_kind(const std::string& key, const std::string& s) {
    if (s == "constant") return FieldSpec::Kind::constant;
    if (s == "tanh") return FieldSpec::Kind::tanh;
    if (s == "file") return FieldSpec::Kind::file;
    throw ConfigError(key, "unknown field kind '" + s + "' (constant, tanh, file)");
}

std::string to_string(FieldSpec::Kind k) {
    switch (k) {
    case FieldSpec::Kind::constant: return "constant";
    case FieldSpec::Kind::tanh: return "tanh";
    case FieldSpec::Kind::file: return "file";
    }
    return "constant";
}

void add_field_keys(std::map<std::string, Setter>& m, const std::string& p, FieldSpec RunConfig::*f) {
    auto num = [&](const std::string& name, double FieldSpec::*member) {
        const std::string key = p + "." + name;
        m[key] = [=](RunConfig& c, const Value& v) {
            expect(key, v, Value::Type::number);
            (c.*f).*member = v.number;
        };
    };
    m[p + ".kind"] = [=](RunConfig& c, const Value& v) {
        expect(p + ".kind", v, Value::Type::string);
        (c.*f).kind = field_kind(p + ".kind", v.text);
    };
    num("value", &FieldSpec::value);
    num("radius", &FieldSpec::radius);
    num("width", &FieldSpec::width);
    num("inside", &FieldSpec::inside);
    num("outside", &FieldSpec::outside);
    m[p + ".center"] = [=](RunConfig& c, const Value& v) {
        expect(p + ".center", v, Value::Type::array);
        (c.*f).center = v.array;
    };
    m[p + ".file"] = [=](RunConfig& c, const Value& v) {
        expect(p + ".file", v, Value::Type::string);
        (c.*f).file = v.text;
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        m["grid.dim"] = [](RunConfig& c, const Value& v) {
            expect("grid.dim", v, Value::Type::number);
            c.dim = static_cast<int>(as_integer("grid.dim", v.number));
        };
        m["grid.cells"] = [](RunConfig& c, const Value& v) {
            expect("grid.cells", v, Value::Type::array);
            c.cells.clear();
            for (double x : v.array) c.cells.push_back(static_cast<int>(as_integer("grid.cells", x)));
        };
        m["grid.extent"] = [](RunConfig& c, const Value& v) {
            expect("grid.extent", v, Value::Type::array);
            c.extent = v.array;
        };
        m["time.T"] = number(&RunConfig::horizon, "time.T");
        m["time.dt"] = number(&RunConfig::dt, "time.dt");

        auto model = [&](const std::string& name, double ModelParams::*member) {
            const std::string key = "model." + name;
            m[key] = [=](RunConfig& c, const Value& v) {
                expect(key, v, Value::Type::number);
                c.model.*member = v.number;
            };
        };
        model("gamma1", &ModelParams::gamma1);
        model("gamma2", &ModelParams::gamma2);
        model("gamma3", &ModelParams::gamma3);
        model("gamma4", &ModelParams::gamma4);
        model("tau", &ModelParams::tau);
        model("sigma_s", &ModelParams::sigma_s);
        model("p_max", &ModelParams::p_max);

        m["potential.kind"] = [](RunConfig& c, const Value& v) {
            expect("potential.kind", v, Value::Type::string);
            c.potential = potential_kind_from_string(v.text);
        };
        m["potential.c0"] = number(&RunConfig::c0, "potential.c0");
        m["potential.domain_margin"] = number(&RunConfig::domain_margin, "potential.domain_margin");
        m["regularization.epsilon"] = number(&RunConfig::epsilon, "regularization.epsilon");
        m["control.rho"] = number(&RunConfig::rho, "control.rho");

        add_field_keys(m, "phi0", &RunConfig::phi0);
        add_field_keys(m, "phistar", &RunConfig::phistar);
        add_field_keys(m, "sigma0", &RunConfig::sigma0);
        add_field_keys(m, "source", &RunConfig::source);

        m["mu_gamma.kind"] = [](RunConfig& c, const Value& v) {
            expect("mu_gamma.kind", v, Value::Type::string);
            if (v.text == "constant") c.mu_gamma.kind = BoundaryData::Kind::constant;
            else if (v.text == "separable") c.mu_gamma.kind = BoundaryData::Kind::separable;
            else throw ConfigError("mu_gamma.kind", "unknown kind '" + v.text + "' (constant, separable)");
        };
        m["mu_gamma.value"] = [](RunConfig& c, const Value& v) {
            expect("mu_gamma.value", v, Value::Type::number);
            c.mu_gamma.value = v.number;
        };
        auto table_key = [&](const std::string& name, std::vector<double> BoundaryData::*member) {
            const std::string key = "mu_gamma." + name;
            m[key] = [=](RunConfig& c, const Value& v) {
                expect(key, v, Value::Type::array);
                c.mu_gamma.*member = v.array;
            };
        };
        table_key("times", &BoundaryData::times);
        table_key("amplitude", &BoundaryData::amplitude);
        table_key("profile", &BoundaryData::profile);

        m["sliding.delta"] = [](RunConfig& c, const Value& v) {
            expect("sliding.delta", v, Value::Type::number);
            c.delta_slide = v.number;
        };
        m["sliding.csh_mode"] = [](RunConfig& c, const Value& v) {
            expect("sliding.csh_mode", v, Value::Type::string);
            if (v.text != "estimate" && v.text != "value")
                throw ConfigError("sliding.csh_mode", "must be \"estimate\" or \"value\"");
            c.csh_estimate = v.text == "estimate";
        };
        m["sliding.csh"] = number(&RunConfig::csh_value, "sliding.csh");
        m["sliding.chat_mode"] = [](RunConfig& c, const Value& v) {
            expect("sliding.chat_mode", v, Value::Type::string);
            if (v.text != "pilot" && v.text != "value")
                throw ConfigError("sliding.chat_mode", "must be \"pilot\" or \"value\"");
            c.chat_pilot = v.text == "pilot";
        };
        m["sliding.chat"] = number(&RunConfig::chat_value, "sliding.chat");
        m["sliding.rho_pilot"] = number(&RunConfig::rho_pilot, "sliding.rho_pilot");
        m["sliding.laplacian_phistar"] = [](RunConfig& c, const Value& v) {
            expect("sliding.laplacian_phistar", v, Value::Type::number);
            c.laplacian_phistar = v.number;
        };

        m["output.dir"] = [](RunConfig& c, const Value& v) {
            expect("output.dir", v, Value::Type::string);
            c.output_dir = v.text;
        };
        m["output.snapshot_stride"] = [](RunConfig& c, const Value& v) {
            expect("output.snapshot_stride", v, Value::Type::number);
            c.snapshot_stride = as_integer("output.snapshot_stride", v.number);
        };
        m["output.pgm"] = [](RunConfig& c, const Value& v) {
            expect("output.pgm", v, Value::Type::boolean);
            c.write_pgm = v.boolean;
        };
        return m;
    }();
    return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

void check_field_spec(const FieldSpec& s, const std::string& p, int dim) {
    switch (s.kind) {
    case FieldSpec::Kind::constant:
        require(std::isfinite(s.value), p + ".value", "must be finite");
        break;
    case FieldSpec::Kind::tanh:
        require(static_cast<int>(s.center.size()) == dim, p + ".center", "needs one coordinate per axis");
        require(s.width > 0.0 && std::isfinite(s.width), p + ".width", "must be positive");
        require(s.radius >= 0.0 && std::isfinite(s.radius), p + ".radius", "must be nonnegative");
        require(std::isfinite(s.inside) && std::isfinite(s.outside), p + ".inside", "levels must be finite");
        break;
    case FieldSpec::Kind::file:
        require(!s.file.empty(), p + ".file", "missing key (required when kind = \"file\")");
        break;
    }
}

void check(const RunConfig& c) {
    require(c.dim == 1 || c.dim == 2, "grid.dim", "must be 1 or 2");
    require(static_cast<int>(c.cells.size()) == c.dim, "grid.cells", "needs one entry per axis");
    require(static_cast<int>(c.extent.size()) == c.dim, "grid.extent", "needs one entry per axis");
    require(std::isfinite(c.domain_margin) && c.domain_margin >= 0.0, "potential.domain_margin",
            "must be nonnegative");
    check_field_spec(c.phi0, "phi0", c.dim);
    check_field_spec(c.phistar, "phistar", c.dim);
    check_field_spec(c.sigma0, "sigma0", c.dim);
    check_field_spec(c.source, "source", c.dim);
    if (c.delta_slide) require(*c.delta_slide > 0.0 && std::isfinite(*c.delta_slide), "sliding.delta", "must be positive");
    if (!c.csh_estimate) require(c.csh_value > 0.0 && std::isfinite(c.csh_value), "sliding.csh", "must be positive");
    if (!c.chat_pilot) require(c.chat_value >= 0.0 && std::isfinite(c.chat_value), "sliding.chat", "must be nonnegative");
    require(c.rho_pilot >= 0.0 && std::isfinite(c.rho_pilot), "sliding.rho_pilot", "must be nonnegative");
    if (c.laplacian_phistar)
        require(std::isfinite(*c.laplacian_phistar), "sliding.laplacian_phistar", "must be finite");
    require(c.snapshot_stride >= 0, "output.snapshot_stride", "must be nonnegative (0 disables snapshots)");
    require(!c.output_dir.empty(), "output.dir", "must not be empty");
    // Remaining constraints (grid, time step, model, potential, initial data) are
    // enforced by the constructors that consume them.
    PhaseFieldStepper stepper(build_setup(c));
    (void)stepper;
}

PotentialSpec make_potential(const RunConfig& c) {
    switch (c.potential) {
    case PotentialKind::regular: return make_regular_potential();
    case PotentialKind::logarithmic: return make_logarithmic_potential(c.c0);
    case PotentialKind::obstacle: return make_obstacle_potential(c.c0);
    }
    return make_regular_potential();
}

} // namespace

ScalarField build_field(const FieldSpec& spec, const Grid& grid, const std::filesystem::path& base_dir,
                        const std::string& key) {
    switch (spec.kind) {
    case FieldSpec::Kind::constant: return ScalarField(grid, spec.value);
    case FieldSpec::Kind::tanh: {
        if (static_cast<int>(spec.center.size()) != grid.dim)
            throw ConfigError(key + ".center", "needs one coordinate per axis");
        const double cx = spec.center[0];
        const double cy = grid.dim == 2 ? spec.center[1] : 0.0;
        return ScalarField::sample(grid, [&](double x, double y) {
            const double r = std::hypot(x - cx, grid.dim == 2 ? y - cy : 0.0);
            return spec.outside + 0.5 * (spec.inside - spec.outside) * (1.0 + std::tanh((spec.radius - r) / spec.width));
        });
    }
    case FieldSpec::Kind::file: {
        std::filesystem::path p(spec.file);
        if (p.is_relative()) p = base_dir / p;
        if (!std::filesystem::exists(p)) throw ConfigError(key + ".file", "file not found: " + p.string());
        try {
            return read_snapshot(p, grid);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(key + ".file", e.what());
        }
    }
    }
    return ScalarField(grid);
}

SimulationSetup build_setup(const RunConfig& c) {
    const Grid grid = build_grid(c.dim, c.cells, c.extent);
    SimulationSetup s{grid,
                      make_time_config(c.horizon, c.dt),
                      c.model,
                      make_potential(c),
                      c.epsilon,
                      c.rho,
                      build_field(c.phi0, grid, c.base_dir, "phi0"),
                      build_field(c.phistar, grid, c.base_dir, "phistar"),
                      build_field(c.sigma0, grid, c.base_dir, "sigma0"),
                      build_field(c.source, grid, c.base_dir, "source"),
                      c.mu_gamma,
                      c.domain_margin};
    return s;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    RunConfig c;
    c.base_dir = base_dir;
    std::set<std::string> seen;
    std::istringstream is(text);
    std::string line, section;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError(key, "unknown key");
        if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
        it->second(c, parse_value(key, trim(line.substr(eq + 1))));
    }
    check(c);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("", "cannot read config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), path.parent_path());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    auto num = [&](const char* key, double v) { os << key << " = " << format_double(v) << '\n'; };
    auto arr = [&](const char* key, const auto& values) {
        os << key << " = [";
        for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << format_double(values[i]);
        os << "]\n";
    };
    auto str = [&](const char* key, const std::string& s) {
        os << key << " = \"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') os << '\\';
            os << ch;
        }
        os << "\"\n";
    };
    auto field = [&](const char* section, const FieldSpec& f) {
        os << '[' << section << "]\n";
        str("kind", to_string(f.kind));
        num("value", f.value);
        arr("center", f.center);
        num("radius", f.radius);
        num("width", f.width);
        num("inside", f.inside);
        num("outside", f.outside);
        str("file", f.file);
        os << '\n';
    };

    os << "[grid]\n";
    num("dim", c.dim);
    arr("cells", std::vector<double>(c.cells.begin(), c.cells.end()));
    arr("extent", c.extent);
    os << "\n[time]\n";
    num("T", c.horizon);
    num("dt", c.dt);
    os << "\n[model]\n";
    num("gamma1", c.model.gamma1);
    num("gamma2", c.model.gamma2);
    num("gamma3", c.model.gamma3);
    num("gamma4", c.model.gamma4);
    num("tau", c.model.tau);
    num("sigma_s", c.model.sigma_s);
    num("p_max", c.model.p_max);
    os << "\n[potential]\n";
    str("kind", to_string(c.potential));
    num("c0", c.c0);
    num("domain_margin", c.domain_margin);
    os << "\n[regularization]\n";
    num("epsilon", c.epsilon);
    os << "\n[control]\n";
    num("rho", c.rho);
    os << '\n';
    field("phi0", c.phi0);
    field("phistar", c.phistar);
    field("sigma0", c.sigma0);
    field("source", c.source);
    os << "[mu_gamma]\n";
    str("kind", c.mu_gamma.kind == BoundaryData::Kind::constant ? "constant" : "separable");
    num("value", c.mu_gamma.value);
    arr("times", c.mu_gamma.times);
    arr("amplitude", c.mu_gamma.amplitude);
    arr("profile", c.mu_gamma.profile);
    os << "\n[sliding]\n";
    if (c.delta_slide) num("delta", *c.delta_slide);
    str("csh_mode", c.csh_estimate ? "estimate" : "value");
    num("csh", c.csh_value);
    str("chat_mode", c.chat_pilot ? "pilot" : "value");
    num("chat", c.chat_value);
    num("rho_pilot", c.rho_pilot);
    if (c.laplacian_phistar) num("laplacian_phistar", *c.laplacian_phistar);
    os << "\n[output]\n";
    str("dir", c.output_dir);
    num("snapshot_stride", static_cast<double>(c.snapshot_stride));
    os << "pgm = " << (c.write_pgm ? "true" : "false") << '\n';
    return os.str();
}

} // namespace phaseslide
