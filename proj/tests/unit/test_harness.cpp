#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phaseslide/cli.hpp"
#include "phaseslide/config.hpp"
#include "phaseslide/harness.hpp"
#include "phaseslide/io.hpp"

using namespace phaseslide;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("phaseslide_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string key_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

// quick variant of the reference scenario
const char* kSmall = R"(
[grid]
cells = [64]
[time]
T = 0.3
dt = 0.002
)";

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    args.insert(args.begin(), "phaseslide");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

} // namespace

TEST_CASE("empty config gives the reference scenario") {
    const RunConfig c = parse_config_text("# nothing here\n\n");
    CHECK(c == reference_scenario());
    CHECK(c.cells == std::vector<int>{256});
    CHECK(c.potential == PotentialKind::obstacle);
    CHECK(c.rho == 31.5);
    CHECK(c.phi0.kind == FieldSpec::Kind::tanh);
}

TEST_CASE("config errors name the key") {
    CHECK(key_of("gama1 = 1") == "gama1");
    CHECK(key_of("[model]\ngama1 = 1") == "model.gama1");
    CHECK(key_of("model.gamma4 = 0") == "model.gamma4");
    CHECK(key_of("[grid]\ndim = \"one\"") == "grid.dim");
    CHECK(key_of("[grid]\ndim = 1.5") == "grid.dim");
    CHECK(key_of("[time]\ndt = 0.3") == "time.dt");
    CHECK(key_of("[potential]\nkind = \"quartic\"") == "potential.kind");
    CHECK(key_of("[potential]\nkind = \"logarithmic\"\nc0 = 0.5") == "potential.c0");
    CHECK(key_of("control.rho = 1\ncontrol.rho = 2") == "control.rho");
    CHECK(key_of("[phi0]\nkind = \"file\"") == "phi0.file");
    CHECK(key_of("[phi0]\ninside = 1.5") == "initial data");
    CHECK(key_of("[output]\npgm = 1") == "output.pgm");
    CHECK(key_of("[grid]\ndim = 2") == "grid.cells");
    CHECK(key_of("[sliding]\ncsh_mode = \"value\"") == "sliding.csh");
    try {
        parse_config_text("[model]\ngamma4 = 0\n");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("positive") != std::string::npos);
    }
}

TEST_CASE("syntax: sections, dotted keys, comments, strings") {
    const RunConfig c = parse_config_text(R"(
control.rho = 40   # trailing comment
[output]
dir = "runs/a # not a comment"
pgm = true
[sliding]
delta = 1e-3
chat_mode = "value"
chat = 0.25
)");
    CHECK(c.rho == 40.0);
    CHECK(c.output_dir == "runs/a # not a comment");
    CHECK(c.write_pgm);
    CHECK(c.delta_slide.value() == 1e-3);
    CHECK_FALSE(c.chat_pilot);
    CHECK(c.chat_value == 0.25);
    CHECK_THROWS_AS(parse_config_text("[grid\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
}

TEST_CASE("parse -> serialize -> parse is a fixed point") {
    const std::vector<std::string> texts = {
        "",
        kSmall,
        "[potential]\nkind = \"logarithmic\"\nc0 = 1.5\n[phi0]\ninside = 0.7\noutside = -0.7\n[phistar]\nvalue = -0.7\n",
        "[grid]\ndim = 2\ncells = [8, 6]\nextent = [1.0, 0.75]\n[phi0]\ncenter = [0.5, 0.3]\n[sliding]\nlaplacian_phistar = "
        "0.125\ndelta = 0.01\ncsh_mode = \"value\"\ncsh = 0.7\n",
        "[mu_gamma]\nkind = \"separable\"\ntimes = [0, 0.5, 1]\namplitude = [0, 1, 0.3333333333333333]\nprofile = [1, -1]\n",
        "[potential]\nkind = \"regular\"\n[model]\ngamma1 = 0.1\ngamma2 = 0.2\ngamma3 = 0.3\ngamma4 = 0.4\ntau = 5\nsigma_s = "
        "0.6\np_max = 0.7\n[source]\nvalue = 0.1\n[output]\ndir = \"a \\\"quoted\\\" dir\"\nsnapshot_stride = 7\n",
    };
    for (const auto& t : texts) {
        const RunConfig a = parse_config_text(t);
        const std::string s = serialize_config(a);
        const RunConfig b = parse_config_text(s);
        CHECK(a == b);
        CHECK(serialize_config(b) == s);
    }
}

TEST_CASE("tabulated fields are read from snapshot files next to the config") {
    const fs::path dir = scratch("files");
    const Grid g = build_grid(1, {16}, {1.0});
    const auto phi = ScalarField::sample(g, [](double x, double) { return 0.8 * std::cos(3.0 * x); });
    emit_snapshot(phi, dir / "phi0.csv");
    write_file(dir / "run.toml", "[grid]\ncells = [16]\n[phi0]\nkind = \"file\"\nfile = \"phi0.csv\"\n");
    const RunConfig c = parse_config(dir / "run.toml");
    CHECK(build_setup(c).phi0 == phi);

    write_file(dir / "bad.toml", "[grid]\ncells = [16]\n[phistar]\nkind = \"file\"\nfile = \"missing.csv\"\n");
    try {
        parse_config(dir / "bad.toml");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "phistar.file");
    }
    write_file(dir / "wrong.toml", "[grid]\ncells = [8]\n[phi0]\nkind = \"file\"\nfile = \"phi0.csv\"\n");
    CHECK_THROWS_AS(parse_config(dir / "wrong.toml"), ConfigError);
}

TEST_CASE("time series CSV") {
    std::ostringstream empty;
    write_timeseries(TimeSeries{}, empty);
    CHECK(empty.str() == std::string(kTimeSeriesHeader) + "\n");

    TimeSeries s;
    for (int k = 0; k < 4; ++k) {
        TimeSeriesRow r;
        r.step = k;
        r.t = 0.1 * k;
        r.sup_dev = 1.0 / 3.0 + k;
        r.l2_dev = std::exp(-k);
        r.mu_inf = 1e-300 * k;
        r.sigma_min = -0.1;
        r.sigma_max = 2.0 / 7.0;
        r.energy = -1e12 / 3.0;
        r.newton_iters = k;
        if (k % 2) r.w_bound = 0.3 * k;
        r.max_principle_margin = 0.7;
        s.rows.push_back(r);
    }
    std::stringstream io;
    write_timeseries(s, io);
    CHECK(read_timeseries(io) == s);
    CHECK(io.str().find(",,") != std::string::npos);
}

TEST_CASE("snapshot CSV round trip and layout") {
    for (const Grid& g : {build_grid(1, {9}, {1.0}), build_grid(2, {5, 4}, {1.0, 2.0})}) {
        const auto f = ScalarField::sample(g, [](double x, double y) { return std::sin(10 * x) / 3.0 + y * y; });
        std::stringstream io;
        write_snapshot(f, io);
        const std::string text = io.str();
        CHECK(read_snapshot(io, g) == f);
        std::size_t lines = std::count(text.begin(), text.end(), '\n');
        if (g.dim == 1) {
            CHECK(text.rfind("x,value\n", 0) == 0);
            CHECK(lines == g.node_count() + 1);
        } else {
            CHECK(lines == g.nodes(1));
        }
    }
    std::stringstream bad("x,value\n0,1\n");
    CHECK_THROWS_AS(read_snapshot(bad, build_grid(1, {4}, {1.0})), GridMismatch);
}

TEST_CASE("PGM output") {
    const Grid g = build_grid(2, {4, 4}, {1.0, 1.0});
    std::ostringstream c;
    write_pgm(ScalarField(g, 0.25), c);
    std::string expected = "P2\n# min=0.25 max=0.25\n5 5\n255\n";
    for (int row = 0; row < 5; ++row) expected += "0 0 0 0 0\n";
    CHECK(c.str() == expected);

    std::ostringstream r;
    write_pgm(ScalarField::sample(g, [](double x, double) { return x; }), r);
    CHECK(r.str().find("0 64 128 191 255") != std::string::npos);
    CHECK(r.str().find("# min=0 max=1") != std::string::npos);
}

TEST_CASE("thread cap from the environment") {
    setenv("PHASESLIDE_THREADS", "3", 1);
    CHECK(sweep_threads() == 3);
    setenv("PHASESLIDE_THREADS", "zero", 1);
    CHECK(sweep_threads() >= 1);
    unsetenv("PHASESLIDE_THREADS");
}

TEST_CASE("certify, simulate and sweep on a small scenario") {
    const RunConfig config = parse_config_text(kSmall);
    const Calibration cal = calibrate(config);
    CHECK(cal.pilot.has_value());
    CHECK(cal.C_hat_source == Provenance::empirical_pilot);
    CHECK(cal.C_sys < 1.0);
    const auto cert = certificate_for(cal, config.rho);
    REQUIRE(cert.rho_star);

    const fs::path dir = scratch("simulate");
    const auto o = simulate(config, cal, 2.0 * *cert.rho_star, dir);
    REQUIRE(o.certificate.T_star);
    CHECK(o.t_num.has_value());
    CHECK(o.envelope->passed());
    CHECK(read_timeseries(dir / "timeseries.csv") == o.result.series);
    CHECK(fs::exists(dir / "certificate.txt"));
    CHECK(fs::exists(dir / "summary.txt"));
    CHECK(fs::exists(dir / "snapshots" / snapshot_name("phi", 150, "csv")));
    CHECK(parse_config(dir / "config.toml").rho == 2.0 * *cert.rho_star);

    const std::vector<double> rhos = {4 * *cert.rho_star, 0.0, 1.5 * *cert.rho_star, 2 * *cert.rho_star};
    const auto serial = sweep(config, cal, rhos, 1);
    const auto parallel = sweep(config, cal, rhos, 4);
    CHECK(serial == parallel);
    REQUIRE(serial.size() == 4);
    for (std::size_t k = 1; k < serial.size(); ++k) CHECK(serial[k].rho > serial[k - 1].rho);
    CHECK_FALSE(serial[0].t_num);
    CHECK_FALSE(serial[0].passed_envelope);
    for (std::size_t k = 1; k < 4; ++k) {
        CHECK(serial[k].error.empty());
        CHECK(serial[k].passed_envelope.value());
        CHECK(serial[k].mu_bound_excess <= 1e-6);
    }
    CHECK(*serial[3].t_num <= *serial[2].t_num);
    CHECK(*serial[2].t_num <= *serial[1].t_num);

    std::ostringstream table;
    write_sweep_table(serial, table);
    const std::string t = table.str();
    CHECK(t.rfind("rho,t_num,T_star,passed_envelope", 0) == 0);
    CHECK(std::count(t.begin(), t.end(), '\n') == 5);
}

TEST_CASE("command line") {
    const fs::path dir = scratch("cli");
    write_file(dir / "small.toml", kSmall);
    write_file(dir / "broken.toml", "[model]\ngama1 = 1\n");

    std::string out, err;
    CHECK(cli({"simulate", "--config", (dir / "broken.toml").string(), "--out", (dir / "o").string()}, &out, &err) == 1);
    CHECK(err.find("gama1") != std::string::npos);
    CHECK(cli({"certify", "--config", (dir / "nope.toml").string()}) == 1);
    CHECK(cli({"simulate", "--config", (dir / "small.toml").string()}) == 1);  // --out missing
    CHECK(cli({"frobnicate"}) == 1);

    CHECK(cli({"certify", "--config", (dir / "small.toml").string()}, &out) == 0);
    CHECK(out.find("T_star = ") != std::string::npos);
    CHECK(out.find("C_hat_source = empirical-from-pilot") != std::string::npos);

    CHECK(cli({"estimate-csh", "--config", (dir / "small.toml").string()}, &out) == 0);
    CHECK(out.rfind("C_sh = ", 0) == 0);

    CHECK(cli({"simulate", "--config", (dir / "small.toml").string(), "--out", (dir / "run").string()}, &out) == 0);
    CHECK(fs::exists(dir / "run" / "timeseries.csv"));

    CHECK(cli({"sweep", "--config", (dir / "small.toml").string(), "--rho", "200,50,100,75"}, &out) == 0);
    std::istringstream lines(out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line))
        if (!line.empty() && line[0] != '#' && line.rfind("rho,", 0) != 0) rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("50,", 0) == 0);
    CHECK(rows[3].rfind("200,", 0) == 0);

    CHECK(cli({"verify"}, &out) == 0);
    CHECK(out.find("FAIL") == std::string::npos);
}
