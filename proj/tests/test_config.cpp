#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ptsim/commands.hpp"
#include "ptsim/config.hpp"
#include "ptsim/error.hpp"

using namespace ptsim;

namespace {

const char* kCoupler = R"({
  "system": {"coupling": [[0, 1], [1, 0]], "loss_profile": [0, 1]},
  "layout": {"rotation_mode": "physical",
             "sections": [{"length": 0.78539816339744828, "loss": false},
                          {"length": 0.78539816339744828, "loss": true},
                          {"length": 5.497787143782138, "loss": false}]},
  "sweep": {"gamma_min": 0, "gamma_max": 4, "steps": 401},
  "methods": ["scattering"]
})";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "cfg.json");
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("bundled coupler config loads with a stable digest") {
    const RunConfig a = load_config(PTSIM_CONFIG_DIR "/pt_coupler.json");
    const RunConfig b = load_config(PTSIM_CONFIG_DIR "/pt_coupler.json");
    CHECK(a.system.coupler_kappa() == 1.0);
    CHECK(a.layout.sections.size() == 3);
    CHECK(a.sweep.steps == 401);
    CHECK(a.methods.size() == 3);
    CHECK(a.digest() == b.digest());
    CHECK(a.digest() == parse_config(kCoupler).digest());
}

TEST_CASE("config errors carry positions") {
    const std::string herm = error_of(replace(kCoupler, "[[0, 1], [1, 0]]", "[[0, 1], [2, 0]]"));
    CHECK(herm.find("not Hermitian") != std::string::npos);
    CHECK(herm.rfind("cfg.json:2:", 0) == 0);

    CHECK(error_of(replace(kCoupler, "\"gamma_min\": 0", "\"gamma_min\": -1")).find("gamma_min") != std::string::npos);
    CHECK(error_of(replace(kCoupler, "\"loss_profile\": [0, 1]", "\"loss_profile\": [0, -1]")).find(">= 0") !=
          std::string::npos);
    CHECK(error_of(replace(kCoupler, "\"length\": 0.78539816339744828, \"loss\": true",
                           "\"length\": -0.5, \"loss\": true"))
              .find("positive") != std::string::npos);
    CHECK(error_of(replace(kCoupler, "\"steps\": 401", "\"steps\": 1")).find("steps") != std::string::npos);
    CHECK(error_of(replace(kCoupler, "[\"scattering\"]", "[\"magic\"]")).find("unknown method") != std::string::npos);
    CHECK(error_of("{\"system\": [1, 2").find("malformed") != std::string::npos);
    CHECK(error_of("{}").find("missing required key 'system'") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ValidationError);
}

TEST_CASE("complex entries and closed_form restriction") {
    const std::string chain = R"({
      "system": {"coupling": [[0, [0, 1], 0], [[0, -1], 0, 1], [0, 1, 0]], "loss_profile": [0, 1, 0]},
      "layout": {"rotation_mode": "abstract", "sections": [{"length": 0.6, "loss": true}]},
      "methods": ["scattering", "lindblad"]
    })";
    const RunConfig c = parse_config(chain);
    CHECK(c.system.coupling()(0, 1) == cplx{0.0, 1.0});
    CHECK(c.layout.rotation_mode == RotationMode::abstract);
    CHECK(error_of(replace(chain, "[\"scattering\", \"lindblad\"]", "[\"closed_form\"]")).find("coupler") !=
          std::string::npos);
}

TEST_CASE("overrides are validated") {
    RunConfig c = parse_config(kCoupler);
    RunOverrides o;
    o.gamma_min = -1.0;
    CHECK_THROWS_AS(apply_overrides(c, o), ValidationError);
    c = parse_config(kCoupler);
    o = {};
    o.steps = 7;
    o.gamma_max = 3.0;
    apply_overrides(c, o);
    CHECK(c.sweep.steps == 7);
    CHECK(c.sweep.gamma_max == 3.0);
}

TEST_CASE("CSV format") {
    CoincidenceCurve curve;
    curve.points.push_back({0.0, 0.0, 1.0, Method::scattering});
    std::ostringstream out;
    write_curve_csv(std::span<const CoincidenceCurve>(&curve, 1), out);
    CHECK(out.str() == "gamma,p_boson,p_fermion,method\n0,0,1,scattering\n");

    const auto path = std::filesystem::temp_directory_path() / "ptsim_csv_test.csv";
    write_curve_csv(curve, path.string());
    CHECK(slurp(path) == out.str());
    std::filesystem::remove(path);

    CHECK_THROWS_AS(write_curve_csv(CoincidenceCurve{}, path.string()), ValidationError);
    CHECK_THROWS(write_curve_csv(curve, "/nonexistent-dir/x.csv"));
    CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("commands: sweep output is deterministic and well formed") {
    RunConfig c = parse_config(kCoupler);
    std::ostringstream out1, out2, err;
    CHECK(run_command(c, Command::sweep, out1, err) == 0);
    CHECK(run_command(c, Command::sweep, out2, err) == 0);
    CHECK(out1.str() == out2.str());
    std::istringstream lines(out1.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "gamma,p_boson,p_fermion,method");
    std::getline(lines, line);
    double g = 0, pb = 0, pf = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &g, &pb, &pf) == 3);
    CHECK(g == 0.0);
    CHECK(pb <= 1e-9);
    CHECK(std::abs(pf - 1.0) <= 1e-9);
    std::size_t rows = 1;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 401);
    CHECK(out1.str().back() == '\n');
    CHECK(out1.str().find("\n\n") == std::string::npos);
}

TEST_CASE("commands: threshold, crossing, schur and exit codes") {
    RunConfig c = parse_config(kCoupler);
    std::ostringstream out, err;
    CHECK(run_command(c, Command::crossing, out, err) == 0);
    CHECK(std::abs(std::stod(out.str()) - 2.0) <= 1e-6);

    out.str("");
    CHECK(run_command(c, Command::threshold, out, err) == 0);
    CHECK(std::abs(std::stod(out.str()) - 2.0) <= 1e-6);

    out.str("");
    CHECK(run_command(c, Command::schur, out, err) == 0);
    CHECK(out.str().rfind("matrix,row,col,re,im\n", 0) == 0);
    CHECK(out.str().find("triangular,1,0,0,0\n") != std::string::npos);

    c.sweep.gamma_max = 1.5;
    out.str("");
    CHECK(run_command(c, Command::crossing, out, err) == 3);
    CHECK(run_command(c, Command::threshold, out, err) == 3);

    CHECK(parse_command("validate") == Command::validate);
    CHECK_THROWS_AS(parse_command("plot"), ValidationError);
}
