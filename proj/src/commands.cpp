#include "ptsim/commands.hpp"

#include <ostream>
#include <vector>

#include "ptsim/error.hpp"
#include "ptsim/interference.hpp"
#include "ptsim/linalg.hpp"
#include "ptsim/lindblad.hpp"
#include "ptsim/network.hpp"
#include "ptsim/validation.hpp"

namespace ptsim {
namespace {

void write_matrix_block(std::ostream& out, const char* name, const CMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out << name << ',' << i << ',' << j << ',' << format_real(m(i, j).real()) << ','
                << format_real(m(i, j).imag()) << '\n';
        }
    }
}

int sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const std::vector<double> grid = uniform_grid(config.sweep.gamma_min, config.sweep.gamma_max, config.sweep.steps);
    const CMatrix rotation =
        protocol_rotation(config.system, config.layout, config.sweep.gamma_min, config.sweep.gamma_max);
    std::vector<CoincidenceCurve> curves;
    for (Method m : config.methods) {
        switch (m) {
            case Method::scattering:
                curves.push_back(sweep_gamma(config.system, config.layout, rotation, grid));
                break;
            case Method::lindblad:
                curves.push_back(sweep_lindblad(config.system, config.layout, rotation, grid));
                break;
            case Method::closed_form:
                curves.push_back(sweep_closed_form(config.system, config.layout, grid));
                break;
        }
    }
    if (config.output_path.empty()) {
        write_curve_csv(curves, out);
    } else {
        write_curve_csv(curves, config.output_path);
        err << "wrote " << config.output_path << '\n';
    }
    return 0;
}

int threshold(const RunConfig& config, std::ostream& out) {
    out << format_real(find_ep_threshold(config.system, config.sweep.gamma_min, config.sweep.gamma_max).gamma) << '\n';
    return 0;
}

int crossing(const RunConfig& config, std::ostream& out) {
    const CMatrix rotation =
        protocol_rotation(config.system, config.layout, config.sweep.gamma_min, config.sweep.gamma_max);
    out << format_real(
               find_crossing(config.system, config.layout, rotation, config.sweep.gamma_min, config.sweep.gamma_max)
                   .gamma)
        << '\n';
    return 0;
}

int schur(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const ThresholdResult th = find_ep_threshold(config.system, config.sweep.gamma_min, config.sweep.gamma_max);
    const SchurFactorization f = rotation_at_threshold(config.system, th.gamma);
    err << "gamma_th = " << format_real(th.gamma) << '\n';
    out << "matrix,row,col,re,im\n";
    write_matrix_block(out, "rotation", f.rotation);
    write_matrix_block(out, "triangular", f.triangular);
    return 0;
}

int validate(const RunConfig& config, std::ostream& out) {
    const ValidationReport report = run_validation(config);
    print_report(report, out);
    return report.all_passed() ? 0 : static_cast<int>(ErrorKind::numerical);
}

}  // namespace

Command parse_command(std::string_view name) {
    if (name == "sweep") return Command::sweep;
    if (name == "threshold") return Command::threshold;
    if (name == "crossing") return Command::crossing;
    if (name == "validate") return Command::validate;
    if (name == "schur") return Command::schur;
    throw ValidationError("unknown command '" + std::string(name) + "'");
}

int run_command(const RunConfig& config, Command command, std::ostream& out, std::ostream& err) {
    try {
        switch (command) {
            case Command::sweep: return sweep(config, out, err);
            case Command::threshold: return threshold(config, out);
            case Command::crossing: return crossing(config, out);
            case Command::validate: return validate(config, out);
            case Command::schur: return schur(config, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::numerical);
    }
    return static_cast<int>(ErrorKind::validation);
}

}  // namespace ptsim
