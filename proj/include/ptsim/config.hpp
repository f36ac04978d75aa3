#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptsim/interference.hpp"
#include "ptsim/network.hpp"

namespace ptsim {

struct SweepSettings {
    double gamma_min = 0.0;
    double gamma_max = 4.0;
    std::size_t steps = 401;
};

/// Validated run configuration.
///
/// JSON document layout (complex entries are `[re, im]` or a bare real):
///
///     {
///       "system": {"coupling": [[0, 1], [1, 0]], "loss_profile": [0, 1]},
///       "layout": {"rotation_mode": "physical",
///                  "sections": [{"length": 0.785..., "loss": false}, ...]},
///       "sweep": {"gamma_min": 0, "gamma_max": 4, "steps": 401},
///       "methods": ["scattering", "lindblad", "closed_form"],
///       "output_path": "sweep.csv"
///     }
///
/// Rates and lengths are unit-agnostic; only products rate * length matter.
struct RunConfig {
    ModeNetworkSpec system;
    SectionLayout layout;
    SweepSettings sweep;
    std::vector<Method> methods;
    std::string output_path;
    std::string source;

    std::string digest() const { return spec_digest(system, layout); }
};

/// Parse and validate; errors are ValidationError prefixed `source:line:col:`.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Overrides a run may apply on top of the file.
struct RunOverrides {
    std::optional<double> gamma_min;
    std::optional<double> gamma_max;
    std::optional<std::size_t> steps;
    std::optional<std::vector<Method>> methods;
    std::optional<std::string> output_path;
};

/// Throws ValidationError if the overridden sweep or method set is invalid.
void apply_overrides(RunConfig& config, const RunOverrides& overrides);

/// CSV with header `gamma,p_boson,p_fermion,method`, 17 significant digits, LF endings.
void write_curve_csv(std::span<const CoincidenceCurve> curves, std::ostream& out);
void write_curve_csv(const CoincidenceCurve& curve, const std::string& path);
void write_curve_csv(std::span<const CoincidenceCurve> curves, const std::string& path);

/// "%.17g".
std::string format_real(double x);

}  // namespace ptsim
