#include "ptsim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ptsim/error.hpp"

namespace ptsim {
namespace {

// Node accessors that attach source positions to every failure.
class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
        const YAML::Mark m = node.Mark();
        if (m.is_null()) throw ValidationError(source_ + ": " + msg);
        throw ValidationError(source_ + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1) + ": " +
                              msg);
    }

    YAML::Node require(const YAML::Node& parent, const char* key, const std::string& where) const {
        const YAML::Node n = parent[key];
        if (!n) fail(parent, where + ": missing required key '" + key + "'");
        return n;
    }

    double real(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar()) fail(node, what + ": expected a number");
        double v = 0.0;
        try {
            v = node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, what + ": '" + node.Scalar() + "' is not a number");
        }
        if (!std::isfinite(v)) fail(node, what + ": must be finite");
        return v;
    }

    cplx complex(const YAML::Node& node, const std::string& what) const {
        if (node.IsScalar()) return real(node, what);
        if (node.IsSequence() && node.size() == 2)
            return {real(node[0], what + " (real part)"), real(node[1], what + " (imaginary part)")};
        fail(node, what + ": expected a number or a [re, im] pair");
    }

    bool boolean(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar()) fail(node, what + ": expected true or false");
        try {
            return node.as<bool>();
        } catch (const YAML::Exception&) {
            fail(node, what + ": expected true or false");
        }
    }

    std::string string(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar()) fail(node, what + ": expected a string");
        return node.Scalar();
    }

    std::size_t count(const YAML::Node& node, const std::string& what) const {
        const double v = real(node, what);
        if (v < 0.0 || v != std::floor(v) || v > 1e9) fail(node, what + ": expected a non-negative integer");
        return static_cast<std::size_t>(v);
    }

private:
    std::string source_;
};

ModeNetworkSpec parse_system(const Reader& rd, const YAML::Node& sys) {
    if (!sys.IsMap()) rd.fail(sys, "system: expected an object");
    const YAML::Node coupling = rd.require(sys, "coupling", "system");
    if (!coupling.IsSequence() || coupling.size() == 0) rd.fail(coupling, "system.coupling: expected a non-empty array of rows");
    const std::size_t n = coupling.size();
    CMatrix c(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const YAML::Node row = coupling[i];
        if (!row.IsSequence() || row.size() != n)
            rd.fail(row, "system.coupling[" + std::to_string(i) + "]: expected " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j)
            c(i, j) = rd.complex(row[j], "system.coupling[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (std::abs(c(i, j) - std::conj(c(j, i))) > 1e-12) {
                rd.fail(coupling[i][j], "system.coupling is not Hermitian: entry [" + std::to_string(i) + "][" +
                                            std::to_string(j) + "] differs from conj of [" + std::to_string(j) +
                                            "][" + std::to_string(i) + "]");
            }
        }
    }

    const YAML::Node loss = rd.require(sys, "loss_profile", "system");
    if (!loss.IsSequence() || loss.size() != n)
        rd.fail(loss, "system.loss_profile: expected " + std::to_string(n) + " weights");
    std::vector<double> w(n);
    bool any_positive = false;
    for (std::size_t l = 0; l < n; ++l) {
        w[l] = rd.real(loss[l], "system.loss_profile[" + std::to_string(l) + "]");
        if (w[l] < 0.0) rd.fail(loss[l], "system.loss_profile[" + std::to_string(l) + "]: loss weights must be >= 0");
        any_positive = any_positive || w[l] > 0.0;
    }
    if (!any_positive) rd.fail(loss, "system.loss_profile: at least one weight must be positive");
    try {
        return ModeNetworkSpec(std::move(c), std::move(w));
    } catch (const ValidationError& e) {
        rd.fail(sys, e.what());
    }
}

SectionLayout parse_layout(const Reader& rd, const YAML::Node& lay, const ModeNetworkSpec& spec) {
    if (!lay.IsMap()) rd.fail(lay, "layout: expected an object");
    SectionLayout layout;
    if (const YAML::Node mode = lay["rotation_mode"]) {
        const std::string m = rd.string(mode, "layout.rotation_mode");
        if (m == "physical") {
            layout.rotation_mode = RotationMode::physical;
        } else if (m == "abstract") {
            layout.rotation_mode = RotationMode::abstract;
        } else {
            rd.fail(mode, "layout.rotation_mode: expected 'physical' or 'abstract', got '" + m + "'");
        }
    }
    const YAML::Node sections = rd.require(lay, "sections", "layout");
    if (!sections.IsSequence() || sections.size() == 0) rd.fail(sections, "layout.sections: expected a non-empty array");
    for (std::size_t k = 0; k < sections.size(); ++k) {
        const YAML::Node s = sections[k];
        const std::string where = "layout.sections[" + std::to_string(k) + "]";
        if (!s.IsMap()) rd.fail(s, where + ": expected an object");
        const YAML::Node len = rd.require(s, "length", where);
        Section sec;
        sec.length = rd.real(len, where + ".length");
        if (!(sec.length > 0.0)) rd.fail(len, where + ".length: must be positive");
        if (const YAML::Node loss = s["loss"]) sec.loss_on = rd.boolean(loss, where + ".loss");
        layout.sections.push_back(sec);
    }
    try {
        validate_layout(layout, spec);
    } catch (const ValidationError& e) {
        rd.fail(sections, e.what());
    }
    return layout;
}

std::vector<Method> parse_methods(const Reader& rd, const YAML::Node& node) {
    std::vector<Method> out;
    auto add = [&](const YAML::Node& item) {
        const std::string name = rd.string(item, "methods");
        if (name == "all") {
            out = {Method::scattering, Method::lindblad, Method::closed_form};
            return;
        }
        try {
            const Method m = parse_method(name);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        } catch (const ValidationError& e) {
            rd.fail(item, e.what());
        }
    };
    if (node.IsSequence()) {
        if (node.size() == 0) rd.fail(node, "methods: expected at least one method");
        for (const auto& item : node) add(item);
    } else {
        add(node);
    }
    return out;
}

void check_sweep(const SweepSettings& s) {
    if (!std::isfinite(s.gamma_min) || s.gamma_min < 0.0) throw ValidationError("sweep.gamma_min must be >= 0");
    if (!std::isfinite(s.gamma_max) || !(s.gamma_max > s.gamma_min))
        throw ValidationError("sweep.gamma_max must exceed sweep.gamma_min");
    if (s.steps < 2) throw ValidationError("sweep.steps must be >= 2");
}

void check_methods(const std::vector<Method>& methods, const ModeNetworkSpec& spec) {
    for (Method m : methods) {
        if (m == Method::closed_form && spec.coupler_kappa() == 0.0)
            throw ValidationError("method closed_form is only valid for the two-mode coupler shape");
    }
}

}  // namespace

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    const Reader rd(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ValidationError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                              ": malformed document: " + e.msg);
    }
    if (!root.IsMap()) throw ValidationError(source + ": top level must be an object");

    ModeNetworkSpec system = parse_system(rd, rd.require(root, "system", "config"));
    SectionLayout layout = parse_layout(rd, rd.require(root, "layout", "config"), system);

    SweepSettings sweep;
    if (const YAML::Node s = root["sweep"]) {
        if (!s.IsMap()) rd.fail(s, "sweep: expected an object");
        if (s["gamma_min"]) sweep.gamma_min = rd.real(s["gamma_min"], "sweep.gamma_min");
        if (s["gamma_max"]) sweep.gamma_max = rd.real(s["gamma_max"], "sweep.gamma_max");
        if (s["steps"]) sweep.steps = rd.count(s["steps"], "sweep.steps");
        try {
            check_sweep(sweep);
        } catch (const ValidationError& e) {
            rd.fail(s, e.what());
        }
    }

    std::vector<Method> methods{Method::scattering};
    if (const YAML::Node m = root["methods"]) {
        methods = parse_methods(rd, m);
        try {
            check_methods(methods, system);
        } catch (const ValidationError& e) {
            rd.fail(m, e.what());
        }
    }

    std::string output_path;
    if (const YAML::Node o = root["output_path"]) output_path = rd.string(o, "output_path");

    return RunConfig{std::move(system), std::move(layout), sweep, std::move(methods), std::move(output_path), source};
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void apply_overrides(RunConfig& config, const RunOverrides& o) {
    if (o.gamma_min) config.sweep.gamma_min = *o.gamma_min;
    if (o.gamma_max) config.sweep.gamma_max = *o.gamma_max;
    if (o.steps) config.sweep.steps = *o.steps;
    if (o.methods) config.methods = *o.methods;
    if (o.output_path) config.output_path = *o.output_path;
    check_sweep(config.sweep);
    check_methods(config.methods, config.system);
}

void write_curve_csv(std::span<const CoincidenceCurve> curves, std::ostream& out) {
    out << "gamma,p_boson,p_fermion,method\n";
    for (const auto& curve : curves) {
        for (const auto& p : curve.points) {
            out << format_real(p.gamma) << ',' << format_real(p.p_boson) << ',' << format_real(p.p_fermion) << ','
                << to_string(p.method) << '\n';
        }
    }
}

void write_curve_csv(std::span<const CoincidenceCurve> curves, const std::string& path) {
    bool empty = true;
    for (const auto& c : curves) empty = empty && c.points.empty();
    if (empty) throw ValidationError("write_curve_csv: curve is empty");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::validation, path + ": cannot open for writing");
    write_curve_csv(curves, out);
    out.flush();
    if (!out) throw Error(ErrorKind::validation, path + ": write failed");
}

void write_curve_csv(const CoincidenceCurve& curve, const std::string& path) {
    write_curve_csv(std::span<const CoincidenceCurve>(&curve, 1), path);
}

}  // namespace ptsim
