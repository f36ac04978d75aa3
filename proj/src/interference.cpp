#include "ptsim/interference.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "ptsim/error.hpp"
#include "ptsim/linalg.hpp"

namespace ptsim {
namespace {

constexpr double kRotationUnitarityTol = 1e-10;
constexpr double kProbabilitySlack = 1e-9;
constexpr double kProbabilityHardLimit = 1e-6;

class Fnv1a {
public:
    void add(std::string_view s) {
        for (unsigned char c : s) {
            hash_ ^= c;
            hash_ *= 0x100000001b3ULL;
        }
    }
    void add(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g;", x);
        add(std::string_view(buf));
    }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
        return buf;
    }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

double clip_probability(double p, const char* which) {
    if (p > 1.0 + kProbabilityHardLimit)
        throw NumericalError(std::string("coincidence_probabilities: ") + which +
                                 " probability exceeds 1 (passivity violated upstream)",
                             p - 1.0);
    return p > 1.0 + kProbabilitySlack ? 1.0 : p;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::scattering:
            return "scattering";
        case Method::lindblad:
            return "lindblad";
        case Method::closed_form:
            return "closed_form";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "scattering") return Method::scattering;
    if (name == "lindblad") return Method::lindblad;
    if (name == "closed_form") return Method::closed_form;
    throw ValidationError("unknown method '" + std::string(name) + "' (expected scattering, lindblad or closed_form)");
}

std::string spec_digest(const ModeNetworkSpec& spec, const SectionLayout& layout) {
    Fnv1a h;
    h.add("modes");
    h.add(static_cast<double>(spec.n_modes()));
    for (const auto& z : spec.coupling().data()) {
        h.add(z.real());
        h.add(z.imag());
    }
    h.add("loss");
    for (double w : spec.loss_profile()) h.add(w);
    h.add(layout.rotation_mode == RotationMode::physical ? "physical" : "abstract");
    for (const auto& s : layout.sections) {
        h.add(s.length);
        h.add(s.loss_on ? "on" : "off");
    }
    return h.hex();
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2) throw ValidationError("grid needs at least 2 points");
    std::vector<double> g(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) g[k] = lo + step * static_cast<double>(k);
    g.back() = hi;
    return g;
}

void validate_grid(const std::vector<double>& gamma_grid) {
    if (gamma_grid.empty()) throw ValidationError("gamma grid is empty");
    for (std::size_t k = 0; k < gamma_grid.size(); ++k) {
        if (!std::isfinite(gamma_grid[k]) || gamma_grid[k] < 0.0)
            throw ValidationError("gamma grid values must be finite and non-negative");
        if (k > 0 && !(gamma_grid[k] > gamma_grid[k - 1]))
            throw ValidationError("gamma grid must be strictly increasing");
    }
}

CMatrix propagator(const ModeNetworkSpec& spec, double gamma, double z) {
    if (!std::isfinite(z) || z < 0.0) throw ValidationError("propagation length must be non-negative");
    return mat_exp(-kI * build_effective_hamiltonian(spec, gamma), z);
}

CMatrix layout_propagator(const ModeNetworkSpec& spec, const SectionLayout& layout, double gamma) {
    CMatrix u = CMatrix::identity(spec.n_modes());
    for (const auto& s : layout.sections) u = propagator(spec, s.loss_on ? gamma : 0.0, s.length) * u;
    return u;
}

CMatrix sandwiched_propagator(const ModeNetworkSpec& spec, double gamma, double z, const CMatrix& rotation) {
    if (rotation.rows() != spec.n_modes() || !rotation.square())
        throw ValidationError("rotation must be an n_modes x n_modes matrix");
    if (unitarity_defect(rotation) > kRotationUnitarityTol) throw ValidationError("rotation is not unitary");
    return rotation.adjoint() * propagator(spec, gamma, z) * rotation;
}

CMatrix protocol_rotation(const ModeNetworkSpec& spec, const SectionLayout& layout, double ep_lo, double ep_hi) {
    if (layout.rotation_mode == RotationMode::physical) return CMatrix::identity(spec.n_modes());
    const ThresholdResult th = find_ep_threshold(spec, ep_lo, ep_hi);
    return rotation_at_threshold(spec, th.gamma).rotation;
}

CMatrix protocol_scattering_matrix(const ModeNetworkSpec& spec, const SectionLayout& layout, const CMatrix& rotation,
                                   double gamma) {
    if (rotation.rows() != spec.n_modes() || !rotation.square())
        throw ValidationError("rotation must be an n_modes x n_modes matrix");
    if (unitarity_defect(rotation) > kRotationUnitarityTol) throw ValidationError("rotation is not unitary");
    return rotation.adjoint() * layout_propagator(spec, layout, gamma) * rotation;
}

CoincidenceProbabilities coincidence_probabilities(const CMatrix& u1) {
    if (!u1.square()) throw ValidationError("coincidence_probabilities: matrix must be square");
    const double pb = std::norm(permanent(u1));
    const double pf = std::norm(determinant(u1));
    return {clip_probability(pb, "bosonic"), clip_probability(pf, "fermionic")};
}

CoincidenceCurve sweep_gamma(const ModeNetworkSpec& spec, const SectionLayout& layout, const CMatrix& rotation,
                             const std::vector<double>& gamma_grid) {
    validate_grid(gamma_grid);
    validate_layout(layout, spec);
    CoincidenceCurve curve;
    curve.spec_digest = spec_digest(spec, layout);
    curve.points.reserve(gamma_grid.size());
    for (double g : gamma_grid) {
        const auto p = coincidence_probabilities(protocol_scattering_matrix(spec, layout, rotation, g));
        curve.points.push_back({g, p.p_boson, p.p_fermion, Method::scattering});
    }
    return curve;
}

CrossingResult find_crossing(const ModeNetworkSpec& spec, const SectionLayout& layout, const CMatrix& rotation,
                             double gamma_lo, double gamma_hi) {
    if (!(gamma_lo < gamma_hi) || gamma_lo < 0.0) throw ValidationError("find_crossing: need 0 <= gamma_lo < gamma_hi");
    validate_layout(layout, spec);
    auto probs = [&](double g) { return coincidence_probabilities(protocol_scattering_matrix(spec, layout, rotation, g)); };
    auto diff = [&](double g) {
        const auto p = probs(g);
        return p.p_boson - p.p_fermion;
    };

    const double tol = 1e-9 * (gamma_hi - gamma_lo);
    double a = gamma_lo;
    double b = gamma_hi;
    double fa = diff(a);
    const double fb = diff(b);
    double root = 0.0;
    if (fa == 0.0) {
        root = a;
    } else if (fb == 0.0) {
        root = b;
    } else if ((fa < 0.0) == (fb < 0.0)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "no crossing in range [%.17g, %.17g]: p_boson - p_fermion keeps sign (%.6g, %.6g)", gamma_lo,
                      gamma_hi, fa, fb);
        throw NotFoundError(buf);
    } else {
        while (b - a > tol) {
            const double m = 0.5 * (a + b);
            const double fm = diff(m);
            if (fm == 0.0) {
                a = b = m;
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        root = 0.5 * (a + b);
    }

    const double h = 1e-5 * (gamma_hi - gamma_lo);
    const double lo = std::max(root - h, 0.0);
    const double hi = root + h;
    const auto pl = probs(lo);
    const auto ph = probs(hi);
    return {root, tol, (ph.p_boson - pl.p_boson) / (hi - lo), (ph.p_fermion - pl.p_fermion) / (hi - lo)};
}

}  // namespace ptsim
