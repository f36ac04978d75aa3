#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ptsim/matrix.hpp"
#include "ptsim/network.hpp"

namespace ptsim {

enum class Method { scattering, lindblad, closed_form };

std::string_view to_string(Method m) noexcept;
/// Throws ValidationError for unknown names.
Method parse_method(std::string_view name);

struct CoincidencePoint {
    double gamma = 0.0;
    double p_boson = 0.0;
    double p_fermion = 0.0;
    Method method = Method::scattering;
};

/// Points sorted by strictly increasing gamma, all produced by one method.
struct CoincidenceCurve {
    std::vector<CoincidencePoint> points;
    std::string spec_digest;
};

struct CoincidenceProbabilities {
    double p_boson = 0.0;
    double p_fermion = 0.0;
};

struct CrossingResult {
    double gamma = 0.0;
    double tolerance = 0.0;
    // d/dgamma of each curve at the root (central differences).
    double slope_boson = 0.0;
    double slope_fermion = 0.0;
};

/// Stable 64-bit FNV-1a digest (hex) of the network and layout parameters.
std::string spec_digest(const ModeNetworkSpec& spec, const SectionLayout& layout);

/// n uniformly spaced values, first == lo and last == hi exactly.
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// exp(-i H_eff(gamma) z).
CMatrix propagator(const ModeNetworkSpec& spec, double gamma, double z);

/// Product of section propagators in propagation order; loss only where switched on.
CMatrix layout_propagator(const ModeNetworkSpec& spec, const SectionLayout& layout, double gamma);

/// rotation^dagger * exp(-i H_eff z) * rotation.
CMatrix sandwiched_propagator(const ModeNetworkSpec& spec, double gamma, double z, const CMatrix& rotation);

/// Protocol rotation for a layout: identity in physical mode, otherwise the
/// Schur rotation at the EP located in [ep_lo, ep_hi].
CMatrix protocol_rotation(const ModeNetworkSpec& spec, const SectionLayout& layout, double ep_lo, double ep_hi);

/// rotation^dagger * layout_propagator * rotation.
CMatrix protocol_scattering_matrix(const ModeNetworkSpec& spec, const SectionLayout& layout, const CMatrix& rotation,
                                   double gamma);

/// |perm U|^2 and |det U|^2 for one particle per input port.
CoincidenceProbabilities coincidence_probabilities(const CMatrix& u1);

CoincidenceCurve sweep_gamma(const ModeNetworkSpec& spec, const SectionLayout& layout, const CMatrix& rotation,
                             const std::vector<double>& gamma_grid);

/// Bisection root of p_boson - p_fermion to 1e-9 * (gamma_hi - gamma_lo).
/// Throws NotFoundError when the difference has the same sign at both ends.
CrossingResult find_crossing(const ModeNetworkSpec& spec, const SectionLayout& layout, const CMatrix& rotation,
                             double gamma_lo, double gamma_hi);

/// Throws ValidationError unless gammas are finite, non-negative and strictly increasing.
void validate_grid(const std::vector<double>& gamma_grid);

}  // namespace ptsim
