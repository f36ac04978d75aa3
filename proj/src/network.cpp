#include "ptsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "ptsim/error.hpp"

namespace ptsim {
namespace {

struct PairGap {
    double gap = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    std::size_t j = 0;
};

PairGap closest_pair(const std::vector<cplx>& ev) {
    PairGap best;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            const double d = std::abs(ev[i] - ev[j]);
            if (d < best.gap) best = {d, i, j};
        }
    }
    return best;
}

double spectral_scale(const std::vector<cplx>& ev) {
    double s = 0.0;
    for (const auto& z : ev) s = std::max(s, std::abs(z));
    return s;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

ModeNetworkSpec::ModeNetworkSpec(CMatrix coupling, std::vector<double> loss_profile)
    : coupling_(std::move(coupling)), loss_profile_(std::move(loss_profile)) {
    if (!coupling_.square() || coupling_.rows() == 0)
        throw ValidationError("coupling matrix must be square and non-empty");
    if (!coupling_.all_finite()) throw ValidationError("coupling matrix has non-finite entries");
    const double defect = hermiticity_defect(coupling_);
    if (defect > 1e-12) throw ValidationError("coupling matrix is not Hermitian (max |C - C^dagger| = " + fmt(defect) + ")");
    if (loss_profile_.size() != coupling_.rows())
        throw ValidationError("loss_profile has " + std::to_string(loss_profile_.size()) + " entries, expected " +
                              std::to_string(coupling_.rows()));
    bool any_positive = false;
    for (std::size_t l = 0; l < loss_profile_.size(); ++l) {
        const double w = loss_profile_[l];
        if (!std::isfinite(w) || w < 0.0)
            throw ValidationError("loss_profile[" + std::to_string(l) + "] must be a finite non-negative weight");
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) throw ValidationError("loss_profile needs at least one strictly positive weight");
}

ModeNetworkSpec ModeNetworkSpec::coupler(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ValidationError("coupler: kappa must be positive");
    return ModeNetworkSpec(CMatrix{{0.0, kappa}, {kappa, 0.0}}, {0.0, 1.0});
}

double ModeNetworkSpec::coupler_kappa() const noexcept {
    if (n_modes() != 2) return 0.0;
    const cplx k = coupling_(0, 1);
    if (coupling_(0, 0) != cplx{} || coupling_(1, 1) != cplx{}) return 0.0;
    if (k.imag() != 0.0 || !(k.real() > 0.0)) return 0.0;
    if (loss_profile_[0] != 0.0 || loss_profile_[1] != 1.0) return 0.0;
    return k.real();
}

double rotation_section_length(double kappa) { return std::numbers::pi / (4.0 * kappa); }

double inverse_rotation_section_length(double kappa) { return 7.0 * std::numbers::pi / (4.0 * kappa); }

CMatrix build_effective_hamiltonian(const ModeNetworkSpec& spec, double gamma) {
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw ValidationError("gamma must be finite and non-negative (passive systems only), got " + fmt(gamma));
    CMatrix h = spec.coupling();
    for (std::size_t l = 0; l < spec.n_modes(); ++l) h(l, l) -= kI * (gamma * spec.loss_profile()[l]);
    return h;
}

SpectralReport spectral_report(const ModeNetworkSpec& spec, double gamma) {
    SpectralReport rep;
    rep.gamma = gamma;
    rep.eigenvalues = eigenvalues(build_effective_hamiltonian(spec, gamma));
    rep.min_pair_gap = rep.eigenvalues.size() < 2 ? 0.0 : closest_pair(rep.eigenvalues).gap;
    rep.max_imag = -std::numeric_limits<double>::infinity();
    for (const auto& z : rep.eigenvalues) rep.max_imag = std::max(rep.max_imag, z.imag());
    return rep;
}

ThresholdResult find_ep_threshold(const ModeNetworkSpec& spec, double gamma_lo, double gamma_hi,
                                  std::size_t scan_points) {
    if (!(gamma_lo < gamma_hi) || gamma_lo < 0.0 || !std::isfinite(gamma_hi))
        throw ValidationError("find_ep_threshold: need 0 <= gamma_lo < gamma_hi");
    if (spec.n_modes() < 2) throw NotFoundError("no EP in range: a single mode has no eigenvalue pair");
    scan_points = std::max<std::size_t>(scan_points, 3);

    const double range = gamma_hi - gamma_lo;
    auto gap_at = [&](double g) { return spectral_report(spec, g).min_pair_gap; };

    std::size_t best_k = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    const double dx = range / static_cast<double>(scan_points - 1);
    for (std::size_t k = 0; k < scan_points; ++k) {
        const double g = k + 1 == scan_points ? gamma_hi : gamma_lo + dx * static_cast<double>(k);
        const double gap = gap_at(g);
        if (gap < best_gap) {
            best_gap = gap;
            best_k = k;
        }
    }

    double a = gamma_lo + dx * static_cast<double>(best_k == 0 ? 0 : best_k - 1);
    double b = std::min(gamma_hi, gamma_lo + dx * static_cast<double>(best_k + 1));
    const double tol = 1e-9 * range;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = gap_at(c);
    double fd = gap_at(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gap_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gap_at(d);
        }
    }
    double gamma = 0.5 * (a + b);
    double gap = gap_at(gamma);
    if (best_gap < gap) {
        gamma = best_k + 1 == scan_points ? gamma_hi : gamma_lo + dx * static_cast<double>(best_k);
        gap = best_gap;
    }

    // Polish: (lambda_i - lambda_j)^2 of the coalescing pair is analytic in
    // gamma and crosses zero linearly at an EP.
    auto squared_gap = [&](double g) {
        const auto ev = spectral_report(spec, g).eigenvalues;
        const PairGap p = closest_pair(ev);
        const cplx diff = ev[p.i] - ev[p.j];
        return diff * diff;
    };
    const double h = 1e-6 * std::max(range, 1e-3);
    for (int it = 0; it < 8; ++it) {
        const cplx f0 = squared_gap(gamma);
        const cplx deriv = (squared_gap(gamma + h) - squared_gap(std::max(gamma - h, 0.0))) /
                           (gamma + h - std::max(gamma - h, 0.0));
        const double dn = std::norm(deriv);
        if (dn == 0.0 || !std::isfinite(dn)) break;
        const double step = (std::conj(deriv) * f0).real() / dn;
        const double candidate = std::clamp(gamma - step, gamma_lo, gamma_hi);
        const double cand_gap = gap_at(candidate);
        if (!(cand_gap < gap)) break;
        gamma = candidate;
        gap = cand_gap;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, gamma)) break;
    }

    const SpectralReport rep = spectral_report(spec, gamma);
    const double scale = std::max({spectral_scale(rep.eigenvalues), spec.coupling_scale(),
                                   std::numeric_limits<double>::min()});
    ThresholdResult out{gamma, rep.min_pair_gap, scale, tol};
    if (out.gap > 1e-4 * scale)
        throw NotFoundError("no EP in range [" + fmt(gamma_lo) + ", " + fmt(gamma_hi) + "]: minimum eigenvalue gap " +
                            fmt(out.gap) + " at gamma = " + fmt(gamma));

    double max_w = 0.0;
    for (double w : spec.loss_profile()) max_w = std::max(max_w, w);
    if (gamma * max_w <= 1e-12 * scale)
        throw NotFoundError("no EP in range: degeneracy at gamma = " + fmt(gamma) +
                            " is a Hermitian (diabolic) point");

    const SchurFactorization sf = schur_decompose(build_effective_hamiltonian(spec, gamma));
    const PairGap pair = closest_pair(sf.diagonal_order);
    if (std::abs(sf.triangular(pair.i, pair.j)) <= 1e-6 * scale)
        throw NotFoundError("no EP in range: degeneracy at gamma = " + fmt(gamma) + " is not defective");
    return out;
}

SchurFactorization rotation_at_threshold(const ModeNetworkSpec& spec, double gamma_th) {
    return schur_decompose(build_effective_hamiltonian(spec, gamma_th));
}

}  // namespace ptsim

namespace ptsim {

double SectionLayout::total_length() const noexcept {
    double z = 0.0;
    for (const auto& s : sections) z += s.length;
    return z;
}

double SectionLayout::lossy_length() const noexcept {
    double z = 0.0;
    for (const auto& s : sections)
        if (s.loss_on) z += s.length;
    return z;
}

void validate_layout(const SectionLayout& layout, const ModeNetworkSpec& spec) {
    if (layout.sections.empty()) throw ValidationError("layout needs at least one section");
    for (std::size_t k = 0; k < layout.sections.size(); ++k) {
        const double len = layout.sections[k].length;
        if (!std::isfinite(len) || !(len > 0.0))
            throw ValidationError("section " + std::to_string(k) + ": length must be finite and positive");
    }
    const double kappa = spec.coupler_kappa();
    if (layout.rotation_mode != RotationMode::physical || kappa == 0.0) return;
    const auto& first = layout.sections.front();
    const auto& last = layout.sections.back();
    auto close = [](double x, double ref) { return std::abs(x - ref) <= 1e-12 * ref; };
    if (layout.sections.size() < 3 || first.loss_on || last.loss_on)
        throw ValidationError("physical rotation mode: first and last sections must be lossless rotation sections");
    if (!close(first.length, rotation_section_length(kappa)))
        throw ValidationError("physical rotation mode: first section length must be pi/(4 kappa) = " +
                              fmt(rotation_section_length(kappa)) + ", got " + fmt(first.length));
    if (!close(last.length, inverse_rotation_section_length(kappa)))
        throw ValidationError("physical rotation mode: last section length must be 7 pi/(4 kappa) = " +
                              fmt(inverse_rotation_section_length(kappa)) + ", got " + fmt(last.length));
}

SectionLayout coupler_physical_layout(double kappa, double l2) {
    return {{{rotation_section_length(kappa), false}, {l2, true}, {inverse_rotation_section_length(kappa), false}},
            RotationMode::physical};
}

SectionLayout coupler_abstract_layout(double l2) { return {{{l2, true}}, RotationMode::abstract}; }

}  // namespace ptsim
