#pragma once

#include <cstddef>
#include <vector>

#include "ptsim/linalg.hpp"
#include "ptsim/matrix.hpp"

namespace ptsim {

/// Lossy coupled-mode network. The effective Hamiltonian at loss rate gamma is
/// coupling - i * gamma * diag(loss_profile).
class ModeNetworkSpec {
public:
    /// Throws ValidationError unless coupling is square and Hermitian (1e-12),
    /// loss_profile matches and is non-negative with at least one positive weight.
    ModeNetworkSpec(CMatrix coupling, std::vector<double> loss_profile);

    /// Two-mode passive coupler: coupling kappa, loss on the second guide.
    static ModeNetworkSpec coupler(double kappa);

    std::size_t n_modes() const noexcept { return coupling_.rows(); }
    const CMatrix& coupling() const noexcept { return coupling_; }
    const std::vector<double>& loss_profile() const noexcept { return loss_profile_; }

    /// max |coupling entry|, used as the rate scale for step sizes and tolerances.
    double coupling_scale() const noexcept { return coupling_.max_abs(); }

    /// If this is the two-mode coupler shape (zero diagonal, real positive
    /// kappa off-diagonal, loss profile (0, 1)), its kappa; otherwise 0.
    double coupler_kappa() const noexcept;

private:
    CMatrix coupling_;
    std::vector<double> loss_profile_;
};

/// One propagation section; loss_on switches the global gamma on for it.
struct Section {
    double length = 0.0;
    bool loss_on = false;
};

enum class RotationMode {
    abstract,  // the Schur rotation R and R^dagger are applied as matrices
    physical,  // the rotations are realised by lossless sections in the layout
};

/// Ordered propagation sections of the interferometer.
struct SectionLayout {
    std::vector<Section> sections;
    RotationMode rotation_mode = RotationMode::physical;

    double total_length() const noexcept;
    /// Summed length of sections with loss switched on.
    double lossy_length() const noexcept;
};

/// Throws ValidationError unless every length is finite and positive and,
/// for a physical-mode layout on the two-mode coupler, the first and last
/// sections are lossless with lengths pi/(4 kappa) and 7 pi/(4 kappa).
void validate_layout(const SectionLayout& layout, const ModeNetworkSpec& spec);

/// Rotation section, lossy section of length l2, inverse rotation section.
SectionLayout coupler_physical_layout(double kappa, double l2);
/// Single lossy section of length l2; rotations applied as matrices.
SectionLayout coupler_abstract_layout(double l2);

struct SpectralReport {
    double gamma = 0.0;
    std::vector<cplx> eigenvalues;
    double min_pair_gap = 0.0;
    double max_imag = 0.0;
};

/// Result of the exceptional-point search.
struct ThresholdResult {
    double gamma = 0.0;
    double gap = 0.0;       // min pairwise eigenvalue distance at gamma
    double scale = 0.0;     // spectral scale max |lambda| at gamma
    double tolerance = 0.0; // absolute location tolerance requested
};

/// Length of a 2x2 coupler section that realises the 50:50 rotation.
double rotation_section_length(double kappa);
/// Length of the closing section realising the inverse rotation.
double inverse_rotation_section_length(double kappa);

CMatrix build_effective_hamiltonian(const ModeNetworkSpec& spec, double gamma);

SpectralReport spectral_report(const ModeNetworkSpec& spec, double gamma);

/// Locates the loss rate where a pair of eigenvalues coalesces.
///
/// Coarse scan (`scan_points`) of the minimum pairwise gap, golden-section
/// refinement of the best bracket to 1e-9 * (gamma_hi - gamma_lo), then a
/// Gauss-Newton polish on the squared gap of the coalescing pair, which is
/// analytic in gamma at an EP. Throws NotFoundError when the refined gap
/// exceeds 1e-4 of the spectral scale, when the minimum sits where the matrix
/// is Hermitian (diabolic point), or when the Schur block of the pair shows
/// no off-diagonal coupling (non-defective degeneracy).
ThresholdResult find_ep_threshold(const ModeNetworkSpec& spec, double gamma_lo, double gamma_hi,
                                  std::size_t scan_points = 512);

/// Schur factorisation of the effective Hamiltonian at gamma_th. The rotation
/// is held fixed while gamma is swept.
SchurFactorization rotation_at_threshold(const ModeNetworkSpec& spec, double gamma_th);

}  // namespace ptsim
