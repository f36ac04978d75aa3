#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ptsim/interference.hpp"
#include "ptsim/matrix.hpp"
#include "ptsim/network.hpp"

namespace ptsim {

enum class Statistics { boson, fermion };

using Occupation = std::vector<int>;

/// Occupation-number states with total particle number <= max_total, in
/// lexicographic order. Fermionic occupations are 0 or 1.
class FockBasis {
public:
    FockBasis(std::size_t n_modes, std::size_t max_total, Statistics statistics);

    std::size_t n_modes() const noexcept { return n_modes_; }
    std::size_t max_total() const noexcept { return max_total_; }
    Statistics statistics() const noexcept { return statistics_; }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<Occupation>& states() const noexcept { return states_; }
    const Occupation& state(std::size_t k) const { return states_.at(k); }
    std::optional<std::size_t> index_of(const Occupation& occ) const;
    /// Like index_of but throws ValidationError for states outside the basis.
    std::size_t require_index(const Occupation& occ) const;

private:
    std::size_t n_modes_;
    std::size_t max_total_;
    Statistics statistics_;
    std::vector<Occupation> states_;
    std::map<Occupation, std::size_t> index_;
};

FockBasis enumerate_fock_basis(std::size_t n_modes, std::size_t max_total, Statistics statistics);

/// Matrix of the annihilation operator of `mode` in `basis`. Bosons carry
/// sqrt(n); fermions carry (-1)^(occupied modes with lower index).
CMatrix annihilation_matrix(const FockBasis& basis, std::size_t mode);

/// sum_{n,l} C_{n,l} a_n^dagger a_l.
CMatrix fock_hamiltonian(const FockBasis& basis, const CMatrix& mode_matrix);

/// Operator induced on the truncated Fock space by a mode transformation U
/// acting on creation operators, a_j^dagger -> sum_i U_ij a_i^dagger.
CMatrix induced_fock_operator(const FockBasis& basis, const CMatrix& mode_matrix);

struct DensityMatrix {
    FockBasis basis;
    CMatrix elements;
};

/// |occ><occ|.
DensityMatrix projector(const FockBasis& basis, const Occupation& occ);

/// Dissipator channel sqrt(rate) * op.
struct JumpOperator {
    double rate = 0.0;
    CMatrix op;
};

/// Photon loss channels: rate 2 gamma w_l on a_l, so that the no-jump
/// generator carries -i gamma w_l a_l^dagger a_l.
std::vector<JumpOperator> loss_jumps(const FockBasis& basis, const ModeNetworkSpec& spec, double gamma);

/// d rho / dz = -i [H, rho] + sum_l rate_l (J rho J^dagger - 1/2 {J^dagger J, rho}).
CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& h_coherent, std::span<const JumpOperator> jumps);
CMatrix lindblad_rhs(const DensityMatrix& rho, const CMatrix& h_coherent, std::span<const JumpOperator> jumps);

struct StepObservation {
    double z = 0.0;          // position at the start of the step
    double gamma = 0.0;      // loss rate active in the section
    const CMatrix& rho;      // state at the start of the step
    const CMatrix& drho;     // generator applied to it
};

struct EvolutionOptions {
    double tolerance = 1e-8;
    int max_halvings = 4;
    /// When non-zero, use exactly this many RK4 steps per section and skip
    /// the halving check (convergence studies).
    std::size_t fixed_steps = 0;
    /// Called for every RK4 step of every refinement pass.
    std::function<void(const StepObservation&)> on_step;
};

struct EvolutionResult {
    DensityMatrix rho;
    /// States at z = 0 (after the input rotation), after every section, and
    /// after the output rotation.
    std::vector<DensityMatrix> boundaries;
    /// Largest accepted step-halving difference over all sections.
    double residual = 0.0;
    /// Largest number of halvings needed by any section.
    int halvings = 0;
};

/// Section-by-section fixed-step RK4 with step-halving acceptance. In
/// abstract rotation mode the induced Fock operators of rotation and
/// rotation^dagger bracket the propagation; in physical mode pass the identity.
EvolutionResult evolve_density(const DensityMatrix& rho0, const SectionLayout& layout, const ModeNetworkSpec& spec,
                               double gamma, const CMatrix& rotation, const EvolutionOptions& options = {});

/// Tr(rho prod_n a_n^dagger a_n).
double coincidence_from_density(const DensityMatrix& rho);

struct DensityDiagnostics {
    double trace = 0.0;
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
};

DensityDiagnostics diagnose(const DensityMatrix& rho);

/// Coincidence curve from the master equation, one particle per input port.
CoincidenceCurve sweep_lindblad(const ModeNetworkSpec& spec, const SectionLayout& layout, const CMatrix& rotation,
                                const std::vector<double>& gamma_grid);

// ---------------------------------------------------------------------------
// Two-mode coupler oracles.

/// X1 = rho_{11;11}, X2 = -i rho_{02;11}, X3 = -i rho_{20;11},
/// X4 = rho_{20;20}, X5 = rho_{20;02}, X6 = rho_{02;02}.
struct ReducedCouplerState {
    std::array<double, 6> x{};
};

/// Hand-derived six-variable linear system for the bosonic coupler.
ReducedCouplerState coupler_x_rhs(const ReducedCouplerState& xs, double kappa, double gamma);

/// Integrates the six-variable system through a physical-mode layout from
/// X(0) = (1, 0, 0, 0, 0, 0), with the same step-halving policy as evolve_density.
ReducedCouplerState evolve_coupler_x(const SectionLayout& layout, double kappa, double gamma,
                                     const EvolutionOptions& options = {});

/// Reads X1..X6 out of a bosonic two-mode density matrix (real parts).
ReducedCouplerState reduced_coupler_state(const DensityMatrix& rho);

/// Density matrix carrying X1..X6 (and Hermitian partners), zero elsewhere.
DensityMatrix embed_reduced_state(const ReducedCouplerState& xs);

/// Closed-form coupler coincidence for a lossy middle section of length l2.
/// Evaluated in complex arithmetic so the broken phase needs no branch.
double coupler_closed_form(double kappa, double gamma, double l2, Statistics statistics);

/// Closed-form curve; requires the coupler shape and exactly one lossy section.
CoincidenceCurve sweep_closed_form(const ModeNetworkSpec& spec, const SectionLayout& layout,
                                   const std::vector<double>& gamma_grid);

}  // namespace ptsim
