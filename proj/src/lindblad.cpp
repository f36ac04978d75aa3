#include "ptsim/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "ptsim/error.hpp"
#include "ptsim/linalg.hpp"

namespace ptsim {
namespace {

void enumerate(std::size_t mode, std::size_t remaining, bool fermion, Occupation& current,
               std::vector<Occupation>& out) {
    if (mode == current.size()) {
        out.push_back(current);
        return;
    }
    const std::size_t cap = fermion ? std::min<std::size_t>(remaining, 1) : remaining;
    for (std::size_t n = 0; n <= cap; ++n) {
        current[mode] = static_cast<int>(n);
        enumerate(mode + 1, remaining - n, fermion, current, out);
    }
    current[mode] = 0;
}

// Precomputed generator: -i (H_eff rho - rho H_eff^dagger) + sum J rho J^dagger.
class Generator {
public:
    Generator(const CMatrix& h_coherent, std::span<const JumpOperator> jumps) : h_eff_(h_coherent) {
        for (const auto& j : jumps) {
            if (j.rate == 0.0) continue;
            if (j.rate < 0.0) throw ValidationError("jump rates must be non-negative");
            if (j.op.rows() != h_coherent.rows() || j.op.cols() != h_coherent.cols())
                throw ValidationError("lindblad_rhs: jump operator dimension mismatch");
            CMatrix scaled = j.op * cplx{std::sqrt(j.rate), 0.0};
            CMatrix scaled_adj = scaled.adjoint();
            h_eff_ -= (0.5 * kI) * (scaled_adj * scaled);
            jumps_.emplace_back(std::move(scaled), std::move(scaled_adj));
        }
        h_eff_adj_ = h_eff_.adjoint();
        h_eff_sparse_ = sparse(h_eff_);
        h_eff_adj_sparse_ = sparse(h_eff_adj_);
        for (const auto& [j, jd] : jumps_) sparse_jumps_.emplace_back(sparse(j), sparse(jd));
    }

    CMatrix operator()(const CMatrix& rho) const {
        CMatrix out(rho.rows(), rho.cols());
        CMatrix scratch(rho.rows(), rho.cols());
        apply(rho, out, scratch);
        return out;
    }

    // Allocation-free form for the integrator; `scratch` is clobbered.
    void apply(const CMatrix& rho, CMatrix& out, CMatrix& scratch) const {
        std::fill(out.data().begin(), out.data().end(), cplx{});
        left_multiply_add(-kI, h_eff_sparse_, rho, out);
        right_multiply_add(kI, rho, h_eff_adj_sparse_, out);
        for (const auto& [j, jd] : sparse_jumps_) {
            std::fill(scratch.data().begin(), scratch.data().end(), cplx{});
            left_multiply_add(1.0, j, rho, scratch);
            right_multiply_add(1.0, scratch, jd, out);
        }
    }

private:
    struct Entry {
        std::size_t row, col;
        cplx value;
    };
    using Sparse = std::vector<Entry>;

    static Sparse sparse(const CMatrix& m) {
        Sparse out;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                if (m(i, j) != cplx{}) out.push_back({i, j, m(i, j)});
        return out;
    }

    // c += alpha a b with a sparse.
    static void left_multiply_add(cplx alpha, const Sparse& a, const CMatrix& b, CMatrix& c) {
        const std::size_t n = b.cols();
        for (const auto& e : a) {
            const cplx s = alpha * e.value;
            for (std::size_t j = 0; j < n; ++j) c(e.row, j) += s * b(e.col, j);
        }
    }

    // c += alpha a b with b sparse.
    static void right_multiply_add(cplx alpha, const CMatrix& a, const Sparse& b, CMatrix& c) {
        const std::size_t n = a.rows();
        for (const auto& e : b) {
            const cplx s = alpha * e.value;
            for (std::size_t i = 0; i < n; ++i) c(i, e.col) += s * a(i, e.row);
        }
    }

    CMatrix h_eff_;
    CMatrix h_eff_adj_;
    std::vector<std::pair<CMatrix, CMatrix>> jumps_;
    Sparse h_eff_sparse_;
    Sparse h_eff_adj_sparse_;
    std::vector<std::pair<Sparse, Sparse>> sparse_jumps_;
};

ReducedCouplerState operator+(ReducedCouplerState a, const ReducedCouplerState& b) {
    for (std::size_t k = 0; k < 6; ++k) a.x[k] += b.x[k];
    return a;
}

ReducedCouplerState operator*(double s, ReducedCouplerState a) {
    for (auto& v : a.x) v *= s;
    return a;
}

double distance(const CMatrix& a, const CMatrix& b) { return max_abs_diff(a, b); }

double distance(const ReducedCouplerState& a, const ReducedCouplerState& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < 6; ++k) d = std::max(d, std::abs(a.x[k] - b.x[k]));
    return d;
}

template <class State, class Rhs, class Observe>
State rk4_run(State y, double z0, double length, std::size_t steps, const Rhs& rhs, const Observe& observe) {
    const double h = length / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const State k1 = rhs(y);
        observe(z0 + h * static_cast<double>(k), y, k1);
        const State k2 = rhs(y + (0.5 * h) * k1);
        const State k3 = rhs(y + (0.5 * h) * k2);
        const State k4 = rhs(y + h * k3);
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

// Same scheme as above for density matrices, reusing buffers across steps.
template <class Observe>
CMatrix rk4_run(CMatrix y, double z0, double length, std::size_t steps, const Generator& gen, const Observe& observe) {
    const double h = length / static_cast<double>(steps);
    const std::size_t n = y.rows();
    CMatrix k(n, n), acc(n, n), stage(n, n), scratch(n, n);
    auto axpy = [](CMatrix& out, const CMatrix& base, double s, const CMatrix& d) {
        auto o = out.data();
        auto b = base.data();
        auto v = d.data();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = b[i] + s * v[i];
    };
    auto accumulate = [](CMatrix& out, double s, const CMatrix& d) {
        auto o = out.data();
        auto v = d.data();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] += s * v[i];
    };
    for (std::size_t step = 0; step < steps; ++step) {
        gen.apply(y, k, scratch);
        observe(z0 + h * static_cast<double>(step), y, k);
        axpy(acc, y, h / 6.0, k);
        axpy(stage, y, 0.5 * h, k);
        gen.apply(stage, k, scratch);
        accumulate(acc, h / 3.0, k);
        axpy(stage, y, 0.5 * h, k);
        gen.apply(stage, k, scratch);
        accumulate(acc, h / 3.0, k);
        axpy(stage, y, h, k);
        gen.apply(stage, k, scratch);
        accumulate(acc, h / 6.0, k);
        std::swap(y, acc);
    }
    return y;
}

struct SectionStats {
    double residual = 0.0;
    int halvings = 0;
};

/// Default step min(length/1000, 1/(50 rate_scale)); redo at half step until
/// successive results agree to the tolerance.
template <class State, class Rhs, class Observe>
State integrate_section(const State& y0, double z0, double length, double rate_scale, const Rhs& rhs,
                        const Observe& observe, const EvolutionOptions& options, SectionStats& stats) {
    if (options.fixed_steps > 0) return rk4_run(y0, z0, length, options.fixed_steps, rhs, observe);
    double h = length / 1000.0;
    if (rate_scale > 0.0) h = std::min(h, 1.0 / (50.0 * rate_scale));
    auto steps = static_cast<std::size_t>(std::ceil(length / h - 1e-9));
    steps = std::max<std::size_t>(steps, 1);

    State coarse = rk4_run(y0, z0, length, steps, rhs, observe);
    double diff = 0.0;
    for (int halving = 1; halving <= options.max_halvings; ++halving) {
        steps *= 2;
        State fine = rk4_run(y0, z0, length, steps, rhs, observe);
        diff = distance(fine, coarse);
        if (diff <= options.tolerance) {
            stats.residual = std::max(stats.residual, diff);
            stats.halvings = std::max(stats.halvings, halving);
            return fine;
        }
        coarse = std::move(fine);
    }
    throw NumericalError("RK4 step halving did not converge after " + std::to_string(options.max_halvings) +
                             " halvings (residual " + std::to_string(diff) + ")",
                         diff);
}

double section_rate_scale(const ModeNetworkSpec& spec, double gamma_section) {
    double max_w = 0.0;
    for (double w : spec.loss_profile()) max_w = std::max(max_w, w);
    return std::max(spec.coupling_scale(), gamma_section * max_w);
}

Occupation all_ones(std::size_t n) { return Occupation(n, 1); }

CoincidenceCurve start_curve(const ModeNetworkSpec& spec, const SectionLayout& layout,
                             const std::vector<double>& grid) {
    validate_grid(grid);
    validate_layout(layout, spec);
    CoincidenceCurve curve;
    curve.spec_digest = spec_digest(spec, layout);
    curve.points.reserve(grid.size());
    return curve;
}

}  // namespace

// ---------------------------------------------------------------------------

FockBasis::FockBasis(std::size_t n_modes, std::size_t max_total, Statistics statistics)
    : n_modes_(n_modes), max_total_(max_total), statistics_(statistics) {
    if (n_modes == 0) throw ValidationError("Fock basis needs at least one mode");
    if (statistics == Statistics::fermion && max_total > n_modes)
        throw ValidationError("fermionic basis: max_total " + std::to_string(max_total) + " exceeds " +
                              std::to_string(n_modes) + " modes (Pauli exclusion)");
    Occupation current(n_modes, 0);
    enumerate(0, max_total, statistics == Statistics::fermion, current, states_);
    for (std::size_t k = 0; k < states_.size(); ++k) index_.emplace(states_[k], k);
}

std::optional<std::size_t> FockBasis::index_of(const Occupation& occ) const {
    const auto it = index_.find(occ);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t FockBasis::require_index(const Occupation& occ) const {
    const auto idx = index_of(occ);
    if (!idx) throw ValidationError("occupation is outside the truncated Fock basis");
    return *idx;
}

FockBasis enumerate_fock_basis(std::size_t n_modes, std::size_t max_total, Statistics statistics) {
    return FockBasis(n_modes, max_total, statistics);
}

CMatrix annihilation_matrix(const FockBasis& basis, std::size_t mode) {
    if (mode >= basis.n_modes()) throw ValidationError("mode index out of range");
    const bool fermion = basis.statistics() == Statistics::fermion;
    CMatrix a(basis.size(), basis.size());
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const Occupation& occ = basis.state(col);
        const int n = occ[mode];
        if (n == 0) continue;
        Occupation target = occ;
        --target[mode];
        const std::size_t row = basis.require_index(target);
        if (fermion) {
            int lower = 0;
            for (std::size_t k = 0; k < mode; ++k) lower += occ[k];
            a(row, col) = (lower % 2 == 0) ? 1.0 : -1.0;
        } else {
            a(row, col) = std::sqrt(static_cast<double>(n));
        }
    }
    return a;
}

CMatrix fock_hamiltonian(const FockBasis& basis, const CMatrix& mode_matrix) {
    if (!mode_matrix.square() || mode_matrix.rows() != basis.n_modes())
        throw ValidationError("fock_hamiltonian: mode matrix must be n_modes x n_modes");
    std::vector<CMatrix> ann;
    std::vector<CMatrix> cre;
    for (std::size_t l = 0; l < basis.n_modes(); ++l) {
        ann.push_back(annihilation_matrix(basis, l));
        cre.push_back(ann.back().adjoint());
    }
    CMatrix h = CMatrix::zeros(basis.size());
    for (std::size_t n = 0; n < basis.n_modes(); ++n)
        for (std::size_t l = 0; l < basis.n_modes(); ++l)
            if (mode_matrix(n, l) != cplx{}) h += mode_matrix(n, l) * (cre[n] * ann[l]);
    return h;
}

CMatrix induced_fock_operator(const FockBasis& basis, const CMatrix& mode_matrix) {
    const std::size_t modes = basis.n_modes();
    if (!mode_matrix.square() || mode_matrix.rows() != modes)
        throw ValidationError("induced_fock_operator: mode matrix must be n_modes x n_modes");
    // B_j = sum_i U_ij a_i^dagger, the image of a_j^dagger.
    std::vector<CMatrix> cre;
    for (std::size_t i = 0; i < modes; ++i) cre.push_back(annihilation_matrix(basis, i).adjoint());
    std::vector<CMatrix> images;
    for (std::size_t j = 0; j < modes; ++j) {
        CMatrix b = CMatrix::zeros(basis.size());
        for (std::size_t i = 0; i < modes; ++i)
            if (mode_matrix(i, j) != cplx{}) b += mode_matrix(i, j) * cre[i];
        images.push_back(std::move(b));
    }

    const std::size_t vac = basis.require_index(Occupation(modes, 0));
    CMatrix out(basis.size(), basis.size());
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const Occupation& occ = basis.state(col);
        std::vector<cplx> v(basis.size(), cplx{});
        v[vac] = 1.0;
        double norm = 1.0;
        // |n> = prod_j (a_j^dagger)^{n_j} / sqrt(n_j!) |0>, leftmost mode applied last.
        for (std::size_t j = modes; j-- > 0;) {
            for (int rep = 0; rep < occ[j]; ++rep) {
                std::vector<cplx> w(basis.size(), cplx{});
                for (std::size_t r = 0; r < basis.size(); ++r)
                    for (std::size_t c = 0; c < basis.size(); ++c)
                        if (v[c] != cplx{}) w[r] += images[j](r, c) * v[c];
                v = std::move(w);
                norm *= static_cast<double>(rep + 1);
            }
        }
        const double inv = 1.0 / std::sqrt(norm);
        for (std::size_t r = 0; r < basis.size(); ++r) out(r, col) = v[r] * inv;
    }
    return out;
}

DensityMatrix projector(const FockBasis& basis, const Occupation& occ) {
    const std::size_t k = basis.require_index(occ);
    DensityMatrix rho{basis, CMatrix::zeros(basis.size())};
    rho.elements(k, k) = 1.0;
    return rho;
}

std::vector<JumpOperator> loss_jumps(const FockBasis& basis, const ModeNetworkSpec& spec, double gamma) {
    if (basis.n_modes() != spec.n_modes()) throw ValidationError("loss_jumps: basis and network mode counts differ");
    if (!std::isfinite(gamma) || gamma < 0.0) throw ValidationError("gamma must be finite and non-negative");
    std::vector<JumpOperator> jumps;
    for (std::size_t l = 0; l < spec.n_modes(); ++l) {
        const double w = spec.loss_profile()[l];
        if (w > 0.0 && gamma > 0.0) jumps.push_back({2.0 * gamma * w, annihilation_matrix(basis, l)});
    }
    return jumps;
}

CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& h_coherent, std::span<const JumpOperator> jumps) {
    if (!rho.square() || !h_coherent.square() || rho.rows() != h_coherent.rows())
        throw ValidationError("lindblad_rhs: density matrix and Hamiltonian dimensions differ");
    return Generator(h_coherent, jumps)(rho);
}

CMatrix lindblad_rhs(const DensityMatrix& rho, const CMatrix& h_coherent, std::span<const JumpOperator> jumps) {
    if (rho.elements.rows() != rho.basis.size()) throw ValidationError("density matrix does not match its basis");
    return lindblad_rhs(rho.elements, h_coherent, jumps);
}

EvolutionResult evolve_density(const DensityMatrix& rho0, const SectionLayout& layout, const ModeNetworkSpec& spec,
                               double gamma, const CMatrix& rotation, const EvolutionOptions& options) {
    const FockBasis& basis = rho0.basis;
    if (basis.n_modes() != spec.n_modes()) throw ValidationError("evolve_density: basis and network mode counts differ");
    if (rho0.elements.rows() != basis.size() || !rho0.elements.square())
        throw ValidationError("evolve_density: density matrix does not match its basis");
    if (!std::isfinite(gamma) || gamma < 0.0) throw ValidationError("gamma must be finite and non-negative");
    validate_layout(layout, spec);
    if (unitarity_defect(rotation) > 1e-10) throw ValidationError("evolve_density: rotation is not unitary");

    const CMatrix h_coherent = fock_hamiltonian(basis, spec.coupling());
    const std::vector<JumpOperator> no_jumps;
    const std::vector<JumpOperator> lossy = loss_jumps(basis, spec, gamma);
    const Generator lossless_gen(h_coherent, no_jumps);
    const Generator lossy_gen(h_coherent, lossy);

    const CMatrix gamma_in = induced_fock_operator(basis, rotation);
    const CMatrix gamma_in_adj = gamma_in.adjoint();

    EvolutionResult result{{basis, gamma_in * rho0.elements * gamma_in_adj}, {}, 0.0, 0};
    result.boundaries.push_back(result.rho);

    SectionStats stats;
    double z = 0.0;
    for (const auto& section : layout.sections) {
        const double g = section.loss_on ? gamma : 0.0;
        const Generator& gen = section.loss_on ? lossy_gen : lossless_gen;
        auto observe = [&](double zz, const CMatrix& y, const CMatrix& dy) {
            if (options.on_step) options.on_step(StepObservation{zz, g, y, dy});
        };
        result.rho.elements = integrate_section(result.rho.elements, z, section.length,
                                                section_rate_scale(spec, g), gen, observe, options, stats);
        z += section.length;
        result.boundaries.push_back(result.rho);
    }

    result.rho.elements = gamma_in_adj * result.rho.elements * gamma_in;
    result.boundaries.push_back(result.rho);
    result.residual = stats.residual;
    result.halvings = stats.halvings;
    return result;
}

double coincidence_from_density(const DensityMatrix& rho) {
    double p = 0.0;
    for (std::size_t k = 0; k < rho.basis.size(); ++k) {
        double weight = 1.0;
        for (int n : rho.basis.state(k)) weight *= static_cast<double>(n);
        if (weight != 0.0) p += weight * rho.elements(k, k).real();
    }
    return p;
}

DensityDiagnostics diagnose(const DensityMatrix& rho) {
    DensityDiagnostics d;
    d.trace = rho.elements.trace().real();
    d.hermiticity_defect = hermiticity_defect(rho.elements);
    const CMatrix sym = (rho.elements + rho.elements.adjoint()) * cplx{0.5, 0.0};
    d.min_eigenvalue = hermitian_eigenvalues(sym).front();
    return d;
}

CoincidenceCurve sweep_lindblad(const ModeNetworkSpec& spec, const SectionLayout& layout, const CMatrix& rotation,
                                const std::vector<double>& gamma_grid) {
    CoincidenceCurve curve = start_curve(spec, layout, gamma_grid);
    const std::size_t n = spec.n_modes();
    const FockBasis bosons(n, n, Statistics::boson);
    const FockBasis fermions(n, n, Statistics::fermion);
    const DensityMatrix rho_b = projector(bosons, all_ones(n));
    const DensityMatrix rho_f = projector(fermions, all_ones(n));
    for (double g : gamma_grid) {
        const double pb = coincidence_from_density(evolve_density(rho_b, layout, spec, g, rotation).rho);
        const double pf = coincidence_from_density(evolve_density(rho_f, layout, spec, g, rotation).rho);
        curve.points.push_back({g, pb, pf, Method::lindblad});
    }
    return curve;
}

// ---------------------------------------------------------------------------

ReducedCouplerState coupler_x_rhs(const ReducedCouplerState& xs, double kappa, double gamma) {
    const auto& x = xs.x;
    const double r = std::numbers::sqrt2 * kappa;
    ReducedCouplerState d;
    d.x[0] = -2.0 * gamma * x[0] + 2.0 * r * (x[1] + x[2]);
    d.x[1] = -3.0 * gamma * x[1] + r * (x[5] + x[4] - x[0]);
    d.x[2] = -gamma * x[2] + r * (x[3] + x[4] - x[0]);
    d.x[3] = -2.0 * r * x[2];
    d.x[4] = -2.0 * gamma * x[4] - r * (x[1] + x[2]);
    d.x[5] = -4.0 * gamma * x[5] - 2.0 * r * x[1];
    return d;
}

ReducedCouplerState evolve_coupler_x(const SectionLayout& layout, double kappa, double gamma,
                                     const EvolutionOptions& options) {
    if (layout.rotation_mode != RotationMode::physical)
        throw ValidationError("evolve_coupler_x: the reduced system has no rotation stage; use a physical layout");
    const ModeNetworkSpec spec = ModeNetworkSpec::coupler(kappa);
    validate_layout(layout, spec);
    ReducedCouplerState xs;
    xs.x[0] = 1.0;
    SectionStats stats;
    double z = 0.0;
    for (const auto& section : layout.sections) {
        const double g = section.loss_on ? gamma : 0.0;
        auto rhs = [&](const ReducedCouplerState& s) { return coupler_x_rhs(s, kappa, g); };
        auto observe = [](double, const ReducedCouplerState&, const ReducedCouplerState&) {};
        xs = integrate_section(xs, z, section.length, section_rate_scale(spec, g), rhs, observe, options, stats);
        z += section.length;
    }
    return xs;
}

ReducedCouplerState reduced_coupler_state(const DensityMatrix& rho) {
    const FockBasis& b = rho.basis;
    if (b.n_modes() != 2 || b.statistics() != Statistics::boson || b.max_total() < 2)
        throw ValidationError("reduced_coupler_state: needs a bosonic two-mode basis with max_total >= 2");
    const std::size_t s11 = b.require_index({1, 1});
    const std::size_t s02 = b.require_index({0, 2});
    const std::size_t s20 = b.require_index({2, 0});
    const auto& r = rho.elements;
    ReducedCouplerState xs;
    xs.x[0] = r(s11, s11).real();
    xs.x[1] = (-kI * r(s02, s11)).real();
    xs.x[2] = (-kI * r(s20, s11)).real();
    xs.x[3] = r(s20, s20).real();
    xs.x[4] = r(s20, s02).real();
    xs.x[5] = r(s02, s02).real();
    return xs;
}

DensityMatrix embed_reduced_state(const ReducedCouplerState& xs) {
    const FockBasis b(2, 2, Statistics::boson);
    DensityMatrix rho{b, CMatrix::zeros(b.size())};
    const std::size_t s11 = b.require_index({1, 1});
    const std::size_t s02 = b.require_index({0, 2});
    const std::size_t s20 = b.require_index({2, 0});
    auto set = [&rho](std::size_t i, std::size_t j, cplx v) {
        rho.elements(i, j) = v;
        rho.elements(j, i) = std::conj(v);
    };
    set(s11, s11, xs.x[0]);
    set(s02, s11, kI * xs.x[1]);
    set(s20, s11, kI * xs.x[2]);
    set(s20, s20, xs.x[3]);
    set(s20, s02, xs.x[4]);
    set(s02, s02, xs.x[5]);
    return rho;
}

double coupler_closed_form(double kappa, double gamma, double l2, Statistics statistics) {
    if (!(kappa > 0.0) || !(gamma >= 0.0) || !(l2 > 0.0) || !std::isfinite(kappa + gamma + l2))
        throw ValidationError("coupler_closed_form: need kappa > 0, gamma >= 0, l2 > 0");
    const double decay = std::exp(-2.0 * gamma * l2);
    if (statistics == Statistics::fermion) return decay;
    const cplx omega = std::sqrt(cplx{kappa * kappa - 0.25 * gamma * gamma, 0.0});
    const cplx s = std::sin(omega * l2);
    const cplx c = std::cos(omega * l2);
    const cplx core = s * s - c * c;
    const cplx value = core * core * decay;
    if (std::abs(value.imag()) > 1e-10)
        throw NumericalError("coupler_closed_form: result has imaginary residue", std::abs(value.imag()));
    return value.real();
}

CoincidenceCurve sweep_closed_form(const ModeNetworkSpec& spec, const SectionLayout& layout,
                                   const std::vector<double>& gamma_grid) {
    const double kappa = spec.coupler_kappa();
    if (kappa == 0.0)
        throw ValidationError("closed_form method is only valid for the two-mode coupler with loss profile (0, 1)");
    const auto lossy = std::count_if(layout.sections.begin(), layout.sections.end(),
                                     [](const Section& s) { return s.loss_on; });
    if (lossy != 1) throw ValidationError("closed_form method needs exactly one lossy section");
    CoincidenceCurve curve = start_curve(spec, layout, gamma_grid);
    const double l2 = layout.lossy_length();
    for (double g : gamma_grid) {
        curve.points.push_back({g, coupler_closed_form(kappa, g, l2, Statistics::boson),
                                coupler_closed_form(kappa, g, l2, Statistics::fermion), Method::closed_form});
    }
    return curve;
}

}  // namespace ptsim
