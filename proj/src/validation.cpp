#include "ptsim/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <numbers>
#include <random>

#include "ptsim/error.hpp"
#include "ptsim/interference.hpp"
#include "ptsim/lindblad.hpp"
#include "ptsim/linalg.hpp"
#include "ptsim/network.hpp"

namespace ptsim {
namespace {

struct Outcome {
    double worst = 0.0;
    std::string detail;
    bool skipped = false;
};

Outcome skip(std::string why) { return {0.0, std::move(why), true}; }

class Suite {
public:
    void run(const std::string& name, double tolerance, const std::function<Outcome()>& body) {
        CheckResult r;
        r.name = name;
        r.tolerance = tolerance;
        try {
            const Outcome o = body();
            r.worst = o.worst;
            r.detail = o.detail;
            r.skipped = o.skipped;
            r.passed = o.skipped || o.worst <= tolerance;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = e.what();
        }
        report_.checks.push_back(std::move(r));
    }
    ValidationReport take() { return std::move(report_); }

private:
    ValidationReport report_;
};

CMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double radius = 1.0) {
    std::uniform_real_distribution<double> u(-radius, radius);
    CMatrix m(n, n);
    for (auto& z : m.data()) z = {u(rng), u(rng)};
    return m;
}

// Sum over all n! permutations; runtime oracle for the Ryser kernel.
cplx naive_permanent(const CMatrix& a) {
    std::vector<std::size_t> perm(a.rows());
    std::iota(perm.begin(), perm.end(), 0);
    cplx total = 0.0;
    do {
        cplx prod = 1.0;
        for (std::size_t i = 0; i < perm.size(); ++i) prod *= a(i, perm[i]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

// RK4 on dU/dz = A U, step count doubled until successive results agree.
CMatrix ode_exponential(const CMatrix& a, double t) {
    auto run = [&](std::size_t steps) {
        const double h = t / static_cast<double>(steps);
        CMatrix u = CMatrix::identity(a.rows());
        for (std::size_t k = 0; k < steps; ++k) {
            const CMatrix k1 = a * u;
            const CMatrix k2 = a * (u + k1 * cplx{0.5 * h, 0.0});
            const CMatrix k3 = a * (u + k2 * cplx{0.5 * h, 0.0});
            const CMatrix k4 = a * (u + k3 * cplx{h, 0.0});
            u += (k1 + k2 * cplx{2.0, 0.0} + k3 * cplx{2.0, 0.0} + k4) * cplx{h / 6.0, 0.0};
        }
        return u;
    };
    std::size_t steps = 64;
    CMatrix prev = run(steps);
    for (int i = 0; i < 12; ++i) {
        steps *= 2;
        CMatrix next = run(steps);
        if (max_abs_diff(next, prev) <= 1e-13) return next;
        prev = std::move(next);
    }
    return prev;
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

void kernel_checks(Suite& s) {
    s.run("matrix-core: Ryser permanent vs permutation sum (200 matrices, N<=6, relative)", 1e-12, [] {
        std::mt19937_64 rng(20240601);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const CMatrix a = random_matrix(rng, 1 + static_cast<std::size_t>(k % 6));
            const cplx ref = naive_permanent(a);
            worst = std::max(worst, std::abs(permanent(a) - ref) / std::max(std::abs(ref), 1e-300));
        }
        return Outcome{worst, {}};
    });
    s.run("matrix-core: mat_exp at the defective EP matrix vs RK4 oracle", 1e-8, [] {
        const CMatrix a = CMatrix{{0.0, 1.0}, {1.0, cplx{0.0, -2.0}}} * (-kI);
        return Outcome{max_abs_diff(mat_exp(a, 1.0), ode_exponential(a, 1.0)), {}};
    });
    s.run("matrix-core: Schur reconstruction/unitarity/triangularity (1000 matrices, N<=8)", 1e-9, [] {
        std::mt19937_64 rng(77);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const CMatrix a = random_matrix(rng, 2 + static_cast<std::size_t>(k % 7));
            const SchurFactorization f = schur_decompose(a);
            worst = std::max({worst, unitarity_defect(f.rotation), max_below_diagonal(f.triangular),
                              max_abs_diff(f.rotation * f.triangular * f.rotation.adjoint(), a)});
        }
        return Outcome{worst, {}};
    });
    s.run("matrix-core: perm = det = diagonal product for triangular matrices (per row-norm product)", 1e-12, [] {
        std::mt19937_64 rng(5);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            CMatrix t = random_matrix(rng, 1 + static_cast<std::size_t>(k % 8));
            for (std::size_t i = 1; i < t.rows(); ++i)
                for (std::size_t j = 0; j < i; ++j) t(i, j) = 0.0;
            cplx prod = 1.0;
            double scale = 1.0;  // bound on every term of the Ryser sum
            for (std::size_t i = 0; i < t.rows(); ++i) {
                prod *= t(i, i);
                double row = 0.0;
                for (std::size_t j = 0; j < t.cols(); ++j) row += std::abs(t(i, j));
                scale *= row;
            }
            worst = std::max({worst, std::abs(permanent(t) - prod) / scale, std::abs(determinant(t) - prod) / scale});
        }
        return Outcome{worst, {}};
    });
    s.run("matrix-core: mat_exp semigroup property (4x4, entries in unit disk)", 1e-9, [] {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            CMatrix a(4, 4);
            for (auto& z : a.data()) z = std::polar(std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
            const double p = 2.0 * u(rng);
            const double q = 2.0 * u(rng);
            worst = std::max(worst, max_abs_diff(mat_exp(a, p) * mat_exp(a, q), mat_exp(a, p + q)));
        }
        return Outcome{worst, {}};
    });
}

}  // namespace

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ValidationReport run_validation(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    Suite s;
    const ModeNetworkSpec& spec = config.system;
    const SectionLayout& layout = config.layout;
    const double g_lo = config.sweep.gamma_min;
    const double g_hi = config.sweep.gamma_max;
    const std::vector<double> grid = uniform_grid(g_lo, g_hi, config.sweep.steps);
    const double kappa = spec.coupler_kappa();
    const bool coupler = kappa != 0.0;
    const double lossy_length = layout.lossy_length();

    kernel_checks(s);

    // ---- spectrum and propagators -------------------------------------------
    s.run("system-model: spectrum passivity max Im(lambda) over sweep grid", 1e-10, [&] {
        double worst = -1e300;
        for (double g : grid) worst = std::max(worst, spectral_report(spec, g).max_imag);
        return Outcome{std::max(worst, 0.0), fmt("max Im(lambda) = %.3g", worst)};
    });
    s.run("interference: section propagators unitary at gamma = 0", 1e-10, [&] {
        double worst = 0.0;
        for (const auto& sec : layout.sections) worst = std::max(worst, unitarity_defect(propagator(spec, 0.0, sec.length)));
        return Outcome{worst, {}};
    });
    s.run("interference: max singular value of layout propagator - 1 for gamma > 0", 1e-10, [&] {
        double worst = -1.0;
        for (double g : grid)
            if (g > 0.0) worst = std::max(worst, spectral_norm(layout_propagator(spec, layout, g)) - 1.0);
        return Outcome{std::max(worst, 0.0), fmt("max sigma - 1 = %.3g", worst)};
    });

    // ---- exceptional point -----------------------------------------------------
    std::optional<ThresholdResult> threshold;
    std::string threshold_error;
    try {
        threshold = find_ep_threshold(spec, g_lo, g_hi);
    } catch (const NotFoundError& e) {
        threshold_error = e.what();
    }
    s.run("system-model: EP located in sweep range", 0.0, [&] {
        if (!threshold) throw NotFoundError(threshold_error);
        return Outcome{0.0, "gamma_th = " + format_real(threshold->gamma) + ", gap = " + format_real(threshold->gap)};
    });
    if (coupler) {
        s.run("system-model: coupler EP at 2 kappa", 1e-6, [&] {
            if (!threshold) return skip("no EP in range");
            return Outcome{std::abs(threshold->gamma - 2.0 * kappa), {}};
        });
    }
    s.run("system-model: Schur invariants at gamma_th", 1e-9, [&] {
        if (!threshold) return skip("no EP in range");
        const CMatrix h = build_effective_hamiltonian(spec, threshold->gamma);
        const SchurFactorization f = rotation_at_threshold(spec, threshold->gamma);
        return Outcome{std::max({unitarity_defect(f.rotation), max_below_diagonal(f.triangular),
                                 max_abs_diff(f.rotation * f.triangular * f.rotation.adjoint(), h)}),
                       {}};
    });
    s.run("interference: sandwiched propagator at gamma_th is upper triangular", 1e-9, [&] {
        if (!threshold) return skip("no EP in range");
        const CMatrix r = rotation_at_threshold(spec, threshold->gamma).rotation;
        const double z = lossy_length > 0.0 ? lossy_length : 1.0;
        return Outcome{max_below_diagonal(sandwiched_propagator(spec, threshold->gamma, z, r)), {}};
    });
    s.run("interference: |perm - det| of sandwiched propagator at gamma_th", 1e-8, [&] {
        if (!threshold) return skip("no EP in range");
        const CMatrix r = rotation_at_threshold(spec, threshold->gamma).rotation;
        const double z = lossy_length > 0.0 ? lossy_length : 1.0;
        const CMatrix u1 = sandwiched_propagator(spec, threshold->gamma, z, r);
        return Outcome{std::abs(permanent(u1) - determinant(u1)), {}};
    });

    // ---- coincidence curves ------------------------------------------------------
    std::optional<CMatrix> rotation;
    std::string rotation_error;
    try {
        rotation = protocol_rotation(spec, layout, g_lo, g_hi);
    } catch (const Error& e) {
        rotation_error = e.what();
    }
    std::optional<CoincidenceCurve> scattering;
    if (rotation) scattering = sweep_gamma(spec, layout, *rotation, grid);

    std::optional<CrossingResult> crossing;
    std::string crossing_error;
    if (rotation) {
        try {
            crossing = find_crossing(spec, layout, *rotation, g_lo, g_hi);
        } catch (const Error& e) {
            crossing_error = e.what();
        }
    } else {
        crossing_error = rotation_error;
    }

    s.run("interference: boson/fermion crossing coincides with the EP", 1e-6, [&] {
        if (!crossing) throw NotFoundError(crossing_error);
        if (!threshold) return skip("no EP in range");
        return Outcome{std::abs(crossing->gamma - threshold->gamma),
                       "crossing = " + format_real(crossing->gamma) + ", slopes (bos, ferm) = (" +
                           format_real(crossing->slope_boson) + ", " + format_real(crossing->slope_fermion) + ")"};
    });
    s.run("interference: P_bos < P_ferm below and P_bos > P_ferm above the crossing (violations)", 0.0, [&] {
        if (!crossing || !scattering) throw NotFoundError(crossing_error);
        const double guard = 1e-9 * (g_hi - g_lo);
        int violations = 0;
        double min_margin = 1e300;
        for (const auto& p : scattering->points) {
            const double d = p.p_boson - p.p_fermion;
            if (p.gamma < crossing->gamma - guard) {
                if (!(d < 0.0)) ++violations;
                min_margin = std::min(min_margin, -d);
            } else if (p.gamma > crossing->gamma + guard) {
                if (!(d > 0.0)) ++violations;
                min_margin = std::min(min_margin, d);
            }
        }
        return Outcome{static_cast<double>(violations), fmt("smallest margin %.3g", min_margin)};
    });
    s.run("interference: fermionic coincidence equals exp(2 Im tr(H_eff) L_loss)", 1e-9, [&] {
        if (!scattering) throw NotFoundError(rotation_error);
        double worst = 0.0;
        for (const auto& p : scattering->points) {
            const double expected =
                std::exp(2.0 * build_effective_hamiltonian(spec, p.gamma).trace().imag() * lossy_length);
            worst = std::max(worst, std::abs(p.p_fermion - expected));
        }
        return Outcome{worst, {}};
    });
    s.run("interference: probabilities within [0, 1]", 0.0, [&] {
        if (!scattering) throw NotFoundError(rotation_error);
        int bad = 0;
        for (const auto& p : scattering->points)
            for (double v : {p.p_boson, p.p_fermion})
                if (v < 0.0 || v > 1.0 + 1e-9) ++bad;
        return Outcome{static_cast<double>(bad), {}};
    });

    if (coupler) {
        const double l2 = lossy_length;
        s.run("interference: physical vs abstract rotation curves (coupler)", 1e-9, [&] {
            const SectionLayout phys = coupler_physical_layout(kappa, l2);
            const SectionLayout abst = coupler_abstract_layout(l2);
            const CMatrix r = protocol_rotation(spec, abst, g_lo, std::max(g_hi, 4.0 * kappa));
            const CoincidenceCurve a = sweep_gamma(spec, phys, CMatrix::identity(2), grid);
            const CoincidenceCurve b = sweep_gamma(spec, abst, r, grid);
            double worst = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                worst = std::max({worst, std::abs(a.points[k].p_boson - b.points[k].p_boson),
                                  std::abs(a.points[k].p_fermion - b.points[k].p_fermion)});
            }
            return Outcome{worst, {}};
        });
        s.run("interference: scattering vs closed form over sweep grid (coupler)", 1e-9, [&] {
            if (!scattering) throw NotFoundError(rotation_error);
            const CoincidenceCurve cf = sweep_closed_form(spec, layout, grid);
            double worst = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                worst = std::max({worst, std::abs(cf.points[k].p_boson - scattering->points[k].p_boson),
                                  std::abs(cf.points[k].p_fermion - scattering->points[k].p_fermion)});
            }
            return Outcome{worst, {}};
        });
    }

    // ---- master equation ---------------------------------------------------------
    const std::vector<double> coarse = uniform_grid(g_lo, g_hi, 21);
    double trace_dev = 0.0;
    double herm_dev = 0.0;
    double min_eig = 0.0;
    double decoupling = 0.0;
    std::optional<CoincidenceCurve> lindblad;
    std::string lindblad_error = rotation_error;
    if (rotation) {
        try {
            const std::size_t n = spec.n_modes();
            const FockBasis bosons(n, n, Statistics::boson);
            const FockBasis fermions(n, n, Statistics::fermion);
            const Occupation ones(n, 1);
            double weight_sum = 0.0;
            for (double w : spec.loss_profile()) weight_sum += w;
            const std::size_t full = fermions.require_index(ones);
            EvolutionOptions fermion_opts;
            fermion_opts.on_step = [&](const StepObservation& o) {
                const double lhs = o.drho(full, full).real();
                const double rhs = -2.0 * o.gamma * weight_sum * o.rho(full, full).real();
                decoupling = std::max(decoupling, std::abs(lhs - rhs));
            };
            CoincidenceCurve curve;
            curve.spec_digest = spec_digest(spec, layout);
            for (double g : coarse) {
                const EvolutionResult rb = evolve_density(projector(bosons, ones), layout, spec, g, *rotation);
                const EvolutionResult rf =
                    evolve_density(projector(fermions, ones), layout, spec, g, *rotation, fermion_opts);
                for (const EvolutionResult* r : {&rb, &rf}) {
                    for (const auto& b : r->boundaries) {
                        const DensityDiagnostics d = diagnose(b);
                        trace_dev = std::max(trace_dev, std::abs(d.trace - 1.0));
                        herm_dev = std::max(herm_dev, d.hermiticity_defect);
                        min_eig = std::min(min_eig, d.min_eigenvalue);
                    }
                }
                curve.points.push_back(
                    {g, coincidence_from_density(rb.rho), coincidence_from_density(rf.rho), Method::lindblad});
            }
            lindblad = std::move(curve);
        } catch (const Error& e) {
            lindblad_error = e.what();
        }
    }

    s.run("lindblad: scattering vs master equation, 21-point grid, both statistics", 1e-6, [&] {
        if (!lindblad) throw NumericalError(lindblad_error, 0.0);
        const CoincidenceCurve sc = sweep_gamma(spec, layout, *rotation, coarse);
        double worst = 0.0;
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            worst = std::max({worst, std::abs(sc.points[k].p_boson - lindblad->points[k].p_boson),
                              std::abs(sc.points[k].p_fermion - lindblad->points[k].p_fermion)});
        }
        return Outcome{worst, {}};
    });
    if (coupler) {
        s.run("lindblad: master equation vs closed form, 21-point grid, both statistics", 1e-6, [&] {
            if (!lindblad) throw NumericalError(lindblad_error, 0.0);
            const CoincidenceCurve cf = sweep_closed_form(spec, layout, coarse);
            double worst = 0.0;
            for (std::size_t k = 0; k < coarse.size(); ++k) {
                worst = std::max({worst, std::abs(cf.points[k].p_boson - lindblad->points[k].p_boson),
                                  std::abs(cf.points[k].p_fermion - lindblad->points[k].p_fermion)});
            }
            return Outcome{worst, {}};
        });
    }
    s.run("lindblad: trace conservation at section boundaries", 1e-8, [&] {
        if (!lindblad) throw NumericalError(lindblad_error, 0.0);
        return Outcome{trace_dev, {}};
    });
    s.run("lindblad: Hermiticity at section boundaries", 1e-10, [&] {
        if (!lindblad) throw NumericalError(lindblad_error, 0.0);
        return Outcome{herm_dev, {}};
    });
    s.run("lindblad: negative eigenvalue depth of rho at section boundaries", 1e-8, [&] {
        if (!lindblad) throw NumericalError(lindblad_error, 0.0);
        return Outcome{std::max(0.0, -min_eig), fmt("min eigenvalue %.3g", min_eig)};
    });
    s.run("lindblad: fermionic full-occupation element decouples (per step)", 1e-10, [&] {
        if (!lindblad) throw NumericalError(lindblad_error, 0.0);
        return Outcome{decoupling, {}};
    });

    s.run("lindblad: six-variable coupler system vs generic master equation (20 triples)", 1e-8, [] {
        std::mt19937_64 rng(1234);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double kap = 0.5 + 1.5 * u(rng);
            const double gam = 4.0 * kap * u(rng);
            const double l2 = (0.2 + 1.8 * u(rng)) / kap;
            const ModeNetworkSpec c = ModeNetworkSpec::coupler(kap);
            const SectionLayout lay = coupler_physical_layout(kap, l2);
            const FockBasis b(2, 2, Statistics::boson);
            const double generic =
                evolve_density(projector(b, {1, 1}), lay, c, gam, CMatrix::identity(2)).rho.elements(
                    b.require_index({1, 1}), b.require_index({1, 1})).real();
            worst = std::max(worst, std::abs(evolve_coupler_x(lay, kap, gam).x[0] - generic));
        }
        return Outcome{worst, {}};
    });
    s.run("lindblad: six-variable right-hand side embeds in the generic generator", 1e-12, [] {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const FockBasis b(2, 2, Statistics::boson);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            ReducedCouplerState xs;
            for (auto& v : xs.x) v = u(rng);
            const double kap = 0.5 + std::abs(u(rng));
            const double gam = 2.0 * std::abs(u(rng));
            const ModeNetworkSpec c = ModeNetworkSpec::coupler(kap);
            const DensityMatrix rho = embed_reduced_state(xs);
            const CMatrix d = lindblad_rhs(rho, fock_hamiltonian(b, c.coupling()), loss_jumps(b, c, gam));
            const ReducedCouplerState generic = reduced_coupler_state(DensityMatrix{b, d});
            const ReducedCouplerState hand = coupler_x_rhs(xs, kap, gam);
            for (std::size_t i = 0; i < 6; ++i) worst = std::max(worst, std::abs(generic.x[i] - hand.x[i]));
        }
        return Outcome{worst, {}};
    });

    s.run("lindblad: RK4 error ratio under step halving, in [12, 20] (reported as distance from 16)", 4.0, [] {
        // Coupler at gamma = 1, compared against a 4096-step reference.
        const double kap = 1.0;
        const double gam = 1.0;
        const SectionLayout lay = coupler_physical_layout(kap, std::numbers::pi / 4.0);
        auto x1 = [&](std::size_t steps) {
            EvolutionOptions o;
            o.fixed_steps = steps;
            return evolve_coupler_x(lay, kap, gam, o).x[0];
        };
        const double ref = x1(4096);
        const double e_coarse = std::abs(x1(16) - ref);
        const double e_fine = std::abs(x1(32) - ref);
        const double ratio = e_coarse / e_fine;
        return Outcome{std::abs(ratio - 16.0), fmt("ratio %.3f", ratio)};
    });

    ValidationReport report = s.take();
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void print_report(const ValidationReport& report, std::ostream& out) {
    int passed = 0;
    for (const auto& c : report.checks) {
        const char* tag = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
        char buf[64];
        std::snprintf(buf, sizeof buf, "worst=%.3e tol=%.1e", c.worst, c.tolerance);
        out << '[' << tag << "] " << c.name << "  " << buf;
        if (!c.detail.empty()) out << "  (" << c.detail << ')';
        out << '\n';
        if (c.passed) ++passed;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d/%zu checks passed in %.2f s\n", passed, report.checks.size(), report.seconds);
    out << buf;
}

}  // namespace ptsim
