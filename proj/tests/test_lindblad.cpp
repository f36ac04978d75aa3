#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ptsim/error.hpp"
#include "ptsim/lindblad.hpp"

using namespace ptsim;

namespace {

constexpr double kPi = std::numbers::pi;

double element(const DensityMatrix& rho, const Occupation& a, const Occupation& b) {
    return rho.elements(rho.basis.require_index(a), rho.basis.require_index(b)).real();
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

}  // namespace

TEST_CASE("Fock basis enumeration") {
    const FockBasis b(2, 2, Statistics::boson);
    REQUIRE(b.size() == 6);
    const std::vector<Occupation> expected{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}};
    CHECK(b.states() == expected);
    CHECK(FockBasis(2, 2, Statistics::fermion).size() == 4);
    CHECK(FockBasis(3, 3, Statistics::boson).size() == 20);
    CHECK(FockBasis(3, 3, Statistics::fermion).size() == 8);
    CHECK_FALSE(b.index_of({2, 1}).has_value());
    CHECK_THROWS_AS(b.require_index({3, 0}), ValidationError);
}

TEST_CASE("independent density-matrix equations after Hermitian symmetry") {
    // n real diagonal entries plus n(n-1)/2 complex upper entries, counted as
    // n(n+1)/2 independent equations.
    auto count = [](std::size_t n) { return n * (n + 1) / 2; };
    CHECK(count(FockBasis(2, 2, Statistics::fermion).size()) == 10);
    CHECK(count(FockBasis(2, 2, Statistics::boson).size()) == 21);
}

TEST_CASE("bosonic ladder operator") {
    const FockBasis b(1, 2, Statistics::boson);
    const CMatrix a = annihilation_matrix(b, 0);
    CHECK(a(0, 1) == cplx{1.0, 0.0});
    CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) <= 1e-15);

    const FockBasis b2(2, 3, Statistics::boson);
    const CMatrix a0 = annihilation_matrix(b2, 0);
    const CMatrix a1 = annihilation_matrix(b2, 1);
    const CMatrix c = commutator(a0, a0.adjoint());
    for (std::size_t k = 0; k < b2.size(); ++k) {
        const auto& s = b2.state(k);
        if (s[0] + s[1] <= 2) CHECK(std::abs(c(k, k) - 1.0) <= 1e-14);
    }
    CHECK(commutator(a0, a1).max_abs() == 0.0);
}

TEST_CASE("fermionic sign convention and anticommutation") {
    const FockBasis f(2, 2, Statistics::fermion);
    const CMatrix a1 = annihilation_matrix(f, 0);
    const CMatrix a2 = annihilation_matrix(f, 1);
    CHECK(a2(f.require_index({1, 0}), f.require_index({1, 1})) == cplx{-1.0, 0.0});
    CHECK(a1(f.require_index({0, 1}), f.require_index({1, 1})) == cplx{1.0, 0.0});
    const CMatrix id = CMatrix::identity(4);
    CHECK(max_abs_diff(anticommutator(a1, a1.adjoint()), id) == 0.0);
    CHECK(max_abs_diff(anticommutator(a2, a2.adjoint()), id) == 0.0);
    CHECK(anticommutator(a1, a2.adjoint()).max_abs() == 0.0);
    CHECK(anticommutator(a1, a2).max_abs() == 0.0);
}

TEST_CASE("induced Fock operator of the 50:50 rotation") {
    const FockBasis b(2, 2, Statistics::boson);
    const CMatrix g = induced_fock_operator(b, oracle::rotation_r());
    CHECK(unitarity_defect(g) <= 1e-14);
    // One photon per port bunches completely.
    const std::size_t in = b.require_index({1, 1});
    CHECK(std::abs(g(in, in)) <= 1e-15);
    CHECK(std::norm(g(b.require_index({2, 0}), in)) == doctest::Approx(0.5));

    const FockBasis f(2, 2, Statistics::fermion);
    const CMatrix gf = induced_fock_operator(f, oracle::rotation_r());
    CHECK(std::abs(std::abs(gf(f.require_index({1, 1}), f.require_index({1, 1}))) - 1.0) <= 1e-15);
}

TEST_CASE("generator: vacuum is dark and the lossless limit preserves purity") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    const FockBasis b(2, 2, Statistics::boson);
    const CMatrix h = fock_hamiltonian(b, c.coupling());
    CHECK(lindblad_rhs(projector(b, {0, 0}), h, loss_jumps(b, c, 1.7)).max_abs() == 0.0);

    std::mt19937_64 rng(6);
    CMatrix psi(6, 1);
    for (auto& z : psi.data()) z = {std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)};
    double norm = 0.0;
    for (auto z : psi.data()) norm += std::norm(z);
    psi *= cplx{1.0 / std::sqrt(norm), 0.0};
    const CMatrix rho = psi * psi.adjoint();
    const CMatrix d = lindblad_rhs(rho, h, loss_jumps(b, c, 0.0));
    CHECK(std::abs((d * rho + rho * d).trace()) <= 1e-10);
}

TEST_CASE("generator: first line of the reduced coupler system at the input state") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    const FockBasis b(2, 2, Statistics::boson);
    const double gamma = 0.8;
    const CMatrix d = lindblad_rhs(projector(b, {1, 1}), fock_hamiltonian(b, c.coupling()), loss_jumps(b, c, gamma));
    const std::size_t k = b.require_index({1, 1});
    CHECK(std::abs(d(k, k) - cplx{-2.0 * gamma, 0.0}) <= 1e-14);
}

TEST_CASE("reduced coupler system: right-hand side at the input state") {
    const ReducedCouplerState d = coupler_x_rhs({{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}}, 1.0, 0.0);
    const double s = std::sqrt(2.0);
    const std::array<double, 6> expected{0.0, -s, -s, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(d.x[i] - expected[i]) <= 1e-15);
}

TEST_CASE("reduced coupler system embeds in the generic generator") {
    const FockBasis b(2, 2, Statistics::boson);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        ReducedCouplerState xs;
        for (auto& v : xs.x) v = u(rng);
        const double kappa = 1.0 + 0.5 * u(rng);
        const double gamma = 2.0 + u(rng);
        const ModeNetworkSpec c = ModeNetworkSpec::coupler(kappa);
        const DensityMatrix rho = embed_reduced_state(xs);
        const CMatrix d = lindblad_rhs(rho, fock_hamiltonian(b, c.coupling()), loss_jumps(b, c, gamma));
        const ReducedCouplerState generic = reduced_coupler_state(DensityMatrix{b, d});
        const ReducedCouplerState hand = coupler_x_rhs(xs, kappa, gamma);
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(generic.x[i] - hand.x[i]) <= 1e-12);
    }
}

TEST_CASE("reduced coupler system integrated over the lossy section") {
    // Lossless quarter period: X1 -> 0.
    ReducedCouplerState x{{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
    const double h = (kPi / 4.0) / 4000.0;
    for (int k = 0; k < 4000; ++k) {
        const auto k1 = coupler_x_rhs(x, 1.0, 0.0);
        ReducedCouplerState y = x;
        for (std::size_t i = 0; i < 6; ++i) y.x[i] += 0.5 * h * k1.x[i];
        const auto k2 = coupler_x_rhs(y, 1.0, 0.0);
        y = x;
        for (std::size_t i = 0; i < 6; ++i) y.x[i] += 0.5 * h * k2.x[i];
        const auto k3 = coupler_x_rhs(y, 1.0, 0.0);
        y = x;
        for (std::size_t i = 0; i < 6; ++i) y.x[i] += h * k3.x[i];
        const auto k4 = coupler_x_rhs(y, 1.0, 0.0);
        for (std::size_t i = 0; i < 6; ++i) x.x[i] += h / 6.0 * (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]);
    }
    CHECK(std::abs(x.x[0]) <= 1e-8);
}

TEST_CASE("coincidence from density matrices") {
    const FockBasis b(2, 2, Statistics::boson);
    CHECK(coincidence_from_density(projector(b, {1, 1})) == 1.0);
    CHECK(coincidence_from_density(projector(b, {2, 0})) == 0.0);
    CHECK(coincidence_from_density(projector(b, {0, 0})) == 0.0);
}

TEST_CASE("master equation through the coupler layout") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    const SectionLayout lay = coupler_physical_layout(1.0, kPi / 4.0);
    const FockBasis b(2, 2, Statistics::boson);
    const FockBasis f(2, 2, Statistics::fermion);
    const CMatrix id = CMatrix::identity(2);

    EvolutionResult r = evolve_density(projector(b, {1, 1}), lay, c, 0.0, id);
    CHECK(std::abs(element(r.rho, {1, 1}, {1, 1})) <= 1e-8);
    CHECK(r.boundaries.size() == 5);

    r = evolve_density(projector(b, {1, 1}), lay, c, 2.0, id);
    CHECK(std::abs(element(r.rho, {1, 1}, {1, 1}) - std::exp(-kPi)) <= 1e-6);

    for (double g : {0.0, 0.5, 2.0, 3.7}) {
        const EvolutionResult rf = evolve_density(projector(f, {1, 1}), lay, c, g, id);
        CHECK(std::abs(element(rf.rho, {1, 1}, {1, 1}) - std::exp(-2.0 * g * kPi / 4.0)) <= 1e-8);
        const EvolutionResult rb = evolve_density(projector(b, {1, 1}), lay, c, g, id);
        CHECK(std::abs(element(rb.rho, {1, 1}, {1, 1}) - oracle::coupler_boson(1.0, g, kPi / 4.0)) <= 1e-6);
        for (const auto& s : rb.boundaries) {
            const DensityDiagnostics d = diagnose(s);
            CHECK(std::abs(d.trace - 1.0) <= 1e-8);
            CHECK(d.hermiticity_defect <= 1e-10);
            CHECK(d.min_eigenvalue >= -1e-8);
        }
    }
}

TEST_CASE("fermionic full-occupation element decouples at every step") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    const FockBasis f(2, 2, Statistics::fermion);
    const std::size_t k = f.require_index({1, 1});
    double worst = 0.0;
    EvolutionOptions opts;
    opts.on_step = [&](const StepObservation& o) {
        worst = std::max(worst, std::abs(o.drho(k, k).real() + 2.0 * o.gamma * o.rho(k, k).real()));
    };
    evolve_density(projector(f, {1, 1}), coupler_physical_layout(1.0, kPi / 4.0), c, 1.3, CMatrix::identity(2), opts);
    CHECK(worst <= 1e-10);
}

TEST_CASE("abstract rotation in Fock space matches the physical layout") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    const FockBasis b(2, 2, Statistics::boson);
    for (double g : {0.4, 2.0, 3.1}) {
        const double phys =
            coincidence_from_density(evolve_density(projector(b, {1, 1}), coupler_physical_layout(1.0, kPi / 4.0), c,
                                                    g, CMatrix::identity(2))
                                         .rho);
        const double abst = coincidence_from_density(
            evolve_density(projector(b, {1, 1}), coupler_abstract_layout(kPi / 4.0), c, g, oracle::rotation_r()).rho);
        CHECK(std::abs(phys - abst) <= 1e-7);
    }
}

TEST_CASE("RK4 convergence order") {
    const SectionLayout lay = coupler_physical_layout(1.0, kPi / 4.0);
    auto x1 = [&](std::size_t steps) {
        EvolutionOptions o;
        o.fixed_steps = steps;
        return evolve_coupler_x(lay, 1.0, 1.0, o).x[0];
    };
    const double ref = x1(4096);
    const double ratio = std::abs(x1(16) - ref) / std::abs(x1(32) - ref);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("closed-form coupler coincidences") {
    CHECK(std::abs(coupler_closed_form(1.0, 0.0, kPi / 4.0, Statistics::boson)) <= 1e-15);
    CHECK(coupler_closed_form(1.0, 2.0, kPi / 4.0, Statistics::boson) == doctest::Approx(std::exp(-kPi)).epsilon(1e-12));
    CHECK(coupler_closed_form(1.0, 2.0, kPi / 4.0, Statistics::fermion) ==
          doctest::Approx(std::exp(-kPi)).epsilon(1e-12));
    const double pf3 = coupler_closed_form(1.0, 3.0, kPi / 4.0, Statistics::fermion);
    CHECK(pf3 == doctest::Approx(0.00898).epsilon(1e-3));
    CHECK(coupler_closed_form(1.0, 3.0, kPi / 4.0, Statistics::boson) > pf3);
    for (double g = 0.0; g <= 4.0; g += 0.37)
        CHECK(std::abs(coupler_closed_form(1.0, g, 0.9, Statistics::boson) - oracle::coupler_boson(1.0, g, 0.9)) <=
              1e-12);
}

TEST_CASE("reduced system matches the generic evolution on random parameters") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const FockBasis b(2, 2, Statistics::boson);
    for (int k = 0; k < 5; ++k) {
        const double kappa = 0.5 + u(rng);
        const double gamma = 4.0 * kappa * u(rng);
        const double l2 = (0.2 + u(rng)) / kappa;
        const SectionLayout lay = coupler_physical_layout(kappa, l2);
        const double generic = element(
            evolve_density(projector(b, {1, 1}), lay, ModeNetworkSpec::coupler(kappa), gamma, CMatrix::identity(2)).rho,
            {1, 1}, {1, 1});
        CHECK(std::abs(evolve_coupler_x(lay, kappa, gamma).x[0] - generic) <= 1e-8);
    }
}

TEST_CASE("sweep_lindblad and sweep_closed_form") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    const SectionLayout lay = coupler_physical_layout(1.0, kPi / 4.0);
    const auto grid = uniform_grid(0.0, 4.0, 5);
    const CoincidenceCurve l = sweep_lindblad(c, lay, CMatrix::identity(2), grid);
    const CoincidenceCurve cf = sweep_closed_form(c, lay, grid);
    REQUIRE(l.points.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(l.points[k].method == Method::lindblad);
        CHECK(cf.points[k].method == Method::closed_form);
        CHECK(std::abs(l.points[k].p_boson - cf.points[k].p_boson) <= 1e-6);
        CHECK(std::abs(l.points[k].p_fermion - cf.points[k].p_fermion) <= 1e-6);
    }
    const ModeNetworkSpec chain(CMatrix{{0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}}, {0.0, 1.0, 0.0});
    CHECK_THROWS_AS(sweep_closed_form(chain, coupler_abstract_layout(1.0), grid), ValidationError);
}

TEST_CASE("three-mode chain: master equation agrees with scattering") {
    const ModeNetworkSpec chain(CMatrix{{0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}}, {0.0, 1.0, 0.0});
    const SectionLayout lay = coupler_abstract_layout(0.6);
    const CMatrix r = protocol_rotation(chain, lay, 0.0, 5.0);
    const auto grid = uniform_grid(0.0, 5.0, 4);
    const CoincidenceCurve sc = sweep_gamma(chain, lay, r, grid);
    const CoincidenceCurve me = sweep_lindblad(chain, lay, r, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(std::abs(sc.points[k].p_boson - me.points[k].p_boson) <= 1e-6);
        CHECK(std::abs(sc.points[k].p_fermion - me.points[k].p_fermion) <= 1e-6);
    }
}
