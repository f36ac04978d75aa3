#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ptsim/error.hpp"
#include "ptsim/network.hpp"

using namespace ptsim;

namespace {

constexpr double kPi = std::numbers::pi;

ModeNetworkSpec chain3() {
    return ModeNetworkSpec(CMatrix{{0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}}, {0.0, 1.0, 0.0});
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(ModeNetworkSpec(CMatrix{{0.0, 1.0}, {0.5, 0.0}}, {0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(ModeNetworkSpec(CMatrix{{0.0, 1.0}, {1.0, 0.0}}, {0.0, -1.0}), ValidationError);
    CHECK_THROWS_AS(ModeNetworkSpec(CMatrix{{0.0, 1.0}, {1.0, 0.0}}, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(ModeNetworkSpec(CMatrix{{0.0, 1.0}, {1.0, 0.0}}, {1.0}), ValidationError);
    CHECK_THROWS_AS(ModeNetworkSpec(CMatrix(2, 3), {0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(ModeNetworkSpec::coupler(0.0), ValidationError);
    CHECK_NOTHROW(ModeNetworkSpec(CMatrix{{0.0, cplx{0.0, 1.0}}, {cplx{0.0, -1.0}, 0.0}}, {0.0, 1.0}));
}

TEST_CASE("coupler shape detection") {
    CHECK(ModeNetworkSpec::coupler(0.7).coupler_kappa() == 0.7);
    CHECK(chain3().coupler_kappa() == 0.0);
    CHECK(ModeNetworkSpec(CMatrix{{0.0, 1.0}, {1.0, 0.0}}, {1.0, 1.0}).coupler_kappa() == 0.0);
    CHECK(ModeNetworkSpec(CMatrix{{0.0, cplx{0.0, 1.0}}, {cplx{0.0, -1.0}, 0.0}}, {0.0, 1.0}).coupler_kappa() == 0.0);
}

TEST_CASE("effective Hamiltonian") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    CHECK(max_abs_diff(build_effective_hamiltonian(c, 0.0), CMatrix{{0.0, 1.0}, {1.0, 0.0}}) == 0.0);
    CHECK(max_abs_diff(build_effective_hamiltonian(c, 1.0), CMatrix{{0.0, 1.0}, {1.0, cplx{0.0, -1.0}}}) == 0.0);
    CHECK(max_abs_diff(build_effective_hamiltonian(chain3(), 2.0),
                       CMatrix{{0.0, 1.0, 0.0}, {1.0, cplx{0.0, -2.0}, 1.0}, {0.0, 1.0, 0.0}}) == 0.0);
    CHECK_THROWS_AS(build_effective_hamiltonian(c, -0.1), ValidationError);
}

TEST_CASE("spectral report") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    const SpectralReport r0 = spectral_report(c, 0.0);
    CHECK(r0.min_pair_gap == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(spectral_report(c, 2.0).min_pair_gap <= 1e-7);

    const SpectralReport r3 = spectral_report(c, 3.0);
    const auto [l1, l2] = oracle::coupler_eigenvalues(1.0, 3.0);
    REQUIRE(r3.eigenvalues.size() == 2);
    // Least-decaying first.
    CHECK(std::abs(r3.eigenvalues[0] - cplx{0.0, -(3.0 - std::sqrt(5.0)) / 2.0}) <= 1e-12);
    CHECK(std::abs(r3.eigenvalues[1] - cplx{0.0, -(3.0 + std::sqrt(5.0)) / 2.0}) <= 1e-12);
    CHECK(std::abs(r3.eigenvalues[0] - l1) <= 1e-12);
    CHECK(std::abs(r3.eigenvalues[1] - l2) <= 1e-12);

    for (double g : {0.0, 0.5, 1.9, 2.0, 2.1, 7.0}) CHECK(spectral_report(chain3(), g).max_imag <= 1e-10);
}

TEST_CASE("EP threshold on the coupler scales with kappa") {
    for (double kappa : {0.5, 1.0, 2.0}) {
        const ThresholdResult th = find_ep_threshold(ModeNetworkSpec::coupler(kappa), 0.0, 4.0 * kappa + 0.5);
        CHECK(std::abs(th.gamma - 2.0 * kappa) <= 1e-6);
    }
    CHECK(std::abs(find_ep_threshold(ModeNetworkSpec::coupler(0.5), 0.0, 4.0).gamma - 1.0) <= 1e-6);
}

TEST_CASE("EP threshold: not found cases") {
    const ModeNetworkSpec uniform(CMatrix{{0.0, 1.0}, {1.0, 0.0}}, {1.0, 1.0});
    CHECK_THROWS_AS(find_ep_threshold(uniform, 0.0, 4.0), NotFoundError);
    CHECK_THROWS_AS(find_ep_threshold(ModeNetworkSpec::coupler(1.0), 0.0, 1.5), NotFoundError);
    CHECK_THROWS_AS(find_ep_threshold(ModeNetworkSpec::coupler(1.0), 3.0, 1.0), ValidationError);
}

TEST_CASE("rotation at threshold for the coupler") {
    const ModeNetworkSpec c = ModeNetworkSpec::coupler(1.0);
    const ThresholdResult th = find_ep_threshold(c, 0.0, 4.0);
    const SchurFactorization f = rotation_at_threshold(c, th.gamma);
    CHECK(std::abs(f.triangular(0, 0) - cplx{0.0, -1.0}) <= 1e-9);
    CHECK(std::abs(f.triangular(1, 1) - cplx{0.0, -1.0}) <= 1e-9);
    CHECK(std::abs(std::abs(f.triangular(0, 1)) - 2.0) <= 1e-9);
    CHECK(std::abs(f.triangular(1, 0)) <= 1e-9);
    // Same subspaces as the 50:50 rotation.
    const CMatrix overlap = oracle::rotation_r().adjoint() * f.rotation;
    CHECK(std::abs(std::abs(overlap(0, 0)) - 1.0) <= 1e-9);
}

TEST_CASE("rotation at threshold for a Hermitian matrix is diagonalising") {
    const SchurFactorization f = rotation_at_threshold(ModeNetworkSpec::coupler(1.0), 0.0);
    CHECK(std::abs(f.triangular(0, 1)) <= 1e-10);
}

TEST_CASE("three-mode chain EP") {
    // The antisymmetric combination of the outer guides is dark; the rest is a
    // coupler with coupling sqrt(2), so the EP sits at 2 sqrt(2).
    const ThresholdResult th = find_ep_threshold(chain3(), 0.0, 5.0);
    CHECK(std::abs(th.gamma - 2.0 * std::sqrt(2.0)) <= 1e-6);
    const SchurFactorization f = rotation_at_threshold(chain3(), th.gamma);
    CHECK(max_below_diagonal(f.triangular) <= 1e-10);
    CHECK(max_abs_diff(f.rotation * f.triangular * f.rotation.adjoint(), build_effective_hamiltonian(chain3(), th.gamma)) <=
          1e-10);
}

TEST_CASE("layouts") {
    const SectionLayout phys = coupler_physical_layout(1.0, kPi / 4.0);
    CHECK(phys.sections.size() == 3);
    CHECK(phys.total_length() == doctest::Approx(9.0 * kPi / 4.0));
    CHECK(phys.lossy_length() == doctest::Approx(kPi / 4.0));
    CHECK(rotation_section_length(2.0) == doctest::Approx(kPi / 8.0));
    CHECK(inverse_rotation_section_length(2.0) == doctest::Approx(7.0 * kPi / 8.0));
    CHECK_NOTHROW(validate_layout(phys, ModeNetworkSpec::coupler(1.0)));
    CHECK_THROWS_AS(validate_layout(phys, ModeNetworkSpec::coupler(2.0)), ValidationError);

    SectionLayout bad = phys;
    bad.sections[1].length = -1.0;
    CHECK_THROWS_AS(validate_layout(bad, ModeNetworkSpec::coupler(1.0)), ValidationError);
    bad = phys;
    bad.sections[0].loss_on = true;
    CHECK_THROWS_AS(validate_layout(bad, ModeNetworkSpec::coupler(1.0)), ValidationError);
    CHECK_THROWS_AS(validate_layout(SectionLayout{}, ModeNetworkSpec::coupler(1.0)), ValidationError);
    CHECK_NOTHROW(validate_layout(coupler_abstract_layout(0.3), ModeNetworkSpec::coupler(1.0)));
}
