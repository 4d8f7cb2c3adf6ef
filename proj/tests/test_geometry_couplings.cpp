#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "srl/couplings.hpp"

using namespace srl;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("decay kernel limits and frozen values") {
    // zero-separation limit is the single-atom rate, projection-independent
    CHECK(decay_kernel(0.0, 0.0) == 1.0);
    CHECK(decay_kernel(0.0, 0.37) == 1.0);
    CHECK(decay_kernel(0.0, 1.0) == 1.0);
    CHECK(decay_kernel(1e-9, 0.5) == doctest::Approx(1.0).epsilon(1e-12));

    // sin(pi) = 0 kills two terms: F(pi, 0) = -3/(2 pi^2)
    CHECK(decay_kernel(kPi, 0.0) == doctest::Approx(-3.0 / (2.0 * kPi * kPi)).epsilon(1e-13));
    // F(2 pi, 0) = 3/(8 pi^2)
    CHECK(decay_kernel(2.0 * kPi, 0.0) ==
          doctest::Approx(3.0 / (8.0 * kPi * kPi)).epsilon(1e-13));

    CHECK_THROWS_AS(decay_kernel(-0.1, 0.0), std::domain_error);
    CHECK_THROWS_AS(decay_kernel(1.0, 1.5), std::domain_error);
}

TEST_CASE("shift kernel frozen values, divergence and decay") {
    // G(2 pi, 0) = (3/4)(-1/(2 pi) + 1/(8 pi^3))
    const double expected = 0.75 * (-1.0 / (2.0 * kPi) + 1.0 / (8.0 * kPi * kPi * kPi));
    CHECK(shift_kernel(2.0 * kPi, 0.0) == doctest::Approx(expected).epsilon(1e-13));

    // 1/xi^3 dominance close in
    CHECK(shift_kernel(0.01 * 2.0 * kPi, 0.0) > 100.0);

    // far field
    CHECK(std::abs(shift_kernel(1e4 * 2.0 * kPi, 0.0)) < 1e-3);
    CHECK(std::abs(decay_kernel(1e4 * 2.0 * kPi, 0.0)) < 1e-3);

    CHECK_THROWS_AS(shift_kernel(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(shift_kernel(-1.0, 0.0), std::domain_error);
}

TEST_CASE("series and direct evaluations agree across the switch region") {
    for (double cos2 : {0.0, 0.3, 1.0}) {
        for (int i = 0; i <= 50; ++i) {
            const double xi = 1e-2 * std::pow(10.0, i / 50.0);  // [1e-2, 1e-1]
            const double fd = decay_kernel_direct(xi, cos2);
            const double fs = decay_kernel_series(xi, cos2);
            CHECK(std::abs(fs - fd) <= 1e-10 * std::abs(fd));
            const double gd = shift_kernel_direct(xi, cos2);
            const double gs = shift_kernel_series(xi, cos2);
            CHECK(std::abs(gs - gd) <= 1e-10 * std::abs(gd));
        }
    }
}

TEST_CASE("decay kernel collapses to sinc at the magic projection") {
    // cos2 = 1/3 zeroes the 1/xi^2, 1/xi^3 bracket
    std::mt19937 rng(20240517);
    std::uniform_real_distribution<double> uni(0.05, 30.0);
    for (int k = 0; k < 5; ++k) {
        const double xi = uni(rng);
        CHECK(decay_kernel(xi, 1.0 / 3.0) ==
              doctest::Approx(std::sin(xi) / xi).epsilon(1e-12));
    }
}

TEST_CASE("kernels are smooth: centered differences converge at second order") {
    auto second_order = [](auto&& f, double xi) {
        const double h = 1e-3 * xi;
        const double d1 = (f(xi + h) - f(xi - h)) / (2 * h);
        const double d2 = (f(xi + h / 2) - f(xi - h / 2)) / h;
        const double d3 = (f(xi + h / 4) - f(xi - h / 4)) / (h / 2);
        const double e1 = std::abs(d1 - d2);
        const double e2 = std::abs(d2 - d3);
        if (e2 < 1e-14) return true;  // already at roundoff
        const double ratio = e1 / e2;
        return ratio > 2.5 && ratio < 6.0;
    };
    for (double xi : {0.4, 1.3, 5.0, 12.0}) {
        CHECK(second_order([](double x) { return decay_kernel(x, 0.2); }, xi));
        CHECK(second_order([](double x) { return shift_kernel(x, 0.2); }, xi));
    }
}

TEST_CASE("equidistant chain geometry") {
    const AtomGeometry two = equidistant_chain(2, 0.5);
    CHECK(two.size() == 2);
    CHECK(two.positions[0].norm() == 0.0);
    CHECK(two.positions[1].x() == doctest::Approx(0.5));
    // dipole perpendicular to the axis
    const Eigen::Vector3d r = (two.positions[1] - two.positions[0]).normalized();
    CHECK(std::abs(two.dipole.dot(r)) < 1e-15);

    const AtomGeometry five = equidistant_chain(5, 4.0);
    double max_dist = 0.0;
    for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) {
            max_dist = std::max(max_dist, (five.positions[i] - five.positions[j]).norm());
        }
    }
    CHECK(max_dist == doctest::Approx(16.0));

    const AtomGeometry three = equidistant_chain(3, 0.7);
    const double d01 = (three.positions[0] - three.positions[1]).norm();
    const double d12 = (three.positions[1] - three.positions[2]).norm();
    const double d02 = (three.positions[0] - three.positions[2]).norm();
    CHECK(d01 == doctest::Approx(0.7));
    CHECK(d12 == doctest::Approx(0.7));
    CHECK(d02 == doctest::Approx(1.4));

    CHECK_THROWS_AS(equidistant_chain(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(equidistant_chain(3, 0.0), std::invalid_argument);
    CHECK_NOTHROW(equidistant_chain(1, 0.0));  // spacing unused for one atom
}

TEST_CASE("geometry validation") {
    AtomGeometry geom = equidistant_chain(2, 1.0);
    geom.dipole = Eigen::Vector3d(0.0, 0.0, 1.0 + 1e-6);
    CHECK_THROWS_AS(geom.validate(), std::invalid_argument);

    AtomGeometry dup;
    dup.positions = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
    CHECK_THROWS_AS(build_couplings(dup), std::invalid_argument);
}

TEST_CASE("coupling matrices: structure, symmetry, limits") {
    const CouplingMatrices one = build_couplings(equidistant_chain(1, 1.0));
    CHECK(one.size() == 1);
    CHECK(one.decay(0, 0) == 1.0);
    CHECK(one.shift(0, 0) == 0.0);

    // random cloud: exact symmetry of both matrices
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    AtomGeometry cloud;
    for (int i = 0; i < 5; ++i) {
        cloud.positions.emplace_back(uni(rng), uni(rng), uni(rng));
    }
    cloud.dipole = Eigen::Vector3d(0.3, -0.5, 1.1).normalized();
    const CouplingMatrices cpl = build_couplings(cloud);
    CHECK((cpl.decay - cpl.decay.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((cpl.shift - cpl.shift.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    for (int i = 0; i < 5; ++i) {
        CHECK(cpl.decay(i, i) == 1.0);
        CHECK(cpl.shift(i, i) == 0.0);
    }

    // equidistant chain symmetry of nearest-neighbour entries
    const CouplingMatrices chain = build_couplings(equidistant_chain(3, 0.8));
    CHECK(chain.decay(0, 1) == doctest::Approx(chain.decay(1, 2)).epsilon(1e-15));
    CHECK(chain.shift(0, 1) == doctest::Approx(chain.shift(1, 2)).epsilon(1e-15));

    // noninteracting regime at separation 100: residual couplings below the
    // percent level, vanishing entirely by 1e4
    const CouplingMatrices far = build_couplings(equidistant_chain(2, 100.0));
    CHECK(std::abs(far.decay(0, 1)) < 1e-2);
    CHECK(std::abs(far.shift(0, 1)) < 1e-2);
    const CouplingMatrices very_far = build_couplings(equidistant_chain(2, 1e4));
    CHECK(std::abs(very_far.decay(0, 1)) < 1e-3);
    CHECK(std::abs(very_far.shift(0, 1)) < 1e-3);
}

TEST_CASE("disable_interactions") {
    CouplingMatrices cpl = build_couplings(equidistant_chain(2, 0.3));
    CHECK(std::abs(cpl.decay(0, 1)) > 0.1);  // strongly coupled before
    const CouplingMatrices off = disable_interactions(cpl);
    CHECK(off.decay.isApprox(Eigen::MatrixXd::Identity(2, 2)));
    CHECK(off.shift.isZero(0.0));
    const CouplingMatrices twice = disable_interactions(off);
    CHECK(twice.decay.isApprox(off.decay));
    CHECK(twice.shift.isZero(0.0));

    const CouplingMatrices single = disable_interactions(build_couplings(equidistant_chain(1, 1.0)));
    CHECK(single.decay(0, 0) == 1.0);
    CHECK(single.shift(0, 0) == 0.0);
}
