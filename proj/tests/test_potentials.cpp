#include <doctest.h>

#include "fgash/potentials.hpp"
#include "support.hpp"

using namespace fgash;
using namespace fgash::potentials;

namespace {

Eigen::VectorXd x1(double v) { return Eigen::VectorXd::Constant(1, v); }

} // namespace

TEST_CASE("diagonal entries match the closed forms") {
    SimpleCrossing simple;
    ExtendedCoupling extended;
    DualCrossing dual;

    CHECK(eval_diagonal(simple, 0, x1(0.0)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_diagonal(extended, 0, x1(0.0)) == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(eval_diagonal(dual, 1, x1(0.0)) == doctest::Approx(-0.05).epsilon(1e-15));
    CHECK(eval_diagonal(simple, 0, x1(1.3)) == doctest::Approx(std::tanh(1.3)));
    CHECK(eval_diagonal(simple, 1, x1(1.3)) == doctest::Approx(-std::tanh(1.3)));
}

TEST_CASE("coupling entries match the closed forms") {
    SimpleCrossing simple;
    DualCrossing dual;

    CHECK(eval_coupling(simple, x1(3.7)) == Complex(1.0, 0.0));
    CHECK(eval_coupling(dual, x1(0.0)).real() == doctest::Approx(0.015).epsilon(1e-15));
    CHECK(std::abs(eval_coupling(dual, x1(40.0))) < 1e-12);
    CHECK(std::abs(eval_coupling(dual, x1(-45.0))) < 1e-12);
}

TEST_CASE("built-in couplings are real") {
    SimpleCrossing simple;
    DualCrossing dual;
    ExtendedCoupling extended;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        const Eigen::VectorXd q = x1(u(gen));
        CHECK(eval_coupling(simple, q).imag() == 0.0);
        CHECK(eval_coupling(dual, q).imag() == 0.0);
        CHECK(eval_coupling(extended, q).imag() == 0.0);
    }
}

TEST_CASE("v10 is the conjugate of v01 structurally") {
    testsupport::ConstantPotential pot(0.2, -0.1, Complex(0.3, 0.4));
    const Eigen::VectorXd q = x1(1.0);
    CHECK(pot.v10(q) == std::conj(pot.v01(q)));
    CHECK(pot.coupling_element(0, 1, q) == pot.v01(q));
    CHECK(pot.coupling_element(1, 0, q) == std::conj(pot.v01(q)));
}

TEST_CASE("analytic gradients vs central differences") {
    SimpleCrossing simple;
    DualCrossing dual;
    ExtendedCoupling extended;
    const DiabaticPotential* models[] = {&simple, &dual, &extended};

    CHECK(gradient(simple, 0, x1(0.0))[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gradient(simple, 1, x1(0.0))[0] == doctest::Approx(-1.0).epsilon(1e-14));

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const DiabaticPotential* pot : models) {
        for (int l = 0; l < 2; ++l) {
            for (int i = 0; i < 50; ++i) {
                const Eigen::VectorXd q = x1(u(gen));
                const Eigen::VectorXd a = gradient(*pot, l, q);
                const Eigen::VectorXd f = testsupport::fd_gradient(*pot, l, q);
                CHECK(std::abs(a[0] - f[0]) <= 1e-6 * (std::abs(a[0]) + 1e-3));
            }
        }
    }
}

TEST_CASE("analytic hessians vs second finite differences") {
    SimpleCrossing simple;
    DualCrossing dual;
    ExtendedCoupling extended;
    const DiabaticPotential* models[] = {&simple, &dual, &extended};

    CHECK(hessian(simple, 0, x1(0.0))(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (int i = 0; i < 50; ++i) {
        CHECK(hessian(dual, 0, x1(u(gen)))(0, 0) == 0.0);
    }

    for (const DiabaticPotential* pot : models) {
        for (int l = 0; l < 2; ++l) {
            for (int i = 0; i < 50; ++i) {
                const Eigen::VectorXd q = x1(u(gen));
                const double a = hessian(*pot, l, q)(0, 0);
                const double f = testsupport::fd_hessian(*pot, l, q)(0, 0);
                CHECK(std::abs(a - f) <= 1e-4 * (std::abs(a) + 1e-2));
            }
        }
    }
}

TEST_CASE("hessian output is symmetric (m = 2 custom potential)") {
    testsupport::HarmonicPotential pot(2);
    Eigen::VectorXd q(2);
    q << 0.3, -1.1;
    const Eigen::MatrixXd H = hessian(pot, 0, q);
    CHECK(H.rows() == 2);
    CHECK((H - H.transpose()).norm() == 0.0);
}

TEST_CASE("mirror symmetry v00 = -v11 for simple and extended") {
    SimpleCrossing simple;
    ExtendedCoupling extended;
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const Eigen::VectorXd q = x1(u(gen));
        CHECK(eval_diagonal(simple, 0, q) == -eval_diagonal(simple, 1, q));
        CHECK(eval_diagonal(extended, 0, q) == -eval_diagonal(extended, 1, q));
    }
}

TEST_CASE("contract violations") {
    SimpleCrossing simple;
    Eigen::VectorXd q2(2);
    q2 << 0.0, 1.0;
    CHECK_THROWS_AS(eval_diagonal(simple, 0, q2), ContractError);
    CHECK_THROWS_AS(eval_coupling(simple, q2), ContractError);
    CHECK_THROWS_AS(gradient(simple, 2, x1(0.0)), ContractError);
    CHECK_THROWS_AS(hessian(simple, -1, x1(0.0)), ContractError);
}

TEST_CASE("model factory handles tags and overrides") {
    auto simple = make_potential("simple");
    CHECK(simple->v01(x1(0.0)) == Complex(1.0, 0.0));

    auto scaled = make_potential("simple", {{"coupling", 0.2}});
    CHECK(scaled->v01(x1(1.0)) == Complex(0.2, 0.0));

    auto dual = make_potential("dual", {{"c", 0.03}});
    CHECK(dual->v01(x1(0.0)).real() == doctest::Approx(0.03));

    auto extended = make_potential("extended", {{"steepness", 5.0}});
    CHECK(extended->v00(x1(1.0)) == doctest::Approx(std::atan(5.0) + M_PI / 2));

    CHECK_THROWS_AS(make_potential("tully"), ContractError);
}
