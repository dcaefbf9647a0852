#include "catch_amalgamated.hpp"

#include "tclsim/error.hpp"
#include "tclsim/grid_model.hpp"

#include <cmath>
#include <complex>

using namespace tclsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

StateSpace from_A(const Eigen::MatrixXd& A)
{
    StateSpace ss;
    ss.A = A;
    ss.B = Eigen::VectorXd::Zero(A.rows());
    ss.B(0) = -1.0;
    ss.C = Eigen::RowVectorXd::Zero(A.rows());
    ss.C(0) = 1.0;
    ss.n = static_cast<std::size_t>(A.rows()) - 1;
    return ss;
}

GenDynamics one_state(double a, double b, double c)
{
    GenDynamics g;
    g.A_hat = Eigen::MatrixXd::Constant(1, 1, a);
    g.B_hat = Eigen::MatrixXd::Constant(1, 1, b);
    g.C_hat = Eigen::MatrixXd::Constant(1, 1, c);
    return g;
}

// Brute-force L1 norm: RK4 on x' = A x from x(0) = B, trapezoid on |C x|.
double l1_by_stepping(const StateSpace& ss, double h, double t_end)
{
    Eigen::VectorXd x = ss.B;
    double prev = std::abs(ss.C.dot(x));
    double total = 0.0;
    for (double t = 0.0; t < t_end; t += h) {
        const Eigen::VectorXd k1 = ss.A * x;
        const Eigen::VectorXd k2 = ss.A * (x + 0.5 * h * k1);
        const Eigen::VectorXd k3 = ss.A * (x + 0.5 * h * k2);
        const Eigen::VectorXd k4 = ss.A * (x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double cur = std::abs(ss.C.dot(x));
        total += 0.5 * (prev + cur) * h;
        prev = cur;
    }
    return total;
}

}  // namespace

TEST_CASE("inertia-only system is a scalar first-order lag")
{
    const StateSpace ss = build_combined_system(GenDynamics::none(), 10.0, 1.0);
    REQUIRE(ss.dim() == 1);
    CHECK(ss.A(0, 0) == -0.1);
    CHECK(ss.B(0) == -0.1);
    CHECK(ss.C(0) == 1.0);
}

TEST_CASE("one-state generation block assembles the expected matrices")
{
    const StateSpace ss = build_combined_system(one_state(-1.0, 1.0, 1.0), 5.0, 0.5);
    REQUIRE(ss.dim() == 2);
    CHECK_THAT(ss.A(0, 0), WithinAbs(-0.1, 1e-15));
    CHECK_THAT(ss.A(0, 1), WithinAbs(0.2, 1e-15));
    CHECK(ss.A(1, 0) == 1.0);
    CHECK(ss.A(1, 1) == -1.0);
    CHECK_THAT(ss.B(0), WithinAbs(-0.2, 1e-15));
    CHECK(ss.B(1) == 0.0);
    CHECK(ss.C(1) == 0.0);
}

TEST_CASE("dimension mismatch names the offending block")
{
    GenDynamics g = one_state(-1.0, 1.0, 1.0);
    g.B_hat = Eigen::MatrixXd::Zero(2, 1);
    try {
        build_combined_system(g, 5.0, 0.5);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("B_hat") != std::string::npos);
    }
    CHECK_THROWS_AS(build_combined_system(GenDynamics::none(), 0.0, 1.0), ConfigError);
}

TEST_CASE("eigenvalue test agrees with the quadratic formula")
{
    CHECK(is_hurwitz(build_combined_system(GenDynamics::none(), 10.0, 1.0)));

    Eigen::MatrixXd rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    CHECK_FALSE(is_hurwitz(from_A(rot)));
    CHECK_THROWS_AS(certify_hurwitz(from_A(rot)), NumericError);

    // Positive feedback through the generation state: det < 0, one root in the right half plane.
    const StateSpace pos = build_combined_system(one_state(-1.0, 1.0, 1.0), 5.0, 0.5);
    const double tr = pos.A.trace();
    const double det = pos.A.determinant();
    const double root = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
    CHECK_THAT(spectral_abscissa(pos), WithinAbs(root, 1e-12));
    CHECK(is_hurwitz(pos) == (root < 0.0));

    // Negative feedback version is stable.
    const StateSpace neg = build_combined_system(one_state(-1.0, 1.0, -1.0), 5.0, 0.5);
    const double tr2 = neg.A.trace();
    const double det2 = neg.A.determinant();
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr2 * tr2 - 4.0 * det2));
    CHECK_THAT(spectral_abscissa(neg), WithinAbs((0.5 * (tr2 + disc)).real(), 1e-12));
    CHECK(is_hurwitz(neg));
}

TEST_CASE("governor with secondary control satisfies the Routh-Hurwitz test")
{
    for (const auto& [M, D, Tg, Kp, Ki] : {std::tuple{60.0, 5.0, 5.0, 20.0, 1.0}, std::tuple{10.0, 1.0, 1.0, 100.0, 5.0},
                                          std::tuple{60.0, 5.0, 0.5, 10.0, 0.1}}) {
        const StateSpace ss = build_combined_system(GenDynamics::governor_with_secondary(Tg, Kp, Ki), M, D);
        // Characteristic polynomial M Tg s^3 + (M + D Tg) s^2 + (D + Kp) s + Ki.
        const double a3 = M * Tg, a2 = M + D * Tg, a1 = D + Kp, a0 = Ki;
        const bool routh = a3 > 0 && a2 > 0 && a1 > 0 && a0 > 0 && a2 * a1 > a3 * a0;
        CHECK(is_hurwitz(ss) == routh);
        const Eigen::VectorXcd ev = ss.A.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            const std::complex<double> s = ev(i);
            const std::complex<double> p = ((a3 * s + a2) * s + a1) * s + a0;
            CHECK(std::abs(p) < 1e-8 * (a3 + a2 + a1 + a0));
        }
    }
}

TEST_CASE("equilibrium frequency")
{
    const StateSpace lag = build_combined_system(GenDynamics::none(), 10.0, 1.0);
    CHECK_THAT(equilibrium_frequency(lag, 1.0), WithinAbs(-1.0, 1e-15));
    CHECK(equilibrium_frequency(lag, 0.0) == 0.0);

    const StateSpace gov = build_combined_system(GenDynamics::governor_with_secondary(), 60.0, 5.0);
    CHECK_THAT(equilibrium_frequency(gov, 1.0), WithinAbs(0.0, 1e-12));
    CHECK_THAT(equilibrium_frequency(gov, -7.5), WithinAbs(0.0, 1e-12));
}

TEST_CASE("one-norm of a first-order lag is 1/D")
{
    for (double D : {0.1, 1.0, 10.0}) {
        const StateSpace ss = certify_hurwitz(build_combined_system(GenDynamics::none(), 10.0, D));
        CHECK_THAT(one_norm(ss), WithinRel(1.0 / D, 1e-6));
    }
    const StateSpace a = build_combined_system(GenDynamics::none(), 3.0, 2.0);
    const StateSpace b = build_combined_system(GenDynamics::none(), 3.0, 4.0);
    CHECK_THAT(one_norm(b), WithinRel(0.5 * one_norm(a), 1e-8));
}

TEST_CASE("one-norm of an oscillatory system matches brute-force integration")
{
    const StateSpace gov = build_combined_system(GenDynamics::governor_with_secondary(), 60.0, 5.0);
    const OneNormResult r = one_norm_detailed(gov);
    CHECK(r.sign_changes > 0);
    CHECK_THAT(r.value, WithinRel(l1_by_stepping(gov, 1e-3, r.t_max + 200.0), 1e-5));
    CHECK_THAT(one_norm(gov, 1e-4), WithinAbs(one_norm(gov, 1e-8), 1e-4 * r.value));
}

TEST_CASE("one-norm rejects unstable systems")
{
    Eigen::MatrixXd A(1, 1);
    A << 0.5;
    CHECK_THROWS_AS(one_norm(from_A(A)), NumericError);
}

TEST_CASE("exact propagation")
{
    const StateSpace lag = build_combined_system(GenDynamics::none(), 10.0, 1.0);
    GridState x0 = GridState::Zero(1);
    CHECK(propagate(lag, x0, 3.0, 0.0) == x0);
    for (double t : {0.5, 5.0, 50.0, 500.0})
        CHECK_THAT(propagate(lag, x0, 1.0, t)(0), WithinAbs(-(1.0 - std::exp(-0.1 * t)), 1e-13));

    const StateSpace gov = build_combined_system(GenDynamics::governor_with_secondary(), 60.0, 5.0);
    GridState x(3);
    x << 0.01, -0.3, 0.2;
    SECTION("semigroup")
    {
        const GridState once = propagate(gov, x, 2.0, 0.7);
        const GridState twice = propagate(gov, propagate(gov, x, 2.0, 0.3), 2.0, 0.4);
        CHECK((once - twice).norm() < 1e-12);
    }
    SECTION("linearity in the input")
    {
        const GridState z = GridState::Zero(3);
        const GridState a = propagate(gov, z, 1.5, 2.0);
        const GridState b = propagate(gov, z, 3.0, 2.0);
        CHECK((2.0 * a - b).norm() < 1e-13);
    }
    SECTION("cached discretization agrees")
    {
        const Discretization dz(gov, 0.01);
        CHECK((dz.step(x, 2.0) - propagate(gov, x, 2.0, 0.01)).norm() < 1e-14);
    }
}
