#include "tclsim/grid_model.hpp"

#include "tclsim/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace tclsim {

GenDynamics GenDynamics::none()
{
    GenDynamics g;
    g.A_hat.resize(0, 0);
    g.B_hat.resize(0, 1);
    g.C_hat.resize(1, 0);
    g.D_hat = 0.0;
    return g;
}

GenDynamics GenDynamics::governor_with_secondary(double Tg, double Kp, double Ki)
{
    if (!(Tg > 0.0))
        throw ConfigError("governor time constant Tg must be positive");
    GenDynamics g;
    g.A_hat.resize(2, 2);
    g.A_hat << -1.0 / Tg, 1.0 / Tg,
                0.0,      0.0;
    g.B_hat.resize(2, 1);
    g.B_hat << Kp / Tg, Ki;
    g.C_hat.resize(1, 2);
    g.C_hat << -1.0, 0.0;
    g.D_hat = 0.0;
    return g;
}

StateSpace build_combined_system(const GenDynamics& gen, double M, double D)
{
    if (!(M > 0.0))
        throw ConfigError("inertia M must be positive");
    if (!(D > 0.0))
        throw ConfigError("damping D must be positive");

    const Eigen::Index n = gen.A_hat.rows();
    if (gen.A_hat.cols() != n)
        throw ConfigError("A_hat must be square (got " + std::to_string(gen.A_hat.rows()) + "x" +
                          std::to_string(gen.A_hat.cols()) + ")");
    if (gen.B_hat.rows() != n || gen.B_hat.cols() != 1)
        throw ConfigError("B_hat must be " + std::to_string(n) + "x1 (got " +
                          std::to_string(gen.B_hat.rows()) + "x" + std::to_string(gen.B_hat.cols()) + ")");
    if (gen.C_hat.rows() != 1 || gen.C_hat.cols() != n)
        throw ConfigError("C_hat must be 1x" + std::to_string(n) + " (got " +
                          std::to_string(gen.C_hat.rows()) + "x" + std::to_string(gen.C_hat.cols()) + ")");

    StateSpace ss;
    ss.M = M;
    ss.D = D;
    ss.n = static_cast<std::size_t>(n);
    ss.A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    ss.A(0, 0) = (gen.D_hat - D) / M;
    if (n > 0) {
        ss.A.block(0, 1, 1, n) = gen.C_hat / M;
        ss.A.block(1, 0, n, 1) = gen.B_hat;
        ss.A.block(1, 1, n, n) = gen.A_hat;
    }
    ss.B = Eigen::VectorXd::Zero(n + 1);
    ss.B(0) = -1.0 / M;
    ss.C = Eigen::RowVectorXd::Zero(n + 1);
    ss.C(0) = 1.0;
    return ss;
}

double spectral_abscissa(const StateSpace& ss)
{
    Eigen::EigenSolver<Eigen::MatrixXd> es(ss.A, false);
    if (es.info() != Eigen::Success)
        throw NumericError("eigenvalue iteration did not converge");
    return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const StateSpace& ss, double tol)
{
    return spectral_abscissa(ss) < -tol;
}

StateSpace certify_hurwitz(StateSpace ss, double tol)
{
    const double abscissa = spectral_abscissa(ss);
    if (!(abscissa < -tol))
        throw NumericError("grid model is not Hurwitz (max eigenvalue real part " +
                           std::to_string(abscissa) + ")");
    ss.certified = true;
    return ss;
}

double equilibrium_frequency(const StateSpace& ss, double u_const)
{
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ss.A);
    if (!lu.isInvertible())
        throw NumericError("A is singular; equilibrium is not unique");
    const Eigen::VectorXd x = lu.solve(-ss.B * u_const);
    return x(0);
}

namespace {

// Augmented exponential exp([A B; 0 0] dt) = [Phi Gamma; 0 1].
void zoh(const StateSpace& ss, double dt, Eigen::MatrixXd& Phi, Eigen::VectorXd& Gamma)
{
    const Eigen::Index m = ss.A.rows();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(m + 1, m + 1);
    aug.topLeftCorner(m, m) = ss.A * dt;
    aug.topRightCorner(m, 1) = ss.B * dt;
    const Eigen::MatrixXd E = aug.exp();
    Phi = E.topLeftCorner(m, m);
    Gamma = E.topRightCorner(m, 1);
}

}  // namespace

GridState propagate(const StateSpace& ss, const GridState& x, double u_const, double dt)
{
    if (!(dt >= 0.0))
        throw ConfigError("propagate: dt must be non-negative");
    if (x.size() != static_cast<Eigen::Index>(ss.dim()))
        throw ConfigError("propagate: state length " + std::to_string(x.size()) + " != " +
                          std::to_string(ss.dim()));
    if (dt == 0.0)
        return x;
    Eigen::MatrixXd Phi;
    Eigen::VectorXd Gamma;
    zoh(ss, dt, Phi, Gamma);
    GridState out = Phi * x + Gamma * u_const;
    if (!out.allFinite())
        throw NumericError("propagate: non-finite state (overflow)");
    return out;
}

Discretization::Discretization(const StateSpace& ss, double dt) : dt_(dt)
{
    if (!(dt > 0.0))
        throw ConfigError("discretization step must be positive");
    zoh(ss, dt, Phi_, Gamma_);
}

OneNormResult one_norm_detailed(const StateSpace& ss, double tol)
{
    if (!(tol > 0.0))
        throw ConfigError("one_norm: tol must be positive");
    const double abscissa = spectral_abscissa(ss);
    if (!(abscissa < 0.0))
        throw NumericError("one_norm: system is not Hurwitz, the integral may diverge");
    const double decay = -abscissa;

    // Horizon: double until ||e^{At}|| <= 1e-3 and the tail bound is below tol/2.
    const double normC = ss.C.norm();
    const double normB = ss.B.norm();
    double t_max = 1.0 / decay;
    double tail = 0.0;
    for (int iter = 0;; ++iter) {
        const Eigen::MatrixXd E = (ss.A * t_max).exp();
        const double nE = E.operatorNorm();
        tail = normC * nE * normB / decay;
        if (nE <= 1e-3 && tail <= tol / 2.0)
            break;
        if (iter > 200)
            throw NumericError("one_norm: impulse response does not decay");
        t_max *= 2.0;
    }

    // Sample g(t) = C e^{At} B on a uniform grid fine enough to resolve the
    // fastest mode, then bracket and refine the zero crossings.
    Eigen::EigenSolver<Eigen::MatrixXd> es(ss.A, false);
    const double fastest = es.eigenvalues().cwiseAbs().maxCoeff();
    std::size_t steps = 4096;
    steps = std::max(steps, static_cast<std::size_t>(std::ceil(t_max * fastest * 4.0)));
    steps = std::min<std::size_t>(steps, 2'000'000);
    const double h = t_max / static_cast<double>(steps);
    const Eigen::MatrixXd Phi_h = (ss.A * h).exp();

    auto g_from = [&](const Eigen::VectorXd& anchor, double tau) {
        return (ss.C * ((ss.A * tau).exp() * anchor))(0);
    };

    struct Segment {
        double a;
        Eigen::VectorXd anchor;  // e^{A a} B
    };
    std::vector<Segment> segments;
    segments.push_back({0.0, ss.B});

    Eigen::VectorXd v = ss.B;
    double g_prev = (ss.C * v)(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        Eigen::VectorXd v_next = Phi_h * v;
        const double g_next = (ss.C * v_next)(0);
        if ((g_prev < 0.0 && g_next > 0.0) || (g_prev > 0.0 && g_next < 0.0)) {
            // Bisection on [0, h] from the anchor v at t_{k-1}.
            double lo = 0.0, hi = h;
            const double s_lo = g_prev;
            for (int it = 0; it < 60 && hi - lo > 1e-15 * t_max; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g_from(v, mid);
                if ((gm < 0.0) == (s_lo < 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            const double root = static_cast<double>(k - 1) * h + 0.5 * (lo + hi);
            segments.push_back({root, (ss.A * (0.5 * (lo + hi))).exp() * v});
        }
        v = std::move(v_next);
        g_prev = g_next;
    }

    using boost::math::quadrature::gauss_kronrod;
    OneNormResult res;
    res.t_max = t_max;
    res.tail_bound = tail;
    res.sign_changes = segments.size() - 1;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const double a = segments[s].a;
        const double b = (s + 1 < segments.size()) ? segments[s + 1].a : t_max;
        if (!(b > a))
            continue;
        const Eigen::VectorXd& anchor = segments[s].anchor;
        double err = 0.0;
        double l1 = 0.0;
        const double val = gauss_kronrod<double, 31>::integrate(
            [&](double t) { return std::abs(g_from(anchor, t - a)); }, a, b, 15, 1e-13, &err, &l1);
        res.value += val;
        res.quadrature_error += err;
    }
    if (!std::isfinite(res.value))
        throw NumericError("one_norm: non-finite result");
    if (res.quadrature_error > tol / 2.0)
        throw NumericError("one_norm: quadrature error " + std::to_string(res.quadrature_error) +
                           " exceeds tol/2");
    return res;
}

double one_norm(const StateSpace& ss, double tol)
{
    return one_norm_detailed(ss, tol).value;
}

}  // namespace tclsim
