#pragma once

// Aggregate single-bus frequency dynamics: swing equation in feedback with
// linear generation dynamics, composed into one LTI system driven by the
// total demand.

#include <Eigen/Dense>

#include <cstddef>

namespace tclsim {

/// Linear generation dynamics with input omega and output mechanical power:
///   p_M = C_hat x_hat + D_hat omega,   x_hat' = A_hat x_hat + B_hat omega.
struct GenDynamics {
    Eigen::MatrixXd A_hat;  // n x n
    Eigen::MatrixXd B_hat;  // n x 1
    Eigen::MatrixXd C_hat;  // 1 x n
    double D_hat = 0.0;

    std::size_t order() const { return static_cast<std::size_t>(A_hat.rows()); }

    /// No generation states (pure inertia + damping).
    static GenDynamics none();

    /// Two-state turbine-governor with integral secondary control.
    /// States (p_g, p_i), p_M = -p_g:
    ///   p_g' = (-p_g + Kp*omega + p_i)/Tg,   p_i' = Ki*omega.
    static GenDynamics governor_with_secondary(double Tg = 5.0, double Kp = 20.0, double Ki = 1.0);
};

/// Combined system x' = A x + B u with x = (omega, x_hat), u = p_L + sum d_c,
/// output omega = C x.
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double M = 0.0;
    double D = 0.0;
    std::size_t n = 0;       // generation state dimension
    bool certified = false;  // set by certify_hurwitz()

    std::size_t dim() const { return n + 1; }
};

using GridState = Eigen::VectorXd;

/// Assemble A = [(D_hat - D)/M, C_hat/M; B_hat, A_hat], B = [-1/M; 0], C = [1 0 ... 0].
/// Throws ConfigError naming the offending block on dimension mismatch.
StateSpace build_combined_system(const GenDynamics& gen, double M, double D);

/// Largest real part over the eigenvalues of A. Throws NumericError when the
/// eigen solver does not converge.
double spectral_abscissa(const StateSpace& ss);

/// True iff every eigenvalue of A has real part < -tol.
bool is_hurwitz(const StateSpace& ss, double tol = 1e-9);

/// Returns a copy flagged certified; throws NumericError if not Hurwitz.
StateSpace certify_hurwitz(StateSpace ss, double tol = 1e-9);

/// First component of the equilibrium -A^{-1} B u. Throws NumericError if A is
/// singular.
double equilibrium_frequency(const StateSpace& ss, double u_const);

struct OneNormResult {
    double value = 0.0;
    double quadrature_error = 0.0;  // estimated error on [0, t_max]
    double tail_bound = 0.0;        // bound on the integral over [t_max, inf)
    double t_max = 0.0;
    std::size_t sign_changes = 0;
};

/// L1 norm of the impulse response, integral over [0, inf) of |C e^{At} B|.
/// Requires a Hurwitz system (throws NumericError otherwise).
OneNormResult one_norm_detailed(const StateSpace& ss, double tol = 1e-8);
double one_norm(const StateSpace& ss, double tol = 1e-8);

/// Exact zero-order-hold step: e^{A dt} x + (int_0^dt e^{A s} ds) B u.
GridState propagate(const StateSpace& ss, const GridState& x, double u_const, double dt);

/// Cached discretization for a fixed step, reused by the simulator.
class Discretization {
public:
    Discretization() = default;
    Discretization(const StateSpace& ss, double dt);

    double dt() const { return dt_; }
    GridState step(const GridState& x, double u) const { return Phi_ * x + Gamma_ * u; }
    const Eigen::MatrixXd& Phi() const { return Phi_; }
    const Eigen::VectorXd& Gamma() const { return Gamma_; }

private:
    double dt_ = 0.0;
    Eigen::MatrixXd Phi_;
    Eigen::VectorXd Gamma_;
};

}  // namespace tclsim
