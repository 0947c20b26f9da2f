#ifndef QCF_HOMOGENIZED_HPP
#define QCF_HOMOGENIZED_HPP

#include <complex>
#include <string>

namespace qcf {

enum class Regime {
    case1,          // gamma > 0, l0 > l1: pure imaginary roots, monotone decay
    case2,          // gamma > 0, l0 = l1: confluent double root
    case3,          // l0 < |l1|: complex roots, oscillatory decay
    non_integrable  // real roots; rejected for field evaluation
};

std::string to_string(Regime r);

/// Constant-coefficient corrector model built from the cell moments
/// (lambda, alpha, gamma). Immutable after build_model.
struct HomogenizedModel {
    double lambda = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    std::complex<double> l1;  // Re >= 0; 1/l1^2 = gamma/lambda
    double l0 = 0.0;          // 1/l0^4 = 4 alpha^2 / lambda
    std::complex<double> kappa_plus;   // Im >= 0
    std::complex<double> kappa_minus;  // Im >= 0
    double k_plus = 0.0;   // -i kappa_plus, Cases 1/2 only
    double k_minus = 0.0;  // -i kappa_minus, Cases 1/2 only
    Regime regime = Regime::non_integrable;

    double inv_l1_sq() const { return gamma / lambda; }
    double inv_l0_4() const { return 4.0 * alpha * alpha / lambda; }
    /// Source rescaling b = -2 alpha b_c / lambda.
    double source_scale() const { return -2.0 * alpha / lambda; }
};

HomogenizedModel build_model(double lambda, double alpha, double gamma);

/// Fundamental solution E_u of (Lap^2 - (2/l1^2) Lap + 1/l0^4) E_u = delta.
double green_u(const HomogenizedModel& model, double r);

/// Associated potential kernel E_phi = (lambda/2alpha)[Lap E_u - (2/l1^2) E_u].
double green_phi(const HomogenizedModel& model, double r);

/// Absolute finite-difference residual of the fourth-order radial ODE
/// applied to r*E_u(r); O(h^2) and -> 0 away from the origin.
double ode_residual(const HomogenizedModel& model, double r, double h);

struct DecaySummary {
    double rate = 0.0;          // slowest exponential decay of |u|, |phi|
    double decay_length = 0.0;  // 1/rate
    int elastic_power = 2;      // |y| decays algebraically as 1/|x|^2
};

DecaySummary decay_summary(const HomogenizedModel& model);

}  // namespace qcf

#endif
