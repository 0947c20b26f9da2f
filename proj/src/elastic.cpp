#include "qcf/elastic.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "qcf/errors.hpp"

namespace qcf {

void ElasticSpec::validate() const {
    if (!(mu > 0.0)) throw ValidationError("shear modulus mu must be positive");
    if (!(kappa_b > 0.0)) throw ValidationError("bulk modulus kappa_b must be positive");
    if (!(r0 > 0.0) || !(R0 > r0)) throw ValidationError("radii must satisfy 0 < r0 < R0");
    if (!std::isfinite(sigma0) || !std::isfinite(rho))
        throw ValidationError("sigma0 and rho must be finite");
}

Thetas solve_thetas(const ElasticSpec& spec) {
    spec.validate();
    const double r03 = spec.r0 * spec.r0 * spec.r0;
    const double R03 = spec.R0 * spec.R0 * spec.R0;
    const double k3 = 3.0 * spec.kappa_b;

    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    // theta1 - theta2 + theta3/r0^3 = 0        (displacement continuity)
    // 3k theta1 - 3k theta2 - 4mu theta3/r0^3 = -rho sigma0   (traction)
    // theta2 - theta3/R0^3 = 0                 (clamped boundary)
    A << 1.0, -1.0, 1.0 / r03,
         k3, -k3, -4.0 * spec.mu / r03,
         0.0, 1.0, -1.0 / R03;
    b << 0.0, -spec.rho * spec.sigma0, 0.0;
    const Eigen::Vector3d x = A.fullPivLu().solve(b);

    Thetas t{x(0), x(1), x(2)};

    const double closed = spec.rho * spec.sigma0 / (4.0 * spec.mu + k3) * (r03 / R03 - 1.0);
    const double scale = std::max(std::abs(closed), 1e-300);
    if (std::abs(t.theta1 - closed) > 1e-10 * std::max(scale, std::abs(spec.rho * spec.sigma0)))
        throw ConsistencyError("theta1 from the 3x3 system disagrees with the closed form");
    return t;
}

double displacement(const ElasticSpec& spec, const Thetas& t, double r) {
    if (r < 0.0 || r > spec.R0) throw ValidationError("radius outside [0, R0]");
    if (r <= spec.r0) return t.theta1 * r;
    return t.theta2 * r - t.theta3 / (r * r);
}

double traction_rr(const ElasticSpec& spec, const Thetas& t, double r) {
    if (r < 0.0 || r > spec.R0) throw ValidationError("radius outside [0, R0]");
    if (r <= spec.r0) return 3.0 * spec.kappa_b * t.theta1 + spec.rho * spec.sigma0;
    return 3.0 * spec.kappa_b * t.theta2 + 4.0 * spec.mu * t.theta3 / (r * r * r);
}

double energy_el(const ElasticSpec& spec) {
    const Thetas t = solve_thetas(spec);
    const double closed = 1.5 * spec.rho * spec.sigma0 * t.theta1;

    // Quadrature cross-check: (rho sigma0 / 2) * ball average of div y,
    // with div y = (r^2 y_r)'/r^2 integrated radially by midpoint panels
    // (the integrand 3 theta1 r^2 is quadratic, so 2-point Gauss is exact;
    // use a modest composite rule for robustness).
    const int n = 64;
    double integral = 0.0;  // integral of div y * r^2 dr over [0, r0]
    const double h = spec.r0 / n;
    for (int i = 0; i < n; ++i) {
        const double a = i * h, b = a + h;
        const double g1 = 0.5 * (a + b) - 0.5 * (b - a) / std::sqrt(3.0);
        const double g2 = 0.5 * (a + b) + 0.5 * (b - a) / std::sqrt(3.0);
        for (double r : {g1, g2}) {
            const double dr = 1e-6 * spec.r0;
            const double rm = std::max(r - dr, 0.0), rp = std::min(r + dr, spec.r0);
            const double div_y = (rp * rp * displacement(spec, t, rp) -
                                  rm * rm * displacement(spec, t, rm)) /
                                 ((rp - rm) * r * r);
            integral += 0.5 * (b - a) * div_y * r * r;
        }
    }
    const double r03 = spec.r0 * spec.r0 * spec.r0;
    const double quad = 0.5 * spec.rho * spec.sigma0 * 3.0 / r03 * integral;
    const double scale = std::max({std::abs(closed), std::abs(quad),
                                   std::abs(spec.rho * spec.sigma0), 1e-300});
    if (std::abs(closed - quad) > 1e-8 * scale)
        throw ConsistencyError("elastic energy closed form disagrees with quadrature");
    return closed;
}

double energy_el_infinite(const ElasticSpec& spec) {
    spec.validate();
    const double p = spec.rho * spec.sigma0;
    return -1.5 * p * p / (4.0 * spec.mu + 3.0 * spec.kappa_b);
}

double elastic_rel_error(const ElasticSpec& spec) {
    spec.validate();
    const double q = spec.r0 / spec.R0;
    return q * q * q;
}

TotalDefectEnergy total_defect_energy(const RadialDefectSolution& es, const ElasticSpec& el) {
    if (es.defect.rho != el.rho || es.defect.r0 != el.r0 || es.defect.R0 != el.R0)
        throw ValidationError("electrostatic and elastic inputs describe different defects");

    TotalDefectEnergy out;
    out.energy_es = energy_es(es);
    out.energy_el = energy_el(el);
    out.total = out.energy_es + out.energy_el;
    out.energy_es_infinite = energy_es_infinite(es.model, es.defect);
    out.energy_el_infinite = energy_el_infinite(el);
    out.residual_es = std::abs(out.energy_es - out.energy_es_infinite);
    out.residual_el = std::abs(out.energy_el - out.energy_el_infinite);
    const double denom = out.residual_es + out.residual_el;
    out.slow_term_share = denom > 0.0 ? out.residual_el / denom : 0.0;
    return out;
}

IsotropicModuli isotropic_moduli(const ElasticTensors& tensors) {
    double trace_iijj = 0.0, trace_ijij = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            trace_iijj += tensors.stiffness(i, i, j, j);
            trace_ijij += tensors.stiffness(i, j, i, j);
        }
    }
    IsotropicModuli m;
    m.kappa_b = trace_iijj / 9.0;
    m.mu = (3.0 * trace_ijij - trace_iijj) / 30.0;
    return m;
}

}  // namespace qcf
