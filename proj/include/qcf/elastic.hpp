#ifndef QCF_ELASTIC_HPP
#define QCF_ELASTIC_HPP

#include "qcf/defectcell.hpp"
#include "qcf/unitcell.hpp"

namespace qcf {

/// Isotropic dilatational defect problem on the finite ball: eigenstress
/// rho*sigma0*I inside the core r <= r0, clamped boundary at R0.
struct ElasticSpec {
    double mu = 0.0;       // shear modulus, Hartree/Bohr^3
    double kappa_b = 0.0;  // bulk modulus, Hartree/Bohr^3
    double sigma0 = 0.0;   // eigenstress magnitude (B = sigma0 I)
    double rho = 0.0;      // source amplitude
    double r0 = 0.0;
    double R0 = 0.0;
    void validate() const;
};

struct Thetas {
    double theta1 = 0.0;  // uniform core strain
    double theta2 = 0.0;  // outer linear part
    double theta3 = 0.0;  // outer 1/r^2 part
};

/// Solves the interface/boundary system and verifies the closed form
/// theta1 = rho*sigma0/(4mu+3kappa)*(r0^3/R0^3 - 1).
Thetas solve_thetas(const ElasticSpec& spec);

/// Radial displacement y_r(r): theta1*r inside, theta2*r - theta3/r^2 outside.
double displacement(const ElasticSpec& spec, const Thetas& t, double r);

/// Radial traction sigma_rr(r); includes the eigenstress inside the core.
double traction_rr(const ElasticSpec& spec, const Thetas& t, double r);

/// Elastic contribution E_d^el(R0) = (3 rho sigma0 / 2) theta1,
/// cross-checked by radial quadrature of the core dilatation.
double energy_el(const ElasticSpec& spec);

/// R0 -> infinity limit: -3 rho^2 sigma0^2 / (2(4mu + 3kappa)).
double energy_el_infinite(const ElasticSpec& spec);

/// Relative cell-size error |E(R0)-E(inf)|/|E(inf)| = (r0/R0)^3 exactly.
double elastic_rel_error(const ElasticSpec& spec);

struct TotalDefectEnergy {
    double energy_es = 0.0;
    double energy_el = 0.0;
    double total = 0.0;
    double energy_es_infinite = 0.0;
    double energy_el_infinite = 0.0;
    double residual_es = 0.0;       // |E_es(R0) - E_es(inf)|
    double residual_el = 0.0;       // |E_el(R0) - E_el(inf)|
    double slow_term_share = 0.0;   // elastic share of the total residual
};

/// Sum of the electrostatic and elastic contributions; the two inputs must
/// describe the same defect geometry (rho, r0, R0).
TotalDefectEnergy total_defect_energy(const RadialDefectSolution& es, const ElasticSpec& el);

struct IsotropicModuli {
    double mu = 0.0;
    double kappa_b = 0.0;
};

/// Voigt-average isotropic projection of a full stiffness tensor.
IsotropicModuli isotropic_moduli(const ElasticTensors& tensors);

}  // namespace qcf

#endif
