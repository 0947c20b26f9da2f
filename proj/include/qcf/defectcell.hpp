#ifndef QCF_DEFECTCELL_HPP
#define QCF_DEFECTCELL_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "qcf/homogenized.hpp"

namespace qcf {

/// Piecewise-constant spherical source: b = rho inside the core ball of
/// radius r0, zero between r0 and the cell radius R0.
struct SphericalDefect {
    double rho = 0.0;
    double r0 = 0.0;
    double R0 = 0.0;
    void validate() const;
    /// Physical charge perturbation amplitude b_c = -lambda rho / (2 alpha).
    double core_charge(const HomogenizedModel& m) const {
        return -m.lambda * rho / (2.0 * m.alpha);
    }
};

/// Linear system for the eight radial coefficients in the scaled basis
///   inner: e^{k+(r-r0)}, e^{k-(r-r0)}, e^{-k+ r}, e^{-k- r}
///   outer: e^{k+(r-R0)}, e^{k-(r-R0)}, e^{-k+(r-r0)}, e^{-k-(r-r0)},
/// which keeps every matrix entry O(1) for any cell radius.
struct DefectSystem {
    Eigen::Matrix<double, 8, 8> A;
    Eigen::Matrix<double, 8, 1> rhs;
    std::array<double, 8> column_scale{};  // unscaled C_i = column_scale[i] * D_i
    double condition = 0.0;
};

struct RadialDefectSolution {
    HomogenizedModel model;
    SphericalDefect defect;
    std::array<double, 8> scaled{};    // D_1..D_8
    std::array<double, 8> unscaled{};  // C_1..C_8 of the raw exponential basis
    double varsigma = 0.0;             // boundary potential phi(R0)
    double condition = 0.0;
    double residual = 0.0;  // linear-system re-substitution residual
};

DefectSystem assemble_system(const HomogenizedModel& model, const SphericalDefect& defect);

RadialDefectSolution solve_coefficients(const HomogenizedModel& model,
                                        const SphericalDefect& defect);

/// m-th derivative of r*u(r), evaluated piecewise in the scaled basis.
double eval_ru_deriv(const RadialDefectSolution& sol, double r, int m);

double field_u(const RadialDefectSolution& sol, double r);
double field_phi(const RadialDefectSolution& sol, double r);

/// Residual of the flux/neutrality identity on the ball B_R0,
/// relative to the magnitude of its terms.
double flux_identity_residual(const RadialDefectSolution& sol);

/// Electrostatic defect energy, closed form cross-checked against radial
/// quadrature of (1/2) integral (-lambda b / 2 alpha) phi.
double energy_es(const RadialDefectSolution& sol);

/// Electrostatic defect energy as a finite cell measures it: the potential is
/// referenced to its boundary value (phi = 0 on the cell wall), which adds the
/// monopole gauge term -(1/2) b_c V_core varsigma to energy_es.  This term
/// decays like exp(-k+ R0) and dominates the cell-size error in the energy.
double energy_es_cell(const RadialDefectSolution& sol);

/// Infinite-cell limit from the analytic coefficients.
double energy_es_infinite(const HomogenizedModel& model, const SphericalDefect& defect);

struct SweepRow {
    double R0 = 0.0;
    double energy = 0.0;
    double rel_error = 0.0;  // vs |E(inf)|
    bool ok = false;
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double energy_infinite = 0.0;
    double R0_at_1pct = 0.0;  // smallest listed R0 with rel_error < 1%; 0 if none
};

SweepResult cell_size_sweep(const HomogenizedModel& model, double rho, double r0,
                            const std::vector<double>& R0_list);

/// Default sweep grid: log-spaced cell radii.
std::vector<double> log_spaced(double lo, double hi, int points);

}  // namespace qcf

#endif
