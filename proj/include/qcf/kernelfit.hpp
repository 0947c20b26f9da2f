#ifndef QCF_KERNELFIT_HPP
#define QCF_KERNELFIT_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcf/grid.hpp"

namespace qcf {

/// Tabulated kernel values (|k|, Khat(|k|)); wavenumbers strictly
/// increasing and nonnegative.
struct KernelSamples {
    std::vector<double> k;
    std::vector<double> khat;
    std::string provenance;  // "analytic" or "table:<path>"
    void validate() const;
};

struct PoleTerm {
    cplx P;
    cplx Q;
};

/// Partial-fraction approximation Khat(|k|) ~= sum_j P_j |k|^2/(|k|^2+Q_j);
/// the term multiset is closed under conjugation and Re(Q_j) > 0.
struct KernelFit {
    int m = 0;
    std::vector<PoleTerm> terms;
    double residual = 0.0;  // max |fit - Khat| over samples / max |Khat|
    bool residual_warning = false;
};

struct FitOptions {
    unsigned seed = 0;
    int restarts = 8;
    double residual_threshold = 1e-6;
};

/// Variable-projection least squares: nonlinear search over conjugate-paired
/// {Q_j}, exact linear solve for {P_j}.
KernelFit fit_partial_fractions(const KernelSamples& samples, int m,
                                const FitOptions& options = {});

/// Evaluates the fitted rational approximation at wavenumber k >= 0.
double eval_fit(const KernelFit& fit, double k);

/// Predictor potentials phi_pj solving -Lap phi + Q_j phi + P_j Q_j p(u) = 0
/// on the periodic cell, one complex grid per term.
std::vector<std::vector<cplx>> solve_predictor_potentials(const KernelFit& fit,
                                                          const std::vector<double>& p_grid,
                                                          const PeriodicGrid& grid);

/// Pointwise maps p, q and their first two derivatives.
struct PQMaps {
    std::function<double(double)> p, dp, ddp;
    std::function<double(double)> q, dq, ddq;
};

struct KernelMoments {
    double xi_p = 0.0;  // cell average of p'(u_p)
    double xi_q = 0.0;
    std::vector<cplx> chi_p;  // per j: avg p''(u_p) phi_qj
    std::vector<cplx> chi_q;  // per j: avg q''(u_p) phi_pj
    std::vector<cplx> psi;    // per j: avg [p''q + 2p'q' + pq''](u_p)
    double gamma = 0.0;
    double gamma_tilde = 0.0;  // gamma + (1/2) sum_j (chi_pj + chi_qj + psi_j)
};

KernelMoments kernel_moments(const std::vector<double>& u_grid, const KernelFit& fit,
                             const PQMaps& maps, double gamma, const PeriodicGrid& grid);

/// Constant matrices of the coupled macroscopic corrector system in the
/// unknown ordering (u_c, phi_c, phi_p1c, phi_q1c, ..., phi_pmc, phi_qmc):
///   laplace_coeff[r] * Lap(w_r) + sum_c mass(r, c) * w_c + source[r] * b_c = 0.
/// Assembled only; solving the system is an extension point.
struct CorrectorSystem {
    int m = 0;
    Eigen::VectorXcd laplace_coeff;
    Eigen::MatrixXcd mass;
    Eigen::VectorXd source;
    std::vector<std::string> unknowns;
};

CorrectorSystem corrector_system(const KernelFit& fit, const KernelMoments& moments,
                                 double alpha);

}  // namespace qcf

#endif
