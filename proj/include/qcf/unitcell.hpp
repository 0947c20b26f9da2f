#ifndef QCF_UNITCELL_HPP
#define QCF_UNITCELL_HPP

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "qcf/grid.hpp"

namespace qcf {

/// Thomas-Fermi prefactor C_F = (3/10) (3 pi^2)^(2/3), Hartree atomic units.
inline constexpr double thomas_fermi_cf() {
    return 0.3 * 9.570780000627306;  // (3 pi^2)^(2/3)
}

enum class SourceMode { regularized_nucleus, uniform_background };

struct UnitCellSpec {
    Eigen::Matrix3d e_hat = Eigen::Matrix3d::Identity();  // columns, det = 1
    double eta = 1.0;                                      // lattice parameter, Bohr
    Eigen::Matrix3d F0 = Eigen::Matrix3d::Identity();
    double Z = 1.0;
    double sigma_nuc = 0.05;
    double lambda = 1.0 / 6.0;
    int N = 16;
    SourceMode mode = SourceMode::regularized_nucleus;

    Eigen::Matrix3d cell() const { return F0 * (eta * e_hat); }
    double volume() const { return cell().determinant(); }
    void validate() const;

    /// Simple cubic: one atom per cube of edge a0.
    static UnitCellSpec simple_cubic(double a0);
    /// FCC primitive cell (volume a0^3/4) from the conventional cube edge a0.
    static UnitCellSpec fcc(double a0);
};

struct ElectronicFields {
    std::vector<double> u;    // square-root density, >= 0
    std::vector<double> phi;  // electrostatic potential, multiplier absorbed
    std::vector<double> b;    // source grid used in the solve
    int N = 0;
    Eigen::Matrix3d cell;
    double volume = 0.0;
    double residual_u = 0.0;
    double residual_phi = 0.0;
    double neutrality = 0.0;  // cell integral of (u^2 + b)
    int iterations = 0;
};

struct CellMoments {
    double alpha = 0.0;  // cell average of u_p
    double beta = 0.0;   // cell average of phi_p
    double gamma = 0.0;  // average of f''(u_p)/2, plus beta
    double W = 0.0;      // energy density on the deformed cell
    Eigen::Matrix3d F0;
};

struct ElasticTensors {
    std::array<double, 81> C{};  // stiffness, d^2(JW)/dF^2
    Eigen::Matrix3d B;           // eigenstress coupling, d(J beta)/dF
    Eigen::Matrix3d F0;
    double h = 0.0;

    double& stiffness(int p, int i, int q, int j) { return C[((p * 3 + i) * 3 + q) * 3 + j]; }
    double stiffness(int p, int i, int q, int j) const { return C[((p * 3 + i) * 3 + q) * 3 + j]; }
};

struct SymmetryOp {
    enum class Side { rotate_left, lattice_right };
    Eigen::Matrix3d M;
    Side side = Side::rotate_left;
};

struct SymmetryReport {
    struct Entry {
        SymmetryOp op;
        double dev_W, dev_alpha, dev_beta, dev_gamma;
    };
    std::vector<Entry> entries;
    double max_deviation = 0.0;
    bool passed = false;  // max relative deviation <= 1e-6
};

/// Charge source on the solve grid. Sign convention: the source integrates
/// to -Z so that the neutrality constraint integral(u^2 + b) = 0 is
/// attainable with u^2 >= 0 (the uniform background is the constant -Z/vol).
std::vector<double> assemble_source(const UnitCellSpec& spec, const PeriodicGrid& grid);
std::vector<double> assemble_source(const UnitCellSpec& spec);

struct SolveOptions {
    double tolerance = 1e-6;
    long max_iterations = 100000;
};

/// Damped self-consistent solve of the periodic TFW problem
///   Laplace(phi) + u^2 + b = 0,   -lambda Laplace(u) + f'(u) + 2 u phi = 0,
/// with charge neutrality and u >= 0.
ElectronicFields solve_unit_cell(const UnitCellSpec& spec, const SolveOptions& opts = {});

CellMoments moments(const ElectronicFields& fields, const UnitCellSpec& spec);

ElasticTensors stiffness_fd(const UnitCellSpec& spec, double h, const SolveOptions& opts = {});

SymmetryReport symmetry_check(const UnitCellSpec& spec, const std::vector<SymmetryOp>& group,
                              const SolveOptions& opts = {});

/// Energy density of the discrete state (the integrand of the total-energy
/// functional averaged over the cell).
double energy_density(const ElectronicFields& fields, const UnitCellSpec& spec);

}  // namespace qcf

#endif
