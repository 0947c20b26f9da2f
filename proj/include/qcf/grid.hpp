#ifndef QCF_GRID_HPP
#define QCF_GRID_HPP

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qcf {

using cplx = std::complex<double>;

/// Uniform N^3 collocation grid over a (possibly non-orthogonal) periodic
/// cell, with trigonometric differentiation via FFTW. Storage is x-fastest:
/// idx = ix + N*(iy + N*iz), fractional coordinates t_i = i/N.
class PeriodicGrid {
public:
    PeriodicGrid(const Eigen::Matrix3d& cell, int n);
    ~PeriodicGrid();

    PeriodicGrid(const PeriodicGrid&) = delete;
    PeriodicGrid& operator=(const PeriodicGrid&) = delete;

    int n() const { return n_; }
    std::size_t size() const { return size_; }
    double volume() const { return volume_; }
    const Eigen::Matrix3d& cell() const { return cell_; }
    const Eigen::Matrix3d& reciprocal() const { return recip_; }

    Eigen::Vector3d position(std::size_t idx) const;

    /// Wavevector of spectral index idx, components folded to [-N/2, N/2).
    Eigen::Vector3d wavevector(std::size_t idx) const;

    // Unnormalized forward transform; inverse applies the 1/N^3 factor.
    void forward(std::vector<cplx>& field) const;
    void inverse(std::vector<cplx>& field) const;

    std::vector<cplx> forward_real(const std::vector<double>& field) const;
    std::vector<double> inverse_to_real(std::vector<cplx> spectral) const;

    std::vector<double> laplacian(const std::vector<double>& field) const;
    /// Cartesian gradient components of a real periodic field.
    std::array<std::vector<double>, 3> gradient(const std::vector<double>& field) const;

    /// Solves Laplace(phi) = -rho exactly in frequency space with the zero
    /// mode pinned to zero.
    std::vector<double> poisson(const std::vector<double>& rho) const;

    double average(const std::vector<double>& field) const;
    double integral(const std::vector<double>& field) const { return average(field) * volume_; }
    double norm_l2(const std::vector<double>& field) const;

private:
    int n_;
    std::size_t size_;
    Eigen::Matrix3d cell_;
    Eigen::Matrix3d recip_;  // columns b_i, b_i . a_j = 2 pi delta_ij
    double volume_;
    void* plan_fwd_;  // fftw_plan
    void* plan_bwd_;
    mutable std::vector<cplx> work_;
};

}  // namespace qcf

#endif
