#include "qcf/grid.hpp"

#include <cmath>
#include <cstring>

#include <fftw3.h>

#include "qcf/errors.hpp"

namespace qcf {

PeriodicGrid::PeriodicGrid(const Eigen::Matrix3d& cell, int n)
    : n_(n), size_(std::size_t(n) * n * n), cell_(cell) {
    if (n < 2) throw ValidationError("grid resolution must be >= 2");
    volume_ = cell_.determinant();
    if (volume_ <= 0.0) throw ValidationError("cell matrix must have positive determinant");
    recip_ = 2.0 * M_PI * cell_.inverse().transpose();
    work_.resize(size_);
    auto* buf = reinterpret_cast<fftw_complex*>(work_.data());
    // x is the contiguous dimension, so FFTW sees dims (z, y, x).
    plan_fwd_ = fftw_plan_dft_3d(n_, n_, n_, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_3d(n_, n_, n_, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

PeriodicGrid::~PeriodicGrid() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

Eigen::Vector3d PeriodicGrid::position(std::size_t idx) const {
    const int ix = int(idx % n_);
    const int iy = int((idx / n_) % n_);
    const int iz = int(idx / (std::size_t(n_) * n_));
    Eigen::Vector3d frac(double(ix) / n_, double(iy) / n_, double(iz) / n_);
    return cell_ * frac;
}

Eigen::Vector3d PeriodicGrid::wavevector(std::size_t idx) const {
    const int ix = int(idx % n_);
    const int iy = int((idx / n_) % n_);
    const int iz = int(idx / (std::size_t(n_) * n_));
    auto fold = [this](int i) { return i < n_ / 2 ? i : i - n_; };
    Eigen::Vector3d m(fold(ix), fold(iy), fold(iz));
    return recip_ * m;
}

void PeriodicGrid::forward(std::vector<cplx>& field) const {
    auto* buf = reinterpret_cast<fftw_complex*>(field.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), buf, buf);
}

void PeriodicGrid::inverse(std::vector<cplx>& field) const {
    auto* buf = reinterpret_cast<fftw_complex*>(field.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), buf, buf);
    const double scale = 1.0 / double(size_);
    for (auto& v : field) v *= scale;
}

std::vector<cplx> PeriodicGrid::forward_real(const std::vector<double>& field) const {
    std::vector<cplx> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = field[i];
    forward(out);
    return out;
}

std::vector<double> PeriodicGrid::inverse_to_real(std::vector<cplx> spectral) const {
    inverse(spectral);
    std::vector<double> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = spectral[i].real();
    return out;
}

std::vector<double> PeriodicGrid::laplacian(const std::vector<double>& field) const {
    auto spec = forward_real(field);
    for (std::size_t i = 0; i < size_; ++i) spec[i] *= -wavevector(i).squaredNorm();
    return inverse_to_real(std::move(spec));
}

std::array<std::vector<double>, 3> PeriodicGrid::gradient(const std::vector<double>& field) const {
    auto spec = forward_real(field);
    std::array<std::vector<double>, 3> out;
    for (int c = 0; c < 3; ++c) {
        std::vector<cplx> comp(size_);
        for (std::size_t i = 0; i < size_; ++i)
            comp[i] = cplx(0.0, wavevector(i)[c]) * spec[i];
        out[c] = inverse_to_real(std::move(comp));
    }
    return out;
}

std::vector<double> PeriodicGrid::poisson(const std::vector<double>& rho) const {
    auto spec = forward_real(rho);
    spec[0] = 0.0;  // multiplier absorbed downstream; zero mode pinned
    for (std::size_t i = 1; i < size_; ++i) spec[i] /= wavevector(i).squaredNorm();
    return inverse_to_real(std::move(spec));
}

double PeriodicGrid::average(const std::vector<double>& field) const {
    double s = 0.0;
    for (double v : field) s += v;
    return s / double(size_);
}

double PeriodicGrid::norm_l2(const std::vector<double>& field) const {
    double s = 0.0;
    for (double v : field) s += v * v;
    return std::sqrt(s / double(size_));
}

}  // namespace qcf
