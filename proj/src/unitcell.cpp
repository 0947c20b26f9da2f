#include "qcf/unitcell.hpp"

#include <algorithm>
#include <cmath>

#include "qcf/errors.hpp"

namespace qcf {

namespace {

double fprime(double u) { return (10.0 / 3.0) * thomas_fermi_cf() * std::pow(u, 7.0 / 3.0); }
double fsecond(double u) { return (70.0 / 9.0) * thomas_fermi_cf() * std::pow(u, 4.0 / 3.0); }
double fval(double u) { return thomas_fermi_cf() * std::pow(u, 10.0 / 3.0); }

}  // namespace

void UnitCellSpec::validate() const {
    const double triple = e_hat.determinant();
    if (std::abs(triple - 1.0) > 1e-10)
        throw ValidationError("rescaled lattice vectors must satisfy e3.(e1 x e2) = 1");
    if (eta <= 0.0) throw ValidationError("lattice parameter must be positive");
    if (F0.determinant() <= 0.0) throw ValidationError("det F0 must be positive");
    if (Z <= 0.0) throw ValidationError("nuclear charge Z must be positive");
    if (sigma_nuc <= 0.0) throw ValidationError("sigma_nuc must be positive");
    if (lambda <= 0.0 || lambda > 1.0) throw ValidationError("lambda must lie in (0, 1]");
    if (N < 8 || N % 2 != 0) throw ValidationError("grid resolution N must be an even integer >= 8");
}

UnitCellSpec UnitCellSpec::simple_cubic(double a0) {
    UnitCellSpec s;
    s.e_hat = Eigen::Matrix3d::Identity();
    s.eta = a0;
    s.sigma_nuc = a0 / 20.0;
    return s;
}

UnitCellSpec UnitCellSpec::fcc(double a0) {
    UnitCellSpec s;
    Eigen::Matrix3d prim;
    prim << 0, 1, 1,
            1, 0, 1,
            1, 1, 0;
    prim *= 0.5 * a0;  // det = a0^3/4
    s.eta = std::cbrt(prim.determinant());
    s.e_hat = prim / s.eta;
    s.sigma_nuc = a0 / 20.0;
    return s;
}

std::vector<double> assemble_source(const UnitCellSpec& spec, const PeriodicGrid& grid) {
    spec.validate();
    const std::size_t size = grid.size();
    if (spec.mode == SourceMode::uniform_background) {
        const double nbar = spec.Z / grid.volume();
        return std::vector<double>(size, -nbar);
    }
    // Regularized nucleus: require at least 4 grid points per sigma along
    // every lattice direction.
    for (int c = 0; c < 3; ++c) {
        const double spacing = grid.cell().col(c).norm() / grid.n();
        if (spec.sigma_nuc < 4.0 * spacing)
            throw ValidationError("grid too coarse to resolve sigma_nuc: need >= 4 points per sigma");
    }
    // Periodized Gaussian built in frequency space; its cell integral is
    // exactly -Z (zero mode).
    const Eigen::Vector3d center = grid.cell() * Eigen::Vector3d(0.5, 0.5, 0.5);
    std::vector<cplx> spec_field(size);
    const double s2 = spec.sigma_nuc * spec.sigma_nuc;
    for (std::size_t i = 0; i < size; ++i) {
        const Eigen::Vector3d g = grid.wavevector(i);
        const double phase = -g.dot(center);
        // Continuous Fourier coefficient of a periodized unit point charge is
        // 1/V per mode; the factor size cancels the inverse transform's 1/N^3.
        spec_field[i] = -spec.Z / grid.volume() * std::exp(-0.5 * s2 * g.squaredNorm()) *
                        cplx(std::cos(phase), std::sin(phase)) * double(size);
    }
    return grid.inverse_to_real(std::move(spec_field));
}

std::vector<double> assemble_source(const UnitCellSpec& spec) {
    spec.validate();
    PeriodicGrid grid(spec.cell(), spec.N);
    return assemble_source(spec, grid);
}

namespace {

struct SolverState {
    const PeriodicGrid& grid;
    const UnitCellSpec& spec;
    const std::vector<double>& b;
    double Ne;  // electron count = -integral(b)

    std::vector<double> poisson_potential(const std::vector<double>& u) const {
        std::vector<double> rho(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) rho[i] = u[i] * u[i] + b[i];
        return grid.poisson(rho);
    }

    // Energy with phi eliminated: integral of f(u) + lambda/2 |grad u|^2
    // plus the electrostatic term (1/2) integral rho phi0.
    double energy(const std::vector<double>& u, const std::vector<double>& phi0) const {
        const auto grad = grid.gradient(u);
        double e = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double g2 = grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i] +
                              grad[2][i] * grad[2][i];
            const double rho = u[i] * u[i] + b[i];
            e += fval(u[i]) + 0.5 * spec.lambda * g2 + 0.5 * rho * phi0[i];
        }
        return e / double(grid.size()) * grid.volume();
    }
};

}  // namespace

ElectronicFields solve_unit_cell(const UnitCellSpec& spec, const SolveOptions& opts) {
    spec.validate();
    PeriodicGrid grid(spec.cell(), spec.N);
    const std::size_t size = grid.size();
    const auto b = assemble_source(spec, grid);

    const double Ne = -grid.integral(b);
    SolverState st{grid, spec, b, Ne};

    const double nbar = Ne / grid.volume();
    std::vector<double> u(size, std::sqrt(nbar));

    // Fourier-space preconditioner taming the lambda*|g|^2 stiffness of the
    // Euler-Lagrange operator; mu0 is a curvature scale of the local terms.
    const double mu0 = std::max(1.0, fsecond(std::sqrt(nbar)));
    auto precondition = [&](const std::vector<double>& r) {
        auto spec_r = grid.forward_real(r);
        for (std::size_t i = 0; i < size; ++i)
            spec_r[i] /= mu0 + spec.lambda * grid.wavevector(i).squaredNorm();
        return grid.inverse_to_real(std::move(spec_r));
    };

    auto residual_field = [&](const std::vector<double>& uu, const std::vector<double>& phi0,
                              double* mult_out) {
        const auto lap_u = grid.laplacian(uu);
        std::vector<double> r(size);
        double ru = 0.0, uu2 = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            r[i] = -spec.lambda * lap_u[i] + fprime(uu[i]) + 2.0 * uu[i] * phi0[i];
            ru += r[i] * uu[i];
            uu2 += uu[i] * uu[i];
        }
        // Lagrange multiplier absorbed into phi: the component of the
        // gradient along u is the constraint force.
        const double c = -ru / (2.0 * uu2);
        for (std::size_t i = 0; i < size; ++i) r[i] += 2.0 * uu[i] * c;
        if (mult_out) *mult_out = c;
        return r;
    };

    auto rel_residual_u = [&](const std::vector<double>& uu, const std::vector<double>& r) {
        double denom = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            const double fp = fprime(uu[i]);
            denom += fp * fp;
        }
        denom = std::sqrt(denom / double(size));
        return grid.norm_l2(r) / std::max(denom, 1e-300);
    };

    auto phi0 = st.poisson_potential(u);
    double energy = st.energy(u, phi0);
    double tau = 1.0;
    double mult = 0.0;
    long iter = 0;
    double res = 0.0;
    bool converged = false;

    for (; iter < opts.max_iterations; ++iter) {
        auto r = residual_field(u, phi0, &mult);
        res = rel_residual_u(u, r);
        if (res <= opts.tolerance) {
            converged = true;
            break;
        }
        const auto dir = precondition(r);
        std::vector<double> trial(size);
        while (true) {
            double norm2 = 0.0;
            for (std::size_t i = 0; i < size; ++i) {
                trial[i] = std::max(u[i] - tau * dir[i], 0.0);
                norm2 += trial[i] * trial[i];
            }
            const double scale = std::sqrt(Ne / (norm2 / double(size) * grid.volume()));
            for (auto& v : trial) v *= scale;
            auto trial_phi0 = st.poisson_potential(trial);
            const double trial_energy = st.energy(trial, trial_phi0);
            if (trial_energy <= energy + 1e-14 * std::abs(energy) || tau < 1e-12) {
                u.swap(trial);
                phi0.swap(trial_phi0);
                energy = trial_energy;
                tau = std::min(tau * 1.2, 4.0);
                break;
            }
            tau *= 0.5;  // damping halved on energy increase
        }
    }

    auto r = residual_field(u, phi0, &mult);
    res = rel_residual_u(u, r);
    if (!converged && res > opts.tolerance)
        throw ConvergenceError("unit-cell solve did not converge within iteration budget", res, 0.0);

    ElectronicFields out;
    out.u = std::move(u);
    out.phi = std::move(phi0);
    for (auto& v : out.phi) v += mult;
    out.b = b;
    out.N = spec.N;
    out.cell = grid.cell();
    out.volume = grid.volume();
    out.iterations = int(iter);
    out.residual_u = res;

    // Residual of the Poisson equation (exact in frequency space, so this
    // measures roundoff only).
    {
        const auto lap_phi = grid.laplacian(out.phi);
        std::vector<double> rp(size);
        double denom = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            const double rho = out.u[i] * out.u[i] + b[i];
            rp[i] = lap_phi[i] + rho;
            denom += out.u[i] * out.u[i] * out.u[i] * out.u[i];
        }
        denom = std::sqrt(denom / double(size));
        out.residual_phi = grid.norm_l2(rp) / std::max(denom, 1e-300);
    }

    double neut = 0.0;
    for (std::size_t i = 0; i < size; ++i) neut += out.u[i] * out.u[i] + b[i];
    out.neutrality = neut / double(size) * grid.volume();
    if (std::abs(out.neutrality) > 1e-8 * spec.Z)
        throw ConvergenceError("charge neutrality violated after solve", res, out.neutrality);
    for (double v : out.u)
        if (v < 0.0) throw ConvergenceError("negative density after projection", res, v);
    return out;
}

double energy_density(const ElectronicFields& fields, const UnitCellSpec& spec) {
    PeriodicGrid grid(fields.cell, fields.N);
    const auto grad_u = grid.gradient(fields.u);
    const auto grad_phi = grid.gradient(fields.phi);
    double e = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double gu2 = 0.0, gp2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            gu2 += grad_u[c][i] * grad_u[c][i];
            gp2 += grad_phi[c][i] * grad_phi[c][i];
        }
        e += fval(fields.u[i]) + 0.5 * spec.lambda * gu2 - 0.5 * gp2 +
             (fields.u[i] * fields.u[i] + fields.b[i]) * fields.phi[i];
    }
    return e / double(grid.size());
}

CellMoments moments(const ElectronicFields& fields, const UnitCellSpec& spec) {
    CellMoments m;
    m.F0 = spec.F0;
    const std::size_t size = fields.u.size();
    double a = 0.0, bavg = 0.0, g = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        a += fields.u[i];
        bavg += fields.phi[i];
        g += 0.5 * fsecond(fields.u[i]);
    }
    m.alpha = a / double(size);
    m.beta = bavg / double(size);
    m.gamma = g / double(size) + m.beta;
    m.W = energy_density(fields, spec);
    return m;
}

namespace {

struct JwJb {
    double JW;
    double Jbeta;
};

JwJb solve_at(const UnitCellSpec& base, const Eigen::Matrix3d& F, const SolveOptions& opts) {
    UnitCellSpec s = base;
    s.F0 = F;
    ElectronicFields fields;
    try {
        fields = solve_unit_cell(s, opts);
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string("stencil solve failed at perturbed F: ") + e.what(),
                               e.residual_u, e.residual_phi);
    }
    const auto m = moments(fields, s);
    const double J = F.determinant();
    return {J * m.W, J * m.beta};
}

}  // namespace

ElasticTensors stiffness_fd(const UnitCellSpec& spec, double h, const SolveOptions& opts) {
    spec.validate();
    const double fnorm = spec.F0.norm();
    if (h < 1e-4 * fnorm || h > 1e-2 * fnorm)
        throw ValidationError("FD step h must lie in [1e-4, 1e-2] relative to |F0|");

    ElasticTensors out;
    out.F0 = spec.F0;
    out.h = h;

    const double center = solve_at(spec, spec.F0, opts).JW;

    auto perturb = [&](int p, int i, double s1, int q, int j, double s2) {
        Eigen::Matrix3d F = spec.F0;
        F(p, i) += s1 * h;
        F(q, j) += s2 * h;
        return F;
    };

    // Single-component perturbations serve both B and the diagonal of C.
    double plus[3][3], minus[3][3];
    for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 3; ++i) {
            Eigen::Matrix3d Fp = spec.F0, Fm = spec.F0;
            Fp(p, i) += h;
            Fm(p, i) -= h;
            const auto vp = solve_at(spec, Fp, opts);
            const auto vm = solve_at(spec, Fm, opts);
            plus[p][i] = vp.JW;
            minus[p][i] = vm.JW;
            out.B(p, i) = (vp.Jbeta - vm.Jbeta) / (2.0 * h);
        }

    for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 3; ++i)
            for (int q = 0; q < 3; ++q)
                for (int j = 0; j < 3; ++j) {
                    const int a = p * 3 + i, bidx = q * 3 + j;
                    if (a > bidx) {
                        out.stiffness(p, i, q, j) = out.stiffness(q, j, p, i);
                    } else if (a == bidx) {
                        out.stiffness(p, i, q, j) =
                            (plus[p][i] - 2.0 * center + minus[p][i]) / (h * h);
                    } else {
                        const double fpp = solve_at(spec, perturb(p, i, 1, q, j, 1), opts).JW;
                        const double fpm = solve_at(spec, perturb(p, i, 1, q, j, -1), opts).JW;
                        const double fmp = solve_at(spec, perturb(p, i, -1, q, j, 1), opts).JW;
                        const double fmm = solve_at(spec, perturb(p, i, -1, q, j, -1), opts).JW;
                        out.stiffness(p, i, q, j) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
                    }
                }
    return out;
}

SymmetryReport symmetry_check(const UnitCellSpec& spec, const std::vector<SymmetryOp>& group,
                              const SolveOptions& opts) {
    spec.validate();
    const auto base = moments(solve_unit_cell(spec, opts), spec);

    SymmetryReport report;
    auto reldev = [](double a, double b) {
        const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        return std::abs(a - b) / scale;
    };
    for (const auto& op : group) {
        UnitCellSpec s = spec;
        s.F0 = (op.side == SymmetryOp::Side::rotate_left) ? Eigen::Matrix3d(op.M * spec.F0)
                                                          : Eigen::Matrix3d(spec.F0 * op.M);
        const auto m = moments(solve_unit_cell(s, opts), s);
        SymmetryReport::Entry e;
        e.op = op;
        e.dev_W = reldev(m.W, base.W);
        e.dev_alpha = reldev(m.alpha, base.alpha);
        e.dev_beta = reldev(m.beta, base.beta);
        e.dev_gamma = reldev(m.gamma, base.gamma);
        report.max_deviation = std::max({report.max_deviation, e.dev_W, e.dev_alpha,
                                         e.dev_beta, e.dev_gamma});
        report.entries.push_back(e);
    }
    report.passed = report.max_deviation <= 1e-6;
    return report;
}

}  // namespace qcf
