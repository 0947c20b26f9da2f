#include "qcf/kernelfit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qcf/errors.hpp"

namespace qcf {

void KernelSamples::validate() const {
    if (k.size() != khat.size()) throw ValidationError("sample column lengths differ");
    if (k.empty()) throw ValidationError("no kernel samples");
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!(k[i] >= 0.0) || !std::isfinite(khat[i]))
            throw ValidationError("kernel samples must be finite with k >= 0");
        if (i > 0 && !(k[i] > k[i - 1]))
            throw ValidationError("wavenumbers must be strictly increasing");
    }
}

namespace {

// A pole configuration: n_real real poles followed by n_pair conjugate
// pairs. Nonlinear parameters: one log-Q per real pole, (log Re Q, log Im Q)
// per pair. Linear parameters: one real P per real pole, (Re P, Im P) per
// pair.
struct Config {
    int n_real = 0;
    int n_pair = 0;
    int n_theta() const { return n_real + 2 * n_pair; }
    int n_cols() const { return n_real + 2 * n_pair; }

    std::vector<cplx> poles(const Eigen::VectorXd& theta) const {
        std::vector<cplx> q;
        int t = 0;
        for (int i = 0; i < n_real; ++i) q.emplace_back(std::exp(theta(t++)), 0.0);
        for (int i = 0; i < n_pair; ++i) {
            const double re = std::exp(theta(t++));
            const double im = std::exp(theta(t++));
            q.emplace_back(re, im);
        }
        return q;
    }
};

// Design matrix for the variable-projection linear solve. Column layout
// mirrors the parameter layout of Config.
Eigen::MatrixXd design_matrix(const Config& cfg, const Eigen::VectorXd& theta,
                              const std::vector<double>& k) {
    const auto q = cfg.poles(theta);
    Eigen::MatrixXd A(Eigen::Index(k.size()), cfg.n_cols());
    for (Eigen::Index s = 0; s < A.rows(); ++s) {
        const double k2 = k[std::size_t(s)] * k[std::size_t(s)];
        int c = 0;
        for (int i = 0; i < cfg.n_real; ++i) A(s, c++) = k2 / (k2 + q[std::size_t(i)].real());
        for (int i = 0; i < cfg.n_pair; ++i) {
            const cplx b = k2 / (k2 + q[std::size_t(cfg.n_real + i)]);
            // pair contributes 2 Re(P b) = 2 Re(P) Re(b) - 2 Im(P) Im(b)
            A(s, c++) = 2.0 * b.real();
            A(s, c++) = -2.0 * b.imag();
        }
    }
    return A;
}

struct Projection {
    Eigen::VectorXd coeffs;
    Eigen::VectorXd residual_vec;
    double objective = 0.0;
};

Projection project(const Config& cfg, const Eigen::VectorXd& theta,
                   const std::vector<double>& k, const Eigen::VectorXd& y) {
    Projection p;
    const Eigen::MatrixXd A = design_matrix(cfg, theta, k);
    p.coeffs = A.colPivHouseholderQr().solve(y);
    p.residual_vec = A * p.coeffs - y;
    p.objective = p.residual_vec.squaredNorm();
    if (!std::isfinite(p.objective)) p.objective = 1e300;
    return p;
}

double objective_of(const Config& cfg, const Eigen::VectorXd& theta,
                    const std::vector<double>& k, const Eigen::VectorXd& y) {
    return project(cfg, theta, k, y).objective;
}

// Standard Nelder-Mead on the nonlinear parameters.
Eigen::VectorXd nelder_mead(const Config& cfg, Eigen::VectorXd x0, const std::vector<double>& k,
                            const Eigen::VectorXd& y) {
    const int n = int(x0.size());
    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> f;
    simplex.push_back(x0);
    f.push_back(objective_of(cfg, x0, k, y));
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v = x0;
        v(i) += 0.25;
        simplex.push_back(v);
        f.push_back(objective_of(cfg, v, k, y));
    }

    auto order = [&] {
        std::vector<int> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return f[std::size_t(a)] < f[std::size_t(b)];
        });
        std::vector<Eigen::VectorXd> s2;
        std::vector<double> f2;
        for (int i : idx) {
            s2.push_back(simplex[std::size_t(i)]);
            f2.push_back(f[std::size_t(i)]);
        }
        simplex.swap(s2);
        f.swap(f2);
    };

    for (int it = 0; it < 600 * n; ++it) {
        order();
        if (f[0] < 1e-28 || std::abs(f.back() - f[0]) < 1e-16 * (1.0 + f[0])) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += simplex[std::size_t(i)];
        centroid /= n;

        const Eigen::VectorXd xr = centroid + (centroid - simplex.back());
        const double fr = objective_of(cfg, xr, k, y);
        if (fr < f[0]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - simplex.back());
            const double fe = objective_of(cfg, xe, k, y);
            simplex.back() = fe < fr ? xe : xr;
            f.back() = std::min(fe, fr);
        } else if (fr < f[std::size_t(n) - 1]) {
            simplex.back() = xr;
            f.back() = fr;
        } else {
            const Eigen::VectorXd xc = centroid + 0.5 * (simplex.back() - centroid);
            const double fc = objective_of(cfg, xc, k, y);
            if (fc < f.back()) {
                simplex.back() = xc;
                f.back() = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
                    f[i] = objective_of(cfg, simplex[i], k, y);
                }
            }
        }
    }
    order();
    return simplex[0];
}

// Levenberg-Marquardt polish of the variable-projection residual with a
// finite-difference Jacobian; converges to machine precision on
// zero-residual (exact recovery) problems.
Eigen::VectorXd lm_polish(const Config& cfg, Eigen::VectorXd theta, const std::vector<double>& k,
                          const Eigen::VectorXd& y) {
    const int n = int(theta.size());
    double damp = 1e-6;
    Projection cur = project(cfg, theta, k, y);
    for (int it = 0; it < 200; ++it) {
        Eigen::MatrixXd J(cur.residual_vec.size(), n);
        const double h = 1e-7;
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd tp = theta, tm = theta;
            tp(j) += h;
            tm(j) -= h;
            J.col(j) = (project(cfg, tp, k, y).residual_vec -
                        project(cfg, tm, k, y).residual_vec) /
                       (2.0 * h);
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * cur.residual_vec;
        bool stepped = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd M = JtJ;
            M.diagonal().array() += damp;
            const Eigen::VectorXd step = M.ldlt().solve(-g);
            const Eigen::VectorXd cand = theta + step;
            const Projection next = project(cfg, cand, k, y);
            if (next.objective < cur.objective) {
                theta = cand;
                cur = next;
                damp = std::max(damp * 0.3, 1e-12);
                stepped = true;
                break;
            }
            damp *= 10.0;
        }
        if (!stepped || cur.objective < 1e-28 || g.norm() < 1e-16) break;
    }
    return theta;
}

}  // namespace

KernelFit fit_partial_fractions(const KernelSamples& samples, int m, const FitOptions& options) {
    samples.validate();
    if (m < 1) throw ValidationError("number of partial-fraction terms must be >= 1");
    if (samples.k.size() < std::size_t(4 * m))
        throw ValidationError("need at least 4m samples for an m-term fit");

    const Eigen::VectorXd y =
        Eigen::Map<const Eigen::VectorXd>(samples.khat.data(), Eigen::Index(samples.khat.size()));
    const double kmax = samples.k.back();
    const double kmin_pos = [&] {
        for (double v : samples.k)
            if (v > 0.0) return v;
        return kmax;
    }();
    const double lo = std::log(std::max(kmin_pos * kmin_pos, 1e-6 * kmax * kmax));
    const double hi = std::log(10.0 * kmax * kmax);

    std::mt19937 rng(options.seed);
    std::uniform_real_distribution<double> uni(lo, hi);

    double best_obj = 1e301;
    Config best_cfg;
    Eigen::VectorXd best_theta;
    Projection best_proj;

    for (int n_pair = 0; 2 * n_pair <= m; ++n_pair) {
        Config cfg{m - 2 * n_pair, n_pair};
        for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
            Eigen::VectorXd theta(cfg.n_theta());
            int t = 0;
            for (int i = 0; i < cfg.n_real; ++i)
                theta(t++) = lo + (hi - lo) * (i + 0.5) / cfg.n_real + 0.3 * (uni(rng) - lo) /
                                                                          std::max(hi - lo, 1.0);
            for (int i = 0; i < cfg.n_pair; ++i) {
                theta(t++) = uni(rng);
                theta(t++) = uni(rng);
            }
            if (restart > 0)
                for (int i = 0; i < theta.size(); ++i) theta(i) = uni(rng);

            theta = nelder_mead(cfg, theta, samples.k, y);
            theta = lm_polish(cfg, theta, samples.k, y);
            const Projection proj = project(cfg, theta, samples.k, y);
            if (proj.objective < best_obj) {
                best_obj = proj.objective;
                best_cfg = cfg;
                best_theta = theta;
                best_proj = proj;
            }
        }
    }

    if (!(best_obj < 1e300))
        throw ConvergenceError("partial-fraction fit failed to produce a finite objective", 0, 0);

    KernelFit fit;
    fit.m = m;
    const auto q = best_cfg.poles(best_theta);
    int c = 0;
    for (int i = 0; i < best_cfg.n_real; ++i)
        fit.terms.push_back({cplx(best_proj.coeffs(c++), 0.0), q[std::size_t(i)]});
    for (int i = 0; i < best_cfg.n_pair; ++i) {
        const double pre = best_proj.coeffs(c++);
        const double pim = best_proj.coeffs(c++);
        const cplx P(pre, pim);
        const cplx Q = q[std::size_t(best_cfg.n_real + i)];
        fit.terms.push_back({P, Q});
        fit.terms.push_back({std::conj(P), std::conj(Q)});
    }

    double max_err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < samples.k.size(); ++i) {
        max_err = std::max(max_err, std::abs(eval_fit(fit, samples.k[i]) - samples.khat[i]));
        scale = std::max(scale, std::abs(samples.khat[i]));
    }
    fit.residual = max_err / std::max(scale, 1e-300);
    fit.residual_warning = fit.residual > options.residual_threshold;
    return fit;
}

double eval_fit(const KernelFit& fit, double k) {
    if (!(k >= 0.0)) throw ValidationError("wavenumber must be nonnegative");
    const double k2 = k * k;
    cplx v = 0.0;
    for (const auto& t : fit.terms) v += t.P * k2 / (k2 + t.Q);
    if (std::abs(v.imag()) > 1e-12 * std::max(std::abs(v.real()), 1.0))
        throw ConsistencyError("kernel fit evaluation has a nonreal value: "
                               "conjugate closure violated");
    return v.real();
}

std::vector<std::vector<cplx>> solve_predictor_potentials(const KernelFit& fit,
                                                          const std::vector<double>& p_grid,
                                                          const PeriodicGrid& grid) {
    if (p_grid.size() != grid.size()) throw ValidationError("grid size mismatch");
    const std::vector<cplx> p_hat = grid.forward_real(p_grid);

    std::vector<std::vector<cplx>> out;
    out.reserve(fit.terms.size());
    for (const auto& term : fit.terms) {
        std::vector<cplx> spec(grid.size());
        for (std::size_t idx = 0; idx < grid.size(); ++idx) {
            const double g2 = grid.wavevector(idx).squaredNorm();
            const cplx denom = g2 + term.Q;
            if (std::abs(denom) < 1e-12 * std::max(1.0, std::abs(term.Q)))
                throw RegimeError("lattice frequency resonant with pole Q_j");
            spec[idx] = -term.P * term.Q * p_hat[idx] / denom;
        }
        grid.inverse(spec);
        out.push_back(std::move(spec));
    }
    return out;
}

KernelMoments kernel_moments(const std::vector<double>& u_grid, const KernelFit& fit,
                             const PQMaps& maps, double gamma, const PeriodicGrid& grid) {
    if (u_grid.size() != grid.size()) throw ValidationError("grid size mismatch");
    const std::size_t n = u_grid.size();
    std::vector<double> p(n), q(n), dp(n), dq(n), ddp(n), ddq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = u_grid[i];
        p[i] = maps.p(u);
        q[i] = maps.q(u);
        dp[i] = maps.dp(u);
        dq[i] = maps.dq(u);
        ddp[i] = maps.ddp(u);
        ddq[i] = maps.ddq(u);
        if (!std::isfinite(p[i]) || !std::isfinite(q[i]) || !std::isfinite(dp[i]) ||
            !std::isfinite(dq[i]) || !std::isfinite(ddp[i]) || !std::isfinite(ddq[i]))
            throw ValidationError("non-finite p/q map value at grid point " + std::to_string(i));
    }

    const auto phi_p = solve_predictor_potentials(fit, p, grid);
    const auto phi_q = solve_predictor_potentials(fit, q, grid);

    KernelMoments mom;
    mom.gamma = gamma;
    mom.xi_p = grid.average(dp);
    mom.xi_q = grid.average(dq);

    double psi_val = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        psi_val += ddp[i] * q[i] + 2.0 * dp[i] * dq[i] + p[i] * ddq[i];
    psi_val /= double(n);

    cplx correction = 0.0;
    for (std::size_t j = 0; j < fit.terms.size(); ++j) {
        cplx chi_pj = 0.0, chi_qj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            chi_pj += ddp[i] * phi_q[j][i];
            chi_qj += ddq[i] * phi_p[j][i];
        }
        chi_pj /= double(n);
        chi_qj /= double(n);
        mom.chi_p.push_back(chi_pj);
        mom.chi_q.push_back(chi_qj);
        mom.psi.push_back(psi_val);
        correction += chi_pj + chi_qj + psi_val;
    }
    correction *= 0.5;

    const double scale = std::max({std::abs(correction.real()), std::abs(gamma), 1.0});
    if (std::abs(correction.imag()) > 1e-10 * scale)
        throw ConsistencyError("kernel moment correction is not real: conjugate closure broken");
    mom.gamma_tilde = gamma + correction.real();
    return mom;
}

CorrectorSystem corrector_system(const KernelFit& fit, const KernelMoments& moments,
                                 double alpha) {
    CorrectorSystem sys;
    sys.m = int(fit.terms.size());
    const int dim = 2 + 2 * sys.m;
    sys.laplace_coeff = Eigen::VectorXcd::Zero(dim);
    sys.mass = Eigen::MatrixXcd::Zero(dim, dim);
    sys.source = Eigen::VectorXd::Zero(dim);
    sys.unknowns = {"u_c", "phi_c"};

    // Row 0: -Lap u_c + 2 gamma_tilde u_c + 2 alpha phi_c
    //        + sum_j (xi_p phi_qjc + xi_q phi_pjc) = 0
    sys.laplace_coeff(0) = -1.0;
    sys.mass(0, 0) = 2.0 * moments.gamma_tilde;
    sys.mass(0, 1) = 2.0 * alpha;
    // Row 1: Lap phi_c + 2 alpha u_c + b_c = 0
    sys.laplace_coeff(1) = 1.0;
    sys.mass(1, 0) = 2.0 * alpha;
    sys.source(1) = 1.0;

    for (int j = 0; j < sys.m; ++j) {
        const int rp = 2 + 2 * j, rq = rp + 1;
        sys.unknowns.push_back("phi_p" + std::to_string(j + 1) + "c");
        sys.unknowns.push_back("phi_q" + std::to_string(j + 1) + "c");
        // -Lap phi_pjc + Q_j phi_pjc + xi_p u_c = 0 (and the q analogue)
        sys.laplace_coeff(rp) = -1.0;
        sys.mass(rp, rp) = fit.terms[std::size_t(j)].Q;
        sys.mass(rp, 0) = moments.xi_p;
        sys.laplace_coeff(rq) = -1.0;
        sys.mass(rq, rq) = fit.terms[std::size_t(j)].Q;
        sys.mass(rq, 0) = moments.xi_q;
        sys.mass(0, rq) = moments.xi_p;
        sys.mass(0, rp) = moments.xi_q;
    }
    return sys;
}

}  // namespace qcf
