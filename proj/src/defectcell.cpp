#include "qcf/defectcell.hpp"

#include <cmath>

#include "qcf/errors.hpp"

namespace qcf {

namespace {

// Per-column slope and scaled basis value; columns 0..3 are the inner
// region, 4..7 the outer region (see DefectSystem docs).
struct Basis {
    double k_plus, k_minus, r0, R0;

    double slope(int col) const {
        switch (col) {
            case 0: return k_plus;
            case 1: return k_minus;
            case 2: return -k_plus;
            case 3: return -k_minus;
            case 4: return k_plus;
            case 5: return k_minus;
            case 6: return -k_plus;
            case 7: return -k_minus;
        }
        return 0.0;
    }

    double value(int col, double r) const {
        switch (col) {
            case 0: return std::exp(k_plus * (r - r0));
            case 1: return std::exp(k_minus * (r - r0));
            case 2: return std::exp(-k_plus * r);
            case 3: return std::exp(-k_minus * r);
            case 4: return std::exp(k_plus * (r - R0));
            case 5: return std::exp(k_minus * (r - R0));
            case 6: return std::exp(-k_plus * (r - r0));
            case 7: return std::exp(-k_minus * (r - r0));
        }
        return 0.0;
    }

    double deriv(int col, double r, int m) const {
        return std::pow(slope(col), m) * value(col, r);
    }

    // unscaled C_i = column_scale[i] * D_i
    double column_scale(int col) const {
        switch (col) {
            case 0: return std::exp(-k_plus * r0);
            case 1: return std::exp(-k_minus * r0);
            case 2: return 1.0;
            case 3: return 1.0;
            case 4: return std::exp(-k_plus * R0);
            case 5: return std::exp(-k_minus * R0);
            case 6: return std::exp(k_plus * r0);
            case 7: return std::exp(k_minus * r0);
        }
        return 1.0;
    }
};

Basis basis_of(const HomogenizedModel& m, const SphericalDefect& d) {
    return Basis{m.k_plus, m.k_minus, d.r0, d.R0};
}

constexpr double kSeriesThresholdFactor = 1e-6;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

}  // namespace

void SphericalDefect::validate() const {
    if (!(r0 > 0.0) || !(R0 > r0)) throw ValidationError("defect radii must satisfy 0 < r0 < R0");
    if (!std::isfinite(rho)) throw ValidationError("source amplitude rho must be finite");
}

DefectSystem assemble_system(const HomogenizedModel& model, const SphericalDefect& defect) {
    if (model.regime != Regime::case1)
        throw RegimeError("finite-cell defect solve requires Case 1 (gamma > 0, l0 > l1 > 0)");
    defect.validate();

    const Basis bas = basis_of(model, defect);
    const double l04 = 1.0 / model.inv_l0_4();
    const double inv_l1_sq = model.inv_l1_sq();
    const double r0 = defect.r0, R0 = defect.R0;

    DefectSystem sys;
    sys.A.setZero();
    sys.rhs.setZero();

    // Evenness at the origin: C1 + C3 = 0, C2 + C4 = 0.
    sys.A(0, 0) = bas.column_scale(0);
    sys.A(0, 2) = 1.0;
    sys.A(1, 1) = bas.column_scale(1);
    sys.A(1, 3) = 1.0;

    // Continuity of d^m/dr^m (ru) at r0; the inner particular solution
    // rho*l0^4*r moves to the right-hand side for m = 0, 1.
    const double cont_rhs[4] = {-defect.rho * r0 * l04, -defect.rho * l04, 0.0, 0.0};
    for (int m = 0; m < 4; ++m) {
        for (int c = 0; c < 4; ++c) sys.A(2 + m, c) = bas.deriv(c, r0, m);
        for (int c = 4; c < 8; ++c) sys.A(2 + m, c) = -bas.deriv(c, r0, m);
        sys.rhs(2 + m) = cont_rhs[m];
    }

    // Dirichlet condition u(R0) = 0.
    for (int c = 4; c < 8; ++c) sys.A(6, c) = bas.deriv(c, R0, 0);

    // Flux/neutrality row on B_R0.
    for (int c = 4; c < 8; ++c) {
        sys.A(7, c) = R0 * bas.deriv(c, R0, 3) - bas.deriv(c, R0, 2) -
                      inv_l1_sq * 2.0 * (R0 * bas.deriv(c, R0, 1) - bas.deriv(c, R0, 0));
    }

    for (int c = 0; c < 8; ++c) sys.column_scale[std::size_t(c)] = bas.column_scale(c);

    // Row equilibration keeps the condition estimate meaningful.
    for (int rrow = 0; rrow < 8; ++rrow) {
        const double scale = sys.A.row(rrow).cwiseAbs().maxCoeff();
        if (scale > 0.0) {
            sys.A.row(rrow) /= scale;
            sys.rhs(rrow) /= scale;
        }
    }

    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 8>> svd(sys.A);
    const auto& sv = svd.singularValues();
    sys.condition = sv(0) / std::max(sv(7), 1e-300);
    return sys;
}

double eval_ru_deriv(const RadialDefectSolution& sol, double r, int m) {
    const Basis bas = basis_of(sol.model, sol.defect);
    const double l04 = 1.0 / sol.model.inv_l0_4();
    double v = 0.0;
    if (r <= sol.defect.r0) {
        if (m == 0) v = sol.defect.rho * l04 * r;
        if (m == 1) v = sol.defect.rho * l04;
        for (int c = 0; c < 4; ++c) v += sol.scaled[std::size_t(c)] * bas.deriv(c, r, m);
    } else {
        for (int c = 4; c < 8; ++c) v += sol.scaled[std::size_t(c)] * bas.deriv(c, r, m);
    }
    return v;
}

namespace {

double term_magnitude(const RadialDefectSolution& sol, double r, int m) {
    const Basis bas = basis_of(sol.model, sol.defect);
    const double l04 = 1.0 / sol.model.inv_l0_4();
    double v = std::abs(sol.defect.rho) * l04 * (m == 0 ? r : (m == 1 ? 1.0 : 0.0));
    const int lo = r <= sol.defect.r0 ? 0 : 4;
    for (int c = lo; c < lo + 4; ++c)
        v += std::abs(sol.scaled[std::size_t(c)] * bas.deriv(c, r, m));
    return v;
}

void verify_solution(const RadialDefectSolution& sol) {
    const double tol = 1e-6;
    const auto& C = sol.unscaled;
    const double even1 = std::abs(C[0] + C[2]);
    const double even2 = std::abs(C[1] + C[3]);
    const double scale1 = std::max({std::abs(C[0]), std::abs(C[2]), 1e-300});
    const double scale2 = std::max({std::abs(C[1]), std::abs(C[3]), 1e-300});
    if (even1 > tol * scale1 || even2 > tol * scale2)
        throw ConsistencyError("evenness conditions violated: system ill-conditioned");

    for (int m = 0; m < 4; ++m) {
        RadialDefectSolution inner = sol;  // evaluate both sides at r0
        const double r0 = sol.defect.r0;
        const double vin = eval_ru_deriv(inner, r0, m);
        inner.defect.r0 = r0 * (1.0 - 1e-16);  // force the outer branch
        const double vout = eval_ru_deriv(inner, r0, m);
        const double mag = std::max(term_magnitude(sol, r0, m), 1e-300);
        if (std::abs(vin - vout) > tol * mag)
            throw ConsistencyError("continuity of (ru) derivatives violated at r0");
    }

    const double boundary = std::abs(eval_ru_deriv(sol, sol.defect.R0, 0));
    const double bmag = std::max(term_magnitude(sol, sol.defect.R0, 0), 1e-300);
    if (boundary > tol * bmag)
        throw ConsistencyError("Dirichlet boundary condition u(R0)=0 violated");

    if (flux_identity_residual(sol) > tol)
        throw ConsistencyError("flux/neutrality identity violated on B_R0");
}

}  // namespace

RadialDefectSolution solve_coefficients(const HomogenizedModel& model,
                                        const SphericalDefect& defect) {
    const DefectSystem sys = assemble_system(model, defect);
    if (sys.condition > 1e14)
        throw RegimeError("degenerate geometry: defect system numerically singular");

    const Eigen::Matrix<double, 8, 1> d = sys.A.fullPivLu().solve(sys.rhs);

    RadialDefectSolution sol;
    sol.model = model;
    sol.defect = defect;
    for (int c = 0; c < 8; ++c) {
        sol.scaled[std::size_t(c)] = d(c);
        sol.unscaled[std::size_t(c)] = sys.column_scale[std::size_t(c)] * d(c);
    }
    sol.condition = sys.condition;
    sol.residual = (sys.A * d - sys.rhs).norm();
    verify_solution(sol);
    sol.varsigma = field_phi(sol, defect.R0);
    return sol;
}

double field_u(const RadialDefectSolution& sol, double r) {
    if (r < 0.0 || r > sol.defect.R0) throw ValidationError("radius outside [0, R0]");
    if (r < kSeriesThresholdFactor * sol.defect.r0)
        return eval_ru_deriv(sol, 0.0, 1);  // l'Hopital: u(0) = (ru)'(0)
    return eval_ru_deriv(sol, r, 0) / r;
}

double field_phi(const RadialDefectSolution& sol, double r) {
    if (r < 0.0 || r > sol.defect.R0) throw ValidationError("radius outside [0, R0]");
    const double half_l_over_a = sol.model.lambda / (2.0 * sol.model.alpha);
    const double g_over_a = sol.model.gamma / sol.model.alpha;
    if (r < kSeriesThresholdFactor * sol.defect.r0)
        return half_l_over_a * eval_ru_deriv(sol, 0.0, 3) - g_over_a * eval_ru_deriv(sol, 0.0, 1);
    return (half_l_over_a * eval_ru_deriv(sol, r, 2) - g_over_a * eval_ru_deriv(sol, r, 0)) / r;
}

double flux_identity_residual(const RadialDefectSolution& sol) {
    const Basis bas = basis_of(sol.model, sol.defect);
    const double R0 = sol.defect.R0, r0 = sol.defect.r0;
    const double inv_l1_sq = sol.model.inv_l1_sq();
    const double inv_l0_4 = sol.model.inv_l0_4();
    const double l04 = 1.0 / inv_l0_4;

    const double boundary = R0 * eval_ru_deriv(sol, R0, 3) - eval_ru_deriv(sol, R0, 2) -
                            2.0 * inv_l1_sq * (R0 * eval_ru_deriv(sol, R0, 1) -
                                               eval_ru_deriv(sol, R0, 0));

    // integral of (ru) r dr, analytic per basis term
    auto exp_moment = [](double s, double ref, double a, double b) {
        // integral_a^b e^{s(r-ref)} r dr
        auto prim = [&](double r) { return std::exp(s * (r - ref)) * (r / s - 1.0 / (s * s)); };
        return prim(b) - prim(a);
    };
    double volume_int = sol.defect.rho * l04 * r0 * r0 * r0 / 3.0;
    const double refs[8] = {r0, r0, 0.0, 0.0, R0, R0, r0, r0};
    for (int c = 0; c < 4; ++c)
        volume_int += sol.scaled[std::size_t(c)] * exp_moment(bas.slope(c), refs[c], 0.0, r0);
    for (int c = 4; c < 8; ++c)
        volume_int += sol.scaled[std::size_t(c)] * exp_moment(bas.slope(c), refs[c], r0, R0);

    const double u_term = inv_l0_4 * volume_int;
    const double b_term = sol.defect.rho * r0 * r0 * r0 / 3.0;
    const double total = boundary + u_term - b_term;
    const double scale = std::max({std::abs(boundary), std::abs(u_term), std::abs(b_term), 1e-300});
    return std::abs(total) / scale;
}

namespace {

double energy_closed_form(const HomogenizedModel& m, const SphericalDefect& d, double D1,
                          double D2) {
    // Scaled form of the closed-form energy: with C1 = D1 exp(-k+ r0),
    // C1 [k r0 cosh(k r0) - sinh(k r0)] = D1 g(k r0),
    // g(x) = (x - 1)/2 + exp(-2x)(x + 1)/2, so no large exponential appears.
    auto g = [](double x) { return 0.5 * (x - 1.0) + 0.5 * std::exp(-2.0 * x) * (x + 1.0); };
    const double kp = m.k_plus, km = m.k_minus;
    const double Cp = -m.lambda * km * km / (2.0 * m.alpha);
    const double Cm = -m.lambda * kp * kp / (2.0 * m.alpha);
    const double a3 = m.alpha * m.alpha * m.alpha;
    const double bracket = -M_PI * m.gamma * m.lambda * d.rho * d.r0 * d.r0 * d.r0 / (3.0 * a3) +
                           Cp * D1 * 8.0 * M_PI * g(kp * d.r0) / (kp * kp) +
                           Cm * D2 * 8.0 * M_PI * g(km * d.r0) / (km * km);
    // The bracket equals the integral of phi over the core ball, so the
    // prefactor carries the source amplitude: (1/2) b_c * integral(phi),
    // b_c = -lambda rho / (2 alpha).  This keeps the energy quadratic in rho.
    return -m.lambda * d.rho / (4.0 * m.alpha) * bracket;
}

double energy_quadrature(const RadialDefectSolution& sol) {
    // (1/2) integral (-lambda b / 2 alpha) phi over the core ball.
    const auto& m = sol.model;
    const auto& d = sol.defect;
    static std::vector<double> gx, gw;
    if (gx.empty()) gauss_legendre(24, gx, gw);
    const int panels = std::max(4, int(std::ceil(m.k_minus * d.r0)));
    double integral = 0.0;  // integral of phi r^2 dr over [0, r0]
    for (int p = 0; p < panels; ++p) {
        const double a = d.r0 * p / panels, b = d.r0 * (p + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t i = 0; i < gx.size(); ++i) {
            const double r = mid + half * gx[i];
            integral += gw[i] * half * field_phi(sol, r) * r * r;
        }
    }
    return -m.lambda * d.rho / (4.0 * m.alpha) * 4.0 * M_PI * integral;
}

}  // namespace

double energy_es(const RadialDefectSolution& sol) {
    const double closed = energy_closed_form(sol.model, sol.defect, sol.scaled[0], sol.scaled[1]);
    const double quad = energy_quadrature(sol);
    const double scale = std::max({std::abs(closed), std::abs(quad), 1e-300});
    if (sol.defect.rho != 0.0 && std::abs(closed - quad) > 1e-8 * scale)
        throw ConsistencyError("closed-form defect energy disagrees with radial quadrature");
    return closed;
}

double energy_es_cell(const RadialDefectSolution& sol) {
    // A finite simulation cell references the electrostatic potential to its
    // boundary value, while the infinite-crystal energy references phi to
    // zero at infinity.  Because the bare perturbation charge b_c does not
    // integrate to zero on the core alone, the energy picks up the monopole
    // gauge term -(1/2) b_c V_core varsigma, which decays like exp(-k+ R0)
    // and dominates the cell-size error.
    const double v_core = 4.0 * M_PI / 3.0 * std::pow(sol.defect.r0, 3);
    const double bc = sol.defect.core_charge(sol.model);
    return energy_es(sol) - 0.5 * bc * v_core * sol.varsigma;
}

double energy_es_infinite(const HomogenizedModel& model, const SphericalDefect& defect) {
    if (model.regime != Regime::case1)
        throw RegimeError("infinite-cell energy requires Case 1");
    defect.validate();
    const double kp = model.k_plus, km = model.k_minus;
    const double l04 = 1.0 / model.inv_l0_4();
    const double dk2 = kp * kp - km * km;
    // Scaled analytic coefficients: D = C exp(+k r0).
    const double D1 = defect.rho * l04 * km * km * (1.0 + kp * defect.r0) / (2.0 * kp * dk2);
    const double D2 = -defect.rho * l04 * kp * kp * (1.0 + km * defect.r0) / (2.0 * km * dk2);
    return energy_closed_form(model, defect, D1, D2);
}

SweepResult cell_size_sweep(const HomogenizedModel& model, double rho, double r0,
                            const std::vector<double>& R0_list) {
    if (R0_list.empty()) throw ValidationError("R0 list must be nonempty");
    for (std::size_t i = 0; i < R0_list.size(); ++i) {
        if (R0_list[i] <= r0) throw ValidationError("every R0 must exceed r0");
        if (i > 0 && R0_list[i] <= R0_list[i - 1])
            throw ValidationError("R0 list must be strictly increasing");
    }

    SweepResult result;
    SphericalDefect ref{rho, r0, R0_list.back()};
    result.energy_infinite = energy_es_infinite(model, ref);
    const double scale = std::abs(result.energy_infinite);

    for (double R0 : R0_list) {
        SweepRow row;
        row.R0 = R0;
        try {
            const auto sol = solve_coefficients(model, SphericalDefect{rho, r0, R0});
            row.energy = energy_es_cell(sol);
            row.rel_error = std::abs(row.energy - result.energy_infinite) / scale;
            row.ok = true;
            if (result.R0_at_1pct == 0.0 && row.rel_error < 0.01) result.R0_at_1pct = R0;
        } catch (const Error& e) {
            row.error = e.what();
        }
        result.rows.push_back(row);
    }
    return result;
}

std::vector<double> log_spaced(double lo, double hi, int points) {
    if (points < 1 || lo <= 0.0 || hi <= lo) throw ValidationError("bad log-spaced grid");
    std::vector<double> out(static_cast<std::size_t>(points), 0.0);
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < points; ++i)
        out[std::size_t(i)] = std::exp(la + (lb - la) * i / (points - 1));
    return out;
}

}  // namespace qcf
