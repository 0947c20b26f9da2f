// Acceptance suite: one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria. argv[1] must be the path to the qcfield CLI
// (used by the determinism criterion).
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qcf/defectcell.hpp"
#include "qcf/elastic.hpp"
#include "qcf/errors.hpp"
#include "qcf/homogenized.hpp"
#include "qcf/kernelfit.hpp"
#include "qcf/report.hpp"
#include "qcf/unitcell.hpp"

using namespace qcf;

namespace {

int g_failures = 0;

void report(int num, const char* name, bool ok, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", num, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

constexpr double kLambda = 1.0 / 6.0;
constexpr double kAlpha = 0.1629;
constexpr double kGamma = 0.9449;
constexpr double kA0 = 7.5;
constexpr double kCore = kA0 / 2.0;

HomogenizedModel aluminum() { return build_model(kLambda, kAlpha, kGamma); }

// ---------------------------------------------------------------- 1
void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const HomogenizedModel m = aluminum();
    const SweepResult sweep =
        cell_size_sweep(m, 1.0, kCore, log_spaced(1.2 * kCore, 10.0 * kA0, 40));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_band = sweep.R0_at_1pct >= 2.5 * kA0 && sweep.R0_at_1pct <= 3.5 * kA0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "1%% crossing at R0=%.4g Bohr = %.3f a0, runtime %.3f s",
                  sweep.R0_at_1pct, sweep.R0_at_1pct / kA0, secs);
    report(1, "cell-size convergence, 1% crossing in [2.5, 3.5] a0, < 1 s", in_band && secs < 1.0,
           buf);
}

// ---------------------------------------------------------------- 2
void criterion2() {
    const HomogenizedModel m = aluminum();
    // independent long-double evaluation: k-^2 = a + s, k+^2 = b/(a + s)
    // with a = gamma/lambda, b = 4 alpha^2/lambda, s = sqrt(a^2 - b)
    const long double a = (long double)kGamma / (long double)kLambda;
    const long double b =
        4.0L * (long double)kAlpha * (long double)kAlpha / (long double)kLambda;
    const long double s = sqrtl(a * a - b);
    const long double kp = sqrtl(b / (a + s));
    const long double km = sqrtl(a + s);
    const double ep = std::abs(m.k_plus - (double)kp) / (double)kp;
    const double em = std::abs(m.k_minus - (double)km) / (double)km;
    const double decay = std::exp(-m.k_plus * (3.0 * kA0 - kCore));
    const bool ok = ep < 1e-10 && em < 1e-10 && std::abs(decay - 0.0116226) < 1e-6;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "k+=%.15g k-=%.15g, rel dev %.1e / %.1e, exp(-k+(3a0-r0))=%.6g", m.k_plus,
                  m.k_minus, ep, em, decay);
    report(2, "characteristic roots match the long-double oracle to 1e-10", ok, buf);
}

// ---------------------------------------------------------------- 3
void criterion3() {
    const HomogenizedModel m = aluminum();
    const double R0 = 60.0 / m.k_plus;
    const SphericalDefect d{1.0, kCore, R0};
    const RadialDefectSolution sol = solve_coefficients(m, d);

    const double dk2 = m.k_plus * m.k_plus - m.k_minus * m.k_minus;
    const double l04 = 1.0 / m.inv_l0_4();
    const double C1 = d.rho * l04 * m.k_minus * m.k_minus * (1.0 + m.k_plus * d.r0) *
                      std::exp(-m.k_plus * d.r0) / (2.0 * m.k_plus * dk2);
    const double C2 = -d.rho * l04 * m.k_plus * m.k_plus * (1.0 + m.k_minus * d.r0) *
                      std::exp(-m.k_minus * d.r0) / (2.0 * m.k_minus * dk2);
    const double e1 = std::abs(sol.unscaled[0] - C1) / std::abs(C1);
    const double e2 = std::abs(sol.unscaled[1] - C2) / std::abs(C2);
    const double dmax = std::abs(sol.scaled[0]);
    const double d5 = std::abs(sol.scaled[4]) / std::max(dmax, 1.0);
    const double d6 = std::abs(sol.scaled[5]) / std::max(dmax, 1.0);
    const bool ok = e1 < 1e-6 && e2 < 1e-6 && d5 < 1e-10 && d6 < 1e-10;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "C1 dev %.1e, C2 dev %.1e, |C5|=%.1e, |C6|=%.1e", e1, e2, d5,
                  d6);
    report(3, "R0 = 60/k+ reproduces the infinite-cell coefficients", ok, buf);
}

// ---------------------------------------------------------------- 4
double quadrature_energy(const RadialDefectSolution& sol) {
    // independent composite Gauss-Legendre (8 nodes, many panels) of
    // (1/2) integral (-lambda b / 2 alpha) phi over the core ball
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    const double r0 = sol.defect.r0;
    const int panels = 200;
    double integral = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = r0 * p / panels, b = r0 * (p + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < 4; ++i) {
            for (double sgn : {-1.0, 1.0}) {
                const double r = mid + sgn * half * gx[i];
                integral += gw[i] * half * field_phi(sol, r) * r * r;
            }
        }
    }
    return -sol.model.lambda * sol.defect.rho / (4.0 * sol.model.alpha) * 4.0 * M_PI * integral;
}

void criterion4() {
    const HomogenizedModel m = aluminum();
    double worst = 0.0;
    int count = 0;
    for (double r0 : {2.0, 3.0, 3.75, 5.0, 6.0}) {
        for (double mult : {3.0, 5.0, 8.0, 12.0}) {
            const RadialDefectSolution sol =
                solve_coefficients(m, SphericalDefect{1.0, r0, mult * r0});
            const double closed = energy_es(sol);
            const double quad = quadrature_energy(sol);
            worst = std::max(worst, std::abs(closed - quad) / std::abs(closed));
            ++count;
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "max relative deviation %.2e over %d (r0, R0) pairs", worst,
                  count);
    report(4, "closed-form energy equals radial quadrature to 1e-8", worst < 1e-8, buf);
}

// ---------------------------------------------------------------- 5
void criterion5() {
    const HomogenizedModel m = aluminum();
    double worst = 0.0;
    for (double R0 : log_spaced(1.2 * kCore, 10.0 * kA0, 40)) {
        const RadialDefectSolution sol = solve_coefficients(m, SphericalDefect{1.0, kCore, R0});
        worst = std::max(worst, flux_identity_residual(sol));
    }
    char buf[100];
    std::snprintf(buf, sizeof(buf), "max relative residual %.2e over 40 cells", worst);
    report(5, "flux/neutrality identity holds to 1e-8 across the sweep", worst < 1e-8, buf);
}

// ---------------------------------------------------------------- 6
void criterion6() {
    const HomogenizedModel m = aluminum();
    bool ok = true;
    std::ostringstream detail;
    for (double r : {1.0, 5.0, 20.0}) {
        const double r1 = ode_residual(m, r, 0.1);
        const double r2 = ode_residual(m, r, 0.05);
        const double ratio = r1 / r2;
        detail << "r=" << r << " ratio=" << ratio << "; ";
        if (!(ratio > 3.0 && ratio < 5.0)) ok = false;
    }
    const double l0 = m.l0;
    const HomogenizedModel confluent = build_model(kLambda, kAlpha, kLambda / (l0 * l0));
    const double l1 = l0 * (1.0 + 1e-6);
    const HomogenizedModel near = build_model(kLambda, kAlpha, kLambda / (l1 * l1));
    double cont = 0.0;
    for (double r : {0.5, 1.0, 3.0}) {
        cont = std::max(cont, std::abs(green_u(near, r) - green_u(confluent, r)) /
                                  std::abs(green_u(confluent, r)));
    }
    detail << "case1->case2 dev " << cont;
    if (!(cont < 1e-4)) ok = false;
    report(6, "ODE residual is O(h^2); Case-1/Case-2 continuity", ok, detail.str());
}

// ---------------------------------------------------------------- 7
void criterion7() {
    bool ok = true;
    std::ostringstream detail;

    UnitCellSpec jell = UnitCellSpec::fcc(kA0);
    jell.Z = 4.0;
    jell.N = 16;
    jell.mode = SourceMode::uniform_background;
    const ElectronicFields jf = solve_unit_cell(jell);
    const double nbar = jell.Z / jell.volume();
    const double u_exact = std::sqrt(nbar);
    const double phi_exact = -(5.0 / 3.0) * thomas_fermi_cf() * std::pow(nbar, 2.0 / 3.0);
    double du = 0.0, dphi = 0.0;
    for (std::size_t i = 0; i < jf.u.size(); ++i) {
        du = std::max(du, std::abs(jf.u[i] - u_exact) / u_exact);
        dphi = std::max(dphi, std::abs(jf.phi[i] - phi_exact) / std::abs(phi_exact));
    }
    detail << "jellium dev u " << du << ", phi " << dphi << "; ";
    if (du > 1e-8 || dphi > 1e-8) ok = false;

    auto alpha_at = [&](int N) {
        UnitCellSpec s = UnitCellSpec::fcc(kA0);
        s.Z = 4.0;
        s.N = N;
        s.sigma_nuc = 0.9;
        s.mode = SourceMode::regularized_nucleus;
        const ElectronicFields f = solve_unit_cell(s);
        if (f.residual_u > 1e-6) ok = false;
        return moments(f, s).alpha;
    };
    const double a32 = alpha_at(32);
    const double a64 = alpha_at(64);
    const double dalpha = std::abs(a64 - a32) / std::abs(a64);
    detail << "alpha N=32: " << a32 << ", N=64: " << a64 << ", rel dev " << dalpha;
    if (dalpha > 1e-4) ok = false;

    report(7, "jellium exactness; N=32 vs 64 alpha agreement; residuals <= 1e-6", ok,
           detail.str());
}

// ---------------------------------------------------------------- 8
void criterion8() {
    UnitCellSpec s = UnitCellSpec::fcc(kA0);
    s.Z = 4.0;
    s.N = 32;
    s.sigma_nuc = 0.9;
    s.mode = SourceMode::regularized_nucleus;

    Eigen::Matrix3d rz90, r111, perm;
    rz90 << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    r111 << 0, 0, 1, 1, 0, 0, 0, 1, 0;  // 120 deg rotation about [111]
    perm = r111;                        // cyclic coordinate permutation maps the fcc
                                        // primitive vectors to themselves
    const SymmetryReport rep =
        symmetry_check(s, {{rz90, SymmetryOp::Side::rotate_left},
                           {r111, SymmetryOp::Side::rotate_left},
                           {perm, SymmetryOp::Side::lattice_right}});
    char buf[100];
    std::snprintf(buf, sizeof(buf), "max relative deviation %.2e over 3 group elements",
                  rep.max_deviation);
    report(8, "cubic symmetry of W, alpha, beta, gamma on the FCC spec", rep.passed, buf);
}

// ---------------------------------------------------------------- 9
void criterion9() {
    const ElasticSpec unit{1.0, 1.0, 1.0, 1.0, 1.0, 2.0};
    const Thetas t = solve_thetas(unit);
    const double e = energy_el(unit);
    bool ok = std::abs(t.theta1 + 0.125) < 1e-10 && std::abs(e + 0.1875) < 1e-10;

    double dev = 0.0;
    for (double R0 : {1.5, 3.0, 10.0}) {
        ElasticSpec spec = unit;
        spec.R0 = R0;
        const double measured = std::abs(energy_el(spec) - energy_el_infinite(spec)) /
                                std::abs(energy_el_infinite(spec));
        dev = std::max(dev, std::abs(measured - std::pow(spec.r0 / R0, 3)));
    }
    if (dev > 1e-10) ok = false;

    ElasticSpec cross = unit;
    cross.R0 = cross.r0 * std::cbrt(100.0);
    const double crossing_err = std::abs(elastic_rel_error(cross) - 0.01);
    if (crossing_err > 1e-12) ok = false;

    char buf[140];
    std::snprintf(buf, sizeof(buf),
                  "theta1=%.6g, E=%.6g, (r0/R0)^3 dev %.1e, 1%% crossing dev %.1e", t.theta1, e,
                  dev, crossing_err);
    report(9, "elastic closed forms (theta1 = -0.125, E = -0.1875, exact error law)", ok, buf);
}

// ---------------------------------------------------------------- 10
void criterion10() {
    bool ok = true;
    std::ostringstream detail;

    auto synth = [](const std::vector<PoleTerm>& terms, int n, double kmax) {
        KernelSamples s;
        s.provenance = "analytic";
        for (int i = 0; i < n; ++i) {
            const double k = kmax * i / (n - 1);
            cplx v = 0.0;
            for (const auto& t : terms) v += t.P * k * k / (k * k + t.Q);
            s.k.push_back(k);
            s.khat.push_back(v.real());
        }
        return s;
    };

    const KernelFit f1 = fit_partial_fractions(synth({{2.0, 3.0}}, 24, 6.0), 1);
    const double d1 = std::max(std::abs(f1.terms[0].P - 2.0), std::abs(f1.terms[0].Q - 3.0));
    detail << "1-term param dev " << d1 << "; ";
    if (d1 > 1e-8) ok = false;

    const cplx P(1.0, 0.5), Q(3.0, 2.0);
    const KernelFit f2 =
        fit_partial_fractions(synth({{P, Q}, {std::conj(P), std::conj(Q)}}, 40, 8.0), 2);
    detail << "2-term residual " << f2.residual << "; ";
    if (f2.residual > 1e-8) ok = false;

    // single-mode spectral solve against the hand formula
    const PeriodicGrid grid(2.0 * M_PI * Eigen::Matrix3d::Identity(), 16);
    KernelFit fit;
    fit.m = 1;
    fit.terms = {{2.0, 3.0}};
    std::vector<double> p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) p[i] = std::cos(grid.position(i).x());
    const auto phi = solve_predictor_potentials(fit, p, grid);
    double dev = 0.0;
    const double factor = -2.0 * 3.0 / (1.0 + 3.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        dev = std::max(dev, std::abs(phi[0][i].real() - factor * p[i]));
    detail << "spectral dev " << dev;
    if (dev > 1e-10) ok = false;

    report(10, "kernel fit recovery and single-mode spectral solve", ok, detail.str());
}

// ---------------------------------------------------------------- 11
void criterion11(const char* cli) {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "qcf_acceptance";
    std::error_code ec;
    fs::remove_all(base, ec);
    fs::create_directories(base / "run1");
    fs::create_directories(base / "run2");

    bool ok = true;
    std::string detail;
    for (const char* run : {"run1", "run2"}) {
        const std::string cmd = std::string("\"") + cli + "\" paper-figure --out " +
                                (base / run).string() + " > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) {
            ok = false;
            detail = "CLI invocation failed";
        }
    }
    if (ok) {
        const std::string c1 = read_file((base / "run1" / "cell_size_error.csv").string());
        const std::string c2 = read_file((base / "run2" / "cell_size_error.csv").string());
        ok = !c1.empty() && c1 == c2;
        detail = "csv bytes " + std::to_string(c1.size()) + ", fnv64 " + fnv64_hex(c1) +
                 (ok ? " == " : " != ") + fnv64_hex(c2);
    }
    report(11, "paper-figure CSV is byte-identical across two runs", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-qcfield>\n");
        return 64;
    }
    try {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
        criterion7();
        criterion8();
        criterion9();
        criterion10();
        criterion11(argv[1]);
    } catch (const std::exception& e) {
        std::printf("FAIL (exception): %s\n", e.what());
        return 70;
    }
    std::printf("%d of 11 criteria passed\n", 11 - g_failures);
    return g_failures;
}
