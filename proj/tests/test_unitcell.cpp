#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcf/errors.hpp"
#include "qcf/unitcell.hpp"

using namespace qcf;

namespace {

UnitCellSpec jellium_sc(double a0, double Z, int N) {
    UnitCellSpec s = UnitCellSpec::simple_cubic(a0);
    s.Z = Z;
    s.N = N;
    s.mode = SourceMode::uniform_background;
    return s;
}

UnitCellSpec nucleus_sc(double a0, double Z, int N, double sigma) {
    UnitCellSpec s = UnitCellSpec::simple_cubic(a0);
    s.Z = Z;
    s.N = N;
    s.sigma_nuc = sigma;
    s.mode = SourceMode::regularized_nucleus;
    return s;
}

}  // namespace

TEST_CASE("spec validation") {
    UnitCellSpec s = UnitCellSpec::simple_cubic(4.0);
    CHECK_NOTHROW(s.validate());
    s.N = 7;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.N = 16;
    s.lambda = 1.5;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.lambda = 1.0 / 6.0;
    s.e_hat *= 1.1;  // breaks det = 1
    CHECK_THROWS_AS(s.validate(), ValidationError);

    UnitCellSpec fcc = UnitCellSpec::fcc(7.5);
    CHECK_NOTHROW(fcc.validate());
    CHECK(fcc.volume() == doctest::Approx(7.5 * 7.5 * 7.5 / 4.0).epsilon(1e-12));
}

TEST_CASE("uniform background source") {
    UnitCellSpec s = UnitCellSpec::fcc(7.5);
    s.Z = 4.0;
    s.N = 16;
    s.mode = SourceMode::uniform_background;
    const auto b = assemble_source(s);
    const double expect = 4.0 / (7.5 * 7.5 * 7.5 / 4.0);  // Z / 105.47
    for (std::size_t i = 0; i < b.size(); i += 211)
        CHECK(b[i] == doctest::Approx(-expect).epsilon(1e-12));
}

TEST_CASE("regularized nucleus source") {
    const UnitCellSpec s = nucleus_sc(6.0, 2.0, 16, 1.6);
    PeriodicGrid grid(s.cell(), s.N);
    const auto b = assemble_source(s, grid);
    // periodized Gaussian integrates to exactly -Z (zero spectral mode)
    CHECK(grid.integral(b) == doctest::Approx(-2.0).epsilon(1e-10));

    UnitCellSpec coarse = s;
    coarse.sigma_nuc = 0.1;  // < 4 grid spacings
    CHECK_THROWS_AS(assemble_source(coarse), ValidationError);
}

TEST_CASE("jellium closed forms") {
    const double a0 = 2.0, Z = 1.0;
    const UnitCellSpec s = jellium_sc(a0, Z, 16);
    const ElectronicFields f = solve_unit_cell(s);
    const double nbar = Z / (a0 * a0 * a0);
    const double u_exact = std::sqrt(nbar);
    const double phi_exact = -(5.0 / 3.0) * thomas_fermi_cf() * std::pow(nbar, 2.0 / 3.0);
    for (std::size_t i = 0; i < f.u.size(); i += 97) {
        CHECK(f.u[i] == doctest::Approx(u_exact).epsilon(1e-8));
        CHECK(f.phi[i] == doctest::Approx(phi_exact).epsilon(1e-8));
    }
    CHECK(std::abs(f.neutrality) <= 1e-8 * Z);

    const CellMoments m = moments(f, s);
    CHECK(m.alpha == doctest::Approx(u_exact).epsilon(1e-10));
    CHECK(m.beta == doctest::Approx(phi_exact).epsilon(1e-10));
    const double gamma_exact =
        (35.0 / 9.0 - 5.0 / 3.0) * thomas_fermi_cf() * std::pow(nbar, 2.0 / 3.0);
    CHECK(m.gamma == doctest::Approx(gamma_exact).epsilon(1e-10));
    CHECK(m.W == doctest::Approx(thomas_fermi_cf() * std::pow(nbar, 5.0 / 3.0)).epsilon(1e-10));
    CHECK(m.gamma - m.beta >= 0.0);
}

TEST_CASE("regularized-nucleus solve satisfies the discrete problem") {
    const UnitCellSpec s = nucleus_sc(6.0, 2.0, 16, 1.6);
    const ElectronicFields f = solve_unit_cell(s);
    CHECK(f.residual_u <= 1e-6);
    CHECK(f.residual_phi <= 1e-8);
    CHECK(std::abs(f.neutrality) <= 1e-8 * s.Z);
    for (double v : f.u) CHECK(v >= 0.0);

    const CellMoments m = moments(f, s);
    CHECK(m.alpha > 0.0);
    CHECK(m.gamma - m.beta >= 0.0);
}

TEST_CASE("moments scale linearly with the field") {
    const UnitCellSpec s = jellium_sc(2.0, 1.0, 16);
    ElectronicFields f = solve_unit_cell(s);
    const double alpha1 = moments(f, s).alpha;
    for (auto& v : f.u) v *= 2.0;  // synthetic input, not a solution
    CHECK(moments(f, s).alpha == doctest::Approx(2.0 * alpha1).epsilon(1e-12));
}

TEST_CASE("grid refinement changes alpha only slightly") {
    const CellMoments m16 = [&] {
        const UnitCellSpec s = nucleus_sc(6.0, 2.0, 16, 1.6);
        return moments(solve_unit_cell(s), s);
    }();
    const CellMoments m24 = [&] {
        const UnitCellSpec s = nucleus_sc(6.0, 2.0, 24, 1.6);
        return moments(solve_unit_cell(s), s);
    }();
    CHECK(m24.alpha == doctest::Approx(m16.alpha).epsilon(1e-4));
}

TEST_CASE("finite-difference stiffness on jellium") {
    UnitCellSpec s = jellium_sc(2.0, 1.0, 8);
    s.F0 = Eigen::Vector3d(1.1, 1.0, 0.9).asDiagonal();
    const double h = 1e-3 * s.F0.norm();

    CHECK_THROWS_AS(stiffness_fd(s, 1.0), ValidationError);

    const ElasticTensors t = stiffness_fd(s, h);

    SUBCASE("Hessian symmetry") {
        double cmax = 0.0;
        for (double v : t.C) cmax = std::max(cmax, std::abs(v));
        for (int p = 0; p < 3; ++p)
            for (int i = 0; i < 3; ++i)
                for (int q = 0; q < 3; ++q)
                    for (int j = 0; j < 3; ++j)
                        CHECK(std::abs(t.stiffness(p, i, q, j) - t.stiffness(q, j, p, i)) <=
                              1e-6 * cmax);
    }

    SUBCASE("B is proportional to cofactor(F0) for jellium") {
        const Eigen::Matrix3d cof = s.F0.determinant() * s.F0.inverse().transpose();
        const double scale = t.B(0, 0) / cof(0, 0);
        for (int p = 0; p < 3; ++p)
            for (int i = 0; i < 3; ++i)
                CHECK(t.B(p, i) == doctest::Approx(scale * cof(p, i))
                                       .scale(std::abs(scale))
                                       .epsilon(1e-5));
    }

    SUBCASE("step-halving consistency") {
        const ElasticTensors t2 = stiffness_fd(s, h / 2.0);
        double cmax = 0.0;
        for (double v : t.C) cmax = std::max(cmax, std::abs(v));
        for (std::size_t i = 0; i < t.C.size(); ++i)
            CHECK(std::abs(t.C[i] - t2.C[i]) <= 1e-4 * cmax);
    }
}

TEST_CASE("symmetry check") {
    const UnitCellSpec s = nucleus_sc(6.0, 2.0, 16, 1.6);

    SymmetryOp identity{Eigen::Matrix3d::Identity(), SymmetryOp::Side::lattice_right};
    Eigen::Matrix3d rz90;
    rz90 << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    SymmetryOp rot{rz90, SymmetryOp::Side::rotate_left};

    const SymmetryReport report = symmetry_check(s, {identity, rot});
    REQUIRE(report.entries.size() == 2);
    CHECK(report.entries[0].dev_W == 0.0);
    CHECK(report.entries[0].dev_alpha == 0.0);
    CHECK(report.passed);
    CHECK(report.max_deviation <= 1e-6);
}
