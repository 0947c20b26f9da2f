#include "qcf/homogenized.hpp"

#include <cmath>

#include "qcf/errors.hpp"

namespace qcf {

namespace {

using cd = std::complex<double>;

// sin(z)/z, series near the origin.
cd sinc(cd z) {
    if (std::abs(z) < 1e-4) {
        const cd z2 = z * z;
        return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
    }
    return std::sin(z) / z;
}

void require_integrable(const HomogenizedModel& m) {
    if (m.regime == Regime::non_integrable)
        throw RegimeError("real characteristic roots: fundamental solution not integrable");
}

void require_radius(double r) {
    if (!(r > 0.0)) throw ValidationError("radius must be positive");
}

// Complex-valued E_u; real part is the physical kernel.
cd green_u_complex(const HomogenizedModel& m, double r) {
    if (m.regime == Regime::case2)
        return m.l0 / (8.0 * M_PI) * std::exp(-r / m.l0);
    const cd kp = m.kappa_plus, km = m.kappa_minus;
    const cd kp2 = kp * kp, km2 = km * km;
    const cd delta = kp2 - km2;
    if (std::abs(delta) < 1e-6 * std::abs(kp2)) {
        // Near-degenerate roots: series-expanded difference quotient avoids
        // the cancellation in [exp(i kp r) - exp(i km r)] / (kp^2 - km^2).
        const cd s = kp + km, d = kp - km;
        return cd(0.0, 1.0) * std::exp(cd(0.0, 1.0) * 0.5 * s * r) * sinc(0.5 * d * r) /
               (4.0 * M_PI * s);
    }
    return (std::exp(cd(0.0, 1.0) * kp * r) - std::exp(cd(0.0, 1.0) * km * r)) /
           (4.0 * M_PI * delta * r);
}

double assert_real(cd value, const char* what) {
    if (std::abs(value.imag()) > 1e-12 * std::max(std::abs(value.real()), 1e-300))
        throw ConsistencyError(std::string(what) + ": imaginary residue exceeds tolerance");
    return value.real();
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::case1: return "case1";
        case Regime::case2: return "case2";
        case Regime::case3: return "case3";
        case Regime::non_integrable: return "non-integrable";
    }
    return "unknown";
}

HomogenizedModel build_model(double lambda, double alpha, double gamma) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    if (alpha == 0.0) throw ValidationError("alpha must be nonzero");

    HomogenizedModel m;
    m.lambda = lambda;
    m.alpha = alpha;
    m.gamma = gamma;
    m.l0 = std::pow(lambda / (4.0 * alpha * alpha), 0.25);

    // 1/l1^2 = gamma/lambda can have either sign; Re(l1) >= 0 branch.
    const cd inv_l1_sq(gamma / lambda, 0.0);
    cd l1 = 1.0 / std::sqrt(inv_l1_sq);
    if (l1.real() < 0.0) l1 = -l1;
    m.l1 = l1;

    const cd disc = std::sqrt(cd(inv_l1_sq.real() * inv_l1_sq.real() - m.inv_l0_4(), 0.0));
    auto upper_half = [](cd z) {
        cd w = std::sqrt(z);
        if (w.imag() < 0.0 || (w.imag() == 0.0 && w.real() < 0.0)) w = -w;
        return w;
    };
    m.kappa_plus = upper_half(-inv_l1_sq + disc);
    m.kappa_minus = upper_half(-inv_l1_sq - disc);

    const double abs_l1 = std::abs(m.l1);
    const double imag_p = m.kappa_plus.imag(), imag_m = m.kappa_minus.imag();
    const double scale_p = std::abs(m.kappa_plus), scale_m = std::abs(m.kappa_minus);
    if (imag_p <= 1e-14 * scale_p || imag_m <= 1e-14 * scale_m) {
        m.regime = Regime::non_integrable;
    } else if (gamma > 0.0 && std::abs(m.l0 - abs_l1) <= 1e-12 * m.l0) {
        m.regime = Regime::case2;
        m.k_plus = m.k_minus = 1.0 / m.l0;
        m.kappa_plus = m.kappa_minus = cd(0.0, 1.0 / m.l0);
    } else if (gamma > 0.0 && m.l0 > abs_l1) {
        m.regime = Regime::case1;
        m.k_plus = m.kappa_plus.imag();
        m.k_minus = m.kappa_minus.imag();
    } else {
        m.regime = Regime::case3;
    }
    return m;
}

double green_u(const HomogenizedModel& model, double r) {
    require_integrable(model);
    require_radius(r);
    return assert_real(green_u_complex(model, r), "green_u");
}

double green_phi(const HomogenizedModel& model, double r) {
    require_integrable(model);
    require_radius(r);
    if (model.regime == Regime::case2) {
        return -model.lambda / (16.0 * M_PI * model.alpha) * (1.0 / model.l0 + 2.0 / r) *
               std::exp(-r / model.l0);
    }
    // E_phi = (lambda/2alpha) [ M E_u - (e^{i kp r} + e^{i km r}) / (8 pi r) ]
    // with M = (kp^2 + km^2)/2; exact rearrangement of the C+- form that
    // stays finite as the roots merge.
    const cd kp = model.kappa_plus, km = model.kappa_minus;
    const cd msum = 0.5 * (kp * kp + km * km);
    const cd eu = green_u_complex(model, r);
    const cd pair = (std::exp(cd(0.0, 1.0) * kp * r) + std::exp(cd(0.0, 1.0) * km * r)) /
                    (8.0 * M_PI * r);
    const cd value = model.lambda / (2.0 * model.alpha) * (msum * eu - pair);
    return assert_real(value, "green_phi");
}

double ode_residual(const HomogenizedModel& model, double r, double h) {
    require_integrable(model);
    if (!(h > 0.0) || !(r > 4.0 * h))
        throw ValidationError("ode_residual requires r > 4h > 0");
    auto w = [&](double x) { return x * green_u(model, x); };
    const double wm2 = w(r - 2.0 * h), wm1 = w(r - h), w0 = w(r), wp1 = w(r + h),
                 wp2 = w(r + 2.0 * h);
    const double d4 = (wm2 - 4.0 * wm1 + 6.0 * w0 - 4.0 * wp1 + wp2) / (h * h * h * h);
    const double d2 = (wm1 - 2.0 * w0 + wp1) / (h * h);
    return std::abs(d4 - 2.0 * model.inv_l1_sq() * d2 + model.inv_l0_4() * w0);
}

DecaySummary decay_summary(const HomogenizedModel& model) {
    require_integrable(model);
    DecaySummary s;
    s.rate = std::min(std::abs(model.kappa_plus.imag()), std::abs(model.kappa_minus.imag()));
    s.decay_length = 1.0 / s.rate;
    s.elastic_power = 2;
    return s;
}

}  // namespace qcf
