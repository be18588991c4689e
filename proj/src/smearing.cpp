#include "dosc/backaction.hpp"

#include "dosc/errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace dosc {

namespace {

constexpr int kColumns = 7;
using Normal = Eigen::Matrix<double, kColumns, kColumns>;
using Coeffs = Eigen::Matrix<double, kColumns, 1>;

// Template columns: slow harmonic part {1, cos t, sin t}, the fast line under
// the sin^2(t/2) envelope, and the fast line under a sin t envelope. The last
// pair absorbs the relative-momentum part of the Zitterbewegung so that the
// sin^2 pair carries only the backaction drive.
struct TemplateFit {
    Coeffs c = Coeffs::Zero();
    double explained = 0.0;
};

TemplateFit fit_template(const std::vector<double>& t, const std::vector<double>& x, double omega) {
    Normal ata = Normal::Zero();
    Coeffs aty = Coeffs::Zero();
    Coeffs row;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ct = std::cos(t[i]);
        const double st = std::sin(t[i]);
        const double s2 = 0.5 * (1.0 - ct);
        const double sw = std::sin(omega * t[i]);
        const double cw = std::cos(omega * t[i]);
        row << 1.0, ct, st, s2 * sw, s2 * cw, st * sw, st * cw;
        ata.selfadjointView<Eigen::Lower>().rankUpdate(row);
        aty += x[i] * row;
    }
    ata = ata.selfadjointView<Eigen::Lower>();
    TemplateFit out;
    out.c = ata.ldlt().solve(aty);
    out.explained = out.c.dot(aty);
    return out;
}

double template_value(const Coeffs& c, double t, double omega) {
    const double ct = std::cos(t);
    const double st = std::sin(t);
    const double s2 = 0.5 * (1.0 - ct);
    const double sw = std::sin(omega * t);
    const double cw = std::cos(omega * t);
    return c(0) + c(1) * ct + c(2) * st + s2 * (c(3) * sw + c(4) * cw) + st * (c(5) * sw + c(6) * cw);
}

// Strongest line at angular frequency >= omega_min in x minus its slow
// harmonic part, from a Hann-windowed zero-padded FFT.
double fft_peak(const std::vector<double>& t, const std::vector<double>& x, double dt, double omega_min) {
    const std::size_t n = t.size();
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d r(1.0, std::cos(t[i]), std::sin(t[i]));
        ata += r * r.transpose();
        aty += x[i] * r;
    }
    const Eigen::Vector3d slow = ata.ldlt().solve(aty);

    std::size_t m = 1;
    while (m < n) {
        m <<= 1;
    }
    std::vector<double> buf(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = n > 1 ? 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1))) : 1.0;
        buf[i] = hann * (x[i] - slow(0) - slow(1) * std::cos(t[i]) - slow(2) * std::sin(t[i]));
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, buf);

    const double bin = 2.0 * std::numbers::pi / (static_cast<double>(m) * dt);
    const auto k_min = static_cast<std::size_t>(std::ceil(omega_min / bin));
    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t k = std::max<std::size_t>(k_min, 1); k <= m / 2; ++k) {
        const double power = std::norm(spec[k]);
        if (power > best_power) {
            best_power = power;
            best = k;
        }
    }
    return static_cast<double>(best) * bin;
}

}  // namespace

SmearingEstimate estimate_smearing(const Trajectory& traj, const MeasurementConfig& cfg,
                                   const SmearingFitOptions& options) {
    if (cfg.n < 1 || !(cfg.epsilon > 0.0)) {
        throw InvalidArgument("smearing estimate needs n >= 1 and epsilon > 0");
    }
    const std::size_t n = traj.size();
    if (n < 2 * kColumns || traj.expX.size() != n) {
        throw InvalidArgument("trajectory too short for the smearing fit");
    }
    const double dt = (traj.t.back() - traj.t.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(traj.t[i] - traj.t[i - 1] - dt) > 1e-6 * dt) {
            throw InvalidArgument("smearing fit needs a uniform time grid");
        }
    }
    if (!(dt < std::numbers::pi * cfg.epsilon / 4.0)) {
        throw PhysicsGateError("trajectory undersampled: spacing " + std::to_string(dt) +
                               " must be below pi*eps/4 = " + std::to_string(std::numbers::pi * cfg.epsilon / 4.0));
    }

    SmearingEstimate est;
    est.delta_analytic = smearing_delta(cfg.n, cfg.epsilon, cfg.G);
    est.zb_frequency_exact = 2.0 * analytic_energy(cfg.n, Branch::positive, cfg.epsilon);

    const std::vector<double>& x = traj.expX;
    double norm2 = 0.0;
    for (double v : x) {
        norm2 += v * v;
    }
    if (norm2 == 0.0) {
        est.zb_frequency_fft = est.zb_frequency_fitted = est.zb_frequency_exact;
        return est;
    }

    est.zb_frequency_fft = fft_peak(traj.t, x, dt, 1.0 / cfg.epsilon);
    const double half_width =
        options.search_bins * 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    double lo = std::max(est.zb_frequency_fft - half_width, 0.5 / cfg.epsilon);
    double hi = est.zb_frequency_fft + half_width;

    auto explained = [&](double w) { return fit_template(traj.t, x, w).explained; };

    constexpr int scan = 24;
    double best_w = lo;
    double best_e = -1.0;
    for (int k = 0; k <= scan; ++k) {
        const double w = lo + (hi - lo) * k / scan;
        const double e = explained(w);
        if (e > best_e) {
            best_e = e;
            best_w = w;
        }
    }
    const double step = (hi - lo) / scan;
    lo = best_w - step;
    hi = best_w + step;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = explained(a);
    double fb = explained(b);
    while (hi - lo > 1e-10 * best_w) {
        if (fa > fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = explained(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = explained(b);
        }
    }
    const double w = 0.5 * (lo + hi);
    const TemplateFit fit = fit_template(traj.t, x, w);

    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - template_value(fit.c, traj.t[i], w);
        r2 += d * d;
    }
    est.zb_frequency_fitted = w;
    // X = -2 [f + Delta sin(W t)] sin^2(t/2) in dimensionless units, so the
    // enveloped fast amplitude is 2 Delta.
    est.delta_fitted = 0.5 * std::hypot(fit.c(3), fit.c(4));
    est.residual = std::sqrt(r2 / norm2);
    est.regime_breakdown = est.residual > options.residual_threshold;
    return est;
}

}  // namespace dosc
