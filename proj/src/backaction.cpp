#include "dosc/backaction.hpp"

#include "dosc/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace dosc {

void MeasurementConfig::validate() const {
    if (!std::isfinite(epsilon) || epsilon <= 0.0) {
        throw InvalidArgument("epsilon must be finite and > 0");
    }
    if (n < 1) {
        throw InvalidArgument("initial level n must be >= 1");
    }
    if (n >= basis.fock_cutoff) {
        throw PhysicsGateError("initial level n outside cutoff; raise cutoff");
    }
    if (!std::isfinite(G) || G < 0.0) {
        throw InvalidArgument("G must be finite and >= 0");
    }
    if (!std::isfinite(f) || !std::isfinite(omega_b)) {
        throw InvalidArgument("f and omega_b must be finite");
    }
    if (apparatus.empty()) {
        throw InvalidArgument("apparatus photon distribution is empty");
    }
    double total = 0.0;
    for (const auto& [nb, w] : apparatus) {
        if (nb < 0 || !(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidArgument("apparatus entries need n_b >= 0 and weight >= 0");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidArgument("apparatus weights must sum to 1 (got " + std::to_string(total) + ")");
    }
    if (G > 0.0 && mean_photon_number() == 0.0) {
        throw InvalidArgument("G > 0 needs a non-empty apparatus mode (<b^dagger b> > 0)");
    }
    if (times.empty()) {
        throw InvalidArgument("time grid is empty");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || (i > 0 && times[i] < times[i - 1])) {
            throw InvalidArgument("times must be finite and ascending");
        }
    }
    if (!(leakage_gate > 0.0) || !(leakage_top_fraction > 0.0 && leakage_top_fraction < 1.0)) {
        throw InvalidArgument("leakage gate must be > 0 and top fraction in (0, 1)");
    }
}

double MeasurementConfig::mean_photon_number() const {
    double m = 0.0;
    for (const auto& [nb, w] : apparatus) {
        m += w * nb;
    }
    return m;
}

double MeasurementConfig::coupling() const {
    const double nb = mean_photon_number();
    return nb > 0.0 ? G / nb : 0.0;
}

void Trajectory::reserve(std::size_t n) {
    for (auto* v : {&t, &expX, &varX, &expSigmaZ, &expPi, &varPi, &leakage}) {
        v->reserve(n);
    }
}

CompositeObservables build_composite_observables(const BasisSpec& basis) {
    const auto [x, p] = build_quadratures(basis, ModelUnits(1.0));
    const Operator sz = build_spin(basis, Axis::z);
    return {x, p * sz, x * sz, p};
}

QuantumState balanced_initial_state(const BasisSpec& basis, int n) {
    if (n < 1) {
        throw InvalidArgument("|Psi_n> needs n >= 1");
    }
    if (n >= basis.fock_cutoff) {
        throw PhysicsGateError("initial level outside cutoff; raise cutoff");
    }
    Vector v = Vector::Zero(basis.total_dim());
    v(basis.index(n, Spin::up)) = std::numbers::sqrt2 / 2.0;
    v(basis.index(n - 1, Spin::down)) = std::numbers::sqrt2 / 2.0;
    return QuantumState::normalized(std::move(v));
}

Operator build_H_sector(double epsilon, double g_times_nb, double f, const BasisSpec& basis,
                        HamiltonianKind kind) {
    const DiracParams p(epsilon, basis);
    const Operator h0 = kind == HamiltonianKind::full_dirac ? build_H_DO(p) : build_H_nr(p);
    if (g_times_nb == 0.0 && f == 0.0) {
        return h0;
    }
    const auto [x, mom] = build_quadratures(basis, p.units());
    const Operator sz = build_spin(basis, Axis::z);
    return (h0 + g_times_nb * x + f * (sz * x)).hermitian_part();
}

namespace {

// Indices into the observable list handed to ExpectationSeries.
enum Slot : std::size_t { kX, kLeak, kX2, kSz, kPi, kPi2, kSlotCount };

struct Sector {
    Operator H;
    double weight;
    std::string label;
};

// Evolves psi0 in every sector and mixes first and second moments with the
// sector weights.
Trajectory mixed_trajectory(const MeasurementConfig& cfg, const std::vector<Sector>& sectors,
                            const QuantumState& psi0, TrajectoryFields fields) {
    const BasisSpec& basis = cfg.basis;
    const CompositeObservables obs = build_composite_observables(basis);
    const int top = top_level_count(basis, cfg.leakage_top_fraction);

    std::vector<Operator> observables{obs.X, build_fock_projector(basis, basis.fock_cutoff - top, top)};
    if (fields == TrajectoryFields::all) {
        observables.push_back(obs.X * obs.X);
        observables.push_back(build_spin(basis, Axis::z));
        observables.push_back(obs.Pi);
        observables.push_back(obs.Pi * obs.Pi);
    }
    const std::size_t n_obs = observables.size();
    const std::size_t n_t = cfg.times.size();

    std::vector<double> mixed(n_obs * n_t, 0.0);
    std::array<double, kSlotCount> buf{};
    for (const Sector& sector : sectors) {
        if (sector.weight == 0.0) {
            continue;
        }
        const SpectralPropagator prop(sector.H);
        const ExpectationSeries series(prop, psi0, observables);
        for (std::size_t i = 0; i < n_t; ++i) {
            series.evaluate(cfg.times[i], std::span<double>(buf.data(), n_obs));
            if (buf[kLeak] >= cfg.leakage_gate) {
                throw PhysicsGateError("truncation leakage " + std::to_string(buf[kLeak]) + " at t=" +
                                       std::to_string(cfg.times[i]) + sector.label + "; raise cutoff");
            }
            for (std::size_t k = 0; k < n_obs; ++k) {
                mixed[i * n_obs + k] += sector.weight * buf[k];
            }
        }
    }

    // <X>/(sqrt 2 x_zpt)
    const double position_scale = 1.0 / (std::numbers::sqrt2 * ModelUnits(1.0).x_zpt());
    Trajectory traj;
    traj.reserve(n_t);
    for (std::size_t i = 0; i < n_t; ++i) {
        const double* m = &mixed[i * n_obs];
        traj.t.push_back(cfg.times[i]);
        traj.expX.push_back(m[kX] * position_scale);
        traj.leakage.push_back(std::max(0.0, m[kLeak]));
        if (fields == TrajectoryFields::all) {
            traj.varX.push_back(std::max(0.0, m[kX2] - m[kX] * m[kX]));
            traj.expSigmaZ.push_back(m[kSz]);
            traj.expPi.push_back(m[kPi]);
            traj.varPi.push_back(std::max(0.0, m[kPi2] - m[kPi] * m[kPi]));
        }
    }
    return traj;
}

}  // namespace

Trajectory run_backaction(const MeasurementConfig& cfg, HamiltonianKind kind, TrajectoryFields fields) {
    cfg.validate();
    const double g = cfg.coupling();
    std::vector<Sector> sectors;
    for (const auto& [nb, w] : cfg.apparatus) {
        if (w > 0.0) {
            sectors.push_back({build_H_sector(cfg.epsilon, g * nb, cfg.f, cfg.basis, kind), w,
                               " in photon sector n_b=" + std::to_string(nb)});
        }
    }
    return mixed_trajectory(cfg, sectors, balanced_initial_state(cfg.basis, cfg.n), fields);
}

Trajectory evolve_state(const Operator& H, const QuantumState& psi0, const BasisSpec& basis,
                        const std::vector<double>& times, double leakage_gate, double leakage_top_fraction) {
    MeasurementConfig cfg;
    cfg.basis = basis;
    cfg.times = times;
    cfg.leakage_gate = leakage_gate;
    cfg.leakage_top_fraction = leakage_top_fraction;
    cfg.epsilon = 1.0;
    cfg.n = 1;
    cfg.validate();
    if (psi0.dim() != basis.total_dim() || H.dim() != basis.total_dim()) {
        throw InvalidArgument("state, Hamiltonian and basis dimensions differ");
    }
    return mixed_trajectory(cfg, {{H, 1.0, ""}}, psi0, TrajectoryFields::all);
}

std::vector<double> uniform_time_grid(double t_start, double t_end, std::size_t points) {
    if (points == 0 || !(t_end >= t_start)) {
        throw InvalidArgument("uniform grid needs points >= 1 and t_end >= t_start");
    }
    std::vector<double> t(points);
    for (std::size_t i = 0; i < points; ++i) {
        t[i] = points == 1 ? t_start
                           : t_start + (t_end - t_start) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return t;
}

std::vector<double> zitterbewegung_time_grid(double epsilon, double t_end, int points_per_period) {
    if (!(epsilon > 0.0) || points_per_period < 1 || !(t_end > 0.0)) {
        throw InvalidArgument("invalid Zitterbewegung grid request");
    }
    const double fast_period = std::numbers::pi * epsilon;
    const auto intervals = static_cast<std::size_t>(std::ceil(t_end / fast_period * points_per_period));
    return uniform_time_grid(0.0, t_end, intervals + 1);
}

double analytic_X_nr(double t, double f) {
    const double s = std::sin(0.5 * ModelUnits::omega * t);
    const double x = -2.0 * f / (ModelUnits::mass * ModelUnits::omega * ModelUnits::omega) * s * s;
    return x / (std::numbers::sqrt2 * ModelUnits(1.0).x_zpt());
}

double analytic_DeltaX_nr(double t, int n, double G) {
    if (n < 1) {
        throw InvalidArgument("analytic_DeltaX_nr needs n >= 1");
    }
    const double s = std::sin(0.5 * ModelUnits::omega * t);
    return ModelUnits(1.0).x_zpt() * std::sqrt(2.0 * n + 8.0 * G * G * s * s * s * s);
}

double smearing_delta(int n, double epsilon, double G) { return std::sqrt(2.0 * n * epsilon) * G; }

double analytic_X_corrected(double t, double f, int n, double epsilon, double G) {
    const double s = std::sin(0.5 * ModelUnits::omega * t);
    const double zb = 2.0 * ModelUnits(epsilon).rest_energy() / ModelUnits::hbar;
    const double force = f + smearing_delta(n, epsilon, G) * std::sin(zb * t);
    const double x = -2.0 * force / (ModelUnits::mass * ModelUnits::omega * ModelUnits::omega) * s * s;
    return x / (std::numbers::sqrt2 * ModelUnits(1.0).x_zpt());
}

double analytic_sigma_z(double t, int n, double epsilon) {
    if (n < 1) {
        throw InvalidArgument("analytic_sigma_z needs n >= 1");
    }
    const double amp = std::sqrt(2.0 * n * epsilon / (1.0 + 2.0 * n * epsilon));
    return amp * std::sin(2.0 * analytic_energy(n, Branch::positive, epsilon) * t / ModelUnits::hbar);
}

QmfsPoint qmfs_reference(double t, double f, double /*G*/) {
    return {analytic_X_nr(t, f), std::numbers::sqrt2 * ModelUnits(1.0).x_zpt()};
}

double min_uncertainty_margin(const Trajectory& traj) {
    if (traj.varX.size() != traj.size() || traj.varPi.size() != traj.size()) {
        throw InvalidArgument("trajectory lacks variance columns");
    }
    // varX is stored in model units; Delta X Delta Pi >= (hbar/2)|<sigma_z>|.
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double lhs = std::sqrt(traj.varX[i] * traj.varPi[i]);
        margin = std::min(margin, lhs - 0.5 * ModelUnits::hbar * std::abs(traj.expSigmaZ[i]));
    }
    return margin;
}

}  // namespace dosc
