#include "quenchcorr/central.hpp"

#include "quenchcorr/errors.hpp"
#include "quenchcorr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace quenchcorr::central {

using std::numbers::pi;

void CentralConfig::validate() const {
    if (n_spins < 2 || n_spins % 2 != 0)
        throw DomainError("central: N must be even and >= 2");
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw DomainError("central: delta must be >= 0");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw DomainError("central: tau must be > 0");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw DomainError("central: gamma must lie in (0, 1]");
    if (!(a >= 0.0 && a <= 1.0))
        throw DomainError("central: Werner weight a must lie in [0, 1]");
    // The chain must start deep in the paramagnet: well above the critical
    // point compared with both the branch splitting and the Kibble-Zurek scale.
    const double margin = 5.0 * std::max(delta, 1.0 / std::sqrt(tau));
    if (!(h_start - 1.0 >= margin) || !std::isfinite(h_start)) {
        std::ostringstream msg;
        msg << "central: h_start must satisfy h_start - 1 >= " << margin;
        throw DomainError(msg.str());
    }
    if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        throw DomainError("central: observation times must be non-decreasing");
    if (!t_grid.empty() && t_grid.front() < start_time())
        throw DomainError("central: observation times must not precede the start time");
}

IntegratorStats& IntegratorStats::operator+=(const IntegratorStats& o) {
    accepted += o.accepted;
    rejected += o.rejected;
    renormalizations += o.renormalizations;
    max_norm_drift = std::max(max_norm_drift, o.max_norm_drift);
    return *this;
}

std::vector<double> mode_momenta(int n_spins) {
    if (n_spins < 2 || n_spins % 2 != 0)
        throw DomainError("mode_momenta: N must be even and >= 2");
    std::vector<double> k(static_cast<std::size_t>(n_spins / 2));
    for (int m = 1; m <= n_spins / 2; ++m)
        k[static_cast<std::size_t>(m - 1)] = (2.0 * m - 1.0) * pi / n_spins;
    return k;
}

namespace {

double branch_sign(Branch b) { return b == Branch::Plus ? 1.0 : -1.0; }

// Diagonal term h ± δ + cos k of the branch Hamiltonian (without the factor 2).
double diagonal(double k, double t, Branch branch, const CentralConfig& c) {
    return c.field(t) + branch_sign(branch) * c.delta + std::cos(k);
}

} // namespace

Eigen::Matrix2cd branch_hamiltonian(double k, double t, Branch branch, const CentralConfig& config) {
    const double eps = diagonal(k, t, branch, config);
    const double off = config.gamma * std::sin(k);
    Eigen::Matrix2cd h;
    h << 2.0 * eps, 2.0 * off, 2.0 * off, -2.0 * eps;
    return h;
}

namespace {

// Lower eigenvector of [[eps, off], [off, -eps]] with u >= 0.
ModeState ground_state(double eps, double off) {
    const double theta = std::atan2(off, eps);
    // (-sin θ/2, cos θ/2) has eigenvalue -√(eps² + off²); flip the sign for u >= 0.
    ModeState s{Complex(std::sin(0.5 * theta), 0.0), Complex(-std::cos(0.5 * theta), 0.0)};
    if (s.u.real() < 0.0 || (s.u.real() == 0.0 && s.v.real() < 0.0)) {
        s.u = -s.u;
        s.v = -s.v;
    }
    return s;
}

// Excited eigenvector orthogonal to ground_state.
ModeState excited_state(double eps, double off) {
    const ModeState g = ground_state(eps, off);
    return {-std::conj(g.v), std::conj(g.u)};
}

} // namespace

ModeState initial_mode_state(double k, Branch branch, const CentralConfig& config) {
    const double t0 = config.start_time();
    return ground_state(diagonal(k, t0, branch, config), config.gamma * std::sin(k));
}

// ---- Dormand-Prince 5(4) ---------------------------------------------------

namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Fifth- minus fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
} // namespace dp

ModePropagator::ModePropagator(double k, Branch branch, const CentralConfig& config,
                               ModeState initial, double t0, IntegratorOptions options)
    : diagonal_offset_(branch_sign(branch) * config.delta + std::cos(k)),
      off_diagonal_(config.gamma * std::sin(k)),
      tau_(config.tau),
      options_(options),
      state_(initial),
      t_(t0) {
    const double scale = 2.0 * std::hypot(config.field(t0) + diagonal_offset_, off_diagonal_);
    step_ = 0.01 / (1.0 + scale);
}

void ModePropagator::derivative(double t, const Complex* y, Complex* dy) const {
    const double eps = 2.0 * (1.0 - t / tau_ + diagonal_offset_);
    const double off = 2.0 * off_diagonal_;
    const Complex minus_i(0.0, -1.0);
    dy[0] = minus_i * (eps * y[0] + off * y[1]);
    dy[1] = minus_i * (off * y[0] - eps * y[1]);
}

void ModePropagator::advance_to(double t_target) {
    if (t_target < t_)
        throw DomainError("ModePropagator: cannot integrate backwards");
    using namespace dp;
    Complex y[2] = {state_.u, state_.v};
    Complex k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], tmp[2], y5[2];
    if (!have_k1_) {
        derivative(t_, y, k1_);
        have_k1_ = true;
    }

    while (t_ < t_target) {
        const double remaining = t_target - t_;
        const bool clamped = step_ >= remaining;
        const double h = clamped ? remaining : step_;
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_))) {
            std::ostringstream msg;
            msg << "step size underflow at t=" << t_ << " (h=" << h << ", |u|^2+|v|^2="
                << std::norm(y[0]) + std::norm(y[1]) << ")";
            throw IntegrationError(msg.str(), t_, h);
        }

        for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * a21 * k1_[i];
        derivative(t_ + c2 * h, tmp, k2);
        for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a31 * k1_[i] + a32 * k2[i]);
        derivative(t_ + c3 * h, tmp, k3);
        for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
        derivative(t_ + c4 * h, tmp, k4);
        for (int i = 0; i < 2; ++i)
            tmp[i] = y[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        derivative(t_ + c5 * h, tmp, k5);
        for (int i = 0; i < 2; ++i)
            tmp[i] = y[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i]);
        derivative(t_ + h, tmp, k6);
        for (int i = 0; i < 2; ++i)
            y5[i] = y[i] + h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const double t_new = clamped ? t_target : t_ + h;
        derivative(t_new, y5, k7);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const Complex e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = options_.abs_tol +
                              options_.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(e) / sc);
        }

        if (err <= 1.0) {
            t_ = t_new;
            y[0] = y5[0];
            y[1] = y5[1];
            k1_[0] = k7[0];
            k1_[1] = k7[1];
            ++stats_.accepted;

            const double norm2 = std::norm(y[0]) + std::norm(y[1]);
            const double drift = std::abs(norm2 - 1.0);
            stats_.max_norm_drift = std::max(stats_.max_norm_drift, drift);
            if (drift > options_.renormalize_above) {
                // The right-hand side is linear in y, so k1 rescales with it.
                const double scale = 1.0 / std::sqrt(norm2);
                for (int i = 0; i < 2; ++i) {
                    y[i] *= scale;
                    k1_[i] *= scale;
                }
                ++stats_.renormalizations;
            }

            const double factor =
                err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (!clamped)
                step_ = h * factor;
        } else {
            ++stats_.rejected;
            step_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    state_ = {y[0], y[1]};
}

ModeState evolve_mode(double k, Branch branch, const CentralConfig& config, double t_from,
                      double t_to, ModeState state, IntegratorStats* stats) {
    ModePropagator prop(k, branch, config, state, t_from);
    prop.advance_to(t_to);
    if (stats)
        *stats += prop.stats();
    return prop.state();
}

double excitation(const ModeState& state, double k, double t, Branch branch,
                  const CentralConfig& config) {
    const ModeState e = excited_state(diagonal(k, t, branch, config), config.gamma * std::sin(k));
    return std::norm(std::conj(e.u) * state.u + std::conj(e.v) * state.v);
}

double mode_fidelity(const ModeState& plus, const ModeState& minus) {
    return std::norm(std::conj(plus.u) * minus.u + std::conj(plus.v) * minus.v);
}

// ---- decoherence -----------------------------------------------------------

DecoherenceSeries decoherence_series(const CentralConfig& config, unsigned workers,
                                     IntegratorOptions options) {
    config.validate();
    const auto momenta = mode_momenta(config.n_spins);
    const std::size_t n_modes = momenta.size();
    const std::size_t n_times = config.t_grid.size();
    const double t0 = config.start_time();

    std::vector<std::vector<double>> log_f(n_modes, std::vector<double>(n_times, 0.0));
    std::vector<std::size_t> reached(n_modes, n_times);
    std::vector<IntegratorStats> stats(n_modes);
    std::vector<std::string> failures(n_modes);

    parallel_for(n_modes, workers, [&](std::size_t m) {
        const double k = momenta[m];
        ModePropagator plus(k, Branch::Plus, config, initial_mode_state(k, Branch::Plus, config),
                            t0, options);
        ModePropagator minus(k, Branch::Minus, config,
                             initial_mode_state(k, Branch::Minus, config), t0, options);
        for (std::size_t i = 0; i < n_times; ++i) {
            try {
                plus.advance_to(config.t_grid[i]);
                minus.advance_to(config.t_grid[i]);
            } catch (const IntegrationError& e) {
                reached[m] = i;
                std::ostringstream msg;
                msg << "mode k=" << k << ": " << e.what();
                failures[m] = msg.str();
                break;
            }
            const double f = std::clamp(mode_fidelity(plus.state(), minus.state()), 0.0, 1.0);
            log_f[m][i] = std::log(f);
        }
        stats[m] = plus.stats();
        stats[m] += minus.stats();
    });

    DecoherenceSeries out;
    std::size_t complete_times = n_times;
    for (std::size_t m = 0; m < n_modes; ++m) {
        out.stats += stats[m];
        if (reached[m] < complete_times)
            complete_times = reached[m];
        if (!failures[m].empty()) {
            out.complete = false;
            if (!out.diagnostics.empty())
                out.diagnostics += "; ";
            out.diagnostics += failures[m];
        }
    }
    out.d.reserve(complete_times);
    for (std::size_t i = 0; i < complete_times; ++i) {
        double sum = 0.0;
        for (std::size_t m = 0; m < n_modes; ++m)
            sum += log_f[m][i];
        out.d.push_back(std::clamp(std::exp(sum), 0.0, 1.0));
    }
    return out;
}

double decoherence_factor(const CentralConfig& config, double t, unsigned workers) {
    CentralConfig single = config;
    single.t_grid = {t};
    const auto series = decoherence_series(single, workers);
    if (!series.complete)
        throw NumericalError("decoherence_factor: " + series.diagnostics);
    return series.d.front();
}

double approx_Fk(double dk, double t, double delta, double tau) {
    const double s = std::sin(4.0 * t * delta);
    const double x = std::exp(-2.0 * pi * tau * dk * dk);
    return std::clamp(1.0 - 4.0 * s * s * (x - x * x), 0.0, 1.0);
}

double weak_coupling_D(double t, const CentralConfig& config) {
    const double exponent = 8.0 * (std::numbers::sqrt2 - 1.0) * config.n_spins * config.delta *
                            config.delta * t * t / (pi * std::sqrt(config.tau));
    return std::exp(-exponent);
}

namespace {

void check_werner_args(double a, double D) {
    if (!(a >= 0.0 && a <= 1.0))
        throw DomainError("Werner weight a must lie in [0, 1]");
    if (!(D >= 0.0 && D <= 1.0))
        throw DomainError("decoherence factor D must lie in [0, 1]");
}

} // namespace

xstate::XStateDensityMatrix qubit_xstate(double a, double D) {
    check_werner_args(a, D);
    xstate::XStateDensityMatrix rho;
    rho.a_plus = 0.25 * (1.0 + a);
    rho.a_minus = 0.25 * (1.0 + a);
    rho.a_zero = 0.25 * (1.0 - a);
    rho.b1 = 0.5 * a * std::sqrt(D);
    rho.b2 = 0.0;
    return rho;
}

xstate::TwoQubitMatrix qubit_state(double a, double D) {
    return qubit_xstate(a, D).dense();
}

double concurrence_werner(double a, double D) {
    check_werner_args(a, D);
    return std::max(a * (std::sqrt(D) + 0.5) - 0.5, 0.0);
}

DecoherenceTrace trace_run(const CentralConfig& config, unsigned workers) {
    const auto series = decoherence_series(config, workers);
    DecoherenceTrace trace;
    trace.stats = series.stats;
    trace.complete = series.complete;
    trace.diagnostics = series.diagnostics;
    trace.rows.resize(series.d.size());
    parallel_for(series.d.size(), workers, [&](std::size_t i) {
        const double t = config.t_grid[i];
        const double d = series.d[i];
        TraceRow& row = trace.rows[i];
        row.t = t;
        row.h = config.field(t);
        row.decoherence = d;
        row.discord = xstate::discord(qubit_state(config.a, d));
        row.concurrence = concurrence_werner(config.a, d);
    });
    return trace;
}

} // namespace quenchcorr::central
