#pragma once

// Two central qubits in a Werner state, globally coupled to a transverse XY
// chain whose field is swept as h(t) = 1 - t/tau. The coupling splits the
// chain into two branches with fields h(t) ± delta; the qubit coherence decays
// with the squared overlap D(t) of the two branch states.

#include "quenchcorr/xstate.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace quenchcorr::central {

using Complex = std::complex<double>;

enum class Branch { Plus, Minus };

struct CentralConfig {
    int n_spins = 500;
    double delta = 1e-4;
    double tau = 250.0;
    double gamma = 1.0;
    double a = 0.9;        // Werner weight
    double h_start = 10.0; // field at which the chain starts in its ground state
    std::vector<double> t_grid; // observation times, non-decreasing

    // h(t) = 1 - t/tau, so the h = 1 critical point is crossed at t = 0.
    double field(double t) const { return 1.0 - t / tau; }
    // Time at which h(t) = h_start.
    double start_time() const { return -tau * (h_start - 1.0); }

    void validate() const;
};

struct ModeState {
    Complex u{}; // amplitude of |0>
    Complex v{}; // amplitude of |k,-k>

    double norm_squared() const { return std::norm(u) + std::norm(v); }
};

struct IntegratorOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // Renormalize once | |u|²+|v|² - 1 | exceeds this.
    double renormalize_above = 1e-10;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long renormalizations = 0;
    double max_norm_drift = 0.0; // largest drift seen before renormalizing

    IntegratorStats& operator+=(const IntegratorStats& o);
};

// k_m = (2m - 1) pi / N, m = 1..N/2.
std::vector<double> mode_momenta(int n_spins);

// 2 [[h ± δ + cos k, γ sin k], [γ sin k, -(h ± δ + cos k)]] at time t.
Eigen::Matrix2cd branch_hamiltonian(double k, double t, Branch branch, const CentralConfig& config);

// Lower eigenvector of the branch Hamiltonian at h = h_start, phase-fixed so
// that u is real and non-negative (v real and positive when u = 0).
ModeState initial_mode_state(double k, Branch branch, const CentralConfig& config);

// Dormand-Prince 5(4) integration of i d/dt (u, v) = H(t) (u, v) for one mode
// and branch. The propagator keeps its step size between calls, so a mode
// can be advanced incrementally along an observation grid.
class ModePropagator {
public:
    ModePropagator(double k, Branch branch, const CentralConfig& config, ModeState initial,
                   double t0, IntegratorOptions options = {});

    // Advance to t >= time(). Throws IntegrationError on step-size underflow.
    void advance_to(double t);

    const ModeState& state() const noexcept { return state_; }
    double time() const noexcept { return t_; }
    const IntegratorStats& stats() const noexcept { return stats_; }

private:
    void derivative(double t, const Complex* y, Complex* dy) const;

    double diagonal_offset_; // ±δ + cos k
    double off_diagonal_;    // γ sin k
    double tau_;
    IntegratorOptions options_;
    ModeState state_;
    double t_;
    double step_;
    Complex k1_[2]{};
    bool have_k1_ = false;
    IntegratorStats stats_;
};

ModeState evolve_mode(double k, Branch branch, const CentralConfig& config, double t_from,
                      double t_to, ModeState state, IntegratorStats* stats = nullptr);

// Probability of the instantaneous excited level of the branch Hamiltonian.
double excitation(const ModeState& state, double k, double t, Branch branch,
                  const CentralConfig& config);

// F_k = |<ψ_k^+|ψ_k^->|².
double mode_fidelity(const ModeState& plus, const ModeState& minus);

// D(t) = Π_k F_k(t) over mode_momenta, evolving every mode from start_time().
double decoherence_factor(const CentralConfig& config, double t, unsigned workers = 1);

struct DecoherenceSeries {
    std::vector<double> d;         // D at each grid time that was reached
    IntegratorStats stats;
    bool complete = true;
    std::string diagnostics;
};

// D at every time in config.t_grid, with one incremental propagator per
// (mode, branch). On integration failure the series stops at the last time
// reached by every mode.
DecoherenceSeries decoherence_series(const CentralConfig& config, unsigned workers = 1,
                                     IntegratorOptions options = {});

// Approximate F_k after the crossing; `dk` is the momentum measured from the
// critical mode and t the time since the crossing.
double approx_Fk(double dk, double t, double delta, double tau);

// exp(-8(√2 - 1) N δ² t² / (π √τ)), with the adiabatic fidelity factor set to 1.
double weak_coupling_D(double t, const CentralConfig& config);

// Werner state after dephasing by D, in the (|uu>, |ud>, |du>, |dd>) basis.
xstate::TwoQubitMatrix qubit_state(double a, double D);
xstate::XStateDensityMatrix qubit_xstate(double a, double D);

// max[a(√D + ½) − ½, 0]
double concurrence_werner(double a, double D);

struct TraceRow {
    double t = 0.0;
    double h = 0.0;
    double decoherence = 0.0;
    double discord = 0.0;
    double concurrence = 0.0;
};

struct DecoherenceTrace {
    std::vector<TraceRow> rows;
    IntegratorStats stats;
    bool complete = true;
    std::string diagnostics;
};

DecoherenceTrace trace_run(const CentralConfig& config, unsigned workers = 1);

} // namespace quenchcorr::central
