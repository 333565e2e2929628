#pragma once

// Two-qubit density matrices: X-state algebra, entropies, measurement-based
// classical correlation, discord and concurrence.
//
// Conventions:
//   * Qubit A is the first tensor factor, B the second; measurements act on B.
//   * Single-qubit basis order is (|up>, |down>), sigma_z |up> = +|up>, so the
//     two-qubit basis is (|uu>, |ud>, |du>, |dd>).
//   * All entropies are in bits, with 0 log 0 = 0.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>

namespace quenchcorr::xstate {

using Complex = std::complex<double>;
using TwoQubitMatrix = Eigen::Matrix4cd;
using QubitMatrix = Eigen::Matrix2cd;

// Eigenvalues in [-kEigenClamp, 0) are treated as zero; anything more negative
// is rejected as a non-positive state.
inline constexpr double kEigenClamp = 1e-12;

// <σxσx>, <σyσy>, <σzσz>, <σz> for a translationally invariant pair.
struct CorrelatorSet {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;

    void validate() const;
};

struct XStateDensityMatrix {
    double a_plus = 0.25;  // <uu|ρ|uu>
    double a_minus = 0.25; // <dd|ρ|dd>
    double a_zero = 0.25;  // <ud|ρ|ud> = <du|ρ|du>
    Complex b1{};          // <uu|ρ|dd>
    Complex b2{};          // <ud|ρ|du>

    TwoQubitMatrix dense() const;
    // Throws DomainError if the trace or positivity conditions fail by more
    // than `tol`.
    void validate(double tol = kEigenClamp) const;
};

// Projective measurement on B along the Bloch direction
// n = (sinθ cosφ, sinθ sinφ, cosθ). Outcome Plus projects onto the +1
// eigenstate of n·σ, i.e. V|0> with V the Bloch-sphere rotation; θ = 0 is the
// σz measurement with Plus = spin up.
struct MeasurementBasis {
    double theta = 0.0;
    double phi = 0.0;

    std::array<double, 3> direction() const;
    // Canonical angles θ ∈ [0, π], φ ∈ [0, 2π) for an arbitrary unit vector.
    static MeasurementBasis from_direction(const std::array<double, 3>& n);
};

enum class Outcome { Plus, Minus };

struct ConditionalState {
    double probability = 0.0;
    // Post-measurement state (I⊗B)ρ(I⊗B)/p; zero matrix when undefined.
    TwoQubitMatrix state = TwoQubitMatrix::Zero();
    bool defined = false;
};

// Which measurements on B enter the classical correlation.
enum class MeasurementScheme {
    Optimal,    // maximum over the full Bloch sphere
    Transverse, // fixed σx measurement (θ = π/2, φ = 0)
};

struct ClassicalCorrelation {
    double value = 0.0; // bits
    MeasurementBasis basis;
};

struct CorrelationReport {
    double mutual_information = 0.0;    // bits
    double classical_correlation = 0.0; // bits
    double discord = 0.0;               // bits
    double concurrence = 0.0;
    MeasurementBasis argmax_basis;
};

// ---- construction ----------------------------------------------------------

// ρ = ¼(I + c1 σxσx + c2 σyσy + c3 σzσz + c4 (Iσz + σzI)).
// Populations or coherences that miss positivity by at most `clamp_tol` are
// clamped; larger violations throw DomainError.
XStateDensityMatrix build_xstate(const CorrelatorSet& c, double clamp_tol = kEigenClamp);

// Ascending eigenvalues of the X state.
std::array<double, 4> xstate_eigenvalues(const XStateDensityMatrix& rho);
// λ0,1 = ¼[(1+c3) ± √(4c4² + (c1−c2)²)], λ2,3 = ¼[(1−c3) ± (c1+c2)], ascending.
std::array<double, 4> xstate_eigenvalues(const CorrelatorSet& c);

// Ascending eigenvalues of a Hermitian 4x4 matrix.
std::array<double, 4> eigenvalues(const TwoQubitMatrix& rho);

// ---- entropies -------------------------------------------------------------

double binary_entropy(double p);
// −Σ λ log2 λ with the positivity clamp applied.
double von_neumann_entropy(std::span<const double> eigenvalues);
double von_neumann_entropy(const TwoQubitMatrix& rho);
// Entropy of a single qubit with <σz> = c4 and no transverse polarization.
double subsystem_entropy(double c4);

QubitMatrix partial_trace_a(const TwoQubitMatrix& rho); // returns ρ_B
QubitMatrix partial_trace_b(const TwoQubitMatrix& rho); // returns ρ_A

// ---- correlations ----------------------------------------------------------

double mutual_information(const XStateDensityMatrix& rho);
double mutual_information(const TwoQubitMatrix& rho);

ConditionalState conditional_state(const TwoQubitMatrix& rho, const MeasurementBasis& basis,
                                   Outcome outcome);

// J(ρ | B) = S(ρ_A) − Σ_k p_k S(ρ_A|k) for one measurement on B.
double measurement_information(const TwoQubitMatrix& rho, const MeasurementBasis& basis);

ClassicalCorrelation classical_correlation(const TwoQubitMatrix& rho,
                                           MeasurementScheme scheme = MeasurementScheme::Optimal);
ClassicalCorrelation classical_correlation(const XStateDensityMatrix& rho,
                                           MeasurementScheme scheme = MeasurementScheme::Optimal);

double discord(const TwoQubitMatrix& rho, MeasurementScheme scheme = MeasurementScheme::Optimal);
double discord(const XStateDensityMatrix& rho,
               MeasurementScheme scheme = MeasurementScheme::Optimal);

// max{0, 2(|b2| − √(a+ a−)), 2(|b1| − a0)}
double concurrence_xstate(const XStateDensityMatrix& rho);
// Wootters spin-flip concurrence of an arbitrary two-qubit state.
double concurrence_wootters(const TwoQubitMatrix& rho);

// I, C, Q and the X-state concurrence in one pass.
CorrelationReport analyze(const XStateDensityMatrix& rho,
                          MeasurementScheme scheme = MeasurementScheme::Optimal);

} // namespace quenchcorr::xstate
