#pragma once

// Landau-Zener excitation probabilities for linear quenches of the transverse
// XY / three-spin Ising chains, and the beta_n Fourier integrals built from
// them.

#include <string>
#include <vector>

namespace quenchcorr::kernels {

inline constexpr double kDefaultTolerance = 1e-10;

enum class QuenchKind { Ising, Multicritical, ThreeSpin };

std::string to_string(QuenchKind kind);
QuenchKind parse_quench_kind(const std::string& name); // "ising", "multicritical", "three-spin"

struct QuenchProtocol {
    QuenchKind kind = QuenchKind::Ising;
    double gamma = 1.0; // anisotropy, Ising quench only
    double j3 = 0.0;    // three-spin coupling, ThreeSpin quench only
    double tau = 1.0;   // inverse quench rate

    static QuenchProtocol ising(double gamma, double tau);
    static QuenchProtocol multicritical(double tau);
    static QuenchProtocol three_spin(double j3, double tau);

    // Throws DomainError on a violated invariant. tau == 0 is accepted as the
    // sudden limit.
    void validate() const;
};

// p_k for the given protocol; k must lie in [0, pi].
double excitation_probability(const QuenchProtocol& protocol, double k);

// Points in [0, pi] where the Landau-Zener exponent vanishes (p_k = 1), plus a
// geometric ladder around each of them when tau is large enough that p_k is
// sharply peaked. Sorted, deduplicated, always starts at 0 and ends at pi.
std::vector<double> integration_breakpoints(const QuenchProtocol& protocol);

// (1/pi) * ∫_0^pi p_k cos(n k) dk. Odd n are computed, not assumed to vanish.
double beta_n(const QuenchProtocol& protocol, int n, double tol = kDefaultTolerance);

// Density of excited modes, equal to beta_0.
double defect_density(const QuenchProtocol& protocol, double tol = kDefaultTolerance);

// beta_n for the even n in [0, n_max] of one protocol.
class BetaSet {
public:
    BetaSet() = default;
    BetaSet(int n_max, std::vector<double> values);

    static BetaSet compute(const QuenchProtocol& protocol, int n_max,
                           double tol = kDefaultTolerance);

    int n_max() const noexcept { return n_max_; }
    double operator[](int n) const;
    const std::vector<double>& values() const noexcept { return values_; }

private:
    int n_max_ = -1;
    std::vector<double> values_;
};

} // namespace quenchcorr::kernels
