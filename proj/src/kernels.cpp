#include "quenchcorr/kernels.hpp"

#include "quenchcorr/errors.hpp"
#include "quenchcorr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace quenchcorr::kernels {

using std::numbers::pi;

std::string to_string(QuenchKind kind) {
    switch (kind) {
    case QuenchKind::Ising: return "ising";
    case QuenchKind::Multicritical: return "multicritical";
    case QuenchKind::ThreeSpin: return "three-spin";
    }
    return "unknown";
}

QuenchKind parse_quench_kind(const std::string& name) {
    if (name == "ising") return QuenchKind::Ising;
    if (name == "multicritical") return QuenchKind::Multicritical;
    if (name == "three-spin") return QuenchKind::ThreeSpin;
    throw DomainError("unknown quench protocol '" + name + "'");
}

QuenchProtocol QuenchProtocol::ising(double gamma, double tau) {
    QuenchProtocol p{QuenchKind::Ising, gamma, 0.0, tau};
    p.validate();
    return p;
}

QuenchProtocol QuenchProtocol::multicritical(double tau) {
    QuenchProtocol p{QuenchKind::Multicritical, 1.0, 0.0, tau};
    p.validate();
    return p;
}

QuenchProtocol QuenchProtocol::three_spin(double j3, double tau) {
    QuenchProtocol p{QuenchKind::ThreeSpin, 1.0, j3, tau};
    p.validate();
    return p;
}

void QuenchProtocol::validate() const {
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw DomainError("quench: tau must be finite and non-negative");
    if (kind == QuenchKind::Ising && !(gamma > 0.0 && gamma <= 1.0))
        throw DomainError("quench: Ising protocol requires 0 < gamma <= 1");
    if (kind == QuenchKind::ThreeSpin && !(j3 >= 0.0 && std::isfinite(j3)))
        throw DomainError("quench: three-spin protocol requires j3 >= 0");
}

namespace {

// The Landau-Zener exponent is -pi * tau * g(k)^2 for a protocol-specific g.
double gap_factor(const QuenchProtocol& p, double k) {
    switch (p.kind) {
    case QuenchKind::Ising: return p.gamma * std::sin(k);
    case QuenchKind::Multicritical: return (1.0 + std::cos(k)) * std::sin(k);
    case QuenchKind::ThreeSpin: return std::sin(k) - p.j3 * std::sin(2.0 * k);
    }
    return 0.0;
}

double probability_unchecked(const QuenchProtocol& p, double k) {
    if (p.tau == 0.0)
        return 1.0;
    const double g = gap_factor(p, k);
    return std::exp(-pi * p.tau * g * g);
}

} // namespace

double excitation_probability(const QuenchProtocol& protocol, double k) {
    protocol.validate();
    if (!(k >= 0.0 && k <= pi))
        throw DomainError("excitation_probability: k outside [0, pi]");
    return probability_unchecked(protocol, k);
}

std::vector<double> integration_breakpoints(const QuenchProtocol& protocol) {
    protocol.validate();
    std::vector<double> zeros{0.0, pi};
    // sin k - j3 sin 2k = sin k (1 - 2 j3 cos k) also vanishes at cos k = 1/(2 j3).
    if (protocol.kind == QuenchKind::ThreeSpin && protocol.j3 > 0.5)
        zeros.push_back(std::acos(1.0 / (2.0 * protocol.j3)));

    std::vector<double> points = zeros;
    // Peak half-width scale of exp(-pi tau k^2); the ladder doubles outward from
    // a quarter of it so that a 15-point rule always sees the peak.
    const double width = 0.25 / std::sqrt(1.0 + pi * protocol.tau);
    if (width < 0.05) {
        for (double z : zeros) {
            for (double w = width; w < pi; w *= 2.0) {
                if (z - w > 0.0) points.push_back(z - w);
                if (z + w < pi) points.push_back(z + w);
            }
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                 points.end());
    return points;
}

double beta_n(const QuenchProtocol& protocol, int n, double tol) {
    protocol.validate();
    if (n < 0)
        throw DomainError("beta_n: n must be non-negative");
    if (!(tol > 0.0))
        throw DomainError("beta_n: tolerance must be positive");
    if (protocol.tau == 0.0)
        return n == 0 ? 1.0 : 0.0;

    const auto breakpoints = integration_breakpoints(protocol);
    quadrature::Options opt;
    opt.rel_tol = tol;
    const auto integrand = [&](double k) {
        return probability_unchecked(protocol, k) * std::cos(n * k);
    };
    try {
        return quadrature::integrate(integrand, breakpoints, opt).value / pi;
    } catch (const ConvergenceError& e) {
        std::ostringstream msg;
        msg << "beta_" << n << " (" << to_string(protocol.kind) << ", tau=" << protocol.tau
            << "): " << e.what();
        throw ConvergenceError(msg.str(), e.estimate() / pi, e.error_bound() / pi);
    }
}

double defect_density(const QuenchProtocol& protocol, double tol) {
    return beta_n(protocol, 0, tol);
}

BetaSet::BetaSet(int n_max, std::vector<double> values)
    : n_max_(n_max), values_(std::move(values)) {
    if (n_max < 0 || n_max % 2 != 0 || values_.size() != static_cast<std::size_t>(n_max / 2 + 1))
        throw DomainError("BetaSet: need one value per even n in [0, n_max]");
}

BetaSet BetaSet::compute(const QuenchProtocol& protocol, int n_max, double tol) {
    if (n_max < 0 || n_max % 2 != 0)
        throw DomainError("BetaSet: n_max must be even and non-negative");
    std::vector<double> values;
    values.reserve(n_max / 2 + 1);
    for (int n = 0; n <= n_max; n += 2)
        values.push_back(beta_n(protocol, n, tol));
    return BetaSet(n_max, std::move(values));
}

double BetaSet::operator[](int n) const {
    if (n < 0 || n > n_max_ || n % 2 != 0)
        throw DomainError("BetaSet: only even n in [0, n_max] are stored");
    return values_[static_cast<std::size_t>(n / 2)];
}

} // namespace quenchcorr::kernels
