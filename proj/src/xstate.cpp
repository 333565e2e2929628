#include "quenchcorr/xstate.hpp"

#include "quenchcorr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace quenchcorr::xstate {

using std::numbers::pi;

namespace {

constexpr double kOutcomeFloor = 1e-15;

// Pauli matrices σ0 = I, σx, σy, σz.
const std::array<QubitMatrix, 4>& paulis() {
    static const std::array<QubitMatrix, 4> s = [] {
        std::array<QubitMatrix, 4> m;
        const Complex i(0.0, 1.0);
        m[0] << 1, 0, 0, 1;
        m[1] << 0, 1, 1, 0;
        m[2] << 0, -i, i, 0;
        m[3] << 1, 0, 0, -1;
        return m;
    }();
    return s;
}

TwoQubitMatrix kron(const QubitMatrix& x, const QubitMatrix& y) {
    TwoQubitMatrix out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    return out;
}

double clamp_eigenvalue(double lambda) {
    if (lambda >= 0.0)
        return lambda;
    if (lambda >= -kEigenClamp)
        return 0.0;
    std::ostringstream msg;
    msg << "state is not positive semidefinite (eigenvalue " << lambda << ")";
    throw DomainError(msg.str());
}

// Bloch parametrization ρ = ¼(I + a·σ⊗I + I⊗b·σ + Σ T_ij σi⊗σj).
struct BlochForm {
    std::array<double, 3> a{};
    std::array<double, 3> b{};
    std::array<std::array<double, 3>, 3> t{};
    double entropy_a = 0.0;

    explicit BlochForm(const TwoQubitMatrix& rho) {
        const auto& s = paulis();
        for (int i = 0; i < 3; ++i) {
            a[i] = (rho * kron(s[i + 1], s[0])).trace().real();
            b[i] = (rho * kron(s[0], s[i + 1])).trace().real();
            for (int j = 0; j < 3; ++j)
                t[i][j] = (rho * kron(s[i + 1], s[j + 1])).trace().real();
        }
        entropy_a = binary_entropy(0.5 * (1.0 + std::hypot(a[0], a[1], a[2])));
    }

    // Conditional entropy of A averaged over the two outcomes along n.
    double conditional_entropy(const std::array<double, 3>& n) const {
        double tn[3];
        for (int i = 0; i < 3; ++i)
            tn[i] = t[i][0] * n[0] + t[i][1] * n[1] + t[i][2] * n[2];
        const double bn = b[0] * n[0] + b[1] * n[1] + b[2] * n[2];
        double h = 0.0;
        for (double sign : {1.0, -1.0}) {
            const double p = 0.5 * (1.0 + sign * bn);
            if (p < kOutcomeFloor)
                continue;
            const double r = std::hypot(a[0] + sign * tn[0], a[1] + sign * tn[1],
                                        a[2] + sign * tn[2]) /
                             (2.0 * p);
            h += p * binary_entropy(0.5 * (1.0 + std::min(r, 1.0)));
        }
        return h;
    }

    double information(const std::array<double, 3>& n) const {
        return entropy_a - conditional_entropy(n);
    }
};

std::array<double, 3> direction(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

struct Candidate {
    double value;
    double theta;
    double phi;
};

// Nelder-Mead maximization of J over unconstrained (θ, φ); the Bloch map is
// smooth on all of R², so no bounds are needed.
Candidate refine(const BlochForm& form, Candidate start, double step) {
    struct Vertex {
        double x[2];
        double f;
    };
    auto eval = [&](double th, double ph) { return form.information(direction(th, ph)); };
    std::array<Vertex, 3> v{{{{start.theta, start.phi}, start.value},
                             {{start.theta + step, start.phi}, 0.0},
                             {{start.theta, start.phi + step}, 0.0}}};
    v[1].f = eval(v[1].x[0], v[1].x[1]);
    v[2].f = eval(v[2].x[0], v[2].x[1]);

    constexpr double angle_tol = 1e-7;
    for (int iter = 0; iter < 2000; ++iter) {
        std::sort(v.begin(), v.end(), [](const Vertex& l, const Vertex& r) { return l.f > r.f; });
        double size = 0.0;
        for (int k = 1; k < 3; ++k)
            size = std::max({size, std::abs(v[k].x[0] - v[0].x[0]),
                             std::abs(v[k].x[1] - v[0].x[1])});
        if (size < angle_tol)
            break;

        const double c[2] = {0.5 * (v[0].x[0] + v[1].x[0]), 0.5 * (v[0].x[1] + v[1].x[1])};
        auto along = [&](double t) {
            Vertex out;
            out.x[0] = c[0] + t * (v[2].x[0] - c[0]);
            out.x[1] = c[1] + t * (v[2].x[1] - c[1]);
            out.f = eval(out.x[0], out.x[1]);
            return out;
        };
        const Vertex reflected = along(-1.0);
        if (reflected.f > v[0].f) {
            const Vertex expanded = along(-2.0);
            v[2] = expanded.f > reflected.f ? expanded : reflected;
        } else if (reflected.f > v[1].f) {
            v[2] = reflected;
        } else {
            const bool outside = reflected.f > v[2].f;
            const Vertex contracted = outside ? along(-0.5) : along(0.5);
            const double threshold = outside ? reflected.f : v[2].f;
            if (contracted.f >= threshold) {
                v[2] = contracted;
            } else {
                for (int k = 1; k < 3; ++k) {
                    v[k].x[0] = v[0].x[0] + 0.5 * (v[k].x[0] - v[0].x[0]);
                    v[k].x[1] = v[0].x[1] + 0.5 * (v[k].x[1] - v[0].x[1]);
                    v[k].f = eval(v[k].x[0], v[k].x[1]);
                }
            }
        }
    }
    const auto best =
        *std::max_element(v.begin(), v.end(), [](const Vertex& l, const Vertex& r) { return l.f < r.f; });
    return {best.f, best.x[0], best.x[1]};
}

ClassicalCorrelation maximize(const BlochForm& form) {
    constexpr int n_theta = 64;
    constexpr int n_phi = 64;
    const double d_theta = pi / (n_theta - 1);
    const double d_phi = 2.0 * pi / n_phi;

    std::vector<Candidate> grid;
    grid.reserve(n_theta * n_phi);
    for (int i = 0; i < n_theta; ++i) {
        const double th = i * d_theta;
        for (int j = 0; j < n_phi; ++j) {
            const double ph = j * d_phi;
            grid.push_back({form.information(direction(th, ph)), th, ph});
        }
    }
    // Best few grid points seed independent refinements; ties keep grid order.
    constexpr std::size_t n_seeds = 3;
    std::stable_sort(grid.begin(), grid.end(),
                     [](const Candidate& l, const Candidate& r) { return l.value > r.value; });
    Candidate best = grid.front();
    for (std::size_t s = 0; s < std::min(n_seeds, grid.size()); ++s) {
        const Candidate refined = refine(form, grid[s], 0.5 * d_theta);
        if (refined.value > best.value)
            best = refined;
    }
    return {best.value, MeasurementBasis::from_direction(direction(best.theta, best.phi))};
}

} // namespace

// ---- types -----------------------------------------------------------------

void CorrelatorSet::validate() const {
    for (double c : {c1, c2, c3, c4})
        if (!(c >= -1.0 - kEigenClamp && c <= 1.0 + kEigenClamp))
            throw DomainError("correlators must lie in [-1, 1]");
}

TwoQubitMatrix XStateDensityMatrix::dense() const {
    TwoQubitMatrix m = TwoQubitMatrix::Zero();
    m(0, 0) = a_plus;
    m(1, 1) = a_zero;
    m(2, 2) = a_zero;
    m(3, 3) = a_minus;
    m(0, 3) = b1;
    m(3, 0) = std::conj(b1);
    m(1, 2) = b2;
    m(2, 1) = std::conj(b2);
    return m;
}

void XStateDensityMatrix::validate(double tol) const {
    if (std::abs(a_plus + a_minus + 2.0 * a_zero - 1.0) > 1e-12)
        throw DomainError("X state does not have unit trace");
    if (a_plus < -tol || a_minus < -tol || a_zero < -tol)
        throw DomainError("X state has a negative population");
    if (std::norm(b1) > std::max(a_plus, 0.0) * std::max(a_minus, 0.0) + tol ||
        std::abs(b2) > a_zero + tol)
        throw DomainError("X state coherences violate positivity");
}

std::array<double, 3> MeasurementBasis::direction() const {
    return xstate::direction(theta, phi);
}

MeasurementBasis MeasurementBasis::from_direction(const std::array<double, 3>& n) {
    const double norm = std::hypot(n[0], n[1], n[2]);
    if (!(norm > 0.0))
        throw DomainError("measurement direction must be non-zero");
    const double theta = std::acos(std::clamp(n[2] / norm, -1.0, 1.0));
    double phi = std::atan2(n[1], n[0]);
    if (phi < 0.0)
        phi += 2.0 * pi;
    if (phi >= 2.0 * pi)
        phi = 0.0;
    return {theta, phi};
}

// ---- construction ----------------------------------------------------------

XStateDensityMatrix build_xstate(const CorrelatorSet& c, double clamp_tol) {
    c.validate();
    XStateDensityMatrix rho;
    rho.a_plus = 0.25 * (1.0 + c.c3 + 2.0 * c.c4);
    rho.a_minus = 0.25 * (1.0 + c.c3 - 2.0 * c.c4);
    rho.a_zero = 0.25 * (1.0 - c.c3);
    rho.b1 = 0.25 * (c.c1 - c.c2);
    rho.b2 = 0.25 * (c.c1 + c.c2);

    auto clamp_population = [&](double& a) {
        if (a < -clamp_tol) {
            std::ostringstream msg;
            msg << "inconsistent correlators: population " << a << " < 0";
            throw DomainError(msg.str());
        }
        a = std::max(a, 0.0);
    };
    clamp_population(rho.a_plus);
    clamp_population(rho.a_minus);
    clamp_population(rho.a_zero);

    auto clamp_coherence = [&](Complex& b, double bound) {
        const double mag = std::abs(b);
        if (mag <= bound)
            return;
        if (mag > bound + clamp_tol) {
            std::ostringstream msg;
            msg << "inconsistent correlators: coherence " << mag << " exceeds " << bound;
            throw DomainError(msg.str());
        }
        b *= bound / mag;
    };
    clamp_coherence(rho.b1, std::sqrt(rho.a_plus * rho.a_minus));
    clamp_coherence(rho.b2, rho.a_zero);
    return rho;
}

std::array<double, 4> xstate_eigenvalues(const XStateDensityMatrix& rho) {
    const double mean = 0.5 * (rho.a_plus + rho.a_minus);
    const double radius = std::hypot(0.5 * (rho.a_plus - rho.a_minus), std::abs(rho.b1));
    const double coh = std::abs(rho.b2);
    std::array<double, 4> ev{mean + radius, mean - radius, rho.a_zero + coh, rho.a_zero - coh};
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::array<double, 4> xstate_eigenvalues(const CorrelatorSet& c) {
    c.validate();
    const double root = std::sqrt(4.0 * c.c4 * c.c4 + (c.c1 - c.c2) * (c.c1 - c.c2));
    std::array<double, 4> ev{0.25 * ((1.0 + c.c3) + root), 0.25 * ((1.0 + c.c3) - root),
                             0.25 * ((1.0 - c.c3) + (c.c1 + c.c2)),
                             0.25 * ((1.0 - c.c3) - (c.c1 + c.c2))};
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::array<double, 4> eigenvalues(const TwoQubitMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<TwoQubitMatrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("Hermitian eigensolver failed on two-qubit state");
    const auto& ev = solver.eigenvalues();
    return {ev(0), ev(1), ev(2), ev(3)};
}

// ---- entropies -------------------------------------------------------------

double binary_entropy(double p) {
    double h = 0.0;
    for (double q : {p, 1.0 - p})
        if (q > 0.0)
            h -= q * std::log2(q);
    return h;
}

double von_neumann_entropy(std::span<const double> eigenvalues) {
    double s = 0.0;
    for (double lambda : eigenvalues) {
        const double l = clamp_eigenvalue(lambda);
        if (l > 0.0)
            s -= l * std::log2(l);
    }
    return s;
}

double von_neumann_entropy(const TwoQubitMatrix& rho) {
    const auto ev = eigenvalues(rho);
    return von_neumann_entropy(ev);
}

double subsystem_entropy(double c4) {
    if (!(std::abs(c4) <= 1.0 + kEigenClamp))
        throw DomainError("subsystem_entropy: |c4| must not exceed 1");
    return binary_entropy(0.5 * (1.0 + std::clamp(c4, -1.0, 1.0)));
}

QubitMatrix partial_trace_a(const TwoQubitMatrix& rho) {
    QubitMatrix out = QubitMatrix::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = rho(i, j) + rho(2 + i, 2 + j);
    return out;
}

QubitMatrix partial_trace_b(const TwoQubitMatrix& rho) {
    QubitMatrix out = QubitMatrix::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = rho(2 * i, 2 * j) + rho(2 * i + 1, 2 * j + 1);
    return out;
}

namespace {

double qubit_entropy(const QubitMatrix& m) {
    const double tr = m.trace().real();
    const double diff = 0.5 * (m(0, 0).real() - m(1, 1).real());
    const double r = std::hypot(diff, std::abs(m(0, 1)));
    const std::array<double, 2> ev{0.5 * tr + r, 0.5 * tr - r};
    return von_neumann_entropy(ev);
}

} // namespace

// ---- correlations ----------------------------------------------------------

double mutual_information(const XStateDensityMatrix& rho) {
    const double s_a = binary_entropy(rho.a_plus + rho.a_zero);
    const double s_b = s_a; // both marginals are diag(a+ + a0, a0 + a-)
    const auto ev = xstate_eigenvalues(rho);
    return std::max(0.0, s_a + s_b - von_neumann_entropy(ev));
}

double mutual_information(const TwoQubitMatrix& rho) {
    const double s = qubit_entropy(partial_trace_b(rho)) + qubit_entropy(partial_trace_a(rho)) -
                     von_neumann_entropy(rho);
    return std::max(0.0, s);
}

ConditionalState conditional_state(const TwoQubitMatrix& rho, const MeasurementBasis& basis,
                                   Outcome outcome) {
    const auto n = basis.direction();
    const auto& s = paulis();
    const double sign = outcome == Outcome::Plus ? 1.0 : -1.0;
    const QubitMatrix projector =
        0.5 * (s[0] + sign * (n[0] * s[1] + n[1] * s[2] + n[2] * s[3]));
    const TwoQubitMatrix lifted = kron(s[0], projector);
    const TwoQubitMatrix unnormalized = lifted * rho * lifted;

    ConditionalState out;
    const double p = unnormalized.trace().real();
    if (p < kOutcomeFloor)
        return out;
    out.probability = p;
    out.state = unnormalized / p;
    out.defined = true;
    return out;
}

double measurement_information(const TwoQubitMatrix& rho, const MeasurementBasis& basis) {
    return BlochForm(rho).information(basis.direction());
}

ClassicalCorrelation classical_correlation(const TwoQubitMatrix& rho, MeasurementScheme scheme) {
    const BlochForm form(rho);
    if (scheme == MeasurementScheme::Transverse) {
        const MeasurementBasis x{pi / 2.0, 0.0};
        return {std::max(0.0, form.information(x.direction())), x};
    }
    auto result = maximize(form);
    result.value = std::max(0.0, result.value);
    return result;
}

ClassicalCorrelation classical_correlation(const XStateDensityMatrix& rho,
                                           MeasurementScheme scheme) {
    return classical_correlation(rho.dense(), scheme);
}

double discord(const TwoQubitMatrix& rho, MeasurementScheme scheme) {
    return std::max(0.0, mutual_information(rho) - classical_correlation(rho, scheme).value);
}

double discord(const XStateDensityMatrix& rho, MeasurementScheme scheme) {
    return std::max(0.0, mutual_information(rho) - classical_correlation(rho, scheme).value);
}

double concurrence_xstate(const XStateDensityMatrix& rho) {
    const double outer = 2.0 * (std::abs(rho.b2) - std::sqrt(std::max(0.0, rho.a_plus * rho.a_minus)));
    const double inner = 2.0 * (std::abs(rho.b1) - rho.a_zero);
    return std::max({0.0, outer, inner});
}

double concurrence_wootters(const TwoQubitMatrix& rho) {
    // The square roots of the eigenvalues of ρ(σy⊗σy)ρ*(σy⊗σy) are the singular
    // values of W^T (σy⊗σy) W for any factor ρ = W W^†. Working with W keeps
    // near-zero eigenvalues of ρ from being amplified by the square root.
    Eigen::SelfAdjointEigenSolver<TwoQubitMatrix> solver(rho);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "concurrence: eigensolver failed; trace " << rho.trace()
            << ", hermiticity defect " << (rho - rho.adjoint()).norm();
        throw NumericalError(msg.str());
    }
    TwoQubitMatrix w = solver.eigenvectors();
    for (int k = 0; k < 4; ++k)
        w.col(k) *= std::sqrt(clamp_eigenvalue(solver.eigenvalues()(k)));

    const auto& s = paulis();
    const TwoQubitMatrix flip = kron(s[2], s[2]);
    const TwoQubitMatrix tau = w.transpose() * flip * w;
    Eigen::JacobiSVD<TwoQubitMatrix> svd(tau);
    const auto& sv = svd.singularValues(); // descending
    return std::max(0.0, sv(0) - sv(1) - sv(2) - sv(3));
}

CorrelationReport analyze(const XStateDensityMatrix& rho, MeasurementScheme scheme) {
    CorrelationReport report;
    report.mutual_information = mutual_information(rho);
    const auto classical = classical_correlation(rho, scheme);
    report.classical_correlation = classical.value;
    report.argmax_basis = classical.basis;
    report.discord = std::max(0.0, report.mutual_information - classical.value);
    report.concurrence = concurrence_xstate(rho);
    return report;
}

} // namespace quenchcorr::xstate
