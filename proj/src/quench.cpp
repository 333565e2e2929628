#include "quenchcorr/quench.hpp"

#include "quenchcorr/errors.hpp"

#include <cmath>
#include <sstream>

namespace quenchcorr::quench {

void QuenchMeasureRequest::validate() const {
    protocol.validate();
    if (separation != 2 && separation != 4 && separation != 6)
        throw DomainError("separation n must be 2, 4 or 6");
}

xstate::CorrelatorSet correlators(const kernels::BetaSet& betas, int n) {
    if (n != 2 && n != 4 && n != 6)
        throw DomainError("correlators exist only for n = 2, 4, 6");
    if (betas.n_max() < n)
        throw DomainError("beta set does not reach the requested separation");

    const double b0 = betas[0];
    const double b2 = betas[2];
    const double m = 1.0 - 2.0 * b0; // <σz>
    const double bn = betas[n];

    xstate::CorrelatorSet c;
    c.c4 = m;
    c.c3 = m * m - 4.0 * bn * bn;
    if (n == 2) {
        c.c1 = 0.5 * b2 * m;
    } else if (n == 4) {
        const double b4 = betas[4];
        c.c1 = m * m * b2 * b2 - 4.0 * b2 * b2 * b2 * b2 + 0.5 * b4 * m * m * m -
               2.0 * b2 * b2 * b4 * m;
    } else {
        const double b4 = betas[4];
        const double b6 = betas[6];
        const double first = 0.5 * (b6 * (m * m - 4.0 * b2 * b2) +
                                     4.0 * b2 * (b2 * b2 + b4 * b4 - b4 * m));
        const double second = 16.0 * b2 * b2 * b4 + m * (m * m - 8.0 * b2 * b2 - 4.0 * b4 * b4);
        c.c1 = first * second;
    }
    c.c2 = c.c1;
    return c;
}

xstate::CorrelatorSet correlators(const kernels::QuenchProtocol& protocol, int n) {
    if (n != 2 && n != 4 && n != 6)
        throw DomainError("correlators exist only for n = 2, 4, 6");
    return correlators(kernels::BetaSet::compute(protocol, n), n);
}

QuenchMeasures measures(const kernels::BetaSet& betas, int n, xstate::MeasurementScheme scheme) {
    QuenchMeasures out;
    out.betas = betas;
    out.correlators = correlators(betas, n);
    out.state = xstate::build_xstate(out.correlators, kStateClamp);
    out.report = xstate::analyze(out.state, scheme);
    return out;
}

QuenchMeasures measures(const kernels::QuenchProtocol& protocol, int n,
                        xstate::MeasurementScheme scheme) {
    QuenchMeasureRequest{protocol, n}.validate();
    return measures(kernels::BetaSet::compute(protocol, 6), n, scheme);
}

QuenchMeasures measures(const QuenchMeasureRequest& request, xstate::MeasurementScheme scheme) {
    return measures(request.protocol, request.separation, scheme);
}

namespace {

// x log2 x with 0 log 0 = 0; rejects arguments that are clearly negative.
double xlog2x(double x, const char* term) {
    if (x < -1e-14) {
        std::ostringstream msg;
        msg << "closed form: log of non-positive argument in " << term << " (" << x << ")";
        throw DomainError(msg.str());
    }
    return x > 0.0 ? x * std::log2(x) : 0.0;
}

void check_beta_pair(double b0, double b2) {
    if (!(b0 >= 0.0 && b0 <= 1.0) || !(std::abs(b2) <= b0 + 1e-14))
        throw DomainError("closed form: need 0 <= beta0 <= 1 and |beta2| <= beta0");
}

} // namespace

double closed_form_I_n2(double b0, double b2) {
    check_beta_pair(b0, b2);
    const double q = 1.0 - b0;
    const double m = 1.0 - 2.0 * b0;
    const double base = 4.0 * b0 * q + 4.0 * b2 * b2;
    return -2.0 * xlog2x(q, "1-beta0") + xlog2x(q * q - b2 * b2, "(1-beta0)^2-beta2^2") -
           2.0 * xlog2x(b0, "beta0") + xlog2x(b0 * b0 - b2 * b2, "beta0^2-beta2^2") +
           xlog2x(0.25 * (base + b2 * m), "a0+|b2|") + xlog2x(0.25 * (base - b2 * m), "a0-|b2|");
}

double closed_form_C_n2(double b0, double b2) {
    check_beta_pair(b0, b2);
    const double ms = (1.0 - 2.0 * b0) * std::sqrt(1.0 + 0.25 * b2 * b2);
    return -xlog2x(1.0 - b0, "1-beta0") - xlog2x(b0, "beta0") +
           xlog2x(0.5 * (1.0 - ms), "(1-ms)/2") + xlog2x(0.5 * (1.0 + ms), "(1+ms)/2");
}

} // namespace quenchcorr::quench
