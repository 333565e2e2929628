#pragma once

#include "quenchcorr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

namespace quenchcorr::quadrature {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-15;
    // Global budget on the number of live subintervals.
    int max_intervals = 4000;
    // Intervals narrower than (b - a) * 2^-max_depth are not split further.
    int max_depth = 40;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    double abs_value = 0.0; // estimate of the integral of |f|
    int intervals = 0;
};

namespace detail {

struct Segment {
    double a, b;
    double value, error, abs_value;
    int depth;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// 7-point Gauss / 15-point Kronrod pair on [a, b].
template <class F>
Segment gauss_kronrod_15(const F& f, double a, double b, int depth) {
    static constexpr double xk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = wk[7] * fc;
    double gauss = wg[3] * fc;
    double abs_sum = wk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xk[j];
        const double f1 = f(centre - dx);
        const double f2 = f(centre + dx);
        kronrod += wk[j] * (f1 + f2);
        abs_sum += wk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)
            gauss += wg[j / 2] * (f1 + f2);
    }
    const double value = kronrod * half;
    const double error = std::abs((kronrod - gauss) * half);
    return {a, b, value, error, abs_sum * std::abs(half), depth};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over the partition given by
// `breakpoints` (sorted, at least two entries). The interval with the largest
// error estimate is bisected until the summed error drops below
// max(abs_tol, rel_tol * max(|I|, ∫|f|)).
template <class F>
Result integrate(const F& f, std::span<const double> breakpoints, const Options& opt = {}) {
    if (breakpoints.size() < 2)
        throw DomainError("quadrature: need at least two breakpoints");
    const double total_width = breakpoints.back() - breakpoints.front();
    const double min_width = std::ldexp(std::abs(total_width), -opt.max_depth);

    std::priority_queue<detail::Segment> queue;
    Result r;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i]))
            continue;
        auto s = detail::gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1], 0);
        r.value += s.value;
        r.error += s.error;
        r.abs_value += s.abs_value;
        queue.push(s);
    }

    auto target = [&] {
        return std::max(opt.abs_tol, opt.rel_tol * std::max(std::abs(r.value), r.abs_value));
    };

    // Segments that hit the width floor are parked; their error still counts.
    std::vector<detail::Segment> parked;
    while (!queue.empty() && r.error > target()) {
        if (static_cast<int>(queue.size() + parked.size()) >= opt.max_intervals)
            break;
        const detail::Segment s = queue.top();
        queue.pop();
        if (s.b - s.a <= min_width) {
            parked.push_back(s);
            continue;
        }
        const double mid = 0.5 * (s.a + s.b);
        auto left = detail::gauss_kronrod_15(f, s.a, mid, s.depth + 1);
        auto right = detail::gauss_kronrod_15(f, mid, s.b, s.depth + 1);
        r.value += left.value + right.value - s.value;
        r.error += left.error + right.error - s.error;
        r.abs_value += left.abs_value + right.abs_value - s.abs_value;
        queue.push(left);
        queue.push(right);
    }

    // Re-sum from the leaves to drop the running-sum cancellation noise.
    r.value = r.error = r.abs_value = 0.0;
    r.intervals = static_cast<int>(queue.size() + parked.size());
    auto accumulate = [&](const detail::Segment& s) {
        r.value += s.value;
        r.error += s.error;
        r.abs_value += s.abs_value;
    };
    for (const auto& s : parked)
        accumulate(s);
    while (!queue.empty()) {
        accumulate(queue.top());
        queue.pop();
    }

    if (r.error > target()) {
        std::ostringstream msg;
        msg << "quadrature did not converge: estimate " << r.value << ", error bound "
            << r.error << " after " << r.intervals << " intervals";
        throw ConvergenceError(msg.str(), r.value, r.error);
    }
    return r;
}

template <class F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
    const double bp[2] = {a, b};
    return integrate(f, std::span<const double>(bp, 2), opt);
}

} // namespace quenchcorr::quadrature
