#include "quenchcorr/scaling.hpp"

#include "quenchcorr/errors.hpp"
#include "quenchcorr/parallel.hpp"
#include "quenchcorr/quench.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace quenchcorr::scaling {

bool SweepTable::all_valid() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.valid; });
}

std::string to_string(Column c) {
    switch (c) {
    case Column::MutualInformation: return "I";
    case Column::Classical: return "C";
    case Column::Discord: return "Q";
    case Column::Concurrence: return "Cnc";
    case Column::Beta0: return "beta0";
    }
    return "?";
}

Column parse_column(const std::string& name) {
    if (name == "I") return Column::MutualInformation;
    if (name == "C") return Column::Classical;
    if (name == "Q") return Column::Discord;
    if (name == "Cnc") return Column::Concurrence;
    if (name == "beta0") return Column::Beta0;
    throw DomainError("unknown column '" + name + "' (expected I, C, Q, Cnc or beta0)");
}

double value(const SweepRow& row, Column c) {
    switch (c) {
    case Column::MutualInformation: return row.mutual_information;
    case Column::Classical: return row.classical_correlation;
    case Column::Discord: return row.discord;
    case Column::Concurrence: return row.concurrence;
    case Column::Beta0: return row.beta[0];
    }
    return 0.0;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
        throw DomainError("log_grid: need 0 < lo <= hi");
    if (points < 1)
        throw DomainError("log_grid: need at least one point");
    if (points == 1)
        return {lo};
    if (hi == lo)
        throw DomainError("log_grid: lo == hi with more than one point");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

namespace {

void fill_row(SweepRow& row, const kernels::QuenchProtocol& p, int n,
              xstate::MeasurementScheme scheme) {
    try {
        const auto m = quench::measures(p, n, scheme);
        for (int i = 0; i < 4; ++i)
            row.beta[i] = m.betas[2 * i];
        row.mutual_information = m.report.mutual_information;
        row.classical_correlation = m.report.classical_correlation;
        row.discord = m.report.discord;
        row.concurrence = m.report.concurrence;
        row.valid = true;
    } catch (const std::exception& e) {
        row.valid = false;
        row.error = e.what();
    }
}

void check_grid(std::span<const double> grid, bool strictly_positive, const char* what) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || (strictly_positive ? grid[i] <= 0.0 : grid[i] < 0.0))
            throw DomainError(std::string(what) + " grid has an invalid value");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw DomainError(std::string(what) + " grid must be strictly increasing");
    }
}

} // namespace

SweepTable sweep_tau(const kernels::QuenchProtocol& protocol, int n, std::span<const double> taus,
                     unsigned workers, xstate::MeasurementScheme scheme) {
    check_grid(taus, true, "tau");
    if (n != 2 && n != 4 && n != 6)
        throw DomainError("separation n must be 2, 4 or 6");
    SweepTable table;
    table.over = Abscissa::Tau;
    table.protocol = protocol;
    table.n = n;
    table.rows.resize(taus.size());
    parallel_for(taus.size(), workers, [&](std::size_t i) {
        auto p = protocol;
        p.tau = taus[i];
        table.rows[i].x = taus[i];
        table.rows[i].n = n;
        fill_row(table.rows[i], p, n, scheme);
    });
    return table;
}

SweepTable sweep_j3(double tau, int n, std::span<const double> j3s, unsigned workers,
                    xstate::MeasurementScheme scheme) {
    check_grid(j3s, false, "J3");
    if (n != 2 && n != 4 && n != 6)
        throw DomainError("separation n must be 2, 4 or 6");
    SweepTable table;
    table.over = Abscissa::J3;
    table.protocol = kernels::QuenchProtocol::three_spin(0.0, tau);
    table.protocol.validate();
    table.n = n;
    table.rows.resize(j3s.size());
    parallel_for(j3s.size(), workers, [&](std::size_t i) {
        table.rows[i].x = j3s[i];
        table.rows[i].n = n;
        fill_row(table.rows[i], kernels::QuenchProtocol::three_spin(j3s[i], tau), n, scheme);
    });
    return table;
}

ScalingFit fit_loglog(std::span<const double> x, std::span<const double> y, double window_min,
                      double window_max) {
    if (x.size() != y.size())
        throw DomainError("fit_loglog: x and y differ in length");
    if (!(window_min > 0.0) || !(window_max >= window_min))
        throw DomainError("fit_loglog: window must satisfy 0 < min <= max");

    std::vector<double> lx, ly;
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= window_min && x[i] <= window_max))
            continue;
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
            bad.push_back(i);
            continue;
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "fit_loglog: non-positive values in the window at rows";
        for (std::size_t i = 0; i < bad.size() && i < 20; ++i)
            msg << ' ' << bad[i] << " (x=" << x[bad[i]] << ", y=" << y[bad[i]] << ')';
        if (bad.size() > 20)
            msg << " and " << bad.size() - 20 << " more";
        throw DomainError(msg.str());
    }
    if (lx.size() < 5) {
        std::ostringstream msg;
        msg << "fit_loglog: need at least 5 points in [" << window_min << ", " << window_max
            << "], found " << lx.size();
        throw DomainError(msg.str());
    }

    const double count = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0)
        throw DomainError("fit_loglog: all x in the window coincide");

    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.window_min = window_min;
    fit.window_max = window_max;
    fit.n_points = static_cast<int>(lx.size());
    return fit;
}

ScalingFit fit_loglog(const SweepTable& table, Column column, double window_min,
                      double window_max) {
    std::vector<double> x, y;
    x.reserve(table.rows.size());
    y.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        if (!r.valid && r.x >= window_min && r.x <= window_max) {
            std::ostringstream msg;
            msg << "fit_loglog: row " << i << " (x=" << r.x << ") failed: " << r.error;
            throw DomainError(msg.str());
        }
        x.push_back(r.x);
        y.push_back(r.valid ? value(r, column) : std::nan(""));
    }
    return fit_loglog(x, y, window_min, window_max);
}

Peak locate_peak(std::span<const double> x, std::span<const double> y, bool log_x) {
    if (x.size() != y.size() || x.empty())
        throw DomainError("locate_peak: need matching, non-empty x and y");
    const auto it = std::max_element(y.begin(), y.end());
    const std::size_t i = static_cast<std::size_t>(it - y.begin());
    Peak peak{x[i], y[i], i};
    if (i == 0 || i + 1 == y.size())
        return peak;

    auto tr = [&](double v) {
        if (log_x && !(v > 0.0))
            throw DomainError("locate_peak: log abscissa needs x > 0");
        return log_x ? std::log(v) : v;
    };
    const double x0 = tr(x[i - 1]), x1 = tr(x[i]), x2 = tr(x[i + 1]);
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    // Newton form of the interpolating parabola.
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (!(curv < 0.0))
        return peak;
    const double xm = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
    const double xs = std::clamp(xm, x0, x2);
    peak.height = y0 + d01 * (xs - x0) + curv * (xs - x0) * (xs - x1);
    peak.location = log_x ? std::exp(xs) : xs;
    return peak;
}

bool is_unimodal(std::span<const double> y, double rel_tol) {
    if (y.size() < 3)
        return true;
    double scale = 0.0;
    for (double v : y)
        scale = std::max(scale, std::abs(v));
    const double eps = rel_tol * scale;
    bool falling = false;
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double d = y[i] - y[i - 1];
        if (d > eps) {
            if (falling)
                return false;
        } else if (d < -eps) {
            falling = true;
        }
    }
    return true;
}

} // namespace quenchcorr::scaling
