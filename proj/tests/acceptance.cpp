// Acceptance checks. Prints one PASS/FAIL line per criterion plus "info"
// lines with the numbers behind it. With no arguments all criteria run;
// otherwise only the listed ones. Exit status is non-zero if any requested
// criterion fails.

#include "quenchcorr/central.hpp"
#include "quenchcorr/cli.hpp"
#include "quenchcorr/kernels.hpp"
#include "quenchcorr/parallel.hpp"
#include "quenchcorr/quench.hpp"
#include "quenchcorr/scaling.hpp"
#include "quenchcorr/xstate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace quenchcorr;
using kernels::QuenchProtocol;
using scaling::Column;
using xstate::MeasurementScheme;
using std::numbers::pi;

namespace {

const unsigned kWorkers = default_workers();

struct Report {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok   " : "MISS ") + what);
    }
    void info(const std::string& what) { notes.push_back("info " + what); }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <class... T>
std::string fmtn(const char* f, T... a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Returns the slope, or NaN with the reason noted.
double try_fit(Report& r, const scaling::SweepTable& t, Column c, double lo, double hi,
               const std::string& label) {
    try {
        const auto f = scaling::fit_loglog(t, c, lo, hi);
        r.info(label + fmtn(": slope %.4f (r2 %.5f, %d points)", f.slope, f.r_squared, f.n_points));
        return f.slope;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        if (msg.size() > 160)
            msg = msg.substr(0, 160) + "...";
        r.info(label + ": no fit, " + msg);
        return std::nan("");
    }
}

std::vector<double> column(const scaling::SweepTable& t, Column c) {
    std::vector<double> v;
    for (const auto& r : t.rows)
        v.push_back(scaling::value(r, c));
    return v;
}

std::vector<double> abscissa(const scaling::SweepTable& t) {
    std::vector<double> v;
    for (const auto& r : t.rows)
        v.push_back(r.x);
    return v;
}

// ---------------------------------------------------------------------------

Report kibble_zurek() {
    Report r;
    const auto t0 = std::chrono::steady_clock::now();
    const auto is = scaling::sweep_tau(QuenchProtocol::ising(1, 1), 2,
                                       scaling::log_grid(1e2, 1e4, 21), kWorkers);
    const auto mc = scaling::sweep_tau(QuenchProtocol::multicritical(1), 2,
                                       scaling::log_grid(1e2, 1e5, 25), kWorkers);
    const double s_is = try_fit(r, is, Column::Beta0, 1e2, 1e4, "Ising beta0 [1e2,1e4]");
    const double s_mc = try_fit(r, mc, Column::Beta0, 1e2, 1e5, "multicritical beta0 [1e2,1e5]");
    const double dt = seconds_since(t0);
    r.require(std::abs(s_is + 0.5) <= 0.02, fmt("Ising slope %.4f within -0.5 +- 0.02", s_is));
    r.require(std::abs(s_mc + 1.0 / 6.0) <= 0.02,
              fmt("multicritical slope %.4f within -1/6 +- 0.02", s_mc));
    r.require(dt < 10.0, fmt("runtime %.2f s < 10 s", dt));
    return r;
}

Report discord_scaling() {
    Report r;
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid_is = scaling::log_grid(1e2, 1e4, 21);
    for (int n : {2, 4, 6}) {
        const auto t = scaling::sweep_tau(QuenchProtocol::ising(1, 1), n, grid_is, kWorkers);
        const double s = try_fit(r, t, Column::Discord, 1e2, 1e4, fmtn("Ising Q n=%d [1e2,1e4]", n));
        r.require(std::abs(std::abs(s) - 0.5) <= 0.05, fmtn("Ising n=%d |slope| %.4f within 0.5 +- 0.05", n, std::abs(s)));
    }
    const auto mc = scaling::sweep_tau(QuenchProtocol::multicritical(1), 2,
                                       scaling::log_grid(1e2, 1e5, 25), kWorkers);
    const double sq = try_fit(r, mc, Column::Discord, 1e2, 1e5, "multicritical Q n=2 [1e2,1e5]");
    const double sc = try_fit(r, mc, Column::Concurrence, 1e2, 1e5, "multicritical Cnc n=2 [1e2,1e5]");
    r.require(std::abs(sq + 0.19) <= 0.04, fmt("multicritical Q slope %.4f within -0.19 +- 0.04", sq));
    r.require(std::abs(sc + 0.13) <= 0.04, fmt("multicritical Cnc slope %.4f within -0.13 +- 0.04", sc));
    const double dt = seconds_since(t0);
    r.require(dt < 300.0, fmt("runtime %.1f s < 300 s", dt));

    // Context, not scored: the sigma_x measurement and a later window.
    for (int n : {2, 4, 6}) {
        const auto tx = scaling::sweep_tau(QuenchProtocol::ising(1, 1), n, grid_is, kWorkers,
                                           MeasurementScheme::Transverse);
        try_fit(r, tx, Column::Discord, 1e2, 1e4, fmtn("[transverse] Ising Q n=%d [1e2,1e4]", n));
        const auto late = scaling::sweep_tau(QuenchProtocol::ising(1, 1), n,
                                             scaling::log_grid(1e4, 1e6, 11), kWorkers);
        try_fit(r, late, Column::Discord, 1e4, 1e6, fmtn("Ising Q n=%d [1e4,1e6]", n));
    }
    const auto mcx = scaling::sweep_tau(QuenchProtocol::multicritical(1), 2,
                                        scaling::log_grid(1e2, 1e5, 25), kWorkers,
                                        MeasurementScheme::Transverse);
    try_fit(r, mcx, Column::Discord, 1e2, 1e5, "[transverse] multicritical Q n=2 [1e2,1e5]");
    std::size_t zero_cnc = 0;
    for (const auto& row : mc.rows)
        zero_cnc += row.concurrence == 0.0;
    r.info(fmtn("multicritical Cnc is exactly 0 on %zu of %zu grid points", zero_cnc, mc.rows.size()));
    return r;
}

Report closed_form() {
    Report r;
    double worst_i = 0, worst_c = 0, worst_q = 0, worst_cx = 0;
    for (double tau : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0}) {
        const auto m = quench::measures(QuenchProtocol::ising(1, tau), 2);
        const double b0 = m.betas[0], b2 = m.betas[2];
        const double I = quench::closed_form_I_n2(b0, b2);
        const double C = quench::closed_form_C_n2(b0, b2);
        const double di = std::abs(m.report.mutual_information - I);
        const double dc = std::abs(m.report.classical_correlation - C);
        const double dq = std::abs(m.report.discord - (I - C));
        worst_i = std::max(worst_i, di);
        worst_c = std::max(worst_c, dc);
        worst_q = std::max(worst_q, dq);
        r.info(fmtn("tau=%g: I %.8e vs %.8e, C %.8e vs closed form %.8e, measurement theta=%.4f",
                    tau, m.report.mutual_information, I, m.report.classical_correlation, C,
                    m.report.argmax_basis.theta));
        const auto x = quench::measures(QuenchProtocol::ising(1, tau), 2, MeasurementScheme::Transverse);
        worst_cx = std::max(worst_cx, std::abs(x.report.classical_correlation - C));
    }
    r.require(worst_i <= 1e-6, fmt("max |I - I_closed| = %.2e <= 1e-6", worst_i));
    r.require(worst_c <= 1e-6, fmt("max |C - C_closed| = %.2e <= 1e-6", worst_c));
    r.require(worst_q <= 1e-6, fmt("max |Q - Q_closed| = %.2e <= 1e-6", worst_q));
    r.info(fmt("[transverse] max |C_x - C_closed| = %.2e", worst_cx));
    return r;
}

Report figure_four_shape(MeasurementScheme scheme, Report r, const std::string& tag) {
    const auto grid = scaling::log_grid(0.1, 1e3, 40);
    double prev_loc = 0.0, prev_height = 1e300;
    for (int n : {2, 4, 6}) {
        const auto t = scaling::sweep_tau(QuenchProtocol::ising(1, 1), n, grid, kWorkers, scheme);
        const auto q = column(t, Column::Discord);
        const auto peak = scaling::locate_peak(abscissa(t), q, true);
        const bool uni = scaling::is_unimodal(q);
        const std::string line = tag + fmtn("n=%d: unimodal=%s, peak tau=%.3f, height=%.5e", n,
                                            uni ? "yes" : "no", peak.location, peak.height);
        if (tag.empty()) {
            r.require(uni, line);
            r.require(peak.location > prev_loc, fmtn("n=%d peak location above n-2", n));
            r.require(peak.height < prev_height, fmtn("n=%d peak height below n-2", n));
        } else {
            r.info(line);
        }
        if (!uni && tag.empty()) {
            for (std::size_t i = 1; i + 1 < q.size(); ++i)
                if (q[i] < q[i - 1] && q[i] < q[i + 1])
                    r.info(fmtn("  n=%d local minimum at tau=%.4f (Q=%.5e)", n, grid[i], q[i]));
        }
        prev_loc = peak.location;
        prev_height = peak.height;

        if (n == 2 && tag.empty()) {
            std::size_t first = t.rows.size();
            for (std::size_t i = 0; i < t.rows.size(); ++i)
                if (t.rows[i].concurrence > 0.0) {
                    first = i;
                    break;
                }
            bool discord_only = first > 0 && first < t.rows.size();
            for (std::size_t i = 0; i < std::min(first, t.rows.size()); ++i)
                discord_only = discord_only && t.rows[i].concurrence == 0.0 && t.rows[i].discord > 0.0;
            r.require(discord_only,
                      first < t.rows.size()
                          ? fmt("n=2: Cnc = 0 with Q > 0 below tau = %.3f, Cnc > 0 from there", grid[first])
                          : std::string("n=2: Cnc never becomes positive"));
        }
    }
    return r;
}

Report figure_four() {
    Report r = figure_four_shape(MeasurementScheme::Optimal, Report{}, "");
    return figure_four_shape(MeasurementScheme::Transverse, r, "[transverse] ");
}

Report three_spin() {
    Report r;
    std::vector<double> j3;
    for (int i = 0; i <= 80; ++i)
        j3.push_back(i / 80.0);
    double prev_dist = 1e300, prev_width = 1e300;
    bool cnc_zero = true, approaches = true, sharpens = true;
    int interior = 0;
    for (double tau : {5.0, 20.0, 100.0, 500.0}) {
        const auto t = scaling::sweep_j3(tau, 2, j3, kWorkers);
        for (const auto& row : t.rows)
            if (row.x > 0.5)
                cnc_zero = cnc_zero && row.valid && row.concurrence == 0.0;
        const auto q = column(t, Column::Discord);
        const auto peak = scaling::locate_peak(j3, q, false);
        const double dist = std::abs(peak.location - 0.5);
        approaches = approaches && dist <= prev_dist + 1e-12;
        prev_dist = dist;

        // full width at half maximum around the sampled maximum
        std::size_t lo = peak.index, hi = peak.index;
        while (lo > 0 && q[lo - 1] >= 0.5 * q[peak.index])
            --lo;
        while (hi + 1 < q.size() && q[hi + 1] >= 0.5 * q[peak.index])
            ++hi;
        const bool edge = peak.index == 0 || peak.index + 1 == q.size();
        const double width = j3[hi] - j3[lo];
        if (!edge) {
            ++interior;
            sharpens = sharpens && width < prev_width;
            prev_width = width;
        }
        r.info(fmtn("tau=%g: Q peak at J3=%.4f (Q=%.4e), half-max width %.4f%s", tau,
                    peak.location, peak.height, width, edge ? " (maximum at grid edge)" : ""));
    }
    r.require(cnc_zero, "Cnc = 0 for every J3 > 0.5 at tau in {5, 20, 100, 500}");
    r.require(approaches && prev_dist <= 0.05,
              fmt("peak location approaches 0.5 monotonically, last distance %.4f <= 0.05", prev_dist));
    r.require(sharpens && interior >= 2, fmtn("half-max width decreases across the %d interior peaks", interior));
    return r;
}

Report bessel() {
    Report r;
    double worst = 0.0;
    for (double tau : {0.1, 1.0, 10.0})
        for (int n : {0, 2, 4, 6}) {
            const double a = pi * tau;
            const double ref = std::exp(-a / 2) * std::cyl_bessel_i(n / 2.0, a / 2);
            worst = std::max(worst, std::abs(kernels::beta_n(QuenchProtocol::ising(1, tau), n) - ref));
        }
    r.require(worst <= 1e-8, fmt("max |beta_n - e^{-a/2} I_{n/2}(a/2)| = %.2e <= 1e-8", worst));
    return r;
}

Report concurrence() {
    Report r;
    std::mt19937 rng(20240601);
    std::exponential_distribution<double> e(1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double w[3] = {e(rng), e(rng), e(rng)};
        const double s = w[0] + w[1] + 2 * w[2];
        xstate::XStateDensityMatrix x;
        x.a_plus = w[0] / s;
        x.a_minus = w[1] / s;
        x.a_zero = w[2] / s;
        x.b1 = std::polar(u(rng) * std::sqrt(x.a_plus * x.a_minus), 2 * pi * u(rng));
        x.b2 = std::polar(u(rng) * x.a_zero, 2 * pi * u(rng));
        worst = std::max(worst, std::abs(xstate::concurrence_wootters(x.dense()) - xstate::concurrence_xstate(x)));
    }
    r.require(worst <= 1e-9, fmt("random X states: max |Wootters - shortcut| = %.2e <= 1e-9", worst));

    double worst_w = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double a = i / 19.0, d = j / 19.0;
            worst_w = std::max(worst_w, std::abs(central::concurrence_werner(a, d) -
                                                 xstate::concurrence_wootters(central::qubit_state(a, d))));
        }
    r.require(worst_w <= 1e-9, fmt("Werner 20x20 grid: max deviation %.2e <= 1e-9", worst_w));

    const double at = central::concurrence_werner(1.0 / 3.0, 1.0);
    const double above = central::concurrence_werner(1.0 / 3.0 + 1e-9, 1.0);
    r.require(at == 0.0 && above > 0.0, fmtn("threshold: C(a=1/3) = %g, C(a=1/3+1e-9) = %.3e", at, above));
    return r;
}

central::CentralConfig fig_config(double delta) {
    central::CentralConfig c;
    c.n_spins = 500;
    c.delta = delta;
    c.tau = 250;
    c.gamma = 1;
    c.a = 0.9;
    c.h_start = 10;
    return c;
}

Report decoherence() {
    Report r;
    {
        auto c = fig_config(0.0);
        c.n_spins = 100;
        c.t_grid = {-100, 0, 251, 500, 700};
        const auto s = central::decoherence_series(c, kWorkers);
        double worst = 0;
        for (double d : s.d)
            worst = std::max(worst, std::abs(d - 1.0));
        r.require(s.complete && s.d.size() == c.t_grid.size() && worst < 1e-8,
                  fmt("delta=0 (N=100): max |D - 1| = %.2e", worst));
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto c = fig_config(1e-4);
        c.t_grid = {251.0};
        const auto tr = central::trace_run(c, kWorkers);
        const double dt = seconds_since(t0);
        const double d = tr.rows.empty() ? std::nan("") : tr.rows[0].decoherence;
        const double cnc = tr.rows.empty() ? std::nan("") : tr.rows[0].concurrence;
        r.require(tr.complete && std::abs(d - 0.7025) <= 0.05, fmt("N=500, delta=1e-4: D(251) = %.5f, target 0.7025 +- 0.05", d));
        r.require(std::abs(cnc - 0.704) <= 0.03, fmt("Cnc(a=0.9) = %.5f, target 0.704 +- 0.03", cnc));
        r.info(fmt("weak-coupling estimate D(251) = %.5f", central::weak_coupling_D(251.0, c)));
        r.info(fmt("Cnc evaluated at D = 0.7025 would be %.5f", central::concurrence_werner(0.9, 0.7025)));
        r.require(dt < 300.0, fmt("runtime %.1f s < 300 s", dt));
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto c = fig_config(0.01);
        for (int i = 0; i <= 800; ++i)
            c.t_grid.push_back(i);
        const auto s = central::decoherence_series(c, kWorkers);
        const double dt = seconds_since(t0);
        // local maxima inside |h| < 0.9 and the range beyond h = -1.05
        double min_peak_inside = 1.0, max_beyond = 0.0, min_beyond = 1.0;
        int peaks_inside = 0;
        for (std::size_t i = 1; i + 1 < s.d.size(); ++i) {
            const double h = c.field(c.t_grid[i]);
            if (std::abs(h) < 0.9 && s.d[i] >= s.d[i - 1] && s.d[i] > s.d[i + 1]) {
                ++peaks_inside;
                min_peak_inside = std::min(min_peak_inside, s.d[i]);
            }
        }
        for (std::size_t i = 0; i < s.d.size(); ++i)
            if (c.field(c.t_grid[i]) < -1.05) {
                max_beyond = std::max(max_beyond, s.d[i]);
                min_beyond = std::min(min_beyond, s.d[i]);
            }
        r.require(s.complete && peaks_inside >= 3 && min_peak_inside >= 0.85,
                  fmtn("delta=0.01: %d revivals in |h|<0.9, smallest peak D = %.4f >= 0.85",
                       peaks_inside, min_peak_inside));
        r.require(max_beyond >= 0.05 && max_beyond <= 0.5 && min_beyond < 0.02,
                  fmtn("beyond h=-1.05: D between %.4f and %.4f (partial revivals)", min_beyond, max_beyond));
        r.require(dt < 300.0, fmt("runtime %.1f s < 300 s", dt));
    }
    return r;
}

Report hygiene() {
    Report r;
    auto c = fig_config(1e-4);
    c.t_grid = {251.0};
    const auto s = central::decoherence_series(c, kWorkers);
    r.require(s.complete && s.stats.max_norm_drift < 1e-8,
              fmtn("N=500 run: max norm drift %.2e < 1e-8 (%ld renormalizations, %ld steps)",
                   s.stats.max_norm_drift, s.stats.renormalizations, s.stats.accepted));
    const double exact = std::log(s.d.at(0));
    const double weak = std::log(central::weak_coupling_D(251.0, c));
    const double rel = std::abs(exact - weak) / std::abs(weak);
    r.require(rel <= 0.10, fmtn("ln D exact %.6f vs weak coupling %.6f: relative gap %.3f <= 0.10",
                                exact, weak, rel));

    double worst = 0.0;
    auto frozen = fig_config(0.0);
    frozen.tau = 1e18;
    for (double k : {0.2, 1.1, 2.6, 3.1}) {
        for (double delta : {0.0, 0.4}) {
            frozen.delta = delta;
            const central::ModeState psi0{{0.8, 0.0}, {0.0, -0.6}};
            central::ModePropagator p(k, central::Branch::Minus, frozen, psi0, 0.0);
            const Eigen::Matrix2cd h = central::branch_hamiltonian(k, 0.0, central::Branch::Minus, frozen);
            for (double t : {1.0, 10.0, 40.0}) {
                p.advance_to(t);
                const Eigen::Vector2cd ref = (std::complex<double>(0, -t) * h).exp() * Eigen::Vector2cd(psi0.u, psi0.v);
                worst = std::max({worst, std::abs(p.state().u - ref(0)), std::abs(p.state().v - ref(1))});
            }
        }
    }
    r.require(worst <= 1e-8, fmt("frozen Hamiltonians: max |psi_RK - expm(-iHt) psi| = %.2e <= 1e-8", worst));
    return r;
}

Report determinism() {
    Report r;
    auto run = [](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = cli::run_cli(args, out, err);
        return std::make_pair(code, out.str());
    };
    const std::vector<std::string> tau{"sweep", "--protocol", "ising", "--tau-min", "0.1",
                                       "--tau-max", "1000", "--tau-points", "24", "--n", "4"};
    const std::vector<std::string> j3{"sweep", "--over", "j3", "--tau", "20", "--j3-points", "17"};
    for (const auto& base : {tau, j3}) {
        auto a = base, b = base;
        a.insert(a.end(), {"--workers", "1"});
        b.insert(b.end(), {"--workers", "4"});
        const auto ra = run(a), rb = run(b);
        r.require(ra.first == 0 && rb.first == 0 && ra.second == rb.second && !ra.second.empty(),
                  fmtn("%s sweep: %zu bytes, identical for workers 1 and 4", base[1] == "--over" ? "J3" : "tau",
                       ra.second.size()));
    }
    return r;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Report()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "Kibble-Zurek defect slopes", kibble_zurek},
        {2, "discord and concurrence scaling slopes", discord_scaling},
        {3, "closed-form n=2 equivalence", closed_form},
        {4, "Q(tau) shape for n=2,4,6", figure_four},
        {5, "three-spin J3 dependence", three_spin},
        {6, "Bessel identity for beta_n", bessel},
        {7, "concurrence oracles", concurrence},
        {8, "central-qubit decoherence", decoherence},
        {9, "numerical hygiene", hygiene},
        {10, "sweep determinism", determinism},
    };
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i)
        wanted.push_back(std::atoi(argv[i]));
    if (wanted.empty())
        for (const auto& c : all)
            wanted.push_back(c.id);

    int failures = 0;
    for (int id : wanted) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const Criterion& c) { return c.id == id; });
        if (it == all.end()) {
            std::cerr << "unknown criterion " << id << '\n';
            return 2;
        }
        Report rep;
        try {
            rep = it->run();
        } catch (const std::exception& e) {
            rep.pass = false;
            rep.notes.push_back(std::string("MISS exception: ") + e.what());
        }
        for (const auto& n : rep.notes)
            std::cout << "    " << n << '\n';
        std::cout << "criterion " << id << ": " << (rep.pass ? "PASS" : "FAIL") << "  " << it->title
                  << std::endl;
        failures += !rep.pass;
    }
    return failures == 0 ? 0 : 1;
}
