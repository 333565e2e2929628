#include "quenchcorr/cli.hpp"

#include "quenchcorr/central.hpp"
#include "quenchcorr/csv.hpp"
#include "quenchcorr/errors.hpp"
#include "quenchcorr/parallel.hpp"
#include "quenchcorr/quench.hpp"
#include "quenchcorr/scaling.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace quenchcorr::cli {

namespace {

struct ProtocolFlags {
    std::string protocol = "ising";
    double gamma = 1.0;
    double j3 = 0.0;
    int n = 2;
    std::string measurement = "optimal";
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* j3_opt = nullptr;
    CLI::Option* protocol_opt = nullptr;

    void attach(CLI::App* app) {
        protocol_opt = app->add_option("--protocol", protocol, "ising | multicritical | three-spin")
                           ->check(CLI::IsMember({"ising", "multicritical", "three-spin"}));
        gamma_opt = app->add_option("--gamma", gamma, "anisotropy (ising only)");
        j3_opt = app->add_option("--j3", j3, "three-spin coupling (three-spin only)");
        app->add_option("--n", n, "spin separation: 2, 4 or 6")->check(CLI::IsMember({2, 4, 6}));
        app->add_option("--measurement", measurement, "optimal | transverse")
            ->check(CLI::IsMember({"optimal", "transverse"}));
    }

    kernels::QuenchProtocol make(double tau) const {
        const auto kind = kernels::parse_quench_kind(protocol);
        if (gamma_opt->count() && kind != kernels::QuenchKind::Ising)
            throw DomainError("--gamma applies only to --protocol ising");
        if (j3_opt->count() && kind != kernels::QuenchKind::ThreeSpin)
            throw DomainError("--j3 applies only to --protocol three-spin");
        kernels::QuenchProtocol p;
        p.kind = kind;
        p.gamma = gamma;
        p.j3 = j3;
        p.tau = tau;
        if (kind != kernels::QuenchKind::Ising)
            p.gamma = 1.0;
        if (kind != kernels::QuenchKind::ThreeSpin)
            p.j3 = 0.0;
        p.validate();
        return p;
    }

    xstate::MeasurementScheme scheme() const {
        return measurement == "transverse" ? xstate::MeasurementScheme::Transverse
                                           : xstate::MeasurementScheme::Optimal;
    }
};

std::vector<std::string> measure_header(const char* abscissa) {
    std::vector<std::string> h{abscissa};
    if (std::string(abscissa) == "j3")
        h.push_back("tau");
    for (const char* c : {"n", "beta0", "beta2", "beta4", "beta6", "I", "C", "Q", "Cnc"})
        h.emplace_back(c);
    return h;
}

std::vector<std::string> measure_cells(double x, const double* extra, int n, const double beta[4],
                                       double I, double C, double Q, double Cnc) {
    std::vector<std::string> r{csv::format_number(x)};
    if (extra)
        r.push_back(csv::format_number(*extra));
    r.push_back(csv::format_integer(n));
    for (int i = 0; i < 4; ++i)
        r.push_back(csv::format_number(beta[i]));
    for (double v : {I, C, Q, Cnc})
        r.push_back(csv::format_number(v));
    return r;
}

// Writes the buffered output to --output or to `out`.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw DomainError("cannot open output file '" + path + "'");
    f << text;
    if (!f)
        throw NumericalError("failed writing output file '" + path + "'");
}

bool flag_present(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0)
            return true;
    return false;
}

// Splices config-file values in as flags unless the flag is already given.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw DomainError("--config needs a file name");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty())
        return rest;
    for (const auto& [key, val] : read_config(path)) {
        if (flag_present(rest, key))
            continue;
        rest.push_back("--" + key);
        rest.push_back(val);
    }
    return rest;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw DomainError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected key=value";
            throw DomainError(msg.str());
        }
        std::string key = trim(line.substr(0, eq));
        while (!key.empty() && key.front() == '-')
            key.erase(key.begin());
        if (key.empty() || key == "config") {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": invalid key";
            throw DomainError(msg.str());
        }
        kv.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return kv;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Correlations after quenches of transverse-field spin chains", "quenchcorr"};
    app.require_subcommand(1);
    app.add_option("--config", "flat key=value file; command-line flags take precedence");

    // measures
    auto* measures = app.add_subcommand("measures", "I, C, Q and concurrence for one quench");
    ProtocolFlags m_flags;
    double m_tau = 1.0;
    std::string m_output;
    m_flags.attach(measures);
    measures->add_option("--tau", m_tau, "inverse quench rate")->required();
    measures->add_option("--output", m_output, "CSV file (default: stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "measures over a tau or J3 grid");
    ProtocolFlags s_flags;
    std::string s_over = "tau";
    double s_tau = 1.0;
    double tau_min = 0.1, tau_max = 1000.0;
    int tau_points = 40;
    double j3_min = 0.0, j3_max = 1.0;
    int j3_points = 41;
    unsigned s_workers = default_workers();
    std::string s_output;
    s_flags.attach(sweep);
    sweep->add_option("--over", s_over, "tau | j3")->check(CLI::IsMember({"tau", "j3"}));
    auto* s_tau_opt = sweep->add_option("--tau", s_tau, "fixed tau for --over j3");
    sweep->add_option("--tau-min", tau_min);
    sweep->add_option("--tau-max", tau_max);
    sweep->add_option("--tau-points", tau_points, "log-spaced tau points");
    sweep->add_option("--j3-min", j3_min);
    sweep->add_option("--j3-max", j3_max);
    sweep->add_option("--j3-points", j3_points, "evenly spaced J3 points");
    sweep->add_option("--workers", s_workers)->check(CLI::PositiveNumber);
    sweep->add_option("--output", s_output, "CSV file (default: stdout)");

    // fit
    auto* fit = app.add_subcommand("fit", "log-log power-law fit of a sweep column");
    std::string f_input, f_column = "Q", f_x, f_output;
    double w_min = 1e2, w_max = 1e4;
    fit->add_option("--input", f_input, "sweep CSV")->required();
    fit->add_option("--column", f_column, "I | C | Q | Cnc | beta0");
    fit->add_option("--x", f_x, "abscissa column (default: first column)");
    fit->add_option("--window-min", w_min);
    fit->add_option("--window-max", w_max);
    fit->add_option("--output", f_output, "CSV file (default: stdout)");

    // decohere
    auto* decohere = app.add_subcommand("decohere", "central-qubit decoherence trace");
    central::CentralConfig cc;
    double t0 = 0.0, t1 = 500.0, dt = 1.0;
    unsigned d_workers = default_workers();
    std::string d_output;
    decohere->add_option("--N", cc.n_spins, "environment spins (even)");
    decohere->add_option("--delta", cc.delta, "qubit-environment coupling");
    decohere->add_option("--tau", cc.tau, "inverse quench rate");
    decohere->add_option("--gamma", cc.gamma, "environment anisotropy");
    decohere->add_option("--a", cc.a, "Werner weight");
    decohere->add_option("--h-start", cc.h_start, "initial field");
    decohere->add_option("--t0", t0);
    decohere->add_option("--t1", t1);
    decohere->add_option("--dt", dt);
    decohere->add_option("--workers", d_workers)->check(CLI::PositiveNumber);
    decohere->add_option("--output", d_output, "CSV file (default: stdout)");

    try {
        auto args = apply_config(raw_args);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    }

    try {
        std::ostringstream buf;
        int status = kOk;

        if (*measures) {
            const auto p = m_flags.make(m_tau);
            const auto m = quench::measures(p, m_flags.n, m_flags.scheme());
            double beta[4];
            for (int i = 0; i < 4; ++i)
                beta[i] = m.betas[2 * i];
            csv::write_row(buf, measure_header("tau"));
            csv::write_row(buf, measure_cells(m_tau, nullptr, m_flags.n, beta,
                                              m.report.mutual_information,
                                              m.report.classical_correlation, m.report.discord,
                                              m.report.concurrence));
            emit(buf.str(), m_output, out);
        } else if (*sweep) {
            scaling::SweepTable table;
            if (s_over == "tau") {
                if (s_tau_opt->count())
                    throw DomainError("--tau is fixed by the grid when sweeping over tau");
                const auto p = s_flags.make(tau_min);
                const auto grid = scaling::log_grid(tau_min, tau_max, tau_points);
                table = scaling::sweep_tau(p, s_flags.n, grid, s_workers, s_flags.scheme());
            } else {
                if (s_flags.protocol_opt->count() && s_flags.protocol != "three-spin")
                    throw DomainError("--over j3 needs --protocol three-spin");
                if (s_flags.gamma_opt->count() || s_flags.j3_opt->count())
                    throw DomainError("--gamma/--j3 do not apply to a J3 sweep");
                if (j3_points < 1 || !(j3_max >= j3_min) || (j3_points > 1 && j3_max == j3_min))
                    throw DomainError("J3 grid needs j3-max > j3-min and j3-points >= 1");
                std::vector<double> grid(static_cast<std::size_t>(j3_points));
                for (int i = 0; i < j3_points; ++i)
                    grid[static_cast<std::size_t>(i)] =
                        j3_points == 1 ? j3_min
                                       : j3_min + (j3_max - j3_min) * i / (j3_points - 1);
                table = scaling::sweep_j3(s_tau, s_flags.n, grid, s_workers, s_flags.scheme());
            }
            const bool j3 = table.over == scaling::Abscissa::J3;
            csv::write_row(buf, measure_header(j3 ? "j3" : "tau"));
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                const auto& r = table.rows[i];
                const double nan = std::nan("");
                const double nan4[4] = {nan, nan, nan, nan};
                if (r.valid) {
                    csv::write_row(buf, measure_cells(r.x, j3 ? &s_tau : nullptr, r.n, r.beta,
                                                      r.mutual_information,
                                                      r.classical_correlation, r.discord,
                                                      r.concurrence));
                } else {
                    csv::write_row(buf, measure_cells(r.x, j3 ? &s_tau : nullptr, r.n, nan4, nan,
                                                      nan, nan, nan));
                    err << "row " << i << " (" << (j3 ? "j3=" : "tau=") << r.x
                        << ") failed: " << r.error << '\n';
                    status = kNumerical;
                }
            }
            emit(buf.str(), s_output, out);
        } else if (*fit) {
            std::ifstream in(f_input);
            if (!in)
                throw DomainError("cannot open input file '" + f_input + "'");
            const auto table = csv::read(in);
            const std::size_t xc = f_x.empty() ? 0 : table.column(f_x);
            const std::size_t yc = table.column(f_column);
            std::vector<double> x, y;
            for (const auto& row : table.rows) {
                x.push_back(row[xc]);
                y.push_back(row[yc]);
            }
            const auto r = scaling::fit_loglog(x, y, w_min, w_max);
            csv::write_row(buf, {"column", "slope", "intercept", "r2", "window_min",
                                 "window_max", "points"});
            csv::write_row(buf, {f_column, csv::format_number(r.slope),
                                 csv::format_number(r.intercept),
                                 csv::format_number(r.r_squared),
                                 csv::format_number(r.window_min),
                                 csv::format_number(r.window_max),
                                 csv::format_integer(r.n_points)});
            emit(buf.str(), f_output, out);
        } else if (*decohere) {
            if (!(dt > 0.0) || !(t1 >= t0) || !std::isfinite(t1))
                throw DomainError("time grid needs dt > 0 and t1 >= t0");
            const auto steps = static_cast<long>(std::floor((t1 - t0) / dt + 1e-9));
            if (steps > 10'000'000)
                throw DomainError("time grid too large");
            cc.t_grid.clear();
            for (long i = 0; i <= steps; ++i)
                cc.t_grid.push_back(t0 + static_cast<double>(i) * dt);
            const auto trace = central::trace_run(cc, d_workers);
            csv::write_row(buf, {"t", "h", "D", "Q", "Cnc"});
            for (const auto& r : trace.rows)
                csv::write_row(buf, {csv::format_number(r.t), csv::format_number(r.h),
                                     csv::format_number(r.decoherence),
                                     csv::format_number(r.discord),
                                     csv::format_number(r.concurrence)});
            err << "integrator: accepted=" << trace.stats.accepted
                << " rejected=" << trace.stats.rejected
                << " renormalizations=" << trace.stats.renormalizations
                << " max_norm_drift=" << trace.stats.max_norm_drift << '\n';
            if (!trace.complete) {
                err << "error: " << trace.diagnostics << '\n';
                status = kNumerical;
            }
            emit(buf.str(), d_output, out);
        }
        return status;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

} // namespace quenchcorr::cli
