#pragma once

// Parameter sweeps of the quench measures, log-log power-law fits and peak
// location on the resulting curves.

#include "quenchcorr/kernels.hpp"
#include "quenchcorr/xstate.hpp"

#include <span>
#include <string>
#include <vector>

namespace quenchcorr::scaling {

enum class Abscissa { Tau, J3 };

struct SweepRow {
    double x = 0.0; // tau or J3, depending on the table
    int n = 2;
    double beta[4] = {0.0, 0.0, 0.0, 0.0}; // beta_0, beta_2, beta_4, beta_6
    double mutual_information = 0.0;
    double classical_correlation = 0.0;
    double discord = 0.0;
    double concurrence = 0.0;
    bool valid = false;
    std::string error; // set when !valid
};

struct SweepTable {
    Abscissa over = Abscissa::Tau;
    kernels::QuenchProtocol protocol; // tau (J3 sweep) or j3/gamma (tau sweep) held fixed
    int n = 2;
    std::vector<SweepRow> rows; // grid order

    bool all_valid() const;
};

enum class Column { MutualInformation, Classical, Discord, Concurrence, Beta0 };

std::string to_string(Column c);
Column parse_column(const std::string& name); // "I", "C", "Q", "Cnc", "beta0"
double value(const SweepRow& row, Column c);

// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

// One row per tau, computed concurrently and stored in grid order. Row
// failures are recorded and the sweep continues.
SweepTable sweep_tau(const kernels::QuenchProtocol& protocol, int n, std::span<const double> taus,
                     unsigned workers = 1,
                     xstate::MeasurementScheme scheme = xstate::MeasurementScheme::Optimal);

// Three-spin quench at fixed tau over a sorted J3 grid.
SweepTable sweep_j3(double tau, int n, std::span<const double> j3s, unsigned workers = 1,
                    xstate::MeasurementScheme scheme = xstate::MeasurementScheme::Optimal);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0; // of ln y against ln x
    double r_squared = 0.0;
    double window_min = 0.0;
    double window_max = 0.0;
    int n_points = 0;
};

// OLS of ln y on ln x over the points with window_min <= x <= window_max.
// Needs at least 5 points; non-positive y in the window throw DomainError
// listing the offending row indices.
ScalingFit fit_loglog(std::span<const double> x, std::span<const double> y, double window_min,
                      double window_max);
// Same on a sweep column. Invalid rows in the window are an error too.
ScalingFit fit_loglog(const SweepTable& table, Column column, double window_min,
                      double window_max);

struct Peak {
    double location = 0.0;
    double height = 0.0;
    std::size_t index = 0; // argmax sample
};

// Maximum of y(x) refined by a parabola through the argmax and its two
// neighbours, in ln x when log_x is set. An argmax at either end is returned
// unrefined.
Peak locate_peak(std::span<const double> x, std::span<const double> y, bool log_x);

// True when y rises to a single maximum and then falls. Steps smaller than
// rel_tol * max|y| are ignored.
bool is_unimodal(std::span<const double> y, double rel_tol = 1e-9);

} // namespace quenchcorr::scaling
