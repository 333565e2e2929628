#pragma once

// Final-state two-spin correlators after a linear quench, for lattice
// separations n = 2, 4, 6, and the resulting correlation measures.

#include "quenchcorr/kernels.hpp"
#include "quenchcorr/xstate.hpp"

namespace quenchcorr::quench {

// Slightly non-positive states from quadrature error are clamped up to this
// size; larger violations are an error.
inline constexpr double kStateClamp = 1e-10;

struct QuenchMeasureRequest {
    kernels::QuenchProtocol protocol;
    int separation = 2; // n ∈ {2, 4, 6}

    void validate() const;
};

// Correlators from a precomputed beta set (must contain beta_0..beta_n).
xstate::CorrelatorSet correlators(const kernels::BetaSet& betas, int n);
xstate::CorrelatorSet correlators(const kernels::QuenchProtocol& protocol, int n);

struct QuenchMeasures {
    kernels::BetaSet betas; // beta_0, beta_2, beta_4, beta_6
    xstate::CorrelatorSet correlators;
    xstate::XStateDensityMatrix state;
    xstate::CorrelationReport report;
};

QuenchMeasures measures(const kernels::BetaSet& betas, int n,
                        xstate::MeasurementScheme scheme = xstate::MeasurementScheme::Optimal);
QuenchMeasures measures(const kernels::QuenchProtocol& protocol, int n,
                        xstate::MeasurementScheme scheme = xstate::MeasurementScheme::Optimal);
QuenchMeasures measures(const QuenchMeasureRequest& request,
                        xstate::MeasurementScheme scheme = xstate::MeasurementScheme::Optimal);

// Closed-form mutual information of the n = 2 state, in bits.
double closed_form_I_n2(double beta0, double beta2);

// Closed-form n = 2 classical correlation with the √(1 + beta2²/4) factors.
// This is the information gained by a σx measurement on B.
double closed_form_C_n2(double beta0, double beta2);

} // namespace quenchcorr::quench
