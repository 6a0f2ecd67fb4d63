#pragma once

// Reference values, tolerances and run settings shared by `mcpope reproduce` and the
// acceptance suite. Bump kTableVersion whenever any entry changes.

#include "mcpope/types.hpp"

#include <array>
#include <cstdint>

namespace mcpope::reference_table {

inline constexpr int kTableVersion = 1;

struct RunSettings {
    Index base_samples;
    int bias_depth;
    int workers;
};

// Three-asset minimum variance over C(r) -----------------------------------------
inline constexpr std::array<double, 3> kTable1Correlations{-0.5, 0.0, 0.5};
inline constexpr std::array<std::array<double, 3>, 3> kTable1Weights{{
    {0.696822, 0.303178, 0.0},
    {0.624376, 0.152847, 0.222777},
    {0.657895, 0.0, 0.342105},
}};
inline constexpr double kTable1WeightTolerance = 0.01;
inline constexpr double kTable1ObjectiveRelativeTolerance = 0.002;
inline constexpr RunSettings kTable1Run{100000, 5, 4};

// Constrained three-asset case: w1 >= 1/3, w2 + 1.1 w3 >= 1/2, r = -0.5 -----------
inline constexpr double kConstrainedCorrelation = -0.5;
inline constexpr double kConstrainedObjective = 32.2379;
inline constexpr double kConstrainedRelativeTolerance = 1e-3;
inline constexpr RunSettings kConstrainedRun{100000, 5, 1};
inline constexpr Index kConstrainedGridResolution = 1000;
inline constexpr int kConstrainedGridPolish = 40;

// Six-asset edge optimum ------------------------------------------------------------
inline constexpr std::array<double, 6> kPathologicalWeights{0.883333, 0, 0.11667, 0, 0, 0};
inline constexpr double kPathologicalWeightTolerance = 0.005;
inline constexpr RunSettings kPathologicalRun{20000, 5, 8};

// Three-asset CVaR problem ----------------------------------------------------------
inline constexpr std::array<double, 3> kRuMinVarianceWeights{0.452013, 0.115573, 0.432414};
inline constexpr double kRuMinVariance = 0.00378529;
inline constexpr double kRuMinVarianceWeightTolerance = 5e-4;
inline constexpr double kRuMinVarianceTolerance = 1e-6;

struct CvarCase {
    double tail;
    double cvar;
    double tolerance;
    Index scenario_count;
};
inline constexpr std::array<CvarCase, 3> kRuCvarCases{{
    {0.1, 0.096975, 0.002, 100000},
    {0.05, 0.115908, 0.002, 100000},
    {0.01, 0.152977, 0.003, 200000},
}};
inline constexpr double kRuCvarWeightTolerance = 0.03;
inline constexpr RunSettings kRuCvarRun{20000, 5, 8};

// Simplified three-index Omega model ------------------------------------------------
struct OmegaCase {
    double threshold;
    double omega;
    std::array<double, 3> weights;
};
inline constexpr std::array<OmegaCase, 4> kAdmnOmegaCases{{
    {-4.0, 662.7, {0.22, 0.26, 0.52}},
    {-3.0, 180.0, {0.20, 0.25, 0.55}},
    {-2.0, 37.4, {0.19, 0.26, 0.55}},
    {-1.0, 7.9, {0.19, 0.23, 0.58}},
}};
inline constexpr double kAdmnWeightTolerance = 0.06;
inline constexpr double kAdmnOmegaRelativeTolerance = 0.15;
inline constexpr double kAdmnHighThreshold = 1.0;
inline constexpr double kAdmnConcentration = 0.99;
inline constexpr Index kAdmnScenarioCount = 50000;
inline constexpr RunSettings kAdmnRun{2000, 5, 8};

// Marginal t VaR, assets A, B, C at u = 0.05 and 0.01.
inline constexpr std::array<double, 2> kMarginalVarTails{0.05, 0.01};
inline constexpr std::array<std::array<double, 3>, 2> kMarginalVar{{
    {-3.5693, -3.13456, -2.65279},
    {-5.59593, -4.9153, -4.2334},
}};
inline constexpr double kMarginalVarTolerance = 5e-4;

} // namespace mcpope::reference_table
