#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nlcalib/lattice.hpp"
#include "nlcalib/weights.hpp"

namespace nlcalib {

// Interaction energy L(A, B) = sum over pairs of W[a - b]; A and B must be
// disjoint. Cost is O(|A| |B|).
double interaction(const std::vector<long>& a_cells, const std::vector<long>& b_cells,
                   const WeightTable& table);
double interaction(const IndicatorField& a, const IndicatorField& b, const WeightTable& table);

// Window-localized nonlocal perimeter
//   L(E cap W, E^c cap W) + L(E cap W, E^c \ W) + L(E^c cap W, E \ W)
// where W is the lattice window. Requires a frozen exterior.
double perimeter(const IndicatorField& e, const WeightTable& table);

// Same quantity as half the |1_E(x) - 1_E(y)|-weighted sum over ordered cell
// pairs that are not both exterior; kept as an independent evaluation route.
double perimeter_pairform(const IndicatorField& e, const WeightTable& table);

// Nonlocal mean curvature density at cell x, eps-truncated:
//   sum_{y != x, |c(y)-c(x)| >= eps} (1_{E^c}(y) - 1_E(y)) W[x-y] / h^n.
double nmc_set(const IndicatorField& e, long x, const WeightTable& table, double eps = 0.0);

// Level-set curvature density using sign(phi(x) - phi(y)); phi(x) must be
// finite (throws std::domain_error otherwise).
double nmc_level(const LevelField& phi, long x, const WeightTable& table, double eps = 0.0);

// Geometric truncation schedule h * 2^(6-k), k = 0..6.
std::vector<double> default_eps_schedule(double h);

struct PrincipalValueResult {
    std::vector<std::pair<double, double>> values;  // (eps, value), eps decreasing
    std::optional<double> extrapolated;             // empty when divergent
    bool converged = false;
    // max over the trailing half of the schedule values
    double limsup = 0.0;
};

// Evaluates the truncated curvature along a decreasing eps schedule (min
// entry >= h); converged means the last two refinements differ by at most
// pv_tolerance (absolute).
PrincipalValueResult nmc_principal_value(const IndicatorField& e, long x,
                                         const WeightTable& table,
                                         const std::vector<double>& schedule,
                                         double pv_tolerance = 1e-6);
PrincipalValueResult nmc_principal_value(const LevelField& phi, long x,
                                         const WeightTable& table,
                                         const std::vector<double>& schedule,
                                         double pv_tolerance = 1e-6);

}  // namespace nlcalib
