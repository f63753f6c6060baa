#pragma once

#include <cstdint>
#include <vector>

#include "nlcalib/calibration.hpp"
#include "nlcalib/functionals.hpp"

namespace nlcalib {

struct EnumerationResult {
    double min_value = 0.0;
    // Window bit patterns attaining min_value within tie_tolerance, in
    // window_cells() bit order, ascending. Capped at 65536 (truncated set).
    std::vector<uint32_t> minimizers;
    long configurations_searched = 0;
    double wall_seconds = 0.0;
    bool truncated = false;
};

struct OracleOptions {
    int budget = 20;  // max free bits; values above the hard cap of 24 are clamped
    double tie_tolerance = 1e-9;
    int workers = 1;
    // Recompute the energy from scratch (and resynchronize the incremental
    // state) every this many configurations; 0 disables.
    long spot_check_interval = 1L << 10;
    double spot_check_rel_tol = 1e-10;
};

// Exact global minimum of the perimeter over all 2^|window| competitors with
// the given exterior. Walks configurations in Gray-code order keeping
// per-cell flip sensitivities, so each step costs O(window); candidate
// minimizers are re-evaluated from scratch before reporting.
EnumerationResult enumerate_minimizers(const IndicatorField& exterior, const WeightTable& table,
                                       const OracleOptions& options = {});

// Same search restricted to competitors that agree with `base` outside
// free_cells (every free cell must be a window cell). Reported bit patterns
// are full window patterns.
EnumerationResult enumerate_minimizers_restricted(const IndicatorField& base,
                                                  const std::vector<long>& free_cells,
                                                  const WeightTable& table,
                                                  const OracleOptions& options = {});

struct StationarityReport {
    struct CellCheck {
        long cell;
        bool inside;
        double curvature;  // nmc_set at the cell
        bool ok;
    };
    std::vector<CellCheck> cells;
    std::vector<long> violations;
    double sign_tolerance = 0.0;
    bool stationary() const { return violations.empty(); }
};

// Discrete first-variation check: adding a window cell x to F changes the
// perimeter by nmc_set(F,x) h^n and removing it by the negative, so a
// minimizer needs nmc_set >= 0 outside F and <= 0 inside F at every window
// cell.
StationarityReport single_flip_stationarity(const IndicatorField& f, const WeightTable& table,
                                            double sign_tolerance = 0.0);

struct OracleCrossCheck {
    FoliationStatus status = FoliationStatus::Fail;
    EnumerationResult enumeration;
    bool restricted = false;  // enumeration ran over subsets (inside) or supersets (outside)
    bool e_attains_minimum = false;
    bool uniqueness_hypotheses = false;
    bool unique_minimizer = false;
    bool passed = false;
};

// Confronts a certificate with the enumeration ground truth: TwoSided must
// attain the global minimum (and be the unique minimizer when the
// uniqueness hypotheses hold); one-sided certificates are checked against
// the enumeration restricted to their side.
OracleCrossCheck verify_certificate_against_oracle(const IndicatorField& e,
                                                   const LevelField& phi,
                                                   const WeightTable& table,
                                                   const OracleOptions& options = {});

}  // namespace nlcalib
