#pragma once

#include <string>
#include <vector>

#include "nlcalib/functionals.hpp"

namespace nlcalib {

enum class FoliationStatus { TwoSided, OneSidedInside, OneSidedOutside, Fail };
const char* to_string(FoliationStatus status);

struct SignViolation {
    long cell;
    double curvature;
    int required_sign;  // -1: curvature had to be <= tol, +1: had to be >= -tol
};

struct FoliationCertificate {
    FoliationStatus status = FoliationStatus::Fail;
    std::vector<SignViolation> violations;
    // Largest truncated level curvature over window cells and the default
    // eps schedule (the discrete uniform upper bound).
    double curvature_bound = 0.0;
    long zero_level_measure = 0;  // window cells with phi exactly 0
    bool null_lagrangian = false; // all window curvatures within tolerance of 0
    double sign_tolerance = 0.0;
    std::vector<std::pair<long, double>> window_curvatures;
};

// Calibration functional in pair form: half the sum over ordered cell pairs
// not both exterior of sign(phi(x) - phi(y)) (1_F(x) - 1_F(y)) W[x-y].
double calibration_pairform(const IndicatorField& f, const LevelField& phi,
                            const WeightTable& table);

// Curvature form of the same functional,
//   sum_{x in F cap W} nmc_level(phi, x) h^n  +  boundary term,
// with the competitor-independent boundary term
//   sum_{x in E \ W, phi(x) > 0} sum_{y in W} sign(phi(x) - phi(y)) W[x-y]
// cached at construction. Competitors must agree with {phi > 0} outside the
// window. Evaluating a competitor containing a window cell with infinite phi
// propagates the level-curvature precondition error.
class CurvatureForm {
  public:
    CurvatureForm(const LevelField& phi, const WeightTable& table);

    double evaluate(const IndicatorField& f) const;
    double boundary_term() const { return boundary_; }
    // nmc_level(phi, cell) * h^n for a window cell
    double leaf_increment(long cell) const;

  private:
    const LevelField* phi_;
    const WeightTable* table_;
    double boundary_ = 0.0;
    std::vector<double> window_nmc_;  // indexed like lattice().window_cells()
    std::vector<uint8_t> window_nmc_valid_;
};

double calibration_curvform(const IndicatorField& f, const LevelField& phi,
                            const WeightTable& table);

// Checks the foliation sign conditions cellwise. Requires E = {phi > 0} on
// every universe cell (throws std::invalid_argument listing mismatched
// cells). A TwoSided certificate carries the exact discrete guarantee that E
// minimizes the perimeter among all competitors with the same exterior.
FoliationCertificate certify(const IndicatorField& e, const LevelField& phi,
                             const WeightTable& table, double sign_tolerance = 0.0);

struct UniquenessReport {
    bool strictly_positive_weights = false;
    bool no_zero_level_window_cells = false;
    bool both_phases_outside_window = false;
    bool satisfied() const {
        return strictly_positive_weights && no_zero_level_window_cells &&
               both_phases_outside_window;
    }
};

// Hypotheses under which the two-sided minimizer is unique; requires a
// TwoSided certificate (throws std::logic_error otherwise).
UniquenessReport check_uniqueness_hypotheses(const IndicatorField& e, const LevelField& phi,
                                             const WeightTable& table);

// perimeter(F) - perimeter(E) for F a subset of E with the same exterior.
// When phi is adapted to E with strictly negative curvatures on E cap W and
// F != E, a nonpositive deficit indicates an internal error and throws.
double one_sided_deficit(const IndicatorField& e, const IndicatorField& f,
                         const LevelField& phi, const WeightTable& table);

struct OrderedIdentity {
    double lhs;  // perimeter(E) - perimeter(F)
    double rhs;  // sum over E \ F of nmc_level(phi_E, x) h^n
};

// For F a subset of E sharing its exterior: assembles phi_E (+infinity on F,
// the given finite interior values on E \ F, -infinity outside E) and
// returns both sides of the exact discrete ordered-set identity.
OrderedIdentity ordered_identity(const IndicatorField& f, const IndicatorField& e,
                                 const LevelField& phi_interior, const WeightTable& table);

}  // namespace nlcalib
