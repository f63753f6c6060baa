#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlcalib/calibration.hpp"
#include "nlcalib/kernel.hpp"
#include "nlcalib/lattice.hpp"
#include "nlcalib/weights.hpp"

namespace nlcalib {

enum class Construction { Halfspace, Subgraph, Ball, ViscosityTouch, Custom };
enum class Foliation { VerticalTranslation, TwoValued, Explicit, RaisedGraph };

const char* to_string(Construction c);
const char* to_string(Foliation f);

// Polynomial profile u(t) = sum_k coefficients[k] t^k over the abscissa axis.
struct USpec {
    std::vector<double> coefficients;

    double operator()(double t) const {
        double v = 0.0;
        for (size_t k = coefficients.size(); k-- > 0;) v = v * t + coefficients[k];
        return v;
    }
    bool affine() const {
        for (size_t k = 2; k < coefficients.size(); ++k)
            if (coefficients[k] != 0.0) return false;
        return true;
    }
};

struct FieldPair {
    IndicatorField e;  // frozen
    LevelField phi;
};

// E = {center . normal < offset}, phi = offset - center . normal. Axis 1 is
// the vertical axis in dimension 2. A non-axis-aligned normal gets a warning
// appended: lattice reflections no longer pair cells exactly, so zero
// curvature on the interface is not guaranteed.
FieldPair build_halfspace(std::array<double, 2> normal, double offset, const Lattice& lattice,
                          std::vector<std::string>* warnings = nullptr);

// E = {c2 < u(c1)} on a 2D lattice, phi = u(c1) - c2; errors when the graph
// leaves the universe box vertically.
FieldPair build_subgraph(const USpec& u, const Lattice& lattice);

// E = {|c - center| < radius} (cells classified by center), phi = 1 on E and
// -1 outside.
FieldPair build_ball(std::array<double, 2> center, double radius, const Lattice& lattice);

struct TouchCell {
    long cell;
    double level_curvature;  // nmc_level(phi_E, cell)
    double leaf_curvature;   // nmc_set(A_tau, cell) at the cell's own leaf
    bool dominated;          // per-class integer domination held
};

struct ViscosityFamily {
    std::vector<double> t_grid;          // 0, h, ..., t0
    std::vector<IndicatorField> leaves;  // E_t = A_t cup F, frozen; back() is E
    IndicatorField a;                    // the full subgraph of u
    LevelField phi;                      // +inf on F, t0 + u(c1) - c2 on E \ F, -inf outside
    std::vector<TouchCell> touch_cells;  // E \ F cells in id order
    long lastclaim_pairs = 0;
    long lastclaim_violations = 0;
};

// Raises the subgraph A of u by t over the band |c1| < band_radius and glues
// the obstacle F: E_t = A_t cup F. Checks, at cell resolution, the tangency
// preconditions (u(0) = 0, u(h/2) = u(-h/2)), containment A within F, the
// separation condition (raised band cells with rho <= |c1| <= band_radius
// must lie inside F), and that E \ F stays inside the window. For every cell
// x of E \ F it then scans the sign comparison between phi_E differences and
// the cell's own leaf set A_tau, tau = phi_E(x), recording violation counts
// and the per-cell curvature domination.
ViscosityFamily build_viscosity_touch(const USpec& u, double t0, double rho,
                                      double band_radius, const IndicatorField& f,
                                      const WeightTable& table);

struct KernelSpec {
    Kernel::Family family = Kernel::Family::FractionalPower;
    double alpha = 0.5;
    double scale = 1.0;
    double rate = 1.0;
    double radius = 1.0;
    double height = 1.0;
    std::vector<std::pair<double, double>> table;
};

Kernel make_kernel(const KernelSpec& spec, int dimension);

struct LatticeSpec {
    int dimension = 1;
    double spacing = 1.0;
    GridBox universe;
    GridBox window;
    std::vector<std::array<int, 2>> window_list;  // wins over window when nonempty
};

struct ObstacleSpec {
    enum class Type { HalfspaceRows, NotchedSlab, File };
    Type type = Type::HalfspaceRows;
    int slab_top = 0;                // F = {j <= slab_top} away from the notch
    int notch_top = 0;               // F = {j <= notch_top} on notch columns
    std::vector<int> notch_columns;
    std::string path;
};

struct ScenarioConfig {
    std::string name = "scenario";
    uint64_t seed = 0;
    KernelSpec kernel;
    LatticeSpec lattice;
    QuadratureMode mode = QuadratureMode::Midpoint;
    Construction construction = Construction::Halfspace;
    Foliation foliation = Foliation::VerticalTranslation;

    std::array<double, 2> normal{{1.0, 0.0}};
    double offset = 0.0;

    USpec u;  // Subgraph and ViscosityTouch

    std::array<double, 2> center{{0.0, 0.0}};
    double radius = 1.0;

    double t0 = 0.0;
    double rho = 1.0;
    double band_radius = 1.0;
    ObstacleSpec obstacle;

    std::string set_file;    // Custom construction; empty means seeded random fill
    std::string level_file;  // Explicit foliation
};

struct BuiltScenario {
    ScenarioConfig config;
    std::shared_ptr<const Lattice> lattice;
    std::shared_ptr<const Kernel> kernel;
    WeightTable table;
    IndicatorField e;  // frozen
    LevelField phi;
    std::optional<ViscosityFamily> viscosity;
    std::vector<std::string> warnings;
};

ScenarioConfig load_scenario(const std::string& path);
BuiltScenario build_scenario(const ScenarioConfig& config);
IndicatorField build_obstacle(const ObstacleSpec& spec, const Lattice& lattice);

enum class StudyKind { HalfspaceCurvature, IntervalPerimeter, DiskCurvature };

const char* to_string(StudyKind k);

struct StudyConfig {
    StudyKind kind = StudyKind::HalfspaceCurvature;
    KernelSpec kernel;
    QuadratureMode mode = QuadratureMode::Midpoint;
    std::vector<double> spacings;
    double length = 1.0;  // interval study: interval length (multiple of each h)
    double margin = 1.0;  // interval study: box margin on each side
};

struct StudyRow {
    double h;
    double value;      // tail-corrected discrete quantity
    double reference;  // continuum value at the same geometry
    double abs_error;
    double rel_error;
    double observed_order;  // Richardson ratio vs previous row; NaN on the first
};

struct StudyResult {
    std::string name;
    StudyKind kind;
    std::vector<StudyRow> rows;
    bool monotone_error = true;
    std::vector<std::string> notes;
};

// Rebuilds the study geometry at each spacing, evaluates the discrete
// quantity with analytic tail corrections beyond the finite box, and tabulates
// errors against the continuum reference. A non-monotone error column is
// flagged in notes, not fatal.
StudyResult refinement_study(const StudyConfig& config);
StudyConfig load_study(const std::string& path);

}  // namespace nlcalib
