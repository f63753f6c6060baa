#include "nlcalib/calibration.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlcalib {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_frozen(const IndicatorField& f, const char* who) {
    if (!f.frozen())
        throw std::invalid_argument(std::string(who) + " requires a frozen exterior");
}

double neumaier_add(double& sum, double comp, double term) {
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
        comp += (sum - t) + term;
    else
        comp += (term - t) + sum;
    sum = t;
    return comp;
}

}  // namespace

const char* to_string(FoliationStatus status) {
    switch (status) {
        case FoliationStatus::TwoSided: return "two_sided";
        case FoliationStatus::OneSidedInside: return "one_sided_inside";
        case FoliationStatus::OneSidedOutside: return "one_sided_outside";
        case FoliationStatus::Fail: return "fail";
    }
    return "fail";
}

double calibration_pairform(const IndicatorField& f, const LevelField& phi,
                            const WeightTable& table) {
    require_frozen(f, "calibration_pairform");
    const Lattice& lat = table.lattice();
    ClassAccumulator acc(table);
    for (long x : lat.window_cells()) {
        const double px = phi.get(x);
        const int fx = f.get(x) ? 1 : 0;
        for (long y = 0; y < lat.cell_count(); ++y) {
            if (y == x) continue;
            const int term = sign_diff(px, phi.get(y)) * (fx - (f.get(y) ? 1 : 0));
            if (term == 0) continue;
            acc.add(table.class_id(lat.displacement(x, y)),
                    lat.in_window(y) ? term : 2 * term);
        }
    }
    return 0.5 * acc.dot();
}

CurvatureForm::CurvatureForm(const LevelField& phi, const WeightTable& table)
    : phi_(&phi), table_(&table) {
    const Lattice& lat = table.lattice();

    const auto& window = lat.window_cells();
    window_nmc_.assign(window.size(), 0.0);
    window_nmc_valid_.assign(window.size(), 0);
    for (size_t j = 0; j < window.size(); ++j) {
        if (std::isinf(phi.get(window[j]))) continue;
        window_nmc_[j] = nmc_level(phi, window[j], table) * lat.cell_volume();
        window_nmc_valid_[j] = 1;
    }

    ClassAccumulator acc(table);
    for (long x : lat.exterior_cells()) {
        if (!(phi.get(x) > 0.0)) continue;
        const double px = phi.get(x);
        for (long y : window) {
            const int s = sign_diff(px, phi.get(y));
            if (s != 0) acc.add(table.class_id(lat.displacement(x, y)), s);
        }
    }
    boundary_ = acc.dot();
}

double CurvatureForm::leaf_increment(long cell) const {
    const auto& window = table_->lattice().window_cells();
    for (size_t j = 0; j < window.size(); ++j)
        if (window[j] == cell) {
            if (!window_nmc_valid_[j])
                throw std::domain_error(
                    "level curvature needs a finite level value at the base cell");
            return window_nmc_[j];
        }
    throw std::invalid_argument("leaf increment queried outside the window");
}

double CurvatureForm::evaluate(const IndicatorField& f) const {
    require_frozen(f, "calibration_curvform");
    const Lattice& lat = table_->lattice();
    for (long x : lat.exterior_cells())
        if (f.get(x) != (phi_->get(x) > 0.0))
            throw std::invalid_argument(
                "competitor disagrees with the foliation outside the window");

    const auto& window = lat.window_cells();
    double sum = 0.0, comp = 0.0;
    for (size_t j = 0; j < window.size(); ++j) {
        if (!f.get(window[j])) continue;
        if (!window_nmc_valid_[j])
            throw std::domain_error(
                "level curvature needs a finite level value at the base cell");
        comp = neumaier_add(sum, comp, window_nmc_[j]);
    }
    comp = neumaier_add(sum, comp, boundary_);
    return sum + comp;
}

double calibration_curvform(const IndicatorField& f, const LevelField& phi,
                            const WeightTable& table) {
    return CurvatureForm(phi, table).evaluate(f);
}

FoliationCertificate certify(const IndicatorField& e, const LevelField& phi,
                             const WeightTable& table, double sign_tolerance) {
    const Lattice& lat = table.lattice();
    std::vector<long> mismatched;
    for (long id = 0; id < lat.cell_count(); ++id)
        if (e.get(id) != (phi.get(id) > 0.0)) mismatched.push_back(id);
    if (!mismatched.empty()) {
        std::string msg = "set disagrees with {phi > 0} at cells";
        for (size_t k = 0; k < mismatched.size() && k < 8; ++k)
            msg += " " + std::to_string(mismatched[k]);
        if (mismatched.size() > 8) msg += " ...";
        msg += " (" + std::to_string(mismatched.size()) + " total)";
        throw std::invalid_argument(msg);
    }

    FoliationCertificate cert;
    cert.sign_tolerance = sign_tolerance;
    cert.curvature_bound = -kInf;
    cert.null_lagrangian = true;
    bool inside_ok = true, outside_ok = true;
    const std::vector<double> schedule = default_eps_schedule(lat.spacing());

    for (long x : lat.window_cells()) {
        if (phi.get(x) == 0.0) ++cert.zero_level_measure;
        const double curvature = nmc_level(phi, x, table);
        cert.window_curvatures.emplace_back(x, curvature);
        PrincipalValueResult pv = nmc_principal_value(phi, x, table, schedule);
        for (const auto& [eps, value] : pv.values)
            cert.curvature_bound = std::max(cert.curvature_bound, value);
        cert.curvature_bound = std::max(cert.curvature_bound, curvature);

        if (std::abs(curvature) > sign_tolerance) cert.null_lagrangian = false;
        if (e.get(x)) {
            if (curvature > sign_tolerance) {
                inside_ok = false;
                cert.violations.push_back({x, curvature, -1});
            }
        } else {
            if (curvature < -sign_tolerance) {
                outside_ok = false;
                cert.violations.push_back({x, curvature, 1});
            }
        }
    }
    if (lat.window_cells().empty()) cert.curvature_bound = 0.0;

    cert.status = inside_ok && outside_ok ? FoliationStatus::TwoSided
                : inside_ok               ? FoliationStatus::OneSidedInside
                : outside_ok              ? FoliationStatus::OneSidedOutside
                                          : FoliationStatus::Fail;
    return cert;
}

UniquenessReport check_uniqueness_hypotheses(const IndicatorField& e, const LevelField& phi,
                                             const WeightTable& table) {
    const FoliationCertificate cert = certify(e, phi, table);
    if (cert.status != FoliationStatus::TwoSided)
        throw std::logic_error("uniqueness hypotheses apply to two-sided certificates only");

    UniquenessReport report;
    report.strictly_positive_weights = table.min_weight() > 0.0;
    report.no_zero_level_window_cells = cert.zero_level_measure == 0;
    bool has_in = false, has_out = false;
    for (long x : table.lattice().exterior_cells()) (e.get(x) ? has_in : has_out) = true;
    report.both_phases_outside_window = has_in && has_out;
    return report;
}

double one_sided_deficit(const IndicatorField& e, const IndicatorField& f,
                         const LevelField& phi, const WeightTable& table) {
    require_frozen(e, "one_sided_deficit");
    require_frozen(f, "one_sided_deficit");
    const Lattice& lat = table.lattice();
    bool proper = false;
    for (long id = 0; id < lat.cell_count(); ++id) {
        if (f.get(id) && !e.get(id))
            throw std::invalid_argument("one-sided deficit needs F contained in E");
        if (!lat.in_window(id) && f.get(id) != e.get(id))
            throw std::invalid_argument("one-sided deficit needs a shared exterior");
        if (f.get(id) != e.get(id)) proper = true;
    }

    const double deficit = perimeter(f, table) - perimeter(e, table);

    bool adapted = true;
    for (long id = 0; id < lat.cell_count() && adapted; ++id)
        adapted = e.get(id) == (phi.get(id) > 0.0);
    if (adapted && proper) {
        bool strict_inside = true;
        for (long x : lat.window_cells())
            if (e.get(x) && !(nmc_level(phi, x, table) < 0.0)) strict_inside = false;
        if (strict_inside && !(deficit > 0.0))
            throw std::logic_error("strict subsolution produced a nonpositive deficit");
    }
    return deficit;
}

OrderedIdentity ordered_identity(const IndicatorField& f, const IndicatorField& e,
                                 const LevelField& phi_interior, const WeightTable& table) {
    require_frozen(e, "ordered_identity");
    require_frozen(f, "ordered_identity");
    const Lattice& lat = table.lattice();
    LevelField phi_e(lat, 0.0);
    std::vector<long> gap;
    for (long id = 0; id < lat.cell_count(); ++id) {
        const bool in_f = f.get(id), in_e = e.get(id);
        if (in_f && !in_e)
            throw std::invalid_argument("ordered identity needs F contained in E");
        if (!lat.in_window(id) && in_f != in_e)
            throw std::invalid_argument("ordered identity needs a shared exterior");
        if (in_f) {
            phi_e.set(id, kInf);
        } else if (in_e) {
            const double v = phi_interior.get(id);
            if (std::isinf(v))
                throw std::invalid_argument("interior level values must be finite on E \\ F");
            phi_e.set(id, v);
            gap.push_back(id);
        } else {
            phi_e.set(id, -kInf);
        }
    }

    OrderedIdentity out;
    out.lhs = perimeter(e, table) - perimeter(f, table);
    double sum = 0.0, comp = 0.0;
    for (long x : gap)
        comp = neumaier_add(sum, comp, nmc_level(phi_e, x, table) * lat.cell_volume());
    out.rhs = sum + comp;
    return out;
}

}  // namespace nlcalib
