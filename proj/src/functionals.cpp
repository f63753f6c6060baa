#include "nlcalib/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlcalib {
namespace {

void require_frozen(const IndicatorField& f, const char* who) {
    if (!f.frozen())
        throw std::invalid_argument(std::string(who) + " requires a frozen exterior");
}

double eps_norm2_floor(double eps, double h) {
    if (eps <= 0.0) return 0.0;
    const double t = eps / h;
    return t * t;
}

}  // namespace

double interaction(const std::vector<long>& a_cells, const std::vector<long>& b_cells,
                   const WeightTable& table) {
    std::vector<long> sa = a_cells, sb = b_cells;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::vector<long> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    if (!common.empty())
        throw std::invalid_argument("interaction requires disjoint cell sets");

    const Lattice& lat = table.lattice();
    ClassAccumulator acc(table);
    for (long a : a_cells)
        for (long b : b_cells) acc.add(table.class_id(lat.displacement(a, b)), 1);
    return acc.dot();
}

double interaction(const IndicatorField& a, const IndicatorField& b, const WeightTable& table) {
    const Lattice& lat = table.lattice();
    std::vector<long> ca, cb;
    for (long id = 0; id < lat.cell_count(); ++id) {
        const bool in_a = a.get(id);
        const bool in_b = b.get(id);
        if (in_a && in_b) throw std::invalid_argument("interaction requires disjoint cell sets");
        if (in_a) ca.push_back(id);
        if (in_b) cb.push_back(id);
    }
    ClassAccumulator acc(table);
    for (long x : ca)
        for (long y : cb) acc.add(table.class_id(lat.displacement(x, y)), 1);
    return acc.dot();
}

double perimeter(const IndicatorField& e, const WeightTable& table) {
    require_frozen(e, "perimeter");
    const Lattice& lat = table.lattice();
    std::vector<long> win_in, win_out, ext_in, ext_out;
    for (long id = 0; id < lat.cell_count(); ++id) {
        const bool inside = e.get(id);
        if (lat.in_window(id))
            (inside ? win_in : win_out).push_back(id);
        else
            (inside ? ext_in : ext_out).push_back(id);
    }
    return interaction(win_in, win_out, table) + interaction(win_in, ext_out, table) +
           interaction(win_out, ext_in, table);
}

double perimeter_pairform(const IndicatorField& e, const WeightTable& table) {
    require_frozen(e, "perimeter_pairform");
    const Lattice& lat = table.lattice();
    ClassAccumulator acc(table);
    for (long x : lat.window_cells()) {
        const bool ex = e.get(x);
        for (long y = 0; y < lat.cell_count(); ++y) {
            if (y == x || e.get(y) == ex) continue;
            acc.add(table.class_id(lat.displacement(x, y)), lat.in_window(y) ? 1 : 2);
        }
    }
    return 0.5 * acc.dot();
}

double nmc_set(const IndicatorField& e, long x, const WeightTable& table, double eps) {
    if (eps < 0.0) throw std::invalid_argument("truncation radius must be nonnegative");
    const Lattice& lat = table.lattice();
    ClassAccumulator acc(table);
    for (long y = 0; y < lat.cell_count(); ++y) {
        if (y == x) continue;
        acc.add(table.class_id(lat.displacement(x, y)), e.get(y) ? -1 : 1);
    }
    return acc.dot_min_norm2(eps_norm2_floor(eps, lat.spacing())) / lat.cell_volume();
}

double nmc_level(const LevelField& phi, long x, const WeightTable& table, double eps) {
    if (eps < 0.0) throw std::invalid_argument("truncation radius must be nonnegative");
    const double px = phi.get(x);
    if (std::isinf(px))
        throw std::domain_error("level curvature needs a finite level value at the base cell");
    const Lattice& lat = table.lattice();
    ClassAccumulator acc(table);
    for (long y = 0; y < lat.cell_count(); ++y) {
        if (y == x) continue;
        const int s = sign_diff(px, phi.get(y));
        if (s != 0) acc.add(table.class_id(lat.displacement(x, y)), s);
    }
    return acc.dot_min_norm2(eps_norm2_floor(eps, lat.spacing())) / lat.cell_volume();
}

std::vector<double> default_eps_schedule(double h) {
    std::vector<double> schedule;
    for (int k = 0; k <= 6; ++k) schedule.push_back(h * static_cast<double>(1 << (6 - k)));
    return schedule;
}

namespace {

void check_schedule(const std::vector<double>& schedule, double h) {
    if (schedule.empty()) throw std::invalid_argument("empty truncation schedule");
    for (size_t k = 0; k + 1 < schedule.size(); ++k)
        if (!(schedule[k] > schedule[k + 1]))
            throw std::invalid_argument("truncation schedule must be strictly decreasing");
    if (schedule.back() < h * (1.0 - 1e-12))
        throw std::invalid_argument("truncation schedule must stay at or above the spacing");
}

PrincipalValueResult evaluate_schedule(const ClassAccumulator& acc, const Lattice& lat,
                                       const std::vector<double>& schedule, double pv_tolerance) {
    PrincipalValueResult out;
    for (double eps : schedule) {
        const double v = acc.dot_min_norm2(eps_norm2_floor(eps, lat.spacing())) / lat.cell_volume();
        out.values.emplace_back(eps, v);
    }
    const size_t n = out.values.size();
    out.converged = n < 2 || std::abs(out.values[n - 1].second - out.values[n - 2].second) <=
                                 pv_tolerance;
    if (out.converged) out.extrapolated = out.values.back().second;
    const size_t tail = (n + 1) / 2;
    out.limsup = out.values[n - tail].second;
    for (size_t k = n - tail; k < n; ++k)
        out.limsup = std::max(out.limsup, out.values[k].second);
    return out;
}

}  // namespace

PrincipalValueResult nmc_principal_value(const IndicatorField& e, long x,
                                         const WeightTable& table,
                                         const std::vector<double>& schedule,
                                         double pv_tolerance) {
    const Lattice& lat = table.lattice();
    check_schedule(schedule, lat.spacing());
    ClassAccumulator acc(table);
    for (long y = 0; y < lat.cell_count(); ++y) {
        if (y == x) continue;
        acc.add(table.class_id(lat.displacement(x, y)), e.get(y) ? -1 : 1);
    }
    return evaluate_schedule(acc, lat, schedule, pv_tolerance);
}

PrincipalValueResult nmc_principal_value(const LevelField& phi, long x,
                                         const WeightTable& table,
                                         const std::vector<double>& schedule,
                                         double pv_tolerance) {
    const Lattice& lat = table.lattice();
    check_schedule(schedule, lat.spacing());
    const double px = phi.get(x);
    if (std::isinf(px))
        throw std::domain_error("level curvature needs a finite level value at the base cell");
    ClassAccumulator acc(table);
    for (long y = 0; y < lat.cell_count(); ++y) {
        if (y == x) continue;
        const int s = sign_diff(px, phi.get(y));
        if (s != 0) acc.add(table.class_id(lat.displacement(x, y)), s);
    }
    return evaluate_schedule(acc, lat, schedule, pv_tolerance);
}

}  // namespace nlcalib
