#include "nlcalib/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nlcalib/functionals.hpp"
#include "nlcalib/io.hpp"
#include "nlcalib/quadrature.hpp"
#include "nlcalib/rng.hpp"

namespace nlcalib {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_error(const std::string& message) {
    throw std::invalid_argument("config: " + message);
}

}  // namespace

const char* to_string(Construction c) {
    switch (c) {
        case Construction::Halfspace: return "halfspace";
        case Construction::Subgraph: return "subgraph";
        case Construction::Ball: return "ball";
        case Construction::ViscosityTouch: return "viscosity_touch";
        case Construction::Custom: return "custom";
    }
    return "custom";
}

const char* to_string(Foliation f) {
    switch (f) {
        case Foliation::VerticalTranslation: return "vertical_translation";
        case Foliation::TwoValued: return "two_valued";
        case Foliation::Explicit: return "explicit";
        case Foliation::RaisedGraph: return "raised_graph";
    }
    return "two_valued";
}

const char* to_string(StudyKind k) {
    switch (k) {
        case StudyKind::HalfspaceCurvature: return "halfspace_curvature";
        case StudyKind::IntervalPerimeter: return "interval_perimeter";
        case StudyKind::DiskCurvature: return "disk_curvature";
    }
    return "halfspace_curvature";
}

FieldPair build_halfspace(std::array<double, 2> normal, double offset, const Lattice& lattice,
                          std::vector<std::string>* warnings) {
    if (lattice.dimension() == 1) normal[1] = 0.0;
    const double norm = std::hypot(normal[0], normal[1]);
    if (!(norm > 0.0)) throw std::invalid_argument("halfspace normal must be nonzero");
    if (normal[0] != 0.0 && normal[1] != 0.0 && warnings)
        warnings->push_back(
            "non-axis-aligned halfspace normal: exact interface symmetry is not guaranteed");

    IndicatorField e(lattice);
    LevelField phi(lattice);
    for (long id = 0; id < lattice.cell_count(); ++id) {
        const auto c = lattice.center(id);
        const double v = offset - (c[0] * normal[0] + c[1] * normal[1]);
        phi.set(id, v);
        e.set(id, v > 0.0);
    }
    return {freeze_exterior(e), phi};
}

FieldPair build_subgraph(const USpec& u, const Lattice& lattice) {
    if (lattice.dimension() != 2)
        throw std::invalid_argument("subgraph construction needs a 2D lattice");
    const double h = lattice.spacing();
    const double y_lo = h * lattice.universe().lo[1];
    const double y_hi = h * (lattice.universe().hi[1] + 1);
    for (int i = lattice.universe().lo[0]; i <= lattice.universe().hi[0]; ++i) {
        const double t = h * (i + 0.5);
        const double v = u(t);
        if (v < y_lo || v > y_hi)
            throw std::invalid_argument("graph leaves the universe box vertically at abscissa " +
                                        std::to_string(t));
    }

    IndicatorField e(lattice);
    LevelField phi(lattice);
    for (long id = 0; id < lattice.cell_count(); ++id) {
        const auto c = lattice.center(id);
        const double v = u(c[0]) - c[1];
        phi.set(id, v);
        e.set(id, v > 0.0);
    }
    return {freeze_exterior(e), phi};
}

FieldPair build_ball(std::array<double, 2> center, double radius, const Lattice& lattice) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    IndicatorField e(lattice);
    LevelField phi(lattice);
    for (long id = 0; id < lattice.cell_count(); ++id) {
        const auto c = lattice.center(id);
        const double dy = lattice.dimension() == 2 ? c[1] - center[1] : 0.0;
        const bool inside = std::hypot(c[0] - center[0], dy) < radius;
        e.set(id, inside);
        phi.set(id, inside ? 1.0 : -1.0);
    }
    return {freeze_exterior(e), phi};
}

ViscosityFamily build_viscosity_touch(const USpec& u, double t0, double rho,
                                      double band_radius, const IndicatorField& f,
                                      const WeightTable& table) {
    const Lattice& lat = table.lattice();
    if (lat.dimension() != 2)
        throw std::invalid_argument("viscosity construction needs a 2D lattice");
    if (!f.frozen()) throw std::invalid_argument("the viscosity obstacle must be frozen");
    const double h = lat.spacing();
    if (!(t0 > 0.0)) throw std::invalid_argument("t0 must be positive");
    const long steps = std::lround(t0 / h);
    if (steps < 1 || std::abs(t0 / h - static_cast<double>(steps)) > 1e-9)
        throw std::invalid_argument("t0 must be a positive multiple of the spacing");
    const double t_top = h * static_cast<double>(steps);
    if (u(0.0) != 0.0) throw std::invalid_argument("u(0) must vanish");
    if (std::abs(u(h / 2) - u(-h / 2)) > 1e-12)
        throw std::invalid_argument("u must be flat at the origin: u(h/2) != u(-h/2)");
    if (!(rho > 0.0) || !(band_radius > 0.0))
        throw std::invalid_argument("rho and the band radius must be positive");

    IndicatorField a(lat);
    for (long id = 0; id < lat.cell_count(); ++id) {
        const auto c = lat.center(id);
        a.set(id, c[1] < u(c[0]));
        if (a.get(id) && !f.get(id))
            throw std::invalid_argument("the subgraph must sit inside the obstacle (cell " +
                                        std::to_string(id) + ")");
    }

    auto raised = [&](long id, double t) {
        const auto c = lat.center(id);
        return std::abs(c[0]) < band_radius && c[1] >= u(c[0]) && c[1] < u(c[0]) + t;
    };

    for (long id = 0; id < lat.cell_count(); ++id) {
        const auto c = lat.center(id);
        if (std::abs(c[0]) >= rho && raised(id, t_top) && !f.get(id))
            throw std::invalid_argument(
                "separation fails: the raised band escapes the obstacle at abscissa " +
                std::to_string(c[0]));
    }

    std::vector<double> t_grid;
    std::vector<IndicatorField> leaves;
    for (long k = 0; k <= steps; ++k) {
        const double t = h * static_cast<double>(k);
        IndicatorField et(lat);
        for (long id = 0; id < lat.cell_count(); ++id)
            et.set(id, f.get(id) || a.get(id) || (k > 0 && raised(id, t)));
        for (long id = 0; id < lat.cell_count(); ++id)
            if (et.get(id) != f.get(id) && !lat.in_window(id))
                throw std::invalid_argument("the raised family leaves the window at cell " +
                                            std::to_string(id));
        t_grid.push_back(t);
        leaves.push_back(freeze_exterior(et));
    }

    const IndicatorField& e = leaves.back();
    auto band_value = [&](long id) {
        const auto c = lat.center(id);
        return t_top + u(c[0]) - c[1];
    };
    LevelField phi(lat);
    for (long id = 0; id < lat.cell_count(); ++id) {
        if (f.get(id))
            phi.set(id, kInf);
        else if (e.get(id))
            phi.set(id, band_value(id));
        else
            phi.set(id, -kInf);
    }

    std::vector<TouchCell> touch_cells;
    long pairs = 0;
    long violations = 0;
    const long classes = table.class_count();
    std::vector<long> level_count(static_cast<size_t>(classes));
    std::vector<long> set_count(static_cast<size_t>(classes));
    for (long x = 0; x < lat.cell_count(); ++x) {
        if (!e.get(x) || f.get(x)) continue;
        const double tau = phi.get(x);
        IndicatorField a_tau(lat);
        for (long y = 0; y < lat.cell_count(); ++y) {
            const auto c = lat.center(y);
            a_tau.set(y, a.get(y) || (std::abs(c[0]) < band_radius && c[1] >= u(c[0]) &&
                                      band_value(y) > tau));
        }
        std::fill(level_count.begin(), level_count.end(), 0);
        std::fill(set_count.begin(), set_count.end(), 0);
        for (long y = 0; y < lat.cell_count(); ++y) {
            if (y == x) continue;
            const int lhs = sign_diff(tau, phi.get(y));
            const int rhs = a_tau.get(y) ? -1 : 1;
            ++pairs;
            if (lhs > rhs) ++violations;
            const int cid = table.class_id(lat.displacement(x, y));
            level_count[static_cast<size_t>(cid)] += lhs;
            set_count[static_cast<size_t>(cid)] += rhs;
        }
        bool dominated = true;
        ClassAccumulator acc_level(table);
        ClassAccumulator acc_set(table);
        for (long cid = 0; cid < classes; ++cid) {
            if (level_count[static_cast<size_t>(cid)] > set_count[static_cast<size_t>(cid)])
                dominated = false;
            acc_level.add(static_cast<int>(cid), level_count[static_cast<size_t>(cid)]);
            acc_set.add(static_cast<int>(cid), set_count[static_cast<size_t>(cid)]);
        }
        touch_cells.push_back({x, acc_level.dot() / lat.cell_volume(),
                               acc_set.dot() / lat.cell_volume(), dominated});
    }

    return {std::move(t_grid), std::move(leaves), a, phi, std::move(touch_cells), pairs,
            violations};
}

Kernel make_kernel(const KernelSpec& spec, int dimension) {
    switch (spec.family) {
        case Kernel::Family::FractionalPower:
            return Kernel::fractional_power(dimension, spec.alpha, spec.scale);
        case Kernel::Family::Exponential:
            return Kernel::exponential(dimension, spec.rate);
        case Kernel::Family::CompactSupport:
            return Kernel::compact_support(dimension, spec.radius, spec.height);
        case Kernel::Family::CustomRadial:
            return Kernel::custom_radial(dimension, spec.table);
    }
    throw std::invalid_argument("unknown kernel family");
}

IndicatorField build_obstacle(const ObstacleSpec& spec, const Lattice& lattice) {
    switch (spec.type) {
        case ObstacleSpec::Type::File: {
            IndicatorField f = read_indicator_file(spec.path, lattice);
            return freeze_exterior(f);
        }
        case ObstacleSpec::Type::HalfspaceRows:
        case ObstacleSpec::Type::NotchedSlab: {
            if (lattice.dimension() != 2)
                throw std::invalid_argument("row obstacles need a 2D lattice");
            IndicatorField f(lattice);
            for (long id = 0; id < lattice.cell_count(); ++id) {
                const auto idx = lattice.index_of(id);
                int top = spec.slab_top;
                if (spec.type == ObstacleSpec::Type::NotchedSlab &&
                    std::find(spec.notch_columns.begin(), spec.notch_columns.end(), idx[0]) !=
                        spec.notch_columns.end())
                    top = spec.notch_top;
                f.set(id, idx[1] <= top);
            }
            return freeze_exterior(f);
        }
    }
    throw std::invalid_argument("unknown obstacle type");
}

namespace {

GridBox box_from_json(const json& j, int dimension) {
    if (j.is_null() || (j.is_array() && j.empty()) || (j.is_string() && j == "empty"))
        return GridBox::empty();
    GridBox box;
    if (dimension == 1) {
        if (!j.is_array() || j.size() != 2) config_error("1D box must be [lo, hi]");
        box.lo = {j[0].get<int>(), 0};
        box.hi = {j[1].get<int>(), 0};
    } else {
        if (!j.is_array() || j.size() != 2 || !j[0].is_array())
            config_error("2D box must be [[lo0, hi0], [lo1, hi1]]");
        box.lo = {j[0][0].get<int>(), j[1][0].get<int>()};
        box.hi = {j[0][1].get<int>(), j[1][1].get<int>()};
    }
    return box;
}

KernelSpec kernel_from_json(const json& j) {
    KernelSpec spec;
    const std::string family = j.value("family", "fractional_power");
    if (family == "fractional_power") {
        spec.family = Kernel::Family::FractionalPower;
        spec.alpha = j.value("alpha", 0.5);
        spec.scale = j.value("scale", 1.0);
    } else if (family == "exponential") {
        spec.family = Kernel::Family::Exponential;
        spec.rate = j.value("rate", 1.0);
    } else if (family == "compact_support") {
        spec.family = Kernel::Family::CompactSupport;
        spec.radius = j.value("radius", 1.0);
        spec.height = j.value("height", 1.0);
    } else if (family == "custom_radial") {
        spec.family = Kernel::Family::CustomRadial;
        if (!j.contains("table")) config_error("custom_radial kernel needs a table");
        for (const auto& row : j.at("table")) {
            if (!row.is_array() || row.size() != 2)
                config_error("kernel table rows must be [distance, value]");
            spec.table.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
    } else {
        config_error("unknown kernel family '" + family + "'");
    }
    return spec;
}

LatticeSpec lattice_from_json(const json& j) {
    LatticeSpec spec;
    spec.dimension = j.value("dimension", 1);
    if (spec.dimension != 1 && spec.dimension != 2) config_error("dimension must be 1 or 2");
    spec.spacing = j.value("spacing", 1.0);
    if (!(spec.spacing > 0.0)) config_error("spacing must be positive");
    if (!j.contains("universe")) config_error("lattice needs a universe box");
    spec.universe = box_from_json(j.at("universe"), spec.dimension);
    if (spec.universe.is_empty()) config_error("universe box must be nonempty");
    if (j.contains("window_cells")) {
        for (const auto& cell : j.at("window_cells")) {
            if (spec.dimension == 1)
                spec.window_list.push_back({cell.get<int>(), 0});
            else
                spec.window_list.push_back({cell[0].get<int>(), cell[1].get<int>()});
        }
    } else if (j.contains("window")) {
        spec.window = box_from_json(j.at("window"), spec.dimension);
    } else {
        config_error("lattice needs a window box or window_cells");
    }
    return spec;
}

QuadratureMode mode_from_string(const std::string& s) {
    if (s == "midpoint") return QuadratureMode::Midpoint;
    if (s == "cell_averaged") return QuadratureMode::CellAveraged;
    config_error("unknown quadrature mode '" + s + "'");
}

ObstacleSpec obstacle_from_json(const json& j) {
    ObstacleSpec spec;
    const std::string type = j.value("type", "halfspace_rows");
    if (type == "halfspace_rows") {
        spec.type = ObstacleSpec::Type::HalfspaceRows;
        spec.slab_top = j.value("slab_top", 0);
    } else if (type == "notched_slab") {
        spec.type = ObstacleSpec::Type::NotchedSlab;
        spec.slab_top = j.value("slab_top", 0);
        spec.notch_top = j.value("notch_top", 0);
        for (const auto& col : j.value("notch_columns", json::array()))
            spec.notch_columns.push_back(col.get<int>());
    } else if (type == "file") {
        spec.type = ObstacleSpec::Type::File;
        spec.path = j.value("path", "");
        if (spec.path.empty()) config_error("file obstacle needs a path");
    } else {
        config_error("unknown obstacle type '" + type + "'");
    }
    return spec;
}

std::array<double, 2> vector_from_json(const json& j, int dimension, const char* what) {
    std::array<double, 2> v{0.0, 0.0};
    if (!j.is_array() || static_cast<int>(j.size()) != dimension)
        config_error(std::string(what) + " must be an array of length " +
                     std::to_string(dimension));
    v[0] = j[0].get<double>();
    if (dimension == 2) v[1] = j[1].get<double>();
    return v;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        size_t line = 1, column = 1;
        for (size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        config_error("parse error in '" + path + "' at line " + std::to_string(line) +
                     ", column " + std::to_string(column) + ": " + e.what());
    }
}

}  // namespace

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig config;
    config.name = j.value("name", "scenario");
    if (!j.contains("seed")) config_error("a seed field is mandatory");
    config.seed = j.at("seed").get<uint64_t>();
    if (!j.contains("kernel")) config_error("a kernel block is mandatory");
    config.kernel = kernel_from_json(j.at("kernel"));
    if (!j.contains("lattice")) config_error("a lattice block is mandatory");
    config.lattice = lattice_from_json(j.at("lattice"));
    config.mode = mode_from_string(j.value("mode", "midpoint"));

    if (!j.contains("construction")) config_error("a construction block is mandatory");
    const json& c = j.at("construction");
    const std::string type = c.value("type", "");
    const int dim = config.lattice.dimension;
    if (type == "halfspace") {
        config.construction = Construction::Halfspace;
        if (c.contains("normal")) config.normal = vector_from_json(c.at("normal"), dim, "normal");
        config.offset = c.value("offset", 0.0);
        config.foliation = Foliation::VerticalTranslation;
    } else if (type == "subgraph") {
        config.construction = Construction::Subgraph;
        config.u.coefficients = c.value("u", std::vector<double>{});
        config.foliation = Foliation::VerticalTranslation;
    } else if (type == "ball") {
        config.construction = Construction::Ball;
        if (c.contains("center")) config.center = vector_from_json(c.at("center"), dim, "center");
        config.radius = c.value("radius", 1.0);
        config.foliation = Foliation::TwoValued;
    } else if (type == "viscosity_touch") {
        config.construction = Construction::ViscosityTouch;
        config.u.coefficients = c.value("u", std::vector<double>{});
        config.t0 = c.value("t0", 0.0);
        config.rho = c.value("rho", 1.0);
        config.band_radius = c.value("band_radius", 1.0);
        if (!c.contains("obstacle")) config_error("viscosity_touch needs an obstacle block");
        config.obstacle = obstacle_from_json(c.at("obstacle"));
        config.foliation = Foliation::RaisedGraph;
    } else if (type == "custom") {
        config.construction = Construction::Custom;
        config.set_file = c.value("set_file", "");
        config.foliation = Foliation::TwoValued;
    } else {
        config_error("unknown construction type '" + type + "'");
    }

    if (j.contains("foliation")) {
        const json& f = j.at("foliation");
        const std::string ftype = f.value("type", "");
        if (ftype == "vertical_translation")
            config.foliation = Foliation::VerticalTranslation;
        else if (ftype == "two_valued")
            config.foliation = Foliation::TwoValued;
        else if (ftype == "explicit") {
            config.foliation = Foliation::Explicit;
            config.level_file = f.value("level_file", "");
            if (config.level_file.empty()) config_error("explicit foliation needs a level_file");
        } else if (ftype == "raised_graph")
            config.foliation = Foliation::RaisedGraph;
        else
            config_error("unknown foliation type '" + ftype + "'");
    }

    switch (config.construction) {
        case Construction::Subgraph:
            if (config.foliation != Foliation::VerticalTranslation &&
                config.foliation != Foliation::Explicit)
                config_error("subgraph construction needs vertical_translation or explicit foliation");
            break;
        case Construction::ViscosityTouch:
            if (config.foliation != Foliation::RaisedGraph)
                config_error("viscosity_touch construction needs the raised_graph foliation");
            break;
        case Construction::Ball:
        case Construction::Custom:
            if (config.foliation == Foliation::VerticalTranslation ||
                config.foliation == Foliation::RaisedGraph)
                config_error("this construction needs a two_valued or explicit foliation");
            break;
        case Construction::Halfspace:
            if (config.foliation == Foliation::RaisedGraph)
                config_error("halfspace construction cannot use the raised_graph foliation");
            break;
    }
    return config;
}

ScenarioConfig load_scenario(const std::string& path) {
    return scenario_from_json(parse_file(path));
}

BuiltScenario build_scenario(const ScenarioConfig& config) {
    std::vector<std::string> warnings;
    std::shared_ptr<const Lattice> lattice;
    if (!config.lattice.window_list.empty())
        lattice = std::make_shared<const Lattice>(config.lattice.dimension, config.lattice.spacing,
                                                  config.lattice.universe,
                                                  config.lattice.window_list);
    else
        lattice = std::make_shared<const Lattice>(config.lattice.dimension, config.lattice.spacing,
                                                  config.lattice.universe, config.lattice.window);
    auto kernel = std::make_shared<const Kernel>(make_kernel(config.kernel, lattice->dimension()));
    WeightTable table = build_weights(*lattice, *kernel, config.mode);

    std::optional<ViscosityFamily> viscosity;
    std::optional<FieldPair> fields;
    switch (config.construction) {
        case Construction::Halfspace:
            fields = build_halfspace(config.normal, config.offset, *lattice, &warnings);
            break;
        case Construction::Subgraph:
            fields = build_subgraph(config.u, *lattice);
            break;
        case Construction::Ball:
            fields = build_ball(config.center, config.radius, *lattice);
            break;
        case Construction::ViscosityTouch: {
            IndicatorField obstacle = build_obstacle(config.obstacle, *lattice);
            viscosity = build_viscosity_touch(config.u, config.t0, config.rho,
                                              config.band_radius, obstacle, table);
            fields = FieldPair{viscosity->leaves.back(), viscosity->phi};
            break;
        }
        case Construction::Custom: {
            IndicatorField e(*lattice);
            if (!config.set_file.empty()) {
                e = read_indicator_file(config.set_file, *lattice);
            } else {
                SplitRng rng(config.seed);
                for (long id = 0; id < lattice->cell_count(); ++id) e.set(id, rng.coin());
            }
            LevelField phi(*lattice);
            fields = FieldPair{freeze_exterior(e), phi};
            break;
        }
    }

    if (config.foliation == Foliation::TwoValued) {
        for (long id = 0; id < lattice->cell_count(); ++id)
            fields->phi.set(id, fields->e.get(id) ? 1.0 : -1.0);
    } else if (config.foliation == Foliation::Explicit) {
        fields->phi = read_level_file(config.level_file, *lattice);
    }

    return {config,           lattice, kernel, std::move(table), std::move(fields->e),
            std::move(fields->phi), std::move(viscosity), std::move(warnings)};
}

namespace {

double interval_reference(const Kernel& kernel, double length) {
    if (kernel.family() == Kernel::Family::FractionalPower) {
        const double a = kernel.alpha();
        return 2.0 * kernel.scale() * std::pow(length, 1.0 - a) / (a * (1.0 - a));
    }
    auto ray = [&](double d) { return 0.5 * kernel.tail_integral(d).value; };
    const QuadratureResult q = integrate(
        [&](double x) { return ray(x) + ray(length - x); }, 0.0, length, 1e-9);
    return q.value;
}

double interval_box_correction(const Kernel& kernel, double p, double q, double x_lo,
                               double x_hi) {
    if (kernel.family() == Kernel::Family::FractionalPower) {
        const double a = kernel.alpha();
        const double c = kernel.scale() / (a * (1.0 - a));
        return c * (std::pow(q - x_lo, 1.0 - a) - std::pow(p - x_lo, 1.0 - a) +
                    std::pow(x_hi - p, 1.0 - a) - std::pow(x_hi - q, 1.0 - a));
    }
    auto ray = [&](double d) { return 0.5 * kernel.tail_integral(d).value; };
    const QuadratureResult r = integrate(
        [&](double x) { return ray(x - x_lo) + ray(x_hi - x); }, p, q, 1e-9);
    return r.value;
}

// Kernel mass of the halfplane {first coordinate >= d} around the origin.
double halfplane_tail(const Kernel& kernel, double d) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    auto g = [&](double rho) { return kernel.tail_integral(rho).value / (2.0 * std::numbers::pi); };
    const QuadratureResult q =
        integrate([&](double theta) { return g(d / std::cos(theta)); }, -half_pi, half_pi, 1e-10);
    return q.value;
}

// Kernel mass of the quadrant {x >= dx, y >= dy} around the origin.
double quadrant_tail(const Kernel& kernel, double dx, double dy) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    auto g = [&](double rho) { return kernel.tail_integral(rho).value / (2.0 * std::numbers::pi); };
    auto f = [&](double theta) {
        const double r = std::max(dx / std::cos(theta), dy / std::sin(theta));
        return g(r);
    };
    const double split = std::atan2(dy, dx);
    const QuadratureResult qa = integrate(f, 0.0, split, 1e-10);
    const QuadratureResult qb = integrate(f, split, half_pi, 1e-10);
    return qa.value + qb.value;
}

// Boundary cells near spread interior angles. Grid-aligned boundary points
// are excluded: there the cell column along the tangent never cancels and
// the discrete curvature blows up like h^(-alpha). Interior angles carry
// per-cell lattice-direction fluctuations of either sign that average out
// in the mean.
std::vector<std::array<int, 2>> disk_tracked_cells(long n) {
    constexpr int kCount = 16;
    constexpr double kLo = 0.12;
    constexpr double kStep = (std::numbers::pi / 2.0 - 2.0 * kLo) / (kCount - 1);
    std::vector<std::array<int, 2>> cells;
    for (int j = 0; j < kCount; ++j) {
        const double theta = kLo + kStep * j;
        const long a = std::lround(std::cos(theta) * static_cast<double>(n));
        const long b = std::lround(std::sin(theta) * static_cast<double>(n));
        if (a < 1 || b < 1) continue;
        const std::array<int, 2> cell{static_cast<int>(a), static_cast<int>(b)};
        if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
    }
    return cells;
}

// Curvature mass of {|z| < eps} for the disk through the cell center: with
// the polar angle t measured from the tangent, the pair x +- z lies outside
// on both sides exactly when |z| > 2 R sin t, so one-in-one-out cancellation
// leaves this region as the entire near-field contribution.
double disk_inner_tail(const Kernel& kernel, double radius, double eps) {
    const double t_star = std::asin(std::min(1.0, eps / (2.0 * radius)));
    auto g = [&](double rho) { return kernel.tail_integral(rho).value / (2.0 * std::numbers::pi); };
    const double g_eps = g(eps);
    const QuadratureResult q = integrate(
        [&](double t) { return g(2.0 * radius * std::sin(t)) - g_eps; }, 0.0, t_star, 1e-8, 1e-12);
    return 4.0 * q.value;
}

double disk_reference(const Kernel& kernel, double radius) {
    if (kernel.family() != Kernel::Family::FractionalPower)
        throw std::invalid_argument("the disk study needs a fractional power kernel");
    const double a = kernel.alpha();
    return 2.0 / a * std::pow(2.0 * radius, -a) * std::beta((1.0 - a) / 2.0, 0.5) *
           kernel.scale();
}

StudyRow make_row(double h, double value, double reference) {
    const double abs_error = std::abs(value - reference);
    const double scale = std::max(1.0, std::abs(reference));
    return {h, value, reference, abs_error, abs_error / scale, kNaN};
}

void finish_rows(StudyResult& result) {
    for (size_t k = 1; k < result.rows.size(); ++k) {
        StudyRow& row = result.rows[k];
        const StudyRow& prev = result.rows[k - 1];
        if (row.abs_error > 0.0 && prev.abs_error > 0.0 && row.h != prev.h)
            row.observed_order = std::log(prev.abs_error / row.abs_error) / std::log(prev.h / row.h);
        if (row.abs_error > prev.abs_error * (1.0 + 1e-12)) result.monotone_error = false;
    }
    if (!result.monotone_error)
        result.notes.push_back("error column is not monotone; values may sit at quadrature noise");
}

}  // namespace

StudyResult refinement_study(const StudyConfig& config) {
    if (config.spacings.empty()) throw std::invalid_argument("study needs a spacing list");
    for (size_t k = 0; k < config.spacings.size(); ++k) {
        if (!(config.spacings[k] > 0.0))
            throw std::invalid_argument("study spacings must be positive");
        if (k > 0 && !(config.spacings[k] < config.spacings[k - 1]))
            throw std::invalid_argument("study spacings must be strictly decreasing");
    }

    StudyResult result;
    result.kind = config.kind;
    result.name = to_string(config.kind);

    switch (config.kind) {
        case StudyKind::HalfspaceCurvature: {
            const Kernel kernel = make_kernel(config.kernel, 2);
            for (double h : config.spacings) {
                const int m = std::max(2, static_cast<int>(std::lround(1.0 / h)));
                const Lattice lat(2, h, {{-m, -m}, {m, m}}, GridBox{{-(m - 1), 0}, {m - 1, 0}});
                const WeightTable table = build_weights(lat, kernel, config.mode);
                const auto fields = build_halfspace({0.0, 1.0}, h / 2, lat);
                double worst = 0.0;
                for (long x : lat.window_cells())
                    worst = std::max(worst, std::abs(nmc_level(fields.phi, x, table)));
                result.rows.push_back(make_row(h, worst, 0.0));
            }
            break;
        }
        case StudyKind::IntervalPerimeter: {
            const Kernel kernel = make_kernel(config.kernel, 1);
            const double reference = interval_reference(kernel, config.length);
            for (double h : config.spacings) {
                const long n_margin = std::lround(config.margin / h);
                const long n_len = std::lround(config.length / h);
                if (n_len < 1 || std::abs(n_len * h - config.length) > 1e-9 * config.length)
                    throw std::invalid_argument(
                        "interval length must be a multiple of every spacing");
                const int hi = static_cast<int>(2 * n_margin + n_len - 1);
                const Lattice lat(1, h, {{0, 0}, {hi, 0}}, GridBox{{0, 0}, {hi, 0}});
                const WeightTable table = build_weights(lat, kernel, config.mode);
                IndicatorField e(lat);
                for (long i = n_margin; i < n_margin + n_len; ++i) e.set(i, true);
                const IndicatorField frozen = freeze_exterior(e);
                const double base = perimeter(frozen, table);
                const double p = h * static_cast<double>(n_margin);
                const double q = h * static_cast<double>(n_margin + n_len);
                const double x_hi = h * static_cast<double>(hi + 1);
                const double corrected =
                    base + interval_box_correction(kernel, p, q, 0.0, x_hi);
                result.rows.push_back(make_row(h, corrected, reference));
            }
            break;
        }
        case StudyKind::DiskCurvature: {
            const Kernel kernel = make_kernel(config.kernel, 2);
            for (double h : config.spacings) {
                const long n = std::lround(1.0 / h);
                if (n < 2 || std::abs(1.0 / h - static_cast<double>(n)) > 1e-9)
                    throw std::invalid_argument("disk study spacings must be reciprocals of integers");
                const int ni = static_cast<int>(n);
                // Each tracked cell gets the circle through its own center, so
                // its near field pairs off exactly; averaging across angles damps
                // the remaining lattice-direction fluctuations. The box is twice
                // the disk, which keeps every tail correction at unit distance,
                // where the kernel is smooth.
                const auto tracked_cells = disk_tracked_cells(n);
                const Lattice lat(2, h, {{-2 * ni, -2 * ni}, {2 * ni - 1, 2 * ni - 1}},
                                  tracked_cells);
                const WeightTable table = build_weights(lat, kernel, config.mode);
                const double extent = h * static_cast<double>(2 * n);
                // The lattice sum is eps-truncated and completed analytically on
                // both sides: near-tangent lattice directions otherwise hit the
                // kernel singularity with O(h^(-alpha)) spikes.
                const double eps = 2.0 * std::pow(h, 0.4);
                double value_sum = 0.0, reference_sum = 0.0;
                for (const auto& index : tracked_cells) {
                    const double radius =
                        h * std::hypot(index[0] + 0.5, index[1] + 0.5);
                    const auto fields = build_ball({0.0, 0.0}, radius, lat);
                    const long tracked = lat.id_of(index);
                    const auto c = lat.center(tracked);
                    const double correction = halfplane_tail(kernel, extent - c[0]) +
                                              halfplane_tail(kernel, extent + c[0]) +
                                              halfplane_tail(kernel, extent - c[1]) +
                                              halfplane_tail(kernel, extent + c[1]) -
                                              quadrant_tail(kernel, extent - c[0], extent - c[1]) -
                                              quadrant_tail(kernel, extent - c[0], extent + c[1]) -
                                              quadrant_tail(kernel, extent + c[0], extent - c[1]) -
                                              quadrant_tail(kernel, extent + c[0], extent + c[1]);
                    value_sum += nmc_set(fields.e, tracked, table, eps) +
                                 disk_inner_tail(kernel, radius, eps) + correction;
                    reference_sum += disk_reference(kernel, radius);
                }
                const double count = static_cast<double>(tracked_cells.size());
                result.rows.push_back(make_row(h, value_sum / count, reference_sum / count));
            }
            break;
        }
    }

    finish_rows(result);
    return result;
}

StudyConfig study_from_json(const nlohmann::json& j) {
    StudyConfig config;
    if (!j.contains("study")) config_error("a study block is mandatory");
    const json& s = j.at("study");
    const std::string kind = s.value("kind", "");
    if (kind == "halfspace_curvature")
        config.kind = StudyKind::HalfspaceCurvature;
    else if (kind == "interval_perimeter")
        config.kind = StudyKind::IntervalPerimeter;
    else if (kind == "disk_curvature")
        config.kind = StudyKind::DiskCurvature;
    else
        config_error("unknown study kind '" + kind + "'");
    if (!s.contains("spacings")) config_error("study needs a spacings list");
    config.spacings = s.at("spacings").get<std::vector<double>>();
    config.length = s.value("length", 1.0);
    config.margin = s.value("margin", 1.0);
    if (!j.contains("kernel")) config_error("a kernel block is mandatory");
    config.kernel = kernel_from_json(j.at("kernel"));
    config.mode = mode_from_string(j.value("mode", "midpoint"));
    return config;
}

StudyConfig load_study(const std::string& path) { return study_from_json(parse_file(path)); }

}  // namespace nlcalib
