#include "nlcalib/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nlcalib {
namespace {

using nlohmann::ordered_json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    return out;
}

void require_consumed(std::ifstream& in, const std::string& path, long expected) {
    std::string extra;
    if (in >> extra)
        throw std::invalid_argument("field file '" + path + "' has tokens beyond the expected " +
                                    std::to_string(expected));
}

ordered_json kernel_echo(const KernelSpec& spec) {
    ordered_json j;
    switch (spec.family) {
        case Kernel::Family::FractionalPower:
            j["family"] = "fractional_power";
            j["alpha"] = spec.alpha;
            j["scale"] = spec.scale;
            break;
        case Kernel::Family::Exponential:
            j["family"] = "exponential";
            j["rate"] = spec.rate;
            break;
        case Kernel::Family::CompactSupport:
            j["family"] = "compact_support";
            j["radius"] = spec.radius;
            j["height"] = spec.height;
            break;
        case Kernel::Family::CustomRadial: {
            j["family"] = "custom_radial";
            ordered_json rows = ordered_json::array();
            for (const auto& [r, v] : spec.table) rows.push_back({r, v});
            j["table"] = rows;
            break;
        }
    }
    return j;
}

ordered_json box_echo(const GridBox& box, int dimension) {
    if (box.is_empty()) return ordered_json::array();
    if (dimension == 1) return ordered_json::array({box.lo[0], box.hi[0]});
    return ordered_json::array(
        {ordered_json::array({box.lo[0], box.hi[0]}), ordered_json::array({box.lo[1], box.hi[1]})});
}

}  // namespace

IndicatorField read_indicator_file(const std::string& path, const Lattice& lattice) {
    std::ifstream in = open_input(path);
    IndicatorField field(lattice);
    for (long id = 0; id < lattice.cell_count(); ++id) {
        std::string token;
        if (!(in >> token))
            throw std::invalid_argument("field file '" + path + "' is short: expected " +
                                        std::to_string(lattice.cell_count()) + " tokens");
        if (token == "0")
            field.set(id, false);
        else if (token == "1")
            field.set(id, true);
        else
            throw std::invalid_argument("indicator tokens must be 0 or 1, got '" + token +
                                        "' in '" + path + "'");
    }
    require_consumed(in, path, lattice.cell_count());
    return field;
}

void write_indicator_file(const std::string& path, const IndicatorField& field) {
    const Lattice& lat = field.lattice();
    std::ofstream out = open_output(path);
    long id = 0;
    const long per_row = lat.cell_count() == 0
                             ? 1
                             : lat.cell_count() / (lat.universe().hi[0] - lat.universe().lo[0] + 1);
    while (id < lat.cell_count()) {
        for (long k = 0; k < per_row; ++k, ++id) {
            if (k) out << ' ';
            out << (field.get(id) ? '1' : '0');
        }
        out << '\n';
    }
}

LevelField read_level_file(const std::string& path, const Lattice& lattice) {
    std::ifstream in = open_input(path);
    LevelField phi(lattice);
    for (long id = 0; id < lattice.cell_count(); ++id) {
        std::string token;
        if (!(in >> token))
            throw std::invalid_argument("level file '" + path + "' is short: expected " +
                                        std::to_string(lattice.cell_count()) + " tokens");
        try {
            phi.set(id, std::stod(token));
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse level value '" + token + "' in '" + path +
                                        "'");
        }
    }
    require_consumed(in, path, lattice.cell_count());
    return phi;
}

void write_level_file(const std::string& path, const LevelField& phi) {
    const Lattice& lat = phi.lattice();
    std::ofstream out = open_output(path);
    long id = 0;
    const long per_row = lat.cell_count() == 0
                             ? 1
                             : lat.cell_count() / (lat.universe().hi[0] - lat.universe().lo[0] + 1);
    while (id < lat.cell_count()) {
        for (long k = 0; k < per_row; ++k, ++id) {
            if (k) out << ' ';
            const double v = phi.get(id);
            if (std::isinf(v))
                out << (v > 0 ? "inf" : "-inf");
            else
                out << format_double(v);
        }
        out << '\n';
    }
}

ordered_json scenario_echo_json(const ScenarioConfig& config) {
    ordered_json j;
    j["name"] = config.name;
    j["seed"] = config.seed;
    j["kernel"] = kernel_echo(config.kernel);
    ordered_json lat;
    lat["dimension"] = config.lattice.dimension;
    lat["spacing"] = config.lattice.spacing;
    lat["universe"] = box_echo(config.lattice.universe, config.lattice.dimension);
    if (!config.lattice.window_list.empty()) {
        ordered_json cells = ordered_json::array();
        for (const auto& cell : config.lattice.window_list) {
            if (config.lattice.dimension == 1)
                cells.push_back(cell[0]);
            else
                cells.push_back(ordered_json::array({cell[0], cell[1]}));
        }
        lat["window_cells"] = cells;
    } else {
        lat["window"] = box_echo(config.lattice.window, config.lattice.dimension);
    }
    j["lattice"] = lat;
    j["mode"] = config.mode == QuadratureMode::Midpoint ? "midpoint" : "cell_averaged";

    ordered_json c;
    c["type"] = to_string(config.construction);
    switch (config.construction) {
        case Construction::Halfspace:
            c["normal"] = config.lattice.dimension == 1
                              ? ordered_json::array({config.normal[0]})
                              : ordered_json::array({config.normal[0], config.normal[1]});
            c["offset"] = config.offset;
            break;
        case Construction::Subgraph:
            c["u"] = config.u.coefficients;
            break;
        case Construction::Ball:
            c["center"] = config.lattice.dimension == 1
                              ? ordered_json::array({config.center[0]})
                              : ordered_json::array({config.center[0], config.center[1]});
            c["radius"] = config.radius;
            break;
        case Construction::ViscosityTouch: {
            c["u"] = config.u.coefficients;
            c["t0"] = config.t0;
            c["rho"] = config.rho;
            c["band_radius"] = config.band_radius;
            ordered_json o;
            switch (config.obstacle.type) {
                case ObstacleSpec::Type::HalfspaceRows:
                    o["type"] = "halfspace_rows";
                    o["slab_top"] = config.obstacle.slab_top;
                    break;
                case ObstacleSpec::Type::NotchedSlab:
                    o["type"] = "notched_slab";
                    o["slab_top"] = config.obstacle.slab_top;
                    o["notch_top"] = config.obstacle.notch_top;
                    o["notch_columns"] = config.obstacle.notch_columns;
                    break;
                case ObstacleSpec::Type::File:
                    o["type"] = "file";
                    o["path"] = config.obstacle.path;
                    break;
            }
            c["obstacle"] = o;
            break;
        }
        case Construction::Custom:
            if (!config.set_file.empty()) c["set_file"] = config.set_file;
            break;
    }
    j["construction"] = c;

    ordered_json f;
    f["type"] = to_string(config.foliation);
    if (config.foliation == Foliation::Explicit) f["level_file"] = config.level_file;
    j["foliation"] = f;
    return j;
}

ordered_json certificate_json(const FoliationCertificate& cert) {
    ordered_json j;
    j["status"] = to_string(cert.status);
    ordered_json violations = ordered_json::array();
    for (const auto& v : cert.violations) {
        ordered_json row;
        row["cell"] = v.cell;
        row["curvature"] = v.curvature;
        row["required_sign"] = v.required_sign;
        violations.push_back(row);
    }
    j["violations"] = violations;
    j["curvature_bound"] = cert.curvature_bound;
    j["zero_level_measure"] = cert.zero_level_measure;
    j["null_lagrangian"] = cert.null_lagrangian;
    j["sign_tolerance"] = cert.sign_tolerance;
    ordered_json curvatures = ordered_json::array();
    for (const auto& [cell, value] : cert.window_curvatures)
        curvatures.push_back(ordered_json::array({cell, value}));
    j["window_curvatures"] = curvatures;
    return j;
}

ordered_json uniqueness_json(const UniquenessReport& report) {
    ordered_json j;
    j["strictly_positive_weights"] = report.strictly_positive_weights;
    j["no_zero_level_window_cells"] = report.no_zero_level_window_cells;
    j["both_phases_outside_window"] = report.both_phases_outside_window;
    j["satisfied"] = report.satisfied();
    return j;
}

ordered_json enumeration_json(const EnumerationResult& result) {
    ordered_json j;
    j["min_value"] = result.min_value;
    j["minimizers"] = result.minimizers;
    j["configurations_searched"] = result.configurations_searched;
    j["truncated"] = result.truncated;
    return j;
}

ordered_json stationarity_json(const StationarityReport& report) {
    ordered_json j;
    ordered_json cells = ordered_json::array();
    for (const auto& c : report.cells) {
        ordered_json row;
        row["cell"] = c.cell;
        row["inside"] = c.inside;
        row["curvature"] = c.curvature;
        row["ok"] = c.ok;
        cells.push_back(row);
    }
    j["cells"] = cells;
    j["violations"] = report.violations;
    j["sign_tolerance"] = report.sign_tolerance;
    j["stationary"] = report.stationary();
    return j;
}

ordered_json cross_check_json(const OracleCrossCheck& check) {
    ordered_json j;
    j["status"] = to_string(check.status);
    j["restricted"] = check.restricted;
    j["e_attains_minimum"] = check.e_attains_minimum;
    j["uniqueness_hypotheses"] = check.uniqueness_hypotheses;
    j["unique_minimizer"] = check.unique_minimizer;
    j["passed"] = check.passed;
    j["enumeration"] = enumeration_json(check.enumeration);
    return j;
}

ordered_json study_json(const StudyResult& result) {
    ordered_json j;
    j["name"] = result.name;
    j["kind"] = to_string(result.kind);
    ordered_json rows = ordered_json::array();
    for (const auto& r : result.rows) {
        ordered_json row;
        row["h"] = r.h;
        row["value"] = r.value;
        row["reference"] = r.reference;
        row["abs_error"] = r.abs_error;
        row["rel_error"] = r.rel_error;
        if (std::isnan(r.observed_order))
            row["observed_order"] = nullptr;
        else
            row["observed_order"] = r.observed_order;
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["monotone_error"] = result.monotone_error;
    j["notes"] = result.notes;
    return j;
}

std::string study_csv(const StudyResult& result) {
    std::string out = "h,value,reference,abs_error,rel_error,observed_order\n";
    for (const auto& r : result.rows) {
        out += format_double(r.h) + ',' + format_double(r.value) + ',' +
               format_double(r.reference) + ',' + format_double(r.abs_error) + ',' +
               format_double(r.rel_error) + ',' + format_double(r.observed_order) + '\n';
    }
    return out;
}

std::string curvature_csv(const FoliationCertificate& cert) {
    std::string out = "cell,curvature\n";
    for (const auto& [cell, value] : cert.window_curvatures)
        out += std::to_string(cell) + ',' + format_double(value) + '\n';
    return out;
}

}  // namespace nlcalib
