#pragma once

#include <string>

#include <json.hpp>

#include "nlcalib/oracle.hpp"
#include "nlcalib/scenario.hpp"

namespace nlcalib {

// Field files are whitespace-separated tokens in cell-id order (axis 0
// major); writers emit one axis-0 row per line. Indicator tokens are 0/1,
// level tokens are decimal doubles with inf / -inf admitted.
IndicatorField read_indicator_file(const std::string& path, const Lattice& lattice);
void write_indicator_file(const std::string& path, const IndicatorField& field);
LevelField read_level_file(const std::string& path, const Lattice& lattice);
void write_level_file(const std::string& path, const LevelField& phi);

ScenarioConfig scenario_from_json(const nlohmann::json& j);
StudyConfig study_from_json(const nlohmann::json& j);

nlohmann::ordered_json scenario_echo_json(const ScenarioConfig& config);
nlohmann::ordered_json certificate_json(const FoliationCertificate& cert);
nlohmann::ordered_json uniqueness_json(const UniquenessReport& report);
nlohmann::ordered_json enumeration_json(const EnumerationResult& result);
nlohmann::ordered_json stationarity_json(const StationarityReport& report);
nlohmann::ordered_json cross_check_json(const OracleCrossCheck& check);
nlohmann::ordered_json study_json(const StudyResult& result);

std::string study_csv(const StudyResult& result);
std::string curvature_csv(const FoliationCertificate& cert);

}  // namespace nlcalib
