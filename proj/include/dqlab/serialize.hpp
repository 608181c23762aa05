#pragma once

#include "dqlab/dq_analysis.hpp"
#include "dqlab/interval_set.hpp"
#include "dqlab/piecewise.hpp"
#include "dqlab/staircase.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace dqlab {

using json = nlohmann::ordered_json;

// Every rational is written as a "p/q" string. Readers throw kSchema naming
// the offending field.

json to_json(const Rat& r);
json to_json(const Interval& i);
json to_json(const Enclosure& e);
json to_json(const IntervalSet& s);
json to_json(const Piece& p);
json to_json(const PiecewiseFn& f);
json to_json(const Rect& r);
json to_json(const StaircaseLedger& ledger);
json to_json(const Witness& w);
json to_json(const DQCertificate& c);

Rat rat_from_json(const json& j, const std::string& field);
Interval interval_from_json(const json& j, const std::string& field);
Enclosure enclosure_from_json(const json& j, const std::string& field);
IntervalSet interval_set_from_json(const json& j, const std::string& field = "set");
PiecewiseFn piecewise_from_json(const json& j, const std::string& field = "function");
DQCertificate certificate_from_json(const json& j);

/// Function file: {"pieces": [...]} or {"staircase": {"depth": n, "gap_convention": "..."}}.
PiecewiseFn load_function(const std::filesystem::path& path);
/// Set file: {"intervals": [...], "punctures": [...]} or {"fat_cantor": depth}.
IntervalSet load_set(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);

/// geometry.csv: level,index,x_lo,x_hi,y_lo,y_hi per rectangle.
std::string geometry_csv(const StaircaseLedger& ledger);
/// dqcloud.csv: x1,x2,dq_lo,dq_hi per sample.
std::string dqcloud_csv(const DQCloud& cloud);
json to_json(const DQCloud& cloud);

/// Writes through a temporary sibling file and renames it into place.
/// Throws kIo.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dqlab
