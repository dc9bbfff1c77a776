#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "logcc/grid.hpp"
#include "logcc/measures.hpp"

namespace logcc::io {

/// Shortest decimal that reads back to the same double; "inf" for +infinity.
std::string format_double(double v);
/// Inverse of format_double; throws ParseError at (line, column) on bad text.
double parse_double(std::string_view text, std::size_t line, std::size_t column);

/// {dim, bounds, shape, values} with "inf" for +infinity.
nlohmann::json to_json(const ExtendedGridFunction& f);
ExtendedGridFunction grid_function_from_json(std::string_view text);
ExtendedGridFunction grid_function_from_value(const nlohmann::json& j);

/// Two columns x,value on a uniform 1D grid.
std::string to_csv(const ExtendedGridFunction& f);
ExtendedGridFunction grid_function_from_csv(std::string_view text);

/// Header "# dim=1,even=true" then rows x1[,x2],weight.
std::string to_csv(const DiscreteMeasure& m);
DiscreteMeasure measure_from_csv(std::string_view text);

std::string read_text(const std::string& path);
void write_text(const std::string& path, std::string_view text);

/// By extension: .csv means the two-column format, anything else JSON.
ExtendedGridFunction read_grid_function(const std::string& path);
void write_grid_function(const std::string& path, const ExtendedGridFunction& f);
DiscreteMeasure read_measure(const std::string& path);
void write_measure(const std::string& path, const DiscreteMeasure& m);

}  // namespace logcc::io
