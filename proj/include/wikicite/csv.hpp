#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wikicite {

/// RFC 4180 field quoting: quoted only when it contains a comma, quote or
/// line break.
std::string csv_field(std::string_view value);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

/// Reads one CSV record (quoted fields may span lines). nullopt at end of input.
std::optional<std::vector<std::string>> read_csv_record(std::istream& in);

}  // namespace wikicite
