#include "wikicite/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace wikicite {

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf.data(), ptr);
}

std::optional<std::vector<std::string>> read_csv_record(std::istream& in) {
  if (in.peek() == std::char_traits<char>::eof()) return std::nullopt;
  std::vector<std::string> fields(1);
  bool quoted = false;
  bool field_started = false;
  for (int ch = in.get(); ch != std::char_traits<char>::eof(); ch = in.get()) {
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          fields.back().push_back('"');
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      fields.emplace_back();
      field_started = false;
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      break;
    } else {
      fields.back().push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  return fields;
}

}  // namespace wikicite
