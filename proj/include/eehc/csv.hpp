#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eehc {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest decimal string that round-trips to the same double
// (std::to_chars). "nan"/"inf" spelled out for sentinel columns.
std::string format_number(double v);
std::string format_number(std::int64_t v);

// RFC-4180 quoting, '\n' line endings, '.' decimal separator.
std::string csv_escape(const std::string& field);

std::string csv_render(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

// Numeric convenience: every cell formatted with format_number.
std::string csv_render_numeric(const std::vector<std::string>& header,
                               const std::vector<std::vector<double>>& rows);

// Throws IoError on any filesystem failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Minimal reader for round-trip checks: splits a csv_render product back
// into cells (handles quoted fields).
std::vector<std::vector<std::string>> csv_parse(const std::string& text);

}  // namespace eehc
