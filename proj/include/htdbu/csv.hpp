#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace htdbu {

using CsvRecord = std::vector<std::string>;

// RFC 4180: comma separated, double-quoted fields may contain commas,
// newlines and doubled quotes. Accepts LF or CRLF line endings. Blank lines
// are skipped.
std::vector<CsvRecord> parse_csv(std::string_view text);

std::vector<CsvRecord> read_csv_file(const std::filesystem::path& path);

std::string quote_csv_field(std::string_view field);
void write_csv_record(std::ostream& out, std::span<const std::string> fields);

// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double value);

// Strict full-string parse; false on trailing junk or non-finite values.
bool parse_number(std::string_view text, double& out);

}  // namespace htdbu
