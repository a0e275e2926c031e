#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace zefoz {

/// Thrown for unreadable inputs or unwritable outputs (CLI exit code 3).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> header;       // column names with units
    std::vector<std::vector<double>> rows;
};

/// Formats a double with full round-trip precision ("%.17g" semantics, but
/// using the shortest representation that round-trips).
std::string format_double(double value);

/// Writes a CSV (comma separated, header row, '.' decimal, LF endings)
/// atomically: the file appears complete or not at all.
void write_csv(const std::string& path, const CsvTable& table);

/// Writes pretty-printed JSON with stable (sorted) key order, atomically.
void write_json(const std::string& path, const nlohmann::ordered_json& doc);

/// Reads a CSV produced by write_csv (or any comma-separated numeric file
/// with a header row). Throws IoError naming the offending line on parse
/// failures.
CsvTable read_csv(const std::string& path);

}  // namespace zefoz
