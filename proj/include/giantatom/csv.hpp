#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace giantatom {

constexpr const char* kArtifactVersion = "1.0.0";

/// CSV with `#`-prefixed metadata lines ahead of the header row.
struct CsvTable {
    std::vector<std::string> comments;  // without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or -1.
    int column(const std::string& name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

/// Parses what write_csv emits; throws std::runtime_error on ragged rows.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace giantatom
