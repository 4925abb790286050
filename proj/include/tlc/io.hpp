#pragma once

// CSV tables and JSON metadata sidecars.

#include <string>
#include <vector>

namespace tlc {

/// Column-oriented table written as RFC 4180 CSV with a header row.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    std::string to_string() const;
    void write(const std::string& path) const;

    /// Throws std::runtime_error on malformed quoting or ragged rows.
    static CsvTable parse(const std::string& text);
    static CsvTable read(const std::string& path);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Shortest form of %.17g; parses back to the same double.
std::string format_number(double v);

/// Quote a field if it contains a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

struct ValidationReport {
    std::string path;
    bool ok = true;
    std::string message;
};

/// Re-reads a .csv or .json output and checks that re-serializing it
/// reproduces the file byte for byte; CSV numbers must round-trip through
/// double.
ValidationReport validate_file(const std::string& path);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace tlc
