#include "tlc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace tlc {

namespace {

bool looks_numeric(const std::string& s, double& v)
{
    if (s.empty()) {
        return false;
    }
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells)
{
    if (cells.size() != header_.size()) {
        throw std::invalid_argument("row has " + std::to_string(cells.size()) + " cells, header has " +
                                    std::to_string(header_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string CsvTable::to_string() const
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += csv_escape(cells[i]);
        }
        out += "\r\n";
    };
    line(header_);
    for (const auto& r : rows_) {
        line(r);
    }
    return out;
}

void CsvTable::write(const std::string& path) const
{
    write_text(path, to_string());
}

CsvTable CsvTable::parse(const std::string& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                if (i < text.size() && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
                    throw std::runtime_error("characters after closing quote");
                }
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        if (c == '"') {
            if (field_started) {
                throw std::runtime_error("quote inside unquoted field");
            }
            quoted = true;
            field_started = true;
            ++i;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            field_started = false;
            ++i;
        } else if (c == '\r' || c == '\n') {
            record.push_back(std::move(field));
            field.clear();
            field_started = false;
            records.push_back(std::move(record));
            record.clear();
            i += (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
        } else {
            field += c;
            field_started = true;
            ++i;
        }
    }
    if (quoted) {
        throw std::runtime_error("unterminated quoted field");
    }
    if (field_started || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (records.empty()) {
        throw std::runtime_error("missing header row");
    }
    CsvTable table(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header_.size()) {
            throw std::runtime_error("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                                     " cells, header has " + std::to_string(table.header_.size()));
        }
        table.rows_.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable CsvTable::read(const std::string& path)
{
    return parse(read_text(path));
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for '" + path + "'");
    }
}

ValidationReport validate_file(const std::string& path)
{
    ValidationReport rep;
    rep.path = path;
    try {
        const std::string text = read_text(path);
        const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
        if (json) {
            const auto doc = nlohmann::json::parse(text);
            if (doc.dump(2) + "\n" != text) {
                rep.ok = false;
                rep.message = "JSON does not re-serialize identically";
            }
            return rep;
        }
        const auto table = CsvTable::parse(text);
        if (table.to_string() != text) {
            rep.ok = false;
            rep.message = "CSV does not re-serialize identically";
            return rep;
        }
        for (std::size_t r = 0; r < table.rows().size(); ++r) {
            for (const auto& cell : table.rows()[r]) {
                double v = 0.0;
                if (looks_numeric(cell, v) && format_number(v) != cell) {
                    rep.ok = false;
                    rep.message = "row " + std::to_string(r + 1) + ": number '" + cell + "' does not round-trip";
                    return rep;
                }
            }
        }
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.message = e.what();
    }
    return rep;
}

}  // namespace tlc
