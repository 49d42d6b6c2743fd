#include "mrpoisson/csv.hpp"

#include "mrpoisson/error.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace mrpoisson {

std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_number(std::int64_t v)
{
    return std::to_string(v);
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

void CsvTable::add_row(std::vector<std::string> fields)
{
    if (fields.size() != header_.size()) {
        throw Error("csv row has " + std::to_string(fields.size()) + " fields, header has " +
                    std::to_string(header_.size()));
    }
    rows_.push_back(std::move(fields));
}

void CsvTable::write(std::ostream& out) const
{
    const auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) {
                out << ',';
            }
            out << csv_escape(fields[i]);
        }
        out << "\r\n";
    };
    line(header_);
    for (const auto& r : rows_) {
        line(r);
    }
}

void CsvTable::save(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write(out);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace mrpoisson
