#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mrpoisson {

/// Reals with 17 significant digits, '.' decimal separator.
[[nodiscard]] std::string csv_number(double v);
[[nodiscard]] std::string csv_number(std::int64_t v);
/// Quotes fields containing ',', '"', CR or LF; doubles embedded quotes.
[[nodiscard]] std::string csv_escape(const std::string& field);

/// Header plus rows of already formatted fields.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> fields);
    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }

    void write(std::ostream& out) const;
    /// Throws IoError naming the path.
    void save(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace mrpoisson
