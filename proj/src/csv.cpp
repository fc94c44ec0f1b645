#include "psas/csv.hpp"

#include <cstdio>

#include "psas/types.hpp"

namespace psas {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::span<const std::string> columns)
    : os_(os), columns_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i)
        os_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != columns_) throw ConfigError("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        os_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

}  // namespace psas
