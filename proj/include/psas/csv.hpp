#pragma once

#include <ostream>
#include <span>
#include <string>

namespace psas {

/// %.17g — round-trip exact for doubles.
std::string format_double(double value);

/// Comma-separated, '.' decimal, one header row, Unix line endings.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::span<const std::string> columns);
    void row(std::span<const double> values);

private:
    std::ostream& os_;
    std::size_t columns_;
};

}  // namespace psas
