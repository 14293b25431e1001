#pragma once

// Measure CSV format: header `x1,...,xd,mass`, one support point per row,
// '.' as decimal separator.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "wfr/discrete_measure.hpp"

namespace wfr {

class MeasureFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DiscreteMeasure read_measure_csv(std::istream& in);
DiscreteMeasure read_measure_csv(const std::filesystem::path& path);

void write_measure_csv(std::ostream& out, const DiscreteMeasure& mu);
void write_measure_csv(const std::filesystem::path& path, const DiscreteMeasure& mu);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace wfr
