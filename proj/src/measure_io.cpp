#include "wfr/measure_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace wfr {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_number(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') {
    field.remove_prefix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw MeasureFormatError("line " + std::to_string(line_no) + ": cannot parse '" +
                             std::string(field) + "' as a number");
  }
  return value;
}

}  // namespace

DiscreteMeasure read_measure_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw MeasureFormatError("empty measure file");
  }
  const auto header = split(trim(line));
  const auto dim = static_cast<Index>(header.size()) - 1;
  if (dim < 1 || trim(header.back()) != "mass") {
    throw MeasureFormatError("header must read x1,...,xd,mass");
  }
  for (Index k = 0; k < dim; ++k) {
    if (trim(header[static_cast<std::size_t>(k)]) != "x" + std::to_string(k + 1)) {
      throw MeasureFormatError("header column " + std::to_string(k + 1) + " must be x" +
                               std::to_string(k + 1));
    }
  }
  std::vector<double> coords;
  std::vector<double> masses;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split(trim(line));
    if (static_cast<Index>(fields.size()) != dim + 1) {
      throw MeasureFormatError("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(dim + 1) + " fields");
    }
    for (Index k = 0; k < dim; ++k) {
      coords.push_back(parse_number(fields[static_cast<std::size_t>(k)], line_no));
    }
    masses.push_back(parse_number(fields.back(), line_no));
  }
  const auto n = static_cast<Index>(masses.size());
  Matrix pts(n, dim);
  Vector w(n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < dim; ++k) {
      pts(i, k) = coords[static_cast<std::size_t>(i * dim + k)];
    }
    w[i] = masses[static_cast<std::size_t>(i)];
  }
  try {
    return DiscreteMeasure(std::move(pts), std::move(w));
  } catch (const std::invalid_argument& e) {
    throw MeasureFormatError(e.what());
  }
}

DiscreteMeasure read_measure_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MeasureFormatError("cannot open " + path.string());
  }
  return read_measure_csv(in);
}

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_measure_csv(std::ostream& out, const DiscreteMeasure& mu) {
  for (Index k = 0; k < mu.dim(); ++k) {
    out << 'x' << (k + 1) << ',';
  }
  out << "mass\n";
  for (Index i = 0; i < mu.size(); ++i) {
    for (Index k = 0; k < mu.dim(); ++k) {
      out << format_double(mu.points()(i, k)) << ',';
    }
    out << format_double(mu.weight(i)) << '\n';
  }
}

void write_measure_csv(const std::filesystem::path& path, const DiscreteMeasure& mu) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_measure_csv(out, mu);
}

}  // namespace wfr
