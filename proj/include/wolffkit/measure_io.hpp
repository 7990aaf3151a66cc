#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "wolffkit/measure.hpp"

namespace wolffkit {

/// Malformed measure or point input; `line` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Text format, one directive per line, `#` starts a comment:
///
///     dim 3
///     component dirac_sum
///       atom 0 0 0 weight 1
///     end
///     component radial_density
///       piece coeff 1 gamma -2 from 0 to 1
///       scale 2
///       restrict center 0 0 0 radius 0.5
///     end
///     component ball_cloud
///       ball center 1 0 0 radius 0.1 weight 0.3
///     end
///
/// `scale` and `restrict` lines apply to their component in order. The
/// measure is the sum of its components.
Measure parse_measure(std::istream& in);
Measure parse_measure_string(const std::string& text);
Measure read_measure_file(const std::string& path);

/// Writes a file that parses back to the same measure; scalings and
/// restrictions of sums are distributed over the parts.
void write_measure(std::ostream& out, const Measure& mu);
std::string measure_to_string(const Measure& mu);
void write_measure_file(const std::string& path, const Measure& mu);

/// Whitespace-separated coordinates, one point per line.
std::vector<Point> parse_points(std::istream& in, int dim);
std::vector<Point> read_points_file(const std::string& path, int dim);

}  // namespace wolffkit
