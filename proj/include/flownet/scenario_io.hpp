#pragma once

#include <string>

#include "flownet/errors.hpp"
#include "flownet/simulator.hpp"

namespace flownet {

/// Malformed scenario document. line and column are 1-based, 0 when the
/// problem is not tied to one location.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses a YAML scenario document. Vectors accept a scalar that is
/// broadcast to the required length; bounds accept "inf". A segment may give
/// xbar_end instead of xbar_slope and may omit xbar_start to continue from
/// the previous segment.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);

}  // namespace flownet
