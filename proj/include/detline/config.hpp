#pragma once

#include "detline/boundary.hpp"
#include "detline/errors.hpp"
#include "detline/odeprop.hpp"
#include "detline/problem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace detline {

// Schema or syntax problem in a problem file; `field` names the offending
// entry ("boundary.M", "potential1", ...).
class ConfigError : public InputError {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ZeroModeHint { Auto, Force, Off };

std::string to_string(ZeroModeHint hint);

struct ProblemConfig {
  std::string source;
  double a = 0.0;
  double b = 1.0;
  int r = 1;
  std::vector<std::vector<std::string>> potential1;  // r x r expression text
  std::vector<std::vector<std::string>> potential2;
  ParamMap parameters;
  std::optional<BoundarySpec> boundary;
  Controls controls;
  ZeroModeHint extract_zero_mode = ZeroModeHint::Auto;
  int oracle_check = 0;  // 0: off
  int designated_row = -1;

  Problem problem1() const;
  Problem problem2() const;
};

ProblemConfig load_problem(const std::string& path);
ProblemConfig parse_problem(const std::string& text, const std::string& source = "<string>");

// Default rtol, honouring DETLINE_RTOL.
double default_rtol();

}  // namespace detline
