#pragma once

#include <optional>
#include <string>

#include "blq/core.hpp"

namespace blq {

// INI problem description:
//
//   [problem]
//   name = custom
//   n = 1
//   m = 1
//   A = 2                      ; constant (one number on a square shape = multiple of I)
//   B = poly 2 3               ; ascending polynomial 2 + 3t
//   C1 = poly [-2] [1]         ; bracketed row-major matrix terms
//   H = exp -0.05 1            ; e^{-0.05 t} * 1
//   G = 2
//   [grid]
//   T = 1
//   dt = 0.00390625            ; optional
//   [terminal]
//   kind = smooth              ; smooth | lognormal | zero
//   constant = 1
//   terms = 1*sin(1*W1), 1*cos(2*W2)   ; coef*f(freq*Wi), f in sin, cos, lin
//   direction = 1              ; optional, length n
//
// Lognormal terminals use keys a, b, c. Omitted coefficients are zero
// (R has no default).
struct LoadedConfig {
  ProblemSpec spec;
  std::optional<double> dt;
};

// INVALID_ARGUMENT on malformed content.
LoadedConfig parse_config(const std::string& text);
// IO_ERROR if the file cannot be read.
LoadedConfig load_config(const std::string& path);

// Coefficient from its text form for a rows x cols shape.
Coefficient parse_coefficient(const std::string& text, int rows, int cols);

}  // namespace blq
