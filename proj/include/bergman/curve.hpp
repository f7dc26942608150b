#pragma once

#include <string>
#include <vector>

namespace bergman {

// One point of a sampled curve: tau, rho, s or u on the abscissa
// depending on the producer.
struct CurveSample {
  double abscissa = 0;
  double value = 0;
  double est_error = 0;
};

// Shortest round-trip decimal form.
std::string fmt_double(double v);

// Header "abscissa,value,est_error", LF line endings.
std::string curve_csv(const std::vector<CurveSample>& samples);

}  // namespace bergman
