#pragma once

#include <optional>

namespace flownet {

/// Controller gains. theta only parameterises the gain-bound certificate;
/// when unset it is chosen per disturbance instance.
struct Gains {
  double gamma_e = 0.0;
  double gamma_c = 0.0;
  double gamma_p = 0.0;
  double gamma_l = 0.0;
  std::optional<double> theta;

  /// gamma = gamma_p^2 gamma_c / gamma_l.
  double gamma_eff() const { return gamma_p * gamma_p * gamma_c / gamma_l; }

  void validate() const;
};

}  // namespace flownet
