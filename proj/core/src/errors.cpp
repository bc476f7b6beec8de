#include "nullwave/errors.hpp"

#include <cstdio>

namespace nullwave {

namespace {

std::string describe_hyperbolicity(double t, double x1, double x2, double x3, double margin) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "hyperbolicity lost at t=%.6g, x=(%.4g, %.4g, %.4g): |1 - B.du| = %.6g",
                t, x1, x2, x3, margin);
  return buf;
}

std::string describe_blowup(double t, const std::string& field) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "non-finite value in %s at t=%.6g", field.c_str(), t);
  return buf;
}

} // namespace

HyperbolicityLoss::HyperbolicityLoss(double t, double x1, double x2, double x3, double margin)
    : Error(describe_hyperbolicity(t, x1, x2, x3, margin)), t_(t), x_{x1, x2, x3}, margin_(margin) {}

BlowupError::BlowupError(double t, const std::string& what_field)
    : Error(describe_blowup(t, what_field)), t_(t) {}

} // namespace nullwave
