#include "wavedamp/types.hpp"

#include <cmath>
#include <numbers>

namespace wavedamp {

void StringParams::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("string length must be positive and finite");
  }
  if (!(stiffness > 0.0) || !std::isfinite(stiffness)) {
    throw InvalidArgument("stiffness must be positive and finite");
  }
  if (!(internal_damping >= 0.0) || !std::isfinite(internal_damping)) {
    throw InvalidArgument("internal damping must be non-negative and finite");
  }
}

double StringParams::modal_spacing() const {
  return std::numbers::pi * std::sqrt(stiffness) / length;
}

void Damper::validate(const StringParams& params) const {
  if (!(position > 0.0) || !(position < params.length)) {
    throw InvalidArgument("damper position must lie strictly inside (0, length)");
  }
  if (!(gain >= 0.0) || std::isnan(gain)) {
    throw InvalidArgument("damper gain must be non-negative");
  }
}

std::string_view to_string(Forcing forcing) {
  switch (forcing) {
    case Forcing::Uniform:
      return "uniform";
    case Forcing::BoundaryLeft:
      return "boundary";
  }
  return "unknown";
}

Forcing forcing_from_string(std::string_view name) {
  if (name == "uniform") return Forcing::Uniform;
  if (name == "boundary") return Forcing::BoundaryLeft;
  throw InvalidArgument("unknown forcing '" + std::string(name) +
                        "' (expected uniform|boundary)");
}

}  // namespace wavedamp
