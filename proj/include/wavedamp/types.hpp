#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wavedamp {

using Complex = std::complex<double>;

// Physical constants of the string: length l, internal damping d, stiffness k.
struct StringParams {
  double length = 10.0;
  double internal_damping = 0.08;
  double stiffness = 1.0;

  // Throws InvalidArgument unless length > 0, stiffness > 0, damping >= 0.
  void validate() const;

  // Distance pi*sqrt(k)/l between resonances of the undamped string.
  double modal_spacing() const;
};

// Single point damper of viscosity `gain` located at `position`.
struct Damper {
  double position = 4.5;
  double gain = 10.0;

  // Requires 0 < position < params.length and gain >= 0.
  void validate(const StringParams& params) const;
};

enum class Forcing {
  Uniform,       // b = 1, homogeneous Dirichlet ends
  BoundaryLeft,  // b = 0, q(0,t) = u(t), q(l,t) = 0
};

std::string_view to_string(Forcing forcing);
Forcing forcing_from_string(std::string_view name);

// Error taxonomy. Every failure surfaces as one of these exception types.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Closed form is 0/0 or ill-conditioned at this s; use a limit or series path.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

// The denominator eta vanishes at a genuine pole.
class PoleEncountered : public Error {
 public:
  using Error::Error;
};

class NormDiverged : public Error {
 public:
  using Error::Error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class SingularPencil : public Error {
 public:
  using Error::Error;
};

class UnstableSystem : public Error {
 public:
  using Error::Error;
};

class FeedthroughNonzero : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace wavedamp
