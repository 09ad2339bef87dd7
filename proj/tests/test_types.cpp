#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "wavedamp/types.hpp"

using namespace wavedamp;

TEST_CASE("defaults are the reference string") {
  const StringParams p;
  CHECK(p.length == 10.0);
  CHECK(p.internal_damping == 0.08);
  CHECK(p.stiffness == 1.0);
  CHECK(p.modal_spacing() == doctest::Approx(std::numbers::pi / 10.0));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("parameter validation") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(StringParams({0.0, 0.1, 1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StringParams({10.0, -0.1, 1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StringParams({10.0, 0.1, 0.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StringParams({nan, 0.1, 1.0}).validate(), InvalidArgument);
  CHECK_NOTHROW(StringParams({10.0, 0.0, 1.0}).validate());

  const StringParams p;
  CHECK_NOTHROW(Damper({4.5, 0.0}).validate(p));
  CHECK_THROWS_AS(Damper({0.0, 1.0}).validate(p), InvalidArgument);
  CHECK_THROWS_AS(Damper({10.0, 1.0}).validate(p), InvalidArgument);
  CHECK_THROWS_AS(Damper({4.5, -1.0}).validate(p), InvalidArgument);
  CHECK_THROWS_AS(Damper({4.5, nan}).validate(p), InvalidArgument);
}

TEST_CASE("forcing names round-trip") {
  for (Forcing f : {Forcing::Uniform, Forcing::BoundaryLeft}) {
    CHECK(forcing_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(forcing_from_string("left"), InvalidArgument);
}

TEST_CASE("every failure is a wavedamp::Error") {
  CHECK_THROWS_AS(throw SingularPoint("x"), Error);
  CHECK_THROWS_AS(throw PoleEncountered("x"), Error);
  CHECK_THROWS_AS(throw NormDiverged("x"), Error);
  CHECK_THROWS_AS(throw InvalidGrid("x"), Error);
  CHECK_THROWS_AS(throw SingularPencil("x"), Error);
  CHECK_THROWS_AS(throw UnstableSystem("x"), Error);
  CHECK_THROWS_AS(throw FeedthroughNonzero("x"), Error);
  CHECK_THROWS_AS(throw NoConvergence("x"), Error);
  CHECK_THROWS_AS(throw InvalidArgument("x"), std::runtime_error);
}
