#pragma once

#include <stdexcept>
#include <string>

namespace ortho3r {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Negative, non-finite or otherwise unusable design parameters or inputs.
class InvalidInput : public Error {
public:
  using Error::Error;
};

// Zero-pattern of (d2, r2, d3, r3) that is not one of the ten studied cases.
class OutOfFamily : public Error {
public:
  using Error::Error;
};

// The quartic elimination needs d2 > 0; the trig-linear reduction needs d2 == 0.
class DegenerateElimination : public Error {
public:
  using Error::Error;
};

// Raster extent does not contain the whole workspace.
class GridTooSmall : public Error {
public:
  using Error::Error;
};

}  // namespace ortho3r
