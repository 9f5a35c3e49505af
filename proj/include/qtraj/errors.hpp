#pragma once

#include <stdexcept>
#include <string>

namespace qtraj {

// Precondition violations on caller-supplied values (counts, lengths,
// coefficients, malformed configs).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A position outside the domain a state was defined on.
class OutOfDomain : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A phase or time outside the window a single-pass trajectory covers.
class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace qtraj
