#pragma once

#include <stdexcept>
#include <string>

namespace kdvlab {

// Input violates a documented precondition (CLI exit code 2).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical certificate failed: singular resolvent, blow-up, budget overrun
// (CLI exit code 3).
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace kdvlab
