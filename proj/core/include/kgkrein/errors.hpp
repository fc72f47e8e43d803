#pragma once

#include <stdexcept>
#include <string>

namespace kg {

enum class ErrorKind {
  structural,    // malformed inputs: singular gram, dimension mismatch
  precondition,  // operation called outside its contract
  input,         // bad parameter value
  contour,       // integration contour touches spectrum
  resolvent_set, // z outside rho(h,k); detail = smallest singular value
  singularity,   // near-kernel where a trivial kernel is required
  conditioning,  // eigenvector basis too ill-conditioned
  consistency,   // internal cross-check failed on certified input
  accuracy,      // quadrature or fit did not converge
  splitting,     // h0 - k1^2 indefinite
  sampling,      // not enough valid samples
  horizon,       // time integral tail above budget
  unsupported,   // documented limitation hit
  config,        // config file schema violation
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what, double detail = 0.0)
      : std::runtime_error(what), kind_(kind), detail_(detail) {}

  ErrorKind kind() const { return kind_; }
  double detail() const { return detail_; }

private:
  ErrorKind kind_;
  double detail_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::structural: return "structural";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::input: return "input";
    case ErrorKind::contour: return "contour";
    case ErrorKind::resolvent_set: return "resolvent_set";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::splitting: return "splitting";
    case ErrorKind::sampling: return "sampling";
    case ErrorKind::horizon: return "horizon";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

} // namespace kg
