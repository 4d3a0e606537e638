#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace levy {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx iu{0.0, 1.0};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// invalid parameter or evaluation point outside the analyticity domain
struct DomainError : Error {
    using Error::Error;
};

// model calibration produced an infeasible parameter
struct CalibrationError : Error {
    using Error::Error;
};

// request exceeds what double precision supports
struct CapabilityError : Error {
    using Error::Error;
};

// a numerical procedure failed (non-finite sample, contour collision, ...)
struct NumericError : Error {
    using Error::Error;
};

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace levy
