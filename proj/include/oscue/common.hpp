#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscue {

// Internal scalar for the polynomial / kernel core.  Toeplitz systems for
// sharply peaked weights reach cond ~ 1e14 at desk scale; 80-bit long double
// keeps the resulting kernel values good to ~1e-7 where double would drown
// the signal.  Public surfaces stay in double.
using xreal = long double;
using xcplx = std::complex<xreal>;
using cplx  = std::complex<double>;

inline constexpr double pi     = std::numbers::pi_v<double>;
inline constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;
inline constexpr xreal  pi_x     = std::numbers::pi_v<xreal>;
inline constexpr xreal  two_pi_x = 2.0L * std::numbers::pi_v<xreal>;

// Angle into [0, 2pi).
double wrap_angle(double theta);

// sin(x)/x, stable through x = 0 (Taylor below 1e-4).
double sinc(double x);
xreal sinc_x(xreal x);

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientResolution : NumericError { using NumericError::NumericError; };
struct IllConditioned         : NumericError { using NumericError::NumericError; };
struct NotPositiveDefinite    : NumericError { using NumericError::NumericError; };
struct DegreeOutOfRange       : NumericError { using NumericError::NumericError; };
struct OutOfRegime            : NumericError { using NumericError::NumericError; };
struct GridTooCoarse          : NumericError { using NumericError::NumericError; };
struct CostCap                : NumericError { using NumericError::NumericError; };
struct OverflowRisk           : NumericError { using NumericError::NumericError; };
struct CheckFailed            : NumericError { using NumericError::NumericError; };

// Worker cap for parallel_for; 0 = hardware concurrency.  Set once at startup
// (CLI --threads / OSCUE_THREADS); library default is single-threaded.
void set_max_workers(int n);
int max_workers();

// Runs fn(i) for i in [0, n).  Each index writes only its own output slot, so
// results are bitwise independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace oscue
