#pragma once

#include <stdexcept>
#include <string>

namespace lemnikit {

// Base for all numerical failures raised by the library.  Parse and
// usage errors are reported with std::invalid_argument instead.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct non_convergence : numeric_error {
  using numeric_error::numeric_error;
};
struct division_near_zero : numeric_error {
  using numeric_error::numeric_error;
};
struct seed_not_found : numeric_error {
  using numeric_error::numeric_error;
};
struct critical_level_too_close : numeric_error {
  using numeric_error::numeric_error;
};
struct trace_overflow : numeric_error {
  using numeric_error::numeric_error;
};
struct argument_jump_too_large : numeric_error {
  using numeric_error::numeric_error;
};
struct flow_stalled : numeric_error {
  using numeric_error::numeric_error;
};
struct level_at_critical_value : numeric_error {
  using numeric_error::numeric_error;
};
struct solver_not_converged : numeric_error {
  using numeric_error::numeric_error;
};
struct continuation_diverged : numeric_error {
  using numeric_error::numeric_error;
};
struct critical_point_hit : numeric_error {
  using numeric_error::numeric_error;
};

}  // namespace lemnikit
