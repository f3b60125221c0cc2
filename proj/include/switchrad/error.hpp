#pragma once

#include <stdexcept>
#include <string>

namespace switchrad {

enum class Errc {
  invalid_config,
  unsupported_size,
  not_complex_spectrum,
  not_singular,
  insufficient_expansion,
  out_of_range,
  budget_exceeded,
  parse_error,
  validation_error,
  numeric_failure,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Process exit status for the CLI: 2 = parse/validation, 3 = budget, 4 = numeric.
inline int exit_status(Errc code) noexcept {
  switch (code) {
    case Errc::budget_exceeded:
    case Errc::insufficient_expansion:
      return 3;
    case Errc::numeric_failure:
      return 4;
    default:
      return 2;
  }
}

}  // namespace switchrad
