#include "ulab/error.hpp"

namespace ulab {

NumericalBlowup::NumericalBlowup(std::size_t step, const std::string& what)
    : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

}  // namespace ulab
