#include "gridplan/error.hpp"

namespace gridplan {

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error([&] {
        std::string message = "validation failed";
        for (const auto& v : violations) message += "\n  - " + v;
        return message;
      }()),
      violations_(std::move(violations)) {}

}  // namespace gridplan
