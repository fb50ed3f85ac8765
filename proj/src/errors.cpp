#include "spa/errors.hpp"

namespace spa {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out = "invalid model";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i == 0 ? ": " : "; ") + items[i];
  return out;
}

}  // namespace

ModelValidityError::ModelValidityError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

}  // namespace spa
