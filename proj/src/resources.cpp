#include "reasonsum/resources.hpp"

#include "reasonsum/error.hpp"

namespace reasonsum::resources {

namespace {
const detail::EmbeddedFile* find(std::string_view name) {
  for (std::size_t i = 0; i < detail::kFileCount; ++i) {
    if (name == detail::kFiles[i].name) return &detail::kFiles[i];
  }
  return nullptr;
}
}  // namespace

std::string_view get(std::string_view name) {
  const auto* file = find(name);
  if (file == nullptr) {
    throw Error(ErrorCode::missing_template, "no embedded resource '" + std::string(name) + "'");
  }
  return {file->data, file->size};
}

bool contains(std::string_view name) { return find(name) != nullptr; }

std::vector<std::string> list(std::string_view prefix) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < detail::kFileCount; ++i) {
    std::string_view name = detail::kFiles[i].name;
    if (name.substr(0, prefix.size()) == prefix) names.emplace_back(name);
  }
  return names;
}

}  // namespace reasonsum::resources
