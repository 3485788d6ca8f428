#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace reasonsum::resources {

namespace detail {
struct EmbeddedFile {
  const char* name;
  const char* data;
  std::size_t size;
};
extern const EmbeddedFile kFiles[];
extern const std::size_t kFileCount;
}  // namespace detail

/// Embedded copy of `resources/<name>`; throws missing_template if absent.
std::string_view get(std::string_view name);
bool contains(std::string_view name);
std::vector<std::string> list(std::string_view prefix = {});

}  // namespace reasonsum::resources
