#include "exchg/builtin.hpp"

namespace exchg {

Instance fig1_instance() {
  using enum PreferenceType;
  return {8.0, {0.0, 1.0, 5.0, 7.0, 8.0}, {Like, Dislike, Like, Dislike, Like}};
}

Instance fig2_instance() {
  using enum PreferenceType;
  return {8.0, {0.0, 1.0, 5.0, 6.5, 8.0}, {Like, Like, Dislike, Dislike, Dislike}};
}

std::optional<Instance> builtin_instance(std::string_view token) {
  if (token == "fig1") return fig1_instance();
  if (token == "fig2") return fig2_instance();
  return std::nullopt;
}

}  // namespace exchg
