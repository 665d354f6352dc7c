#pragma once

#include <optional>
#include <string_view>

#include "exchg/core.hpp"

namespace exchg {

// Bundled walkthrough instances, also exposed as `replay --figure` targets.
//
// fig1: d = 8, agents L@0, H@1, L@5, H@7, L@8. Placing the facility by the
// standing positions invites agent 4 (H@7) to report L, shifting the optimum
// from 5 to 7 and trading up afterwards.
Instance fig1_instance();

// fig2: d = 8, agents L@0, L@1, H@5, H@6.5, H@8. The exchange-aware optimum
// moves from 0 to 8 when agent 4 (H@6.5) reports L, again to its benefit.
Instance fig2_instance();

// Tokens "fig1" and "fig2".
std::optional<Instance> builtin_instance(std::string_view token);

}  // namespace exchg
