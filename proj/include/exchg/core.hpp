#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace exchg {

// Absolute tolerance for classifying welfare and utility ties. Kept well
// below the smallest distance that matters in the bundled instances (0.5).
inline constexpr double kEps = 1e-9;

enum class PreferenceType : std::uint8_t {
  Like,     // wants the facility close
  Dislike,  // wants the facility far away
};

// Accepts exactly "L" or "H".
std::optional<PreferenceType> parse_preference(std::string_view token);
std::string_view preference_token(PreferenceType t);
PreferenceType flipped(PreferenceType t);

// Reported type vector; may differ from an instance's true types.
using PreferenceProfile = std::vector<PreferenceType>;

// A facility location problem on the segment [0, d]: agent i sits at
// positions[i] and has true type types[i]. Duplicate positions are fine;
// agents are identified by index throughout.
struct Instance {
  double segment_length = 0.0;
  std::vector<double> positions;
  PreferenceProfile types;

  int size() const { return static_cast<int>(positions.size()); }

  // Throws std::invalid_argument when malformed (empty, length mismatch,
  // nonpositive segment, position off the segment, or a non-finite value).
  void validate() const;

  bool operator==(const Instance&) const = default;
};

// Relocation of agents over the original location multiset: agent i ends up
// at positions[perm[i]]. perm is a permutation of 0..n-1, so the multiset of
// held locations is preserved structurally.
struct Assignment {
  std::vector<int> perm;

  static Assignment identity(int n);

  int size() const { return static_cast<int>(perm.size()); }
  bool is_permutation() const;

  bool operator==(const Assignment&) const = default;
};

// Facility point plus a relocation; the object utilities are evaluated on.
struct Outcome {
  double facility = 0.0;
  Assignment assignment;
};

struct Violation {
  int agent = 0;
  PreferenceType misreport = PreferenceType::Like;
  double truthful_utility = 0.0;
  double deviating_utility = 0.0;

  double gain() const { return deviating_utility - truthful_utility; }
};

// Result of an exhaustive misreport scan.
// Invariant: truthful <=> violations.empty() <=> max_gain == 0.
struct AuditReport {
  bool truthful = true;
  std::vector<Violation> violations;
  double max_gain = 0.0;
};

// Utility of an agent of type t held at `location` with the facility at
// `facility`: d - |location - facility| for Like, |location - facility| for
// Dislike. Throws std::invalid_argument when facility or location is off the
// segment. Result is in [0, d].
double utility(double facility, double location, PreferenceType t,
               double segment_length);

// Sum of utilities under the instance's own (true) types. Throws when the
// assignment does not fit the instance.
double social_welfare(const Outcome& outcome, const Instance& inst);

// Same, scored under an explicit type vector (used for reported profiles).
double social_welfare(const Outcome& outcome, const Instance& inst,
                      const PreferenceProfile& types);

// u(0, x, t) + u(d, x, t). Identically d for every x in [0, d] and both
// types; the identity behind the endpoint lottery's expected welfare.
double endpoint_utility_sum(double position, PreferenceType t,
                            double segment_length);

}  // namespace exchg
