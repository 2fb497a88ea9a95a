#pragma once

#include "modframe/frame.hpp"

namespace modframe {

enum class Profile {
  FreeCommuting,
  PatternExampleLike,
  OrthogonalRanges,
  RangeIncluded,
  NoncommutingAdversarial,
};

const char* to_string(Profile p);
Profile profile_from_string(const std::string& s);

struct FreeCommutingOptions {
  int algebra_dim = 2;
  int rank = 2;
  /// K drawn as a polynomial in the common PSD seed (commutes with the
  /// controllers) vs a generic module-linear operator.
  bool commuting_k = true;
  /// Family composed with a spectral projector of the seed, so the frame
  /// operator is singular and the g-frame lower hypothesis fails while
  /// every commutation hypothesis still holds.
  bool degenerate_family = false;
};

/// All profiles are fully deterministic in the seed.
FrameInstance generate_instance(std::uint64_t seed, Profile profile);

FrameInstance generate_free_commuting(std::uint64_t seed,
                                      const FreeCommutingOptions& opts = {});

/// K2 module-linear with R(K2) orthogonal to R(K1) and R(K2*) orthogonal
/// to R(K1*), built from the flattened SVD of K1. Zero when K1 has full
/// rank.
ModuleOperator derive_orthogonal_partner(const ModuleOperator& k1, std::uint64_t seed);

}  // namespace modframe
