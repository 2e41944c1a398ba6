#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "snapilp/parse.hpp"

namespace snapilp {

// Clean grandparent over father/mother/parent facts.
Task make_kinship_task(std::uint64_t seed);

// Reachability over a random directed acyclic graph; needs a recursive clause.
Task make_path_task(std::uint64_t seed);

// Grandparent with `noise` of the negatives relabelled positive. The bias
// offers person/1, so fn-first costs are drawn to person(A),person(B).
Task make_noisy_family_task(std::uint64_t seed, double noise = 0.2);

inline constexpr int kNoisyInstances = 10;

// kinship, path, noisy_family_00 .. noisy_family_09.
std::vector<Task> bundled_tasks();
void write_bundled_tasks(const std::filesystem::path& root);

}  // namespace snapilp
