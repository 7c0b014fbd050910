#pragma once

#include <vector>

#include "tfs/plcp.hpp"

namespace tfs::oracle {

// Every LCP solution found by trying all 2^n complementary supports.
std::vector<RatVector> lcp_support_solutions(const LcpInstance& inst);

}  // namespace tfs::oracle

#include "tfs/games.hpp"

namespace tfs::oracle {

// sigma wins from start against every memoryless opponent strategy, checked
// by playing each strategy pair out.
bool memdet_beats_all(const GraphGame& g, int player, const std::vector<uint32_t>& sigma);

}  // namespace tfs::oracle

#include "tfs/arrival.hpp"

namespace tfs::oracle {

// All profiles with total count <= budget that profile_valid accepts.
std::vector<RunProfile> accepted_profiles(const SArrivalInstance& inst, uint64_t budget);

}  // namespace tfs::oracle
