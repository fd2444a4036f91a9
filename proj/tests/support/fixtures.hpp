#pragma once

#include <string>
#include <vector>

namespace embedstab::testkit {

// Ranked neighbors of "momentum" in two word2vec runs. The second list only
// names the words shared with the first; filler words fill the other ranks.
inline const std::vector<std::string> kMomentumRun1{
    "inertia",  "kinetic",      "momenta",    "energy", "centripetal",
    "mass-energy", "vorticity", "gravitational", "angular", "relativistic",
    "eigenstate", "spin",       "accelerating", "eigenstates", "velocity"};

inline const std::vector<std::string> kMomentumRun2{
    "inertia",  "momenta",  "kinetic",  "vorticity",   "centripetal",
    "energy",   "gravitational", "velocity", "mass-energy", "filler10",
    "angular",  "filler12", "filler13", "eigenstates", "filler15"};

}  // namespace embedstab::testkit
