// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef OVERNET_IDS_HPP_
#define OVERNET_IDS_HPP_

#include <cstdint>
#include <cstdlib>

namespace overnet {

// Unique immutable numerical node identifier. Total order via the integer
// order; all ids in one simulation are distinct.
using NodeId = std::int64_t;

// Distance measure over identifiers. The protocol only ever compares
// distances, never inspects them otherwise.
inline std::uint64_t dist(NodeId a, NodeId b) {
  return a >= b ? static_cast<std::uint64_t>(a - b)
                : static_cast<std::uint64_t>(b - a);
}

}  // namespace overnet

#endif  // OVERNET_IDS_HPP_
