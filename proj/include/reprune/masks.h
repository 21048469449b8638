// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REPRUNE_MASKS_H_
#define REPRUNE_MASKS_H_

#include <vector>

#include "reprune/model.h"

namespace reprune {

// Output-channel keep flags per layer plus the in-channel flags they imply.
// keep_in[l] always mirrors keep_out of l's producer (all-true when l reads
// the network input); call Align() after editing keep_out.
struct PruneMask {
  std::vector<std::vector<bool>> keep_out;
  std::vector<std::vector<bool>> keep_in;

  static PruneMask AllTrue(const ModelSnapshot& snapshot);

  void Align(const ModelSnapshot& snapshot);

  int kept(int layer) const;
  std::vector<int> live_out(int layer) const;
  std::vector<int> live_in(int layer) const;
  bool operator==(const PruneMask&) const = default;
};

// Throws Error(kConstraintViolation) if a non-prunable layer loses a channel,
// a layer keeps nothing, or keep_in disagrees with the producer's keep_out;
// Error(kInvalidArgument) on length mismatches.
void CheckMask(const ModelSnapshot& snapshot, const PruneMask& mask);

// Dense snapshot holding only the kept output channels of every layer and
// the in-channels its producer kept. Gammas are filtered alongside; the
// classifier follows the final conv's survivors.
ModelSnapshot ApplyMasks(const ModelSnapshot& snapshot, const PruneMask& mask);

}  // namespace reprune

#endif  // REPRUNE_MASKS_H_
