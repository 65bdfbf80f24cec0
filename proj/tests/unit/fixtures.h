// Copyright 2026 The tofec Authors.
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


#pragma once

#include "tofec/model.h"

namespace tofec::testing {

// J = 3 MB, floor 20 + 20B ms, tail 10 + 15B ms, k <= 6, r <= 2.
inline ClassSpec example_class() {
  ClassSpec c;
  c.file_size_mb = 3.0;
  c.k_max = 6;
  c.r_max = 2.0;
  c.params = {20, 20, 10, 15};
  return c;
}

inline SystemSpec example_system(int threads = 16) {
  return SystemSpec{threads, {example_class()}};
}

}  // namespace tofec::testing
