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

#include <stdexcept>
#include <string>

namespace tofec {

// Malformed or out-of-domain input: bad parameters, bad config, bad files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric routine could not bracket or converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested operating point has no stable code (normalized load >= L).
class OverloadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tofec
