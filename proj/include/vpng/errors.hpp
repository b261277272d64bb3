// Copyright 2026 The VPNG Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VPNG_ERRORS_HPP_
#define VPNG_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace vpng {

// Base for everything we throw on purpose. Catch this at tool boundaries.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define VPNG_DEFINE_ERROR(Name)                              \
  struct Name : Error {                                      \
    explicit Name(const std::string& what) : Error(what) {}  \
  }

VPNG_DEFINE_ERROR(DimensionMismatch);
VPNG_DEFINE_ERROR(NotSymmetric);
VPNG_DEFINE_ERROR(SingularSystem);
VPNG_DEFINE_ERROR(NotPSD);
VPNG_DEFINE_ERROR(SingularCovariance);
VPNG_DEFINE_ERROR(NonFiniteLikelihood);
VPNG_DEFINE_ERROR(NonFiniteGradient);
VPNG_DEFINE_ERROR(NonFiniteParameter);
VPNG_DEFINE_ERROR(NonIntegerRating);
VPNG_DEFINE_ERROR(BadRating);
VPNG_DEFINE_ERROR(DegenerateLabels);
VPNG_DEFINE_ERROR(FactorsUninitialized);
VPNG_DEFINE_ERROR(NotFeedForward);
VPNG_DEFINE_ERROR(NotSupported);
VPNG_DEFINE_ERROR(BadMagic);
VPNG_DEFINE_ERROR(TruncatedFile);
VPNG_DEFINE_ERROR(ConfigError);
VPNG_DEFINE_ERROR(AllRunsDiverged);

#undef VPNG_DEFINE_ERROR

// assert-like helper for API preconditions that should stay on in release
inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(what);
}

}  // namespace vpng

#endif  // VPNG_ERRORS_HPP_
