// Copyright 2026 The sscaf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSCAF_COMMON_ERROR_H_
#define SSCAF_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace sscaf {

// Root of every exception thrown by the library. Subclasses name the failure
// category so callers (and the CLI) can map them to diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SSCAF_DEFINE_ERROR(Name)        \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

SSCAF_DEFINE_ERROR(IoError);
SSCAF_DEFINE_ERROR(FormatError);
SSCAF_DEFINE_ERROR(UnsupportedError);
SSCAF_DEFINE_ERROR(ConfigError);
SSCAF_DEFINE_ERROR(InputError);
SSCAF_DEFINE_ERROR(ValidationError);
SSCAF_DEFINE_ERROR(DegenerateError);
SSCAF_DEFINE_ERROR(ShapeError);
SSCAF_DEFINE_ERROR(NumericError);
SSCAF_DEFINE_ERROR(LoadError);

#undef SSCAF_DEFINE_ERROR

}  // namespace sscaf

#endif  // SSCAF_COMMON_ERROR_H_
