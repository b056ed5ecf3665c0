//
// Copyright 2026 The agedp Authors
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
//

#ifndef AGEDP_STATUS_MACROS_H_
#define AGEDP_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define AGEDP_STATUS_CONCAT_INNER_(a, b) a##b
#define AGEDP_STATUS_CONCAT_(a, b) AGEDP_STATUS_CONCAT_INNER_(a, b)

#define AGEDP_RETURN_IF_ERROR(expr)          \
  do {                                       \
    absl::Status agedp_status_ = (expr);     \
    if (!agedp_status_.ok()) {               \
      return agedp_status_;                  \
    }                                        \
  } while (false)

#define AGEDP_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                 \
  if (!tmp.ok()) {                                   \
    return std::move(tmp).status();                  \
  }                                                  \
  lhs = std::move(tmp).value()

// Evaluates an absl::StatusOr<T> expression and either binds the value to
// `lhs` or propagates the error.
#define AGEDP_ASSIGN_OR_RETURN(lhs, expr) \
  AGEDP_ASSIGN_OR_RETURN_IMPL_(           \
      AGEDP_STATUS_CONCAT_(agedp_statusor_, __LINE__), lhs, expr)

#endif  // AGEDP_STATUS_MACROS_H_
