// Copyright 2026 The ppdl Authors
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

#ifndef PPDL_STATUS_MACROS_H_
#define PPDL_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define PPDL_RETURN_IF_ERROR(expr)               \
  do {                                           \
    const absl::Status _ppdl_status = (expr);    \
    if (!_ppdl_status.ok()) return _ppdl_status; \
  } while (0)

#define PPDL_CONCAT_INNER(a, b) a##b
#define PPDL_CONCAT(a, b) PPDL_CONCAT_INNER(a, b)

#define PPDL_ASSIGN_OR_RETURN_IMPL(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                               \
  if (!statusor.ok()) return statusor.status();          \
  lhs = std::move(statusor).value()

// Evaluates `rexpr` (an absl::StatusOr<T>) and either assigns the value to
// `lhs` or returns the error from the enclosing function.
#define PPDL_ASSIGN_OR_RETURN(lhs, rexpr) \
  PPDL_ASSIGN_OR_RETURN_IMPL(PPDL_CONCAT(_ppdl_statusor_, __LINE__), lhs, rexpr)

#endif  // PPDL_STATUS_MACROS_H_
