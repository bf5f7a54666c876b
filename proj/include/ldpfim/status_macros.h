// Copyright 2026 The ldpfim Authors
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

#ifndef LDPFIM_STATUS_MACROS_H_
#define LDPFIM_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define LDPFIM_CONCAT_INNER_(a, b) a##b
#define LDPFIM_CONCAT_(a, b) LDPFIM_CONCAT_INNER_(a, b)

#define LDPFIM_RETURN_IF_ERROR(expr)            \
  do {                                          \
    const absl::Status _status = (expr);        \
    if (!_status.ok()) return _status;          \
  } while (0)

#define LDPFIM_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                 \
  if (!tmp.ok()) return tmp.status();                 \
  lhs = std::move(tmp).value()

#define LDPFIM_ASSIGN_OR_RETURN(lhs, rexpr) \
  LDPFIM_ASSIGN_OR_RETURN_IMPL_(            \
      LDPFIM_CONCAT_(_status_or_, __LINE__), lhs, rexpr)

#endif  // LDPFIM_STATUS_MACROS_H_
