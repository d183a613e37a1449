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

#ifndef PPDL_CLI_H_
#define PPDL_CLI_H_

#include <ostream>

#include "absl/status/status.h"

namespace ppdl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;

// InvalidArgument, NotFound and OutOfRange are configuration problems;
// everything else (singular fits, exceeded caps) is numerical.
int ExitCodeFor(const absl::Status& status);

// Runs `ppdl <subcommand> ...`. Summaries go to `out`, diagnostics to `err`.
int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace ppdl

#endif  // PPDL_CLI_H_
