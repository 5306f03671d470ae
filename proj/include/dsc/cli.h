// Copyright 2026 The DSC Codec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Subcommands: gen, fit, encode, decode, sweep-rd,
// sweep-robust, report. Run `dsc --help` for flags.

#ifndef DSC_CLI_H_
#define DSC_CLI_H_

#include <iosfwd>

namespace dsc {

// Returns the process exit status. Diagnostics go to `err`, usage and
// stdout-bound CSV to `out`.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dsc

#endif  // DSC_CLI_H_
