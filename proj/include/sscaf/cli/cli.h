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

// The `sscaf` command-line tool. Every subcommand writes only inside its
// --out-dir, records the settings it ran with in resolved_config.txt, and
// reports failures as a single "sscaf: error: ..." line.

#ifndef SSCAF_CLI_CLI_H_
#define SSCAF_CLI_CLI_H_

#include <ostream>

namespace sscaf::cli {

// Runs the tool with the given arguments (argv[0] is the program name) and
// returns the process exit status.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sscaf::cli

#endif  // SSCAF_CLI_CLI_H_
