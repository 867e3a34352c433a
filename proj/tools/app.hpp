// Copyright 2026 The seqtrans Authors
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

// The `seqtrans` command line: gen, train, transcribe, evaluate, enumerate,
// gradcheck. Every option can also come from a flat `key = value` config
// file given with --config; flags on the command line win.

#ifndef SEQTRANS_TOOLS_APP_HPP
#define SEQTRANS_TOOLS_APP_HPP

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace seqtrans::cli {

/// Parses a flat config file. Blank lines and lines starting with '#' are
/// skipped; every other line must be `key = value`.
std::map<std::string, std::string> parse_config(const std::string& text, const std::string& origin);

/// Runs one invocation. Returns the process exit code; summaries go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqtrans::cli

#endif  // SEQTRANS_TOOLS_APP_HPP
