// Copyright 2026 The dbmatch Authors
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

#ifndef DBMATCH_CLI_H_
#define DBMATCH_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace dbmatch {

// Entry point of the dbmatch tool. args[0] is the program name.
//
//   dbmatch capacity     --config c.json [--format csv|json] [--out path]
//   dbmatch simulate     --config c.json [--threads k] [--seed s] ...
//   dbmatch sweep        --config c.json [--rates r1,r2,...] ...
//   dbmatch detect-bench --config c.json ...
//
// Results go to --out (written only after the computation succeeds) or to
// `out`. Returns 0 on success and nonzero on usage, configuration, cap or I/O
// errors, with a message on `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace dbmatch

#endif  // DBMATCH_CLI_H_
