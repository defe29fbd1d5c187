// Copyright 2026 The Triplehop Authors.
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

#ifndef TRIPLEHOP_CLI_HPP_
#define TRIPLEHOP_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace triplehop {

// Everything a command needs. Every key can come from the config file
// ("key = value" lines) or from a --key flag; flags win.
struct RunConfig {
  std::filesystem::path kg;         // triple file or serialized KG directory
  std::string kg_format = "auto";   // auto | pipe | tab
  std::filesystem::path qa;
  std::filesystem::path templates;
  std::filesystem::path text;       // corpus lines for build-corpus
  std::filesystem::path spans;      // optional span annotations
  std::filesystem::path index;      // defaults to <out>/index.bin
  std::filesystem::path out = "run";
  std::string question;
  int hops = 1;
  std::vector<int> k;               // per-hop overrides
  int k_single = 5;
  int k_base = 3;
  std::string embedder = "builtin";
  std::string reader = "builtin";   // builtin | remote
  std::string reader_url;
  std::size_t batch_size = 1;
  std::string eval_mode = "strict";
  std::string entity_set_mode = "replace";
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Throws ConfigError on values that no command can use.
void validate(const RunConfig& config, const std::string& command);

int cmd_ingest(const RunConfig& config, std::ostream& out);
int cmd_index(const RunConfig& config, std::ostream& out);
int cmd_retrieve(const RunConfig& config, std::ostream& out);
int cmd_evaluate(const RunConfig& config, std::ostream& out);
int cmd_build_corpus(const RunConfig& config, std::ostream& out);
int cmd_generate_qa(const RunConfig& config, std::ostream& out);

// Parses argv (subcommand, flags, --config file) and dispatches. Errors are
// printed to `err` and give exit code 1.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

// Environment variable carrying the remote reader's bearer token.
inline constexpr const char* kReaderTokenEnv = "TRIPLEHOP_READER_TOKEN";

}  // namespace triplehop

#endif  // TRIPLEHOP_CLI_HPP_
