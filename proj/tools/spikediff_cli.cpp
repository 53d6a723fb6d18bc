// Copyright 2026 The spikediff Authors.
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

// Command-line front end. Everything goes through the C API.

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "spikediff/spikediff.h"

namespace {

int exit_code(sd_status status) {
  switch (status) {
    case SD_OK:
      return 0;
    case SD_ERR_INVALID_ARGUMENT:
    case SD_ERR_CONFIG:
    case SD_ERR_IO:
      return 2;
    case SD_ERR_CAPACITY:
      return 3;
    case SD_ERR_NUMERICAL:
      return 4;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse spiked Wigner denoising and diffusion-sampling experiments"};
  app.set_version_flag("--version", std::string(sd_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  const char* subcommands[][2] = {
      {"mse-curve", "MSE against t for each configured denoiser"},
      {"generate", "Run the diffusion sampler and summarize its samples"},
      {"oracle-phase", "Bayes-oracle MSE across the information threshold"},
      {"reduction", "Posterior sampling through the warm-started diffusion"},
      {"cheat-demo", "Identities of the memorizing cheat drift"},
  };
  for (const auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Output path ('-' for stdout); overrides the config");
    sub->add_option("--seed", seed, "Master seed; overrides the config");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::ifstream in(config_path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  if (!in) {
    std::cerr << "error: cannot read " << config_path << '\n';
    return 2;
  }

  sd_run_options opts{};
  opts.threads = threads;
  if (sub->count("--seed") > 0) {
    opts.override_seed = 1;
    opts.seed = seed;
  }
  if (const char* cap = std::getenv("DBL_ENUM_CAP"); cap != nullptr && *cap != '\0') {
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(cap, &end);
    if (errno != 0 || end == cap || *end != '\0' || !(value > 0.0)) {
      std::cerr << "error: DBL_ENUM_CAP must be a positive number, got '" << cap << "'\n";
      return 2;
    }
    opts.override_enum_cap = 1;
    opts.enum_cap = value;
  }

  const sd_status status = sd_run_experiment(sub->get_name().c_str(), buf.str().c_str(),
                                             out_path.empty() ? nullptr : out_path.c_str(),
                                             &opts);
  if (status != SD_OK) std::cerr << "error: " << sd_last_error() << '\n';
  return exit_code(status);
}
