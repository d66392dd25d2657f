// Copyright 2026 The Admatch Authors.
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

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "admatch/common/error.hpp"
#include "admatch/common/log.hpp"
#include "commands.hpp"

namespace {

constexpr int kUsageExit = 2;

// Turns key=value items of a config file into leading flags. Keys at the top
// or under [default] apply to whichever command runs; keys under [name] only
// to that command. Flags on the command line come later and win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw CLI::ArgumentMismatch("--config", 1, 0);
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  // The command is the first bare word naming a subcommand.
  std::size_t cmd_pos = rest.size();
  std::string cmd;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i].rfind("-", 0) != 0 && app.get_subcommand_no_throw(rest[i]) != nullptr) {
      cmd_pos = i;
      cmd = app.get_subcommand_no_throw(rest[i])->get_name();
      break;
    }
  }

  std::vector<std::string> global_flags, command_flags;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    std::string section = item.parents.empty() ? "default" : item.parents.front();
    if (section != "default" && section != cmd) continue;
    std::string value;
    for (std::size_t k = 0; k < item.inputs.size(); ++k) value += (k ? "," : "") + item.inputs[k];
    const std::string flag = "--" + item.name + "=" + value;
    if (item.name == "seed" || item.name == "verbose") {
      global_flags.push_back(flag);
    } else {
      command_flags.push_back(flag);
    }
  }

  std::vector<std::string> out(global_flags);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    out.push_back(rest[i]);
    if (i == cmd_pos) out.insert(out.end(), command_flags.begin(), command_flags.end());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"admatch: two-tower ad matching with vector retrieval and split pre-ranking"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 7;
  bool verbose = true;
  app.add_option("--seed", seed, "Seed for every random draw")->capture_default_str();
  app.add_flag("--verbose,!--quiet", verbose, "Log progress to standard error");
  app.add_option("--config", "Key=value config file; command-line flags override it");
  admatch::cli::add_data_commands(app, seed);
  admatch::cli::add_model_commands(app, seed);
  admatch::cli::add_serving_commands(app, seed);
  app.parse_complete_callback([&] { admatch::log::set_verbose(verbose); });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args, app);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // Requirement checks run before unknown flags are reported; name the
    // unknown flag first since it is usually the real mistake.
    std::vector<std::string> extras = app.remaining();
    for (const CLI::App* sub : app.get_subcommands()) {
      const auto more = sub->remaining();
      extras.insert(extras.end(), more.begin(), more.end());
    }
    if (!extras.empty() && dynamic_cast<const CLI::RequiredError*>(&e) != nullptr) {
      std::cerr << "error: usage: unknown argument: " << extras.front() << '\n';
      return kUsageExit;
    }
    std::cerr << "error: usage: " << e.what() << '\n';
    if (e.get_exit_code() == 0) return 0;
    return kUsageExit;
  } catch (const admatch::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
