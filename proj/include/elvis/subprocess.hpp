#pragma once

#include <map>
#include <string>

namespace elvis {

struct CommandResult {
  int exit_code = 0;
  std::string output;  // stdout and stderr, interleaved
  double seconds = 0.0;
};

// Runs `command` through /bin/sh. Exit code 127 (command not found) is
// reported as-is; callers decide whether that is an error.
CommandResult run_command(const std::string& command);

// Same as run_command but throws elvis::Error on a nonzero exit, with the
// captured output attached. `what` names the tool in the message.
CommandResult run_checked(const std::string& command, const std::string& what);

// Replaces `{key}` occurrences with the single-quoted shell form of the value.
std::string expand_template(const std::string& tmpl, const std::map<std::string, std::string>& values);

std::string shell_quote(const std::string& s);

}  // namespace elvis
