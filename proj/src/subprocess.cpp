#include "elvis/subprocess.hpp"

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>

#include "elvis/error.hpp"

namespace elvis {

CommandResult run_command(const std::string& command) {
  const auto start = std::chrono::steady_clock::now();
  const std::string full = "{ " + command + " ; } 2>&1";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) throw Error("cannot spawn shell for: " + command);
  CommandResult r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CommandResult run_checked(const std::string& command, const std::string& what) {
  CommandResult r = run_command(command);
  if (r.exit_code == 127) throw Error(what + ": tool not found (" + command + ")\n" + r.output);
  if (r.exit_code != 0)
    throw Error(what + " exited with status " + std::to_string(r.exit_code) + "\n" + r.output);
  return r;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string expand_template(const std::string& tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  for (std::size_t pos = 0; pos < tmpl.size();) {
    if (tmpl[pos] == '{') {
      const auto close = tmpl.find('}', pos);
      if (close != std::string::npos) {
        const auto it = values.find(tmpl.substr(pos + 1, close - pos - 1));
        if (it != values.end()) {
          out += shell_quote(it->second);
          pos = close + 1;
          continue;
        }
      }
    }
    out += tmpl[pos++];
  }
  return out;
}

}  // namespace elvis
