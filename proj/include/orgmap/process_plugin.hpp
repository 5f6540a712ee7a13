// JSON-lines subprocess bridge: spawn a plugin process once, send one JSON
// object per line on its stdin, read one JSON object per line from its
// stdout. Used for external entity extractors and rankers.
#pragma once

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <string>
#include <vector>

#include "orgmap/jsonl.hpp"
#include "orgmap/util.hpp"

namespace orgmap {

class ProcessLineClient {
 public:
  explicit ProcessLineClient(const std::vector<std::string>& argv) {
    if (argv.empty()) throw PluginError("plugin command is empty");
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw PluginError("pipe() failed for plugin " + argv[0]);
    pid_ = fork();
    if (pid_ < 0) throw PluginError("fork() failed for plugin " + argv[0]);
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      std::vector<char*> cargv;
      for (auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
      cargv.push_back(nullptr);
      execvp(cargv[0], cargv.data());
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    name_ = argv[0];
  }

  ProcessLineClient(const ProcessLineClient&) = delete;
  ProcessLineClient& operator=(const ProcessLineClient&) = delete;

  ~ProcessLineClient() {
    if (in_fd_ >= 0) close(in_fd_);
    if (out_fd_ >= 0) close(out_fd_);
    if (pid_ > 0) {
      int status = 0;
      if (waitpid(pid_, &status, WNOHANG) == 0) {
        kill(pid_, SIGTERM);
        waitpid(pid_, &status, 0);
      }
    }
  }

  json call(const json& request) {
    std::string line = request.dump();
    line.push_back('\n');
    size_t off = 0;
    while (off < line.size()) {
      ssize_t n = write(in_fd_, line.data() + off, line.size() - off);
      if (n <= 0) throw PluginError("plugin " + name_ + ": write failed (process gone?)");
      off += static_cast<size_t>(n);
    }
    std::string reply;
    char c;
    while (true) {
      ssize_t n = read(out_fd_, &c, 1);
      if (n <= 0) throw PluginError("plugin " + name_ + ": no reply (process exited?)");
      if (c == '\n') break;
      reply.push_back(c);
    }
    json j = json::parse(reply, nullptr, false);
    if (j.is_discarded()) throw PluginError("plugin " + name_ + ": invalid JSON reply: " + reply);
    return j;
  }

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string name_;
};

}  // namespace orgmap
