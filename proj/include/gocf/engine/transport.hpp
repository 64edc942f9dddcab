#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>

#include "gocf/engine/mock_engine.hpp"

namespace gocf {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newline-delimited duplex channel to an engine.
class Transport {
 public:
  virtual ~Transport() = default;
  // Throws TransportError when the peer is gone.
  virtual void send_line(const std::string& line) = 0;
  // nullopt on timeout; throws TransportError on EOF.
  virtual std::optional<std::string> receive_line(std::chrono::milliseconds timeout) = 0;
  virtual void restart() = 0;
};

// Runs MockEngine::handle_line in-process, preserving the wire format.
class InProcessMockTransport final : public Transport {
 public:
  void send_line(const std::string& line) override { pending_.push_back(MockEngine::handle_line(line)); }
  std::optional<std::string> receive_line(std::chrono::milliseconds) override {
    if (pending_.empty()) return std::nullopt;
    std::string s = std::move(pending_.front());
    pending_.pop_front();
    return s;
  }
  void restart() override { pending_.clear(); }

 private:
  std::deque<std::string> pending_;
};

// Child process launched through /bin/sh -c, stdin/stdout piped.
class ChildProcessTransport final : public Transport {
 public:
  explicit ChildProcessTransport(std::string command) : command_(std::move(command)) {
    ::signal(SIGPIPE, SIG_IGN);
    launch();
  }
  ~ChildProcessTransport() override { shutdown(); }
  ChildProcessTransport(const ChildProcessTransport&) = delete;
  ChildProcessTransport& operator=(const ChildProcessTransport&) = delete;

  void send_line(const std::string& line) override {
    std::string buf = line + "\n";
    std::size_t off = 0;
    while (off < buf.size()) {
      ssize_t n = ::write(to_child_, buf.data() + off, buf.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("engine write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> receive_line(std::chrono::milliseconds timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd pfd{from_child_, POLLIN, 0};
      int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (rc == 0) return std::nullopt;
      char chunk[1 << 14];
      ssize_t n = ::read(from_child_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("engine read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw TransportError("engine closed its output (crashed?)");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void restart() override {
    shutdown();
    launch();
  }

 private:
  void launch() {
    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) throw TransportError("pipe() failed");
    pid_ = ::fork();
    if (pid_ < 0) throw TransportError("fork() failed");
    if (pid_ == 0) {
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
    ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
    buffer_.clear();
  }

  void shutdown() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
      int status = 0;
      // Closing stdin asks a well-behaved engine to exit; give it a moment.
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          return;
        }
        ::usleep(10000);
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  std::string command_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace gocf
