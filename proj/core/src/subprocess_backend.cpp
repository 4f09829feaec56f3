// Copyright 2026 The Rankforge Authors. All Rights Reserved.
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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <deque>
#include <thread>
#include <unordered_map>

#include "rankforge/backends.hpp"
#include "rankforge/error.hpp"

namespace rankforge {

namespace {

using Clock = std::chrono::steady_clock;

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

SubprocessBackend::SubprocessBackend(std::string command, std::string identity, std::vector<std::string> levels,
                                     double timeout_seconds, std::size_t max_in_flight)
    : command_(std::move(command)),
      identity_(std::move(identity)),
      levels_(std::move(levels)),
      timeout_seconds_(timeout_seconds),
      max_in_flight_(std::max<std::size_t>(1, max_in_flight)) {
  if (identity_.empty()) identity_ = "cmd:" + command_;
}

SubprocessBackend::~SubprocessBackend() { stop(); }

void SubprocessBackend::start() {
  if (pid_ > 0) return;
  signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw BackendError("pipe failed: " + std::string(std::strerror(errno)));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw BackendError("pipe failed: " + std::string(std::strerror(errno)));
  }
  const pid_t pid = fork();
  if (pid < 0) throw BackendError("fork failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  set_nonblocking(to_child_);
  set_nonblocking(from_child_);
  read_buffer_.clear();
}

void SubprocessBackend::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 50 && !reaped; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        reaped = true;
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    }
    if (!reaped) {
      kill(pid_, SIGKILL);
      waitpid(pid_, &status, 0);
    }
  }
  pid_ = -1;
}

std::vector<EvalOutcome> SubprocessBackend::evaluate(const std::vector<EvalQuery>& queries) {
  std::vector<EvalOutcome> out(queries.size());
  if (queries.empty()) return out;
  start();

  struct InFlight {
    std::size_t index;
    Clock::time_point deadline;
  };
  std::unordered_map<std::int64_t, InFlight> in_flight;
  std::size_t next_query = 0;
  std::size_t resolved = 0;
  std::string outbuf;
  const auto timeout = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_seconds_));

  auto fail_all = [&](const std::string& why) {
    for (auto& [id, f] : in_flight) out[f.index] = EvalOutcome::failure(why);
    resolved += in_flight.size();
    in_flight.clear();
    for (; next_query < queries.size(); ++next_query) {
      out[next_query] = EvalOutcome::failure(why);
      ++resolved;
    }
  };

  while (resolved < queries.size()) {
    while (in_flight.size() < max_in_flight_ && next_query < queries.size()) {
      const std::int64_t id = next_id_++;
      outbuf += request_to_json(id, queries[next_query]);
      outbuf += '\n';
      in_flight.emplace(id, InFlight{next_query, Clock::now() + timeout});
      ++next_query;
    }

    auto now = Clock::now();
    Clock::time_point earliest = Clock::time_point::max();
    for (const auto& [id, f] : in_flight) earliest = std::min(earliest, f.deadline);
    int wait_ms = 0;
    if (earliest > now) {
      wait_ms = static_cast<int>(
          std::chrono::ceil<std::chrono::milliseconds>(earliest - now).count());
    }

    pollfd fds[2];
    nfds_t nfds = 0;
    fds[nfds++] = {from_child_, POLLIN, 0};
    if (!outbuf.empty()) fds[nfds++] = {to_child_, POLLOUT, 0};
    const int rc = poll(fds, nfds, wait_ms);
    if (rc < 0 && errno != EINTR) throw BackendError("poll failed: " + std::string(std::strerror(errno)));

    if (rc > 0 && nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = write(to_child_, outbuf.data(), outbuf.size());
      if (w > 0) {
        outbuf.erase(0, static_cast<std::size_t>(w));
      } else if (w < 0 && errno != EAGAIN && errno != EINTR) {
        fail_all("backend " + identity_ + " closed its input");
        stop();
        break;
      }
    }

    bool child_gone = false;
    if (rc > 0 && (fds[0].revents & (POLLIN | POLLHUP | POLLERR))) {
      char buf[65536];
      while (true) {
        const ssize_t r = read(from_child_, buf, sizeof buf);
        if (r > 0) {
          read_buffer_.append(buf, static_cast<std::size_t>(r));
          continue;
        }
        if (r == 0) child_gone = true;
        break;
      }
      std::size_t start = 0;
      for (std::size_t nl; (nl = read_buffer_.find('\n', start)) != std::string::npos; start = nl + 1) {
        std::string line = read_buffer_.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::pair<std::int64_t, EvalOutcome> response;
        try {
          response = response_from_json(line);
        } catch (const ParseError& e) {
          read_buffer_.erase(0, nl + 1);
          throw BackendError("backend " + identity_ + ": " + e.what());
        }
        auto it = in_flight.find(response.first);
        if (it == in_flight.end()) continue;  // late answer to a timed-out request
        out[it->second.index] = std::move(response.second);
        in_flight.erase(it);
        ++resolved;
      }
      read_buffer_.erase(0, start);
    }
    if (child_gone) {
      fail_all("backend " + identity_ + " exited");
      stop();
      break;
    }

    now = Clock::now();
    for (auto it = in_flight.begin(); it != in_flight.end();) {
      if (it->second.deadline <= now) {
        out[it->second.index] = EvalOutcome::failure("timeout after " + std::to_string(timeout_seconds_) +
                                                     " s (request " + std::to_string(it->first) + ")");
        ++timeouts_;
        ++resolved;
        it = in_flight.erase(it);
      } else {
        ++it;
      }
    }
  }
  return out;
}

}  // namespace rankforge
