#include "meshrag/backend_subprocess.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

#include "meshrag/errors.hpp"
#include "meshrag/protocol.hpp"

namespace meshrag {

SubprocessBackend::SubprocessBackend(std::vector<std::string> argv,
                                     double timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
  if (argv.empty()) throw BackendError("subprocess backend needs a command");

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw BackendError("pipe() failed: " + std::string(std::strerror(errno)));
  }

  const pid_t pid = fork();
  if (pid < 0) throw BackendError("fork() failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    // Only reached when exec fails.
    const char* msg = "exec failed\n";
    ssize_t ignored = write(STDERR_FILENO, msg, std::strlen(msg));
    (void)ignored;
    _exit(127);
  }

  pid_ = pid;
  stdin_fd_ = to_child[1];
  stdout_fd_ = from_child[0];
  close(to_child[0]);
  close(from_child[1]);

  reader_ = std::thread([this] { reader_loop(); });
}

SubprocessBackend::~SubprocessBackend() {
  if (stdin_fd_ >= 0) close(stdin_fd_);  // EOF lets a well-behaved worker exit
  if (reader_.joinable()) reader_.join();
  if (stdout_fd_ >= 0) close(stdout_fd_);
  if (pid_ > 0) {
    int status = 0;
    // Give the worker a moment, then escalate.
    for (int tries = 0; tries < 50; ++tries) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
  }
}

void SubprocessBackend::reader_loop() {
  std::string buffer;
  char chunk[65536];
  for (;;) {
    const ssize_t n = read(stdout_fd_, chunk, sizeof(chunk));
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos;
    while ((pos = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      if (line.empty()) continue;
      const int id = peek_part_id(line);
      std::promise<std::string> target;
      bool found = false;
      {
        std::lock_guard<std::mutex> lock(pending_mu_);
        const auto it = pending_.find(id);
        if (it != pending_.end()) {
          target = std::move(it->second);
          pending_.erase(it);
          found = true;
        }
      }
      if (found) target.set_value(std::move(line));
      // Unmatched lines (worker chatter) are dropped.
    }
  }
  // EOF or read error: fail everything still in flight.
  std::lock_guard<std::mutex> lock(pending_mu_);
  dead_ = true;
  death_reason_ = "backend process closed its output";
  for (auto& [id, promise] : pending_) {
    promise.set_exception(std::make_exception_ptr(
        BackendError(death_reason_, id)));
  }
  pending_.clear();
}

int SubprocessBackend::next_wire_id() {
  std::lock_guard<std::mutex> lock(pending_mu_);
  return segment_counter_++;
}

std::string SubprocessBackend::roundtrip(int wire_id, const std::string& line) {
  std::future<std::string> future;
  {
    std::lock_guard<std::mutex> lock(pending_mu_);
    if (dead_) throw BackendError(death_reason_, wire_id);
    auto [it, inserted] = pending_.emplace(wire_id, std::promise<std::string>{});
    if (!inserted) throw BackendError("duplicate in-flight wire id", wire_id);
    future = it->second.get_future();
  }

  {
    std::lock_guard<std::mutex> lock(write_mu_);
    std::string framed = line;
    framed.push_back('\n');
    std::size_t off = 0;
    while (off < framed.size()) {
      const ssize_t n = write(stdin_fd_, framed.data() + off, framed.size() - off);
      if (n <= 0) {
        std::lock_guard<std::mutex> plock(pending_mu_);
        pending_.erase(wire_id);
        throw BackendError("backend unreachable: stdin write failed", wire_id);
      }
      off += static_cast<std::size_t>(n);
    }
  }

  if (future.wait_for(std::chrono::duration<double>(timeout_seconds_)) !=
      std::future_status::ready) {
    std::lock_guard<std::mutex> lock(pending_mu_);
    pending_.erase(wire_id);
    throw BackendError("backend timeout after " +
                           std::to_string(timeout_seconds_) + " s",
                       wire_id);
  }
  return future.get();
}

GenerationResult SubprocessBackend::generate(const GenerationJob& job) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string reply = roundtrip(
      job.part_id, encode_generate_request(job.part_id, job.prompt_cloud, job.seed));

  GenerationResult out;
  out.part_id = job.part_id;
  out.mesh = decode_generate_response(reply, job.part_id);
  out.backend_latency =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::array<MaskCandidate, 3> SubprocessBackend::segment_prompt(
    const PointCloud& cloud, int prompt_index) {
  const int wire_id = next_wire_id();
  const std::string reply =
      roundtrip(wire_id, encode_segment_request(wire_id, cloud, prompt_index));
  return decode_segment_response(reply, wire_id, cloud.size(), prompt_index);
}

}  // namespace meshrag
