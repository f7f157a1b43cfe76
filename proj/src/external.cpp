#include "readorder/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <utility>

#include "json.hpp"

namespace readorder {

std::string handshake_line(const std::string& regime) {
  nlohmann::ordered_json j;
  j["proto"] = 1;
  j["regime"] = regime;
  return j.dump() + "\n";
}

std::string request_line(const BoundingBox& left, const BoundingBox& right,
                         double page_width, double page_height,
                         const std::optional<std::string>& left_image_ref,
                         const std::optional<std::string>& right_image_ref) {
  auto box_record = [](const BoundingBox& box, const std::optional<std::string>& ref) {
    nlohmann::ordered_json j;
    j["id"] = box.id;
    j["text"] = box.text;
    j["bbox"] = {box.x_up, box.y_up, box.x_down, box.y_down};
    if (ref) j["image_ref"] = *ref;
    return j;
  };
  nlohmann::ordered_json j;
  j["left"] = box_record(left, left_image_ref);
  j["right"] = box_record(right, right_image_ref);
  j["page"] = {page_width, page_height};
  return j.dump() + "\n";
}

void check_handshake_reply(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("ok") || !j["ok"].is_boolean() ||
      !j["ok"].get<bool>()) {
    throw ProtocolError("bad handshake reply: " + line);
  }
}

double parse_score_reply(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("p") || !j["p"].is_number()) {
    throw ProtocolError("bad score reply: " + line);
  }
  double p = j["p"].get<double>();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ProtocolError("score outside [0,1]: " + line);
  }
  return p;
}

struct ExternalComparator::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;
  bool bytes_seen = false;  // any output at all distinguishes a bad protocol
                            // from a process that never started

  ~Process() {
    if (to_child >= 0) close(to_child);
    if (from_child >= 0) close(from_child);
    if (pid > 0) {
      int status = 0;
      // Stdin is closed; give the child a moment, then force it down.
      for (int i = 0; i < 50; ++i) {
        pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid || done < 0) return;
        usleep(2000);
      }
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
    }
  }

  void spawn(const std::vector<std::string>& command) {
    if (command.empty()) throw SpawnError("empty comparator command");
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
      throw SpawnError("pipe() failed: " + std::string(std::strerror(errno)));
    }
    pid = fork();
    if (pid < 0) throw SpawnError("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      std::vector<char*> argv;
      argv.reserve(command.size() + 1);
      for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child = in_pipe[1];
    from_child = out_pipe[0];
    // Writes to a dead child must surface as errors, not kill the engine.
    signal(SIGPIPE, SIG_IGN);
  }

  void write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = write(to_child, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError("comparator stdin closed: " + std::string(std::strerror(errno)));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(double timeout_seconds) {
    // The timeout bounds the whole reply, not each poll.
    auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    for (;;) {
      auto pos = buffer.find('\n');
      if (pos != std::string::npos) {
        std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        return line;
      }
      auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) throw TimeoutError("comparator reply timed out");
      struct pollfd pfd{from_child, POLLIN, 0};
      int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (ready == 0) throw TimeoutError("comparator reply timed out");
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError("poll() failed: " + std::string(std::strerror(errno)));
      }
      char chunk[4096];
      ssize_t n = read(from_child, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError("read() failed: " + std::string(std::strerror(errno)));
      }
      if (n == 0) throw ProtocolError("comparator closed its output mid-conversation");
      bytes_seen = true;
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }

  bool exited_early() {
    if (pid <= 0) return true;
    // A failed exec shows up as EOF just before the child finishes dying.
    for (int i = 0; i < 100; ++i) {
      int status = 0;
      pid_t done = waitpid(pid, &status, WNOHANG);
      if (done == pid) {
        pid = -1;
        return true;
      }
      if (done < 0) return true;
      usleep(2000);
    }
    return false;
  }
};

ExternalComparator::ExternalComparator(ExternalConfig cfg)
    : cfg_(std::move(cfg)), proc_(std::make_unique<Process>()) {
  proc_->spawn(cfg_.command);
  try {
    proc_->write_all(handshake_line(cfg_.regime));
    std::string reply = proc_->read_line(cfg_.timeout_seconds);
    check_handshake_reply(reply);
  } catch (const ProtocolError&) {
    // exec failure shows up as EOF/EPIPE before any protocol bytes.
    if (!proc_->bytes_seen && proc_->exited_early()) {
      throw SpawnError("comparator process failed to start: " + cfg_.command.front());
    }
    throw;
  }
}

ExternalComparator::~ExternalComparator() = default;

void ExternalComparator::bind_page(double page_width, double page_height) {
  page_width_ = page_width;
  page_height_ = page_height;
}

void ExternalComparator::set_image_ref_provider(ImageRefProvider provider) {
  image_ref_provider_ = std::move(provider);
}

std::string ExternalComparator::exchange(const std::string& request) {
  proc_->write_all(request);
  return proc_->read_line(cfg_.timeout_seconds);
}

PairScore ExternalComparator::score(const BoundingBox& left, const BoundingBox& right) {
  std::optional<std::string> lref;
  std::optional<std::string> rref;
  if (image_ref_provider_) {
    lref = image_ref_provider_(left);
    rref = image_ref_provider_(right);
  }
  return score(left, right, page_width_, page_height_, lref, rref);
}

PairScore ExternalComparator::score(const BoundingBox& left, const BoundingBox& right,
                                    double page_width, double page_height,
                                    const std::optional<std::string>& left_image_ref,
                                    const std::optional<std::string>& right_image_ref) {
  std::string reply = exchange(
      request_line(left, right, page_width, page_height, left_image_ref, right_image_ref));
  return PairScore{parse_score_reply(reply)};
}

}  // namespace readorder
