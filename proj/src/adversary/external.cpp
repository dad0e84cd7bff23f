#include "rgym/adversary/external.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "json.hpp"
#include "rgym/core/errors.hpp"

namespace rgym::adversary {

using nlohmann::json;

namespace {

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return static_cast<int>(std::max<long long>(0, left.count()));
}

std::chrono::steady_clock::time_point deadline_after(double seconds) {
  return std::chrono::steady_clock::now() +
         std::chrono::microseconds(static_cast<long long>(std::max(0.0, seconds) * 1e6));
}

Vector numeric_array(const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing \"") + key + "\"");
  const json& a = j.at(key);
  if (!a.is_array()) throw DomainError(std::string("\"") + key + "\" is not an array");
  Vector out;
  out.reserve(a.size());
  for (const auto& x : a) {
    if (!x.is_number()) throw DomainError(std::string("\"") + key + "\" has a non-numeric element");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

Endpoint Endpoint::parse(std::string_view spec) {
  constexpr std::string_view kUnix = "unix:";
  if (spec.starts_with(kUnix)) return {Kind::UnixSocket, std::string(spec.substr(kUnix.size()))};
  if (spec.empty()) throw ConfigError("command", "external adversary needs an endpoint command");
  return {Kind::Command, std::string(spec)};
}

std::string encode_request(const AdversaryRequest& req) {
  json j = json::object();
  j["task"] = req.task_description;
  j["value"] = req.value;
  j["low"] = req.region_low;
  j["high"] = req.region_high;
  j["reward"] = req.current_reward;
  j["prev_reward"] = req.previous_reward;
  return j.dump();
}

AdversaryRequest decode_request(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("request is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("request is not a JSON object");
  AdversaryRequest req;
  req.task_description = j.value("task", std::string{});
  req.value = numeric_array(j, "value");
  req.region_low = numeric_array(j, "low");
  req.region_high = numeric_array(j, "high");
  req.current_reward = j.value("reward", 0.0);
  req.previous_reward = j.value("prev_reward", 0.0);
  return req;
}

std::string encode_reply(const AdversaryReply& reply) {
  json j = json::object();
  j["value"] = reply.value;
  return j.dump();
}

AdversaryReply decode_reply(std::string_view line, std::size_t expected_length) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw DomainError("malformed reply (not JSON): " + std::string(line.substr(0, 80)));
  }
  if (!j.is_object()) throw DomainError("malformed reply: not a JSON object");
  AdversaryReply reply;
  try {
    reply.value = numeric_array(j, "value");
  } catch (const DomainError& e) {
    throw DomainError(std::string("malformed reply: ") + e.what());
  }
  if (reply.value.size() != expected_length)
    throw DomainError("malformed reply: expected " + std::to_string(expected_length) + " values, got " +
                      std::to_string(reply.value.size()));
  for (double x : reply.value) {
    if (!std::isfinite(x)) throw DomainError("malformed reply: non-finite value");
  }
  return reply;
}

LineChannel LineChannel::connect(const Endpoint& endpoint) {
  if (endpoint.kind == Endpoint::Kind::UnixSocket) {
    const int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) throw ChannelError(ChannelError::Reason::Io, std::strerror(errno));
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (endpoint.target.size() >= sizeof(addr.sun_path)) {
      ::close(fd);
      throw ChannelError(ChannelError::Reason::Io, "socket path too long");
    }
    std::memcpy(addr.sun_path, endpoint.target.c_str(), endpoint.target.size() + 1);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      const std::string err = std::strerror(errno);
      ::close(fd);
      throw ChannelError(ChannelError::Reason::Io, "connect " + endpoint.target + ": " + err);
    }
    return LineChannel(fd, -1);
  }

  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
    throw ChannelError(ChannelError::Reason::Io, std::strerror(errno));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw ChannelError(ChannelError::Reason::Io, std::strerror(errno));
  }
  if (pid == 0) {
    // Child: the socket end becomes stdin and stdout.
    ::setpgid(0, 0);
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", endpoint.target.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(fds[1]);
  return LineChannel(fds[0], pid);
}

LineChannel::LineChannel(LineChannel&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      child_(std::exchange(other.child_, -1)),
      buffer_(std::move(other.buffer_)) {}

LineChannel& LineChannel::operator=(LineChannel&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    child_ = std::exchange(other.child_, -1);
    buffer_ = std::move(other.buffer_);
  }
  return *this;
}

LineChannel::~LineChannel() { close(); }

void LineChannel::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (child_ > 0) {
    // Give the child a moment to exit on EOF, then kill it.
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(child_, nullptr, WNOHANG) == child_) {
        ::kill(-child_, SIGKILL);
        child_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ::kill(-child_, SIGKILL);
    ::waitpid(child_, nullptr, 0);
    child_ = -1;
  }
}

void LineChannel::write_line(std::string_view line, double timeout_s) {
  std::string data(line);
  data.push_back('\n');
  const auto deadline = deadline_after(timeout_s);
  std::size_t sent = 0;
  while (sent < data.size()) {
    pollfd p{fd_, POLLOUT, 0};
    const int r = ::poll(&p, 1, remaining_ms(deadline));
    if (r == 0) throw ChannelError(ChannelError::Reason::Timeout, "write timed out");
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ChannelError(ChannelError::Reason::Io, std::strerror(errno));
    }
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (errno == EPIPE || errno == ECONNRESET)
        throw ChannelError(ChannelError::Reason::Closed, "endpoint closed the connection");
      throw ChannelError(ChannelError::Reason::Io, std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string LineChannel::read_line(double timeout_s) {
  const auto deadline = deadline_after(timeout_s);
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, remaining_ms(deadline));
    if (r == 0) throw ChannelError(ChannelError::Reason::Timeout, "no reply within the timeout");
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ChannelError(ChannelError::Reason::Io, std::strerror(errno));
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n == 0) throw ChannelError(ChannelError::Reason::Closed, "endpoint closed the connection");
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (errno == ECONNRESET) throw ChannelError(ChannelError::Reason::Closed, "endpoint closed the connection");
      throw ChannelError(ChannelError::Reason::Io, std::strerror(errno));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

AdversaryReply external_adversary_roundtrip(const AdversaryRequest& req, LineChannel& channel,
                                            double timeout_s, const std::string& adversary_id) {
  try {
    const auto deadline = deadline_after(timeout_s);
    channel.write_line(encode_request(req), timeout_s);
    const double left = static_cast<double>(remaining_ms(deadline)) / 1000.0;
    return decode_reply(channel.read_line(left), req.value.size());
  } catch (const ChannelError& e) {
    throw AdversaryError(adversary_id, e.what());
  } catch (const DomainError& e) {
    throw AdversaryError(adversary_id, e.what());
  }
}

ExternalAdversary::ExternalAdversary(std::string id, Endpoint endpoint, double timeout_s)
    : Adversary(std::move(id)), endpoint_(std::move(endpoint)), timeout_s_(timeout_s) {}

AdversaryReply ExternalAdversary::respond(const AdversaryRequest& req, const AdversaryContext&, Rng&) {
  try {
    if (!channel_) channel_.emplace(LineChannel::connect(endpoint_));
    return external_adversary_roundtrip(req, *channel_, timeout_s_, id());
  } catch (const ChannelError& e) {
    channel_.reset();
    throw AdversaryError(id(), e.what());
  } catch (...) {
    channel_.reset();
    throw;
  }
}

}  // namespace rgym::adversary
