#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>

#include "rgym/adversary/adversary.hpp"

namespace rgym::adversary {

/// Where an external adversary lives: a child process spoken to over its
/// standard streams, or a listening Unix-domain socket ("unix:<path>").
struct Endpoint {
  enum class Kind { Command, UnixSocket };
  Kind kind = Kind::Command;
  std::string target;

  static Endpoint parse(std::string_view spec);
  bool operator==(const Endpoint&) const = default;
};

// One JSON object per line:
//   request  {"task", "value", "low", "high", "reward", "prev_reward"}
//   reply    {"value"}
std::string encode_request(const AdversaryRequest& req);
AdversaryRequest decode_request(std::string_view line);
std::string encode_reply(const AdversaryReply& reply);
// Throws DomainError describing the defect (not JSON, missing or
// non-numeric "value", wrong length).
AdversaryReply decode_reply(std::string_view line, std::size_t expected_length);

/// Newline-delimited connection over a stream socket. Owns the descriptor
/// and, for command endpoints, the child process (killed on destruction).
class LineChannel {
 public:
  static LineChannel connect(const Endpoint& endpoint);

  LineChannel(LineChannel&& other) noexcept;
  LineChannel& operator=(LineChannel&& other) noexcept;
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;
  ~LineChannel();

  // Both throw ChannelError; `line` must not contain '\n'.
  void write_line(std::string_view line, double timeout_s);
  std::string read_line(double timeout_s);

 private:
  LineChannel(int fd, pid_t child) : fd_(fd), child_(child) {}
  void close() noexcept;

  int fd_ = -1;
  pid_t child_ = -1;
  std::string buffer_;
};

class ChannelError : public std::runtime_error {
 public:
  enum class Reason { Timeout, Closed, Io };
  ChannelError(Reason r, const std::string& what) : std::runtime_error(what), reason_(r) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

/// One request, one reply. Connection faults, timeouts and malformed
/// replies become AdversaryError tagged with `adversary_id`.
AdversaryReply external_adversary_roundtrip(const AdversaryRequest& req, LineChannel& channel,
                                            double timeout_s, const std::string& adversary_id);

/// Adversary backed by an external endpoint. Connects on first use; after
/// any failure the connection is dropped and re-established on the next
/// request. Requests are strictly sequential.
class ExternalAdversary final : public Adversary {
 public:
  ExternalAdversary(std::string id, Endpoint endpoint, double timeout_s = 5.0);

  AdversaryReply respond(const AdversaryRequest& req, const AdversaryContext& ctx, Rng& rng) override;

 private:
  Endpoint endpoint_;
  double timeout_s_;
  std::optional<LineChannel> channel_;
};

}  // namespace rgym::adversary
