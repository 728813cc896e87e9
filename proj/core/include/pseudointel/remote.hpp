#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "pseudointel/core.hpp"
#include "pseudointel/learner.hpp"

namespace pseudointel {

/// Newline-delimited JSON black-box protocol, version 1.
///
///   client -> {"type":"hello","protocol_version":1,"codec":"symbol"}
///   server -> {"type":"hello","protocol_version":1,"codec":"symbol","model":"...","deterministic":true}
///   client -> {"type":"query","id":1,"x":"<base64>","coins":"<u64>"}
///   server -> {"type":"response","id":1,"y":"<base64>","coins":"<u64>"}
///          |  {"type":"error","id":1,"code":"BAD_PAYLOAD","detail":"..."}
///   client -> {"type":"bye"}            server -> {"type":"bye","queries":N}
///
/// "coins" is optional. When present it is the full state of the caller's
/// stream; the server answers from that state and returns the advanced state,
/// so a remote model consumes randomness exactly as an in-process one would.
/// Without it the server draws from its own keyed stream
/// (seed/session/<k>/query/<id>). Ids must strictly increase within a session.
inline constexpr int kProtocolVersion = 1;

std::string base64_encode(std::string_view bytes);
/// Strict RFC 4648 decoding with padding; nullopt on malformed input.
std::optional<std::string> base64_decode(std::string_view text);

/// Line-oriented byte channel over a pair of file descriptors.
class LineChannel {
 public:
  LineChannel(int read_fd, int write_fd, bool owns_fds);
  LineChannel(LineChannel&& other) noexcept;
  LineChannel& operator=(LineChannel&& other) noexcept;
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;
  ~LineChannel();

  /// Appends '\n'. Throws Error{io_error} when the peer is gone.
  void write_line(std::string_view line);
  /// nullopt at end of stream. A negative timeout waits forever; otherwise
  /// throws Error{io_error} when no complete line arrives in time.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout = std::chrono::milliseconds(-1));

  void close();

 private:
  int read_fd_ = -1;
  int write_fd_ = -1;
  bool owns_ = false;
  std::string buffer_;
};

/// Two connected in-process channel ends (a socketpair).
std::pair<LineChannel, LineChannel> make_channel_pair();

struct ServeOptions {
  std::uint64_t seed = 0;
  std::size_t session_index = 0;
  Codec codec = Codec::symbol;
  /// Hang up without a bye after this many answers (fault injection).
  std::optional<std::size_t> max_queries;
};

/// Serves one session until bye or end of stream; returns the queries answered.
std::size_t serve_session(const Model& model, LineChannel& channel, const ServeOptions& options);

/// Transport "stdio" serves a single session on stdin/stdout. Transport
/// "tcp:HOST:PORT" accepts connections one after another (PORT 0 picks a free
/// port; the bound address is written to stderr) until max_sessions is reached.
/// Throws Error{io_error} when the transport cannot be bound.
void serve_model(const Model& model, const std::string& transport, const ServeOptions& options,
                 std::optional<std::size_t> max_sessions = std::nullopt);

class TcpListener {
 public:
  TcpListener(const std::string& host, std::uint16_t port);
  TcpListener(TcpListener&&) noexcept;
  TcpListener(const TcpListener&) = delete;
  ~TcpListener();

  std::uint16_t port() const noexcept { return port_; }
  LineChannel accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

class ChildProcess;

/// Client end of the protocol. respond() is one round trip; timeouts and
/// disconnects surface as Error{black_box_failure}, a query the server
/// rejects as unsupported as Error{unsupported_query}. Single owner.
class RemoteModel final : public Model {
 public:
  /// Performs the handshake; throws Error{protocol_error} on a version or
  /// codec mismatch.
  RemoteModel(LineChannel channel, std::chrono::milliseconds timeout,
              std::optional<Codec> expected_codec = std::nullopt,
              std::shared_ptr<ChildProcess> process = nullptr);
  ~RemoteModel() override;

  std::string label() const override { return "remote:" + server_label_; }
  Response respond(const Query& x, Rng& rng) const override;
  bool deterministic() const override { return deterministic_; }

  Codec codec() const noexcept { return codec_; }

 private:
  mutable LineChannel channel_;
  mutable std::uint64_t next_id_ = 1;
  std::chrono::milliseconds timeout_;
  std::string server_label_;
  Codec codec_ = Codec::symbol;
  bool deterministic_ = false;
  std::shared_ptr<ChildProcess> process_;
};

/// Transport "tcp:HOST:PORT", or "exec:COMMAND" to spawn a server speaking
/// the protocol on its stdin/stdout.
std::shared_ptr<RemoteModel> connect_model(const std::string& transport, std::chrono::milliseconds timeout,
                                           std::optional<Codec> expected_codec = std::nullopt);

/// Model learner that ignores its samples and returns a fresh connection (one
/// session per trial).
class RemoteModelLearner final : public ModelLearner {
 public:
  RemoteModelLearner(std::string transport, std::chrono::milliseconds timeout)
      : transport_(std::move(transport)), timeout_(timeout) {}

  std::string name() const override { return "remote(" + transport_ + ")"; }
  ModelPtr train(const TrainingInput& input, const RandomSource&, LearnerContext&) const override;

 private:
  std::string transport_;
  std::chrono::milliseconds timeout_;
};

}  // namespace pseudointel
