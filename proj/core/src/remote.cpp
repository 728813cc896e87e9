#include "pseudointel/remote.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <iostream>
#include <nlohmann/json.hpp>

#include "pseudointel/errors.hpp"

namespace pseudointel {

using json = nlohmann::json;
using namespace std::chrono_literals;

// --- base64 ------------------------------------------------------------------

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (std::uint32_t(std::uint8_t(bytes[i])) << 16) |
                            (std::uint32_t(std::uint8_t(bytes[i + 1])) << 8) | std::uint8_t(bytes[i + 2]);
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += kAlphabet[v >> 6 & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = std::uint32_t(std::uint8_t(bytes[i])) << 16;
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (std::uint32_t(std::uint8_t(bytes[i])) << 16) |
                            (std::uint32_t(std::uint8_t(bytes[i + 1])) << 8);
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += kAlphabet[v >> 6 & 63];
    out += '=';
  }
  return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) return std::nullopt;
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    std::array<int, 4> v{};
    int padding = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && last && k >= 2) {
        ++padding;
        v[k] = 0;
        continue;
      }
      if (padding) return std::nullopt;  // data after padding
      v[k] = decode_char(c);
      if (v[k] < 0) return std::nullopt;
    }
    const std::uint32_t word = (std::uint32_t(v[0]) << 18) | (std::uint32_t(v[1]) << 12) |
                               (std::uint32_t(v[2]) << 6) | std::uint32_t(v[3]);
    // Non-canonical encodings (stray low bits before padding) are rejected.
    if (padding == 2 && (word & 0xffff)) return std::nullopt;
    if (padding == 1 && (word & 0xff)) return std::nullopt;
    out += static_cast<char>(word >> 16 & 0xff);
    if (padding < 2) out += static_cast<char>(word >> 8 & 0xff);
    if (padding < 1) out += static_cast<char>(word & 0xff);
  }
  return out;
}

// --- LineChannel -------------------------------------------------------------

LineChannel::LineChannel(int read_fd, int write_fd, bool owns_fds)
    : read_fd_(read_fd), write_fd_(write_fd), owns_(owns_fds) {}

LineChannel::LineChannel(LineChannel&& other) noexcept
    : read_fd_(std::exchange(other.read_fd_, -1)),
      write_fd_(std::exchange(other.write_fd_, -1)),
      owns_(other.owns_),
      buffer_(std::move(other.buffer_)) {}

LineChannel& LineChannel::operator=(LineChannel&& other) noexcept {
  if (this != &other) {
    close();
    read_fd_ = std::exchange(other.read_fd_, -1);
    write_fd_ = std::exchange(other.write_fd_, -1);
    owns_ = other.owns_;
    buffer_ = std::move(other.buffer_);
  }
  return *this;
}

LineChannel::~LineChannel() { close(); }

void LineChannel::close() {
  if (owns_) {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  }
  read_fd_ = write_fd_ = -1;
}

void LineChannel::write_line(std::string_view line) {
  if (write_fd_ < 0) throw Error(Errc::io_error, "channel closed");
  std::string data(line);
  data += '\n';
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(write_fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) n = ::write(write_fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::io_error, std::string("write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> LineChannel::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (read_fd_ < 0) return std::nullopt;
    int wait_ms = -1;
    if (timeout.count() >= 0) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw Error(Errc::io_error, "timed out waiting for a line");
      wait_ms = static_cast<int>(left.count());
    }
    pollfd pfd{read_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::io_error, std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) throw Error(Errc::io_error, "timed out waiting for a line");
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return std::nullopt;
      throw Error(Errc::io_error, std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) return std::nullopt;  // a trailing partial line is dropped
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::pair<LineChannel, LineChannel> make_channel_pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(Errc::io_error, std::string("socketpair failed: ") + std::strerror(errno));
  }
  return {LineChannel(fds[0], fds[0], true), LineChannel(fds[1], fds[1], true)};
}

// --- Server ------------------------------------------------------------------

namespace {

json error_message(std::uint64_t id, std::string_view code, std::string_view detail) {
  return {{"type", "error"}, {"id", id}, {"code", code}, {"detail", detail}};
}

std::optional<std::uint64_t> parse_coins(const json& message) {
  const auto it = message.find("coins");
  if (it == message.end()) return std::nullopt;
  if (!it->is_string()) throw std::invalid_argument("coins must be a decimal string");
  const std::string& s = it->get_ref<const std::string&>();
  if (s.empty() || s.size() > 20 || s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("coins must be a decimal string");
  }
  return std::stoull(s);
}

}  // namespace

std::size_t serve_session(const Model& model, LineChannel& channel, const ServeOptions& options) {
  const RandomSource session_rs = RandomSource(options.seed).child("session").child(options.session_index);
  bool greeted = false;
  std::uint64_t last_id = 0;
  std::size_t answered = 0;

  while (auto line = channel.read_line()) {
    if (line->empty()) continue;
    json message = json::parse(*line, nullptr, false);
    if (message.is_discarded() || !message.is_object() || !message.contains("type") ||
        !message["type"].is_string()) {
      channel.write_line(error_message(0, "BAD_MESSAGE", "not a protocol object").dump());
      continue;
    }
    const std::string type = message["type"];

    if (type == "hello") {
      const auto version = message.value("protocol_version", json());
      if (!version.is_number_integer() || version.get<int>() != kProtocolVersion) {
        channel.write_line(error_message(0, "VERSION_MISMATCH",
                                         "server speaks protocol_version " + std::to_string(kProtocolVersion))
                               .dump());
        return answered;
      }
      greeted = true;
      channel.write_line(json{{"type", "hello"},
                              {"protocol_version", kProtocolVersion},
                              {"codec", to_string(options.codec)},
                              {"model", model.label()},
                              {"deterministic", model.deterministic()}}
                             .dump());
      continue;
    }
    if (type == "bye") {
      channel.write_line(json{{"type", "bye"}, {"queries", answered}}.dump());
      return answered;
    }
    if (type != "query") {
      channel.write_line(error_message(0, "BAD_MESSAGE", "unknown message type '" + type + "'").dump());
      continue;
    }

    const auto id_field = message.value("id", json());
    if (!id_field.is_number_unsigned()) {
      channel.write_line(error_message(0, "BAD_MESSAGE", "query without an unsigned id").dump());
      continue;
    }
    const auto id = id_field.get<std::uint64_t>();
    if (!greeted) {
      channel.write_line(error_message(id, "NO_HELLO", "send hello first").dump());
      continue;
    }
    if (id <= last_id) {
      channel.write_line(error_message(id, "NON_MONOTONIC_ID", "ids must strictly increase").dump());
      continue;
    }
    last_id = id;

    const auto x_field = message.value("x", json());
    const auto x = x_field.is_string() ? base64_decode(x_field.get<std::string>()) : std::nullopt;
    if (!x) {
      channel.write_line(error_message(id, "BAD_PAYLOAD", "x is not valid base64").dump());
      continue;
    }
    std::optional<std::uint64_t> coins;
    try {
      coins = parse_coins(message);
    } catch (const std::invalid_argument& e) {
      channel.write_line(error_message(id, "BAD_MESSAGE", e.what()).dump());
      continue;
    }

    Rng rng = coins ? Rng(*coins) : session_rs.child("query").child(id).stream();
    try {
      const Response y = model.respond(Query(*x), rng);
      json reply{{"type", "response"}, {"id", id}, {"y", base64_encode(y.bytes())}};
      if (coins) reply["coins"] = std::to_string(rng.state());
      channel.write_line(reply.dump());
    } catch (const Error& e) {
      const char* code = e.code() == Errc::unsupported_query ? "UNSUPPORTED_QUERY" : "MODEL_ERROR";
      channel.write_line(error_message(id, code, e.what()).dump());
    }
    ++answered;
    if (options.max_queries && answered >= *options.max_queries) return answered;
  }
  return answered;
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* found = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found) != 0 || !found) {
    throw Error(Errc::io_error, "cannot resolve " + host);
  }
  fd_ = ::socket(found->ai_family, found->ai_socktype | SOCK_CLOEXEC, found->ai_protocol);
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const bool ok = fd_ >= 0 && ::bind(fd_, found->ai_addr, found->ai_addrlen) == 0 && ::listen(fd_, 16) == 0;
  ::freeaddrinfo(found);
  if (!ok) {
    const std::string reason = std::strerror(errno);
    if (fd_ >= 0) ::close(fd_);
    throw Error(Errc::io_error, "cannot listen on " + host + ":" + std::to_string(port) + ": " + reason);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::TcpListener(TcpListener&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), port_(other.port_) {}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

LineChannel TcpListener::accept() {
  for (;;) {
    const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd >= 0) return LineChannel(fd, fd, true);
    if (errno != EINTR) throw Error(Errc::io_error, std::string("accept failed: ") + std::strerror(errno));
  }
}

namespace {

struct HostPort {
  std::string host;
  std::uint16_t port;
};

HostPort parse_tcp(std::string_view spec) {
  const auto colon = spec.rfind(':');
  if (colon == std::string_view::npos) throw Error(Errc::invalid_config, "expected tcp:HOST:PORT");
  const std::string port_text(spec.substr(colon + 1));
  if (port_text.empty() || port_text.find_first_not_of("0123456789") != std::string::npos ||
      std::stoul(port_text) > 65535) {
    throw Error(Errc::invalid_config, "bad port '" + port_text + "'");
  }
  return {std::string(spec.substr(0, colon)), static_cast<std::uint16_t>(std::stoul(port_text))};
}

}  // namespace

void serve_model(const Model& model, const std::string& transport, const ServeOptions& options,
                 std::optional<std::size_t> max_sessions) {
  if (transport == "stdio") {
    LineChannel channel(STDIN_FILENO, STDOUT_FILENO, false);
    serve_session(model, channel, options);
    return;
  }
  if (transport.rfind("tcp:", 0) != 0) throw Error(Errc::invalid_config, "unknown transport '" + transport + "'");
  const HostPort where = parse_tcp(std::string_view(transport).substr(4));
  TcpListener listener(where.host, where.port);
  std::cerr << "listening on " << where.host << ":" << listener.port() << std::endl;
  ServeOptions session = options;
  for (std::size_t k = 0; !max_sessions || k < *max_sessions; ++k) {
    LineChannel channel = listener.accept();
    session.session_index = k;
    try {
      serve_session(model, channel, session);
    } catch (const Error& e) {
      // A client vanishing mid-session ends that session only.
      std::cerr << "session " << k << ": " << e.what() << std::endl;
    }
  }
}

// --- Client ------------------------------------------------------------------

class ChildProcess {
 public:
  explicit ChildProcess(pid_t pid) : pid_(pid) {}
  ~ChildProcess() {
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, nullptr, 0);
  }
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

 private:
  pid_t pid_;
};

namespace {

json read_message(LineChannel& channel, std::chrono::milliseconds timeout) {
  std::optional<std::string> line;
  try {
    line = channel.read_line(timeout);
  } catch (const Error& e) {
    throw Error(Errc::black_box_failure, e.what());
  }
  if (!line) throw Error(Errc::black_box_failure, "server disconnected");
  json message = json::parse(*line, nullptr, false);
  if (message.is_discarded() || !message.is_object()) {
    throw Error(Errc::black_box_failure, "server sent a malformed line");
  }
  return message;
}

void send_message(LineChannel& channel, const json& message) {
  try {
    channel.write_line(message.dump());
  } catch (const Error& e) {
    throw Error(Errc::black_box_failure, e.what());
  }
}

}  // namespace

RemoteModel::RemoteModel(LineChannel channel, std::chrono::milliseconds timeout,
                         std::optional<Codec> expected_codec, std::shared_ptr<ChildProcess> process)
    : channel_(std::move(channel)), timeout_(timeout), process_(std::move(process)) {
  json hello{{"type", "hello"}, {"protocol_version", kProtocolVersion}};
  if (expected_codec) hello["codec"] = to_string(*expected_codec);
  send_message(channel_, hello);
  const json reply = read_message(channel_, timeout_);
  if (reply.value("type", "") == "error") {
    throw Error(Errc::protocol_error, "handshake rejected: " + reply.value("code", std::string("?")) + " " +
                                          reply.value("detail", std::string()));
  }
  if (reply.value("type", "") != "hello" || reply.value("protocol_version", -1) != kProtocolVersion) {
    throw Error(Errc::protocol_error, "handshake failed: unexpected reply " + reply.dump());
  }
  codec_ = codec_from_string(reply.value("codec", std::string("symbol")));
  if (expected_codec && *expected_codec != codec_) {
    throw Error(Errc::protocol_error, "server codec " + std::string(to_string(codec_)) + " does not match " +
                                          std::string(to_string(*expected_codec)));
  }
  server_label_ = reply.value("model", std::string("unknown"));
  deterministic_ = reply.value("deterministic", false);
}

RemoteModel::~RemoteModel() {
  try {
    channel_.write_line(json{{"type", "bye"}}.dump());
    channel_.read_line(std::chrono::milliseconds(200));
  } catch (...) {
  }
}

Response RemoteModel::respond(const Query& x, Rng& rng) const {
  const std::uint64_t id = next_id_++;
  send_message(channel_, json{{"type", "query"},
                              {"id", id},
                              {"x", base64_encode(x.bytes())},
                              {"coins", std::to_string(rng.state())}});
  const json reply = read_message(channel_, timeout_);
  if (reply.value("id", std::uint64_t{0}) != id) {
    throw Error(Errc::black_box_failure, "reply id does not match query " + std::to_string(id));
  }
  const std::string type = reply.value("type", "");
  if (type == "error") {
    const std::string code = reply.value("code", std::string("?"));
    const std::string detail = code + ": " + reply.value("detail", std::string());
    throw Error(code == "UNSUPPORTED_QUERY" ? Errc::unsupported_query : Errc::black_box_failure, detail);
  }
  if (type != "response" || !reply.contains("y") || !reply["y"].is_string()) {
    throw Error(Errc::black_box_failure, "unexpected reply " + reply.dump());
  }
  auto y = base64_decode(reply["y"].get<std::string>());
  if (!y) throw Error(Errc::black_box_failure, "server sent a malformed payload");
  try {
    if (const auto coins = parse_coins(reply)) rng.set_state(*coins);
  } catch (const std::invalid_argument&) {
    throw Error(Errc::black_box_failure, "server sent malformed coins");
  }
  return Response(std::move(*y));
}

std::shared_ptr<RemoteModel> connect_model(const std::string& transport, std::chrono::milliseconds timeout,
                                           std::optional<Codec> expected_codec) {
  if (transport.rfind("tcp:", 0) == 0) {
    const HostPort where = parse_tcp(std::string_view(transport).substr(4));
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    if (::getaddrinfo(where.host.c_str(), std::to_string(where.port).c_str(), &hints, &found) != 0 || !found) {
      throw Error(Errc::black_box_failure, "cannot resolve " + where.host);
    }
    const int fd = ::socket(found->ai_family, found->ai_socktype | SOCK_CLOEXEC, found->ai_protocol);
    const bool ok = fd >= 0 && ::connect(fd, found->ai_addr, found->ai_addrlen) == 0;
    ::freeaddrinfo(found);
    if (!ok) {
      const std::string reason = std::strerror(errno);
      if (fd >= 0) ::close(fd);
      throw Error(Errc::black_box_failure, "cannot connect to " + transport + ": " + reason);
    }
    return std::make_shared<RemoteModel>(LineChannel(fd, fd, true), timeout, expected_codec);
  }
  if (transport.rfind("exec:", 0) == 0) {
    const std::string command = transport.substr(5);
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0) {
      throw Error(Errc::io_error, "pipe failed");
    }
    const pid_t pid = ::fork();
    if (pid < 0) throw Error(Errc::io_error, "fork failed");
    if (pid == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    auto process = std::make_shared<ChildProcess>(pid);
    return std::make_shared<RemoteModel>(LineChannel(from_child[0], to_child[1], true), timeout, expected_codec,
                                         std::move(process));
  }
  throw Error(Errc::invalid_config, "unknown transport '" + transport + "'");
}

ModelPtr RemoteModelLearner::train(const TrainingInput& input, const RandomSource&, LearnerContext&) const {
  std::optional<Codec> codec;
  if (input.capability) codec = input.capability->response_codec();
  return connect_model(transport_, timeout_, codec);
}

}  // namespace pseudointel
