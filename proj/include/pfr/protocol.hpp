// Copyright 2026 The pfrlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfr/decoder.hpp"
#include "pfr/mds.hpp"
#include "pfr/query.hpp"
#include "pfr/query_matrix.hpp"
#include "pfr/virtual_space.hpp"
#include "pfr/wire.hpp"

namespace pfr {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A database: its shard and nothing else. Stateless between requests.
class DatabaseNode {
 public:
  explicit DatabaseNode(DatabaseShard shard) : shard_(std::move(shard)) {}

  std::size_t db_index() const { return shard_.db_index(); }
  const DatabaseShard& shard() const { return shard_; }

  AnswerString handle(const QueryMatrix& qm) const { return evaluate_answers(shard_, qm); }

  wire::Bytes handle_bytes(std::span<const std::uint8_t> query) const {
    return encode_answer(handle(decode_query_matrix(query)));
  }

 private:
  DatabaseShard shard_;
};

/// Delivers database db its query matrix and returns the answer. The socket
/// transport moves the encoded bytes; the in-process one hands the matrix
/// over directly, since the dense encoding of a large session runs to
/// gigabytes.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual AnswerString request(std::size_t db, const QueryMatrix& query) = 0;
  virtual std::size_t databases() const = 0;
  virtual std::string name() const = 0;
};

class InProcessTransport : public Transport {
 public:
  explicit InProcessTransport(std::vector<DatabaseNode> nodes) : nodes_(std::move(nodes)) {}

  AnswerString request(std::size_t db, const QueryMatrix& query) override {
    if (db >= nodes_.size()) throw TransportError("no database " + std::to_string(db + 1));
    return nodes_[db].handle(query);
  }
  std::size_t databases() const override { return nodes_.size(); }
  std::string name() const override { return "inproc"; }

 private:
  std::vector<DatabaseNode> nodes_;
};

namespace detail {

inline void send_all(int fd, const std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw TransportError(std::string("send failed: ") + std::strerror(errno));
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

inline void recv_all(int fd, std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::recv(fd, data, size, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n == 0) throw TransportError("peer closed the connection");
    if (n < 0) throw TransportError(std::string("recv failed: ") + std::strerror(errno));
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

// Frames are a 4-byte little-endian length followed by the payload.
inline void send_frame(int fd, const wire::Bytes& payload) {
  if (payload.size() > 0xffffffffU) throw TransportError("frame too large");
  wire::Writer w;
  w.u32(static_cast<std::uint32_t>(payload.size()));
  const auto header = w.take();
  send_all(fd, header.data(), header.size());
  send_all(fd, payload.data(), payload.size());
}

inline wire::Bytes recv_frame(int fd) {
  std::uint8_t header[4];
  recv_all(fd, header, 4);
  wire::Reader r(header);
  wire::Bytes payload(r.u32());
  recv_all(fd, payload.data(), payload.size());
  return payload;
}

class Socket {
 public:
  explicit Socket(int fd = -1) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  ~Socket() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

}  // namespace detail

/// One loopback TCP listener per database, each served by its own thread.
/// A node thread sees only its own shard and the bytes it is sent.
class SocketTransport : public Transport {
 public:
  explicit SocketTransport(std::vector<DatabaseNode> nodes) {
    for (auto& node : nodes) servers_.push_back(std::make_unique<Server>(std::move(node)));
  }
  ~SocketTransport() override {
    for (auto& s : servers_) s->stop();
  }

  AnswerString request(std::size_t db, const QueryMatrix& query) override {
    if (db >= servers_.size()) throw TransportError("no database " + std::to_string(db + 1));
    detail::Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
    if (sock.get() < 0) throw TransportError("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(servers_[db]->port());
    if (::connect(sock.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      throw TransportError("database " + std::to_string(db + 1) + " unreachable: " + std::strerror(errno));
    }
    detail::send_frame(sock.get(), encode_query_matrix(query));
    const auto reply = detail::recv_frame(sock.get());
    if (reply.empty()) throw TransportError("database " + std::to_string(db + 1) + " rejected the query");
    try {
      return decode_answer(reply);
    } catch (const wire::DecodeError& e) {
      throw ProtocolError("malformed answer from database " + std::to_string(db + 1) + ": " + e.what());
    }
  }
  std::size_t databases() const override { return servers_.size(); }
  std::string name() const override { return "socket"; }
  std::uint16_t port(std::size_t db) const { return servers_.at(db)->port(); }

 private:
  class Server {
   public:
    explicit Server(DatabaseNode node) : node_(std::move(node)) {
      listener_ = detail::Socket(::socket(AF_INET, SOCK_STREAM, 0));
      if (listener_.get() < 0) throw TransportError("socket() failed");
      const int one = 1;
      ::setsockopt(listener_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
      sockaddr_in addr{};
      addr.sin_family = AF_INET;
      addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
      addr.sin_port = 0;
      if (::bind(listener_.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
          ::listen(listener_.get(), 8) != 0) {
        throw TransportError(std::string("cannot listen on loopback: ") + std::strerror(errno));
      }
      socklen_t len = sizeof(addr);
      ::getsockname(listener_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
      port_ = ntohs(addr.sin_port);
      thread_ = std::thread([this] { serve(); });
    }
    ~Server() { stop(); }

    std::uint16_t port() const { return port_; }

    void stop() {
      if (stopping_.exchange(true)) return;
      ::shutdown(listener_.get(), SHUT_RDWR);
      if (thread_.joinable()) thread_.join();
      listener_.reset();
    }

   private:
    void serve() {
      while (!stopping_) {
        detail::Socket conn(::accept(listener_.get(), nullptr, nullptr));
        if (conn.get() < 0) {
          if (stopping_) return;
          continue;
        }
        try {
          const auto query = detail::recv_frame(conn.get());
          wire::Bytes reply;
          try {
            reply = node_.handle_bytes(query);
          } catch (const std::exception&) {
            reply.clear();  // an empty frame tells the client the query was refused
          }
          detail::send_frame(conn.get(), reply);
        } catch (const TransportError&) {
          // Client went away; nothing to answer.
        }
      }
    }

    DatabaseNode node_;
    detail::Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread thread_;
  };

  std::vector<std::unique_ptr<Server>> servers_;
};

inline std::vector<DatabaseNode> make_nodes(std::vector<DatabaseShard> shards) {
  std::vector<DatabaseNode> nodes;
  for (auto& s : shards) nodes.emplace_back(std::move(s));
  return nodes;
}

/// The user: builds the private queries and decodes the answers. The
/// symbolic query set depends only on (params, nu), so several clients may
/// share one; the index assignment is per client.
class UserClient {
 public:
  UserClient(std::shared_ptr<const QuerySet> queries, std::uint64_t seed, GeneratorMatrix g,
             RowOrder order = RowOrder::Canonical)
      : g_(std::move(g)),
        queries_(std::move(queries)),
        assignment_(make_index_assignment(seed, queries_->params().segments())) {
    for (std::size_t db = 0; db < params().n; ++db) lowered_.push_back(lower_to_matrix(*queries_, db, assignment_, order));
  }

  UserClient(const SchemeParams& params, std::size_t nu, std::uint64_t seed, GeneratorMatrix g,
             GenerationOptions opts = {}, RowOrder order = RowOrder::Canonical)
      : UserClient(std::make_shared<const QuerySet>(generate_query_set(params, nu, opts)), seed, std::move(g), order) {}

  const SchemeParams& params() const { return queries_->params(); }
  const QuerySet& queries() const { return *queries_; }
  const IndexAssignment& assignment() const { return assignment_; }
  const LoweredQuery& lowered(std::size_t db) const { return lowered_.at(db); }
  const GeneratorMatrix& generator() const { return g_; }

  std::vector<Residue> decode(const std::vector<AnswerString>& answers) const {
    if (answers.size() != params().n) {
      throw DecodeFailure(DecodeFailure::Kind::AnswerMismatch, "expected answers from all N databases");
    }
    DecodeState state;
    for (std::size_t db = 0; db < params().n; ++db) absorb_answers(state, lowered_[db], answers[db]);
    regenerate_redundant(state, *queries_);
    return peel_decode(state, *queries_, g_, assignment_);
  }

 private:
  GeneratorMatrix g_;
  std::shared_ptr<const QuerySet> queries_;
  IndexAssignment assignment_;
  std::vector<LoweredQuery> lowered_;
};

/// FNV-1a over the matrix header and its (column, value) entries, row by row.
inline std::uint64_t query_digest(const QueryMatrix& qm) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(qm.q());
  mix(qm.messages());
  mix(qm.segments());
  mix(qm.rows());
  for (const auto& row : qm.row_data()) {
    mix(row.size());
    for (const auto& e : row) {
      mix(e.column);
      mix(e.value);
    }
  }
  return h;
}

struct SessionTranscript {
  SchemeParams params;
  std::uint64_t seed = 0;
  std::size_t nu = 0;
  std::string transport;
  std::vector<std::size_t> query_rows;  // per database
  std::vector<std::uint64_t> query_digest;
  std::vector<AnswerString> answers;
  std::vector<Residue> decoded;
  BigInt downloaded = 0;

  Rational rate() const { return Rational(BigInt(params.length()), downloaded); }

  nlohmann::json to_json() const {
    nlohmann::json dbs = nlohmann::json::array();
    for (std::size_t i = 0; i < answers.size(); ++i) {
      char digest[17];
      std::snprintf(digest, sizeof(digest), "%016llx", static_cast<unsigned long long>(query_digest[i]));
      dbs.push_back({{"db", i + 1}, {"query_rows", query_rows[i]}, {"query_digest", digest}, {"answer", answers[i].values}});
    }
    return {{"N", params.n},
            {"K", params.k},
            {"M", params.m},
            {"q", params.q},
            {"V", params.v},
            {"nu", nu + 1},
            {"seed", seed},
            {"transport", transport},
            {"L", params.length()},
            {"D", downloaded.str()},
            {"rate", to_string(rate())},
            {"databases", std::move(dbs)},
            {"decoded", decoded}};
  }
};

/// One full round trip: queries out, answers back, decode. Databases are
/// contacted in index order; each answer is checked against its query.
inline SessionTranscript run_session(const UserClient& user, Transport& transport, std::uint64_t seed) {
  const auto& p = user.params();
  if (transport.databases() != p.n) throw ProtocolError("transport does not reach exactly N databases");
  SessionTranscript t;
  t.params = p;
  t.seed = seed;
  t.nu = user.queries().nu();
  t.transport = transport.name();
  for (std::size_t db = 0; db < p.n; ++db) {
    const auto& qm = user.lowered(db).matrix;
    t.query_rows.push_back(qm.rows());
    t.query_digest.push_back(query_digest(qm));
    AnswerString answer = transport.request(db, qm);
    if (answer.db != db) throw ProtocolError("answer tagged with the wrong database index");
    if (answer.q != p.q) throw ProtocolError("answer from database " + std::to_string(db + 1) + " uses another field");
    if (answer.values.size() != qm.rows()) {
      throw ProtocolError("database " + std::to_string(db + 1) + " answered " + std::to_string(answer.values.size()) +
                          " of " + std::to_string(qm.rows()) + " queries");
    }
    t.downloaded += answer.values.size();
    t.answers.push_back(std::move(answer));
  }
  t.decoded = user.decode(t.answers);
  return t;
}

enum class TransportKind { InProcess, Socket };

inline std::unique_ptr<Transport> make_transport(TransportKind kind, std::vector<DatabaseNode> nodes) {
  if (kind == TransportKind::Socket) return std::make_unique<SocketTransport>(std::move(nodes));
  return std::make_unique<InProcessTransport>(std::move(nodes));
}

/// Seeds of one simulated session. The data and the user's private index
/// assignment come from separate streams.
struct SessionSeeds {
  std::uint64_t data = 0;
  std::uint64_t assignment = 0;

  static SessionSeeds from(std::uint64_t seed) { return {seed, seed ^ 0x9e3779b97f4a7c15ULL}; }
};

struct SessionResult {
  MessageStore store;
  SessionTranscript transcript;
  bool correct = false;
};

/// Random messages, shards, nodes and one session, checked against plaintext.
inline SessionResult simulate_session(std::shared_ptr<const QuerySet> queries, const GeneratorMatrix& g,
                                      std::uint64_t seed, TransportKind kind = TransportKind::InProcess) {
  const auto p = queries->params();
  const auto seeds = SessionSeeds::from(seed);
  auto store = MessageStore::random(g.field(), p.m, p.segments(), p.k, seeds.data);
  auto transport = make_transport(kind, make_nodes(encode_shards(store, g)));
  const UserClient user(queries, seeds.assignment, g);
  auto transcript = run_session(user, *transport, seed);
  const bool ok = transcript.decoded == plaintext_target(store, CombinationSpace(p.q, p.m), queries->nu());
  return {std::move(store), std::move(transcript), ok};
}

inline SessionResult simulate_session(const SchemeParams& p, std::size_t nu, const GeneratorMatrix& g,
                                      std::uint64_t seed, TransportKind kind = TransportKind::InProcess) {
  return simulate_session(std::make_shared<const QuerySet>(generate_query_set(p, nu)), g, seed, kind);
}

}  // namespace pfr
