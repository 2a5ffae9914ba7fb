#include "hcn/split_run.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hcn/udp.hpp"

namespace hcn {
namespace {

/// Line-oriented pipe end pair.
class LineIo {
 public:
  LineIo(int read_fd, int write_fd) : in_(fdopen(read_fd, "r")), out_(fdopen(write_fd, "w")) {
    if (!in_ || !out_) throw TransportError("fdopen failed");
  }
  ~LineIo() {
    if (in_) std::fclose(in_);
    if (out_) std::fclose(out_);
  }
  LineIo(const LineIo&) = delete;
  LineIo& operator=(const LineIo&) = delete;

  void send(const std::string& line) {
    std::fputs(line.c_str(), out_);
    std::fputc('\n', out_);
    std::fflush(out_);
  }

  std::optional<std::string> receive() {
    char* buf = nullptr;
    std::size_t cap = 0;
    ssize_t n = ::getline(&buf, &cap, in_);
    if (n < 0) {
      std::free(buf);
      return std::nullopt;
    }
    std::string line(buf, static_cast<std::size_t>(n));
    std::free(buf);
    if (!line.empty() && line.back() == '\n') line.pop_back();
    return line;
  }

 private:
  FILE* in_;
  FILE* out_;
};

struct Topology {
  std::vector<std::uint16_t> dbs_ids;  // declaration order; child k + 1 hosts dbs_ids[k]
  std::uint16_t sbs_id = 0;
  SplitConfig config;

  std::size_t children() const { return dbs_ids.size() + 1; }

  std::size_t owner(EntityId e) const {
    if (e.kind != EntityKind::DBS) return 0;
    auto it = std::find(dbs_ids.begin(), dbs_ids.end(), e.id);
    if (it == dbs_ids.end()) throw TransportError("no process hosts " + to_string(e));
    return static_cast<std::size_t>(it - dbs_ids.begin()) + 1;
  }

  std::size_t owner_of_station(std::uint16_t id) const {
    return id == sbs_id ? 0 : owner(EntityId::dbs(id));
  }

  std::uint16_t port(std::size_t child) const {
    return child == 0 ? config.sbs_port : static_cast<std::uint16_t>(config.dbs_port_base + child - 1);
  }

  std::set<EntityId> hosted(const Scenario& s, std::size_t child) const {
    if (child > 0) return {EntityId::dbs(dbs_ids[child - 1])};
    std::set<EntityId> out{EntityId::sbs(sbs_id)};
    for (const auto& m : s.mobiles) out.insert(EntityId::ms(m.id));
    return out;
  }
};

class ChildLink : public RemoteLink {
 public:
  ChildLink(const Topology& topo, UdpSocket& socket, LineIo& io) : topo_(topo), socket_(socket), io_(io) {}

  void send_control(std::uint16_t, std::uint16_t to, const Bytes& datagram, Micros) override {
    socket_.send_to(topo_.port(topo_.owner_of_station(to)), datagram);
    io_.send("SENT " + std::to_string(to));
  }

  void send_air(EntityId from, EntityId to, const AirMessage& msg, Micros deliver_at) override {
    io_.send("AIR " + to_string(from) + " " + to_string(to) + " " + std::to_string(deliver_at) + " " + to_text(msg));
  }

 private:
  const Topology& topo_;
  UdpSocket& socket_;
  LineIo& io_;
};

std::uint64_t header_key(const Bytes& d) {
  // (sender, seq) from the fixed header; short datagrams sort first and are
  // rejected by the decoder on delivery.
  if (d.size() < 12) return 0;
  std::uint64_t sender = (std::uint64_t{d[6]} << 8) | d[7];
  std::uint64_t seq = (std::uint64_t{d[8]} << 24) | (std::uint64_t{d[9]} << 16) | (std::uint64_t{d[10]} << 8) | d[11];
  return (sender << 32) | seq;
}

void child_loop(const Scenario& scenario, const Topology& topo, std::size_t index, UdpSocket& socket, LineIo& io) {
  ChildLink link(topo, socket, io);
  Simulator sim(scenario, topo.hosted(scenario, index), &link);
  const std::uint16_t self = index == 0 ? topo.sbs_id : topo.dbs_ids[index - 1];
  std::size_t emitted = 0;

  while (auto line = io.receive()) {
    std::istringstream in(*line);
    std::string cmd;
    in >> cmd;
    if (cmd == "NEXT") {
      auto t = sim.next_event_time();
      io.send(t ? "NEXT " + std::to_string(*t) : std::string("NEXT -"));
    } else if (cmd == "STEP") {
      Micros t = 0;
      in >> t;
      sim.run_instant(t);
      for (; emitted < sim.trace().size(); ++emitted) io.send("TRACE " + format_record(sim.trace()[emitted]));
      io.send("DONE");
    } else if (cmd == "AIR") {
      std::string from, to, text;
      Micros at = 0;
      in >> from >> to >> at >> text;
      auto f = parse_entity(from);
      auto t = parse_entity(to);
      auto msg = air_from_text(text);
      if (!f || !t || !msg) throw TransportError("malformed relay line: " + *line);
      sim.inject_air(*f, *t, *msg, at);
    } else if (cmd == "RECV") {
      std::size_t n = 0;
      Micros sent_at = 0;
      in >> n >> sent_at;
      std::vector<Bytes> batch;
      for (std::size_t i = 0; i < n; ++i) {
        auto d = socket.receive(topo.config.receive_timeout_ms);
        if (!d) throw TransportError("timed out waiting for datagram on port " + std::to_string(socket.port()));
        batch.push_back(std::move(*d));
      }
      std::stable_sort(batch.begin(), batch.end(),
                       [](const Bytes& a, const Bytes& b) { return header_key(a) < header_key(b); });
      for (auto& d : batch) sim.inject_control(self, std::move(d), sent_at + scenario.knobs.control_delay);
      io.send("OK");
    } else if (cmd == "QUIT") {
      Micros end = 0;
      in >> end;
      sim.finish(end);
      for (const auto& [id, t] : sim.ledger().times())
        io.send("ENERGY " + std::to_string(id) + " " + std::to_string(t.sleep_us) + " " + std::to_string(t.waking_us) +
                " " + std::to_string(t.active_us));
      io.send("BYE");
      return;
    } else {
      throw TransportError("unknown command: " + *line);
    }
  }
}

struct Child {
  pid_t pid = -1;
  std::unique_ptr<LineIo> io;
};

class Supervisor {
 public:
  ~Supervisor() {
    for (auto& c : children) {
      c.io.reset();
      if (c.pid > 0) {
        if (!clean) ::kill(c.pid, SIGKILL);
        int status = 0;
        ::waitpid(c.pid, &status, 0);
      }
    }
  }

  std::string expect(std::size_t i) {
    auto line = children[i].io->receive();
    if (!line) throw TransportError("process " + std::to_string(i) + " exited unexpectedly");
    if (line->rfind("ERROR ", 0) == 0) throw TransportError("process " + std::to_string(i) + ": " + line->substr(6));
    return *line;
  }

  std::vector<Child> children;
  bool clean = false;
};

}  // namespace

RunResult split_run(const Scenario& scenario, const SplitConfig& config) {
  if (auto problems = validate_scenario(scenario); !problems.empty()) {
    std::string all;
    for (const auto& p : problems) all += (all.empty() ? "" : "; ") + p;
    throw ScenarioError(all);
  }

  Topology topo;
  topo.sbs_id = scenario.sbs()->id;
  topo.config = config;
  for (const auto* d : scenario.dbs_stations()) topo.dbs_ids.push_back(d->id);
  if (topo.dbs_ids.size() + config.dbs_port_base > 65536) throw TransportError("DBS port range exceeds 65535");

  std::vector<UdpSocket> sockets;
  for (std::size_t i = 0; i < topo.children(); ++i) sockets.push_back(UdpSocket::bind_loopback(topo.port(i)));

  Supervisor sup;
  std::fflush(nullptr);
  for (std::size_t i = 0; i < topo.children(); ++i) {
    int down[2], up[2];
    if (::pipe(down) != 0 || ::pipe(up) != 0) throw TransportError("pipe failed");
    pid_t pid = ::fork();
    if (pid < 0) throw TransportError("fork failed");
    if (pid == 0) {
      ::close(down[1]);
      ::close(up[0]);
      int code = 0;
      {
        LineIo io(down[0], up[1]);
        try {
          for (std::size_t j = 0; j < sockets.size(); ++j)
            if (j != i) sockets[j].close();
          child_loop(scenario, topo, i, sockets[i], io);
        } catch (const std::exception& e) {
          std::string what = e.what();
          std::replace(what.begin(), what.end(), '\n', ' ');
          io.send("ERROR " + what);
          code = 1;
        }
      }
      std::_Exit(code);
    }
    ::close(down[0]);
    ::close(up[1]);
    sup.children.push_back(Child{pid, std::make_unique<LineIo>(up[0], down[1])});
  }
  sockets.clear();

  std::vector<TraceRecord> merged;
  Micros last = 0;
  const auto& horizon = scenario.knobs.horizon;
  for (;;) {
    std::optional<Micros> next;
    for (std::size_t i = 0; i < sup.children.size(); ++i) {
      sup.children[i].io->send("NEXT");
      std::string reply = sup.expect(i);
      if (reply != "NEXT -") {
        Micros t = std::stoll(reply.substr(5));
        next = next ? std::min(*next, t) : t;
      }
    }
    if (!next || (horizon && *next > *horizon)) break;
    const Micros t = *next;

    std::vector<std::pair<std::size_t, std::string>> relays;
    std::map<std::size_t, std::size_t> datagrams;
    for (std::size_t i = 0; i < sup.children.size(); ++i) {
      sup.children[i].io->send("STEP " + std::to_string(t));
      for (;;) {
        std::string line = sup.expect(i);
        if (line == "DONE") break;
        if (line.rfind("TRACE ", 0) == 0) {
          merged.push_back(parse_record(line.substr(6)));
        } else if (line.rfind("AIR ", 0) == 0) {
          std::istringstream in(line.substr(4));
          std::string from, to;
          in >> from >> to;
          auto target = parse_entity(to);
          if (!target) throw TransportError("malformed relay line: " + line);
          relays.emplace_back(topo.owner(*target), line);
        } else if (line.rfind("SENT ", 0) == 0) {
          ++datagrams[topo.owner_of_station(static_cast<std::uint16_t>(std::stoul(line.substr(5))))];
        } else {
          throw TransportError("unexpected reply: " + line);
        }
      }
    }
    for (const auto& [owner, line] : relays) sup.children[owner].io->send(line);
    for (const auto& [owner, n] : datagrams) {
      sup.children[owner].io->send("RECV " + std::to_string(n) + " " + std::to_string(t));
      if (std::string ok = sup.expect(owner); ok != "OK") throw TransportError("unexpected reply: " + ok);
    }
    last = t;
  }

  const Micros end = horizon ? *horizon : last;
  std::map<std::uint16_t, StateTimes> times;
  for (std::size_t i = 0; i < sup.children.size(); ++i) {
    sup.children[i].io->send("QUIT " + std::to_string(end));
    for (;;) {
      std::string line = sup.expect(i);
      if (line == "BYE") break;
      std::istringstream in(line);
      std::string tag;
      unsigned id = 0;
      StateTimes st;
      in >> tag >> id >> st.sleep_us >> st.waking_us >> st.active_us;
      if (tag != "ENERGY" || !in) throw TransportError("unexpected reply: " + line);
      times[static_cast<std::uint16_t>(id)] = st;
    }
  }
  sup.clean = true;
  return RunResult{std::move(merged), energy_report(times, scenario.knobs.power), end};
}

}  // namespace hcn
