#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "hcn/protocol.hpp"
#include "oracles.hpp"

using namespace hcn;
using namespace hcn::oracle;

namespace {

DecodeErrorKind error_of(const Bytes& b) {
  auto r = decode(b);
  REQUIRE(std::holds_alternative<DecodeError>(r));
  return std::get<DecodeError>(r).kind;
}

}  // namespace

TEST_CASE("WAKEUP_COMMAND golden bytes") {
  ControlMessage m{7, WakeupCommand{2}};
  Bytes b = encode(m, {1, 1});
  const Bytes expected = {0x48, 0x43, 0x4E, 0x31, 0x01, 0x03, 0x00, 0x01, 0x00, 0x00,
                          0x00, 0x01, 0x00, 0x00, 0x00, 0x07, 0x00, 0x00, 0x00, 0x02};
  CHECK(b == expected);
}

TEST_CASE("STATUS_REPORT load quantization") {
  auto load_byte = [](double load) {
    Bytes b = encode({1, StatusReport(PowerState::ACTIVE, load)}, {1, 1});
    return b.back();
  };
  CHECK(load_byte(0.0) == 0x00);
  CHECK(load_byte(1.0) == 0xFF);
  CHECK(load_byte(0.5) == 128);  // 127.5 rounds away from zero
  CHECK(quantize_load(3.0 / 5.0) == 153);
  CHECK_THROWS_AS(StatusReport(PowerState::ACTIVE, 1.01), std::out_of_range);
  CHECK_THROWS_AS(StatusReport(PowerState::ACTIVE, -0.01), std::out_of_range);
  CHECK_THROWS_AS(StatusReport(PowerState::WAKING, 0.0), std::out_of_range);
  for (int i = 0; i <= 1000; ++i) {
    double load = i / 1000.0;
    CHECK(std::abs(quantize_load(load) / 255.0 - load) <= 0.5 / 255.0 + 1e-12);
  }
}

TEST_CASE("encode never exceeds the datagram limit") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) CHECK(encode(random_message(rng), {1, 1}).size() <= kMaxDatagramSize);
}

TEST_CASE("randomized round trip is byte-exact against the reference encoder") {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 10000; ++i) {
    ControlMessage m = random_message(rng);
    MessageHeader h{static_cast<std::uint16_t>(rng()), static_cast<std::uint32_t>(rng())};
    Bytes b = encode(m, h);
    REQUIRE(b == reference_encode(m, h));
    auto r = decode(b);
    REQUIRE(std::holds_alternative<Decoded>(r));
    REQUIRE(std::get<Decoded>(r).message == m);
    REQUIRE(std::get<Decoded>(r).header == h);
  }
}

TEST_CASE("malformed inputs map to their designated errors with offsets") {
  const Bytes good = encode({9, LinkRelease{100}}, {1, 3});

  SUBCASE("bad magic") {
    Bytes b(good.size(), 'X');
    auto r = decode(b);
    REQUIRE(std::holds_alternative<DecodeError>(r));
    CHECK(std::get<DecodeError>(r) == DecodeError{DecodeErrorKind::BAD_MAGIC, 0});
    Bytes c = good;
    c[2] = 'X';
    CHECK(std::get<DecodeError>(decode(c)) == DecodeError{DecodeErrorKind::BAD_MAGIC, 2});
  }
  SUBCASE("bad version") {
    Bytes b = good;
    b[4] = 2;
    CHECK(std::get<DecodeError>(decode(b)) == DecodeError{DecodeErrorKind::BAD_VERSION, 4});
  }
  SUBCASE("unknown tag") {
    Bytes b = good;
    b[5] = 0x09;
    CHECK(std::get<DecodeError>(decode(b)) == DecodeError{DecodeErrorKind::UNKNOWN_TAG, 5});
    b[5] = 0x00;
    CHECK(error_of(b) == DecodeErrorKind::UNKNOWN_TAG);
  }
  SUBCASE("every proper prefix is truncated") {
    for (std::size_t n = 0; n < good.size(); ++n) {
      Bytes b(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(n));
      CAPTURE(n);
      CHECK(std::get<DecodeError>(decode(b)) == DecodeError{DecodeErrorKind::TRUNCATED, n});
    }
  }
  SUBCASE("trailing bytes") {
    Bytes b = good;
    b.push_back(0);
    CHECK(std::get<DecodeError>(decode(b)) == DecodeError{DecodeErrorKind::TRAILING_BYTES, good.size()});
  }
  SUBCASE("invalid enumerated field") {
    Bytes b = encode({1, ChannelAppointment{5, ServiceKind::MO_CALL, kAnySlot}}, {1, 1});
    b[20] = 0x07;
    CHECK(error_of(b) == DecodeErrorKind::BAD_FIELD);
  }
}

TEST_CASE("decode is total over random garbage") {
  std::mt19937_64 rng(5);
  const Bytes good = encode({9, StatusReport(PowerState::ACTIVE, 0.25)}, {1, 3});
  for (int i = 0; i < 20000; ++i) {
    Bytes b;
    if (i % 2 == 0) {
      b.resize(rng() % 70);
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    } else {
      b = good;
      b[rng() % b.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
      if (rng() % 3 == 0) b.resize(rng() % (b.size() + 3));
    }
    auto r = decode(b);
    if (auto* e = std::get_if<DecodeError>(&r)) REQUIRE(e->offset <= b.size());
  }
}

TEST_CASE("accept_in_order") {
  PeerChannelState st;
  st.last_seq_seen[4] = 5;
  CHECK(accept_in_order(st, {4, 6}) == Delivery::DELIVER);
  st.last_seq_seen[4] = 5;
  CHECK(accept_in_order(st, {4, 5}) == Delivery::DROP_DUPLICATE);
  CHECK(accept_in_order(st, {4, 3}) == Delivery::DROP_STALE);
  CHECK(st.last_seq_seen[4] == 5);
  CHECK(st.duplicates == 1);
  CHECK(st.stale == 1);
  CHECK(accept_in_order(st, {9, 1}) == Delivery::DELIVER);

  SUBCASE("delivered seqs strictly increase under any interleaving") {
    std::mt19937 rng(3);
    for (int round = 0; round < 200; ++round) {
      PeerChannelState s;
      std::vector<MessageHeader> arrivals;
      for (std::uint32_t q = 1; q <= 20; ++q) {
        arrivals.push_back({1, q});
        if (rng() % 3 == 0) arrivals.push_back({1, q});
        arrivals.push_back({2, q});
      }
      std::shuffle(arrivals.begin(), arrivals.end(), rng);
      std::map<std::uint16_t, std::uint32_t> last;
      for (const auto& h : arrivals) {
        if (accept_in_order(s, h) == Delivery::DELIVER) {
          REQUIRE(h.seq > last[h.sender_id]);
          last[h.sender_id] = h.seq;
        }
      }
    }
  }
}

TEST_CASE("ControlEndpoint numbers each peer independently from 1") {
  ControlEndpoint sbs(1);
  CHECK(sbs.next_header(2) == MessageHeader{1, 1});
  CHECK(sbs.next_header(2) == MessageHeader{1, 2});
  CHECK(sbs.next_header(3) == MessageHeader{1, 1});
  ControlEndpoint dbs(2);
  auto d = std::get<Decoded>(decode(sbs.frame(2, {1, WakeupCommand{2}})));
  CHECK(d.header.seq == 3);
  CHECK(dbs.admit(d.header) == Delivery::DELIVER);
  CHECK(dbs.admit(d.header) == Delivery::DROP_DUPLICATE);
}

TEST_CASE("encode rejects values that cannot go on the wire") {
  ControlMessage m{1, ChannelAppointment{1, static_cast<ServiceKind>(9), 0}};
  CHECK_THROWS_AS(encode(m, {1, 1}), EncodeError);
}
