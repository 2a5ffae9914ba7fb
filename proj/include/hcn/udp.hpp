// Minimal blocking UDP socket bound to the IPv4 loopback address.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "hcn/protocol.hpp"

namespace hcn {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UdpSocket {
 public:
  /// Throws TransportError when the port cannot be bound.
  static UdpSocket bind_loopback(std::uint16_t port);

  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  ~UdpSocket();

  std::uint16_t port() const { return port_; }
  void send_to(std::uint16_t port, std::span<const std::uint8_t> datagram);
  /// Waits up to `timeout_ms`; nullopt on timeout.
  std::optional<Bytes> receive(int timeout_ms);
  void close();

 private:
  UdpSocket(int fd, std::uint16_t port) : fd_(fd), port_(port) {}

  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace hcn
