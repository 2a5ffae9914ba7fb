#include "hcn/udp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>
#include <utility>

namespace hcn {
namespace {

sockaddr_in loopback(std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  return addr;
}

std::string errno_text() { return std::strerror(errno); }

}  // namespace

UdpSocket UdpSocket::bind_loopback(std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw TransportError("socket: " + errno_text());
  sockaddr_in addr = loopback(port);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    std::string why = errno_text();
    ::close(fd);
    throw TransportError("cannot bind 127.0.0.1:" + std::to_string(port) + ": " + why);
  }
  return UdpSocket(fd, port);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), port_(other.port_) {}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    port_ = other.port_;
  }
  return *this;
}

UdpSocket::~UdpSocket() { close(); }

void UdpSocket::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void UdpSocket::send_to(std::uint16_t port, std::span<const std::uint8_t> datagram) {
  sockaddr_in addr = loopback(port);
  ssize_t n = ::sendto(fd_, datagram.data(), datagram.size(), 0, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  if (n != static_cast<ssize_t>(datagram.size()))
    throw TransportError("sendto port " + std::to_string(port) + ": " + errno_text());
}

std::optional<Bytes> UdpSocket::receive(int timeout_ms) {
  pollfd p{fd_, POLLIN, 0};
  int ready = ::poll(&p, 1, timeout_ms);
  if (ready < 0) throw TransportError("poll: " + errno_text());
  if (ready == 0) return std::nullopt;
  Bytes buf(kMaxDatagramSize + 1);
  ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
  if (n < 0) throw TransportError("recv: " + errno_text());
  buf.resize(static_cast<std::size_t>(n));
  return buf;
}

}  // namespace hcn
