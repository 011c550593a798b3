#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace petspu {

// Thin RAII wrapper over an IPv4 UDP socket; loopback-friendly defaults
// (large receive buffer, millisecond receive timeouts).
class UdpSocket {
  public:
    UdpSocket();
    ~UdpSocket();

    UdpSocket(UdpSocket&& other) noexcept;
    UdpSocket& operator=(UdpSocket&&) = delete;
    UdpSocket(const UdpSocket&) = delete;

    // Bind to 127.0.0.1:<port>; port 0 picks an ephemeral port.
    void bind_local(uint16_t port);
    uint16_t local_port() const;

    void send_to(const std::string& host, uint16_t port, std::span<const uint8_t> payload);

    // Blocks up to timeout_ms; nullopt on timeout.
    std::optional<std::vector<uint8_t>> receive(int timeout_ms);

  private:
    int fd_ = -1;
};

}  // namespace petspu
