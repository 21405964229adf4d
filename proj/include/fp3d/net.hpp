#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace fp3d::net {

// Blocking TCP connection carrying newline-delimited messages.
class Conn {
public:
    explicit Conn(int fd) : fd_(fd) {}
    Conn(Conn&& other) noexcept;
    Conn& operator=(Conn&& other) noexcept;
    Conn(const Conn&) = delete;
    Conn& operator=(const Conn&) = delete;
    ~Conn();

    // writes the message plus '\n'; false on broken connection
    bool send_line(const std::string& line);

    // next line without the '\n'; nullopt on EOF, error or timeout.
    // timeout_sec < 0 blocks indefinitely.
    std::optional<std::string> recv_line(double timeout_sec = -1);

    void close();
    bool ok() const { return fd_ >= 0; }

private:
    int fd_ = -1;
    std::string buf_;
};

class Listener {
public:
    // port 0 picks an ephemeral port. Throws BindFailure.
    explicit Listener(std::uint16_t port);
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;
    ~Listener();

    std::uint16_t port() const { return port_; }

    // nullopt once close() was called
    std::optional<Conn> accept();
    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// Throws ConnectFailure when the connection cannot be established in time.
Conn dial(const std::string& host, std::uint16_t port, double timeout_sec);

}  // namespace fp3d::net
