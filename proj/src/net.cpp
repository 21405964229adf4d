#include "fp3d/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "fp3d/errors.hpp"

namespace fp3d::net {

namespace {

double now_sec() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

Conn::Conn(Conn&& other) noexcept : fd_(other.fd_), buf_(std::move(other.buf_)) {
    other.fd_ = -1;
}

Conn& Conn::operator=(Conn&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        buf_ = std::move(other.buf_);
        other.fd_ = -1;
    }
    return *this;
}

Conn::~Conn() { close(); }

void Conn::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

bool Conn::send_line(const std::string& line) {
    if (fd_ < 0) return false;
    std::string msg = line;
    msg.push_back('\n');
    std::size_t sent = 0;
    while (sent < msg.size()) {
        const ssize_t n = ::send(fd_, msg.data() + sent, msg.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::string> Conn::recv_line(double timeout_sec) {
    if (fd_ < 0) return std::nullopt;
    const double deadline = timeout_sec >= 0 ? now_sec() + timeout_sec : -1;
    for (;;) {
        const auto nl = buf_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buf_.substr(0, nl);
            buf_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        if (deadline >= 0) {
            const double remain = deadline - now_sec();
            if (remain <= 0) return std::nullopt;
            pollfd pfd{fd_, POLLIN, 0};
            const int pr = ::poll(&pfd, 1, static_cast<int>(remain * 1000) + 1);
            if (pr < 0 && errno == EINTR) continue;
            if (pr <= 0) return std::nullopt;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
            close();  // EOF or hard error; a plain timeout keeps the fd open
            return std::nullopt;
        }
        buf_.append(chunk, static_cast<std::size_t>(n));
    }
}

Listener::Listener(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw BindFailure("socket: " + std::string(std::strerror(errno)));
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        const std::string err = std::strerror(errno);
        ::close(fd_);
        fd_ = -1;
        throw BindFailure("bind port " + std::to_string(port) + ": " + err);
    }
    if (::listen(fd_, 64) < 0) {
        const std::string err = std::strerror(errno);
        ::close(fd_);
        fd_ = -1;
        throw BindFailure("listen: " + err);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener() { close(); }

void Listener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

std::optional<Conn> Listener::accept() {
    for (;;) {
        if (fd_ < 0) return std::nullopt;
        pollfd pfd{fd_, POLLIN, 0};
        const int pr = ::poll(&pfd, 1, 100);
        if (fd_ < 0) return std::nullopt;
        if (pr < 0) {
            if (errno == EINTR) continue;
            return std::nullopt;
        }
        if (pr == 0) continue;
        const int client = ::accept(fd_, nullptr, nullptr);
        if (client < 0) {
            if (errno == EINTR || errno == ECONNABORTED) continue;
            return std::nullopt;
        }
        const int one = 1;
        ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        return Conn(client);
    }
}

Conn dial(const std::string& host, std::uint16_t port, double timeout_sec) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw ConnectFailure("socket: " + std::string(std::strerror(errno)));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw ConnectFailure("bad address '" + host + "'");
    }

    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    const int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    if (rc < 0 && errno != EINPROGRESS) {
        const std::string err = std::strerror(errno);
        ::close(fd);
        throw ConnectFailure("connect " + host + ":" + std::to_string(port) + ": " + err);
    }
    if (rc < 0) {
        pollfd pfd{fd, POLLOUT, 0};
        const int pr = ::poll(&pfd, 1, static_cast<int>(timeout_sec * 1000) + 1);
        int soerr = 0;
        socklen_t len = sizeof soerr;
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &soerr, &len);
        if (pr <= 0 || soerr != 0) {
            ::close(fd);
            throw ConnectFailure("connect " + host + ":" + std::to_string(port) + ": " +
                                 (pr <= 0 ? "timeout" : std::strerror(soerr)));
        }
    }
    ::fcntl(fd, F_SETFL, flags);
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return Conn(fd);
}

}  // namespace fp3d::net
