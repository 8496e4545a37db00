#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "xcs/literal.hpp"

namespace xcs {

// Datagram frame: magic, sender id, per-sender sequence counter, payload.
// Fields little-endian; payload is an encoded export.
//
//   0xAF 0x01 | sender u32 | counter u32 | length u16 | payload bytes
struct Packet {
    DeviceId sender = 0;
    std::uint32_t counter = 0;
    std::string payload;
};

inline constexpr std::uint8_t kPacketMagic0 = 0xAF;
inline constexpr std::uint8_t kPacketMagic1 = 0x01;
inline constexpr std::size_t kPacketHeaderSize = 2 + 4 + 4 + 2;

inline std::string encode_packet(const Packet& p) {
    std::string out;
    out.reserve(kPacketHeaderSize + p.payload.size());
    out.push_back(static_cast<char>(kPacketMagic0));
    out.push_back(static_cast<char>(kPacketMagic1));
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((p.sender >> (8 * i)) & 0xFF));
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((p.counter >> (8 * i)) & 0xFF));
    std::uint16_t len = static_cast<std::uint16_t>(p.payload.size());
    out.push_back(static_cast<char>(len & 0xFF));
    out.push_back(static_cast<char>((len >> 8) & 0xFF));
    out += p.payload;
    return out;
}

inline std::optional<Packet> decode_packet(const std::string& buf) {
    if (buf.size() < kPacketHeaderSize) return std::nullopt;
    if (static_cast<std::uint8_t>(buf[0]) != kPacketMagic0 ||
        static_cast<std::uint8_t>(buf[1]) != kPacketMagic1)
        return std::nullopt;
    auto u8 = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[i])); };
    Packet p;
    p.sender = u8(2) | (u8(3) << 8) | (u8(4) << 16) | (u8(5) << 24);
    p.counter = u8(6) | (u8(7) << 8) | (u8(8) << 16) | (u8(9) << 24);
    std::size_t len = u8(10) | (u8(11) << 8);
    if (buf.size() != kPacketHeaderSize + len) return std::nullopt;
    p.payload = buf.substr(kPacketHeaderSize);
    return p;
}

// Per-sender duplicate/stale filter using serial-number arithmetic, so a
// counter that wraps past 2^32-1 still counts as newer.
class PacketFilter {
public:
    bool accept(DeviceId sender, std::uint32_t counter) {
        auto it = last_.find(sender);
        if (it == last_.end()) {
            last_.emplace(sender, counter);
            return true;
        }
        std::int32_t diff = static_cast<std::int32_t>(counter - it->second);
        if (diff <= 0) return false;
        it->second = counter;
        return true;
    }

private:
    std::map<DeviceId, std::uint32_t> last_;
};

struct Received {
    DeviceId sender = 0;
    std::string payload;
    double age = 0;  // seconds between reception and the poll that returned it
};

// Message fabric seen by the round executor: non-blocking broadcast out,
// deduplicated poll in.
class Transceiver {
public:
    virtual ~Transceiver() = default;
    virtual bool send(const std::string& payload) = 0;
    virtual std::vector<Received> poll() = 0;
    virtual std::string last_error() const { return {}; }
};

struct UdpConfig {
    std::uint16_t port = 47474;
    std::string bind_addr = "0.0.0.0";
    std::string broadcast_addr = "255.255.255.255";
    // When set, datagrams go to these "host:port" endpoints instead of the
    // broadcast address (useful on loopback or segmented networks).
    std::vector<std::string> peers;
    std::size_t max_payload = 60000;
    double retention = 2.0;  // seconds a queued datagram stays pollable
};

// Broadcast datagram driver. The receive loop runs on its own thread and
// hands packets to the round executor through a queue; send never blocks the
// round loop. Duplicate (sender, counter) pairs and our own broadcasts are
// dropped before the executor sees them.
class UdpTransport : public Transceiver {
public:
    UdpTransport() = default;
    ~UdpTransport() override { stop(); }

    UdpTransport(const UdpTransport&) = delete;
    UdpTransport& operator=(const UdpTransport&) = delete;

    bool start(DeviceId id, const UdpConfig& cfg) {
        id_ = id;
        cfg_ = cfg;
        fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
        if (fd_ < 0) return fail("socket: " + std::string(std::strerror(errno)));
        int yes = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEPORT, &yes, sizeof yes);
        ::setsockopt(fd_, SOL_SOCKET, SO_BROADCAST, &yes, sizeof yes);
        timeval tv{0, 100000};  // bounded recv wait so stop() is prompt
        ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);

        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(cfg.port);
        if (::inet_pton(AF_INET, cfg.bind_addr.c_str(), &addr.sin_addr) != 1)
            return fail("bad bind address " + cfg.bind_addr);
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
            return fail("bind: " + std::string(std::strerror(errno)));

        running_ = true;
        rx_thread_ = std::thread([this] { rx_loop(); });
        return true;
    }

    void stop() {
        running_ = false;
        if (rx_thread_.joinable()) rx_thread_.join();
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

    bool send(const std::string& payload) override {
        if (fd_ < 0) return fail("transport not started");
        if (payload.size() > cfg_.max_payload)
            return fail("payload of " + std::to_string(payload.size()) +
                        " bytes exceeds the datagram budget of " + std::to_string(cfg_.max_payload));
        Packet p{id_, ++counter_, payload};
        std::string frame = encode_packet(p);

        bool ok = true;
        if (cfg_.peers.empty()) {
            ok = send_to(frame, cfg_.broadcast_addr, cfg_.port);
        } else {
            for (const auto& peer : cfg_.peers) {
                auto colon = peer.rfind(':');
                std::string host = colon == std::string::npos ? peer : peer.substr(0, colon);
                std::uint16_t port =
                    colon == std::string::npos
                        ? cfg_.port
                        : static_cast<std::uint16_t>(std::stoi(peer.substr(colon + 1)));
                ok = send_to(frame, host, port) && ok;
            }
        }
        down_ = !ok;
        return ok;
    }

    std::vector<Received> poll() override {
        std::deque<Stamped> pending;
        {
            std::lock_guard<std::mutex> lock(mu_);
            pending.swap(queue_);
        }
        std::vector<Received> out;
        auto now = Clock::now();
        for (auto& s : pending) {
            double age = std::chrono::duration<double>(now - s.at).count();
            if (age > cfg_.retention) continue;  // sat unpolled too long
            auto p = decode_packet(s.frame);
            if (!p) continue;
            if (p->sender == id_) continue;  // our own broadcast echoed back
            if (!filter_.accept(p->sender, p->counter)) continue;
            out.push_back({p->sender, std::move(p->payload), age});
        }
        return out;
    }

    bool down() const { return down_; }
    std::string last_error() const override {
        std::lock_guard<std::mutex> lock(err_mu_);
        return error_;
    }
    std::uint32_t counter() const { return counter_; }

private:
    using Clock = std::chrono::steady_clock;
    struct Stamped {
        std::string frame;
        Clock::time_point at;
    };

    bool fail(std::string msg) {
        std::lock_guard<std::mutex> lock(err_mu_);
        error_ = std::move(msg);
        return false;
    }

    bool send_to(const std::string& frame, const std::string& host, std::uint16_t port) {
        sockaddr_in dst{};
        dst.sin_family = AF_INET;
        dst.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &dst.sin_addr) != 1)
            return fail("bad destination address " + host);
        ssize_t n = ::sendto(fd_, frame.data(), frame.size(), MSG_DONTWAIT,
                             reinterpret_cast<sockaddr*>(&dst), sizeof dst);
        if (n < 0) return fail("sendto: " + std::string(std::strerror(errno)));
        return true;
    }

    void rx_loop() {
        std::string buf(kPacketHeaderSize + cfg_.max_payload, '\0');
        while (running_) {
            ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
            if (n <= 0) continue;  // timeout or transient error; keep listening
            std::lock_guard<std::mutex> lock(mu_);
            queue_.push_back({buf.substr(0, static_cast<std::size_t>(n)), Clock::now()});
            if (queue_.size() > 4096) queue_.pop_front();
        }
    }

    DeviceId id_ = 0;
    UdpConfig cfg_;
    int fd_ = -1;
    std::atomic<bool> running_{false};
    std::atomic<bool> down_{false};
    std::uint32_t counter_ = 0;
    std::thread rx_thread_;
    std::mutex mu_;
    std::deque<Stamped> queue_;
    PacketFilter filter_;
    mutable std::mutex err_mu_;
    std::string error_;
};

// In-memory bus with the same contract as the datagram driver, for tests
// and for running several nodes inside one process.
class MemoryBus {
public:
    class Endpoint : public Transceiver {
    public:
        Endpoint(MemoryBus& bus, DeviceId id) : bus_(bus), id_(id) {}

        bool send(const std::string& payload) override {
            bus_.broadcast(id_, payload);
            return true;
        }

        std::vector<Received> poll() override {
            std::lock_guard<std::mutex> lock(bus_.mu_);
            std::vector<Received> out;
            auto& q = bus_.queues_[id_];
            for (auto& m : q) {
                if (!filter_.accept(m.sender, m.counter)) continue;
                out.push_back({m.sender, m.payload, 0.0});
            }
            q.clear();
            return out;
        }

    private:
        MemoryBus& bus_;
        DeviceId id_;
        PacketFilter filter_;
    };

    std::unique_ptr<Endpoint> make_endpoint(DeviceId id) {
        std::lock_guard<std::mutex> lock(mu_);
        queues_[id];
        return std::make_unique<Endpoint>(*this, id);
    }

private:
    friend class Endpoint;
    struct Msg {
        DeviceId sender;
        std::uint32_t counter;
        std::string payload;
    };

    void broadcast(DeviceId from, const std::string& payload) {
        std::lock_guard<std::mutex> lock(mu_);
        std::uint32_t c = ++counters_[from];
        for (auto& [id, q] : queues_) {
            if (id == from) continue;
            q.push_back({from, c, payload});
        }
    }

    std::mutex mu_;
    std::map<DeviceId, std::vector<Msg>> queues_;
    std::map<DeviceId, std::uint32_t> counters_;
};

}  // namespace xcs
