#pragma once

#include "shw/config.hpp"
#include "shw/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>

namespace shw {

/// Single-slot command mailbox: writers replace, the reader takes; newest wins.
class CommandMailbox {
public:
    struct Mail {
        PoseCommand command;
        std::uint32_t sequence = 0;
        std::chrono::steady_clock::time_point received;
    };

    CommandMailbox() = default;
    CommandMailbox(const CommandMailbox&) = delete;
    CommandMailbox& operator=(const CommandMailbox&) = delete;
    ~CommandMailbox() { delete slot_.exchange(nullptr); }

    void post(const Mail& mail) { delete slot_.exchange(new Mail(mail)); }
    std::optional<Mail> take() {
        std::unique_ptr<Mail> m(slot_.exchange(nullptr));
        if (!m) return std::nullopt;
        return *m;
    }

private:
    std::atomic<Mail*> slot_{nullptr};
};

/// Pose source fed by network clients. Without fresh commands the last pose is held.
class NetworkSource : public PoseSource {
public:
    NetworkSource(CommandMailbox& mailbox, PoseCommand initial, double timeout_s)
        : mailbox_(mailbox), last_(initial), timeout_(timeout_s) {}

    PoseCommand next(std::uint64_t tick, double sim_time) override;
    /// A command arrived within the timeout.
    bool client_active() const { return active_; }

private:
    CommandMailbox& mailbox_;
    PoseCommand last_;
    double timeout_;
    std::optional<std::chrono::steady_clock::time_point> last_received_;
    bool active_ = false;
};

struct ServiceStats {
    std::uint64_t ticks = 0;
    std::uint64_t frames_published = 0;
    std::uint64_t frames_dropped = 0;
    std::uint64_t datagrams_received = 0;
    std::uint64_t commands_accepted = 0;
    std::uint64_t malformed = 0;
    std::uint64_t websocket_clients = 0;
    std::uint64_t udp_subscribers = 0;
    std::uint64_t overruns = 0;  // ticks that started later than their deadline
};

/// Real-time loop plus its network endpoints: datagram commands/state on the UDP
/// port and a websocket bridge (with optional static files) on the TCP port.
class Service {
public:
    Service(AppConfig config, RigConfig rig, Scene scene);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds both endpoints and starts the loop and I/O threads. Throws BindError.
    void start();
    /// Blocks until stop(), SIGINT/SIGTERM, or the optional duration elapses.
    void wait(std::optional<double> seconds = std::nullopt);
    void stop();

    std::uint16_t udp_port() const;
    std::uint16_t websocket_port() const;
    ServiceStats stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace shw
