#include "shw/service.hpp"

#include "shw/bridge.hpp"
#include "shw/errors.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <condition_variable>
#include <csignal>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace shw {

PoseCommand NetworkSource::next(std::uint64_t, double) {
    const auto now = std::chrono::steady_clock::now();
    if (auto mail = mailbox_.take()) {
        last_ = mail->command;
        last_received_ = mail->received;
    }
    active_ = last_received_ && std::chrono::duration<double>(now - *last_received_).count() <= timeout_;
    return last_;
}

namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using udp = asio::ip::udp;

constexpr std::size_t kMaxPendingWrites = 4;

struct Published {
    std::shared_ptr<const std::vector<std::uint8_t>> datagram;
    std::shared_ptr<const std::string> json;
};

class WsSession;

/// State shared by the I/O handlers; touched only from the I/O thread unless atomic.
struct Hub {
    const AppConfig* config = nullptr;
    std::shared_ptr<const std::string> hello;
    CommandMailbox mailbox;
    std::vector<std::weak_ptr<WsSession>> sessions;

    std::atomic<std::uint64_t> ticks{0}, published{0}, dropped{0}, datagrams{0}, commands{0}, malformed{0},
        ws_clients{0}, udp_subs{0}, overruns{0};

    void accept(const wire::CommandPacket& p) {
        mailbox.post({{p.pose(), p.trigger != 0}, p.sequence, std::chrono::steady_clock::now()});
        ++commands;
    }
};

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

    void start(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.read_message_max(64 * 1024);
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (ec) {
                self->open_ = false;
                return;
            }
            self->send(self->hub_.hello, false);
            self->read();
        });
    }

    bool open() const { return open_; }

    void send(std::shared_ptr<const std::string> msg, bool droppable = true) {
        if (!open_) return;
        if (droppable && out_.size() >= kMaxPendingWrites) {
            ++hub_.dropped;
            return;
        }
        out_.push_back(std::move(msg));
        if (out_.size() == 1) write();
    }

private:
    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(*out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->open_ = false;
                self->out_.clear();
                return;
            }
            self->out_.pop_front();
            if (!self->out_.empty()) self->write();
        });
    }

    void read() {
        ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->open_ = false;
                return;
            }
            const std::string text = beast::buffers_to_string(self->buf_.data());
            self->buf_.consume(self->buf_.size());
            if (auto cmd = parse_bridge_command(text))
                self->hub_.accept(*cmd);
            else
                ++self->hub_.malformed;
            self->read();
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    Hub& hub_;
    beast::flat_buffer buf_;
    std::deque<std::shared_ptr<const std::string>> out_;
    bool open_ = true;
};

std::string_view mime_type(const std::filesystem::path& p) {
    const std::string ext = p.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".png") return "image/png";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".wasm") return "application/wasm";
    return "application/octet-stream";
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, Hub& hub) : stream_(std::move(socket)), hub_(hub) {}

    void start() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buf_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (!ec) self->on_request();
        });
    }

private:
    void on_request() {
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            auto ws = std::make_shared<WsSession>(stream_.release_socket(), hub_);
            hub_.sessions.push_back(ws);
            ws->start(std::move(req_));
            return;
        }
        auto res = std::make_shared<http::response<http::string_body>>();
        res->version(req_.version());
        res->keep_alive(false);
        std::string target(req_.target());
        if (const auto q = target.find('?'); q != std::string::npos) target.erase(q);
        if (req_.method() != http::verb::get) {
            res->result(http::status::method_not_allowed);
        } else if (target == "/scene.json") {
            res->result(http::status::ok);
            res->set(http::field::content_type, "application/json");
            res->body() = *hub_.hello;
        } else if (auto body = static_file(target)) {
            res->result(http::status::ok);
            res->set(http::field::content_type, std::string(mime_type(target == "/" ? "index.html" : target)));
            res->body() = std::move(*body);
        } else {
            res->result(http::status::not_found);
            res->set(http::field::content_type, "text/plain");
            res->body() = "not found\n";
        }
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    std::optional<std::string> static_file(const std::string& target) const {
        if (!hub_.config->static_dir || target.empty() || target[0] != '/') return std::nullopt;
        if (target.find("..") != std::string::npos) return std::nullopt;
        const std::filesystem::path rel = target == "/" ? "index.html" : target.substr(1);
        std::ifstream in(*hub_.config->static_dir / rel, std::ios::binary);
        if (!in) return std::nullopt;
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    beast::tcp_stream stream_;
    Hub& hub_;
    beast::flat_buffer buf_;
    http::request<http::string_body> req_;
};

}  // namespace

struct Service::Impl {
    AppConfig config;
    RigConfig rig;
    Scene scene;
    Hub hub;

    asio::io_context ioc;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
    udp::socket udp_socket{ioc};
    tcp::acceptor acceptor{ioc};
    udp::endpoint sender;
    std::array<std::uint8_t, 65536> rx{};
    std::map<udp::endpoint, std::chrono::steady_clock::time_point> subscribers;
    std::optional<asio::signal_set> signals;

    std::mutex queue_mutex;
    std::deque<Published> queue;

    std::atomic<bool> stopping{false};
    std::thread loop_thread, io_thread;
    std::mutex state_mutex;
    std::condition_variable state_cv;
    bool started = false;
    bool stopped = false;

    Impl(AppConfig c, RigConfig r, Scene s) : config(std::move(c)), rig(std::move(r)), scene(std::move(s)) {
        hub.config = &config;
    }

    void bind() {
        const auto address = asio::ip::make_address(config.bind_address);
        const std::string where = config.bind_address + ":";
        try {
            udp_socket.open(address.is_v6() ? udp::v6() : udp::v4());
            udp_socket.bind({address, config.udp_port});
        } catch (const boost::system::system_error& e) {
            throw BindError("udp " + where + std::to_string(config.udp_port) + ": " + e.code().message());
        }
        try {
            const tcp::endpoint ep{address, config.websocket_port};
            acceptor.open(ep.protocol());
            acceptor.set_option(asio::socket_base::reuse_address(true));
            acceptor.bind(ep);
            acceptor.listen();
        } catch (const boost::system::system_error& e) {
            throw BindError("tcp " + where + std::to_string(config.websocket_port) + ": " + e.code().message());
        }
    }

    void receive() {
        udp_socket.async_receive_from(asio::buffer(rx), sender, [this](beast::error_code ec, std::size_t n) {
            if (ec == asio::error::operation_aborted) return;
            if (!ec) on_datagram(std::span<const std::uint8_t>(rx.data(), n));
            receive();
        });
    }

    void on_datagram(std::span<const std::uint8_t> bytes) {
        ++hub.datagrams;
        const auto type = wire::peek_type(bytes);
        if (type == wire::PacketType::Command) {
            if (auto cmd = wire::decode_command(bytes)) {
                hub.accept(*cmd);
                subscribers[sender] = std::chrono::steady_clock::now();
                return;
            }
        } else if (type == wire::PacketType::Subscribe && wire::decode_subscribe(bytes)) {
            subscribers[sender] = std::chrono::steady_clock::now();
            return;
        }
        ++hub.malformed;
    }

    void accept_connections() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec == asio::error::operation_aborted) return;
            if (!ec) std::make_shared<HttpSession>(std::move(socket), hub)->start();
            accept_connections();
        });
    }

    void publish(Published item) {
        {
            std::lock_guard lock(queue_mutex);
            if (queue.size() >= config.egress_queue) {
                queue.pop_front();
                ++hub.dropped;
            }
            queue.push_back(std::move(item));
        }
        asio::post(ioc, [this] { drain(); });
    }

    void drain() {
        std::deque<Published> items;
        {
            std::lock_guard lock(queue_mutex);
            items.swap(queue);
        }
        const auto now = std::chrono::steady_clock::now();
        std::erase_if(subscribers, [&](const auto& kv) {
            return std::chrono::duration<double>(now - kv.second).count() > config.subscriber_timeout;
        });
        std::erase_if(hub.sessions, [](const std::weak_ptr<WsSession>& w) {
            const auto s = w.lock();
            return !s || !s->open();
        });
        hub.udp_subs = subscribers.size();
        hub.ws_clients = hub.sessions.size();
        for (const auto& item : items) {
            for (const auto& [ep, seen] : subscribers)
                udp_socket.async_send_to(asio::buffer(*item.datagram), ep,
                                         [keep = item.datagram](beast::error_code, std::size_t) {});
            for (const auto& w : hub.sessions)
                if (auto s = w.lock()) s->send(item.json);
            ++hub.published;
        }
    }

    void run_loop() {
        HapticLoop loop(rig, scene, config.params);
        NetworkSource source(hub.mailbox, {config.initial_pose, false}, config.client_timeout);
        const Plane plane = effective_shadow_plane(config, scene);
        PoseCommand last_good{config.initial_pose, false};
        std::vector<PuttySample> pending_bead;

        using clock = std::chrono::steady_clock;
        const auto dt = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(config.params.dt));
        auto base = clock::now();
        std::uint64_t since_base = 0;
        while (!stopping.load(std::memory_order_relaxed)) {
            const auto deadline = base + since_base * dt;
            const auto now = clock::now();
            if (deadline > now) {
                std::this_thread::sleep_until(deadline);
            } else if (now - deadline > 50 * dt) {
                // far behind (suspended or overloaded): restart the schedule instead of bursting
                ++hub.overruns;
                base = now;
                since_base = 0;
            } else if (now - deadline > dt) {
                ++hub.overruns;
            }
            ++since_base;

            PoseCommand cmd = source.next(loop.tick(), static_cast<double>(loop.tick()) * config.params.dt);
            HapticFrame frame;
            try {
                frame = loop.step(cmd.pose, cmd.trigger);
                last_good = cmd;
            } catch (const Error& e) {
                std::cerr << "shw serve: rejected command: " << e.what() << '\n';
                frame = loop.step(last_good.pose, last_good.trigger);
            }
            ++hub.ticks;
            pending_bead.insert(pending_bead.end(), frame.bead_delta.begin(), frame.bead_delta.end());
            if (frame.tick % static_cast<std::uint64_t>(config.publish_every) != 0) continue;

            frame.bead_delta = std::move(pending_bead);
            pending_bead.clear();
            const wire::StatePacket packet = wire::StatePacket::from_frame(frame);
            const BridgeExtras extras =
                make_bridge_extras(frame, rig, scene, config.light_direction, plane, source.client_active());
            publish({std::make_shared<const std::vector<std::uint8_t>>(wire::encode(packet)),
                     std::make_shared<const std::string>(bridge_state_json(packet, extras))});
        }
    }
};

Service::Service(AppConfig config, RigConfig rig, Scene scene)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(rig), std::move(scene))) {
    // validates rig and parameters before any socket is opened
    HapticLoop probe(impl_->rig, impl_->scene, impl_->config.params);
    (void)probe;
}

Service::~Service() { stop(); }

void Service::start() {
    Impl& m = *impl_;
    {
        std::lock_guard lock(m.state_mutex);
        if (m.started) return;
    }
    m.hub.hello = std::make_shared<const std::string>(bridge_hello_json(m.config, m.rig, m.scene));
    m.bind();
    m.work.emplace(m.ioc.get_executor());
    m.signals.emplace(m.ioc, SIGINT, SIGTERM);
    m.signals->async_wait([this](beast::error_code ec, int) {
        if (ec) return;
        std::lock_guard lock(impl_->state_mutex);
        impl_->stopping = true;
        impl_->state_cv.notify_all();
    });
    m.receive();
    m.accept_connections();
    m.io_thread = std::thread([&m] { m.ioc.run(); });
    m.loop_thread = std::thread([&m] { m.run_loop(); });
    std::lock_guard lock(m.state_mutex);
    m.started = true;
}

void Service::wait(std::optional<double> seconds) {
    Impl& m = *impl_;
    std::unique_lock lock(m.state_mutex);
    auto done = [&] { return m.stopping.load() || m.stopped; };
    if (seconds)
        m.state_cv.wait_for(lock, std::chrono::duration<double>(*seconds), done);
    else
        m.state_cv.wait(lock, done);
}

void Service::stop() {
    Impl& m = *impl_;
    {
        std::lock_guard lock(m.state_mutex);
        if (!m.started || m.stopped) return;
        m.stopped = true;
        m.stopping = true;
    }
    if (m.loop_thread.joinable()) m.loop_thread.join();
    m.work.reset();
    m.ioc.stop();
    if (m.io_thread.joinable()) m.io_thread.join();
    beast::error_code ec;
    if (m.signals) m.signals->cancel(ec);
    m.udp_socket.close(ec);
    m.acceptor.close(ec);
    m.state_cv.notify_all();
}

std::uint16_t Service::udp_port() const {
    beast::error_code ec;
    const auto ep = impl_->udp_socket.local_endpoint(ec);
    return ec ? impl_->config.udp_port : ep.port();
}

std::uint16_t Service::websocket_port() const {
    beast::error_code ec;
    const auto ep = impl_->acceptor.local_endpoint(ec);
    return ec ? impl_->config.websocket_port : ep.port();
}

ServiceStats Service::stats() const {
    const Hub& h = impl_->hub;
    ServiceStats s;
    s.ticks = h.ticks;
    s.frames_published = h.published;
    s.frames_dropped = h.dropped;
    s.datagrams_received = h.datagrams;
    s.commands_accepted = h.commands;
    s.malformed = h.malformed;
    s.websocket_clients = h.ws_clients;
    s.udp_subscribers = h.udp_subs;
    s.overruns = h.overruns;
    return s;
}

}  // namespace shw
